//! `oap-matrix v1` text format and its JSON mirror.
//!
//! ```text
//! oap-matrix v1 form=reduced k=3 s=2 t=2 lambda=1 rows=8 cols=1
//! 1,1,1 GE -1 : 0:-1
//! ...
//! col 0 2,2,2
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ConstraintRow, ConstraintSystem, Form, Relation, RowLabel};
use crate::error::{OapError, Result};
use crate::model::{LevelTuple, OAParams};

fn parse_err(line: usize, message: impl Into<String>) -> OapError {
    OapError::Parse { line, message: message.into() }
}

impl ConstraintSystem {
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        writeln!(
            out,
            "oap-matrix v1 form={} k={} s={} t={} lambda={} rows={} cols={}",
            self.form,
            p.k,
            p.s,
            p.t,
            p.lambda,
            self.num_rows(),
            self.num_cols()
        )
        .unwrap();
        for row in &self.rows {
            write!(out, "{} {} {} :", row.label, row.relation, row.rhs).unwrap();
            for &(j, c) in &row.coeffs {
                write!(out, " {j}:{c}").unwrap();
            }
            out.push('\n');
        }
        for (j, v) in self.variables.iter().enumerate() {
            writeln!(out, "col {j} {v}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some("oap-matrix") || tokens.next() != Some("v1") {
            return Err(parse_err(hline, "expected header `oap-matrix v1 ...`"));
        }
        let mut field = |name: &str| -> Result<String> {
            let tok = tokens.next().ok_or_else(|| parse_err(hline, format!("missing {name}=")))?;
            tok.strip_prefix(&format!("{name}="))
                .map(str::to_owned)
                .ok_or_else(|| parse_err(hline, format!("expected {name}=, got {tok:?}")))
        };
        let num = |v: String, name: &str| -> Result<u64> {
            v.parse().map_err(|_| parse_err(hline, format!("bad {name} value {v:?}")))
        };
        let form: Form = field("form")?.parse().map_err(|e: OapError| parse_err(hline, e.to_string()))?;
        let k = num(field("k")?, "k")? as usize;
        let s = num(field("s")?, "s")? as usize;
        let t = num(field("t")?, "t")? as usize;
        let lambda = num(field("lambda")?, "lambda")?;
        let nrows = num(field("rows")?, "rows")? as usize;
        let ncols = num(field("cols")?, "cols")? as usize;
        let params = OAParams::new(k, s, t, lambda).map_err(|e| parse_err(hline, e.to_string()))?;

        let mut rows = Vec::with_capacity(nrows);
        let mut variables = Vec::with_capacity(ncols);
        for (ln, line) in lines {
            if let Some(rest) = line.strip_prefix("col ") {
                let (idx, tuple) =
                    rest.trim().split_once(' ').ok_or_else(|| parse_err(ln, "expected `col <ordinal> <tuple>`"))?;
                if idx.parse::<usize>().ok() != Some(variables.len()) {
                    return Err(parse_err(ln, format!("column ordinal {idx} out of sequence")));
                }
                let tuple: LevelTuple = tuple.trim().parse().map_err(|e: OapError| parse_err(ln, e.to_string()))?;
                variables.push(tuple);
                continue;
            }
            let (head, entries) = line.split_once(" : ").or_else(|| line.strip_suffix(" :").map(|h| (h, "")))
                .ok_or_else(|| parse_err(ln, "expected `<label> <relation> <rhs> : <entries>`"))?;
            let head: Vec<&str> = head.split_whitespace().collect();
            let [label, relation, rhs] = head[..] else {
                return Err(parse_err(ln, "row head must be `<label> <relation> <rhs>`"));
            };
            let label: RowLabel = label.parse().map_err(|e: OapError| parse_err(ln, e.to_string()))?;
            let relation: Relation = relation.parse().map_err(|e: OapError| parse_err(ln, e.to_string()))?;
            let rhs: i64 = rhs.parse().map_err(|_| parse_err(ln, format!("bad rhs {rhs:?}")))?;
            let coeffs = entries
                .split_whitespace()
                .map(|e| {
                    let (c, v) = e.split_once(':').ok_or_else(|| parse_err(ln, format!("bad entry {e:?}")))?;
                    let c: usize = c.parse().map_err(|_| parse_err(ln, format!("bad column {c:?}")))?;
                    let v: i64 = v.parse().map_err(|_| parse_err(ln, format!("bad coefficient {v:?}")))?;
                    if c >= ncols {
                        return Err(parse_err(ln, format!("column {c} out of range")));
                    }
                    Ok((c, v))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(ConstraintRow { label, coeffs, relation, rhs });
        }
        if rows.len() != nrows || variables.len() != ncols {
            return Err(parse_err(
                hline,
                format!("header declares {nrows}x{ncols}, body has {}x{}", rows.len(), variables.len()),
            ));
        }
        Ok(ConstraintSystem { params, form, rows, variables })
    }

    pub fn to_document(&self) -> MatrixDocument {
        let p = &self.params;
        MatrixDocument {
            format: "oap-matrix".into(),
            version: 1,
            form: self.form,
            k: p.k,
            s: p.s,
            t: p.t,
            lambda: p.lambda,
            rows: self.num_rows(),
            cols: self.num_cols(),
            entries: self
                .rows
                .iter()
                .map(|r| MatrixRowDocument {
                    label: r.label.to_string(),
                    relation: r.relation,
                    rhs: r.rhs,
                    coeffs: r.coeffs.clone(),
                })
                .collect(),
            columns: self.variables.clone(),
        }
    }

    pub fn from_document(doc: &MatrixDocument) -> Result<Self> {
        let bad = |m: String| parse_err(0, m);
        if doc.format != "oap-matrix" || doc.version != 1 {
            return Err(bad(format!("unsupported document {} v{}", doc.format, doc.version)));
        }
        let params = OAParams::new(doc.k, doc.s, doc.t, doc.lambda)?;
        if doc.entries.len() != doc.rows || doc.columns.len() != doc.cols {
            return Err(bad("row/column counts disagree with the data".into()));
        }
        let rows = doc
            .entries
            .iter()
            .map(|r| {
                if r.coeffs.iter().any(|&(c, _)| c >= doc.cols) {
                    return Err(bad(format!("row {} references a missing column", r.label)));
                }
                Ok(ConstraintRow { label: r.label.parse()?, coeffs: r.coeffs.clone(), relation: r.relation, rhs: r.rhs })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConstraintSystem { params, form: doc.form, rows, variables: doc.columns.clone() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("matrix documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&serde_json::from_str(text)?)
    }
}

/// JSON form of a matrix file: the header fields, then `entries` (one per
/// row line, coefficients as `[column, value]` pairs), then the column legend.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub format: String,
    pub version: u32,
    pub form: Form,
    pub k: usize,
    pub s: usize,
    pub t: usize,
    pub lambda: u64,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<MatrixRowDocument>,
    pub columns: Vec<LevelTuple>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRowDocument {
    pub label: String,
    pub relation: Relation,
    pub rhs: i64,
    pub coeffs: Vec<(usize, i64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{build_full, build_reduced};
    use proptest::prelude::*;

    #[test]
    fn golden_degenerate_text() {
        let sys = build_reduced(&OAParams::new(3, 2, 2, 1).unwrap()).unwrap();
        let text = sys.to_text();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("oap-matrix v1 form=reduced k=3 s=2 t=2 lambda=1 rows=8 cols=1"));
        assert_eq!(lines.next(), Some("1,1,1 GE -1 : 0:-1"));
        assert_eq!(lines.next(), Some("1,1,2 GE 0 : 0:1"));
        assert_eq!(text.lines().last(), Some("col 0 2,2,2"));
    }

    #[test]
    fn golden_full_row() {
        let sys = build_full(&OAParams::new(2, 2, 1, 1).unwrap());
        assert_eq!(sys.to_text().lines().nth(1), Some("I=1;a=1 EQ 1 : 0:1 1:1"));
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(matches!(ConstraintSystem::from_text(""), Err(OapError::Parse { .. })));
        assert!(ConstraintSystem::from_text("oap-matrix v2 form=full").is_err());
        let good = build_full(&OAParams::new(2, 2, 1, 1).unwrap()).to_text();
        let truncated: String = good.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(ConstraintSystem::from_text(&truncated).is_err());
        let bad_col = good.replace(" 1:1", " 9:1");
        assert!(ConstraintSystem::from_text(&bad_col).is_err());
    }

    proptest! {
        #[test]
        fn text_and_json_round_trip(k in 1usize..5, s in 2usize..4, t_frac in 0usize..5, lambda in 1u64..4, full in any::<bool>()) {
            let t = t_frac % (k + 1);
            let params = OAParams::new(k, s, t, lambda).unwrap();
            let sys = if full || t == k { build_full(&params) } else { build_reduced(&params).unwrap() };
            prop_assert_eq!(&ConstraintSystem::from_text(&sys.to_text()).unwrap(), &sys);
            prop_assert_eq!(&ConstraintSystem::from_json(&sys.to_json()).unwrap(), &sys);
        }
    }
}
