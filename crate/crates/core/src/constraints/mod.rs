//! The two integer-linear formulations of orthogonal-array existence.
//!
//! * **Full**: one frequency variable `N_x` per `x ∈ [s]^k` and one equation
//!   per `t`-subset `I` of factors and level assignment `a` on `I`, stating
//!   that the combinations agreeing with `a` on `I` occur `λ` times in total.
//! * **Reduced**: after eliminating every `N_x` with `d(1,x) ≤ t`, only the
//!   variables `N_y`, `y ∈ Y`, remain, constrained by one `≥` row per
//!   eliminated variable plus `N_y ≥ 0`. Rows are indexed by `[s]^k`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coefficients::a_recurrence;
use crate::error::{usage, OapError, Result};
use crate::model::{all_tuples, binomial, tuple_rank, variable_set, LevelTuple, OAParams};

mod format;
mod lift;
mod probe;

pub use format::{MatrixDocument, MatrixRowDocument};
pub use lift::{lift_solution, project_solution, LiftScalar};
pub use probe::{ball_first_order, probe_basis_integrality, probe_ordering_integral, ProbeReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Full,
    Reduced,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Full => "full",
            Form::Reduced => "reduced",
        })
    }
}

impl FromStr for Form {
    type Err = OapError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Form::Full),
            "reduced" => Ok(Form::Reduced),
            _ => usage(format!("unknown form {s:?}, expected full or reduced")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "EQ")]
    Eq,
    #[serde(rename = "GE")]
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "EQ",
            Relation::Ge => "GE",
        })
    }
}

impl FromStr for Relation {
    type Err = OapError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "EQ" => Ok(Relation::Eq),
            "GE" => Ok(Relation::Ge),
            _ => usage(format!("unknown relation {s:?}")),
        }
    }
}

/// What a row is indexed by.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RowLabel {
    /// A reduced-system row: the eliminated `x` or the nonnegative `y`.
    Tuple(LevelTuple),
    /// A full-system margin: 1-based factor subset `I` and the levels on it.
    Margin { subset: Vec<usize>, levels: Vec<u32> },
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::Tuple(x) => write!(f, "{x}"),
            RowLabel::Margin { subset, levels } => {
                let join = |v: Vec<String>| v.join(",");
                write!(
                    f,
                    "I={};a={}",
                    join(subset.iter().map(ToString::to_string).collect()),
                    join(levels.iter().map(ToString::to_string).collect())
                )
            }
        }
    }
}

impl FromStr for RowLabel {
    type Err = OapError;
    fn from_str(s: &str) -> Result<Self> {
        let Some(rest) = s.strip_prefix("I=") else {
            return Ok(RowLabel::Tuple(s.parse()?));
        };
        let (subset, levels) = rest
            .split_once(";a=")
            .ok_or_else(|| OapError::Usage(format!("bad margin label {s:?}")))?;
        let parse_list = |part: &str| -> Result<Vec<u32>> {
            if part.is_empty() {
                return Ok(Vec::new());
            }
            part.split(',')
                .map(|v| v.parse::<u32>().map_err(|_| OapError::Usage(format!("bad margin label {s:?}"))))
                .collect()
        };
        let subset: Vec<usize> = parse_list(subset)?.into_iter().map(|v| v as usize).collect();
        let levels = parse_list(levels)?;
        if subset.len() != levels.len() {
            return usage(format!("margin label {s:?} has mismatched lengths"));
        }
        Ok(RowLabel::Margin { subset, levels })
    }
}

/// `Σ coeffs · N  (relation)  rhs`, with sparse, column-sorted, nonzero
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintRow {
    pub label: RowLabel,
    pub coeffs: Vec<(usize, i64)>,
    pub relation: Relation,
    pub rhs: i64,
}

impl ConstraintRow {
    pub fn lhs<T: LiftScalar>(&self, point: &[T]) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, &(j, c)| acc + T::from_i64(c) * point[j].clone())
    }

    pub fn is_satisfied_by(&self, point: &[i64]) -> bool {
        let lhs: i128 = self.coeffs.iter().map(|&(j, c)| c as i128 * point[j] as i128).sum();
        match self.relation {
            Relation::Eq => lhs == self.rhs as i128,
            Relation::Ge => lhs >= self.rhs as i128,
        }
    }

    /// Row content without its label, for duplicate detection.
    fn content(&self) -> (&[(usize, i64)], Relation, i64) {
        (&self.coeffs, self.relation, self.rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DistinctRow {
    /// Index of the first occurrence in `rows`.
    pub index: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub params: OAParams,
    pub form: Form,
    pub rows: Vec<ConstraintRow>,
    /// Column `j` is the frequency of `variables[j]`.
    pub variables: Vec<LevelTuple>,
}

impl ConstraintSystem {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.variables.len()
    }

    /// Identical rows grouped, in order of first occurrence.
    pub fn distinct_rows(&self) -> Vec<DistinctRow> {
        let mut seen: HashMap<(&[(usize, i64)], Relation, i64), usize> = HashMap::new();
        let mut out: Vec<DistinctRow> = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            match seen.get(&row.content()) {
                Some(&slot) => out[slot].multiplicity += 1,
                None => {
                    seen.insert(row.content(), out.len());
                    out.push(DistinctRow { index: i, multiplicity: 1 });
                }
            }
        }
        out
    }

    /// Every row holds at `point`. Nonnegativity of the full system's
    /// frequencies is not a row and is not checked here.
    pub fn is_satisfied_by(&self, point: &[i64]) -> bool {
        point.len() == self.num_cols() && self.rows.iter().all(|r| r.is_satisfied_by(point))
    }

    pub fn dense_matrix(&self) -> Vec<Vec<i64>> {
        self.rows
            .iter()
            .map(|r| {
                let mut dense = vec![0; self.num_cols()];
                for &(j, c) in &r.coeffs {
                    dense[j] = c;
                }
                dense
            })
            .collect()
    }
}

/// Lexicographically ordered `r`-subsets of `0..n`.
pub(crate) fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::with_capacity(r), &mut out);
    out
}

/// The full equality system, one row per deduplicated `(I, a|_I)`.
pub fn build_full(params: &OAParams) -> ConstraintSystem {
    let variables = all_tuples(params);
    let lambda = params.lambda as i64;
    let t_params = OAParams { k: params.t, ..*params };
    let assignments = if params.t == 0 { vec![LevelTuple(Vec::new())] } else { all_tuples(&t_params) };
    let mut rows = Vec::with_capacity(binomial(params.k, params.t) as usize * assignments.len());
    for subset in combinations(params.k, params.t) {
        for a in &assignments {
            let coeffs = variables
                .iter()
                .enumerate()
                .filter(|(_, x)| subset.iter().zip(&a.0).all(|(&i, &v)| x.0[i] == v))
                .map(|(j, _)| (j, 1))
                .collect();
            rows.push(ConstraintRow {
                label: RowLabel::Margin {
                    subset: subset.iter().map(|i| i + 1).collect(),
                    levels: a.0.clone(),
                },
                coeffs,
                relation: Relation::Eq,
                rhs: lambda,
            });
        }
    }
    ConstraintSystem { params: *params, form: Form::Full, rows, variables }
}

/// The reduced inequality system: rows are indexed by `u ∈ [s]^k` in
/// lexicographic order. For `d(1,u) ≤ t` the row is
/// `(−1)^{c+1} Σ_{y ∈ J_u ∩ Y} C(d(1,y)−d(1,u)−1, c) N_y ≥ −a_c` with
/// `c = t − d(1,u)`; otherwise it is `N_u ≥ 0`.
pub fn build_reduced(params: &OAParams) -> Result<ConstraintSystem> {
    let variables = variable_set(params)?;
    let a = a_recurrence(params).to_i64()?;
    let mut rows = Vec::with_capacity(params.tuple_count());
    let ordinal: HashMap<&LevelTuple, usize> = variables.iter().enumerate().map(|(j, y)| (y, j)).collect();
    for u in all_tuples(params) {
        let d = u.weight();
        let row = if d <= params.t {
            let c = params.t - d;
            let sign: i64 = if c.is_multiple_of(2) { -1 } else { 1 };
            let support = u.support();
            let coeffs = variables
                .iter()
                .enumerate()
                .filter(|(_, y)| support.iter().all(|&i| y.0[i] == u.0[i]))
                .map(|(j, y)| {
                    let gap = y.weight() - d - 1;
                    let coef = i64::try_from(binomial(gap, c))
                        .map_err(|_| OapError::Usage("coefficient overflow".into()))?;
                    Ok((j, sign * coef))
                })
                .collect::<Result<Vec<_>>>()?;
            ConstraintRow { label: RowLabel::Tuple(u), coeffs, relation: Relation::Ge, rhs: -a[c] }
        } else {
            let j = ordinal[&u];
            ConstraintRow { label: RowLabel::Tuple(u), coeffs: vec![(j, 1)], relation: Relation::Ge, rhs: 0 }
        };
        rows.push(row);
    }
    Ok(ConstraintSystem { params: *params, form: Form::Reduced, rows, variables })
}

pub fn build(params: &OAParams, form: Form) -> Result<ConstraintSystem> {
    match form {
        Form::Full => Ok(build_full(params)),
        Form::Reduced => build_reduced(params),
    }
}

/// Row index of the reduced-system inequality labelled `u`.
pub fn reduced_row_index(params: &OAParams, u: &LevelTuple) -> usize {
    tuple_rank(params, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank;

    fn p(k: usize, s: usize, t: usize, l: u64) -> OAParams {
        OAParams::new(k, s, t, l).unwrap()
    }

    #[test]
    fn full_system_shape() {
        let sys = build_full(&p(3, 2, 2, 1));
        assert_eq!(sys.num_rows(), 12);
        assert_eq!(sys.num_cols(), 8);
        assert!(sys.rows.iter().all(|r| r.rhs == 1 && r.relation == Relation::Eq));
        assert!(sys.rows.iter().all(|r| r.coeffs.iter().all(|&(_, c)| c == 1)));

        let sys = build_full(&p(2, 2, 0, 3));
        assert_eq!(sys.num_rows(), 1);
        assert_eq!(sys.rows[0].coeffs.len(), 4);
        assert_eq!(sys.rows[0].rhs, 3);
    }

    #[test]
    fn full_columns_hit_once_per_subset() {
        for (k, s, t) in [(3, 2, 2), (4, 3, 2), (4, 2, 1), (3, 3, 3)] {
            let sys = build_full(&p(k, s, t, 1));
            let mut count = vec![0u64; sys.num_cols()];
            for row in &sys.rows {
                for &(j, _) in &row.coeffs {
                    count[j] += 1;
                }
            }
            assert!(count.iter().all(|&c| c == binomial(k, t)));
        }
    }

    #[test]
    fn reduced_coefficient_example() {
        let params = p(4, 2, 2, 1);
        let sys = build_reduced(&params).unwrap();
        let row = &sys.rows[reduced_row_index(&params, &params.ones())];
        let deep = sys.variables.iter().position(|y| y.weight() == 4).unwrap();
        assert_eq!(row.coeffs.iter().find(|&&(j, _)| j == deep).unwrap().1, -3);
        assert_eq!(row.rhs, -2);
    }

    #[test]
    fn degenerate_rows_repeat() {
        for k in 3..=5 {
            let params = p(k, 2, k - 1, 2);
            let sys = build_reduced(&params).unwrap();
            assert_eq!(sys.num_rows(), 1 << k);
            let distinct = sys.distinct_rows();
            assert_eq!(distinct.len(), 2);
            assert!(distinct.iter().all(|d| d.multiplicity == 1 << (k - 1)));
            let contents: Vec<_> =
                distinct.iter().map(|d| (sys.rows[d.index].coeffs.clone(), sys.rows[d.index].rhs)).collect();
            assert!(contents.contains(&(vec![(0, 1)], 0)));
            assert!(contents.contains(&(vec![(0, -1)], -2)));
        }
    }

    #[test]
    fn strength_zero_bound_row_is_all_minus_one() {
        let params = p(3, 2, 0, 1);
        let sys = build_reduced(&params).unwrap();
        let row = &sys.rows[0];
        assert_eq!(row.label, RowLabel::Tuple(params.ones()));
        assert_eq!(row.coeffs.len(), 7);
        assert!(row.coeffs.iter().all(|&(_, c)| c == -1));
        assert_eq!(row.rhs, -1);
        assert!(sys.rows[1..].iter().all(|r| r.coeffs.len() == 1 && r.coeffs[0].1 == 1 && r.rhs == 0));
    }

    #[test]
    fn reduced_counts_and_distinctness() {
        for (k, s, t) in [(4, 2, 2), (5, 2, 2), (3, 3, 2), (4, 3, 1), (3, 4, 2), (4, 2, 0)] {
            let sys = build_reduced(&p(k, s, t, 1)).unwrap();
            let params = sys.params;
            assert_eq!(sys.num_rows(), params.tuple_count());
            assert_eq!(sys.num_cols(), params.m());
            assert_eq!(sys.distinct_rows().len(), params.tuple_count(), "k={k} s={s} t={t}");
        }
    }

    #[test]
    fn t_equals_k_has_no_reduced_system() {
        assert!(matches!(build_reduced(&p(3, 2, 3, 1)), Err(OapError::NoVariables(3))));
    }

    #[test]
    fn full_rank_equals_ball_size() {
        for s in 2..=3 {
            for k in 1..=4 {
                for t in 0..k {
                    let params = p(k, s, t, 1);
                    let sys = build_full(&params);
                    assert_eq!(rank(&sys.dense_matrix()), params.tuple_count() - params.m(), "{params}");
                }
            }
        }
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(combinations(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn label_text_form() {
        for text in ["2,1,1", "I=1,3;a=2,1", "I=;a="] {
            assert_eq!(text.parse::<RowLabel>().unwrap().to_string(), text);
        }
        assert!("I=1;a=".parse::<RowLabel>().is_err());
    }
}
