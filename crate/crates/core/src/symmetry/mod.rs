//! Permutation symmetries of the two formulations.
//!
//! A column permutation is a symmetry when it maps the multiset of
//! normalized rows onto itself. Rows are normalized by dividing the integer
//! vector `(coefficients, rhs)` by its gcd; equations are further scaled so
//! that their first nonzero entry is positive.

mod graph;
mod group;
mod perm;
mod wreath;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Serialize, Serializer};

pub use graph::{automorphism_group, encode_colored_graph, ColoredGraph, GraphSummary};
pub use group::PermutationGroup;
pub use perm::Permutation;
pub use wreath::{
    expected_full_order, expected_reduced_order, wreath_generators, wreath_group, WreathElement, WreathGenerators,
    WreathKind,
};

use crate::constraints::{build_full, build_reduced, ConstraintRow, ConstraintSystem, Form, Relation};
use crate::error::{usage, OapError, Result};
use crate::model::OAParams;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalizedRow {
    /// Sorted by column.
    pub coeffs: Vec<(usize, i64)>,
    pub relation: Relation,
    pub rhs: i64,
}

impl NormalizedRow {
    fn new(mut coeffs: Vec<(usize, i64)>, relation: Relation, mut rhs: i64) -> Self {
        coeffs.retain(|&(_, c)| c != 0);
        coeffs.sort_unstable();
        let g = coeffs.iter().fold(rhs.unsigned_abs(), |g, &(_, c)| g.gcd(&c.unsigned_abs())) as i64;
        if g > 1 {
            coeffs.iter_mut().for_each(|(_, c)| *c /= g);
            rhs /= g;
        }
        let lead = coeffs.first().map_or(rhs, |&(_, c)| c);
        if relation == Relation::Eq && lead < 0 {
            coeffs.iter_mut().for_each(|(_, c)| *c = -*c);
            rhs = -rhs;
        }
        Self { coeffs, relation, rhs }
    }

    pub fn of(row: &ConstraintRow) -> Self {
        Self::new(row.coeffs.clone(), row.relation, row.rhs)
    }

    pub fn permuted(&self, p: &Permutation) -> Self {
        Self::new(self.coeffs.iter().map(|&(j, c)| (p.apply(j), c)).collect(), self.relation, self.rhs)
    }
}

/// Distinct normalized rows with multiplicities.
pub fn normalized_rows(sys: &ConstraintSystem) -> BTreeMap<NormalizedRow, usize> {
    let mut out = BTreeMap::new();
    for row in &sys.rows {
        *out.entry(NormalizedRow::of(row)).or_insert(0) += 1;
    }
    out
}

fn preserves(rows: &BTreeMap<NormalizedRow, usize>, p: &Permutation) -> Option<NormalizedRow> {
    rows.iter().find(|(row, &mult)| rows.get(&row.permuted(p)) != Some(&mult)).map(|(row, _)| row.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub generator: usize,
    /// First row (in system order) whose image is not a row.
    pub row: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupVerdict {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
}

/// Whether every generator maps the normalized row multiset of `sys` onto
/// itself.
pub fn verify_subgroup(gens: &[Permutation], sys: &ConstraintSystem) -> Result<SubgroupVerdict> {
    if let Some(g) = gens.iter().find(|g| g.degree() != sys.num_cols()) {
        return usage(format!("permutation of degree {} on a system with {} columns", g.degree(), sys.num_cols()));
    }
    let rows = normalized_rows(sys);
    for (gi, g) in gens.iter().enumerate() {
        if let Some(bad) = preserves(&rows, g) {
            let row = sys.rows.iter().position(|r| NormalizedRow::of(r) == bad).expect("row comes from the system");
            return Ok(SubgroupVerdict {
                holds: false,
                counterexample: Some(Counterexample { generator: gi, row, label: sys.rows[row].label.to_string() }),
            });
        }
    }
    Ok(SubgroupVerdict { holds: true, counterexample: None })
}

/// Largest ground set the exhaustive search accepts.
pub const BRUTE_FORCE_LIMIT: usize = 10;

/// Every column permutation preserving the normalized row multiset, in
/// lexicographic order of image lists.
pub fn brute_force_automorphisms(sys: &ConstraintSystem) -> Result<Vec<Permutation>> {
    let n = sys.num_cols();
    if n > BRUTE_FORCE_LIMIT {
        return usage(format!("brute force is limited to {BRUTE_FORCE_LIMIT} columns, the system has {n}"));
    }
    let rows = normalized_rows(sys);
    let mut images: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        let p = Permutation::from_images_unchecked(images.clone());
        if preserves(&rows, &p).is_none() {
            out.push(p);
        }
        if !next_permutation(&mut images) {
            return Ok(out);
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("a larger element exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Symmetry group of the system's columns.
pub fn system_group(sys: &ConstraintSystem) -> PermutationGroup {
    automorphism_group(&encode_colored_graph(sys))
}

pub(crate) fn big_string<S: Serializer>(v: &BigUint, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem9Report {
    pub params: OAParams,
    #[serde(serialize_with = "big_string")]
    pub order_h: BigUint,
    #[serde(serialize_with = "big_string")]
    pub order_pi: BigUint,
    /// Every generator of the coordinate group lies in the computed group.
    pub h_contained: bool,
    pub equal: bool,
}

/// Compares the polytope's permutation symmetry group, computed from the
/// reduced system, with the coordinate group on `Y`.
pub fn verify_theorem9(params: &OAParams) -> Result<Theorem9Report> {
    if params.t >= params.k {
        return Err(OapError::NoVariables(params.k));
    }
    let pi = system_group(&build_reduced(params)?);
    let h = wreath_group(params, WreathKind::ReducedH)?;
    let h_contained = h.generators().iter().all(|g| pi.contains(g));
    let order_h = expected_reduced_order(params)?;
    let order_pi = pi.order();
    Ok(Theorem9Report { params: *params, equal: order_h == order_pi && h_contained, order_h, order_pi, h_contained })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem10Report {
    pub params: OAParams,
    #[serde(serialize_with = "big_string")]
    pub order_g_full: BigUint,
    #[serde(serialize_with = "big_string")]
    pub expected: BigUint,
    pub equal: bool,
}

/// Compares the full system's column symmetry group with `(s!)^k·k!`.
pub fn verify_theorem10(params: &OAParams) -> Result<Theorem10Report> {
    let order = system_group(&build_full(params)).order();
    let expected = expected_full_order(params);
    Ok(Theorem10Report { params: *params, equal: order == expected, order_g_full: order, expected })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub params: OAParams,
    pub form: Form,
    pub graph: GraphSummary,
    #[serde(serialize_with = "big_string")]
    pub order: BigUint,
    /// Generators in cycle notation over the column tuples.
    pub generators: Vec<String>,
    /// The coordinate group's generators preserve the system.
    pub wreath_subgroup: SubgroupVerdict,
    #[serde(serialize_with = "big_string")]
    pub expected_order: BigUint,
    pub matches_expected: bool,
    #[serde(serialize_with = "option_big_string")]
    pub brute_force_order: Option<BigUint>,
}

fn option_big_string<S: Serializer>(v: &Option<BigUint>, ser: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(ToString::to_string).serialize(ser)
}

/// Symmetry group of one formulation, checked against the coordinate group
/// and optionally against exhaustive search.
pub fn analyze(params: &OAParams, form: Form, brute_force: bool) -> Result<SymmetryReport> {
    let sys = match form {
        Form::Full => build_full(params),
        Form::Reduced => build_reduced(params)?,
    };
    let graph = encode_colored_graph(&sys);
    let group = automorphism_group(&graph);
    let kind = if form == Form::Full { WreathKind::FullG } else { WreathKind::ReducedH };
    let wreath = wreath_group(params, kind)?;
    let wreath_subgroup = verify_subgroup(wreath.generators(), &sys)?;
    let expected_order = match form {
        Form::Full => expected_full_order(params),
        Form::Reduced => expected_reduced_order(params)?,
    };
    let brute_force_order = if brute_force { Some(BigUint::from(brute_force_automorphisms(&sys)?.len())) } else { None };
    let label = |j: usize| sys.variables[j].to_string();
    Ok(SymmetryReport {
        params: *params,
        form,
        graph: graph.summary(),
        matches_expected: group.order() == expected_order,
        order: group.order(),
        generators: group.generators().iter().map(|g| g.cycle_string(label)).collect(),
        wreath_subgroup,
        expected_order,
        brute_force_order,
    })
}
