//! Full-dimensionality and facet certificates for the reduced system.

use log::info;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{solve, LpProblem, LpRow, LpStatus};
use crate::constraints::{build_reduced, ConstraintRow, ConstraintSystem, Form};
use crate::error::{usage, OapError, Result};
use crate::model::OAParams;
use crate::rational::{as_string, ratio};

/// `1/1000`.
pub fn default_slack() -> BigRational {
    ratio(1, 1000)
}

/// [`default_slack`] as CLI text.
pub const DEFAULT_SLACK: &str = "1/1000";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InteriorVerdict {
    pub interior: bool,
    /// The uniform value `λ/s^{k−t}` substituted for every variable.
    #[serde(serialize_with = "as_string::serialize")]
    pub point_value: BigRational,
    /// `min_i (a_i·x − b_i)` over the reduced rows.
    #[serde(serialize_with = "as_string::serialize")]
    pub min_slack: BigRational,
    /// Lowest-index row attaining a nonpositive slack, if any.
    pub violated_row: Option<usize>,
}

fn row_value(row: &ConstraintRow, x: &[BigRational]) -> BigRational {
    row.coeffs.iter().fold(BigRational::zero(), |acc, &(j, c)| acc + ratio(c, 1) * &x[j])
}

/// Substitutes `λ/s^{k−t}·1` into every reduced inequality.
pub fn check_interior_uniform(params: &OAParams) -> Result<InteriorVerdict> {
    if params.t >= params.k {
        return Err(OapError::Precondition("the uniform point needs t < k".into()));
    }
    let sys = build_reduced(params)?;
    let value = BigRational::new(params.lambda.into(), num_bigint::BigInt::from(params.s).pow((params.k - params.t) as u32));
    let x = vec![value.clone(); sys.num_cols()];
    let slacks: Vec<BigRational> = sys.rows.iter().map(|r| row_value(r, &x) - ratio(r.rhs, 1)).collect();
    let min_slack = slacks.iter().min().cloned().expect("the reduced system has s^k rows");
    let violated_row = slacks.iter().position(|v| !v.is_positive());
    Ok(InteriorVerdict { interior: violated_row.is_none(), point_value: value, min_slack, violated_row })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FacetVerdict {
    /// The point lies on the row's hyperplane and clears every other
    /// distinct inequality by at least the slack.
    FacetCertified {
        #[serde(serialize_with = "as_string::vec")]
        point: Vec<BigRational>,
    },
    NotCertified,
}

impl FacetVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Self::FacetCertified { .. })
    }
}

fn dense(row: &ConstraintRow, n: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); n];
    for &(j, c) in &row.coeffs {
        v[j] = ratio(c, 1);
    }
    v
}

/// Solves `min 1ᵀx` subject to row `row_index` holding with equality and
/// every other distinct row holding with margin `slack`. Copies of the row
/// itself are skipped. The reduced system contains `N_y ≥ 0` for every
/// variable, so the LP is solved over nonnegative variables.
pub fn verify_facet(sys: &ConstraintSystem, row_index: usize, slack: &BigRational) -> Result<FacetVerdict> {
    if sys.form != Form::Reduced {
        return usage("facet verification needs the reduced system");
    }
    if row_index >= sys.num_rows() {
        return usage(format!("row {row_index} out of range (the system has {} rows)", sys.num_rows()));
    }
    if !slack.is_positive() {
        return usage("slack must be positive");
    }
    let n = sys.num_cols();
    let target = &sys.rows[row_index];
    let same = |r: &ConstraintRow| r.coeffs == target.coeffs && r.rhs == target.rhs;
    let others: Vec<&ConstraintRow> = sys
        .distinct_rows()
        .iter()
        .map(|d| &sys.rows[d.index])
        .filter(|r| !same(r))
        .collect();
    let lp = LpProblem {
        num_vars: n,
        objective: vec![BigRational::one(); n],
        eq_rows: vec![LpRow { coeffs: dense(target, n), rhs: ratio(target.rhs, 1) }],
        ge_rows: others.iter().map(|r| LpRow { coeffs: dense(r, n), rhs: ratio(r.rhs, 1) + slack }).collect(),
        nonnegative: true,
    };
    let outcome = solve(&lp)?;
    match outcome.status {
        LpStatus::FeasibleOptimal => {
            let point = outcome.point.expect("optimal outcomes carry a point");
            let on_face = row_value(target, &point) == ratio(target.rhs, 1);
            let clear = others.iter().all(|r| row_value(r, &point) - ratio(r.rhs, 1) >= *slack);
            if !(on_face && clear) {
                return Err(OapError::Internal(format!("facet witness for row {row_index} fails re-validation")));
            }
            Ok(FacetVerdict::FacetCertified { point })
        }
        LpStatus::Infeasible => Ok(FacetVerdict::NotCertified),
        // the objective is bounded below by 0 on the nonnegative orthant
        LpStatus::Unbounded => Err(OapError::Internal("facet LP reported unbounded".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FacetRowReport {
    pub row: usize,
    pub label: String,
    pub multiplicity: usize,
    /// Slack of the final attempt.
    #[serde(serialize_with = "as_string::serialize")]
    pub slack: BigRational,
    pub retried: bool,
    #[serde(flatten)]
    pub verdict: FacetVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FacetReport {
    pub params: OAParams,
    #[serde(serialize_with = "as_string::serialize")]
    pub slack: BigRational,
    /// Number of distinct inequalities.
    pub rows_total: usize,
    pub facets_certified: usize,
    /// Row indices that could not be certified.
    pub failures: Vec<usize>,
    pub rows: Vec<FacetRowReport>,
}

impl FacetReport {
    pub fn all_certified(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs [`verify_facet`] for a single row, retrying once with `slack/10`
/// when `λ > 1`.
pub fn verify_row(sys: &ConstraintSystem, row: usize, multiplicity: usize, slack: &BigRational) -> Result<FacetRowReport> {
    let mut used = slack.clone();
    let mut verdict = verify_facet(sys, row, &used)?;
    let mut retried = false;
    if !verdict.is_certified() && sys.params.lambda > 1 {
        used = slack / ratio(10, 1);
        info!("row {row}: not certified with slack {slack}, retrying with {used}");
        verdict = verify_facet(sys, row, &used)?;
        retried = true;
    }
    Ok(FacetRowReport { row, label: sys.rows[row].label.to_string(), multiplicity, slack: used, retried, verdict })
}

/// Certifies every distinct inequality of the reduced system. Rows are
/// solved in parallel; the report is ordered by row index.
pub fn verify_all_facets(params: &OAParams, slack: &BigRational) -> Result<FacetReport> {
    let sys = build_reduced(params)?;
    let distinct = sys.distinct_rows();
    let rows = distinct
        .par_iter()
        .map(|d| verify_row(&sys, d.index, d.multiplicity, slack))
        .collect::<Result<Vec<_>>>()?;
    let failures: Vec<usize> = rows.iter().filter(|r| !r.verdict.is_certified()).map(|r| r.row).collect();
    Ok(FacetReport {
        params: *params,
        slack: slack.clone(),
        rows_total: rows.len(),
        facets_certified: rows.len() - failures.len(),
        failures,
        rows,
    })
}
