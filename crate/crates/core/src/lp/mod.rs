//! Exact two-phase simplex.
//!
//! Dense tableau, Bland's rule throughout. The tableau first runs over
//! [`SmallRational`]; any overflow restarts the same (deterministic) pivot
//! sequence over [`BigRational`], so both paths return identical outcomes.
//! Every feasible point and every infeasibility certificate is re-checked by
//! exact substitution before it is returned.

mod facets;

pub use facets::{
    check_interior_uniform, default_slack, verify_all_facets, verify_facet, verify_row, FacetReport, FacetRowReport,
    FacetVerdict, InteriorVerdict, DEFAULT_SLACK,
};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{usage, OapError, Result};
use crate::linalg::pivot_on;
use crate::rational::{as_string, ExactField, SmallRational};

/// One linear constraint `coeffs · x (= | ≥) rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpRow {
    pub coeffs: Vec<BigRational>,
    pub rhs: BigRational,
}

/// `min objective · x` subject to `eq_rows` and `ge_rows`. Variables are free
/// unless `nonnegative` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub objective: Vec<BigRational>,
    pub eq_rows: Vec<LpRow>,
    pub ge_rows: Vec<LpRow>,
    pub nonnegative: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LpStatus {
    FeasibleOptimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Optimal point for `FeasibleOptimal`; a feasible point for `Unbounded`.
    #[serde(serialize_with = "as_string::vec_option")]
    pub point: Option<Vec<BigRational>>,
    #[serde(serialize_with = "as_string::option")]
    pub objective: Option<BigRational>,
    /// Multipliers `y`, equality rows first then `≥` rows, with
    /// `y_ge ≥ 0`, `yᵀA = 0` (`≤ 0` for nonnegative variables) and
    /// `yᵀb > 0`; no feasible `x` can satisfy `yᵀAx ≥ yᵀb` then.
    #[serde(serialize_with = "as_string::vec_option")]
    pub certificate: Option<Vec<BigRational>>,
}

impl LpProblem {
    fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return usage(format!("objective has {} entries, expected {}", self.objective.len(), self.num_vars));
        }
        for (i, row) in self.eq_rows.iter().chain(&self.ge_rows).enumerate() {
            if row.coeffs.len() != self.num_vars {
                return usage(format!("row {i} has {} coefficients, expected {}", row.coeffs.len(), self.num_vars));
            }
        }
        Ok(())
    }

    fn rows(&self) -> impl Iterator<Item = (&LpRow, bool)> {
        self.eq_rows.iter().map(|r| (r, false)).chain(self.ge_rows.iter().map(|r| (r, true)))
    }

    /// Whether `x` satisfies every constraint exactly.
    pub fn is_feasible(&self, x: &[BigRational]) -> bool {
        if x.len() != self.num_vars || (self.nonnegative && x.iter().any(Signed::is_negative)) {
            return false;
        }
        self.rows().all(|(row, ge)| {
            let lhs = dot(&row.coeffs, x);
            if ge {
                lhs >= row.rhs
            } else {
                lhs == row.rhs
            }
        })
    }

    /// Whether `y` is a valid infeasibility certificate.
    pub fn is_certificate(&self, y: &[BigRational]) -> bool {
        let rows: Vec<(&LpRow, bool)> = self.rows().collect();
        if y.len() != rows.len() || rows.iter().zip(y).any(|((_, ge), yi)| *ge && yi.is_negative()) {
            return false;
        }
        let yb = rows.iter().zip(y).fold(<BigRational as Zero>::zero(), |acc, ((r, _), yi)| acc + yi * &r.rhs);
        if !yb.is_positive() {
            return false;
        }
        (0..self.num_vars).all(|j| {
            let col = rows.iter().zip(y).fold(<BigRational as Zero>::zero(), |acc, ((r, _), yi)| acc + yi * &r.coeffs[j]);
            if self.nonnegative {
                !col.is_positive()
            } else {
                Zero::is_zero(&col)
            }
        })
    }
}

fn dot(a: &[BigRational], x: &[BigRational]) -> BigRational {
    a.iter().zip(x).filter(|(c, _)| !Zero::is_zero(*c)).fold(<BigRational as Zero>::zero(), |acc, (c, v)| acc + c * v)
}

/// Solves `lp` exactly.
pub fn solve(lp: &LpProblem) -> Result<LpOutcome> {
    lp.validate()?;
    let outcome = match Tableau::<SmallRational>::run(lp) {
        Some(o) => o,
        None => Tableau::<BigRational>::run(lp).expect("BigRational arithmetic cannot overflow"),
    };
    match outcome.status {
        LpStatus::FeasibleOptimal | LpStatus::Unbounded => {
            let x = outcome.point.as_ref().expect("feasible outcomes carry a point");
            if !lp.is_feasible(x) {
                return Err(OapError::Internal("simplex returned a point violating a constraint".into()));
            }
        }
        LpStatus::Infeasible => {
            let y = outcome.certificate.as_ref().expect("infeasible outcomes carry a certificate");
            if !lp.is_certificate(y) {
                return Err(OapError::Internal("simplex returned an invalid infeasibility certificate".into()));
            }
        }
    }
    Ok(outcome)
}

enum Phase {
    Optimal,
    Unbounded,
}

/// Column layout: structural columns (two per free variable), one surplus
/// per `≥` row, then artificials; the last tableau column is the rhs and the
/// last tableau row is the reduced-cost row.
struct Tableau<F> {
    rows: Vec<Vec<F>>,
    basis: Vec<usize>,
    /// Row `i` was multiplied by `sign[i] ∈ {+1,−1}` to make its rhs nonnegative.
    sign: Vec<bool>,
    /// Column that was basic in row `i` initially; it is a unit column there.
    initial: Vec<usize>,
    structural: usize,
    first_artificial: usize,
    cols: usize,
}

impl<F: ExactField + Ord> Tableau<F> {
    fn run(lp: &LpProblem) -> Option<LpOutcome> {
        let mut tab = Self::new(lp)?;
        let m = tab.basis.len();

        // phase 1: minimise the sum of artificials
        let mut cost = vec![F::zero(); tab.cols];
        for c in cost.iter_mut().skip(tab.first_artificial) {
            *c = F::one();
        }
        tab.set_costs(&cost)?;
        tab.iterate(tab.first_artificial)?;
        let infeasibility = tab.objective_value()?;
        if !infeasibility.is_zero() {
            // dual of the phase-1 optimum: y_i = c_j − d_j for the initial unit column j of row i
            let obj = &tab.rows[m];
            let y = (0..m)
                .map(|i| {
                    let j = tab.initial[i];
                    let yi = cost[j].checked_sub_mul(&F::one(), &obj[j])?.to_big();
                    Some(if tab.sign[i] { yi } else { -yi })
                })
                .collect::<Option<Vec<_>>>()?;
            return Some(LpOutcome { status: LpStatus::Infeasible, point: None, objective: None, certificate: Some(y) });
        }
        tab.drive_out_artificials()?;

        // phase 2
        let mut cost = vec![F::zero(); tab.cols];
        for (j, c) in lp.objective.iter().enumerate() {
            let c = F::from_big(c)?;
            if lp.nonnegative {
                cost[j] = c;
            } else {
                cost[2 * j] = c.clone();
                cost[2 * j + 1] = F::zero().checked_sub_mul(&F::one(), &c)?;
            }
        }
        tab.set_costs(&cost)?;
        let phase = tab.iterate(tab.first_artificial)?;
        let point = tab.point(lp);
        let objective = dot(&lp.objective, &point);
        Some(match phase {
            Phase::Optimal => LpOutcome {
                status: LpStatus::FeasibleOptimal,
                point: Some(point),
                objective: Some(objective),
                certificate: None,
            },
            Phase::Unbounded => {
                LpOutcome { status: LpStatus::Unbounded, point: Some(point), objective: None, certificate: None }
            }
        })
    }

    fn new(lp: &LpProblem) -> Option<Self> {
        let structural = if lp.nonnegative { lp.num_vars } else { 2 * lp.num_vars };
        let all: Vec<(&LpRow, bool)> = lp.rows().collect();
        let m = all.len();
        let surplus = lp.ge_rows.len();
        let sign: Vec<bool> = all.iter().map(|(r, _)| !r.rhs.is_negative()).collect();
        // a `≥` row with negative rhs, once negated, has a +1 surplus: it starts basic
        let needs_artificial: Vec<bool> = all.iter().zip(&sign).map(|((_, ge), &pos)| !ge || pos).collect();
        let first_artificial = structural + surplus;
        let cols = first_artificial + needs_artificial.iter().filter(|&&a| a).count();

        let mut rows = Vec::with_capacity(m + 1);
        let mut basis = Vec::with_capacity(m);
        let mut next_surplus = structural;
        let mut next_artificial = first_artificial;
        let minus_one = F::from_i64(-1);
        for (i, (row, ge)) in all.iter().enumerate() {
            let flip = |v: F| if sign[i] { Some(v) } else { F::zero().checked_sub_mul(&F::one(), &v) };
            let mut r = vec![F::zero(); cols + 1];
            for (j, c) in row.coeffs.iter().enumerate() {
                if Zero::is_zero(c) {
                    continue;
                }
                let c = flip(F::from_big(c)?)?;
                if lp.nonnegative {
                    r[j] = c;
                } else {
                    r[2 * j + 1] = F::zero().checked_sub_mul(&F::one(), &c)?;
                    r[2 * j] = c;
                }
            }
            if *ge {
                r[next_surplus] = flip(minus_one.clone())?;
                if !needs_artificial[i] {
                    basis.push(next_surplus);
                }
                next_surplus += 1;
            }
            if needs_artificial[i] {
                r[next_artificial] = F::one();
                basis.push(next_artificial);
                next_artificial += 1;
            }
            r[cols] = flip(F::from_big(&row.rhs)?)?;
            rows.push(r);
        }
        rows.push(vec![F::zero(); cols + 1]);
        let initial = basis.clone();
        Some(Self { rows, basis, sign, initial, structural, first_artificial, cols })
    }

    /// Rewrites the last row as the reduced costs `c_j − c_Bᵀ B⁻¹ A_j` and
    /// `−c_Bᵀ B⁻¹ b` in the rhs slot.
    fn set_costs(&mut self, cost: &[F]) -> Option<()> {
        let m = self.basis.len();
        let mut obj: Vec<F> = cost.to_vec();
        obj.push(F::zero());
        for i in 0..m {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(&self.rows[i]) {
                if !v.is_zero() {
                    *o = o.checked_sub_mul(cb, v)?;
                }
            }
        }
        self.rows[m] = obj;
        Some(())
    }

    fn objective_value(&self) -> Option<F> {
        F::zero().checked_sub_mul(&F::one(), &self.rows[self.basis.len()][self.cols])
    }

    /// Bland's rule: lowest-index improving column enters; among tied ratios
    /// the lowest-index basic variable leaves. Columns at or beyond `limit`
    /// never enter.
    fn iterate(&mut self, limit: usize) -> Option<Phase> {
        let m = self.basis.len();
        let zero = F::zero();
        loop {
            let Some(enter) = (0..limit).find(|&j| self.rows[m][j] < zero) else {
                return Some(Phase::Optimal);
            };
            let mut leave: Option<(usize, F)> = None;
            for i in 0..m {
                let a = &self.rows[i][enter];
                if *a <= zero {
                    continue;
                }
                let ratio = self.rows[i][self.cols].checked_div(a)?;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return Some(Phase::Unbounded);
            };
            pivot_on(&mut self.rows, row, enter)?;
            self.basis[row] = enter;
        }
    }

    /// After a zero-value phase 1, pivots every basic artificial onto a real
    /// column, or deletes its row when the row has become redundant.
    fn drive_out_artificials(&mut self) -> Option<()> {
        let mut i = 0;
        while i < self.basis.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                Some(j) => {
                    pivot_on(&mut self.rows, i, j)?;
                    self.basis[i] = j;
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
        Some(())
    }

    fn point(&self, lp: &LpProblem) -> Vec<BigRational> {
        let mut values = vec![<BigRational as Zero>::zero(); self.structural];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                values[b] = self.rows[i][self.cols].to_big();
            }
        }
        if lp.nonnegative {
            values
        } else {
            values.chunks(2).map(|pn| &pn[0] - &pn[1]).collect()
        }
    }
}
