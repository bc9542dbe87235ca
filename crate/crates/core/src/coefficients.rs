//! The right-hand-side sequence `a_0, …, a_t` of the reduced system.
//!
//! Two independent routes are provided: the defining recurrence and the
//! closed form obtained by evaluating the elimination identity at the uniform
//! point. They must agree exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{OapError, Result};
use crate::model::{binomial, OAParams};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientSequence {
    pub params: OAParams,
    /// `values[c] = a_c` for `c = 0..=t`.
    pub values: Vec<BigInt>,
}

impl CoefficientSequence {
    pub fn get(&self, c: usize) -> &BigInt {
        &self.values[c]
    }

    /// Converts every entry to `i64`, failing if one does not fit.
    pub fn to_i64(&self) -> Result<Vec<i64>> {
        self.values
            .iter()
            .map(|v| {
                i64::try_from(v).map_err(|_| OapError::Usage(format!("a_c = {v} does not fit in 64 bits")))
            })
            .collect()
    }
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

/// `a_0 = λ`, `a_c = λ − Σ_{e<c} a_e·C(k−t, c−e)·(s−1)^{c−e}`.
pub fn a_recurrence(params: &OAParams) -> CoefficientSequence {
    let lambda = big(params.lambda);
    let free = params.k - params.t;
    let base = big(params.s as u64 - 1);
    let mut values: Vec<BigInt> = Vec::with_capacity(params.t + 1);
    values.push(lambda.clone());
    for c in 1..=params.t {
        let mut acc = lambda.clone();
        for (e, a_e) in values.iter().enumerate() {
            let gap = c - e;
            let coef = big(binomial(free, gap)) * base.pow(gap as u32);
            acc -= a_e * coef;
        }
        values.push(acc);
    }
    CoefficientSequence { params: *params, values }
}

/// Closed form for `a_c`. With `r = t − c`:
///
/// `(s^{k−t}/λ)·a_c = 1 + (−1)^c Σ_{i=1}^{k−t} (s−1)^{c+i} C(k−r, c+i) C(c+i−1, c)`.
pub fn a_closed_form(params: &OAParams, c: usize) -> Result<BigInt> {
    if params.t >= params.k {
        return Err(OapError::Precondition(format!(
            "closed form needs t < k (got t = {}, k = {})",
            params.t, params.k
        )));
    }
    if c > params.t {
        return Err(OapError::Usage(format!("c must satisfy 0 ≤ c ≤ t = {}", params.t)));
    }
    let r = params.t - c;
    let base = big(params.s as u64 - 1);
    let mut sum = BigInt::zero();
    for i in 1..=params.k - params.t {
        sum += base.pow((c + i) as u32)
            * big(binomial(params.k - r, c + i))
            * big(binomial(c + i - 1, c));
    }
    let scaled = if c.is_multiple_of(2) { BigInt::one() + sum } else { BigInt::one() - sum };
    let numerator = scaled * big(params.lambda);
    let denominator = big(params.s as u64).pow((params.k - params.t) as u32);
    let (q, rem) = numerator.div_rem(&denominator);
    if !rem.is_zero() {
        return Err(OapError::Internal(format!(
            "closed form for a_{c} at {params} is {numerator}/{denominator}, not an integer"
        )));
    }
    Ok(q)
}

/// Outcome of the nonzero / pairwise-distinct check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Distinctness {
    DistinctNonzero,
    Zero { c: usize },
    Repeated { c1: usize, c2: usize },
}

/// Whether `|a_c|` is strictly increasing on `c = 1..=t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MagnitudeOrder {
    StrictlyIncreasing,
    /// `|a_c| ≥ |a_{c+1}|`.
    NotIncreasing { c: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistinctnessCheck {
    pub distinctness: Distinctness,
    pub magnitudes: MagnitudeOrder,
}

impl DistinctnessCheck {
    pub fn all_hold(&self) -> bool {
        self.distinctness == Distinctness::DistinctNonzero
            && self.magnitudes == MagnitudeOrder::StrictlyIncreasing
    }
}

/// Checks that the sequence is nonzero and pairwise distinct, and separately
/// whether `|a_c|` strictly increases for `c ≥ 1`. Requires `k − t ≥ 2`.
pub fn check_distinct(seq: &CoefficientSequence) -> Result<DistinctnessCheck> {
    let p = &seq.params;
    if p.k < p.t + 2 {
        return Err(OapError::Precondition(format!(
            "distinctness needs k − t ≥ 2 (got k = {}, t = {})",
            p.k, p.t
        )));
    }
    let v = &seq.values;
    let mut distinctness = Distinctness::DistinctNonzero;
    'outer: for c1 in 0..v.len() {
        if v[c1].is_zero() {
            distinctness = Distinctness::Zero { c: c1 };
            break;
        }
        for c2 in c1 + 1..v.len() {
            if v[c1] == v[c2] {
                distinctness = Distinctness::Repeated { c1, c2 };
                break 'outer;
            }
        }
    }
    let magnitudes = (1..v.len().saturating_sub(1))
        .find(|&c| v[c].abs() >= v[c + 1].abs())
        .map_or(MagnitudeOrder::StrictlyIncreasing, |c| MagnitudeOrder::NotIncreasing { c });
    Ok(DistinctnessCheck { distinctness, magnitudes })
}
