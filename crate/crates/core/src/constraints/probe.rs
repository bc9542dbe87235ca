//! How often does a random choice of basic variables eliminate integrally?
//!
//! Each trial permutes the columns of the full system's matrix uniformly at
//! random, appends the right-hand side, row reduces and records whether the
//! reduced row echelon form is all-integer. The RREF depends only on the row
//! space, so the matrix is reduced to a row basis once and every trial works
//! on that basis; this yields the same RREF with the zero rows removed.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::build_full;
use crate::error::{usage, Result};
use crate::linalg::{rref_exact, rref_is_integral};
use crate::model::{all_tuples, OAParams};
use crate::rational::{format_rational, ExactField, SmallRational};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub params: OAParams,
    pub trials: usize,
    pub integral_count: usize,
    /// Exact `integral_count / trials`.
    pub proportion: String,
    pub proportion_value: f64,
    pub seed: u64,
}

struct RowBasis {
    rows: Vec<Vec<BigRational>>,
    small: Option<Vec<Vec<SmallRational>>>,
    cols: usize,
}

impl RowBasis {
    fn new(params: &OAParams) -> Self {
        let sys = build_full(params);
        let mut augmented = sys.dense_matrix();
        for (row, r) in augmented.iter_mut().zip(&sys.rows) {
            row.push(r.rhs);
        }
        let cols = sys.num_cols();
        let order: Vec<usize> = (0..=cols).collect();
        let (rows, _) = rref_exact(&augmented, &order);
        let small = rows
            .iter()
            .map(|r| {
                r.iter().map(SmallRational::from_big).collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>();
        Self { rows, small, cols }
    }

    /// `order` lists the matrix columns; the right-hand side is appended.
    fn integral(&self, order: &[usize]) -> bool {
        let mut full_order = order.to_vec();
        full_order.push(self.cols);
        if let Some(small) = &self.small {
            if let Some(v) = rref_is_integral(small.clone(), &full_order) {
                return v;
            }
        }
        rref_is_integral(self.rows.clone(), &full_order).expect("BigRational arithmetic cannot overflow")
    }
}

/// Column order putting every `x` with `d(1,x) ≤ t` first, then the
/// variables `Y`; both blocks lexicographic.
pub fn ball_first_order(params: &OAParams) -> Vec<usize> {
    let tuples = all_tuples(params);
    let (mut head, tail): (Vec<usize>, Vec<usize>) = (0..tuples.len()).partition(|&j| tuples[j].weight() <= params.t);
    head.extend(tail);
    head
}

/// Whether the RREF of the augmented full matrix, columns visited in
/// `order`, is integral.
pub fn probe_ordering_integral(params: &OAParams, order: &[usize]) -> Result<bool> {
    let mut seen = order.to_vec();
    seen.sort_unstable();
    if seen != (0..params.tuple_count()).collect::<Vec<_>>() {
        return usage("column order must be a permutation of the full system's columns");
    }
    Ok(RowBasis::new(params).integral(order))
}

fn trial_order(n: usize, seed: u64, trial: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    order
}

/// Runs `trials` independent random column permutations. Each trial draws
/// from its own ChaCha stream, so the report does not depend on scheduling.
pub fn probe_basis_integrality(params: &OAParams, trials: usize, seed: u64) -> Result<ProbeReport> {
    if trials < 1 {
        return usage("trials must satisfy trials ≥ 1");
    }
    let basis = RowBasis::new(params);
    let n = params.tuple_count();
    let integral_count = (0..trials)
        .into_par_iter()
        .map(|i| basis.integral(&trial_order(n, seed, i)))
        .filter(|&ok| ok)
        .count();
    let proportion = BigRational::new(integral_count.into(), trials.into());
    Ok(ProbeReport {
        params: *params,
        trials,
        integral_count,
        proportion: format_rational(&proportion),
        proportion_value: integral_count as f64 / trials as f64,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_first_order_is_integral() {
        for (k, s, t) in [(3, 2, 1), (4, 2, 2), (3, 3, 2), (5, 2, 2), (4, 3, 1)] {
            let params = OAParams::new(k, s, t, 1).unwrap();
            assert!(probe_ordering_integral(&params, &ball_first_order(&params)).unwrap(), "{params}");
        }
    }

    #[test]
    fn strength_zero_is_always_integral() {
        let params = OAParams::new(3, 3, 0, 2).unwrap();
        let report = probe_basis_integrality(&params, 20, 7).unwrap();
        assert_eq!(report.integral_count, 20);
        assert_eq!(report.proportion, "1");
    }

    #[test]
    fn report_is_reproducible() {
        let params = OAParams::new(4, 2, 2, 1).unwrap();
        let a = probe_basis_integrality(&params, 30, 11).unwrap();
        let b = probe_basis_integrality(&params, 30, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.integral_count <= 30);
    }

    #[test]
    fn trial_orders_differ_across_streams() {
        assert_ne!(trial_order(20, 1, 0), trial_order(20, 1, 1));
        assert_eq!(trial_order(20, 1, 3), trial_order(20, 1, 3));
    }

    #[test]
    fn rejects_bad_orders_and_zero_trials() {
        let params = OAParams::new(3, 2, 1, 1).unwrap();
        assert!(probe_ordering_integral(&params, &[0, 1, 2]).is_err());
        assert!(probe_basis_integrality(&params, 0, 1).is_err());
    }
}
