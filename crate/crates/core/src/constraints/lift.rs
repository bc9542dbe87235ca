use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::coefficients::a_recurrence;
use crate::error::{usage, Result};
use crate::model::{all_tuples, binomial, tuple_rank, variable_set, OAParams};

/// Scalars a solution vector can be expressed in.
pub trait LiftScalar:
    Clone + PartialEq + Debug + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn from_big(v: &BigInt) -> Self;
}

impl LiftScalar for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn from_big(v: &BigInt) -> Self {
        i64::try_from(v).expect("coefficient fits in i64")
    }
}

impl LiftScalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_big(v: &BigInt) -> Self {
        v.clone()
    }
}

impl LiftScalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_big(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
}

/// Extends `ny` (indexed by the sorted variable set `Y`) to a frequency
/// vector over all of `[s]^k` (lexicographic order), reconstructing every
/// eliminated `N_x` from
/// `N_x = a_c + (−1)^{c+1} Σ_{y ∈ J_x, d(1,y) > t} C(d(1,y)−d(1,x)−1, c) N_y`,
/// `c = t − d(1,x)`.
///
/// Negative reconstructed entries are returned as-is: they mean `ny` lies
/// outside the polytope.
pub fn lift_solution<T: LiftScalar>(params: &OAParams, ny: &[T]) -> Result<Vec<T>> {
    let y = variable_set(params)?;
    if ny.len() != y.len() {
        return usage(format!("lift: expected {} reduced values, got {}", y.len(), ny.len()));
    }
    let a = a_recurrence(params);
    let mut out = Vec::with_capacity(params.tuple_count());
    let mut next_y = 0;
    for x in all_tuples(params) {
        let d = x.weight();
        if d > params.t {
            // Y is the lexicographic subsequence of [s]^k, so ordinals advance in step
            out.push(ny[next_y].clone());
            next_y += 1;
            continue;
        }
        let c = params.t - d;
        let support = x.support();
        let mut sum = T::zero();
        for (j, yv) in y.iter().enumerate() {
            if support.iter().all(|&i| yv.0[i] == x.0[i]) {
                let coef = binomial(yv.weight() - d - 1, c) as i64;
                sum = sum + T::from_i64(coef) * ny[j].clone();
            }
        }
        let signed = if c.is_multiple_of(2) { -sum } else { sum };
        out.push(T::from_big(a.get(c)) + signed);
    }
    Ok(out)
}

/// Restriction of a full frequency vector to `Y`.
pub fn project_solution<T: Clone>(params: &OAParams, nx: &[T]) -> Result<Vec<T>> {
    if nx.len() != params.tuple_count() {
        return usage(format!("project: expected {} values, got {}", params.tuple_count(), nx.len()));
    }
    Ok(variable_set(params)?.iter().map(|y| nx[tuple_rank(params, y)].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::build_full;
    use crate::rational::ratio;
    use proptest::prelude::*;

    #[test]
    fn uniform_point_lifts_to_uniform_vector() {
        for (k, s, t, l) in [(4, 2, 2, 1), (3, 3, 1, 2), (5, 2, 3, 3), (3, 2, 0, 1)] {
            let params = OAParams::new(k, s, t, l).unwrap();
            let u = ratio(l as i64, (s as i64).pow((k - t) as u32));
            let lifted = lift_solution(&params, &vec![u.clone(); params.m()]).unwrap();
            assert!(lifted.iter().all(|v| *v == u), "{params}");
            assert_eq!(project_solution(&params, &lifted).unwrap(), vec![u; params.m()]);
        }
    }

    #[test]
    fn even_weight_code_from_one_value() {
        let params = OAParams::new(3, 2, 2, 1).unwrap();
        let lifted = lift_solution(&params, &[0i64]).unwrap();
        let even: Vec<i64> =
            all_tuples(&params).iter().map(|x| i64::from((x.weight() % 2) == 0)).collect();
        assert_eq!(lifted, even);
        assert_eq!(project_solution(&params, &even).unwrap(), vec![0]);
        let odd = lift_solution(&params, &[1i64]).unwrap();
        assert_eq!(odd, even.iter().map(|v| 1 - v).collect::<Vec<_>>());
    }

    #[test]
    fn zero_reduced_vector_gives_shell_constants() {
        let params = OAParams::new(4, 3, 0, 2).unwrap();
        let lifted = lift_solution(&params, &vec![0i64; params.m()]).unwrap();
        assert_eq!(lifted[0], 2);
        assert!(lifted[1..].iter().all(|&v| v == 0));

        let params = OAParams::new(5, 2, 2, 1).unwrap();
        let a = a_recurrence(&params).to_i64().unwrap();
        let lifted = lift_solution(&params, &vec![0i64; params.m()]).unwrap();
        for (x, v) in all_tuples(&params).iter().zip(&lifted) {
            if x.weight() <= 2 {
                assert_eq!(*v, a[2 - x.weight()]);
            }
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let params = OAParams::new(4, 2, 2, 1).unwrap();
        assert!(lift_solution(&params, &[0i64; 3]).is_err());
        assert!(project_solution(&params, &[0i64; 3]).is_err());
    }

    proptest! {
        // Any integer vector on Y lifts to an integer vector satisfying every
        // full-system margin equation (nonnegativity aside).
        #[test]
        fn lift_satisfies_full_equations(
            (k, s, t) in prop_oneof![Just((3usize, 2usize, 1usize)), Just((4, 2, 2)), Just((3, 3, 1)), Just((4, 3, 2)), Just((5, 2, 3))],
            lambda in 1u64..4,
            seed in proptest::collection::vec(-5i64..6, 64),
        ) {
            let params = OAParams::new(k, s, t, lambda).unwrap();
            let ny: Vec<i64> = (0..params.m()).map(|j| seed[j % seed.len()]).collect();
            let nx = lift_solution(&params, &ny).unwrap();
            prop_assert!(build_full(&params).is_satisfied_by(&nx));
            prop_assert_eq!(project_solution(&params, &nx).unwrap(), ny);
        }
    }
}
