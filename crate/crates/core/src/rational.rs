//! Exact rational scalars.
//!
//! [`BigRational`] is the carrier everywhere exactness is certified. Row
//! reduction additionally runs over [`SmallRational`], an `i64/i64` fraction
//! whose operations report overflow instead of wrapping, so callers can retry
//! the same computation over `BigRational`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{OapError, Result};

/// Field operations used by row reduction. Every operation may fail with
/// `None` on overflow; exact big-number implementations never do.
pub trait ExactField: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_integer(&self) -> bool;
    /// `self / d`; `d` is nonzero.
    fn checked_div(&self, d: &Self) -> Option<Self>;
    /// `self − a·b`.
    fn checked_sub_mul(&self, a: &Self, b: &Self) -> Option<Self>;
    fn to_big(&self) -> BigRational;
    /// `None` when `q` is not representable.
    fn from_big(q: &BigRational) -> Option<Self>;
}

impl ExactField for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_integer(&self) -> bool {
        BigRational::is_integer(self)
    }
    fn checked_div(&self, d: &Self) -> Option<Self> {
        Some(self / d)
    }
    fn checked_sub_mul(&self, a: &Self, b: &Self) -> Option<Self> {
        Some(self - a * b)
    }
    fn to_big(&self) -> BigRational {
        self.clone()
    }
    fn from_big(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }
}

/// Reduced fraction with a positive `i64` denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SmallRational {
    num: i64,
    den: i64,
}

impl fmt::Debug for SmallRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl SmallRational {
    fn from_wide(num: i128, den: i128) -> Option<Self> {
        debug_assert!(den != 0);
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        Some(Self { num: i64::try_from(n).ok()?, den: i64::try_from(d).ok()? })
    }
}

impl ExactField for SmallRational {
    fn zero() -> Self {
        Self { num: 0, den: 1 }
    }
    fn one() -> Self {
        Self { num: 1, den: 1 }
    }
    fn from_i64(v: i64) -> Self {
        Self { num: v, den: 1 }
    }
    fn is_zero(&self) -> bool {
        self.num == 0
    }
    fn is_integer(&self) -> bool {
        self.den == 1
    }
    fn checked_div(&self, d: &Self) -> Option<Self> {
        Self::from_wide(self.num as i128 * d.den as i128, self.den as i128 * d.num as i128)
    }
    fn checked_sub_mul(&self, a: &Self, b: &Self) -> Option<Self> {
        if a.num == 0 || b.num == 0 {
            return Some(*self);
        }
        let pn = a.num as i128 * b.num as i128;
        let pd = a.den as i128 * b.den as i128;
        // self.num/self.den − pn/pd over the common denominator
        let num = (self.num as i128).checked_mul(pd)?.checked_sub(pn.checked_mul(self.den as i128)?)?;
        let den = (self.den as i128).checked_mul(pd)?;
        Self::from_wide(num, den)
    }
    fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
    fn from_big(q: &BigRational) -> Option<Self> {
        Some(Self { num: q.numer().to_i64()?, den: q.denom().to_i64()? })
    }
}

impl PartialOrd for SmallRational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SmallRational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // positive denominators, and i64·i64 always fits in i128
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

/// Formats as `num/den`, or just `num` for integers.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `num/den` or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || OapError::Usage(format!("expected a rational NUM/DEN, got {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn is_positive(q: &BigRational) -> bool {
    q.is_positive()
}

/// `#[serde(serialize_with = ...)]` helpers writing exact values as strings.
pub mod as_string {
    use num_rational::BigRational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(q: &BigRational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&super::format_rational(q))
    }

    pub fn option<S: Serializer>(q: &Option<BigRational>, ser: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => serialize(q, ser),
            None => ser.serialize_none(),
        }
    }

    pub fn vec<S: Serializer>(v: &[BigRational], ser: S) -> Result<S::Ok, S::Error> {
        use serde::Serialize;
        v.iter().map(super::format_rational).collect::<Vec<_>>().serialize(ser)
    }

    pub fn vec_option<S: Serializer>(v: &Option<Vec<BigRational>>, ser: S) -> Result<S::Ok, S::Error> {
        use serde::Serialize;
        v.as_ref().map(|v| v.iter().map(super::format_rational).collect::<Vec<_>>()).serialize(ser)
    }
}
