//! Parameters, level tuples and the canonical index maps every other module
//! builds on.
//!
//! Levels are 1-based, so a tuple lives in `{1,…,s}^k` and the distinguished
//! centre is the all-ones tuple. All orderings are lexicographic.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{usage, OapError, Result};

/// `(k, s, t, λ)` for an orthogonal array `OA(λ·s^t, k, s, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OAParams {
    pub k: usize,
    pub s: usize,
    pub t: usize,
    pub lambda: u64,
}

impl OAParams {
    pub fn new(k: usize, s: usize, t: usize, lambda: u64) -> Result<Self> {
        if k < 1 {
            return usage("k must satisfy k ≥ 1");
        }
        if s < 2 {
            return usage("s must satisfy s ≥ 2");
        }
        if t > k {
            return usage("t must satisfy 0 ≤ t ≤ k");
        }
        if lambda < 1 {
            return usage("lambda must satisfy lambda ≥ 1");
        }
        // Tuple spaces are materialised in memory; refuse anything that could
        // not be indexed by a usize.
        if (s as u128).checked_pow(k as u32).is_none_or(|n| n > usize::MAX as u128 / 2) {
            return usage(format!("s^k = {s}^{k} is too large to materialise"));
        }
        Ok(Self { k, s, t, lambda })
    }

    /// Run count `N = λ·s^t`.
    pub fn runs(&self) -> BigUint {
        BigUint::from(self.lambda) * BigUint::from(self.s).pow(self.t as u32)
    }

    /// `s^k`, the number of level combinations.
    pub fn tuple_count(&self) -> usize {
        self.s.pow(self.k as u32)
    }

    /// Number of tuples at Hamming distance exactly `i` from the all-ones tuple.
    pub fn shell_size(&self, i: usize) -> usize {
        binomial(self.k, i) as usize * (self.s - 1).pow(i as u32)
    }

    /// Number of reduced-system variables, `Σ_{i=t+1}^{k} C(k,i)(s−1)^i`.
    pub fn m(&self) -> usize {
        (self.t + 1..=self.k).map(|i| self.shell_size(i)).sum()
    }

    /// `k = t + 1` with `s = 2`: the reduced system has a single variable and
    /// every inequality is repeated.
    pub fn is_degenerate(&self) -> bool {
        self.k == self.t + 1 && self.s == 2
    }

    pub fn ones(&self) -> LevelTuple {
        LevelTuple(vec![1; self.k])
    }

    pub(crate) fn check_tuple(&self, x: &LevelTuple) -> Result<()> {
        if x.len() != self.k {
            return usage(format!("tuple {x} has length {}, expected k = {}", x.len(), self.k));
        }
        if x.0.iter().any(|&v| v < 1 || v as usize > self.s) {
            return usage(format!("tuple {x} has a level outside [1, {}]", self.s));
        }
        Ok(())
    }
}

impl fmt::Display for OAParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} s={} t={} lambda={}", self.k, self.s, self.t, self.lambda)
    }
}

/// A point of `[s]^k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelTuple(pub Vec<u32>);

impl LevelTuple {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn levels(&self) -> &[u32] {
        &self.0
    }

    /// `d(1, x)`: number of coordinates not at level 1.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&v| v != 1).count()
    }

    /// Coordinates (0-based) where the tuple is not at level 1.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] != 1).collect()
    }
}

impl fmt::Display for LevelTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for LevelTuple {
    type Err = OapError;

    fn from_str(s: &str) -> Result<Self> {
        let levels = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| OapError::Usage(format!("bad level {p:?} in tuple {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if levels.is_empty() || levels.contains(&0) {
            return usage(format!("bad tuple {s:?}"));
        }
        Ok(LevelTuple(levels))
    }
}

impl Serialize for LevelTuple {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LevelTuple {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Position of a variable tuple within the sorted variable set `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VariableIndex(pub usize);

/// Hamming distance between two tuples of equal length.
pub fn hamming(a: &LevelTuple, b: &LevelTuple) -> Result<usize> {
    if a.len() != b.len() {
        return usage(format!("hamming: length mismatch ({} vs {})", a.len(), b.len()));
    }
    Ok(a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count())
}

pub fn binomial(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u64 = 1;
    for i in 0..r {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// All of `[s]^k` in lexicographic order.
pub fn all_tuples(params: &OAParams) -> Vec<LevelTuple> {
    let mut out = Vec::with_capacity(params.tuple_count());
    let mut cur = vec![1u32; params.k];
    loop {
        out.push(LevelTuple(cur.clone()));
        // odometer increment, last coordinate fastest
        let mut i = params.k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if (cur[i] as usize) < params.s {
                cur[i] += 1;
                break;
            }
            cur[i] = 1;
        }
    }
}

/// Lexicographic rank of `x` within `[s]^k`.
pub fn tuple_rank(params: &OAParams, x: &LevelTuple) -> usize {
    x.0.iter().fold(0usize, |acc, &v| acc * params.s + (v as usize - 1))
}

/// Tuples within distance `r` of the all-ones tuple, sorted.
pub fn ball_le(params: &OAParams, r: usize) -> Result<Vec<LevelTuple>> {
    if r > params.k {
        return usage(format!("radius must satisfy 0 ≤ r ≤ k = {}", params.k));
    }
    Ok(all_tuples(params).into_iter().filter(|x| x.weight() <= r).collect())
}

/// The reduced-system variable set `Y = {y : d(1,y) > t}`, sorted.
pub fn variable_set(params: &OAParams) -> Result<Vec<LevelTuple>> {
    if params.t == params.k {
        return Err(OapError::NoVariables(params.k));
    }
    Ok(all_tuples(params).into_iter().filter(|y| y.weight() > params.t).collect())
}

/// `J_x`: every tuple that agrees with `x` on the coordinates where `x` is
/// not at level 1. Requires `d(1,x) ≤ t`.
pub fn j_set(params: &OAParams, x: &LevelTuple) -> Result<Vec<LevelTuple>> {
    params.check_tuple(x)?;
    if x.weight() > params.t {
        return usage(format!("j_set: d(1,{x}) = {} exceeds t = {}", x.weight(), params.t));
    }
    let support = x.support();
    Ok(all_tuples(params)
        .into_iter()
        .filter(|y| support.iter().all(|&i| y.0[i] == x.0[i]))
        .collect())
}

/// Sorted variable set together with a tuple → ordinal lookup.
#[derive(Clone, Debug)]
pub struct VariableMap {
    tuples: Vec<LevelTuple>,
}

impl VariableMap {
    pub fn new(params: &OAParams) -> Result<Self> {
        Ok(Self { tuples: variable_set(params)? })
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[LevelTuple] {
        &self.tuples
    }

    pub fn ordinal(&self, y: &LevelTuple) -> Option<VariableIndex> {
        self.tuples.binary_search(y).ok().map(VariableIndex)
    }

    pub fn tuple(&self, idx: VariableIndex) -> &LevelTuple {
        &self.tuples[idx.0]
    }
}
