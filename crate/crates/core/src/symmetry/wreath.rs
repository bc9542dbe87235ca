//! Coordinate symmetries `S_{s−1} ≀ S_k` (levels `2..s`, fixing the centre)
//! and `S_s ≀ S_k` (all levels).

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::group::PermutationGroup;
use super::perm::Permutation;
use crate::error::{OapError, Result};
use crate::model::{all_tuples, variable_set, LevelTuple, OAParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WreathKind {
    /// Acts on `Y`; level 1 is fixed in every coordinate.
    ReducedH,
    /// Acts on all of `[s]^k`.
    FullG,
}

/// Sends `x` to `y` with `y[column_perm[i]] = level_perms[i][x[i] − 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WreathElement {
    pub column_perm: Vec<usize>,
    pub level_perms: Vec<Vec<u32>>,
}

impl WreathElement {
    fn identity(k: usize, s: usize) -> Self {
        Self { column_perm: (0..k).collect(), level_perms: vec![(1..=s as u32).collect(); k] }
    }

    pub fn act(&self, x: &LevelTuple) -> LevelTuple {
        let mut y = vec![0; x.len()];
        for (i, &v) in x.0.iter().enumerate() {
            y[self.column_perm[i]] = self.level_perms[i][v as usize - 1];
        }
        LevelTuple(y)
    }

    /// The induced permutation of `ground`, which must be sorted and closed
    /// under the action.
    pub fn to_permutation(&self, ground: &[LevelTuple]) -> Result<Permutation> {
        let images = ground
            .iter()
            .map(|x| {
                let y = self.act(x);
                ground.binary_search(&y).map_err(|_| OapError::Internal(format!("{x} is sent outside the ground set")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(images)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum WreathGenerators {
    Generators(Vec<WreathElement>),
    /// The whole symmetric group on this many variables.
    SymmetricGroup(usize),
    Identity,
    NoVariables,
}

/// Adjacent column transpositions plus, in each column, a transposition and
/// a full cycle of the permuted levels.
pub fn wreath_generators(params: &OAParams, kind: WreathKind) -> WreathGenerators {
    let OAParams { k, s, t, .. } = *params;
    if kind == WreathKind::ReducedH {
        if t == k {
            return WreathGenerators::NoVariables;
        }
        if t == 0 {
            return WreathGenerators::SymmetricGroup(params.tuple_count() - 1);
        }
        if params.is_degenerate() {
            return WreathGenerators::Identity;
        }
    }
    let first_level = if kind == WreathKind::ReducedH { 2 } else { 1 };
    let levels: Vec<u32> = (first_level..=s as u32).collect();
    let mut gens = Vec::new();
    for i in 0..k.saturating_sub(1) {
        let mut g = WreathElement::identity(k, s);
        g.column_perm.swap(i, i + 1);
        gens.push(g);
    }
    for col in 0..k {
        if levels.len() >= 2 {
            let mut g = WreathElement::identity(k, s);
            g.level_perms[col].swap(levels[0] as usize - 1, levels[1] as usize - 1);
            gens.push(g);
        }
        if levels.len() >= 3 {
            let mut g = WreathElement::identity(k, s);
            for (j, &l) in levels.iter().enumerate() {
                g.level_perms[col][l as usize - 1] = levels[(j + 1) % levels.len()];
            }
            gens.push(g);
        }
    }
    WreathGenerators::Generators(gens)
}

pub(crate) fn ground_set(params: &OAParams, kind: WreathKind) -> Result<Vec<LevelTuple>> {
    match kind {
        WreathKind::ReducedH => variable_set(params),
        WreathKind::FullG => Ok(all_tuples(params)),
    }
}

/// The group the generators (or flag) describe, acting on the variable
/// ordinals of the corresponding system.
pub fn wreath_group(params: &OAParams, kind: WreathKind) -> Result<PermutationGroup> {
    let ground = ground_set(params, kind)?;
    match wreath_generators(params, kind) {
        WreathGenerators::Generators(gens) => {
            let perms = gens.iter().map(|g| g.to_permutation(&ground)).collect::<Result<Vec<_>>>()?;
            PermutationGroup::new(ground.len(), perms)
        }
        WreathGenerators::SymmetricGroup(n) => Ok(PermutationGroup::symmetric(n)),
        WreathGenerators::Identity => Ok(PermutationGroup::trivial(ground.len())),
        WreathGenerators::NoVariables => Err(OapError::NoVariables(params.k)),
    }
}

pub(crate) fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// `((s−1)!)^k·k!`, `(s^k − 1)!` for `t = 0`, or 1 in the degenerate case.
pub fn expected_reduced_order(params: &OAParams) -> Result<BigUint> {
    let OAParams { k, s, t, .. } = *params;
    if t == k {
        return Err(OapError::NoVariables(k));
    }
    Ok(if t == 0 {
        factorial(params.tuple_count() - 1)
    } else if params.is_degenerate() {
        BigUint::one()
    } else {
        factorial(s - 1).pow(k as u32) * factorial(k)
    })
}

/// `(s!)^k·k!`, or `(s^k)!` when `t ∈ {0, k}`.
pub fn expected_full_order(params: &OAParams) -> BigUint {
    let OAParams { k, s, t, .. } = *params;
    if t == 0 || t == k {
        factorial(params.tuple_count())
    } else {
        factorial(s).pow(k as u32) * factorial(k)
    }
}
