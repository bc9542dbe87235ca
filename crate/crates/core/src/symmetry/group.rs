//! Stabilizer chains.
//!
//! Deterministic Schreier–Sims: the base grows as needed, every Schreier
//! generator of a level is stripped through the levels below it, and a
//! non-trivial residue is added as a strong generator before the affected
//! level is re-examined. The resulting order is exact.

use num_bigint::BigUint;
use num_traits::One;

use super::perm::Permutation;
use crate::error::{usage, Result};

#[derive(Clone, Debug)]
struct Level {
    base: usize,
    gens: Vec<Permutation>,
    orbit: Vec<usize>,
    /// `transversal[p] = (u, u⁻¹)` with `u(base) = p`.
    transversal: Vec<Option<(Permutation, Permutation)>>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Self {
        let mut transversal = vec![None; degree];
        let id = Permutation::identity(degree);
        transversal[base] = Some((id.clone(), id));
        Self { base, gens: Vec::new(), orbit: vec![base], transversal }
    }

    fn add_gen(&mut self, g: Permutation) {
        self.gens.push(g);
        let mut pos = 0;
        while pos < self.orbit.len() {
            let p = self.orbit[pos];
            for g in &self.gens {
                let q = g.apply(p);
                if self.transversal[q].is_none() {
                    let u = self.transversal[p].as_ref().expect("orbit points have transversal elements").0.then(g);
                    let inv = u.inverse();
                    self.transversal[q] = Some((u, inv));
                    self.orbit.push(q);
                }
            }
            pos += 1;
        }
    }
}

/// A permutation group given by generators, with a verified base and
/// strong generating set.
#[derive(Clone, Debug)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermutationGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return usage(format!("generator of degree {} in a group of degree {degree}", g.degree()));
        }
        let mut group = Self { degree, generators, levels: Vec::new() };
        group.schreier_sims();
        Ok(group)
    }

    pub fn trivial(degree: usize) -> Self {
        Self { degree, generators: Vec::new(), levels: Vec::new() }
    }

    /// `S_n` from a transposition and an `n`-cycle.
    pub fn symmetric(degree: usize) -> Self {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Permutation::from_cycles(degree, &[vec![0, 1]]).expect("valid cycle"));
        }
        if degree >= 3 {
            gens.push(Permutation::from_cycles(degree, &[(0..degree).collect()]).expect("valid cycle"));
        }
        Self::new(degree, gens).expect("generators have the right degree")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.strip(g.clone(), 0).0.is_identity()
    }

    /// Every element, when there are at most `limit`.
    pub fn elements(&self, limit: usize) -> Result<Vec<Permutation>> {
        if self.order() > BigUint::from(limit) {
            return usage(format!("group of order {} exceeds the enumeration limit {limit}", self.order()));
        }
        // g = u_{L−1} ⋯ u_0 applied left to right, one coset representative per level
        let mut out = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            out = out
                .iter()
                .flat_map(|g| level.orbit.iter().map(move |&p| g.then(&level.transversal[p].as_ref().unwrap().0)))
                .collect();
        }
        Ok(out)
    }

    /// Divides `g` by transversal elements from level `from` down. Returns
    /// the residue and the level at which it left the chain.
    fn strip(&self, mut g: Permutation, from: usize) -> (Permutation, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            match &level.transversal[g.apply(level.base)] {
                Some((_, inv)) => g = g.then(inv),
                None => return (g, i),
            }
        }
        (g, self.levels.len())
    }

    fn schreier_sims(&mut self) {
        let gens: Vec<Permutation> = self.generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut base: Vec<usize> = Vec::new();
        for g in &gens {
            if base.iter().all(|&b| g.apply(b) == b) {
                base.push(g.first_moved().expect("non-identity"));
            }
        }
        self.levels = base.iter().map(|&b| Level::new(b, self.degree)).collect();
        for g in &gens {
            for i in 0..self.levels.len() {
                self.levels[i].add_gen(g.clone());
                if g.apply(self.levels[i].base) != self.levels[i].base {
                    break;
                }
            }
        }

        let mut i = self.levels.len();
        while i > 0 {
            let level = i - 1;
            match self.first_sifting_failure(level) {
                None => i -= 1,
                Some((residue, j)) => {
                    if j == self.levels.len() {
                        let b = residue.first_moved().expect("non-identity residue");
                        self.levels.push(Level::new(b, self.degree));
                    }
                    for l in level + 1..=j {
                        self.levels[l].add_gen(residue.clone());
                    }
                    i = j + 1;
                }
            }
        }
    }

    /// First Schreier generator of `level` that the chain below does not
    /// contain, stripped, with the level where stripping stopped.
    fn first_sifting_failure(&self, level: usize) -> Option<(Permutation, usize)> {
        let l = &self.levels[level];
        for &beta in &l.orbit {
            let u = &l.transversal[beta].as_ref().unwrap().0;
            for x in &l.gens {
                let back = &l.transversal[x.apply(beta)].as_ref().unwrap().1;
                let h = u.then(x).then(back);
                if h.is_identity() {
                    continue;
                }
                let (r, j) = self.strip(h, level + 1);
                if !r.is_identity() {
                    return Some((r, j));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn factorial(n: usize) -> BigUint {
        (1..=n).fold(BigUint::one(), |a, i| a * BigUint::from(i))
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 0..9 {
            assert_eq!(PermutationGroup::symmetric(n).order(), factorial(n), "S_{n}");
        }
        assert_eq!(PermutationGroup::symmetric(26).order(), factorial(26));
    }

    #[test]
    fn cyclic_and_dihedral() {
        let c = Permutation::from_cycles(6, &[vec![0, 1, 2, 3, 4, 5]]).unwrap();
        assert_eq!(PermutationGroup::new(6, vec![c.clone()]).unwrap().order(), BigUint::from(6u32));
        let r = Permutation::new(vec![0, 5, 4, 3, 2, 1]).unwrap();
        let d = PermutationGroup::new(6, vec![c, r]).unwrap();
        assert_eq!(d.order(), BigUint::from(12u32));
        assert!(!d.contains(&Permutation::from_cycles(6, &[vec![0, 1]]).unwrap()));
    }

    #[test]
    fn elements_match_order() {
        let g = PermutationGroup::symmetric(4);
        let mut e = g.elements(100).unwrap();
        e.sort();
        e.dedup();
        assert_eq!(e.len(), 24);
        assert!(g.elements(10).is_err());
    }

    #[test]
    fn alternating_group_from_three_cycles() {
        let gens = (0..5).map(|i| Permutation::from_cycles(7, &[vec![i, i + 1, i + 2]]).unwrap()).collect();
        assert_eq!(PermutationGroup::new(7, gens).unwrap().order(), factorial(7) / BigUint::from(2u32));
    }

    proptest! {
        // order agrees with a closure computed by brute force
        #[test]
        fn order_matches_closure(imgs in proptest::collection::vec(Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(), 1..3)) {
            let gens: Vec<Permutation> = imgs.into_iter().map(|v| Permutation::new(v).unwrap()).collect();
            let group = PermutationGroup::new(6, gens.clone()).unwrap();
            let mut seen = std::collections::BTreeSet::from([Permutation::identity(6)]);
            let mut frontier = vec![Permutation::identity(6)];
            while let Some(g) = frontier.pop() {
                for s in &gens {
                    let h = g.then(s);
                    if seen.insert(h.clone()) {
                        frontier.push(h);
                    }
                }
            }
            prop_assert_eq!(group.order(), BigUint::from(seen.len()));
            for g in &seen {
                prop_assert!(group.contains(g));
            }
            prop_assert_eq!(factorial(6) % group.order(), BigUint::from(0u32));
        }
    }
}
