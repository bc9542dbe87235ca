//! Exhaustive integer-point enumeration and orbit counting.
//!
//! Every variable is a nonnegative integer. The search is depth-first over
//! variables in decreasing `d(1,·)`, then lexicographic order, and tightens
//! interval bounds from the row residuals to a fixpoint after every
//! assignment.

use std::collections::{BTreeSet, HashMap};

use log::debug;
use serde::Serialize;

use crate::constraints::{build_full, build_reduced, lift_solution, project_solution, ConstraintSystem, Form, Relation};
use crate::error::{usage, OapError, Result};
use crate::model::OAParams;
use crate::symmetry::{wreath_group, PermutationGroup, WreathKind};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionSet {
    pub params: OAParams,
    pub form: Form,
    /// Sorted lexicographically, no duplicates.
    pub points: Vec<Vec<i64>>,
    pub exhaustive: bool,
    pub nodes: u64,
}

/// `Σ a_j x_j ≥ b`.
struct Ineq {
    coeffs: Vec<(usize, i64)>,
    rhs: i64,
}

#[derive(Clone)]
struct Bounds {
    lo: Vec<i64>,
    /// `None` is unbounded above.
    hi: Vec<Option<i64>>,
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

impl Bounds {
    /// Tightens bounds until nothing changes. Returns `false` when some
    /// interval is empty.
    fn propagate(&mut self, rows: &[Ineq]) -> bool {
        loop {
            let mut changed = false;
            for row in rows {
                // upper bound of a·x; contributions that are unbounded are counted separately
                let mut max_sum: i128 = 0;
                let mut unbounded = 0usize;
                for &(j, a) in &row.coeffs {
                    match (a > 0, self.hi[j]) {
                        (true, Some(h)) => max_sum += a as i128 * h as i128,
                        (true, None) => unbounded += 1,
                        (false, _) => max_sum += a as i128 * self.lo[j] as i128,
                    }
                }
                if unbounded == 0 && max_sum < row.rhs as i128 {
                    return false;
                }
                for &(j, a) in &row.coeffs {
                    let own = match (a > 0, self.hi[j]) {
                        (true, Some(h)) => a as i128 * h as i128,
                        (true, None) => 0,
                        (false, _) => a as i128 * self.lo[j] as i128,
                    };
                    let others_unbounded = unbounded - usize::from(a > 0 && self.hi[j].is_none());
                    if others_unbounded > 0 {
                        continue;
                    }
                    // a·x_j ≥ rhs − max(rest)
                    let need = row.rhs as i128 - (max_sum - own);
                    if a > 0 {
                        let lo = div_ceil(need, a as i128);
                        if lo > self.lo[j] as i128 {
                            self.lo[j] = lo as i64;
                            changed = true;
                        }
                    } else {
                        let hi = div_floor(need, a as i128);
                        if self.hi[j].is_none_or(|h| hi < h as i128) {
                            if hi < self.lo[j] as i128 {
                                return false;
                            }
                            self.hi[j] = Some(hi as i64);
                            changed = true;
                        }
                    }
                    if self.hi[j].is_some_and(|h| h < self.lo[j]) {
                        return false;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }
}

struct Search<'a> {
    rows: &'a [Ineq],
    order: &'a [usize],
    budget: u64,
    nodes: u64,
    points: Vec<Vec<i64>>,
}

impl Search<'_> {
    /// `false` once the node budget is exhausted.
    fn dfs(&mut self, bounds: &Bounds) -> bool {
        let Some(&j) = self.order.iter().find(|&&j| bounds.hi[j] != Some(bounds.lo[j])) else {
            self.points.push(bounds.lo.clone());
            return true;
        };
        let hi = bounds.hi[j].expect("bounds are finite after root propagation");
        for v in bounds.lo[j]..=hi {
            if self.nodes >= self.budget {
                return false;
            }
            self.nodes += 1;
            let mut child = bounds.clone();
            child.lo[j] = v;
            child.hi[j] = Some(v);
            if child.propagate(self.rows) && !self.dfs(&child) {
                return false;
            }
        }
        true
    }
}

/// All nonnegative integer points of `sys`, or as many as the node budget
/// allows.
pub fn enumerate_integer_points(sys: &ConstraintSystem, budget: u64) -> Result<SolutionSet> {
    let n = sys.num_cols();
    let mut rows = Vec::new();
    for r in &sys.rows {
        rows.push(Ineq { coeffs: r.coeffs.clone(), rhs: r.rhs });
        if r.relation == Relation::Eq {
            rows.push(Ineq { coeffs: r.coeffs.iter().map(|&(j, c)| (j, -c)).collect(), rhs: -r.rhs });
        }
    }
    let mut bounds = Bounds { lo: vec![0; n], hi: vec![None; n] };
    let feasible = bounds.propagate(&rows);
    if feasible && bounds.hi.iter().any(Option::is_none) {
        return Err(OapError::Precondition("the constraints do not bound every variable".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| std::cmp::Reverse(sys.variables[j].weight()));

    let mut search = Search { rows: &rows, order: &order, budget, nodes: 0, points: Vec::new() };
    let exhaustive = !feasible || search.dfs(&bounds);
    let Search { nodes, mut points, .. } = search;
    if points.iter().any(|p| !sys.is_satisfied_by(p)) {
        return Err(OapError::Internal("enumeration produced a point violating the system".into()));
    }
    points.sort();
    points.dedup();
    debug!("enumerated {} points in {nodes} nodes (exhaustive: {exhaustive})", points.len());
    Ok(SolutionSet { params: sys.params, form: sys.form, points, exhaustive, nodes })
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Image of `point` under the coordinate permutation `g`: `(g·N)_{g(j)} = N_j`.
pub fn act_on_point(g: &crate::symmetry::Permutation, point: &[i64]) -> Vec<i64> {
    let mut out = vec![0; point.len()];
    for (j, &v) in point.iter().enumerate() {
        out[g.apply(j)] = v;
    }
    out
}

/// Number of orbits of `group` on the solution points.
pub fn orbit_count(solutions: &SolutionSet, group: &PermutationGroup) -> Result<usize> {
    if !solutions.exhaustive {
        return Err(OapError::NotExhaustive);
    }
    let Some(first) = solutions.points.first() else {
        return Ok(0);
    };
    if first.len() != group.degree() {
        return usage(format!("group of degree {} acting on points of length {}", group.degree(), first.len()));
    }
    let index: HashMap<&[i64], usize> = solutions.points.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let mut parent: Vec<usize> = (0..solutions.points.len()).collect();
    for (i, p) in solutions.points.iter().enumerate() {
        for g in group.generators() {
            let image = act_on_point(g, p);
            let &j = index
                .get(image.as_slice())
                .ok_or_else(|| OapError::Internal("a group generator maps a solution outside the set".into()))?;
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    Ok((0..parent.len()).filter(|&i| find(&mut parent, i) == i).count())
}

/// Coordinate symmetry group of the full system: `S_s ≀ S_k`, or all of
/// `S_{s^k}` when `t ∈ {0, k}`.
pub fn full_group(params: &OAParams) -> Result<PermutationGroup> {
    if params.t == 0 || params.t == params.k {
        Ok(PermutationGroup::symmetric(params.tuple_count()))
    } else {
        wreath_group(params, WreathKind::FullG)
    }
}

/// Coordinate symmetry group of the reduced system.
pub fn reduced_group(params: &OAParams) -> Result<PermutationGroup> {
    wreath_group(params, WreathKind::ReducedH)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionsReport {
    pub params: OAParams,
    pub full_count: usize,
    pub reduced_count: usize,
    pub exhaustive: bool,
    /// Counts agree and lift/project are mutually inverse on the two sets.
    pub bijection_ok: bool,
    pub orbits_full_g: Option<usize>,
    pub orbits_reduced_h: Option<usize>,
    pub full_nodes: u64,
    pub reduced_nodes: u64,
}

/// Whether lift and project are mutually inverse bijections between the sets.
pub fn check_bijection(full: &SolutionSet, reduced: &SolutionSet) -> Result<bool> {
    let params = &full.params;
    let full_set: BTreeSet<&Vec<i64>> = full.points.iter().collect();
    let reduced_set: BTreeSet<&Vec<i64>> = reduced.points.iter().collect();
    if full_set.len() != reduced_set.len() {
        return Ok(false);
    }
    for ny in &reduced.points {
        let nx = lift_solution(params, ny)?;
        if !full_set.contains(&nx) || project_solution(params, &nx)? != *ny {
            return Ok(false);
        }
    }
    for nx in &full.points {
        let ny = project_solution(params, nx)?;
        if !reduced_set.contains(&ny) || lift_solution(params, &ny)? != *nx {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Enumerates both formulations, checks the bijection and counts orbits
/// (when both searches finished).
pub fn solutions_report(params: &OAParams, budget: u64) -> Result<SolutionsReport> {
    if params.t >= params.k {
        return Err(OapError::NoVariables(params.k));
    }
    let full = enumerate_integer_points(&build_full(params), budget)?;
    let reduced = enumerate_integer_points(&build_reduced(params)?, budget)?;
    let exhaustive = full.exhaustive && reduced.exhaustive;
    let bijection_ok = exhaustive && check_bijection(&full, &reduced)?;
    let (orbits_full_g, orbits_reduced_h) = if exhaustive {
        (Some(orbit_count(&full, &full_group(params)?)?), Some(orbit_count(&reduced, &reduced_group(params)?)?))
    } else {
        (None, None)
    };
    Ok(SolutionsReport {
        params: *params,
        full_count: full.points.len(),
        reduced_count: reduced.points.len(),
        exhaustive,
        bijection_ok,
        orbits_full_g,
        orbits_reduced_h,
        full_nodes: full.nodes,
        reduced_nodes: reduced.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::all_tuples;

    fn p(k: usize, s: usize, t: usize, l: u64) -> OAParams {
        OAParams::new(k, s, t, l).unwrap()
    }

    /// Orbit count by Burnside: average number of points fixed by each element.
    fn burnside(set: &SolutionSet, group: &PermutationGroup) -> usize {
        let elements = group.elements(5000).unwrap();
        let fixed: usize =
            elements.iter().map(|g| set.points.iter().filter(|pt| act_on_point(g, pt) == **pt).count()).sum();
        assert_eq!(fixed % elements.len(), 0);
        fixed / elements.len()
    }

    #[test]
    fn even_and_odd_weight_codes() {
        let params = p(3, 2, 2, 1);
        let full = enumerate_integer_points(&build_full(&params), DEFAULT_BUDGET).unwrap();
        assert!(full.exhaustive);
        let parity: Vec<Vec<i64>> = [0, 1]
            .iter()
            .map(|&r| all_tuples(&params).iter().map(|x| i64::from(x.weight() % 2 == r)).collect())
            .collect();
        let mut want = parity.clone();
        want.sort();
        assert_eq!(full.points, want);
        let reduced = enumerate_integer_points(&build_reduced(&params).unwrap(), DEFAULT_BUDGET).unwrap();
        assert_eq!(reduced.points, vec![vec![0], vec![1]]);
    }

    #[test]
    fn report_for_two_runs_per_cell() {
        let r = solutions_report(&p(3, 2, 2, 1), DEFAULT_BUDGET).unwrap();
        assert_eq!(
            (r.full_count, r.reduced_count, r.bijection_ok, r.orbits_full_g, r.orbits_reduced_h),
            (2, 2, true, Some(1), Some(2))
        );
    }

    #[test]
    fn transportation_polytope() {
        let r = solutions_report(&p(2, 3, 1, 2), DEFAULT_BUDGET).unwrap();
        assert_eq!((r.full_count, r.reduced_count, r.bijection_ok), (21, 21, true));
        let full = enumerate_integer_points(&build_full(&p(2, 3, 1, 2)), DEFAULT_BUDGET).unwrap();
        let g = full_group(&p(2, 3, 1, 2)).unwrap();
        assert_eq!(g.order(), 72u32.into());
        assert_eq!(r.orbits_full_g, Some(burnside(&full, &g)));
    }

    #[test]
    fn infeasible_instance_is_empty() {
        // four runs of strength 2 allow at most three binary factors
        let r = solutions_report(&p(4, 2, 2, 1), 1_000_000).unwrap();
        assert_eq!((r.full_count, r.reduced_count, r.bijection_ok), (0, 0, true));
        assert_eq!((r.orbits_full_g, r.orbits_reduced_h), (Some(0), Some(0)));
    }

    #[test]
    fn burnside_agrees_with_union_find() {
        for params in [p(4, 2, 2, 1), p(3, 2, 1, 2), p(3, 3, 2, 1), p(4, 2, 3, 1)] {
            let full = enumerate_integer_points(&build_full(&params), DEFAULT_BUDGET).unwrap();
            let g = full_group(&params).unwrap();
            assert_eq!(orbit_count(&full, &g).unwrap(), burnside(&full, &g), "{params}");
            let reduced = enumerate_integer_points(&build_reduced(&params).unwrap(), DEFAULT_BUDGET).unwrap();
            let h = reduced_group(&params).unwrap();
            assert_eq!(orbit_count(&reduced, &h).unwrap(), burnside(&reduced, &h), "{params}");
        }
    }

    #[test]
    fn exhausted_budget_is_flagged_and_refused() {
        let params = p(4, 2, 2, 3);
        let partial = enumerate_integer_points(&build_full(&params), 5).unwrap();
        assert!(!partial.exhaustive);
        assert_eq!(partial.nodes, 5);
        let g = full_group(&params).unwrap();
        assert!(matches!(orbit_count(&partial, &g), Err(OapError::NotExhaustive)));
    }

    #[test]
    fn generators_map_solutions_to_solutions() {
        let params = p(4, 2, 2, 2);
        let sys = build_full(&params);
        let set = enumerate_integer_points(&sys, DEFAULT_BUDGET).unwrap();
        for g in full_group(&params).unwrap().generators() {
            for pt in &set.points {
                assert!(sys.is_satisfied_by(&act_on_point(g, pt)));
            }
        }
    }

    #[test]
    fn floor_and_ceil_division() {
        assert_eq!((div_floor(-7, 2), div_ceil(-7, 2), div_floor(7, -2), div_ceil(7, 2)), (-4, -3, -4, 4));
    }
}
