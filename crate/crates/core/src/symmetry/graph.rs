//! Column symmetries of a constraint system via a colored bipartite graph.
//!
//! Distinct normalized rows and columns are vertices; a row vertex is joined
//! to every column it has a nonzero coefficient in, the edge colored by that
//! coefficient. Row vertices are colored by `(relation, rhs, multiplicity)`.
//! Automorphisms are found by colour refinement with individualization,
//! searching one subtree per candidate image of each first-path vertex.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use super::group::PermutationGroup;
use super::perm::Permutation;
use super::{normalized_rows, NormalizedRow};
use crate::constraints::ConstraintSystem;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub row_vertices: usize,
    pub column_vertices: usize,
    pub edges: usize,
    /// Distinct edge colors (coefficients), ascending.
    pub edge_colors: Vec<i64>,
    pub row_colors: usize,
}

#[derive(Clone, Debug)]
pub struct ColoredGraph {
    rows: usize,
    cols: usize,
    /// Initial vertex colors: rows first, then columns (all one color).
    colors: Vec<usize>,
    /// Sorted `(neighbour, edge color)` lists.
    adj: Vec<Vec<(usize, usize)>>,
    edge_colors: Vec<i64>,
}

pub fn encode_colored_graph(sys: &ConstraintSystem) -> ColoredGraph {
    let rows = normalized_rows(sys);
    from_rows(&rows, sys.num_cols())
}

pub(crate) fn from_rows(rows: &BTreeMap<NormalizedRow, usize>, cols: usize) -> ColoredGraph {
    let r = rows.len();
    let mut edge_colors: Vec<i64> = rows.keys().flat_map(|row| row.coeffs.iter().map(|&(_, c)| c)).collect();
    edge_colors.sort_unstable();
    edge_colors.dedup();
    let ec = |c: i64| edge_colors.binary_search(&c).expect("collected above");

    let mut row_classes: Vec<(crate::constraints::Relation, i64, usize)> =
        rows.iter().map(|(row, &mult)| (row.relation, row.rhs, mult)).collect();
    row_classes.sort_unstable();
    row_classes.dedup();

    let mut colors = Vec::with_capacity(r + cols);
    let mut adj = vec![Vec::new(); r + cols];
    for (i, (row, &mult)) in rows.iter().enumerate() {
        colors.push(row_classes.binary_search(&(row.relation, row.rhs, mult)).unwrap());
        for &(j, c) in &row.coeffs {
            adj[i].push((r + j, ec(c)));
            adj[r + j].push((i, ec(c)));
        }
    }
    colors.extend(std::iter::repeat_n(row_classes.len(), cols));
    for a in &mut adj {
        a.sort_unstable();
    }
    ColoredGraph { rows: r, cols, colors, adj, edge_colors }
}

/// An ordered partition as dense colors `0..cells`.
type Coloring = Vec<usize>;

struct PathNode {
    coloring: Coloring,
    cell: Vec<usize>,
    chosen: usize,
    trace: u64,
}

impl ColoredGraph {
    pub fn summary(&self) -> GraphSummary {
        let mut classes = self.colors[..self.rows].to_vec();
        classes.sort_unstable();
        classes.dedup();
        GraphSummary {
            row_vertices: self.rows,
            column_vertices: self.cols,
            edges: self.adj[..self.rows].iter().map(Vec::len).sum(),
            edge_colors: self.edge_colors.clone(),
            row_colors: classes.len(),
        }
    }

    fn vertices(&self) -> usize {
        self.rows + self.cols
    }

    /// Refines to the coarsest equitable partition. The returned trace is
    /// an isomorphism invariant of the refinement run.
    fn refine(&self, coloring: &mut Coloring) -> u64 {
        let mut hasher = DefaultHasher::new();
        let mut cells = count_cells(coloring);
        loop {
            let mut sigs: Vec<(usize, Vec<(usize, usize)>, usize)> = (0..self.vertices())
                .map(|v| {
                    let mut nb: Vec<(usize, usize)> = self.adj[v].iter().map(|&(u, e)| (e, coloring[u])).collect();
                    nb.sort_unstable();
                    (coloring[v], nb, v)
                })
                .collect();
            sigs.sort_unstable();
            let mut next = 0;
            for i in 0..sigs.len() {
                if i == 0 || (sigs[i].0, &sigs[i].1) != (sigs[i - 1].0, &sigs[i - 1].1) {
                    if i > 0 {
                        next += 1;
                    }
                    (sigs[i].0, &sigs[i].1).hash(&mut hasher);
                }
                coloring[sigs[i].2] = next;
            }
            let new_cells = next + 1;
            new_cells.hash(&mut hasher);
            if new_cells == cells {
                return hasher.finish();
            }
            cells = new_cells;
        }
    }

    fn individualize(coloring: &Coloring, v: usize) -> Coloring {
        let c = coloring[v];
        coloring.iter().enumerate().map(|(u, &cu)| if cu > c || (cu == c && u != v) { cu + 1 } else { cu }).collect()
    }

    /// Smallest non-singleton cell, lowest color first.
    fn target_cell(coloring: &Coloring) -> Option<Vec<usize>> {
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); count_cells(coloring)];
        for (v, &c) in coloring.iter().enumerate() {
            members[c].push(v);
        }
        members.into_iter().filter(|m| m.len() > 1).min_by_key(|m| m.len())
    }

    fn is_automorphism(&self, g: &[usize]) -> bool {
        (0..self.vertices()).all(|v| {
            self.colors[g[v]] == self.colors[v]
                && self.adj[v].len() == self.adj[g[v]].len()
                && self.adj[v].iter().all(|&(u, e)| self.adj[g[v]].binary_search(&(g[u], e)).is_ok())
        })
    }

    /// Maps the first leaf onto `leaf`, if that is an automorphism.
    fn leaf_map(&self, first: &Coloring, leaf: &Coloring) -> Option<Vec<usize>> {
        let mut at = vec![0; leaf.len()];
        for (v, &c) in leaf.iter().enumerate() {
            at[c] = v;
        }
        let g: Vec<usize> = first.iter().map(|&c| at[c]).collect();
        self.is_automorphism(&g).then_some(g)
    }

    fn search(&self, path: &[PathNode], leaf: &Coloring, coloring: &Coloring, w: usize, depth: usize) -> Option<Vec<usize>> {
        let mut next = Self::individualize(coloring, w);
        if self.refine(&mut next) != path[depth].trace {
            return None;
        }
        match Self::target_cell(&next) {
            None => (depth + 1 == path.len()).then(|| self.leaf_map(leaf, &next)).flatten(),
            Some(cell) => {
                if depth + 1 == path.len() || cell.len() != path[depth + 1].cell.len() {
                    return None;
                }
                cell.iter().find_map(|&u| self.search(path, leaf, &next, u, depth + 1))
            }
        }
    }

    /// Generators of the full vertex automorphism group.
    fn vertex_automorphisms(&self) -> Vec<Vec<usize>> {
        let mut coloring = self.colors.clone();
        normalize(&mut coloring);
        self.refine(&mut coloring);
        let mut path = Vec::new();
        while let Some(cell) = Self::target_cell(&coloring) {
            let chosen = cell[0];
            let mut next = Self::individualize(&coloring, chosen);
            let trace = self.refine(&mut next);
            path.push(PathNode { coloring, cell, chosen, trace });
            coloring = next;
        }
        let leaf = coloring;

        let mut gens: Vec<Vec<usize>> = Vec::new();
        for depth in (0..path.len()).rev() {
            let node = &path[depth];
            for &w in &node.cell {
                if w == node.chosen || same_orbit(&gens, self.vertices(), node.chosen, w) {
                    continue;
                }
                if let Some(g) = self.search(&path, &leaf, &node.coloring, w, depth) {
                    gens.push(g);
                }
            }
        }
        gens
    }
}

fn count_cells(coloring: &Coloring) -> usize {
    coloring.iter().max().map_or(0, |&c| c + 1)
}

fn normalize(coloring: &mut Coloring) {
    let mut seen: Vec<usize> = coloring.clone();
    seen.sort_unstable();
    seen.dedup();
    for c in coloring.iter_mut() {
        *c = seen.binary_search(c).unwrap();
    }
}

fn same_orbit(gens: &[Vec<usize>], n: usize, a: usize, b: usize) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![a];
    seen[a] = true;
    while let Some(v) = stack.pop() {
        if v == b {
            return true;
        }
        for g in gens {
            if !seen[g[v]] {
                seen[g[v]] = true;
                stack.push(g[v]);
            }
        }
    }
    false
}

/// Column permutations that extend to an automorphism of the graph.
pub fn automorphism_group(graph: &ColoredGraph) -> PermutationGroup {
    let gens: Vec<Permutation> = graph
        .vertex_automorphisms()
        .into_iter()
        .map(|g| Permutation::from_images_unchecked(g[graph.rows..].iter().map(|&v| v - graph.rows).collect()))
        .filter(|p| !p.is_identity())
        .collect();
    PermutationGroup::new(graph.cols, gens).expect("projected generators act on the columns")
}
