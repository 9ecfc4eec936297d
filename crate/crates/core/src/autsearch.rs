//! Automorphism groups of graphs by individualization and refinement.
//!
//! The search follows the first path of the search tree down to a discrete
//! partition, then walks back up. At each level it tries every vertex of the
//! target cell that is not already known to be equivalent to the first-path
//! choice, looking for a leaf whose labeling, composed with the first leaf,
//! is an automorphism. Automorphisms found deeper in the tree fix the
//! first-path prefix, so their orbits prune the candidates above them.
//! The group order is the product of the orbit lengths met along the way,
//! and is checked against a Schreier-Sims computation on the generators.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::permgrp::{Perm, PermGroup};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutError {
    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("brute force is limited to {limit} vertices, graph has {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("generator {index} does not preserve adjacency")]
    NotAnAutomorphism { index: usize },
    #[error("orbit product {search} disagrees with Schreier-Sims order {chain}")]
    OrderMismatch { search: BigUint, chain: BigUint },
}

/// An ordered partition of `0..n`, stored as a vertex array cut into
/// contiguous cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedPartition {
    lab: Vec<usize>,
    pos: Vec<usize>,
    /// Start position of the cell holding each vertex.
    cell_of: Vec<usize>,
    /// Cell length, indexed by start position.
    len_at: Vec<usize>,
    cells: usize,
}

impl OrderedPartition {
    pub fn unit(n: usize) -> Self {
        let mut len_at = vec![0; n];
        if n > 0 {
            len_at[0] = n;
        }
        OrderedPartition {
            lab: (0..n).collect(),
            pos: (0..n).collect(),
            cell_of: vec![0; n],
            len_at,
            cells: usize::from(n > 0),
        }
    }

    /// Builds a partition from explicit cells. Returns `None` unless the
    /// cells are disjoint and cover `0..n`.
    pub fn from_cells(n: usize, cells: &[Vec<usize>]) -> Option<Self> {
        let lab: Vec<usize> = cells.iter().flatten().copied().collect();
        if lab.len() != n || cells.iter().any(Vec::is_empty) {
            return None;
        }
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in lab.iter().enumerate() {
            if v >= n || pos[v] != usize::MAX {
                return None;
            }
            pos[v] = i;
        }
        let mut cell_of = vec![0; n];
        let mut len_at = vec![0; n];
        let mut start = 0;
        for cell in cells {
            len_at[start] = cell.len();
            for &v in cell {
                cell_of[v] = start;
            }
            start += cell.len();
        }
        Some(OrderedPartition {
            lab,
            pos,
            cell_of,
            len_at,
            cells: cells.len(),
        })
    }

    pub fn num_cells(&self) -> usize {
        self.cells
    }

    pub fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    /// Cells in order, each sorted.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.cells);
        let mut start = 0;
        while start < self.lab.len() {
            let len = self.len_at[start];
            let mut cell = self.lab[start..start + len].to_vec();
            cell.sort_unstable();
            out.push(cell);
            start += len;
        }
        out
    }

    /// Ordinal index of the cell holding each vertex.
    pub fn cell_index(&self) -> Vec<usize> {
        let mut ordinal = vec![0; self.lab.len()];
        let mut start = 0;
        let mut k = 0;
        while start < self.lab.len() {
            ordinal[start] = k;
            k += 1;
            start += self.len_at[start];
        }
        self.cell_of.iter().map(|&s| ordinal[s]).collect()
    }

    fn starts(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.cells);
        let mut start = 0;
        while start < self.lab.len() {
            out.push(start);
            start += self.len_at[start];
        }
        out
    }

    /// First smallest non-singleton cell, as a start position.
    fn target_cell(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        let mut start = 0;
        while start < self.lab.len() {
            let len = self.len_at[start];
            if len > 1 && best.is_none_or(|(_, l)| len < l) {
                best = Some((start, len));
            }
            start += len;
        }
        best.map(|(s, _)| s)
    }

    fn cell_at(&self, start: usize) -> &[usize] {
        &self.lab[start..start + self.len_at[start]]
    }

    /// Splits `v` off into a singleton placed just before the rest of its
    /// cell, then refines. Returns the refinement trace.
    fn individualize(&mut self, g: &Graph, v: usize) -> u64 {
        let c = self.cell_of[v];
        let len = self.len_at[c];
        debug_assert!(len > 1);
        let p = self.pos[v];
        let other = self.lab[c];
        self.lab.swap(c, p);
        self.pos[other] = p;
        self.pos[v] = c;
        self.len_at[c] = 1;
        self.len_at[c + 1] = len - 1;
        for i in c + 1..c + len {
            self.cell_of[self.lab[i]] = c + 1;
        }
        self.cells += 1;
        // The partition was equitable, so only the new singleton can split
        // anything.
        self.refine_from(g, [c])
    }

    /// Refines to the coarsest equitable partition finer than `self`, using
    /// the cells starting at `splitters` as the initial work queue.
    fn refine_from(&mut self, g: &Graph, splitters: impl IntoIterator<Item = usize>) -> u64 {
        let n = self.lab.len();
        let mut trace = Trace::new();
        let mut queued = vec![false; n];
        let mut queue = VecDeque::new();
        for s in splitters {
            if !queued[s] {
                queued[s] = true;
                queue.push_back(s);
            }
        }
        let mut count = vec![0usize; n];
        let mut touched = Vec::new();
        let mut splitter = Vec::new();
        let mut hit_cells = Vec::new();
        let mut items: Vec<(usize, usize)> = Vec::new();
        while let Some(w) = queue.pop_front() {
            queued[w] = false;
            splitter.clear();
            splitter.extend_from_slice(self.cell_at(w));
            trace.mix(w as u64);
            for &x in &splitter {
                for &y in g.neighbors(x) {
                    if count[y] == 0 {
                        touched.push(y);
                    }
                    count[y] += 1;
                }
            }
            hit_cells.clear();
            hit_cells.extend(touched.iter().map(|&y| self.cell_of[y]));
            hit_cells.sort_unstable();
            hit_cells.dedup();
            for &c in &hit_cells {
                let len = self.len_at[c];
                items.clear();
                items.extend(self.lab[c..c + len].iter().map(|&x| (count[x], x)));
                let first = items[0].0;
                if items.iter().all(|&(k, _)| k == first) {
                    trace.mix((c as u64) << 32 | first as u64);
                    continue;
                }
                items.sort_unstable();
                for (i, &(_, x)) in items.iter().enumerate() {
                    self.lab[c + i] = x;
                    self.pos[x] = c + i;
                }
                let mut start = c;
                for i in 1..=len {
                    if i == len || items[i].0 != items[i - 1].0 {
                        let end = c + i;
                        self.len_at[start] = end - start;
                        for p in start..end {
                            self.cell_of[self.lab[p]] = start;
                        }
                        trace.mix(
                            (start as u64) << 40
                                | (items[i - 1].0 as u64) << 20
                                | (end - start) as u64,
                        );
                        if !queued[start] {
                            queued[start] = true;
                            queue.push_back(start);
                        }
                        if start != c {
                            self.cells += 1;
                        }
                        start = end;
                    }
                }
            }
            for &y in &touched {
                count[y] = 0;
            }
            touched.clear();
        }
        trace.mix(self.cells as u64);
        trace.0
    }
}

/// Coarsest equitable refinement of `p`. Fragments of a split cell are
/// ordered by increasing neighbor count into the splitter.
pub fn refine(g: &Graph, p: &OrderedPartition) -> OrderedPartition {
    let mut out = p.clone();
    let starts = out.starts();
    out.refine_from(g, starts);
    out
}

/// Individualizes `v` in `p` (which need not be equitable) and refines.
pub fn individualize_and_refine(g: &Graph, p: &OrderedPartition, v: usize) -> OrderedPartition {
    let mut out = refine(g, p);
    if out.len_at[out.cell_of[v]] > 1 {
        out.individualize(g, v);
    }
    out
}

// FNV-style running hash of refinement events; every input is label-free
// (positions, counts and sizes only), so equal traces are necessary for
// two nodes to be related by an automorphism.
struct Trace(u64);

impl Trace {
    fn new() -> Self {
        Trace(0xcbf2_9ce4_8422_2325)
    }

    fn mix(&mut self, x: u64) {
        self.0 = (self.0 ^ x)
            .wrapping_mul(0x0000_0100_0000_01b3)
            .rotate_left(7);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchStats {
    pub nodes: u64,
    pub refinements: u64,
    pub leaves_checked: u64,
}

#[derive(Debug, Clone)]
pub struct AutResult {
    pub generators: Vec<Perm>,
    pub group_order: BigUint,
    /// The first-path individualized vertices: a base for the group.
    pub base: Vec<usize>,
    /// Orbit length of each base point under the stabilizer of the earlier ones.
    pub orbit_lengths: Vec<usize>,
    pub stats: SearchStats,
}

impl AutResult {
    pub fn group(&self, n: usize) -> PermGroup {
        PermGroup::new(n, self.generators.clone()).expect("generators share the degree")
    }
}

pub fn is_automorphism(g: &Graph, p: &Perm) -> bool {
    p.degree() == g.n()
        && g.edges()
            .all(|(u, v)| g.is_adjacent(p.apply(u), p.apply(v)))
}

struct PathLevel {
    partition: OrderedPartition,
    cell: Vec<usize>,
    chosen: usize,
    trace: u64,
    cells_after: usize,
}

struct Search<'a> {
    g: &'a Graph,
    path: Vec<PathLevel>,
    leaf: Vec<usize>,
    stats: SearchStats,
    budget: u64,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<(), AutError> {
        self.stats.nodes += 1;
        self.stats.refinements += 1;
        if self.stats.nodes > self.budget {
            return Err(AutError::BudgetExceeded {
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// Looks for an automorphism-yielding leaf below the node obtained by
    /// individualizing `v` in the first-path partition at `depth`.
    fn explore(
        &mut self,
        p: &OrderedPartition,
        depth: usize,
        v: usize,
    ) -> Result<Option<Perm>, AutError> {
        self.tick()?;
        let mut child = p.clone();
        let trace = child.individualize(self.g, v);
        let level = &self.path[depth];
        if trace != level.trace || child.num_cells() != level.cells_after {
            return Ok(None);
        }
        if child.is_discrete() {
            self.stats.leaves_checked += 1;
            let mut images = vec![0; self.leaf.len()];
            for (i, &x) in self.leaf.iter().enumerate() {
                images[x] = child.lab[i];
            }
            let gamma = Perm::from_images(images).expect("discrete partitions are bijections");
            return Ok(is_automorphism(self.g, &gamma).then_some(gamma));
        }
        let target = child.target_cell().expect("not discrete");
        let mut candidates = child.cell_at(target).to_vec();
        candidates.sort_unstable();
        for u in candidates {
            if let Some(found) = self.explore(&child, depth + 1, u)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }

    fn add_perm(&mut self, p: &Perm) {
        for x in 0..self.parent.len() {
            self.union(x, p.apply(x));
        }
    }
}

/// Generators and order of the full automorphism group, with a node budget.
pub fn automorphisms_with_budget(g: &Graph, budget: u64) -> Result<AutResult, AutError> {
    let n = g.n();
    let mut p = OrderedPartition::unit(n);
    let starts = p.starts();
    p.refine_from(g, starts);
    let mut stats = SearchStats {
        refinements: 1,
        ..SearchStats::default()
    };
    let mut path = Vec::new();
    while let Some(target) = p.target_cell() {
        let cell = {
            let mut c = p.cell_at(target).to_vec();
            c.sort_unstable();
            c
        };
        let chosen = cell[0];
        let mut child = p.clone();
        let trace = child.individualize(g, chosen);
        stats.nodes += 1;
        stats.refinements += 1;
        let cells_after = child.num_cells();
        path.push(PathLevel {
            partition: std::mem::replace(&mut p, child),
            cell,
            chosen,
            trace,
            cells_after,
        });
    }
    let mut search = Search {
        g,
        path,
        leaf: p.lab.clone(),
        stats,
        budget,
    };

    let mut generators: Vec<Perm> = Vec::new();
    let mut orbits = UnionFind::new(n);
    let mut orbit_lengths = vec![0; search.path.len()];
    for depth in (0..search.path.len()).rev() {
        let chosen = search.path[depth].chosen;
        let cell = search.path[depth].cell.clone();
        let partition = search.path[depth].partition.clone();
        let mut failed: Vec<usize> = Vec::new();
        for &w in &cell {
            let rw = orbits.find(w);
            if rw == orbits.find(chosen) || failed.iter().any(|&f| orbits.find(f) == rw) {
                continue;
            }
            match search.explore(&partition, depth, w)? {
                Some(gamma) => {
                    orbits.add_perm(&gamma);
                    generators.push(gamma);
                }
                None => failed.push(w),
            }
        }
        let root = orbits.find(chosen);
        orbit_lengths[depth] = cell.iter().filter(|&&w| orbits.find(w) == root).count();
    }

    for (index, gamma) in generators.iter().enumerate() {
        if !is_automorphism(g, gamma) {
            return Err(AutError::NotAnAutomorphism { index });
        }
    }
    let search_order = orbit_lengths
        .iter()
        .fold(BigUint::one(), |acc, &l| acc * BigUint::from(l));
    let chain_order = PermGroup::new(n, generators.clone())
        .expect("generators share the degree")
        .order();
    if search_order != chain_order {
        return Err(AutError::OrderMismatch {
            search: search_order,
            chain: chain_order,
        });
    }
    Ok(AutResult {
        generators,
        group_order: chain_order,
        base: search.path.iter().map(|l| l.chosen).collect(),
        orbit_lengths,
        stats: search.stats,
    })
}

pub fn automorphisms(g: &Graph) -> Result<AutResult, AutError> {
    automorphisms_with_budget(g, DEFAULT_NODE_BUDGET)
}

/// Every automorphism, by plain backtracking. Test oracle for small graphs.
pub fn brute_force_automorphisms(g: &Graph) -> Result<AutResult, AutError> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(AutError::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    // BFS order so every vertex after the first has an earlier neighbor.
    let order: Vec<usize> = g.bfs_layers(0).layers.concat();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut found = Vec::new();
    let mut nodes = 0u64;

    fn extend(
        g: &Graph,
        order: &[usize],
        i: usize,
        image: &mut [usize],
        used: &mut [bool],
        found: &mut Vec<Perm>,
        nodes: &mut u64,
    ) {
        *nodes += 1;
        if i == order.len() {
            found.push(Perm::from_images(image.to_vec()).expect("bijection"));
            return;
        }
        let v = order[i];
        for t in 0..g.n() {
            if used[t] || g.degree(t) != g.degree(v) {
                continue;
            }
            let consistent = order[..i]
                .iter()
                .all(|&u| g.is_adjacent(u, v) == g.is_adjacent(image[u], t));
            if consistent {
                image[v] = t;
                used[t] = true;
                extend(g, order, i + 1, image, used, found, nodes);
                used[t] = false;
                image[v] = usize::MAX;
            }
        }
    }

    extend(g, &order, 0, &mut image, &mut used, &mut found, &mut nodes);
    let group_order = BigUint::from(found.len());
    found.retain(|p| !p.is_identity());
    Ok(AutResult {
        generators: found,
        group_order,
        base: order,
        orbit_lengths: Vec::new(),
        stats: SearchStats {
            nodes,
            refinements: 0,
            leaves_checked: 0,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn unit_partition_of_regular_graph_is_equitable() {
        let g = fixtures::heawood();
        let p = refine(&g, &OrderedPartition::unit(14));
        assert_eq!(p.num_cells(), 1);
    }

    #[test]
    fn path_refines_by_degree() {
        let g = fixtures::path(3);
        let p = refine(&g, &OrderedPartition::unit(3));
        assert_eq!(p.cells(), vec![vec![0, 2], vec![1]]);
        assert_eq!(p.cell_index(), vec![0, 1, 0]);
    }

    #[test]
    fn individualized_vertex_splits_into_distance_layers() {
        let g = fixtures::heawood();
        let p = individualize_and_refine(&g, &OrderedPartition::unit(14), 0);
        let mut sizes: Vec<usize> = p.cells().iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3, 4, 6]);
    }

    #[test]
    fn refine_is_idempotent_and_monotone() {
        let g = fixtures::cube();
        let start = OrderedPartition::from_cells(8, &[vec![0, 3], vec![1, 2, 4, 5, 6, 7]]).unwrap();
        let once = refine(&g, &start);
        assert_eq!(refine(&g, &once), once);
        let index = start.cell_index();
        for cell in once.cells() {
            assert!(cell.iter().all(|&v| index[v] == index[cell[0]]));
        }
        assert!(OrderedPartition::from_cells(3, &[vec![0, 1], vec![1, 2]]).is_none());
    }

    #[test]
    fn small_groups() {
        assert_eq!(
            automorphisms(&fixtures::cycle(4)).unwrap().group_order,
            BigUint::from(8u32)
        );
        assert_eq!(
            automorphisms(&fixtures::complete(3)).unwrap().group_order,
            BigUint::from(6u32)
        );
        assert_eq!(
            automorphisms(&fixtures::path(3)).unwrap().group_order,
            BigUint::from(2u32)
        );
        assert_eq!(
            automorphisms(&fixtures::complete(4)).unwrap().group_order,
            BigUint::from(24u32)
        );
        assert_eq!(
            automorphisms(&fixtures::cube()).unwrap().group_order,
            BigUint::from(48u32)
        );
        assert_eq!(
            automorphisms(&fixtures::heawood()).unwrap().group_order,
            BigUint::from(336u32)
        );
        assert_eq!(
            automorphisms(&fixtures::path(1)).unwrap().group_order,
            BigUint::one()
        );
    }

    #[test]
    fn brute_force_oracle() {
        let bf = |g: &Graph| brute_force_automorphisms(g).unwrap().group_order;
        assert_eq!(bf(&fixtures::complete(3)), BigUint::from(6u32));
        assert_eq!(bf(&fixtures::path(3)), BigUint::from(2u32));
        assert_eq!(bf(&fixtures::heawood()), BigUint::from(336u32));
        assert!(matches!(
            brute_force_automorphisms(&fixtures::cycle(21)),
            Err(AutError::TooLarge { n: 21, .. })
        ));
    }

    #[test]
    fn budget_is_enforced() {
        assert_eq!(
            automorphisms_with_budget(&fixtures::heawood(), 3).unwrap_err(),
            AutError::BudgetExceeded { budget: 3 }
        );
    }
}
