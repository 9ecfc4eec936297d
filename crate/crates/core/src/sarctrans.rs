//! s-arcs and s-arc-transitivity.
//!
//! An s-arc is a walk `v0 .. vs` with consecutive vertices adjacent and no
//! immediate reversal (`v[i-1] != v[i+1]`); longer-range revisits are
//! allowed. Transitivity is decided one step at a time: a vertex-transitive
//! group is transitive on i-arcs iff it is transitive on (i-1)-arcs and the
//! pointwise stabilizer of one fixed (i-1)-arc is transitive on that arc's
//! extensions. Stabilizers come from a single chain whose base starts along
//! a fixed greedy arc.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::autsearch::is_automorphism;
use crate::graph::Graph;
use crate::permgrp::{Perm, PermGroup, StabChain, DEFAULT_SEED};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SArcError {
    #[error("s must be at least 1")]
    ZeroLength,
    #[error("group degree {group} does not match graph order {graph}")]
    DegreeMismatch { group: usize, graph: usize },
    #[error("generator {0} is not an automorphism of the graph")]
    NotAnAutomorphism(usize),
    #[error("group is not transitive on arcs")]
    NotArcTransitive,
    #[error("valency {0} graph is s-arc-transitive for every s")]
    Unbounded(usize),
    #[error("s = {0} does not occur for tetravalent (G,s)-transitive graphs")]
    OutsideTable(usize),
    #[error("not an s-arc: {0}")]
    InvalidArc(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SArc(Vec<usize>);

impl SArc {
    pub fn new(g: &Graph, vertices: Vec<usize>) -> Result<Self, SArcError> {
        if vertices.len() < 2 {
            return Err(SArcError::InvalidArc("needs at least two vertices".into()));
        }
        if let Some(&v) = vertices.iter().find(|&&v| v >= g.n()) {
            return Err(SArcError::InvalidArc(format!("vertex {v} out of range")));
        }
        if let Some(w) = vertices.windows(2).find(|w| !g.is_adjacent(w[0], w[1])) {
            return Err(SArcError::InvalidArc(format!(
                "{} and {} are not adjacent",
                w[0], w[1]
            )));
        }
        if let Some(w) = vertices.windows(3).find(|w| w[0] == w[2]) {
            return Err(SArcError::InvalidArc(format!("backtracks at {}", w[1])));
        }
        Ok(SArc(vertices))
    }

    /// The `s` of this s-arc.
    pub fn length(&self) -> usize {
        self.0.len() - 1
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }
}

/// Number of s-arcs, by dynamic programming over the last arc.
pub fn count_s_arcs(g: &Graph, s: usize) -> Result<u128, SArcError> {
    if s == 0 {
        return Err(SArcError::ZeroLength);
    }
    // Directed arcs u -> v indexed by (u, position of v in u's list).
    let n = g.n();
    let offsets: Vec<usize> = std::iter::once(0)
        .chain((0..n).scan(0, |acc, u| {
            *acc += g.degree(u);
            Some(*acc)
        }))
        .collect();
    let arc_index = |u: usize, v: usize| -> usize {
        offsets[u] + g.neighbors(u).binary_search(&v).expect("adjacent")
    };
    let mut ways = vec![1u128; offsets[n]];
    for _ in 1..s {
        let mut next = vec![0u128; offsets[n]];
        for u in 0..n {
            for (i, &v) in g.neighbors(u).iter().enumerate() {
                let w = ways[offsets[u] + i];
                if w == 0 {
                    continue;
                }
                for &x in g.neighbors(v) {
                    if x != u {
                        next[arc_index(v, x)] += w;
                    }
                }
            }
        }
        ways = next;
    }
    Ok(ways.iter().sum())
}

/// `n * k * (k-1)^(s-1)`, the s-arc count of a connected k-regular graph.
pub fn regular_s_arc_count(n: usize, k: usize, s: usize) -> u128 {
    assert!(s >= 1);
    n as u128 * k as u128 * (k.saturating_sub(1) as u128).pow(s as u32 - 1)
}

fn check_group(g: &Graph, group: &PermGroup) -> Result<(), SArcError> {
    if group.degree() != g.n() {
        return Err(SArcError::DegreeMismatch {
            group: group.degree(),
            graph: g.n(),
        });
    }
    match group
        .generators()
        .iter()
        .position(|p| !is_automorphism(g, p))
    {
        Some(i) => Err(SArcError::NotAnAutomorphism(i)),
        None => Ok(()),
    }
}

/// A fixed greedy arc from vertex 0 and a stabilizer chain along it.
pub struct ArcTower<'a> {
    g: &'a Graph,
    arc: Vec<usize>,
    chain: StabChain,
    transitive: bool,
}

impl<'a> ArcTower<'a> {
    /// Follows the smallest non-reversing neighbor from vertex 0 for
    /// `length` steps.
    pub fn new(g: &'a Graph, group: &PermGroup, length: usize) -> Result<Self, SArcError> {
        check_group(g, group)?;
        let mut arc = vec![0];
        while arc.len() <= length {
            let last = arc[arc.len() - 1];
            let prev = (arc.len() >= 2).then(|| arc[arc.len() - 2]);
            match g.neighbors(last).iter().find(|&&x| Some(x) != prev) {
                Some(&x) => arc.push(x),
                None => break,
            }
        }
        let chain = group.chain_with_base(&arc, DEFAULT_SEED);
        Ok(ArcTower {
            g,
            arc,
            chain,
            transitive: group.is_transitive(),
        })
    }

    pub fn arc(&self) -> &[usize] {
        &self.arc
    }

    pub fn chain(&self) -> &StabChain {
        &self.chain
    }

    // Number of chain levels whose bases are the first `len` arc vertices.
    fn levels_for(&self, len: usize) -> usize {
        let mut seen = HashSet::new();
        self.arc[..len].iter().filter(|&&v| seen.insert(v)).count()
    }

    /// Whether the stabilizer of the fixed (i-1)-arc is transitive on its
    /// extensions to i-arcs.
    pub fn extends_transitively(&self, i: usize) -> bool {
        assert!(i >= 1);
        if i > self.arc.len() {
            // The greedy walk got stuck earlier, so there are no i-arcs.
            return true;
        }
        let prefix = &self.arc[..i];
        let last = prefix[i - 1];
        let prev = (i >= 2).then(|| prefix[i - 2]);
        let ext: Vec<usize> = self
            .g
            .neighbors(last)
            .iter()
            .copied()
            .filter(|&x| Some(x) != prev)
            .collect();
        let Some(&first) = ext.first() else {
            return true;
        };
        let gens = self.chain.stabilizer_generators(self.levels_for(i));
        let orbit = crate::permgrp::orbit(gens, first).unwrap_or_else(|_| vec![first]);
        ext.iter().all(|x| orbit.binary_search(x).is_ok())
    }

    /// Transitive on s-arcs, checked level by level.
    pub fn is_s_arc_transitive(&self, s: usize) -> bool {
        self.transitive && (1..=s).all(|i| self.extends_transitively(i))
    }

    /// Order of the pointwise stabilizer of the fixed s-arc.
    pub fn arc_stabilizer_order(&self, s: usize) -> BigUint {
        self.chain
            .stabilizer_order(self.levels_for((s + 1).min(self.arc.len())))
    }
}

pub fn is_s_arc_transitive(g: &Graph, group: &PermGroup, s: usize) -> Result<bool, SArcError> {
    if s == 0 {
        return Err(SArcError::ZeroLength);
    }
    Ok(ArcTower::new(g, group, s)?.is_s_arc_transitive(s))
}

/// The largest s with the group transitive on s-arcs.
pub fn transitivity_degree(g: &Graph, group: &PermGroup) -> Result<usize, SArcError> {
    let tower = ArcTower::new(g, group, 1)?;
    if !tower.is_s_arc_transitive(1) {
        return Err(SArcError::NotArcTransitive);
    }
    let k = g.valency().ok_or(SArcError::NotArcTransitive)?;
    if k <= 2 {
        return Err(SArcError::Unbounded(k));
    }
    // Transitivity on s-arcs needs n*k*(k-1)^(s-1) <= |G|.
    let order = group.order();
    let mut bound = 1;
    while BigUint::from(regular_s_arc_count(g.n(), k, bound + 1)) <= order {
        bound += 1;
    }
    let tower = ArcTower::new(g, group, bound + 1)?;
    let s = (1..=bound + 1)
        .take_while(|&i| tower.extends_transitively(i))
        .last()
        .unwrap_or(0);
    Ok(s)
}

/// Size of the orbit of an s-arc, by breadth-first closure over the
/// generators. Materializes the orbit; meant for small s.
pub fn s_arc_orbit_size(group: &PermGroup, arc: &SArc) -> usize {
    let start = arc.vertices().to_vec();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        for p in group.generators() {
            let b: Vec<usize> = a.iter().map(|&x| p.apply(x)).collect();
            if seen.insert(b.clone()) {
                queue.push_back(b);
            }
        }
    }
    seen.len()
}

/// Permitted vertex-stabilizer orders of a tetravalent (G,s)-transitive
/// graph, keyed by s.
pub const TETRAVALENT_STABILIZER_ORDERS: [(usize, &[u64]); 4] = [
    (2, &[12, 24]),
    (3, &[36, 72, 144]),
    (4, &[432]),
    (7, &[11664]),
];

pub fn stabilizer_table_check(s: usize, stabilizer_order: &BigUint) -> Result<bool, SArcError> {
    let (_, orders) = TETRAVALENT_STABILIZER_ORDERS
        .iter()
        .find(|(t, _)| *t == s)
        .ok_or(SArcError::OutsideTable(s))?;
    Ok(stabilizer_order
        .to_u64()
        .is_some_and(|o| orders.contains(&o)))
}

/// `|G| / #s-arcs` when that is an integer, which any s-arc-transitive
/// group requires.
pub fn orbit_stabilizer_quotient(group_order: &BigUint, arcs: u128) -> Option<BigUint> {
    let arcs = BigUint::from(arcs);
    if arcs.is_zero() || !(group_order % &arcs).is_zero() {
        return None;
    }
    Some(group_order / arcs)
}

/// Every s-arc, by depth-first enumeration. Test oracle.
pub fn enumerate_s_arcs(g: &Graph, s: usize) -> Vec<Vec<usize>> {
    fn go(g: &Graph, s: usize, walk: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if walk.len() == s + 1 {
            out.push(walk.clone());
            return;
        }
        let last = walk[walk.len() - 1];
        let prev = (walk.len() >= 2).then(|| walk[walk.len() - 2]);
        for &x in g.neighbors(last) {
            if Some(x) != prev {
                walk.push(x);
                go(g, s, walk, out);
                walk.pop();
            }
        }
    }
    let mut out = Vec::new();
    for v in 0..g.n() {
        go(g, s, &mut vec![v], &mut out);
    }
    out
}

/// Helper for fixtures: the dihedral group of the n-cycle `0-1-...-(n-1)`.
pub fn dihedral_group(n: usize) -> PermGroup {
    let rotation = Perm::from_images((0..n).map(|i| (i + 1) % n).collect()).expect("rotation");
    let reflection = Perm::from_images((0..n).map(|i| (n - i) % n).collect()).expect("reflection");
    PermGroup::new(n, vec![rotation, reflection]).expect("same degree")
}
