//! Permutation groups given by generators, backed by a base and strong
//! generating set (Schreier-Sims).
//!
//! Permutations act on the right: `a.then(&b)` maps `x` to `b(a(x))`.
//!
//! Chains are built with a randomized phase (product-replacement elements
//! sifted into the chain) followed by a deterministic completion that sifts
//! every Schreier generator at every level. The completed chain is exact.

use std::collections::{HashSet, VecDeque};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formats::RawGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("image list is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("group is not transitive")]
    NotTransitive,
    #[error("points do not form a suborbit of {0}")]
    NotASuborbit(usize),
    #[error("orbital of {base} and {target} is not self-paired")]
    NotSelfPaired { base: usize, target: usize },
    #[error("invalid generator document: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(PermError::NotAPermutation(n));
            }
        }
        Ok(Perm { images })
    }

    /// Builds a permutation of degree `n` from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..n).collect();
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= n {
                    return Err(PermError::PointOutOfRange {
                        point: x,
                        degree: n,
                    });
                }
                images[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm {
            images: self.images.iter().map(|&x| other.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn first_moved_point(&self) -> Option<usize> {
        self.images.iter().enumerate().position(|(i, &x)| i != x)
    }
}

/// Orbit of `point` under the group generated by `gens`, sorted.
pub fn orbit(gens: &[Perm], point: usize) -> Result<Vec<usize>, PermError> {
    let n = common_degree(gens)?.unwrap_or(point + 1);
    if point >= n {
        return Err(PermError::PointOutOfRange { point, degree: n });
    }
    let mut orbit = orbit_unsorted(gens, point, n);
    orbit.sort_unstable();
    Ok(orbit)
}

fn orbit_unsorted(gens: &[Perm], point: usize, n: usize) -> Vec<usize> {
    let mut seen = vec![false; n];
    seen[point] = true;
    let mut orbit = vec![point];
    let mut i = 0;
    while i < orbit.len() {
        let x = orbit[i];
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                orbit.push(y);
            }
        }
        i += 1;
    }
    orbit
}

/// Orbits of the generated group on `0..n`, each sorted, ordered by least
/// element.
pub fn orbit_partition(gens: &[Perm], n: usize) -> Result<Vec<Vec<usize>>, PermError> {
    check_degree(gens, n)?;
    let mut block = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if block[start] != usize::MAX {
            continue;
        }
        let mut orb = orbit_unsorted(gens, start, n);
        orb.sort_unstable();
        for &x in &orb {
            block[x] = blocks.len();
        }
        blocks.push(orb);
    }
    Ok(blocks)
}

pub fn is_transitive(gens: &[Perm], n: usize) -> Result<bool, PermError> {
    check_degree(gens, n)?;
    Ok(n <= 1 || orbit_unsorted(gens, 0, n).len() == n)
}

/// No non-identity element fixes a point: every orbit is as long as the
/// group is large.
pub fn is_semiregular(gens: &[Perm]) -> Result<bool, PermError> {
    let Some(n) = common_degree(gens)? else {
        return Ok(true);
    };
    let group = PermGroup::new(n, gens.to_vec())?;
    let order = group.order();
    Ok(orbit_partition(gens, n)?
        .iter()
        .all(|o| BigUint::from(o.len()) == order))
}

fn common_degree(gens: &[Perm]) -> Result<Option<usize>, PermError> {
    let Some(first) = gens.first() else {
        return Ok(None);
    };
    check_degree(gens, first.degree())?;
    Ok(Some(first.degree()))
}

fn check_degree(gens: &[Perm], n: usize) -> Result<(), PermError> {
    match gens.iter().find(|g| g.degree() != n) {
        Some(g) => Err(PermError::DegreeMismatch {
            expected: n,
            found: g.degree(),
        }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone)]
struct Level {
    base: usize,
    gens: Vec<Perm>,
    orbit: Vec<usize>,
    /// `u_x` with `u_x(base) = x`, for orbit points.
    from_base: Vec<Option<Perm>>,
    /// `u_x^{-1}`.
    to_base: Vec<Option<Perm>>,
}

impl Level {
    fn new(base: usize, n: usize) -> Self {
        let mut from_base = vec![None; n];
        let mut to_base = vec![None; n];
        from_base[base] = Some(Perm::identity(n));
        to_base[base] = Some(Perm::identity(n));
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            from_base,
            to_base,
        }
    }

    fn add_gen(&mut self, g: Perm) {
        self.gens.push(g);
        let newest = self.gens.len() - 1;
        let old_len = self.orbit.len();
        let mut i = 0;
        while i < self.orbit.len() {
            let x = self.orbit[i];
            let gens = if i < old_len {
                newest..newest + 1
            } else {
                0..self.gens.len()
            };
            for gi in gens {
                let y = self.gens[gi].apply(x);
                if self.from_base[y].is_none() {
                    let u = self.from_base[x]
                        .as_ref()
                        .expect("orbit point")
                        .then(&self.gens[gi]);
                    self.to_base[y] = Some(u.inverse());
                    self.from_base[y] = Some(u);
                    self.orbit.push(y);
                }
            }
            i += 1;
        }
    }
}

/// A base and strong generating set.
#[derive(Debug, Clone)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    /// Builds a verified chain whose base begins with the distinct points of
    /// `base_prefix`, in order. `seed` drives the randomized phase only.
    pub fn build(degree: usize, gens: &[Perm], base_prefix: &[usize], seed: u64) -> Self {
        let mut chain = StabChain {
            degree,
            levels: Vec::new(),
        };
        for &b in base_prefix {
            if chain.levels.iter().all(|l| l.base != b) {
                chain.levels.push(Level::new(b, degree));
            }
        }
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        for g in &gens {
            let fixed = chain
                .levels
                .iter()
                .take_while(|l| g.apply(l.base) == l.base)
                .count();
            chain.insert(g.clone(), 0, fixed);
        }
        if !gens.is_empty() {
            chain.random_phase(&gens, seed);
        }
        chain.complete();
        chain
    }

    /// Adds `g` (which fixes the bases of levels `< last`) as a strong
    /// generator on levels `first..=last`, opening a new level if needed.
    fn insert(&mut self, g: Perm, first: usize, last: usize) {
        if last == self.levels.len() {
            let b = g.first_moved_point().expect("non-identity");
            self.levels.push(Level::new(b, self.degree));
        }
        for l in first..=last {
            self.levels[l].add_gen(g.clone());
        }
    }

    fn random_phase(&mut self, gens: &[Perm], seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool: Vec<Perm> = gens
            .iter()
            .cycle()
            .take(gens.len().max(10))
            .cloned()
            .collect();
        let mut acc = Perm::identity(self.degree);
        let step = |rng: &mut ChaCha8Rng, pool: &mut Vec<Perm>, acc: &mut Perm| {
            let i = rng.gen_range(0..pool.len());
            let mut j = rng.gen_range(0..pool.len() - 1);
            if j >= i {
                j += 1;
            }
            pool[i] = if rng.gen_bool(0.5) {
                pool[i].then(&pool[j])
            } else {
                pool[j].then(&pool[i])
            };
            *acc = acc.then(&pool[i]);
        };
        for _ in 0..50 {
            step(&mut rng, &mut pool, &mut acc);
        }
        let mut quiet = 0;
        while quiet < 30 {
            step(&mut rng, &mut pool, &mut acc);
            let (residue, depth) = self.sift(&acc, 0);
            if depth == self.levels.len() && residue.is_identity() {
                quiet += 1;
            } else {
                quiet = 0;
                self.insert(residue, 0, depth);
            }
        }
    }

    fn complete(&mut self) {
        let mut i = self.levels.len();
        while i > 0 {
            let lvl = i - 1;
            match self.failing_schreier_generator(lvl) {
                None => i -= 1,
                Some((residue, depth)) => {
                    self.insert(residue, lvl + 1, depth);
                    i = depth + 1;
                }
            }
        }
    }

    fn failing_schreier_generator(&self, lvl: usize) -> Option<(Perm, usize)> {
        let level = &self.levels[lvl];
        for &x in &level.orbit {
            let ux = level.from_base[x].as_ref().expect("orbit point");
            for s in &level.gens {
                let y = s.apply(x);
                let h = ux
                    .then(s)
                    .then(level.to_base[y].as_ref().expect("orbit point"));
                if h.is_identity() {
                    continue;
                }
                let (residue, depth) = self.sift(&h, lvl + 1);
                if depth < self.levels.len() || !residue.is_identity() {
                    return Some((residue, depth));
                }
            }
        }
        None
    }

    /// Sifts `g` from level `start`; returns the residue and the level where
    /// sifting stopped (`levels.len()` if it passed every level).
    pub fn sift(&self, g: &Perm, start: usize) -> (Perm, usize) {
        let mut g = g.clone();
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let x = g.apply(level.base);
            match &level.to_base[x] {
                Some(t) => {
                    if x != level.base {
                        g = g.then(t);
                    }
                }
                None => return (g, i),
            }
        }
        let depth = self.levels.len();
        (g, depth)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn basic_orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn basic_orbit(&self, level: usize) -> &[usize] {
        &self.levels[level].orbit
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (residue, depth) = self.sift(g, 0);
        depth == self.levels.len() && residue.is_identity()
    }

    /// Strong generators of the pointwise stabilizer of the first `k` base
    /// points.
    pub fn stabilizer_generators(&self, k: usize) -> &[Perm] {
        self.levels.get(k).map(|l| l.gens.as_slice()).unwrap_or(&[])
    }

    /// The chain for the pointwise stabilizer of the first `k` base points.
    pub fn tail(&self, k: usize) -> StabChain {
        StabChain {
            degree: self.degree,
            levels: self.levels[k.min(self.levels.len())..].to_vec(),
        }
    }

    /// Order of the pointwise stabilizer of the first `k` base points.
    pub fn stabilizer_order(&self, k: usize) -> BigUint {
        self.levels
            .iter()
            .skip(k)
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Some group element mapping `base(level)` to `x`, if one exists.
    pub fn transversal(&self, level: usize, x: usize) -> Option<&Perm> {
        self.levels[level].from_base[x].as_ref()
    }
}

/// An orbit of the stabilizer of `base_point`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Suborbit {
    pub base_point: usize,
    pub points: Vec<usize>,
}

/// A finitely generated permutation group with a lazily built chain.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    chain: OnceLock<StabChain>,
}

pub const DEFAULT_SEED: u64 = 0x5eed;

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self, PermError> {
        check_degree(&generators, degree)?;
        Ok(PermGroup {
            degree,
            generators,
            chain: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            chain: OnceLock::new(),
        }
    }

    fn with_chain(degree: usize, chain: StabChain, generators: Vec<Perm>) -> Self {
        let group = PermGroup {
            degree,
            generators,
            chain: OnceLock::new(),
        };
        group.chain.set(chain).expect("fresh cell");
        group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn chain(&self) -> &StabChain {
        self.chain
            .get_or_init(|| StabChain::build(self.degree, &self.generators, &[], DEFAULT_SEED))
    }

    pub fn chain_with_base(&self, base_prefix: &[usize], seed: u64) -> StabChain {
        StabChain::build(self.degree, &self.generators, base_prefix, seed)
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    pub fn contains(&self, g: &Perm) -> Result<bool, PermError> {
        if g.degree() != self.degree {
            return Err(PermError::DegreeMismatch {
                expected: self.degree,
                found: g.degree(),
            });
        }
        Ok(self.chain().contains(g))
    }

    fn check_point(&self, v: usize) -> Result<(), PermError> {
        if v >= self.degree {
            return Err(PermError::PointOutOfRange {
                point: v,
                degree: self.degree,
            });
        }
        Ok(())
    }

    pub fn orbit(&self, v: usize) -> Result<Vec<usize>, PermError> {
        self.check_point(v)?;
        let mut o = orbit_unsorted(&self.generators, v, self.degree);
        o.sort_unstable();
        Ok(o)
    }

    pub fn is_transitive(&self) -> bool {
        is_transitive(&self.generators, self.degree).expect("degrees checked at construction")
    }

    // The transversal element of the default chain taking its first base
    // point to `v`, when `v` lies in that orbit.
    fn carrier(&self, v: usize) -> Option<&Perm> {
        let chain = self.chain();
        (!chain.levels.is_empty())
            .then(|| chain.transversal(0, v))
            .flatten()
    }

    /// Some element mapping `v` to `w`.
    pub fn element_mapping(&self, v: usize, w: usize) -> Option<Perm> {
        match (self.carrier(v), self.carrier(w)) {
            (Some(a), Some(b)) => Some(a.inverse().then(b)),
            _ if v == w => Some(Perm::identity(self.degree)),
            _ => self
                .chain_with_base(&[v], DEFAULT_SEED)
                .transversal(0, w)
                .cloned(),
        }
    }

    /// The stabilizer of `v`. Conjugates the first stabilizer of the default
    /// chain when `v` is in its first basic orbit.
    pub fn point_stabilizer(&self, v: usize) -> Result<PermGroup, PermError> {
        self.check_point(v)?;
        if let Some(u) = self.carrier(v) {
            let u_inv = u.inverse();
            let gens = self
                .chain()
                .stabilizer_generators(1)
                .iter()
                .map(|s| u_inv.then(s).then(u))
                .collect();
            return PermGroup::new(self.degree, gens);
        }
        let chain = self.chain_with_base(&[v], DEFAULT_SEED);
        let gens = chain.stabilizer_generators(1).to_vec();
        Ok(PermGroup::with_chain(self.degree, chain.tail(1), gens))
    }

    /// Orbits of the stabilizer of `v`, sorted by (length, least point).
    pub fn suborbits(&self, v: usize) -> Result<Vec<Suborbit>, PermError> {
        self.check_point(v)?;
        if !self.is_transitive() {
            return Err(PermError::NotTransitive);
        }
        let stab = self.point_stabilizer(v)?;
        let mut subs: Vec<Suborbit> = orbit_partition(stab.generators(), self.degree)?
            .into_iter()
            .map(|points| Suborbit {
                base_point: v,
                points,
            })
            .collect();
        subs.sort_by_key(|s| (s.points.len(), s.points[0]));
        Ok(subs)
    }

    /// The undirected orbital graph: the G-orbit of the edge `{v, w}` for
    /// `w` in the suborbit. Rejects orbitals that are not self-paired.
    pub fn orbital_graph(&self, sub: &Suborbit) -> Result<RawGraph, PermError> {
        let v = sub.base_point;
        self.check_point(v)?;
        let &w = sub.points.first().ok_or(PermError::NotASuborbit(v))?;
        let stab = self.point_stabilizer(v)?;
        let mut expected = orbit_unsorted(stab.generators(), w, self.degree);
        expected.sort_unstable();
        if expected != sub.points || sub.points.contains(&v) {
            return Err(PermError::NotASuborbit(v));
        }
        let g = self.element_mapping(v, w).ok_or(PermError::NotTransitive)?;
        // Self-paired iff v^(g^-1) lies in the suborbit whenever v^g = w.
        let back = g.inverse().apply(v);
        if sub.points.binary_search(&back).is_err() {
            return Err(PermError::NotSelfPaired { base: v, target: w });
        }
        let start = (v.min(w), v.max(w));
        let mut seen: HashSet<(usize, usize)> = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some((a, b)) = queue.pop_front() {
            for s in &self.generators {
                let (x, y) = (s.apply(a), s.apply(b));
                let e = (x.min(y), x.max(y));
                if seen.insert(e) {
                    queue.push_back(e);
                }
            }
        }
        let mut edges: Vec<_> = seen.into_iter().collect();
        edges.sort_unstable();
        Ok(RawGraph {
            n: self.degree,
            edges,
        })
    }

    pub fn is_semiregular(&self) -> bool {
        let order = self.order();
        orbit_partition(&self.generators, self.degree)
            .expect("degrees checked at construction")
            .iter()
            .all(|o| BigUint::from(o.len()) == order)
    }

    pub fn to_generator_set(&self) -> GeneratorSet {
        GeneratorSet {
            degree: self.degree,
            generators: self.generators.iter().map(|g| g.images.clone()).collect(),
        }
    }
}

/// Interchange document: `{"degree": n, "generators": [[images...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
}

impl GeneratorSet {
    pub fn into_group(self) -> Result<PermGroup, PermError> {
        let gens = self
            .generators
            .into_iter()
            .map(Perm::from_images)
            .collect::<Result<Vec<_>, _>>()?;
        PermGroup::new(self.degree, gens)
    }

    pub fn from_json(text: &str) -> Result<Self, PermError> {
        serde_json::from_str(text).map_err(|e| PermError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}
