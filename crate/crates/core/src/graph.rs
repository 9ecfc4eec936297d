//! Immutable simple graphs and distance combinatorics: BFS layers, girth,
//! diameter, bipartition and intersection arrays.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("edge endpoint {vertex} out of range for {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("loop at vertex {vertex}")]
    Loop { vertex: usize },
    #[error("duplicate edge {u}-{v}")]
    DuplicateEdge { u: usize, v: usize },
    #[error("graph is disconnected: {reached} of {n} vertices reachable from 0")]
    Disconnected { reached: usize, n: usize },
}

/// A finite, simple, connected, undirected graph on vertices `0..n`.
///
/// Neighbor lists are sorted, so adjacency tests are binary searches and
/// iteration order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut adj = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (u, v) in edges {
            for vertex in [u, v] {
                if vertex >= n {
                    return Err(GraphError::OutOfRange { vertex, n });
                }
            }
            if u == v {
                return Err(GraphError::Loop { vertex: u });
            }
            adj[u].push(v);
            adj[v].push(u);
            edge_count += 1;
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge {
                    u: u.min(w[0]),
                    v: u.max(w[0]),
                });
            }
        }
        let g = Graph { adj, edge_count };
        let reached = g.bfs_layers(0).dist.iter().filter(|d| d.is_some()).count();
        if reached != n {
            return Err(GraphError::Disconnected { reached, n });
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// The common degree, or `None` if the graph is irregular.
    pub fn valency(&self) -> Option<usize> {
        let k = self.degree(0);
        self.adj.iter().all(|l| l.len() == k).then_some(k)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n(), "relabeling must cover every vertex");
        let mut adj = vec![Vec::new(); self.n()];
        for (u, list) in self.adj.iter().enumerate() {
            adj[perm[u]] = list.iter().map(|&v| perm[v]).collect();
            adj[perm[u]].sort_unstable();
        }
        Graph {
            adj,
            edge_count: self.edge_count,
        }
    }

    pub fn bfs_layers(&self, root: usize) -> DistanceData {
        let n = self.n();
        let mut dist = vec![None; n];
        let mut layers: Vec<Vec<usize>> = vec![vec![root]];
        dist[root] = Some(0);
        loop {
            let depth = layers.len();
            let mut next = Vec::new();
            for &u in &layers[depth - 1] {
                for &w in &self.adj[u] {
                    if dist[w].is_none() {
                        dist[w] = Some(depth);
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_unstable();
            layers.push(next);
        }
        let kappa = layers.iter().map(Vec::len).collect();
        DistanceData {
            root,
            layers,
            dist,
            kappa,
        }
    }

    /// Length of a shortest cycle, or `None` for a tree.
    pub fn girth(&self) -> Option<usize> {
        let n = self.n();
        let mut best = usize::MAX;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for root in 0..n {
            dist.fill(usize::MAX);
            dist[root] = 0;
            queue.clear();
            queue.push_back(root);
            'bfs: while let Some(u) = queue.pop_front() {
                // Any cycle found from here on is at least 2*dist[u]+1 long.
                if 2 * dist[u] + 1 >= best {
                    break;
                }
                for &w in &self.adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if parent[u] != w {
                        best = best.min(dist[u] + dist[w] + 1);
                        if dist[w] == dist[u] {
                            break 'bfs;
                        }
                    }
                }
            }
        }
        (best != usize::MAX).then_some(best)
    }

    pub fn eccentricity(&self, v: usize) -> usize {
        self.bfs_layers(v).kappa.len() - 1
    }

    pub fn diameter(&self) -> usize {
        (0..self.n())
            .map(|v| self.eccentricity(v))
            .max()
            .unwrap_or(0)
    }

    pub fn bipartition(&self) -> Bipartition {
        let n = self.n();
        let data = self.bfs_layers(0);
        let dist: Vec<usize> = data.dist.iter().map(|d| d.expect("connected")).collect();
        for (u, v) in self.edges() {
            if dist[u] == dist[v] {
                return Bipartition::OddCycle(self.odd_cycle_through(u, v, &dist));
            }
        }
        let color: Vec<u8> = dist.iter().map(|d| (d % 2) as u8).collect();
        let ones = color.iter().filter(|&&c| c == 1).count();
        Bipartition::Bipartite {
            color,
            part_sizes: [n - ones, ones],
        }
    }

    pub fn is_bipartite(&self) -> bool {
        matches!(self.bipartition(), Bipartition::Bipartite { .. })
    }

    // Walks both BFS-tree paths from the same-level edge u-v up to their
    // lowest common ancestor.
    fn odd_cycle_through(&self, u: usize, v: usize, dist: &[usize]) -> Vec<usize> {
        let parent = |x: usize| -> usize {
            *self.adj[x]
                .iter()
                .find(|&&w| dist[w] + 1 == dist[x])
                .expect("non-root vertex has a BFS parent")
        };
        let (mut a, mut b) = (u, v);
        let mut left = vec![a];
        let mut right = vec![b];
        while a != b {
            a = parent(a);
            b = parent(b);
            left.push(a);
            right.push(b);
        }
        right.pop();
        right.reverse();
        left.extend(right);
        left
    }

    /// Computes the intersection array from vertex 0 and checks that every
    /// vertex, seen from every root, reproduces it.
    pub fn intersection_array(&self) -> Result<IntersectionArray, DistanceRegularityError> {
        let k = self.valency().ok_or(DistanceRegularityError::NotRegular)?;
        let reference = self.bfs_layers(0);
        let d = reference.kappa.len() - 1;
        let mut c = vec![0; d + 1];
        let mut a = vec![0; d + 1];
        let mut b = vec![0; d + 1];
        let mut seen = vec![false; d + 1];
        for root in 0..self.n() {
            let data = if root == 0 {
                reference.clone()
            } else {
                self.bfs_layers(root)
            };
            // A root with a different eccentricity shows up as a profile
            // mismatch in its last common layer, before any index overflows.
            for (i, layer) in data.layers.iter().enumerate() {
                for &x in layer {
                    let counts = data.neighbor_profile(self, x);
                    if !seen[i] {
                        (c[i], a[i], b[i]) = counts;
                        seen[i] = true;
                    } else if counts != (c[i], a[i], b[i]) {
                        return Err(DistanceRegularityError::Inconsistent {
                            root,
                            vertex: x,
                            distance: i,
                        });
                    }
                }
            }
        }
        debug_assert!(c[1..]
            .iter()
            .zip(&a[1..])
            .zip(&b[1..])
            .all(|((c, a), b)| c + a + b == k));
        Ok(IntersectionArray {
            diameter: d,
            valency: k,
            b: b[..d].to_vec(),
            c: c[1..].to_vec(),
            a: a[1..].to_vec(),
            kappa: reference.kappa,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bipartition {
    Bipartite {
        color: Vec<u8>,
        part_sizes: [usize; 2],
    },
    /// A closed walk of odd length; consecutive entries (and last, first) adjacent.
    OddCycle(Vec<usize>),
}

/// Breadth-first distance layers from a root vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceData {
    pub root: usize,
    pub layers: Vec<Vec<usize>>,
    pub dist: Vec<Option<usize>>,
    pub kappa: Vec<usize>,
}

impl DistanceData {
    /// Number of neighbors of `x` at distance one less, equal, one more
    /// from the root.
    pub fn neighbor_profile(&self, g: &Graph, x: usize) -> (usize, usize, usize) {
        let dx = self.dist[x].expect("vertex reachable");
        let mut counts = (0, 0, 0);
        for &y in g.neighbors(x) {
            match self.dist[y].expect("vertex reachable") {
                dy if dy + 1 == dx => counts.0 += 1,
                dy if dy == dx => counts.1 += 1,
                _ => counts.2 += 1,
            }
        }
        counts
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum DistanceRegularityError {
    #[error("graph is not regular")]
    NotRegular,
    #[error("not distance-regular: vertex {vertex} at distance {distance} from root {root} has a different profile")]
    Inconsistent {
        root: usize,
        vertex: usize,
        distance: usize,
    },
}

/// Intersection array `{b_0..b_{d-1}; c_1..c_d}` of a distance-regular graph
/// together with `a_1..a_d` and the layer sizes `kappa_0..kappa_d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IntersectionArray {
    pub diameter: usize,
    pub valency: usize,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    pub a: Vec<usize>,
    pub kappa: Vec<usize>,
}

impl IntersectionArray {
    /// `kappa[i-1] * b[i-1] == kappa[i] * c[i]` for `1 <= i <= d`; both
    /// sides count the edges between consecutive distance layers.
    pub fn check_counting_identity(&self) -> bool {
        let d = self.diameter;
        if self.b.len() != d || self.c.len() != d || self.kappa.len() != d + 1 {
            return false;
        }
        (1..=d).all(|i| self.kappa[i - 1] * self.b[i - 1] == self.kappa[i] * self.c[i - 1])
    }
}
