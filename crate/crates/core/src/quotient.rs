//! Quotients by vertex partitions and covering-map verification.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::autsearch::is_automorphism;
use crate::graph::{Graph, GraphError};
use crate::permgrp::{PermError, PermGroup};

pub use crate::permgrp::orbit_partition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error("blocks do not partition the vertex set: {0}")]
    NotAPartition(String),
    #[error("edge {u}-{v} lies inside block {block}")]
    IntraBlockEdge { u: usize, v: usize, block: usize },
    #[error("quotient collapses to {blocks} block(s)")]
    Degenerate { blocks: usize },
    #[error("quotient has {blocks} blocks, at least 3 are required")]
    TooFewBlocks { blocks: usize },
    #[error("group degree {group} does not match graph order {graph}")]
    DegreeMismatch { group: usize, graph: usize },
    #[error("generator {0} is not an automorphism of the graph")]
    NotAnAutomorphism(usize),
    #[error("group is not semiregular")]
    NotSemiregular,
    #[error("quotient map fails to be a cover at vertex {}", .0.vertex)]
    NotACover(CoverViolation),
    #[error("quotient valency {quotient:?} differs from graph valency {graph:?}")]
    ValencyChanged {
        graph: Option<usize>,
        quotient: Option<usize>,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuotientResult {
    #[serde(skip)]
    pub quotient: Graph,
    pub block_of: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

impl QuotientResult {
    pub fn block_size(&self) -> Option<usize> {
        let size = self.blocks.first()?.len();
        self.blocks.iter().all(|b| b.len() == size).then_some(size)
    }
}

/// How the neighbours of `vertex` land on the quotient neighbours of its
/// block. `hits` lists every quotient neighbour with its preimage count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverViolation {
    pub vertex: usize,
    pub block: usize,
    pub hits: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverVerdict {
    pub is_cover: bool,
    pub violation: Option<CoverViolation>,
}

pub fn quotient_graph(g: &Graph, blocks: &[Vec<usize>]) -> Result<QuotientResult, QuotientError> {
    let n = g.n();
    let mut block_of = vec![usize::MAX; n];
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(QuotientError::NotAPartition(format!("block {b} is empty")));
        }
        for &v in block {
            if v >= n {
                return Err(QuotientError::NotAPartition(format!(
                    "vertex {v} out of range"
                )));
            }
            if block_of[v] != usize::MAX {
                return Err(QuotientError::NotAPartition(format!(
                    "vertex {v} appears twice"
                )));
            }
            block_of[v] = b;
        }
    }
    if let Some(v) = block_of.iter().position(|&b| b == usize::MAX) {
        return Err(QuotientError::NotAPartition(format!(
            "vertex {v} is uncovered"
        )));
    }
    if blocks.len() <= 1 {
        return Err(QuotientError::Degenerate {
            blocks: blocks.len(),
        });
    }
    let mut edges = Vec::new();
    for (u, v) in g.edges() {
        let (a, b) = (block_of[u], block_of[v]);
        if a == b {
            return Err(QuotientError::IntraBlockEdge { u, v, block: a });
        }
        edges.push((a.min(b), a.max(b)));
    }
    edges.sort_unstable();
    edges.dedup();
    let quotient = Graph::from_edges(blocks.len(), edges)?;
    let mut blocks: Vec<Vec<usize>> = blocks.to_vec();
    blocks.iter_mut().for_each(|b| b.sort_unstable());
    Ok(QuotientResult {
        quotient,
        block_of,
        blocks,
    })
}

/// Checks that the block map is a bijection from each vertex neighbourhood
/// onto the neighbourhood of its block.
pub fn is_cover(g: &Graph, q: &QuotientResult) -> CoverVerdict {
    for v in 0..g.n() {
        let block = q.block_of[v];
        let mut hits: BTreeMap<usize, usize> = q
            .quotient
            .neighbors(block)
            .iter()
            .map(|&b| (b, 0))
            .collect();
        for &w in g.neighbors(v) {
            *hits.entry(q.block_of[w]).or_default() += 1;
        }
        if hits.values().any(|&c| c != 1) {
            return CoverVerdict {
                is_cover: false,
                violation: Some(CoverViolation {
                    vertex: v,
                    block,
                    hits: hits.into_iter().collect(),
                }),
            };
        }
    }
    CoverVerdict {
        is_cover: true,
        violation: None,
    }
}

/// Quotient by the orbits of a semiregular group of automorphisms, which
/// must be a cover with the valency preserved.
pub fn semiregular_quotient(g: &Graph, group: &PermGroup) -> Result<QuotientResult, QuotientError> {
    if group.degree() != g.n() {
        return Err(QuotientError::DegreeMismatch {
            group: group.degree(),
            graph: g.n(),
        });
    }
    if let Some(i) = group
        .generators()
        .iter()
        .position(|p| !is_automorphism(g, p))
    {
        return Err(QuotientError::NotAnAutomorphism(i));
    }
    if !group.is_semiregular() {
        return Err(QuotientError::NotSemiregular);
    }
    let blocks = orbit_partition(group.generators(), g.n())?;
    if blocks.len() < 3 {
        return Err(QuotientError::TooFewBlocks {
            blocks: blocks.len(),
        });
    }
    let q = quotient_graph(g, &blocks)?;
    if let Some(violation) = is_cover(g, &q).violation {
        return Err(QuotientError::NotACover(violation));
    }
    if q.quotient.valency() != g.valency() {
        return Err(QuotientError::ValencyChanged {
            graph: g.valency(),
            quotient: q.quotient.valency(),
        });
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::permgrp::Perm;

    // The unique vertex at maximal distance, for graphs where it exists.
    fn antipodal(g: &Graph) -> PermGroup {
        let d = g.diameter();
        let images = (0..g.n())
            .map(|v| {
                let layers = g.bfs_layers(v).layers;
                assert_eq!(layers[d].len(), 1);
                layers[d][0]
            })
            .collect();
        PermGroup::new(g.n(), vec![Perm::from_images(images).unwrap()]).unwrap()
    }

    fn quotient_by(g: &Graph, group: &PermGroup) -> QuotientResult {
        quotient_graph(g, &orbit_partition(group.generators(), g.n()).unwrap()).unwrap()
    }

    #[test]
    fn orbit_partition_examples() {
        let p = Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap();
        assert_eq!(
            orbit_partition(&[p], 4).unwrap(),
            vec![vec![0, 1], vec![2, 3]]
        );
        assert_eq!(
            orbit_partition(&[], 3).unwrap(),
            vec![vec![0], vec![1], vec![2]]
        );
        let wrong = Perm::identity(5);
        assert!(orbit_partition(&[wrong], 4).is_err());
    }

    #[test]
    fn antipodal_quotients() {
        let c12 = fixtures::cycle(12);
        let q = semiregular_quotient(&c12, &antipodal(&c12)).unwrap();
        assert_eq!((q.quotient.n(), q.quotient.valency()), (6, Some(2)));
        assert_eq!(q.quotient.girth(), Some(6));

        let c6 = fixtures::cycle(6);
        let q = quotient_by(&c6, &antipodal(&c6));
        assert_eq!((q.quotient.n(), q.quotient.edge_count()), (3, 3));
        assert!(is_cover(&c6, &q).is_cover);

        let cube = fixtures::cube();
        let q = semiregular_quotient(&cube, &antipodal(&cube)).unwrap();
        assert_eq!(q.quotient.n(), 4);
        assert_eq!(q.quotient.edge_count(), 6);
        assert_eq!(q.block_size(), Some(2));
    }

    #[test]
    fn four_cycle_is_not_a_cover_of_k2() {
        let c4 = fixtures::cycle(4);
        let group = antipodal(&c4);
        let q = quotient_by(&c4, &group);
        assert_eq!((q.quotient.n(), q.quotient.edge_count()), (2, 1));
        let verdict = is_cover(&c4, &q);
        assert!(!verdict.is_cover);
        let violation = verdict.violation.unwrap();
        assert_eq!(violation.vertex, 0);
        assert_eq!(violation.hits, vec![(1, 2)]);
        assert_eq!(
            semiregular_quotient(&c4, &group),
            Err(QuotientError::TooFewBlocks { blocks: 2 })
        );
    }

    #[test]
    fn rejected_inputs() {
        let c6 = fixtures::cycle(6);
        assert_eq!(
            quotient_graph(&c6, &[(0..6).collect()]),
            Err(QuotientError::Degenerate { blocks: 1 })
        );
        assert_eq!(
            quotient_graph(&c6, &[vec![0, 1, 3], vec![2, 4, 5]]),
            Err(QuotientError::IntraBlockEdge {
                u: 0,
                v: 1,
                block: 0
            })
        );
        assert!(matches!(
            quotient_graph(&c6, &[vec![0, 1], vec![2, 3]]),
            Err(QuotientError::NotAPartition(_))
        ));
        let reflection = Perm::from_images(vec![0, 5, 4, 3, 2, 1]).unwrap();
        let fixed = PermGroup::new(6, vec![reflection]).unwrap();
        assert_eq!(
            semiregular_quotient(&c6, &fixed),
            Err(QuotientError::NotSemiregular)
        );
        let swap = PermGroup::new(6, vec![Perm::from_cycles(6, &[&[0, 2]]).unwrap()]).unwrap();
        assert_eq!(
            semiregular_quotient(&c6, &swap),
            Err(QuotientError::NotAnAutomorphism(0))
        );
    }

    #[test]
    fn covers_preserve_degree_and_bound_girth() {
        for g in [fixtures::cycle(12), fixtures::cube(), fixtures::cycle(6)] {
            let group = antipodal(&g);
            let q = quotient_by(&g, &group);
            assert_eq!(g.n(), q.block_size().unwrap() * q.quotient.n());
            if is_cover(&g, &q).is_cover {
                for v in 0..g.n() {
                    assert_eq!(g.degree(v), q.quotient.degree(q.block_of[v]));
                }
                assert!(g.girth() >= q.quotient.girth());
            }
        }
    }

    #[test]
    fn quotient_commutes_with_relabeling() {
        let g = fixtures::cube();
        let blocks = orbit_partition(antipodal(&g).generators(), g.n()).unwrap();
        let q = quotient_graph(&g, &blocks).unwrap();
        let sigma = [3, 6, 0, 7, 1, 5, 2, 4];
        let relabeled: Vec<Vec<usize>> = blocks
            .iter()
            .map(|b| b.iter().map(|&v| sigma[v]).collect())
            .collect();
        let q2 = quotient_graph(&g.relabel(&sigma), &relabeled).unwrap();
        assert_eq!(q.quotient, q2.quotient);
        for (v, &s) in sigma.iter().enumerate() {
            assert_eq!(q.block_of[v], q2.block_of[s]);
        }
    }
}
