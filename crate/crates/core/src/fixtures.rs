//! Small reference graphs used by tests, the acceptance runner and the CLI.

use crate::formats::decode_edgelist;
use crate::graph::Graph;

const HEAWOOD: &str = include_str!("../fixtures/heawood.edges");
const CUBE: &str = include_str!("../fixtures/cube.edges");
const K4: &str = include_str!("../fixtures/k4.edges");
const C6: &str = include_str!("../fixtures/c6.edges");
const C12: &str = include_str!("../fixtures/c12.edges");

fn shipped(text: &str) -> Graph {
    decode_edgelist(text)
        .expect("shipped fixture parses")
        .into_graph()
        .expect("shipped fixture is a valid graph")
}

/// Incidence graph of the Fano plane (14 vertices, cubic, girth 6).
pub fn heawood() -> Graph {
    shipped(HEAWOOD)
}

pub fn cube() -> Graph {
    shipped(CUBE)
}

/// Shipped fixtures by name, as stored in the repository.
pub fn by_name(name: &str) -> Option<Graph> {
    Some(match name {
        "heawood" => shipped(HEAWOOD),
        "cube" => shipped(CUBE),
        "k4" => shipped(K4),
        "c6" => shipped(C6),
        "c12" => shipped(C12),
        _ => return None,
    })
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle")
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path")
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("complete")
}
