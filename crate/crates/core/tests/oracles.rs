use hexagon_core::autsearch::{automorphisms, brute_force_automorphisms, is_automorphism};
use hexagon_core::ffgeom::build_hexagon;
use hexagon_core::fixtures;
use hexagon_core::formats::{decode_any, Format, RawGraph};
use hexagon_core::graph::Graph;
use hexagon_core::permgrp::{PermGroup, StabChain};
use num_bigint::BigUint;
use proptest::prelude::*;

fn small_fixtures() -> Vec<(&'static str, Graph, u32)> {
    vec![
        ("triangle", fixtures::complete(3), 6),
        ("path", fixtures::path(3), 2),
        ("c4", fixtures::cycle(4), 8),
        ("k4", fixtures::complete(4), 24),
        ("heawood", fixtures::heawood(), 336),
        ("cube", fixtures::cube(), 48),
        ("c6", fixtures::cycle(6), 12),
        ("c12", fixtures::cycle(12), 24),
    ]
}

#[test]
fn search_agrees_with_brute_force() {
    for (name, g, expected) in small_fixtures() {
        let search = automorphisms(&g).unwrap();
        let brute = brute_force_automorphisms(&g).unwrap();
        assert_eq!(search.group_order, brute.group_order, "{name}");
        assert_eq!(search.group_order, BigUint::from(expected), "{name}");
        let group = search.group(g.n());
        for p in &brute.generators {
            assert!(
                group.contains(p).unwrap(),
                "{name}: brute-force automorphism missing"
            );
        }
    }
}

#[test]
fn every_shipped_fixture_round_trips_bit_exactly() {
    let mut graphs: Vec<Graph> = small_fixtures().into_iter().map(|(_, g, _)| g).collect();
    for q in [2, 3] {
        graphs.push(build_hexagon(q).unwrap().incidence_graph().unwrap());
    }
    for g in graphs {
        let raw = RawGraph::from_graph(&g);
        for format in [Format::Graph6, Format::Sparse6, Format::EdgeList] {
            let text = format.encode(&raw).unwrap();
            assert_eq!(Format::detect(&text), format);
            let back = decode_any(&text).unwrap();
            assert_eq!(back.normalized_edges(), raw.normalized_edges());
            assert_eq!(format.encode(&back).unwrap(), text);
        }
    }
}

#[test]
fn large_graph6_header() {
    let g = build_hexagon(3).unwrap().incidence_graph().unwrap();
    let text = Format::Graph6.encode(&RawGraph::from_graph(&g)).unwrap();
    assert_eq!(&text.as_bytes()[..4], &[126, 63, 63 + 11, 63 + 24]);
    assert_eq!(text.trim_end().len(), 4 + (728 * 727 / 2usize).div_ceil(6));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn order_is_invariant_under_relabeling(perm in Just((0..14).collect::<Vec<usize>>()).prop_shuffle()) {
        let g = fixtures::heawood().relabel(&perm);
        let res = automorphisms(&g).unwrap();
        prop_assert_eq!(res.group_order, BigUint::from(336u32));
        prop_assert!(res.generators.iter().all(|p| is_automorphism(&g, p)));
    }

    #[test]
    fn q2_chain_is_seed_independent(seed in any::<u64>(), start in 0usize..126) {
        let g = build_hexagon(2).unwrap().incidence_graph().unwrap();
        let res = automorphisms(&g).unwrap();
        let chain = StabChain::build(126, &res.generators, &[start], seed);
        prop_assert_eq!(chain.order(), BigUint::from(12_096u32));
        let group = PermGroup::new(126, res.generators.clone()).unwrap();
        prop_assert_eq!(group.orbit(start).unwrap().len(), 63);
    }
}
