//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Numbers tied to the hexagon graphs come from the bundled manifest
//! (`crates/core/data/expected.json`); small-group orders come from the
//! brute-force oracle or are stated inline where they are classical.

use std::collections::{BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use hexagon_core::autsearch::{
    automorphisms, brute_force_automorphisms, is_automorphism, AutResult,
};
use hexagon_core::fixtures;
use hexagon_core::formats::{decode_any, Format, RawGraph};
use hexagon_core::graph::{Bipartition, Graph};
use hexagon_core::permgrp::{Perm, PermGroup, StabChain};
use hexagon_core::quotient::{is_cover, orbit_partition, quotient_graph, semiregular_quotient};
use hexagon_core::report::Manifest;
use hexagon_core::sarctrans::{
    count_s_arcs, is_s_arc_transitive, stabilizer_table_check, transitivity_degree, ArcTower,
};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    cond.then_some(()).ok_or_else(|| msg.into())
}

fn manifest() -> &'static Manifest {
    static M: OnceLock<Manifest> = OnceLock::new();
    M.get_or_init(Manifest::builtin)
}

fn expected(graph: &str, field: &str) -> Value {
    manifest().graphs[graph].fields[field].value.clone()
}

fn expected_u64(graph: &str, field: &str) -> u64 {
    expected(graph, field)
        .as_u64()
        .expect("integer expectation")
}

fn expected_list(graph: &str, field: &str) -> Vec<usize> {
    serde_json::from_value(expected(graph, field)).expect("integer list")
}

fn construct_via_cli(q: u32, format: &str) -> Result<(Graph, String), String> {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let path = dir.path().join("graph");
    let out = Command::new(env!("CARGO_BIN_EXE_hexagon"))
        .args([
            "construct",
            "--q",
            &q.to_string(),
            "--format",
            format,
            "--out",
        ])
        .arg(&path)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), String::from_utf8_lossy(&out.stderr))?;
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let g = decode_any(&text)
        .map_err(|e| e.to_string())?
        .into_graph()
        .map_err(|e| format!("not a connected simple graph: {e}"))?;
    Ok((g, text))
}

fn gamma7() -> &'static Graph {
    static G: OnceLock<Graph> = OnceLock::new();
    G.get_or_init(|| construct_via_cli(3, "sparse6").expect("construction").0)
}

fn gamma7_aut() -> &'static AutResult {
    static A: OnceLock<AutResult> = OnceLock::new();
    A.get_or_init(|| automorphisms(gamma7()).expect("search within budget"))
}

fn c1_construction() -> Check {
    let (g, _) = construct_via_cli(3, "sparse6")?;
    let (n, m) = (
        expected_u64("q3", "order") as usize,
        expected_u64("q3", "edges") as usize,
    );
    ensure(g.n() == n, format!("{} vertices", g.n()))?;
    ensure(g.edge_count() == m, format!("{} edges", g.edge_count()))?;
    ensure(g.valency() == Some(4), "not 4-regular")?;
    let parts = match g.bipartition() {
        Bipartition::Bipartite { part_sizes, .. } => part_sizes,
        Bipartition::OddCycle(c) => return Err(format!("odd cycle {c:?}")),
    };
    ensure(
        parts.to_vec() == expected_list("q3", "partSizes"),
        format!("parts {parts:?}"),
    )?;
    Ok(format!("n={n} m={m} 4-regular parts={parts:?}"))
}

fn c2_distances() -> Check {
    let g = gamma7();
    let girth = g.girth();
    let diameter = g.diameter();
    ensure(
        girth == Some(expected_u64("q3", "girth") as usize),
        format!("girth {girth:?}"),
    )?;
    ensure(
        diameter == expected_u64("q3", "diameter") as usize,
        format!("diameter {diameter}"),
    )?;
    let kappa = expected_list("q3", "kappa");
    if let Some(v) = (0..g.n()).find(|&v| g.bfs_layers(v).kappa != kappa) {
        return Err(format!("layer sizes from {v}: {:?}", g.bfs_layers(v).kappa));
    }
    let ia = g.intersection_array().map_err(|e| format!("{e:?}"))?;
    let (b, c) = (expected_list("q3", "b"), expected_list("q3", "c"));
    ensure(ia.b == b && ia.c == c, format!("b={:?} c={:?}", ia.b, ia.c))?;
    // b is indexed from b_0 and c from c_1.
    for i in 1..kappa.len() {
        ensure(
            kappa[i - 1] * b[i - 1] == kappa[i] * c[i - 1],
            format!("counting identity fails at i={i}"),
        )?;
    }
    ensure(
        ia.check_counting_identity(),
        "library identity check disagrees",
    )?;
    Ok(format!(
        "girth={} diameter={diameter} kappa={kappa:?}",
        girth.unwrap()
    ))
}

fn c3_automorphisms() -> Check {
    let g = gamma7();
    let aut = gamma7_aut();
    let order = BigUint::from(expected_u64("q3", "autOrder"));
    ensure(
        aut.group_order == order,
        format!("|Aut| = {}", aut.group_order),
    )?;
    ensure(
        aut.generators.iter().all(|p| is_automorphism(g, p)),
        "a generator does not preserve adjacency",
    )?;
    let group = aut.group(g.n());
    let stab = group
        .point_stabilizer(0)
        .map_err(|e| e.to_string())?
        .order();
    let expected_stab = BigUint::from(expected_u64("q3", "vertexStabilizerOrder"));
    ensure(stab == expected_stab, format!("|G_0| = {stab}"))?;
    ensure(&stab * BigUint::from(g.n()) == order, "|G| != |G_v| * |V|")?;
    ensure(group.is_transitive(), "not vertex-transitive")?;
    Ok(format!(
        "|Aut|={order} |G_v|={stab} gens={} verified",
        aut.generators.len()
    ))
}

fn c4_transitivity() -> Check {
    let g = gamma7();
    let group = gamma7_aut().group(g.n());
    let s = transitivity_degree(g, &group).map_err(|e| e.to_string())?;
    ensure(
        s == expected_u64("q3", "transitivityDegree") as usize,
        format!("s = {s}"),
    )?;
    ensure(
        is_s_arc_transitive(g, &group, 7) == Ok(true),
        "not 7-arc-transitive",
    )?;
    ensure(
        is_s_arc_transitive(g, &group, 8) == Ok(false),
        "8-arc-transitive",
    )?;
    let arcs = count_s_arcs(g, 7).map_err(|e| e.to_string())?;
    ensure(
        arcs == expected_u64("q3", "sevenArcCount") as u128,
        format!("{arcs} 7-arcs"),
    )?;
    let stab = ArcTower::new(g, &group, 7)
        .map_err(|e| e.to_string())?
        .arc_stabilizer_order(7);
    let want = expected_u64("q3", "sevenArcStabilizerOrder");
    ensure(
        stab == BigUint::from(want),
        format!("7-arc stabilizer {stab}"),
    )?;
    ensure(
        BigUint::from(arcs) * &stab == group.order(),
        "orbit-stabilizer fails on 7-arcs",
    )?;
    let vstab = BigUint::from(expected_u64("q3", "vertexStabilizerOrder"));
    ensure(
        stabilizer_table_check(7, &vstab) == Ok(true),
        "table check failed",
    )?;
    Ok(format!("s={s} #7-arcs={arcs} |G_arc|={stab} table ok"))
}

fn c5_orbital() -> Check {
    let g = gamma7();
    let group = gamma7_aut().group(g.n());
    for v in 0..g.n() {
        let subs = group.suborbits(v).map_err(|e| e.to_string())?;
        let fours = subs.iter().filter(|s| s.points.len() == 4).count();
        ensure(fours == 1, format!("{fours} suborbits of length 4 at {v}"))?;
    }
    let subs = group.suborbits(0).map_err(|e| e.to_string())?;
    let sub = subs
        .iter()
        .find(|s| s.points.len() == 4)
        .expect("checked above");
    let orbital = group.orbital_graph(sub).map_err(|e| e.to_string())?;
    ensure(
        orbital.normalized_edges() == RawGraph::from_graph(g).normalized_edges(),
        "orbital graph differs from the input",
    )?;
    Ok(format!(
        "unique length-4 suborbit at all {} vertices; edge sets equal",
        g.n()
    ))
}

fn c6_q2() -> Check {
    let (g, _) = construct_via_cli(2, "graph6")?;
    ensure(
        g.n() == expected_u64("q2", "order") as usize,
        format!("{} vertices", g.n()),
    )?;
    ensure(g.valency() == Some(3), "not cubic")?;
    ensure(g.is_bipartite(), "not bipartite")?;
    ensure(g.girth() == Some(12) && g.diameter() == 6, "girth/diameter")?;
    let listed = BigUint::from(expected_u64("q2", "autOrder"));
    let mut orders = Vec::new();
    for seed in 1..=5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sigma: Vec<usize> = (0..g.n()).collect();
        sigma.shuffle(&mut rng);
        let h = g.relabel(&sigma);
        let aut = automorphisms(&h).map_err(|e| e.to_string())?;
        let mut gens = aut.generators.clone();
        gens.shuffle(&mut rng);
        let chain = StabChain::build(h.n(), &gens, &[], rng.gen());
        ensure(
            chain.order() == aut.group_order,
            format!(
                "seed {seed}: search {} vs chain {}",
                aut.group_order,
                chain.order()
            ),
        )?;
        orders.push(aut.group_order);
    }
    ensure(
        orders.windows(2).all(|w| w[0] == w[1]),
        format!("unstable: {orders:?}"),
    )?;
    let order = &orders[0];
    ensure(
        (order % &listed) == BigUint::from(0u32),
        format!("{order} not a multiple"),
    )?;
    ensure(*order == listed, format!("{order} != {listed}"))?;
    Ok(format!(
        "|Aut|={order} in 5 relabeled runs, search and chain agree"
    ))
}

fn c7_oracles() -> Check {
    let cases = [
        ("triangle", fixtures::complete(3), 6u32),
        ("path", fixtures::path(3), 2),
        ("C4", fixtures::cycle(4), 8),
        ("K4", fixtures::complete(4), 24),
        ("Heawood", fixtures::heawood(), 336),
        ("cube", fixtures::cube(), 48),
    ];
    let mut seen = Vec::new();
    for (name, g, order) in cases {
        let search = automorphisms(&g).map_err(|e| e.to_string())?.group_order;
        let brute = brute_force_automorphisms(&g)
            .map_err(|e| e.to_string())?
            .group_order;
        ensure(
            search == brute,
            format!("{name}: search {search} brute {brute}"),
        )?;
        ensure(brute == BigUint::from(order), format!("{name}: {brute}"))?;
        seen.push(format!("{name} {search}"));
    }
    Ok(seen.join(", "))
}

// Closure of the generators under composition, as image vectors.
fn naive_closure(n: usize, gens: &[Perm]) -> BTreeSet<Vec<usize>> {
    let id: Vec<usize> = (0..n).collect();
    let mut seen = BTreeSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y: Vec<usize> = x.iter().map(|&i| g.images()[i]).collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Perm {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    Perm::from_images(images).unwrap()
}

fn c8_schreier_sims() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let mut memberships = 0;
    for case in 0..100 {
        let n = rng.gen_range(1..=8);
        let gens: Vec<Perm> = (0..rng.gen_range(0..=3))
            .map(|_| random_perm(&mut rng, n))
            .collect();
        let closure = naive_closure(n, &gens);
        let group = PermGroup::new(n, gens).map_err(|e| e.to_string())?;
        ensure(
            group.order() == BigUint::from(closure.len()),
            format!(
                "case {case}: order {} vs closure {}",
                group.order(),
                closure.len()
            ),
        )?;
        for _ in 0..10 {
            let p = random_perm(&mut rng, n);
            let member = group.contains(&p).map_err(|e| e.to_string())?;
            ensure(
                member == closure.contains(p.images()),
                format!("case {case}: membership"),
            )?;
            memberships += 1;
        }
        for images in closure.iter().take(5) {
            let p = Perm::from_images(images.clone()).unwrap();
            ensure(
                group.contains(&p) == Ok(true),
                format!("case {case}: element rejected"),
            )?;
            memberships += 1;
        }
    }
    Ok(format!("100 groups, {memberships} membership queries"))
}

fn antipodal(g: &Graph) -> PermGroup {
    let d = g.diameter();
    let images = (0..g.n()).map(|v| g.bfs_layers(v).layers[d][0]).collect();
    PermGroup::new(g.n(), vec![Perm::from_images(images).unwrap()]).unwrap()
}

fn c9_quotients() -> Check {
    let c12 = fixtures::cycle(12);
    let q = semiregular_quotient(&c12, &antipodal(&c12)).map_err(|e| e.to_string())?;
    ensure(q.quotient == fixtures::cycle(6), "C12 quotient is not C6")?;
    ensure(is_cover(&c12, &q).is_cover, "C12 -> C6 not a cover")?;

    let c4 = fixtures::cycle(4);
    let blocks = orbit_partition(antipodal(&c4).generators(), 4).map_err(|e| e.to_string())?;
    let q = quotient_graph(&c4, &blocks).map_err(|e| e.to_string())?;
    ensure(
        q.quotient.n() == 2 && q.quotient.edge_count() == 1,
        "C4 quotient is not K2",
    )?;
    let verdict = is_cover(&c4, &q);
    let witness = verdict.violation.as_ref().map(|v| v.hits.clone());
    ensure(
        !verdict.is_cover && witness == Some(vec![(1, 2)]),
        format!("C4 verdict {verdict:?}"),
    )?;

    let cube = fixtures::cube();
    let q = semiregular_quotient(&cube, &antipodal(&cube)).map_err(|e| e.to_string())?;
    ensure(
        q.quotient == fixtures::complete(4),
        "cube quotient is not K4",
    )?;

    for g in [c12, fixtures::cycle(6), c4, cube] {
        let blocks =
            orbit_partition(antipodal(&g).generators(), g.n()).map_err(|e| e.to_string())?;
        let q = quotient_graph(&g, &blocks).map_err(|e| e.to_string())?;
        let size = q.block_size().ok_or("uneven blocks")?;
        ensure(
            g.n() == size * q.quotient.n(),
            format!("|V| != {size}*{}", q.quotient.n()),
        )?;
    }
    Ok("C12->C6 cover, C4->K2 multiplicity 2, cube->K4 cover, |V|=|B||Vq|".into())
}

fn c10_formats() -> Check {
    let graphs = [
        ("triangle", fixtures::complete(3)),
        ("heawood", fixtures::heawood()),
        ("cube", fixtures::cube()),
        ("K4", fixtures::complete(4)),
        ("C6", fixtures::cycle(6)),
        ("C12", fixtures::cycle(12)),
        ("q2", construct_via_cli(2, "edgelist")?.0),
        ("q3", gamma7().clone()),
    ];
    for (name, g) in &graphs {
        let raw = RawGraph::from_graph(g);
        for format in [Format::Graph6, Format::Sparse6] {
            let text = format.encode(&raw).map_err(|e| e.to_string())?;
            let back = format.decode(&text).map_err(|e| e.to_string())?;
            ensure(
                back.n == raw.n && back.normalized_edges() == raw.normalized_edges(),
                format!("{name} {format}: decode differs"),
            )?;
            ensure(
                format.encode(&back).map_err(|e| e.to_string())? == text,
                format!("{name} {format}: re-encode differs"),
            )?;
        }
    }
    let (_, s6) = construct_via_cli(3, "sparse6")?;
    let g6 = Format::Graph6
        .encode(&RawGraph::from_graph(gamma7()))
        .map_err(|e| e.to_string())?;
    ensure(g6.as_bytes()[..4] == [126, 63, 74, 87], "graph6 header")?;
    ensure(s6.as_bytes()[..5] == *b":~?JW", "sparse6 header")?;
    Ok(format!("{} graphs, 728-vertex header ~?JW", graphs.len()))
}

fn run(id: u8, name: &str, limit: Option<Duration>, f: fn() -> Check) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed < l);
    let pass = result.is_ok() && in_time;
    let detail = match &result {
        Ok(d) if in_time => d.clone(),
        Ok(_) => format!("too slow (limit {:?})", limit.unwrap()),
        Err(e) => e.clone(),
    };
    println!(
        "{} criterion {id:>2} {name}: {detail} [{:.2}s]",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria: [Criterion; 10] = [
        ("construction", secs(10), c1_construction),
        ("distance combinatorics", secs(30), c2_distances),
        ("automorphism group", secs(300), c3_automorphisms),
        ("transitivity degree", secs(120), c4_transitivity),
        ("orbital round trip", secs(60), c5_orbital),
        ("q=2 fixture", None, c6_q2),
        ("oracle equivalence", secs(60), c7_oracles),
        ("Schreier-Sims properties", secs(60), c8_schreier_sims),
        ("quotients and covers", None, c9_quotients),
        ("format fidelity", None, c10_formats),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        if !run(i as u8 + 1, name, limit, f) {
            failed += 1;
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
