//! The analysis pipeline and its JSON report.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::autsearch::{automorphisms_with_budget, AutError, AutResult, SearchStats};
use crate::formats::RawGraph;
use crate::graph::{Bipartition, DistanceRegularityError, Graph, IntersectionArray};
use crate::permgrp::PermGroup;
use crate::quotient::{is_cover, quotient_graph, CoverViolation};
use crate::sarctrans::{
    count_s_arcs, orbit_stabilizer_quotient, stabilizer_table_check, transitivity_degree, ArcTower,
    SArcError,
};

pub const SCHEMA_VERSION: u32 = 1;

fn big<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v.as_ref().map(|x| (x, x.to_u64())) {
        None => s.serialize_none(),
        Some((_, Some(u))) => s.serialize_u64(u),
        Some((x, None)) => s.serialize_str(&x.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valency {
    Regular(usize),
    Irregular,
}

impl Serialize for Valency {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Valency::Regular(k) => s.serialize_u64(*k as u64),
            Valency::Irregular => s.serialize_str("irregular"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcDegree {
    Finite(usize),
    Unbounded,
}

impl Serialize for ArcDegree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ArcDegree::Finite(d) => s.serialize_u64(*d as u64),
            ArcDegree::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum AutStatus {
    Computed,
    Skipped,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuotientSummary {
    pub blocks: usize,
    pub block_size: Option<usize>,
    pub block_of: Vec<usize>,
    pub quotient_edge_count: usize,
    pub quotient_valency: Valency,
    pub is_cover: bool,
    pub violation: Option<CoverViolation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub graph_source: String,
    pub n: usize,
    pub edge_count: usize,
    pub valency: Valency,
    pub bipartite: bool,
    pub part_sizes: Option<[usize; 2]>,
    pub girth: Option<usize>,
    pub diameter: usize,
    pub kappa_root: usize,
    pub kappa: Vec<usize>,
    pub intersection_array: Option<IntersectionArray>,
    pub distance_regularity_witness: Option<DistanceRegularityError>,
    pub counting_identity: Option<bool>,
    pub aut_status: AutStatus,
    #[serde(serialize_with = "big")]
    pub aut_order: Option<BigUint>,
    pub aut_generator_count: Option<usize>,
    pub aut_generators_verified: Option<bool>,
    pub aut_search: Option<SearchStats>,
    pub vertex_transitive: Option<bool>,
    #[serde(serialize_with = "big")]
    pub vertex_stabilizer_order: Option<BigUint>,
    pub orbit_stabilizer_identity: Option<bool>,
    pub arc_transitive: Option<bool>,
    pub transitivity_degree: Option<ArcDegree>,
    pub s_arc_count: Option<u128>,
    #[serde(serialize_with = "big")]
    pub s_arc_stabilizer_order: Option<BigUint>,
    pub s_arc_orbit_stabilizer_consistent: Option<bool>,
    pub stabilizer_table_consistent: Option<bool>,
    pub suborbit_lengths: Option<Vec<usize>>,
    pub orbital_round_trip: Option<bool>,
    pub quotient: Option<QuotientSummary>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl AnalysisReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report as JSON minus the fields that legitimately differ between
    /// runs on the same graph.
    pub fn comparable(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        let obj = v.as_object_mut().expect("struct serializes to an object");
        obj.remove("timingsMs");
        obj.remove("graphSource");
        v
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub automorphisms: bool,
    pub budget: u64,
    pub quotient_by: Option<PermGroup>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            automorphisms: true,
            budget: crate::autsearch::DEFAULT_NODE_BUDGET,
            quotient_by: None,
        }
    }
}

pub struct Analysis {
    pub report: AnalysisReport,
    pub aut: Option<AutResult>,
}

impl Analysis {
    pub fn group(&self) -> Option<PermGroup> {
        self.aut.as_ref().map(|a| a.group(self.report.n))
    }
}

struct Clock(BTreeMap<String, f64>);

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0
            .insert(stage.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }
}

pub fn analyze(g: &Graph, source: &str, opts: &AnalyzeOptions) -> Analysis {
    let mut clock = Clock(BTreeMap::new());
    let n = g.n();
    let valency = g.valency().map_or(Valency::Irregular, Valency::Regular);

    let (bipartite, part_sizes) = match g.bipartition() {
        Bipartition::Bipartite { part_sizes, .. } => (true, Some(part_sizes)),
        Bipartition::OddCycle(_) => (false, None),
    };
    let (girth, diameter) = clock.time("girthDiameter", || (g.girth(), g.diameter()));
    let kappa = g.bfs_layers(0).kappa;
    let (intersection_array, distance_regularity_witness) =
        match clock.time("intersectionArray", || g.intersection_array()) {
            Ok(ia) => (Some(ia), None),
            Err(e) => (None, Some(e)),
        };
    let counting_identity = intersection_array
        .as_ref()
        .map(IntersectionArray::check_counting_identity);

    let mut report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        graph_source: source.to_string(),
        n,
        edge_count: g.edge_count(),
        valency,
        bipartite,
        part_sizes,
        girth,
        diameter,
        kappa_root: 0,
        kappa,
        intersection_array,
        distance_regularity_witness,
        counting_identity,
        aut_status: AutStatus::Skipped,
        aut_order: None,
        aut_generator_count: None,
        aut_generators_verified: None,
        aut_search: None,
        vertex_transitive: None,
        vertex_stabilizer_order: None,
        orbit_stabilizer_identity: None,
        arc_transitive: None,
        transitivity_degree: None,
        s_arc_count: None,
        s_arc_stabilizer_order: None,
        s_arc_orbit_stabilizer_consistent: None,
        stabilizer_table_consistent: None,
        suborbit_lengths: None,
        orbital_round_trip: None,
        quotient: None,
        timings_ms: BTreeMap::new(),
    };

    if let Some(group) = &opts.quotient_by {
        report.quotient = clock.time("quotient", || summarize_quotient(g, group));
    }

    let mut aut = None;
    if opts.automorphisms {
        match clock.time("automorphisms", || {
            automorphisms_with_budget(g, opts.budget)
        }) {
            Ok(res) => {
                group_fields(g, &res, &mut report, &mut clock);
                aut = Some(res);
            }
            Err(AutError::BudgetExceeded { .. }) => report.aut_status = AutStatus::BudgetExceeded,
            // The search re-verifies its own output; any other error is a bug.
            Err(e) => panic!("automorphism search failed: {e}"),
        }
    }
    report.timings_ms = clock.0;
    Analysis { report, aut }
}

fn summarize_quotient(g: &Graph, group: &PermGroup) -> Option<QuotientSummary> {
    if group.degree() != g.n() {
        return None;
    }
    let blocks = crate::quotient::orbit_partition(group.generators(), g.n()).ok()?;
    let q = quotient_graph(g, &blocks).ok()?;
    let verdict = is_cover(g, &q);
    Some(QuotientSummary {
        blocks: q.blocks.len(),
        block_size: q.block_size(),
        block_of: q.block_of.clone(),
        quotient_edge_count: q.quotient.edge_count(),
        quotient_valency: q
            .quotient
            .valency()
            .map_or(Valency::Irregular, Valency::Regular),
        is_cover: verdict.is_cover,
        violation: verdict.violation,
    })
}

fn group_fields(g: &Graph, res: &AutResult, report: &mut AnalysisReport, clock: &mut Clock) {
    let n = g.n();
    let group = res.group(n);
    let order = res.group_order.clone();
    report.aut_status = AutStatus::Computed;
    report.aut_generator_count = Some(res.generators.len());
    report.aut_generators_verified = Some(
        res.generators
            .iter()
            .all(|p| crate::autsearch::is_automorphism(g, p)),
    );
    report.aut_search = Some(res.stats.clone());

    let transitive = group.is_transitive();
    let stab = clock.time("vertexStabilizer", || {
        group
            .chain_with_base(&[0], crate::permgrp::DEFAULT_SEED)
            .stabilizer_order(1)
    });
    report.vertex_transitive = Some(transitive);
    report.orbit_stabilizer_identity = Some(transitive && &stab * BigUint::from(n) == order);
    report.vertex_stabilizer_order = Some(stab.clone());
    report.aut_order = Some(order.clone());

    if let Some(k) = g.valency() {
        clock.time("sArcs", || {
            let tower = ArcTower::new(g, &group, 1).expect("verified automorphisms");
            let arc_transitive = tower.is_s_arc_transitive(1);
            report.arc_transitive = Some(arc_transitive);
            match transitivity_degree(g, &group) {
                Ok(s) => {
                    let arcs = count_s_arcs(g, s).expect("s >= 1");
                    let tower = ArcTower::new(g, &group, s).expect("verified automorphisms");
                    let arc_stab = tower.arc_stabilizer_order(s);
                    report.s_arc_orbit_stabilizer_consistent =
                        Some(orbit_stabilizer_quotient(&order, arcs).as_ref() == Some(&arc_stab));
                    report.transitivity_degree = Some(ArcDegree::Finite(s));
                    report.s_arc_count = Some(arcs);
                    report.s_arc_stabilizer_order = Some(arc_stab);
                    if k == 4 {
                        report.stabilizer_table_consistent =
                            Some(stabilizer_table_check(s, &stab).unwrap_or(false));
                    }
                }
                Err(SArcError::Unbounded(_)) => {
                    report.transitivity_degree = Some(ArcDegree::Unbounded)
                }
                Err(_) => {}
            }
        });
    }

    if transitive {
        clock.time("suborbits", || {
            let subs = group.suborbits(0).expect("transitive group");
            report.suborbit_lengths = Some(subs.iter().map(|s| s.points.len()).collect());
            if let Some(k) = g.valency() {
                let matching: Vec<_> = subs.iter().filter(|s| s.points.len() == k).collect();
                if let [sub] = matching[..] {
                    let own = RawGraph::from_graph(g).normalized_edges();
                    report.orbital_round_trip = Some(
                        group
                            .orbital_graph(sub)
                            .is_ok_and(|o| o.normalized_edges() == own),
                    );
                }
            }
        });
    }
}

/// A versioned set of expected report values for named graphs.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    pub manifest_version: u32,
    pub graphs: BTreeMap<String, ExpectedGraph>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpectedGraph {
    pub field_order: u8,
    pub fields: BTreeMap<String, ExpectedValue>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ExpectedValue {
    /// A JSON pointer into the report, relative to its root.
    pub path: String,
    pub value: Value,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub field: String,
    pub expected: Value,
    pub found: Value,
}

impl Manifest {
    pub fn builtin() -> Manifest {
        serde_json::from_str(include_str!("../data/expected.json"))
            .expect("bundled manifest parses")
    }

    /// Compares a report against the expectations for `graph`.
    pub fn check(&self, graph: &str, report: &Value) -> Option<Vec<Mismatch>> {
        let expected = self.graphs.get(graph)?;
        Some(
            expected
                .fields
                .iter()
                .filter_map(|(field, e)| {
                    let found = report.pointer(&e.path).cloned().unwrap_or(Value::Null);
                    (found != e.value).then(|| Mismatch {
                        field: field.clone(),
                        expected: e.value.clone(),
                        found,
                    })
                })
                .collect(),
        )
    }
}
