use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use hexagon_core::autsearch::{is_automorphism, DEFAULT_NODE_BUDGET};
use hexagon_core::ffgeom::build_hexagon;
use hexagon_core::formats::{decode_any, Format, RawGraph};
use hexagon_core::graph::Graph;
use hexagon_core::permgrp::{GeneratorSet, PermGroup};
use hexagon_core::quotient::semiregular_quotient;
use hexagon_core::report::{analyze, AnalyzeOptions, AutStatus, Manifest};

const EXIT_MISMATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hexagon",
    version,
    about = "Split Cayley hexagon incidence graphs and their symmetry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the incidence graph of the split Cayley hexagon H(q).
    Construct {
        #[arg(long, value_parser = ["2", "3"])]
        q: String,
        #[arg(long, default_value = "sparse6")]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute invariants, the automorphism group and arc-transitivity.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Skip the automorphism search and everything that depends on it.
        #[arg(long)]
        no_aut: bool,
        /// Search-tree node budget.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        /// Also write the automorphism generators as JSON.
        #[arg(long)]
        gens_out: Option<PathBuf>,
        /// Quotient by the orbits of these generators and report on the cover.
        #[arg(long)]
        quotient_gens: Option<PathBuf>,
    },
    /// Build the orbital graph of a suborbit and compare it with the input.
    Orbital {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        gens: PathBuf,
        #[arg(long)]
        vertex: usize,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        out: PathBuf,
        /// Output format; defaults to the input's.
        #[arg(long)]
        format: Option<Format>,
    },
    /// Quotient by a semiregular group and verify the covering map.
    Quotient {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        gens: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Construct, analyze and check against the bundled expected values.
    Verify {
        /// Field orders to check.
        #[arg(long, value_parser = ["2", "3"], num_args = 1.., default_values = ["2", "3"])]
        q: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
}

fn read_graph(path: &Path) -> Result<(Graph, Format)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let format = Format::detect(&text);
    let raw = decode_any(&text).with_context(|| format!("decoding {}", path.display()))?;
    let g = raw
        .into_graph()
        .with_context(|| format!("{} is not a connected simple graph", path.display()))?;
    Ok((g, format))
}

fn read_group(path: &Path, g: &Graph) -> Result<PermGroup> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let group = GeneratorSet::from_json(&text)?.into_group()?;
    if group.degree() != g.n() {
        bail!(
            "generators act on {} points, graph has {}",
            group.degree(),
            g.n()
        );
    }
    if let Some(i) = group
        .generators()
        .iter()
        .position(|p| !is_automorphism(g, p))
    {
        bail!("generator {i} is not an automorphism of the graph");
    }
    Ok(group)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn construct(q: u32) -> Result<Graph> {
    Ok(build_hexagon(q)?.incidence_graph()?)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Construct { q, format, out } => {
            let g = construct(q.parse()?)?;
            write(&out, &format.encode(&RawGraph::from_graph(&g))?)?;
            eprintln!(
                "wrote {} vertices, {} edges to {}",
                g.n(),
                g.edge_count(),
                out.display()
            );
        }
        Command::Analyze {
            input,
            report,
            no_aut,
            budget,
            gens_out,
            quotient_gens,
        } => {
            let (g, _) = read_graph(&input)?;
            let quotient_by = quotient_gens.map(|p| read_group(&p, &g)).transpose()?;
            let opts = AnalyzeOptions {
                automorphisms: !no_aut,
                budget,
                quotient_by,
            };
            let analysis = analyze(&g, &input.display().to_string(), &opts);
            write(&report, &analysis.report.to_json_pretty())?;
            if let (Some(path), Some(group)) = (gens_out, analysis.group()) {
                write(&path, &group.to_generator_set().to_json())?;
            }
            if analysis.report.aut_status == AutStatus::BudgetExceeded {
                eprintln!("automorphism search exceeded the budget of {budget} nodes");
                return Ok(EXIT_BUDGET);
            }
        }
        Command::Orbital {
            input,
            gens,
            vertex,
            length,
            out,
            format,
        } => {
            let (g, input_format) = read_graph(&input)?;
            let group = read_group(&gens, &g)?;
            let subs = group.suborbits(vertex)?;
            let sub = match subs.iter().filter(|s| s.points.len() == length).collect::<Vec<_>>()[..] {
                [] => bail!("no suborbit of length {length} at vertex {vertex}"),
                [s] => s.clone(),
                ref many => bail!(
                    "{} suborbits of length {length} at vertex {vertex}; pick one by a different vertex or length",
                    many.len()
                ),
            };
            let orbital = group.orbital_graph(&sub)?;
            let equal = orbital.normalized_edges() == RawGraph::from_graph(&g).normalized_edges();
            write(&out, &format.unwrap_or(input_format).encode(&orbital)?)?;
            let verdict = json!({
                "vertex": vertex,
                "length": length,
                "edgeCount": orbital.normalized_edges().len(),
                "equalsInput": equal,
            });
            println!("{verdict}");
        }
        Command::Quotient {
            input,
            gens,
            out,
            format,
        } => {
            let (g, input_format) = read_graph(&input)?;
            let group = read_group(&gens, &g)?;
            let q = semiregular_quotient(&g, &group)?;
            write(
                &out,
                &format
                    .unwrap_or(input_format)
                    .encode(&RawGraph::from_graph(&q.quotient))?,
            )?;
            let verdict = json!({
                "blocks": q.blocks.len(),
                "blockSize": q.block_size(),
                "blockOf": q.block_of,
                "quotientValency": q.quotient.valency(),
                "isCover": true,
            });
            println!("{verdict}");
        }
        Command::Verify { q, budget } => {
            let manifest = Manifest::builtin();
            let mut failed = false;
            for (name, expected) in &manifest.graphs {
                let field_order = expected.field_order.to_string();
                if !q.contains(&field_order) {
                    continue;
                }
                let g = construct(expected.field_order.into())?;
                let opts = AnalyzeOptions {
                    budget,
                    ..Default::default()
                };
                let report = analyze(&g, &format!("construct q={field_order}"), &opts).report;
                if report.aut_status == AutStatus::BudgetExceeded {
                    eprintln!("{name}: automorphism search exceeded the budget");
                    return Ok(EXIT_BUDGET);
                }
                let mismatches = manifest
                    .check(name, &serde_json::to_value(&report)?)
                    .expect("graph listed in manifest");
                for field in expected.fields.keys() {
                    match mismatches.iter().find(|m| &m.field == field) {
                        None => println!("{name}.{field}: ok"),
                        Some(m) => {
                            failed = true;
                            println!(
                                "{name}.{field}: MISMATCH expected {} found {}",
                                m.expected, m.found
                            );
                        }
                    }
                }
            }
            if failed {
                return Ok(EXIT_MISMATCH);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
