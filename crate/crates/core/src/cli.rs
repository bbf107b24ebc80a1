//! Command-line front end: one subcommand per library operation.
//!
//! Outputs are deterministic for fixed inputs and flags: maps are sorted,
//! searches break ties lexicographically, and sampling commands take an
//! explicit seed (default 0). Structured results offer `--format json`.
//! Exit codes: 0 success, 2 parse error, 3 validation error, 4 search
//! bound exceeded.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::burning;
use crate::corpus;
use crate::error::{Error, Result};
use crate::format;
use crate::gonality::{self, GonalityConfig, SupportMode};
use crate::graph::{GirthMode, MetricGraph};
use crate::jacobian::JacobianRankTable;
use crate::model::{Coordinate, Divisor, Model};
use crate::rank;
use crate::series;
use crate::trees::{self, ScanConfig};

/// Divisor theory on metric graphs: burning, rank, gonality, tree-glued
/// graphs, and exact secant-plane counting series.
#[derive(Parser)]
#[command(name = "gonal", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArgs {
    /// Built-in graph: k33, wheel4, wheel4(ri,ro,s1,s2,s3), petersen,
    /// heawood, pappus.
    #[arg(long, value_name = "NAME", conflicts_with = "graph")]
    corpus: Option<String>,
    /// Path to a graph file (`vertex`/`edge` lines).
    #[arg(long, value_name = "PATH", required_unless_present = "corpus")]
    graph: Option<PathBuf>,
}

impl GraphArgs {
    fn load(&self) -> Result<MetricGraph> {
        match (&self.corpus, &self.graph) {
            (Some(name), None) => corpus::by_name(name),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)?;
                format::parse_graph(&text)
            }
            _ => Err(Error::Invalid("pass exactly one of --corpus/--graph".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GirthModeArg {
    Combinatorial,
    Metric,
}

#[derive(Clone, Copy, ValueEnum)]
enum SupportArg {
    Vertices,
    Lattice,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceFormat {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanFormat {
    Tsv,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum RankEngine {
    /// Memoized chip-peeling recursion.
    Recursive,
    /// Precomputed rank table over the Picard group.
    Jacobian,
    /// Jacobian for high degrees when the group is small, else recursive.
    Auto,
}

#[derive(Subcommand)]
enum Command {
    /// First Betti number |E| - |V| + 1.
    Genus {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Shortest cycle length (edge count or total length).
    Girth {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value = "combinatorial")]
        mode: GirthModeArg,
    },
    /// Build the unit-length model at refinement k.
    Refine {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_enum, default_value = "tsv")]
        format: TableFormat,
    },
    /// Canonical divisor (valence - 2 everywhere) as chip lines.
    Canonical {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run Dhar's burning algorithm once from a source vertex.
    Burn {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Divisor file (chip lines); omit for the zero divisor.
        #[arg(long, value_name = "PATH")]
        divisor: Option<PathBuf>,
        #[arg(long, value_name = "VERTEX")]
        source: String,
        #[arg(long, value_enum, default_value = "tsv")]
        format: TableFormat,
    },
    /// q-reduce a divisor; prints the reduced divisor as chip lines.
    Reduce {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_name = "PATH")]
        divisor: PathBuf,
        #[arg(long, value_name = "VERTEX")]
        q: String,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Test linear equivalence of two divisors.
    Equivalent {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_name = "PATH")]
        divisor: PathBuf,
        #[arg(long, value_name = "PATH")]
        other: PathBuf,
    },
    /// Baker-Norine rank with a failing-subtraction certificate.
    Rank {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_name = "PATH")]
        divisor: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        engine: RankEngine,
        /// Recompute at k+1 and report whether the value is stable
        /// (divisor must be supported on base vertices).
        #[arg(long)]
        stabilize: bool,
        #[arg(long, value_enum, default_value = "tsv")]
        format: TableFormat,
    },
    /// Smallest degree of a positive-rank divisor, with witness.
    Gonality {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_name = "D")]
        max_degree: i64,
        #[arg(long, value_enum, default_value = "lattice")]
        support: SupportArg,
        /// Cap chip multiplicities at 2 during enumeration.
        #[arg(long)]
        mult_cap: bool,
        #[arg(long, value_enum, default_value = "tsv")]
        format: TableFormat,
    },
    /// Check rank(D) - rank(K-D) = deg(D) + 1 - g.
    RrCheck {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_name = "PATH")]
        divisor: PathBuf,
    },
    /// Full reduction trace from a source, as JSON or DOT frames.
    Trace {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_name = "PATH")]
        divisor: PathBuf,
        #[arg(long, value_name = "VERTEX")]
        source: String,
        #[arg(long, value_enum, default_value = "json")]
        format: TraceFormat,
        /// Output file (json) or directory (dot).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Glue a tree decomposition into a graph.
    Glue {
        #[arg(long, value_name = "PATH")]
        decomposition: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Search for a tree decomposition rooted on n vertices.
    FindDecomposition {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_name = "N")]
        roots: usize,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// One chip on each root of a decomposition, on the glued model.
    RootDivisor {
        #[arg(long, value_name = "PATH")]
        decomposition: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Scan length assignments of a decomposition shape: girth vs
    /// gonality per assignment.
    Scan {
        #[arg(long, value_name = "PATH")]
        decomposition: PathBuf,
        /// Total length distributed over the edges.
        #[arg(long, value_name = "B")]
        budget: u64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Enumerate all assignments instead of sampling.
        #[arg(long)]
        enumerate: bool,
        #[arg(long, value_enum, default_value = "tsv")]
        format: ScanFormat,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Secant-plane counting table N_0..N_maxD for genus g, degree m.
    Series {
        #[arg(long, value_name = "G")]
        genus: i64,
        /// Curve degree m.
        #[arg(long, value_name = "M")]
        degree: i64,
        #[arg(long, value_name = "D")]
        max_d: usize,
        #[arg(long, value_enum, default_value = "tsv")]
        format: TableFormat,
    },
    /// Classical linear-series invariants.
    Bn {
        #[command(subcommand)]
        which: BnCommand,
    },
    /// List corpus graphs, or print one as a graph file.
    Corpus {
        name: Option<String>,
    },
}

#[derive(Subcommand)]
enum BnCommand {
    /// rho(d,g,r) = g - (r+1)(g-d+r).
    Rho {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        g: i64,
        #[arg(long)]
        r: i64,
    },
    /// mu(d,r,s) = d - r(s+1-d+r).
    Mu {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        r: i64,
        #[arg(long)]
        s: i64,
    },
}

/// Everything a command produces: stdout text plus optional files.
pub struct Output {
    pub stdout: String,
    pub files: Vec<(PathBuf, String)>,
}

impl Output {
    fn text(stdout: impl Into<String>) -> Self {
        Output {
            stdout: stdout.into(),
            files: Vec::new(),
        }
    }

    /// Send `content` to `out` when given, otherwise to stdout.
    fn routed(out: &Option<PathBuf>, content: String) -> Self {
        match out {
            Some(path) => Output {
                stdout: String::new(),
                files: vec![(path.clone(), content)],
            },
            None => Output::text(content),
        }
    }
}

fn chips_json(d: &Divisor) -> BTreeMap<String, i64> {
    d.support()
        .into_iter()
        .map(|v| (d.model().vertex_id(v).to_owned(), d.chip_count(v)))
        .collect()
}

fn load_divisor(path: &PathBuf, model: &Arc<Model>) -> Result<Divisor> {
    let text = std::fs::read_to_string(path)?;
    format::parse_divisor(&text, model)
}

fn base_supported(d: &Divisor) -> bool {
    d.support()
        .iter()
        .all(|&v| matches!(d.model().coordinate(v), Coordinate::Base(_)))
}

/// Rank via the engine the flags picked; falls back to the recursion when
/// a Jacobian table is out of budget.
fn rank_by_engine(divisor: &Divisor, engine: RankEngine) -> Result<(i64, Option<Divisor>)> {
    const GROUP_BUDGET: u64 = 4_000_000;
    let model = divisor.model();
    let use_table = match engine {
        RankEngine::Recursive => false,
        RankEngine::Jacobian => true,
        RankEngine::Auto => divisor.degree() >= model.genus() as i64 + 2,
    };
    if use_table {
        let degree = divisor.degree().max(0);
        match JacobianRankTable::build(model, degree, GROUP_BUDGET) {
            Ok(table) => {
                let value = table.rank(divisor)?;
                // Certificates come from the recursion either way; for
                // table queries the value alone is reported.
                return Ok((value, None));
            }
            Err(_) if matches!(engine, RankEngine::Auto) => {}
            Err(e) => return Err(e),
        }
    }
    let cert = rank::rank(divisor);
    Ok((cert.rank, cert.failing_subtraction))
}

pub fn run(cli: Cli) -> Result<Output> {
    match cli.command {
        Command::Genus { graph } => {
            let g = graph.load()?;
            Ok(Output::text(format!("{}\n", g.genus())))
        }
        Command::Girth { graph, mode } => {
            let g = graph.load()?;
            let mode = match mode {
                GirthModeArg::Combinatorial => GirthMode::Combinatorial,
                GirthModeArg::Metric => GirthMode::Metric,
            };
            Ok(Output::text(format!("{}\n", g.girth(mode))))
        }
        Command::Refine { graph, k, format: fmt } => {
            let g = graph.load()?;
            let model = Model::refine(&g, k)?;
            match fmt {
                TableFormat::Tsv => {
                    let mut out = format!(
                        "vertices\t{}\nunit-edges\t{}\ngenus\t{}\n",
                        model.vertex_count(),
                        model.unit_edges().len(),
                        model.genus()
                    );
                    for v in 0..model.vertex_count() {
                        let place = match model.coordinate(v) {
                            Coordinate::Base(b) => format!("base\t{}", g.vertex_id(b)),
                            Coordinate::Interior { edge, step } => {
                                format!("interior\te{edge}\t{step}")
                            }
                        };
                        out.push_str(&format!("vertex\t{}\t{place}\n", model.vertex_id(v)));
                    }
                    Ok(Output::text(out))
                }
                TableFormat::Json => {
                    let vertices: Vec<serde_json::Value> = (0..model.vertex_count())
                        .map(|v| match model.coordinate(v) {
                            Coordinate::Base(b) => json!({
                                "id": model.vertex_id(v),
                                "base": g.vertex_id(b),
                            }),
                            Coordinate::Interior { edge, step } => json!({
                                "id": model.vertex_id(v),
                                "edge": format!("e{edge}"),
                                "step": step,
                            }),
                        })
                        .collect();
                    let doc = json!({
                        "refinement": k,
                        "vertices": model.vertex_count(),
                        "unitEdges": model.unit_edges().len(),
                        "genus": model.genus(),
                        "lattice": vertices,
                    });
                    Ok(Output::text(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())))
                }
            }
        }
        Command::Canonical { graph, k, out } => {
            let g = graph.load()?;
            let model = Model::refine(&g, k)?;
            let canonical = model.canonical_divisor();
            Ok(Output::routed(&out, format::divisor_to_text(&canonical)))
        }
        Command::Burn {
            graph,
            k,
            divisor,
            source,
            format: fmt,
        } => {
            let g = graph.load()?;
            let model = Model::refine(&g, k)?;
            let d = match &divisor {
                Some(path) => load_divisor(path, &model)?,
                None => model.zero_divisor(),
            };
            let burn = burning::dhar_burn(&d, &source)?;
            let id = |v: usize| model.vertex_id(v).to_owned();
            match fmt {
                TableFormat::Tsv => {
                    let mut out = String::new();
                    out.push_str(&format!(
                        "burnt\t{}\n",
                        burn.burnt().into_iter().map(id).collect::<Vec<_>>().join(" ")
                    ));
                    out.push_str(&format!(
                        "unburnt\t{}\n",
                        burn.unburnt().into_iter().map(id).collect::<Vec<_>>().join(" ")
                    ));
                    Ok(Output::text(out))
                }
                TableFormat::Json => {
                    let doc = json!({
                        "source": source,
                        "burntOrder": burn.burn_order().into_iter().map(id).collect::<Vec<_>>(),
                        "unburnt": burn.unburnt().into_iter().map(id).collect::<Vec<_>>(),
                        "events": burn.events().iter().map(|e| json!({
                            "vertex": model.vertex_id(e.vertex),
                            "edgesToBurnt": e.edges_to_burnt,
                        })).collect::<Vec<_>>(),
                    });
                    Ok(Output::text(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())))
                }
            }
        }
        Command::Reduce {
            graph,
            k,
            divisor,
            q,
            out,
        } => {
            let g = graph.load()?;
            let model = Model::refine(&g, k)?;
            let d = load_divisor(&divisor, &model)?;
            let trace = burning::q_reduce(&d, &q)?;
            Ok(Output::routed(&out, format::divisor_to_text(&trace.final_divisor)))
        }
        Command::Equivalent {
            graph,
            k,
            divisor,
            other,
        } => {
            let g = graph.load()?;
            let model = Model::refine(&g, k)?;
            let a = load_divisor(&divisor, &model)?;
            let b = load_divisor(&other, &model)?;
            Ok(Output::text(format!(
                "{}\n",
                burning::linearly_equivalent(&a, &b)?
            )))
        }
        Command::Rank {
            graph,
            k,
            divisor,
            engine,
            stabilize,
            format: fmt,
        } => {
            let g = graph.load()?;
            let model = Model::refine(&g, k)?;
            let d = load_divisor(&divisor, &model)?;
            let (value, failing) = rank_by_engine(&d, engine)?;
            let stable = if stabilize {
                if !base_supported(&d) {
                    return Err(Error::Invalid(
                        "--stabilize needs a divisor supported on base vertices".into(),
                    ));
                }
                let finer = Model::refine(&g, k + 1)?;
                let pairs: Vec<(String, i64)> = d
                    .support()
                    .into_iter()
                    .map(|v| (model.vertex_id(v).to_owned(), d.chip_count(v)))
                    .collect();
                let lifted = finer.divisor(&pairs)?;
                let (finer_value, _) = rank_by_engine(&lifted, engine)?;
                Some(finer_value == value)
            } else {
                None
            };
            match fmt {
                TableFormat::Tsv => {
                    let mut out = format!("rank\t{value}\n");
                    if let Some(e) = &failing {
                        out.push_str(&format!("failing-subtraction\t{}\n", e.describe()));
                    }
                    if let Some(s) = stable {
                        out.push_str(&format!("stable\t{s}\n"));
                    }
                    Ok(Output::text(out))
                }
                TableFormat::Json => {
                    let doc = json!({
                        "rank": value,
                        "degree": d.degree(),
                        "failingSubtraction": failing.as_ref().map(chips_json),
                        "stable": stable,
                    });
                    Ok(Output::text(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())))
                }
            }
        }
        Command::Gonality {
            graph,
            k,
            max_degree,
            support,
            mult_cap,
            format: fmt,
        } => {
            let g = graph.load()?;
            let mut config = GonalityConfig::new(max_degree, k);
            config.support = match support {
                SupportArg::Vertices => SupportMode::VerticesOnly,
                SupportArg::Lattice => SupportMode::Lattice,
            };
            config.multiplicity_cap = mult_cap;
            let cert = gonality::gonality(&g, &config)?;
            match fmt {
                TableFormat::Tsv => Ok(Output::text(format!(
                    "gonality\t{}\nwitness\t{}\ncertified-at\tk={}\n",
                    cert.value,
                    cert.witness.describe(),
                    cert.certified_at
                ))),
                TableFormat::Json => {
                    let doc = json!({
                        "value": cert.value,
                        "witness": chips_json(&cert.witness),
                        "certifiedAt": cert.certified_at,
                    });
                    Ok(Output::text(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())))
                }
            }
        }
        Command::RrCheck { graph, k, divisor } => {
            let g = graph.load()?;
            let model = Model::refine(&g, k)?;
            let d = load_divisor(&divisor, &model)?;
            Ok(Output::text(format!("{}\n", rank::riemann_roch_check(&d))))
        }
        Command::Trace {
            graph,
            k,
            divisor,
            source,
            format: fmt,
            out,
        } => {
            let g = graph.load()?;
            let model = Model::refine(&g, k)?;
            let d = load_divisor(&divisor, &model)?;
            let trace = burning::burn_trace(&d, &source)?;
            match fmt {
                TraceFormat::Json => Ok(Output::routed(&out, format!("{}\n", format::trace_to_json(&trace)))),
                TraceFormat::Dot => {
                    let dir = out.ok_or_else(|| {
                        Error::Invalid("--format dot needs --out <directory>".into())
                    })?;
                    let frames = format::trace_to_dot_frames(&trace);
                    let mut listing = String::new();
                    let files = frames
                        .into_iter()
                        .map(|(name, content)| {
                            let path = dir.join(&name);
                            listing.push_str(&format!("{}\n", path.display()));
                            (path, content)
                        })
                        .collect();
                    Ok(Output {
                        stdout: listing,
                        files,
                    })
                }
            }
        }
        Command::Glue { decomposition, out } => {
            let text = std::fs::read_to_string(&decomposition)?;
            let d = format::parse_decomposition(&text)?;
            Ok(Output::routed(&out, format::graph_to_text(&d.glue())))
        }
        Command::FindDecomposition { graph, roots, out } => {
            let g = graph.load()?;
            match trees::find_tree_decomposition(&g, roots)? {
                Some(d) => Ok(Output::routed(&out, format::decomposition_to_text(&d))),
                None => Ok(Output::text("none\n")),
            }
        }
        Command::RootDivisor {
            decomposition,
            k,
            out,
        } => {
            let text = std::fs::read_to_string(&decomposition)?;
            let d = format::parse_decomposition(&text)?;
            let root = d.root_divisor(k)?;
            Ok(Output::routed(&out, format::divisor_to_text(&root)))
        }
        Command::Scan {
            decomposition,
            budget,
            samples,
            seed,
            enumerate,
            format: fmt,
            out,
        } => {
            let text = std::fs::read_to_string(&decomposition)?;
            let shape = format::parse_decomposition(&text)?;
            let mut config = ScanConfig::new(budget, samples);
            config.seed = seed;
            config.enumerate = enumerate;
            let report = trees::conjecture_scan(&shape, &config)?;
            let rendered = match fmt {
                ScanFormat::Tsv => format::scan_to_tsv(&report),
                ScanFormat::Csv => format::scan_to_csv(&report),
            };
            Ok(Output::routed(&out, rendered))
        }
        Command::Series {
            genus,
            degree,
            max_d,
            format: fmt,
        } => {
            let table = series::n_d_table(genus, degree, max_d)?;
            match fmt {
                TableFormat::Tsv => {
                    let mut out = String::from("d\tN_d\n");
                    for (d, value) in table.values.iter().enumerate() {
                        out.push_str(&format!("{d}\t{value}\n"));
                    }
                    if !table.non_integral.is_empty() {
                        out.push_str(&format!("# non-integral at d = {:?}\n", table.non_integral));
                    }
                    Ok(Output::text(out))
                }
                TableFormat::Json => {
                    let doc = json!({
                        "genus": table.genus,
                        "degree": table.curve_degree,
                        "values": table.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                        "nonIntegral": table.non_integral,
                    });
                    Ok(Output::text(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())))
                }
            }
        }
        Command::Bn { which } => {
            let value = match which {
                BnCommand::Rho { d, g, r } => series::rho(d, g, r),
                BnCommand::Mu { d, r, s } => series::mu(d, r, s),
            };
            Ok(Output::text(format!("{value}\n")))
        }
        Command::Corpus { name } => match name {
            Some(name) => {
                let g = corpus::by_name(&name)?;
                Ok(Output::text(format::graph_to_text(&g)))
            }
            None => Ok(Output::text(
                corpus::NAMES.map(|n| format!("{n}\n")).concat(),
            )),
        },
    }
}

/// Render an error as the machine-readable object printed to stderr.
pub fn error_json(error: &Error) -> String {
    serde_json::to_string(&json!({
        "error": {
            "code": error.code() as i32,
            "message": error.to_string(),
        }
    }))
    .expect("error serializes")
}

