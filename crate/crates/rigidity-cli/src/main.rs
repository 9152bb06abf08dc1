//! Command-line decider for generic infinitesimal rigidity.
//!
//! Exit codes: 0 rigid / success, 10 flexible (or a certificate of
//! flexibility), 1 usage or input error, 2 budget / expression-cap error.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use rigidity::bracket::{format_poly, parse_poly, straighten_with_cap};
use rigidity::certificate::{is_balanced_with, BalanceMode};
use rigidity::decide::{
    certificate_from_kernel, decide_any, decision_to_json, reduce_surplus, DecideMode,
    DecideOptions,
};
use rigidity::graph::{
    graph_from_json, graph_to_json, q_from_json, q_to_string, validate_graph, Graph,
};
use rigidity::oracle::{oracle_decide, oracle_decide_mod_p, Verdict};
use rigidity::orientation::{
    check_validity, orientation_from_json, orientation_to_json, Orientation,
};
use rigidity::stress::{
    solve_sink_system, synthesize_stress, verify_stress, with_generic_placement,
};
use rigidity::{Edge, Error};

const EXIT_RIGID: i32 = 0;
const EXIT_FLEXIBLE: i32 = 10;
const EXIT_USAGE: i32 = 1;
const EXIT_BUDGET: i32 = 2;

#[derive(Parser)]
#[command(
    name = "rigidity",
    about = "Decides generic infinitesimal rigidity of bar-joint frameworks in any dimension",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Ambient dimension d (overrides the graph file's "d" field)
    #[arg(long)]
    dim: Option<u32>,
    /// Base seed for random placements and evaluations
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent random placements for rank computations
    #[arg(long, default_value_t = 3)]
    trials: u32,
    /// Emit a JSON object instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide rigidity of a graph (tight graphs via the orientation theorem,
    /// surplus graphs after reduction, deficit graphs by the count)
    Check {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
        /// kernel: build the certificate from a self-stress; search: enumerate
        /// orientations exhaustively
        #[arg(long, default_value = "kernel")]
        mode: String,
        /// Certify balance by straightening instead of randomized evaluation
        #[arg(long)]
        certified: bool,
        /// Candidate budget for search mode
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Cross-check the verdict against the rank oracle
        #[arg(long)]
        verify: bool,
    },
    /// Exact rank oracle: rigidity matrix rank at random placements
    Oracle {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Compute ranks modulo a fixed 62-bit prime (faster, near-certain)
        #[arg(long)]
        modp: bool,
    },
    /// Straighten a bracket polynomial to its standard normal form
    Straighten {
        /// Input file of bracket-polynomial text, or - for stdin
        input: Option<PathBuf>,
        /// Cap on intermediate term count
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Check whether an orientation is balanced, with evidence
    Balanced {
        graph: PathBuf,
        orientation: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Straighten certificates instead of randomized evaluation
        #[arg(long)]
        certified: bool,
    },
    /// Synthesize a self-stress from an orientation and verify w A = 0
    Stress {
        graph: PathBuf,
        orientation: PathBuf,
        #[command(flatten)]
        common: Common,
        /// JSON file mapping sink edges "i,j" to rational values; defaults to
        /// the first vector of the sink-system nullspace
        #[arg(long)]
        sinks: Option<PathBuf>,
    },
    /// Build a balanced orientation from the self-stress kernel, if any
    Certificate {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Remove redundant edges from a surplus graph until tight
    Reduce {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit 2; the contract reserves 2 for budget errors
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::SearchBudgetExceeded { .. } | Error::ExpressionBlowup { .. } => EXIT_BUDGET,
                _ => EXIT_USAGE,
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Check {
            graph,
            common,
            mode,
            certified,
            budget,
            verify,
        } => {
            let (g, d) = load_graph(&graph, common.dim)?;
            let mode = match mode.as_str() {
                "kernel" => DecideMode::Kernel,
                "search" => DecideMode::Search,
                other => return Err(Error::Parse(format!("unknown mode {other:?}"))),
            };
            let opts = DecideOptions {
                mode,
                seed: common.seed,
                trials: common.trials,
                budget,
                certified,
                verify,
            };
            let decision = decide_any(&g, d, opts)?;
            if common.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&decision_to_json(&decision))?
                );
            } else {
                println!(
                    "{}: {:?} via {:?}",
                    graph.display(),
                    decision.verdict,
                    decision.method
                );
                if let Some((orientation, evidence)) = &decision.certificate {
                    println!(
                        "certificate: {} sources, {} sinks, balanced={}",
                        evidence.sources.len(),
                        evidence.sinks.len(),
                        evidence.balanced
                    );
                    println!("{}", orientation_to_json(orientation));
                }
                if let Some(agreement) = decision.agreement {
                    println!("oracle agreement: {agreement}");
                }
            }
            Ok(verdict_code(decision.verdict))
        }
        Command::Oracle {
            graph,
            common,
            modp,
        } => {
            let (g, d) = load_graph(&graph, common.dim)?;
            let report = if modp {
                oracle_decide_mod_p(&g, d, common.seed, common.trials)?
            } else {
                oracle_decide(&g, d, common.seed, common.trials)?
            };
            if common.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!(
                    "rank {} | right kernel {} | left kernel {} | {:?}",
                    report.rank, report.right_kernel_dim, report.left_kernel_dim, report.verdict
                );
            }
            Ok(verdict_code(report.verdict))
        }
        Command::Straighten { input, cap, json } => {
            let text = match input.as_deref() {
                Some(p) if p != Path::new("-") => std::fs::read_to_string(p)?,
                _ => {
                    let mut buf = String::new();
                    std::io::stdin().read_to_string(&mut buf)?;
                    buf
                }
            };
            let poly = parse_poly(&text)?;
            let normal = straighten_with_cap(&poly, cap)?;
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "input_terms": poly.num_terms(),
                        "normal_form": format_poly(&normal),
                        "zero": normal.is_zero(),
                    })
                );
            } else {
                println!("{}", format_poly(&normal));
            }
            Ok(0)
        }
        Command::Balanced {
            graph,
            orientation,
            common,
            certified,
        } => {
            let (g, d) = load_graph(&graph, common.dim)?;
            let o = load_orientation(&orientation)?;
            let validity = check_validity(&o, &g, d)?;
            if !validity.valid {
                eprintln!(
                    "orientation is not valid: {}",
                    validity.violations.join("; ")
                );
                return Ok(EXIT_USAGE);
            }
            let mode = if certified {
                BalanceMode::Certified
            } else {
                BalanceMode::Probabilistic
            };
            let evidence = is_balanced_with(&o, d, mode, common.seed, common.trials.max(1))?;
            if common.json {
                println!("{}", serde_json::to_string_pretty(&evidence)?);
            } else {
                println!(
                    "balanced: {} ({} sources, {} sinks, mode {:?}, seed {})",
                    evidence.balanced,
                    evidence.sources.len(),
                    evidence.sinks.len(),
                    evidence.mode,
                    evidence.seed
                );
                for r in &evidence.sigma_results {
                    let nf = r.normal_form.as_deref().unwrap_or("-");
                    println!("  sigma {:?}: zero={} normal_form={}", r.sigma, r.zero, nf);
                }
            }
            Ok(if evidence.balanced {
                EXIT_FLEXIBLE
            } else {
                EXIT_RIGID
            })
        }
        Command::Stress {
            graph,
            orientation,
            common,
            sinks,
        } => {
            let (g, d) = load_graph(&graph, common.dim)?;
            let o = load_orientation(&orientation)?;
            let explicit = sinks.map(|p| load_sink_values(&p)).transpose()?;
            // singular placements resample with the next seed, up to 10 tries
            let (placement, w) = with_generic_placement(&g, d, common.seed, 10, |p| {
                let values = match &explicit {
                    Some(v) => v.clone(),
                    None => {
                        let sys = solve_sink_system(&o, p, d)?;
                        match sys.nullspace.first() {
                            Some(v) => sys.sinks.iter().copied().zip(v.iter().cloned()).collect(),
                            None => {
                                return Err(Error::PreconditionViolated(
                                    "sink system has no nonzero solution".into(),
                                ))
                            }
                        }
                    }
                };
                Ok((p.clone(), synthesize_stress(&o, p, d, &values)?))
            })?;
            let report = verify_stress(&g, &placement, &w)?;
            if common.json {
                let values: serde_json::Map<String, serde_json::Value> = w
                    .values
                    .iter()
                    .map(|(e, v)| {
                        (
                            format!("{},{}", e.a, e.b),
                            serde_json::Value::String(q_to_string(v)),
                        )
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "w": values,
                        "residuals": report,
                        "seed": common.seed,
                    }))?
                );
            } else {
                for (e, v) in &w.values {
                    println!("w[{e}] = {}", q_to_string(v));
                }
                println!("residuals zero: {}", report.pass);
            }
            Ok(if report.pass { 0 } else { EXIT_USAGE })
        }
        Command::Certificate { graph, common } => {
            let (g, d) = load_graph(&graph, common.dim)?;
            match certificate_from_kernel(&g, d, common.seed)? {
                None => {
                    if common.json {
                        println!("{}", serde_json::json!({ "certificate": null }));
                    } else {
                        println!("no self-stress: graph is rigid");
                    }
                    Ok(EXIT_RIGID)
                }
                Some(o) => {
                    if common.json {
                        let cert: serde_json::Value =
                            serde_json::from_str(&orientation_to_json(&o))?;
                        println!("{}", serde_json::to_string_pretty(&cert)?);
                    } else {
                        println!("{}", orientation_to_json(&o));
                    }
                    Ok(EXIT_FLEXIBLE)
                }
            }
        }
        Command::Reduce { graph, common } => {
            let (g, d) = load_graph(&graph, common.dim)?;
            match reduce_surplus(&g, d, common.seed, common.trials) {
                Ok(reduced) => {
                    println!("{}", graph_to_json(&reduced, Some(d)));
                    Ok(0)
                }
                Err(Error::CannotReduce { rank, bound }) => {
                    eprintln!(
                        "cannot reduce: rank {rank} < tight bound {bound}; graph is flexible"
                    );
                    Ok(EXIT_FLEXIBLE)
                }
                Err(e) => Err(e),
            }
        }
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Rigid => EXIT_RIGID,
        Verdict::Flexible => EXIT_FLEXIBLE,
    }
}

fn load_graph(path: &Path, dim_flag: Option<u32>) -> Result<(Graph, u32), Error> {
    let text = std::fs::read_to_string(path)?;
    let (g, d_file) = graph_from_json(&text)?;
    validate_graph(&g)?;
    let d = dim_flag
        .or(d_file)
        .ok_or_else(|| Error::Parse("no dimension: pass --dim or a \"d\" field".into()))?;
    if d == 0 {
        return Err(Error::Parse("dimension must be positive".into()));
    }
    Ok((g, d))
}

fn load_orientation(path: &Path) -> Result<Orientation, Error> {
    orientation_from_json(&std::fs::read_to_string(path)?)
}

/// Sink values as a JSON object mapping "i,j" to integers or "num/den".
fn load_sink_values(path: &Path) -> Result<BTreeMap<Edge, rigidity::Q>, Error> {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("sink values must be a JSON object".into()))?;
    let mut out = BTreeMap::new();
    for (k, val) in obj {
        let (a, b) = k
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad edge key {k:?}, expected \"i,j\"")))?;
        let a: u32 = a
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad vertex {a:?}")))?;
        let b: u32 = b
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad vertex {b:?}")))?;
        out.insert(Edge::new(a, b), q_from_json(val)?);
    }
    Ok(out)
}
