//! `rendezvous` — expected meeting time of two random walks on regular
//! graphs, by spectral, exact absorbing, relative-chain, and Monte Carlo
//! methods.

mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use output::{
    fmt_float, render_conjecture1_records, render_conjecture2_records, render_method_records,
    render_scaling_records, Conjecture1Record, Conjecture2Record, Format, MethodRecord,
    ScalingRecord,
};
use rendezvous_core::analysis::{
    conjecture1_experiment, conjecture2_check, derive_seed, scaling_study, Conjecture2Report,
    Family,
};
use rendezvous_core::graphs::{
    build_circle, build_torus, random_regular, read_graph, RegularGraph,
};
use rendezvous_core::meeting::{
    absorbing_meeting_time, relative_meeting_time, spectral_meeting_time, MeetingEstimate,
};
use rendezvous_core::montecarlo::{simulate_meeting, McConfig, DEFAULT_MAX_STEPS};
use rendezvous_core::walks::{laplacian, relative_chain, transition_matrix, CircleWalk, TorusWalk};
use rendezvous_core::{Estimate, Walk};

const AFTER_HELP: &str = "\
Seed resolution: --seed, else the RENDEZVOUS_SEED environment variable, else 0.
Identical command + seed produces byte-identical CSV/JSON on stdout.

CSV column order (fixed):
  circle/torus/regular:  method,graph,walk,value,diagnostics,seed
  scaling:               family,n,e_tau,normalizer,ratio
  conjecture1:           n,d,graph_index,graph_seed,mc_seed,spectral,absorbing,
                         rel_discrepancy,mc_mean,mc_half_width,mc_trials,mc_covers_exact
  conjecture2:           graph,n,d,status,property_a..property_e,witness

Floats print with 12 significant digits. Wall times appear only in table
output and on stderr, never in CSV/JSON. Exit codes: 0 success, 1 computation
failure, 2 invalid usage or input.";

#[derive(Parser)]
#[command(
    name = "rendezvous",
    version,
    about = "Expected meeting time of two independent random walks on regular graphs",
    after_long_help = AFTER_HELP,
    after_help = AFTER_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum MethodArg {
    Spectral,
    Absorbing,
    Relative,
    Mc,
    All,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum FamilyArg {
    Circle,
    Torus,
}

#[derive(Debug, Args)]
struct CommonRunArgs {
    /// Estimation method
    #[arg(long, value_enum, default_value_t = MethodArg::All)]
    method: MethodArg,
    /// Monte Carlo trial count
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Per-trial step cap for Monte Carlo
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: u64,
    /// RNG seed (default: RENDEZVOUS_SEED, else 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Meeting time on the N-cycle for a left/right/stay walk
    #[command(allow_negative_numbers = true)]
    Circle {
        /// Number of vertices (>= 3)
        #[arg(long)]
        n: usize,
        /// Probability of moving to i-1
        #[arg(long, default_value_t = 1.0 / 3.0)]
        p1: f64,
        /// Probability of moving to i+1
        #[arg(long, default_value_t = 1.0 / 3.0)]
        p2: f64,
        /// Probability of staying
        #[arg(long, default_value_t = 1.0 / 3.0)]
        p3: f64,
        #[command(flatten)]
        run: CommonRunArgs,
    },
    /// Meeting time on the N x N torus for a five-move walk
    #[command(allow_negative_numbers = true)]
    Torus {
        /// Side length N (>= 3); the graph has N^2 vertices
        #[arg(long)]
        n: usize,
        /// Probabilities for the moves x+1, x-1, y+1, y-1, stay
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = vec![0.2, 0.2, 0.2, 0.2, 0.2])]
        probs: Vec<f64>,
        #[command(flatten)]
        run: CommonRunArgs,
    },
    /// Meeting time of the simple lazy walk on a d-regular graph
    Regular {
        /// Vertex count (with --d; generates a random regular graph)
        #[arg(long, conflicts_with = "graph_file", requires = "d")]
        n: Option<usize>,
        /// Degree
        #[arg(long, conflicts_with = "graph_file", requires = "n")]
        d: Option<usize>,
        /// Edge-list file: header "n d", then one "u v" edge per line
        #[arg(long)]
        graph_file: Option<std::path::PathBuf>,
        #[command(flatten)]
        run: CommonRunArgs,
    },
    /// E[tau] by closed form across sizes, against the conjectured order
    #[command(allow_negative_numbers = true)]
    Scaling {
        /// Graph family
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Comma-separated sizes
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n: Vec<usize>,
        /// Circle walk probabilities (circle family only)
        #[arg(long, requires_all = ["p2", "p3"])]
        p1: Option<f64>,
        #[arg(long, requires_all = ["p1", "p3"])]
        p2: Option<f64>,
        #[arg(long, requires_all = ["p1", "p2"])]
        p3: Option<f64>,
        /// Torus walk probabilities (torus family only)
        #[arg(long, value_delimiter = ',', num_args = 5)]
        probs: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Spectral vs exact vs simulated meeting time on random regular graphs
    Conjecture1 {
        /// Comma-separated vertex counts
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n: Vec<usize>,
        /// Comma-separated degrees
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        d: Vec<usize>,
        /// Graphs per (n, d) cell
        #[arg(long, default_value_t = 1)]
        graphs: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Constructive eigenvector-basis property check on one regular graph
    Conjecture2 {
        #[arg(long, conflicts_with = "graph_file", requires = "d")]
        n: Option<usize>,
        #[arg(long, conflicts_with = "graph_file", requires = "n")]
        d: Option<usize>,
        #[arg(long)]
        graph_file: Option<std::path::PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

enum CliError {
    Usage(String),
    Compute(String),
}

impl CliError {
    fn usage(e: impl ToString) -> Self {
        CliError::Usage(e.to_string())
    }

    fn compute(e: impl ToString) -> Self {
        CliError::Compute(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Compute(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("RENDEZVOUS_SEED") {
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("RENDEZVOUS_SEED is not a valid u64: {raw:?}"))),
        Err(_) => Ok(0),
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Circle { n, p1, p2, p3, run } => {
            let walk = Walk::Circle(CircleWalk::new(p1, p2, p3).map_err(CliError::usage)?);
            let graph = build_circle(n).map_err(CliError::usage)?;
            let descriptor = format!("circle(n={n})");
            let walk_descriptor = format!(
                "p1={};p2={};p3={}",
                fmt_float(p1),
                fmt_float(p2),
                fmt_float(p3)
            );
            let mc_seed = resolve_seed(run.seed)?;
            run_methods(
                &graph,
                &walk,
                descriptor,
                walk_descriptor,
                &run,
                true,
                mc_seed,
            )
        }
        Command::Torus { n, probs, run } => {
            if probs.len() != 5 {
                return Err(CliError::Usage(format!(
                    "--probs needs exactly 5 values, got {}",
                    probs.len()
                )));
            }
            let walk = Walk::Torus(
                TorusWalk::new([probs[0], probs[1], probs[2], probs[3], probs[4]])
                    .map_err(CliError::usage)?,
            );
            let graph = build_torus(n).map_err(CliError::usage)?;
            let descriptor = format!("torus(n={n})");
            let walk_descriptor = format!(
                "probs={}",
                probs
                    .iter()
                    .map(|&p| fmt_float(p))
                    .collect::<Vec<_>>()
                    .join(";")
            );
            let mc_seed = resolve_seed(run.seed)?;
            run_methods(
                &graph,
                &walk,
                descriptor,
                walk_descriptor,
                &run,
                true,
                mc_seed,
            )
        }
        Command::Regular {
            n,
            d,
            graph_file,
            run,
        } => {
            if run.method == MethodArg::Relative {
                return Err(CliError::Usage(
                    "the relative method needs the circle/torus reduction; \
                     use spectral, absorbing, mc, or all"
                        .into(),
                ));
            }
            let seed = resolve_seed(run.seed)?;
            // on generated graphs the seed is consumed by generation, so the
            // simulation draws from a derived stream
            let (graph, descriptor, mc_seed) = match (n, d, graph_file) {
                (Some(n), Some(d), None) => {
                    let graph = random_regular(n, d, seed).map_err(CliError::usage)?;
                    let descriptor = format!("regular(n={n};d={d};seed={seed})");
                    (graph, descriptor, derive_seed(seed, 1))
                }
                (None, None, Some(path)) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        CliError::Usage(format!("cannot read {}: {e}", path.display()))
                    })?;
                    let graph = read_graph(&text).map_err(CliError::usage)?;
                    let descriptor = format!(
                        "file({};n={};d={})",
                        path.display(),
                        graph.n(),
                        graph.degree()
                    );
                    (graph, descriptor, seed)
                }
                _ => {
                    return Err(CliError::Usage(
                        "provide either --n with --d, or --graph-file".into(),
                    ))
                }
            };
            run_methods(
                &graph,
                &Walk::Simple,
                descriptor,
                "simple".into(),
                &run,
                false,
                mc_seed,
            )
        }
        Command::Scaling {
            family,
            n,
            p1,
            p2,
            p3,
            probs,
            format,
        } => cmd_scaling(family, &n, p1, p2, p3, probs, format),
        Command::Conjecture1 {
            n,
            d,
            graphs,
            trials,
            seed,
            format,
        } => cmd_conjecture1(&n, &d, graphs, trials, seed, format),
        Command::Conjecture2 {
            n,
            d,
            graph_file,
            seed,
            format,
        } => cmd_conjecture2(n, d, graph_file, seed, format),
    }
}

fn methods_to_run(method: MethodArg, relative_available: bool) -> Vec<MethodArg> {
    match method {
        MethodArg::All => {
            let mut all = vec![MethodArg::Spectral, MethodArg::Absorbing];
            if relative_available {
                all.push(MethodArg::Relative);
            }
            all.push(MethodArg::Mc);
            all
        }
        one => vec![one],
    }
}

fn estimate_record(
    estimate: &Estimate,
    graph: &str,
    walk: &str,
    seed: u64,
    wall_time_s: f64,
) -> MethodRecord {
    MethodRecord {
        method: estimate.method.name().into(),
        graph: graph.into(),
        walk: walk.into(),
        value: estimate.value,
        diagnostics: estimate.diagnostics.clone(),
        seed,
        wall_time_s,
    }
}

fn run_methods(
    graph: &RegularGraph,
    walk: &Walk,
    graph_descriptor: String,
    walk_descriptor: String,
    run: &CommonRunArgs,
    relative_available: bool,
    mc_seed: u64,
) -> Result<(), CliError> {
    if run.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    if run.max_steps == 0 {
        return Err(CliError::Usage("--max-steps must be at least 1".into()));
    }
    let seed = resolve_seed(run.seed)?;
    if !walk.is_lazy(graph) {
        eprintln!(
            "warning: stay probability is 0; meeting may be impossible from some starts \
             (bipartite parity)"
        );
    }

    let methods = methods_to_run(run.method, relative_available);
    let mut records = Vec::with_capacity(methods.len());
    for method in &methods {
        let started = Instant::now();
        let estimate: MeetingEstimate<f64> = match method {
            MethodArg::Spectral => {
                let p = transition_matrix(graph, walk).map_err(CliError::compute)?;
                let lap = laplacian(&p).map_err(CliError::compute)?;
                spectral_meeting_time(&lap).map_err(CliError::compute)?
            }
            MethodArg::Absorbing => {
                absorbing_meeting_time(graph, walk).map_err(CliError::compute)?
            }
            MethodArg::Relative => {
                let p = transition_matrix(graph, walk).map_err(CliError::compute)?;
                let rc = relative_chain(&p).map_err(CliError::compute)?;
                relative_meeting_time(&rc).map_err(CliError::compute)?
            }
            MethodArg::Mc => {
                let cfg = McConfig {
                    trials: run.trials,
                    seed: mc_seed,
                    max_steps: run.max_steps,
                };
                let result = simulate_meeting(graph, walk, &cfg).map_err(CliError::compute)?;
                if result.truncated > 0 {
                    eprintln!(
                        "warning: {} of {} trials hit the step cap {}",
                        result.truncated, result.trials, run.max_steps
                    );
                }
                result.estimate()
            }
            MethodArg::All => unreachable!("expanded above"),
        };
        let wall = started.elapsed().as_secs_f64();
        eprintln!("{} finished in {:.6}s", estimate.method.name(), wall);
        records.push(estimate_record(
            &estimate,
            &graph_descriptor,
            &walk_descriptor,
            seed,
            wall,
        ));
    }

    if run.method == MethodArg::All {
        let mut max_discrepancy = 0.0f64;
        for a in &records {
            for b in &records {
                max_discrepancy = max_discrepancy.max((a.value - b.value).abs());
            }
        }
        for r in &mut records {
            r.diagnostics
                .insert("max_pairwise_discrepancy".into(), max_discrepancy);
        }
    }

    print!("{}", render_method_records(&records, run.format));
    Ok(())
}

fn cmd_scaling(
    family: FamilyArg,
    sizes: &[usize],
    p1: Option<f64>,
    p2: Option<f64>,
    p3: Option<f64>,
    probs: Option<Vec<f64>>,
    format: Format,
) -> Result<(), CliError> {
    if sizes.is_empty() {
        return Err(CliError::Usage("--n needs at least one size".into()));
    }
    let (family, walk) = match family {
        FamilyArg::Circle => {
            if probs.is_some() {
                return Err(CliError::Usage(
                    "--probs applies to the torus family; use --p1/--p2/--p3".into(),
                ));
            }
            let walk = match (p1, p2, p3) {
                (Some(a), Some(b), Some(c)) => {
                    Walk::Circle(CircleWalk::new(a, b, c).map_err(CliError::usage)?)
                }
                (None, None, None) => Walk::Simple,
                _ => {
                    return Err(CliError::Usage(
                        "--p1/--p2/--p3 must appear together".into(),
                    ))
                }
            };
            (Family::Circle, walk)
        }
        FamilyArg::Torus => {
            if p1.is_some() || p2.is_some() || p3.is_some() {
                return Err(CliError::Usage(
                    "--p1/--p2/--p3 apply to the circle family; use --probs".into(),
                ));
            }
            let walk = match probs {
                Some(p) => {
                    if p.len() != 5 {
                        return Err(CliError::Usage(format!(
                            "--probs needs exactly 5 values, got {}",
                            p.len()
                        )));
                    }
                    Walk::Torus(
                        TorusWalk::new([p[0], p[1], p[2], p[3], p[4]]).map_err(CliError::usage)?,
                    )
                }
                None => Walk::Simple,
            };
            (Family::Torus, walk)
        }
    };

    let rows = scaling_study(family, sizes, &walk).map_err(CliError::compute)?;
    let records: Vec<ScalingRecord> = rows
        .iter()
        .map(|r| ScalingRecord {
            family: family.name().into(),
            n: r.n,
            e_tau: r.e_tau,
            normalizer: r.normalizer,
            ratio: r.ratio,
            wall_time_s: r.wall_time_s,
        })
        .collect();
    for r in &records {
        eprintln!("scaling n={} finished in {:.6}s", r.n, r.wall_time_s);
    }
    print!("{}", render_scaling_records(&records, format));
    Ok(())
}

fn cmd_conjecture1(
    n_list: &[usize],
    d_list: &[usize],
    graphs: usize,
    trials: u64,
    seed: Option<u64>,
    format: Format,
) -> Result<(), CliError> {
    if n_list.is_empty() || d_list.is_empty() {
        return Err(CliError::Usage(
            "--n and --d need at least one value".into(),
        ));
    }
    if graphs == 0 {
        return Err(CliError::Usage("--graphs must be at least 1".into()));
    }
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let seed = resolve_seed(seed)?;
    let mut cells = Vec::with_capacity(n_list.len() * d_list.len());
    for &n in n_list {
        for &d in d_list {
            if d == 0 || d >= n {
                return Err(CliError::Usage(format!("infeasible cell: n={n}, d={d}")));
            }
            if n * d % 2 != 0 {
                return Err(CliError::Usage(format!("n*d must be even: n={n}, d={d}")));
            }
            cells.push((n, d));
        }
    }

    let rows =
        conjecture1_experiment::<f64>(&cells, graphs, trials, seed).map_err(CliError::compute)?;
    let records: Vec<Conjecture1Record> = rows
        .iter()
        .map(|r| Conjecture1Record {
            n: r.n,
            d: r.d,
            graph_index: r.graph_index,
            graph_seed: r.graph_seed,
            mc_seed: r.mc_seed,
            spectral: r.spectral,
            absorbing: r.absorbing,
            rel_discrepancy: r.rel_discrepancy,
            mc_mean: r.mc_mean,
            mc_half_width: r.mc_half_width,
            mc_trials: r.mc_trials,
            mc_covers_exact: r.mc_covers_exact,
        })
        .collect();
    print!("{}", render_conjecture1_records(&records, format));
    Ok(())
}

fn property_label(p: Option<bool>) -> String {
    match p {
        Some(true) => "true".into(),
        Some(false) => "false".into(),
        None => "untested".into(),
    }
}

fn cmd_conjecture2(
    n: Option<usize>,
    d: Option<usize>,
    graph_file: Option<std::path::PathBuf>,
    seed: Option<u64>,
    format: Format,
) -> Result<(), CliError> {
    let seed = resolve_seed(seed)?;
    let (graph, descriptor) = match (n, d, graph_file) {
        (Some(n), Some(d), None) => {
            let graph = random_regular(n, d, seed).map_err(CliError::usage)?;
            (graph, format!("regular(n={n};d={d};seed={seed})"))
        }
        (None, None, Some(path)) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let graph = read_graph(&text).map_err(CliError::usage)?;
            let descriptor = format!(
                "file({};n={};d={})",
                path.display(),
                graph.n(),
                graph.degree()
            );
            (graph, descriptor)
        }
        _ => {
            return Err(CliError::Usage(
                "provide either --n with --d, or --graph-file".into(),
            ))
        }
    };

    let report: Conjecture2Report<f64> = conjecture2_check(&graph).map_err(CliError::compute)?;
    let record = Conjecture2Record {
        graph: descriptor,
        n: graph.n(),
        d: graph.degree(),
        status: report.status.name().into(),
        property_a: property_label(report.properties[0]),
        property_b: property_label(report.properties[1]),
        property_c: property_label(report.properties[2]),
        property_d: property_label(report.properties[3]),
        property_e: property_label(report.properties[4]),
        witness: report.witness.clone(),
        blocking_dimension: report.blocking_dimension,
        adjacency_eigenvalues: report.adjacency_eigenvalues.clone(),
    };
    if let Some(sums) = &report.column_sums {
        let rendered: Vec<String> = sums.iter().map(|&v| format!("{v:.3e}")).collect();
        eprintln!("column sums: [{}]", rendered.join("; "));
    }
    print!("{}", render_conjecture2_records(&[record], format));
    Ok(())
}
