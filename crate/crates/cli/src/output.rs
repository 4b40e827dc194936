//! Output records and the three render targets.
//!
//! CSV and JSON go to stdout and are byte-identical across runs with the
//! same seed, so wall times stay out of them; the human table shows timings
//! and diagnostics go to stderr.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Floats print with 12 significant digits so cross-run diffs are meaningful.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.11e}")
}

fn fmt_diagnostics(diagnostics: &BTreeMap<String, f64>) -> String {
    diagnostics
        .iter()
        .map(|(k, v)| format!("{k}={}", fmt_float(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

/// One method's estimate on one graph/walk pair.
#[derive(Debug, Clone, Serialize)]
pub struct MethodRecord {
    pub method: String,
    pub graph: String,
    pub walk: String,
    pub value: f64,
    pub diagnostics: BTreeMap<String, f64>,
    pub seed: u64,
    #[serde(skip)]
    pub wall_time_s: f64,
}

pub const METHOD_CSV_HEADER: &str = "method,graph,walk,value,diagnostics,seed";

pub fn render_method_records(records: &[MethodRecord], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(METHOD_CSV_HEADER);
            out.push('\n');
            for r in records {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.method,
                    r.graph,
                    r.walk,
                    fmt_float(r.value),
                    fmt_diagnostics(&r.diagnostics),
                    r.seed
                ));
            }
            out
        }
        Format::Json => to_json(records),
        Format::Table => {
            let mut out = format!(
                "{:<10} {:<20} {:>9} {:>12}  {}\n",
                "method", "value", "seed", "wall_time_s", "diagnostics"
            );
            for r in records {
                out.push_str(&format!(
                    "{:<10} {:<20} {:>9} {:>12.6}  {}\n",
                    r.method,
                    fmt_float(r.value),
                    r.seed,
                    r.wall_time_s,
                    fmt_diagnostics(&r.diagnostics)
                ));
            }
            out
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRecord {
    pub family: String,
    pub n: usize,
    pub e_tau: f64,
    pub normalizer: f64,
    pub ratio: f64,
    #[serde(skip)]
    pub wall_time_s: f64,
}

pub const SCALING_CSV_HEADER: &str = "family,n,e_tau,normalizer,ratio";

pub fn render_scaling_records(records: &[ScalingRecord], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(SCALING_CSV_HEADER);
            out.push('\n');
            for r in records {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.family,
                    r.n,
                    fmt_float(r.e_tau),
                    fmt_float(r.normalizer),
                    fmt_float(r.ratio)
                ));
            }
            out
        }
        Format::Json => to_json(records),
        Format::Table => {
            let mut out = format!(
                "{:<8} {:>6} {:>20} {:>20} {:>18} {:>12}\n",
                "family", "n", "e_tau", "normalizer", "ratio", "wall_time_s"
            );
            for r in records {
                out.push_str(&format!(
                    "{:<8} {:>6} {:>20} {:>20} {:>18} {:>12.6}\n",
                    r.family,
                    r.n,
                    fmt_float(r.e_tau),
                    fmt_float(r.normalizer),
                    fmt_float(r.ratio),
                    r.wall_time_s
                ));
            }
            out
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Conjecture1Record {
    pub n: usize,
    pub d: usize,
    pub graph_index: usize,
    pub graph_seed: u64,
    pub mc_seed: u64,
    pub spectral: f64,
    pub absorbing: f64,
    pub rel_discrepancy: f64,
    pub mc_mean: f64,
    pub mc_half_width: f64,
    pub mc_trials: u64,
    pub mc_covers_exact: bool,
}

pub const CONJECTURE1_CSV_HEADER: &str = "n,d,graph_index,graph_seed,mc_seed,spectral,absorbing,\
rel_discrepancy,mc_mean,mc_half_width,mc_trials,mc_covers_exact";

pub fn render_conjecture1_records(records: &[Conjecture1Record], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(CONJECTURE1_CSV_HEADER);
            out.push('\n');
            for r in records {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.n,
                    r.d,
                    r.graph_index,
                    r.graph_seed,
                    r.mc_seed,
                    fmt_float(r.spectral),
                    fmt_float(r.absorbing),
                    fmt_float(r.rel_discrepancy),
                    fmt_float(r.mc_mean),
                    fmt_float(r.mc_half_width),
                    r.mc_trials,
                    r.mc_covers_exact
                ));
            }
            out
        }
        Format::Json => to_json(records),
        Format::Table => {
            let mut out = format!(
                "{:>4} {:>3} {:>5} {:>20} {:>20} {:>14} {:>20} {:>14} {:>7}\n",
                "n",
                "d",
                "graph",
                "spectral",
                "absorbing",
                "discrepancy",
                "mc_mean",
                "mc_hw",
                "covers"
            );
            for r in records {
                out.push_str(&format!(
                    "{:>4} {:>3} {:>5} {:>20} {:>20} {:>14.3e} {:>20} {:>14.3e} {:>7}\n",
                    r.n,
                    r.d,
                    r.graph_index,
                    fmt_float(r.spectral),
                    fmt_float(r.absorbing),
                    r.rel_discrepancy,
                    fmt_float(r.mc_mean),
                    r.mc_half_width,
                    r.mc_covers_exact
                ));
            }
            out
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Conjecture2Record {
    pub graph: String,
    pub n: usize,
    pub d: usize,
    pub status: String,
    pub property_a: String,
    pub property_b: String,
    pub property_c: String,
    pub property_d: String,
    pub property_e: String,
    pub witness: Option<String>,
    pub blocking_dimension: Option<usize>,
    pub adjacency_eigenvalues: Vec<f64>,
}

pub const CONJECTURE2_CSV_HEADER: &str =
    "graph,n,d,status,property_a,property_b,property_c,property_d,property_e,witness";

pub fn render_conjecture2_records(records: &[Conjecture2Record], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(CONJECTURE2_CSV_HEADER);
            out.push('\n');
            for r in records {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    r.graph,
                    r.n,
                    r.d,
                    r.status,
                    r.property_a,
                    r.property_b,
                    r.property_c,
                    r.property_d,
                    r.property_e,
                    r.witness.as_deref().unwrap_or("")
                ));
            }
            out
        }
        Format::Json => to_json(records),
        Format::Table => {
            let mut out = String::new();
            for r in records {
                out.push_str(&format!("graph:  {}\nstatus: {}\n", r.graph, r.status));
                for (name, desc, value) in [
                    ("a", "top eigenvector is all-ones", &r.property_a),
                    ("b", "anchor entries equal 1", &r.property_b),
                    ("c", "non-top entry sums vanish", &r.property_c),
                    ("d", "column sums vanish off the anchor", &r.property_d),
                    ("e", "inner products are n*delta", &r.property_e),
                ] {
                    out.push_str(&format!("  ({name}) {desc}: {value}\n"));
                }
                if let Some(w) = &r.witness {
                    out.push_str(&format!("witness: {w}\n"));
                }
                if let Some(dim) = r.blocking_dimension {
                    out.push_str(&format!("blocking eigenspace dimension: {dim}\n"));
                }
                let eigs: Vec<String> = r
                    .adjacency_eigenvalues
                    .iter()
                    .map(|&v| format!("{v:.6}"))
                    .collect();
                out.push_str(&format!("adjacency eigenvalues: [{}]\n", eigs.join("; ")));
            }
            out
        }
    }
}

fn to_json<S: Serialize>(records: &[S]) -> String {
    let mut out = serde_json::to_string_pretty(records).expect("records serialize without failure");
    out.push('\n');
    out
}
