//! The `gcrtool` command line.
//!
//! JSON is the canonical output; `text` and `csv` are renderings of the same
//! JSON value. Errors print one line `error[<kind>]: <message>` on stderr
//! and exit with a code of at least 10, leaving 0, 1 and 2 for the
//! `mle-check` verdicts.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::completion::GPartialMatrix;
use crate::error::{Error, Result};
use crate::gcr::{gcr_bipartite, gcr_dispatch, gcr_randomized, DEFAULT_TRIALS};
use crate::graph::{
    clique_separator_decomposition, is_chordal, k_core, maximum_clique, treewidth_at_most_2,
    treewidth_upper_bound, Generator, Graph,
};
use crate::linalg::DEFAULT_RANK_TOL;
use crate::mlt::{
    existence_frequency, mlt_bipartite, mlt_dispatch, pd_completion_exists, ExistenceOptions,
    ExistenceStatus, MltOptions,
};

#[derive(Debug, Parser)]
#[command(name = "gcrtool", version, about = "Generic completion rank and maximum likelihood threshold of graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Trials for randomized rank tests.
    #[arg(long, global = true, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative numerical tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_RANK_TOL)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structural invariants and the clique-sum atoms.
    Invariants {
        /// Edge-list file or generator token (complete:n, bipartite:m:n,
        /// cycle:n, path:n, wheel:k, figure1).
        graph: String,
    },
    /// Generic completion rank.
    Gcr { graph: String },
    /// Maximum likelihood threshold bounds and exact values.
    Mlt {
        graph: String,
        /// Monte Carlo trials per rank when the value is not exact.
        #[arg(long, default_value_t = 0)]
        mc_trials: usize,
    },
    /// Complete bipartite table.
    Table {
        #[arg(long, default_value_t = 5)]
        m_max: usize,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        /// Monte Carlo trials at the threshold and one below; 0 skips.
        #[arg(long, default_value_t = 0)]
        mc_trials: usize,
    },
    /// Decide whether a partial matrix has a positive definite completion.
    MleCheck {
        /// Partial matrix JSON file.
        matrix: PathBuf,
        /// Expected pattern; the matrix must match it.
        #[arg(long)]
        graph: Option<String>,
    },
}

fn error_kind(e: &Error) -> (&'static str, i32) {
    match e {
        Error::Parse { .. } | Error::VertexOutOfRange { .. } | Error::DuplicateEdge { .. } => ("parse", 10),
        Error::PatternMismatch(_) => ("pattern", 10),
        Error::Json(_) => ("json", 10),
        Error::Io(_) => ("io", 11),
        Error::InvalidParameter(_) | Error::DimensionMismatch(_) => ("parameter", 12),
        _ => ("engine", 13),
    }
}

/// Runs the tool; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            let first = first.trim_start_matches("error: ");
            let _ = writeln!(err, "error[usage]: {first}");
            return 10;
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &text).map_err(Error::from),
                None => out.write_all(text.as_bytes()).map_err(Error::from),
            };
            match written {
                Ok(()) => code,
                Err(e) => report_error(err, &e),
            }
        }
        Err(e) => report_error(err, &e),
    }
}

fn report_error(err: &mut dyn Write, e: &Error) -> i32 {
    let (kind, code) = error_kind(e);
    let line = e.to_string().replace('\n', " ");
    let _ = writeln!(err, "error[{kind}]: {line}");
    code
}

/// Resolves a file path (when it exists) or a generator token.
pub fn load_graph(source: &str) -> Result<Graph> {
    let path = Path::new(source);
    if path.is_file() {
        return Graph::parse_edge_list(&std::fs::read_to_string(path)?);
    }
    match source.parse::<Generator>() {
        Ok(g) => g.build(),
        Err(_) => Err(Error::Io(format!(
            "{source}: no such file and not a generator token"
        ))),
    }
}

fn execute(cli: &Cli) -> Result<(String, i32)> {
    let (value, code) = match &cli.command {
        Command::Invariants { graph } => (to_value(&invariants(&load_graph(graph)?))?, 0),
        Command::Gcr { graph } => {
            let g = load_graph(graph)?;
            (to_value(&gcr_dispatch(&g, cli.trials, cli.seed))?, 0)
        }
        Command::Mlt { graph, mc_trials } => {
            let g = load_graph(graph)?;
            let opts = MltOptions {
                gcr_trials: cli.trials,
                mc_trials: *mc_trials,
                seed: cli.seed,
                existence: ExistenceOptions {
                    tol: cli.tol,
                    ..ExistenceOptions::default()
                },
            };
            (to_value(&mlt_dispatch(&g, &opts)?)?, 0)
        }
        Command::Table { m_max, n_max, mc_trials } => {
            (to_value(&table(*m_max, *n_max, cli.trials, *mc_trials, cli.seed, cli.tol)?)?, 0)
        }
        Command::MleCheck { matrix, graph } => {
            let text = std::fs::read_to_string(matrix)
                .map_err(|e| Error::Io(format!("{}: {e}", matrix.display())))?;
            let p: GPartialMatrix = serde_json::from_str(&text)
                .map_err(|e| Error::Json(format!("{}: {e}", matrix.display())))?;
            if let Some(source) = graph {
                let g = load_graph(source)?;
                if &g != p.graph() {
                    return Err(Error::PatternMismatch(format!(
                        "matrix pattern differs from {source}"
                    )));
                }
            }
            let opts = ExistenceOptions {
                tol: cli.tol,
                ..ExistenceOptions::default()
            };
            let verdict = pd_completion_exists(&p, &opts)?;
            let code = match verdict.status {
                ExistenceStatus::Exists => 0,
                ExistenceStatus::NotExists => 1,
                ExistenceStatus::Undetermined => 2,
            };
            (to_value(&verdict)?, code)
        }
    };
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value)?;
            s.push('\n');
            s
        }
        Format::Text => render_text(&value),
        Format::Csv => render_csv(&value),
    };
    Ok((text, code))
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreSize {
    pub k: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantsReport {
    pub n: usize,
    pub m: usize,
    pub clique_number: usize,
    /// 1-based labels.
    pub maximum_clique: Vec<usize>,
    pub chordal: bool,
    pub treewidth_upper_bound: usize,
    pub treewidth_at_most_2: bool,
    /// Largest `k` with a nonempty `k`-core.
    pub degeneracy: usize,
    pub core_profile: Vec<CoreSize>,
    pub atoms: Vec<Vec<usize>>,
}

pub fn invariants(g: &Graph) -> InvariantsReport {
    let one_based = |v: &[usize]| v.iter().map(|&x| x + 1).collect::<Vec<_>>();
    let mut core_profile = Vec::new();
    for k in 1.. {
        let size = k_core(g, k).vertices.len();
        core_profile.push(CoreSize { k, size });
        if size == 0 {
            break;
        }
    }
    let degeneracy = core_profile.iter().filter(|c| c.size > 0).map(|c| c.k).max().unwrap_or(0);
    let mut clique = maximum_clique(g);
    clique.sort_unstable();
    let tree = clique_separator_decomposition(g);
    InvariantsReport {
        n: g.n(),
        m: g.edge_count(),
        clique_number: clique.len(),
        maximum_clique: one_based(&clique),
        chordal: is_chordal(g).is_some(),
        treewidth_upper_bound: treewidth_upper_bound(g),
        treewidth_at_most_2: treewidth_at_most_2(g),
        degeneracy,
        core_profile,
        atoms: tree.atoms.iter().map(|a| one_based(a)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub m: usize,
    pub n: usize,
    pub gcr_closed: usize,
    pub gcr_randomized: usize,
    pub mlt_closed: usize,
    pub mc_frequency_at_mlt: Option<f64>,
    pub mc_frequency_below: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub seed: u64,
    pub trials: usize,
    pub mc_trials: usize,
    pub rows: Vec<TableRow>,
}

pub fn table(m_max: usize, n_max: usize, trials: usize, mc_trials: usize, seed: u64, tol: f64) -> Result<Table> {
    if m_max < 2 || n_max < 2 {
        return Err(Error::InvalidParameter("table bounds must be at least 2".into()));
    }
    let opts = ExistenceOptions {
        tol,
        ..ExistenceOptions::default()
    };
    let mut rows = Vec::new();
    for m in 2..=m_max {
        for n in m..=n_max {
            let g = Generator::Bipartite(m, n).build()?;
            let mlt = mlt_bipartite(m, n)?;
            let freq = |r: usize| -> Result<Option<f64>> {
                if mc_trials == 0 || r == 0 {
                    return Ok(None);
                }
                Ok(Some(existence_frequency(&g, r, mc_trials, seed, &opts)?.frequency))
            };
            rows.push(TableRow {
                m,
                n,
                gcr_closed: gcr_bipartite(m, n)?,
                gcr_randomized: gcr_randomized(&g, trials.max(1), seed),
                mlt_closed: mlt,
                mc_frequency_at_mlt: freq(mlt)?,
                mc_frequency_below: freq(mlt - 1)?,
            });
        }
    }
    Ok(Table {
        seed,
        trials,
        mc_trials,
        rows,
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Indented `key: value` lines.
pub fn render_text(v: &Value) -> String {
    fn walk(v: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    match x {
                        Value::Object(_) | Value::Array(_) if !is_flat(x) => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            walk(x, indent + 1, out);
                        }
                        _ => out.push_str(&format!("{pad}{k}: {}\n", inline(x))),
                    }
                }
            }
            Value::Array(items) => {
                for x in items {
                    if is_flat(x) {
                        out.push_str(&format!("{pad}- {}\n", inline(x)));
                    } else {
                        out.push_str(&format!("{pad}-\n"));
                        walk(x, indent + 1, out);
                    }
                }
            }
            other => out.push_str(&format!("{pad}{}\n", inline(other))),
        }
    }
    fn is_flat(v: &Value) -> bool {
        match v {
            Value::Array(items) => items.iter().all(|x| !x.is_object() && !x.is_array() || is_flat_array(x)),
            Value::Object(_) => false,
            _ => true,
        }
    }
    fn is_flat_array(v: &Value) -> bool {
        matches!(v, Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()))
    }
    fn inline(v: &Value) -> String {
        match v {
            Value::Array(items) => format!(
                "[{}]",
                items.iter().map(inline).collect::<Vec<_>>().join(", ")
            ),
            other => scalar(other),
        }
    }
    let mut out = String::new();
    walk(v, 0, &mut out);
    out
}

/// One header and one row of the scalar top-level fields, or one row per
/// element when the value carries a `rows` array. Run parameters of a
/// table go to a leading `#` line.
pub fn render_csv(v: &Value) -> String {
    let scalars = |map: &serde_json::Map<String, Value>| -> Vec<(String, String)> {
        map.iter()
            .filter(|(_, x)| !x.is_object() && !x.is_array())
            .map(|(k, x)| (k.clone(), scalar(x)))
            .collect()
    };
    let mut out = String::new();
    let Value::Object(map) = v else {
        return format!("{}\n", scalar(v));
    };
    if let Some(Value::Array(rows)) = map.get("rows") {
        let header = scalars(map)
            .iter()
            .map(|(k, x)| format!("{k}={x}"))
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!("# {header}\n"));
        let mut keys: Option<Vec<String>> = None;
        for row in rows {
            let Value::Object(r) = row else { continue };
            let cells = scalars(r);
            if keys.is_none() {
                let k: Vec<String> = cells.iter().map(|(k, _)| k.clone()).collect();
                out.push_str(&k.join(","));
                out.push('\n');
                keys = Some(k);
            }
            out.push_str(&cells.iter().map(|(_, x)| x.clone()).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        return out;
    }
    let cells = scalars(map);
    out.push_str(&cells.iter().map(|(k, _)| k.clone()).collect::<Vec<_>>().join(","));
    out.push('\n');
    out.push_str(&cells.iter().map(|(_, x)| x.clone()).collect::<Vec<_>>().join(","));
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["gcrtool"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn invariants_of_figure1() {
        let (code, out, _) = call(&["invariants", "figure1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["clique_number"], 2);
        let profile = v["core_profile"].as_array().unwrap();
        assert_eq!(profile[2]["k"], 3);
        assert_eq!(profile[2]["size"], 0);
    }

    #[test]
    fn bipartite_invariants_and_values() {
        let (_, out, _) = call(&["invariants", "bipartite:5:5"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["clique_number"], 2);
        assert_eq!(v["treewidth_upper_bound"], 5);

        let (_, out, _) = call(&["gcr", "bipartite:5:5"]);
        assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["value"], 5);
        let (_, out, _) = call(&["mlt", "bipartite:5:5"]);
        assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["exact"], 4);
        let (_, out, _) = call(&["mlt", "cycle:5"]);
        assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["exact"], 3);
    }

    #[test]
    fn errors_are_single_line_with_codes() {
        let (code, _, err) = call(&["gcr", "nosuch:3"]);
        assert_eq!(code, 11);
        assert!(err.starts_with("error[io]: "));
        assert_eq!(err.lines().count(), 1);

        let (code, _, err) = call(&["gcr", "cycle:2"]);
        assert_eq!(code, 12);
        assert!(err.starts_with("error[parameter]: "));

        let (code, _, err) = call(&["frobnicate"]);
        assert_eq!(code, 10);
        assert!(err.starts_with("error[usage]: "));
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn formats_render_same_report() {
        let (_, csv, _) = call(&["gcr", "complete:4", "--format", "csv"]);
        let mut lines = csv.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        let at = header.iter().position(|&h| h == "value").unwrap();
        assert_eq!(row[at], "4");
        let at = header.iter().position(|&h| h == "seed").unwrap();
        assert_eq!(row[at], "0");

        let (_, text, _) = call(&["gcr", "complete:4", "--format", "text"]);
        assert!(text.lines().any(|l| l == "value: 4"));
        assert!(text.lines().any(|l| l == "seed: 0"));
    }

    #[test]
    fn table_rows() {
        let t = table(5, 7, 5, 0, 0, 1e-8).unwrap();
        let find = |m, n| t.rows.iter().find(|r| r.m == m && r.n == n).unwrap();
        assert_eq!((find(5, 5).gcr_closed, find(5, 5).mlt_closed), (5, 4));
        assert_eq!((find(3, 3).gcr_closed, find(3, 3).mlt_closed), (3, 3));
        assert_eq!((find(4, 7).gcr_closed, find(4, 7).mlt_closed), (5, 5));
        assert!(t.rows.iter().all(|r| r.gcr_closed == r.gcr_randomized));

        let csv = render_csv(&serde_json::to_value(&t).unwrap());
        assert!(csv.starts_with("# "));
        assert!(csv.lines().nth(1).unwrap().contains("gcr_closed"));
    }

    #[test]
    fn deterministic_output() {
        let a = call(&["gcr", "wheel:6", "--seed", "7"]);
        let b = call(&["gcr", "wheel:6", "--seed", "7"]);
        assert_eq!(a, b);
        assert!(a.1.contains("\"seed\": 7"));
    }
}
