//! `cso` command line. Exit status: 0 on success, 2 when the instance is
//! unfeasible, 1 on usage, input or I/O errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algorithms::{solve, ProblemSpec, QuerySet, SolveConfig, Variant};
use crate::graph::{load_edge_list, LabeledGraph, Vertex};
use crate::oracle::{oracle_solve_with, OracleConfig};
use crate::workload::{
    generate_query, load_communities_for, rows_to_csv, run_sweep, solution_metrics, ExperimentConfig, QueryGenParams,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNFEASIBLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cso", version, about = "Community search with outliers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimise the diameter subject to a minimum degree.
    MinDiam {
        #[command(flatten)]
        common: SolveArgs,
        #[arg(long)]
        delta_min: usize,
        /// Start a peel from every query vertex, not just k + 1 of them.
        #[arg(long)]
        all_starts: bool,
    },
    /// Maximise the minimum degree subject to a diameter bound.
    MaxDegDiam {
        #[command(flatten)]
        common: SolveArgs,
        #[arg(long)]
        diam_max: usize,
        #[arg(long)]
        all_starts: bool,
    },
    /// Maximise the minimum degree subject to a distance-to-query bound.
    MaxDegDist {
        #[command(flatten)]
        common: SolveArgs,
        #[arg(long)]
        d_max: usize,
        /// Skip the distance-pruning preprocessing.
        #[arg(long)]
        no_prune: bool,
    },
    /// Brute-force optimum on a small graph.
    Oracle {
        #[command(flatten)]
        common: SolveArgs,
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        delta_min: Option<usize>,
        #[arg(long)]
        diam_max: Option<usize>,
        #[arg(long)]
        d_max: Option<usize>,
        #[arg(long, default_value_t = 20)]
        max_vertices: usize,
    },
    /// Draw a query set from a community file.
    GenQueries {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        communities: PathBuf,
        #[arg(long)]
        n_same: usize,
        #[arg(long, default_value_t = 0)]
        m_other: usize,
        #[arg(long, default_value_t = 0)]
        span: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run a parameter sweep and write one CSV row per (param, k).
    Sweep {
        /// File of key=value lines.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Extra key=value settings, applied after the config file.
        settings: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Comma-separated query vertex ids.
    #[arg(long, conflicts_with = "queries_file", required_unless_present = "queries_file")]
    pub queries: Option<String>,
    /// File with one query vertex id per line.
    #[arg(long)]
    pub queries_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    MinDiam,
    MaxDegDiam,
    MaxDegDist,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::MinDiam => Variant::MinDiamMinDeg,
            VariantArg::MaxDegDiam => Variant::MaxMinDegDiam,
            VariantArg::MaxDegDist => Variant::MaxMinDegDist,
        }
    }
}

/// Parses `args` (program name first) and runs the command. Output goes to
/// `stdout` unless `--out` is given; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> anyhow::Result<i32> {
    match command {
        Command::MinDiam { common, delta_min, all_starts } => solve_command(
            &common,
            ProblemSpec::min_diam(delta_min),
            SolveConfig { all_starts, ..Default::default() },
            stdout,
        ),
        Command::MaxDegDiam { common, diam_max, all_starts } => solve_command(
            &common,
            ProblemSpec::max_deg_diam(diam_max),
            SolveConfig { all_starts, ..Default::default() },
            stdout,
        ),
        Command::MaxDegDist { common, d_max, no_prune } => solve_command(
            &common,
            ProblemSpec::max_deg_dist(d_max),
            SolveConfig { use_pruning: !no_prune, ..Default::default() },
            stdout,
        ),
        Command::Oracle { common, variant, delta_min, diam_max, d_max, max_vertices } => {
            let variant = Variant::from(variant);
            let parameter = match variant {
                Variant::MinDiamMinDeg => delta_min.ok_or_else(|| anyhow!("--delta-min is required"))?,
                Variant::MaxMinDegDiam => diam_max.ok_or_else(|| anyhow!("--diam-max is required"))?,
                Variant::MaxMinDegDist => d_max.ok_or_else(|| anyhow!("--d-max is required"))?,
            };
            let spec = ProblemSpec::new(variant, parameter)?;
            let lg = read_graph(&common.graph)?;
            let qs = read_queries(&common, &lg)?;
            let cfg = OracleConfig { max_vertices, ..Default::default() };
            let res = oracle_solve_with(&lg.graph, &qs, &spec, &cfg)?;
            let witness = res.witnesses.first().map(|w| original_ids(&lg, w));
            let doc = json!({
                "variant": variant.name(),
                "parameters": parameters(&spec, &qs, &lg),
                "optimum": res.optimum,
                "witness": witness,
                "count": res.count,
            });
            emit(&common.out, &format!("{doc}\n"), stdout)?;
            Ok(if res.feasible() { EXIT_OK } else { EXIT_UNFEASIBLE })
        }
        Command::GenQueries { graph, communities, n_same, m_other, span, seed, out, format } => {
            let lg = read_graph(&graph)?;
            let membership = load_communities_for(BufReader::new(open(&communities)?), &lg)
                .with_context(|| format!("reading {}", communities.display()))?;
            let q = generate_query(lg.graph.n(), &membership, &QueryGenParams { n_same, m_other, span, seed })?;
            let ids = original_ids(&lg, &q);
            let text = match format {
                Some(Format::Json) => format!("{}\n", json!({ "queries": ids, "seed": seed })),
                _ => ids.iter().map(|id| format!("{id}\n")).collect(),
            };
            emit(&out, &text, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Sweep { config, settings, out, format } => {
            let mut cfg = match &config {
                Some(p) => ExperimentConfig::parse(
                    &std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
                )?,
                None => ExperimentConfig::default(),
            };
            for s in &settings {
                cfg.apply(s)?;
            }
            if out.is_some() {
                cfg.out = out;
            }
            let rows = run_sweep(&cfg)?;
            let text = match format {
                Format::Csv => rows_to_csv(&rows),
                Format::Json => format!("{}\n", serde_json::to_string(&rows)?),
            };
            emit(&cfg.out, &text, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

fn solve_command(
    common: &SolveArgs,
    spec: ProblemSpec,
    cfg: SolveConfig,
    stdout: &mut dyn Write,
) -> anyhow::Result<i32> {
    if common.format != Format::Json {
        bail!("solver output is json only; csv is for sweep");
    }
    spec.validate()?;
    let lg = read_graph(&common.graph)?;
    let qs = read_queries(common, &lg)?;

    let start = Instant::now();
    let sol = solve(&lg.graph, &qs, &spec, &cfg)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

    let metrics = if sol.feasible { Some(solution_metrics(&lg.graph, &sol, &qs, runtime_ms)?) } else { None };
    let doc = json!({
        "variant": spec.variant.name(),
        "parameters": parameters(&spec, &qs, &lg),
        "feasible": sol.feasible,
        "objective": sol.objective,
        "vertices": original_ids(&lg, &sol.vertices),
        "metrics": metrics,
        "runtime_ms": runtime_ms,
    });
    emit(&common.out, &format!("{doc}\n"), stdout)?;
    Ok(if sol.feasible { EXIT_OK } else { EXIT_UNFEASIBLE })
}

fn parameters(spec: &ProblemSpec, qs: &QuerySet, lg: &LabeledGraph) -> Value {
    let mut p = serde_json::Map::new();
    p.insert(spec.variant.parameter_name().into(), json!(spec.parameter));
    p.insert("k".into(), json!(qs.k()));
    p.insert("queries".into(), json!(original_ids(lg, qs.vertices())));
    Value::Object(p)
}

fn original_ids(lg: &LabeledGraph, vs: &[Vertex]) -> Vec<u64> {
    let mut ids: Vec<u64> = vs.iter().map(|&v| lg.original_id(v)).collect();
    ids.sort_unstable();
    ids
}

fn open(path: &Path) -> anyhow::Result<File> {
    File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

fn read_graph(path: &Path) -> anyhow::Result<LabeledGraph> {
    load_edge_list(BufReader::new(open(path)?)).with_context(|| format!("reading {}", path.display()))
}

fn read_queries(common: &SolveArgs, lg: &LabeledGraph) -> anyhow::Result<QuerySet> {
    let ids: Vec<u64> = match (&common.queries, &common.queries_file) {
        (Some(inline), _) => inline
            .split(',')
            .map(|t| t.trim().parse::<u64>().with_context(|| format!("bad query id {t:?}")))
            .collect::<anyhow::Result<_>>()?,
        (None, Some(path)) => std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|t| t.parse::<u64>().with_context(|| format!("bad query id {t:?}")))
            .collect::<anyhow::Result<_>>()?,
        (None, None) => bail!("one of --queries or --queries-file is required"),
    };
    let dense = ids
        .iter()
        .map(|&id| lg.dense_id(id).ok_or_else(|| anyhow!("query vertex {id} is not in the graph")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(QuerySet::new(&lg.graph, dense, common.k)?)
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => stdout.write_all(text.as_bytes()).context("writing stdout"),
    }
}
