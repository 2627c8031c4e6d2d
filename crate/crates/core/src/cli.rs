//! Command-line front end for the `msising` binary.
//!
//! [`run`] parses arguments, executes one subcommand and returns the exit
//! code, so the whole CLI can be driven in-process. Settings resolve as
//! flag, then `--config` file (`key = value` lines), then built-in default.
//!
//! Exit codes: 0 success, 1 other failure, 2 bad flags or settings,
//! 3 unreadable or malformed input, 4 instance exceeds a capacity limit.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::experiment::{run_experiment, ExperimentPlan, MethodSummary};
use crate::bench::grid::{grid_search_coloring, grid_search_tsp_onehot, grid_search_tsp_wt, GridBudget, DEFAULT_GRID};
use crate::bench::metrics::count_wrong;
use crate::bench::solve::{run_coloring, Method, MethodParams};
use crate::error::Error;
use crate::generators;
use crate::gibbs::write_history_csv;
use crate::hw::{run_hw, summary_json, FixedPointConfig, HwLimits};
use crate::io::{self, ResultRecord};
use crate::oracles::{exact_min_conflicts, held_karp, Witness};
use crate::problem::{ColoringInstance, TspInstance};
use crate::tempering::PtConfig;
use crate::vectorized;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_CAPACITY: i32 = 4;

/// Default output directory when neither `--out-dir` nor `out_dir` is set.
pub const OUT_DIR_ENV: &str = "MSISING_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "msising-out";
/// Extra directory searched for instance files given by bare name.
pub const DATA_DIR_ENV: &str = "MSISING_DATA_DIR";

const CONFIG_KEYS: [&str; 19] = [
    "seed",
    "jobs",
    "out_dir",
    "format",
    "method",
    "methods",
    "q",
    "temperature",
    "a",
    "b",
    "wt",
    "runs",
    "sweeps",
    "chains",
    "t_low",
    "t_high",
    "swap_interval",
    "threshold",
    "cities",
];

#[derive(Debug, Parser)]
#[command(name = "msising", version, about = "Multi-state probabilistic Ising solvers")]
pub struct Cli {
    /// Settings file with `key = value` lines; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Base random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads [default: all cores].
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory [default: $MSISING_OUT_DIR or ./msising-out].
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Result file format [default: csv].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one method on one coloring instance.
    Solve(SolveArgs),
    /// Run every method in a list on every instance of a manifest.
    Bench(BenchArgs),
    /// Grid-search mapping hyperparameters.
    Grid(GridArgs),
    /// Exact optimum of a small coloring or TSP instance.
    Oracle(OracleArgs),
    /// Fixed-point hardware emulation with projected clock time.
    Hw(HwArgs),
}

/// Sampler settings shared by several subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct SolverArgs {
    /// Solver method (onehot-gibbs, vectorized-gibbs, onehot-pt, vectorized-pt, hw-emu, tabucol).
    #[arg(long)]
    pub method: Option<String>,
    /// Number of colors [default: reference count for known benchmarks].
    #[arg(long)]
    pub q: Option<usize>,
    /// Sampling temperature.
    #[arg(long)]
    pub temperature: Option<f64>,
    /// One-hot edge factor A.
    #[arg(long)]
    pub a: Option<f64>,
    /// One-hot constraint factor B.
    #[arg(long)]
    pub b: Option<f64>,
    /// Independent runs.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Sweeps per run (iterations for tabucol).
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// Parallel tempering replicas.
    #[arg(long)]
    pub chains: Option<usize>,
    /// Lowest ladder temperature.
    #[arg(long)]
    pub t_low: Option<f64>,
    /// Highest ladder temperature.
    #[arg(long)]
    pub t_high: Option<f64>,
    /// Sweeps between replica swap rounds.
    #[arg(long)]
    pub swap_interval: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Graph file (.col, .graph or edge list) or a generated benchmark name.
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Manifest with one `path [q]` entry per line.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated method list [default: vectorized-gibbs].
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// Error-rate threshold for a successful run.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Coloring instance.
    #[arg(long, conflicts_with = "tsp", required_unless_present = "tsp")]
    pub instance: Option<PathBuf>,
    /// TSPLIB instance; grids `wt` for vectorized, `A` and `B` for one-hot.
    #[arg(long)]
    pub tsp: Option<PathBuf>,
    /// Use the first N cities of the TSP instance.
    #[arg(long)]
    pub cities: Option<usize>,
    /// Comma-separated A values.
    #[arg(long, value_delimiter = ',')]
    pub a_grid: Option<Vec<f64>>,
    /// Comma-separated B values.
    #[arg(long, value_delimiter = ',')]
    pub b_grid: Option<Vec<f64>>,
    /// Comma-separated wt values.
    #[arg(long, value_delimiter = ',')]
    pub wt_grid: Option<Vec<f64>>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Coloring instance for exact minimum conflicts.
    #[arg(long, conflicts_with = "tsp", required_unless_present = "tsp")]
    pub instance: Option<PathBuf>,
    /// Number of colors.
    #[arg(long)]
    pub q: Option<usize>,
    /// TSPLIB instance for Held-Karp.
    #[arg(long)]
    pub tsp: Option<PathBuf>,
    /// Use the first N cities of the TSP instance.
    #[arg(long)]
    pub cities: Option<usize>,
}

#[derive(Debug, Args)]
pub struct HwArgs {
    /// Coloring instance.
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) => EXIT_USAGE,
            Error::InvalidInstance(_) | Error::Parse { .. } => EXIT_INPUT,
            Error::Capacity(_) | Error::TooLarge(_) => EXIT_CAPACITY,
            _ => EXIT_FAILURE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Input errors: unreadable files count as bad input, not internal failure.
fn input_err(e: Error) -> CliError {
    let io = matches!(e, Error::Io { .. });
    let mut c = CliError::from(e);
    if io {
        c.code = EXIT_INPUT;
    }
    c
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Values read from a `--config` file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    /// Parses `key = value` lines; `#` starts a comment. Unknown keys and
    /// duplicate keys are errors.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
            let key = k.trim().replace('-', "_");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(format!("config line {}: unknown key `{}`", i + 1, k.trim()));
            }
            if values.insert(key, v.trim().to_string()).is_some() {
                return Err(format!("config line {}: duplicate key `{}`", i + 1, k.trim()));
            }
        }
        Ok(ConfigFile { values })
    }

    fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::usage(format!("config `{key}`: cannot parse `{v}`"))),
        }
    }

    /// Flag value if given, else config value.
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    fn pick_list<T: FromStr>(&self, flag: Option<Vec<T>>, key: &str) -> CliResult<Option<Vec<T>>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|_| CliError::usage(format!("config `{key}`: cannot parse `{x}`")))
                })
                .collect::<CliResult<Vec<T>>>()
                .map(Some),
        }
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub jobs: usize,
    pub out_dir: PathBuf,
    pub format: Format,
    pub method: Option<Method>,
    pub q: Option<usize>,
    pub runs: Option<usize>,
    pub sweeps: Option<usize>,
    pub params: MethodParams,
}

impl Settings {
    fn resolve(cli: &Cli, solver: &SolverArgs, cfg: &ConfigFile) -> CliResult<Self> {
        let jobs = cfg.pick(cli.jobs, "jobs")?.unwrap_or(0);
        let out_dir = match cfg.pick(cli.out_dir.clone(), "out_dir")? {
            Some(d) => d,
            None => std::env::var_os(OUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
        };
        let method = cfg
            .pick(solver.method.clone(), "method")?
            .map(|m: String| m.parse::<Method>())
            .transpose()?;
        let q = cfg.pick(solver.q, "q")?;
        if let Some(q) = q {
            if q < 2 {
                return Err(CliError::usage(format!("--q must be at least 2, got {q}")));
            }
        }
        let base = MethodParams::default();
        let pt = PtConfig {
            num_chains: cfg.pick(solver.chains, "chains")?.unwrap_or(base.pt.num_chains),
            t_low: cfg.pick(solver.t_low, "t_low")?.unwrap_or(base.pt.t_low),
            t_high: cfg.pick(solver.t_high, "t_high")?.unwrap_or(base.pt.t_high),
            swap_interval: cfg.pick(solver.swap_interval, "swap_interval")?.unwrap_or(base.pt.swap_interval),
            ..base.pt.clone()
        };
        pt.validate()?;
        let params = MethodParams {
            temperature: cfg.pick(solver.temperature, "temperature")?.unwrap_or(base.temperature),
            onehot_a: cfg.pick(solver.a, "a")?.unwrap_or(base.onehot_a),
            onehot_b: cfg.pick(solver.b, "b")?.unwrap_or(base.onehot_b),
            pt,
            ..base
        };
        if !(params.temperature > 0.0 && params.temperature.is_finite()) {
            return Err(CliError::usage(format!("temperature must be positive, got {}", params.temperature)));
        }
        let runs = cfg.pick(solver.runs, "runs")?;
        let sweeps = cfg.pick(solver.sweeps, "sweeps")?;
        if runs == Some(0) || sweeps == Some(0) {
            return Err(CliError::usage("runs and sweeps must be at least 1"));
        }
        Ok(Settings {
            seed: cfg.pick(cli.seed, "seed")?.unwrap_or(0),
            jobs,
            out_dir,
            format: cfg.pick(cli.format, "format")?.unwrap_or(Format::Csv),
            method,
            q,
            runs,
            sweeps,
            params,
        })
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Messages go to stdout, errors to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

/// Runs a parsed command and returns what it would print.
pub fn execute(cli: &Cli) -> CliResult<String> {
    let cfg = match &cli.config {
        None => ConfigFile::default(),
        Some(path) => {
            let text = io::read_text(path).map_err(|e| CliError::usage(e.to_string()))?;
            ConfigFile::parse(&text).map_err(CliError::usage)?
        }
    };
    let empty = SolverArgs::default();
    let solver = match &cli.command {
        Command::Solve(a) => &a.solver,
        Command::Bench(a) => &a.solver,
        Command::Grid(a) => &a.solver,
        Command::Hw(a) => &a.solver,
        Command::Oracle(_) => &empty,
    };
    let settings = Settings::resolve(cli, solver, &cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {} worker threads: {e}", settings.jobs)))?;
    pool.install(|| match &cli.command {
        Command::Solve(a) => cmd_solve(a, &settings),
        Command::Bench(a) => cmd_bench(a, &settings, &cfg),
        Command::Grid(a) => cmd_grid(a, &settings, &cfg),
        Command::Oracle(a) => cmd_oracle(a, &settings, &cfg),
        Command::Hw(a) => cmd_hw(a, &settings),
    })
}

fn search_paths(path: &Path, ext: &str) -> Vec<PathBuf> {
    let mut v = vec![path.to_path_buf()];
    if path.extension().is_none() {
        v.push(path.with_extension(ext));
    }
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        let dir = PathBuf::from(dir);
        v.extend(v.clone().into_iter().map(|p| dir.join(p)));
    }
    v
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into())
}

/// Loads a graph from a file, or builds a named generated benchmark when no
/// such file exists. `q` defaults to the reference color count.
pub fn load_coloring(path: &Path, q: Option<usize>) -> CliResult<ColoringInstance> {
    let name = stem(path);
    let found = search_paths(path, "col").into_iter().find(|p| p.is_file());
    let graph = match found {
        Some(p) => io::read_graph(&p).map_err(input_err)?,
        None => match generators::generate(&name) {
            Some(g) if path.parent().is_none_or(|p| p.as_os_str().is_empty()) => g,
            _ => {
                return Err(CliError {
                    code: EXIT_INPUT,
                    message: format!("cannot read instance {}", path.display()),
                })
            }
        },
    };
    let q = match q.or_else(|| generators::lookup(&name).map(|b| b.colors)) {
        Some(q) => q,
        None => return Err(CliError::usage(format!("--q is required for {name}"))),
    };
    ColoringInstance::new(graph, q, name).map_err(|e| CliError::usage(e.to_string()))
}

/// Loads a TSPLIB file; the bare name `burma14` resolves to a bundled copy.
pub fn load_tsp(path: &Path, cities: Option<usize>) -> CliResult<TspInstance> {
    let found = search_paths(path, "tsp").into_iter().find(|p| p.is_file());
    let full = match found {
        Some(p) => io::read_tsp(&p).map_err(input_err)?,
        None if path == Path::new("burma14") => io::parse_tsplib(io::BURMA14_TSP).map_err(input_err)?,
        None => {
            return Err(CliError {
                code: EXIT_INPUT,
                message: format!("cannot read instance {}", path.display()),
            })
        }
    };
    match cities {
        None => Ok(full),
        Some(k) => Ok(full.sub_instance(k)?),
    }
}

fn write_records(records: &[ResultRecord], settings: &Settings, stem: &str) -> CliResult<PathBuf> {
    let (text, ext) = match settings.format {
        Format::Csv => (io::results_to_csv(records)?, "csv"),
        Format::Json => (io::results_to_json(records)?, "json"),
    };
    let path = settings.out_dir.join(format!("{stem}.{ext}"));
    write_file(&path, &text)?;
    Ok(path)
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::from(Error::io(dir, e)))?;
    }
    io::write_text(path, text)?;
    Ok(())
}

fn history_csv(history: &[(usize, f64)]) -> CliResult<String> {
    let mut buf = Vec::new();
    write_history_csv(history, &mut buf)?;
    Ok(String::from_utf8_lossy(&buf).into_owned())
}

fn cmd_solve(args: &SolveArgs, s: &Settings) -> CliResult<String> {
    let inst = load_coloring(&args.instance, s.q)?;
    let method = s.method.unwrap_or(Method::VectorizedGibbs);
    let sweeps = s.sweeps.unwrap_or(1000);
    let r = run_coloring(&inst, method, &s.params, sweeps, s.seed)?;
    let stem = format!("{}_{}", inst.name, method.tag());
    let record = ResultRecord {
        instance: inst.name.clone(),
        method: method.tag().into(),
        run_id: 0,
        seed: s.seed,
        sweeps,
        best_energy: r.best_energy,
        wrong_edges: r.wrong_edges,
        error_rate: r.error_rate,
        wall_time: r.wall_time,
        gap: None,
    };
    let results = write_records(&[record], s, &stem)?;
    let mut out = String::new();
    writeln!(out, "instance: {} ({} nodes, {} edges, q = {})", inst.name, inst.num_nodes(), inst.graph.num_edges(), inst.q).ok();
    writeln!(out, "method: {method}").ok();
    writeln!(out, "best_energy: {}", r.best_energy).ok();
    writeln!(out, "wrong_edges: {}", r.wrong_edges).ok();
    writeln!(out, "error_rate: {}", r.error_rate).ok();
    writeln!(out, "wall_time: {:.6}", r.wall_time).ok();
    if !r.energy_history.is_empty() {
        let trace = s.out_dir.join(format!("{stem}_trace.csv"));
        write_file(&trace, &history_csv(&r.energy_history)?)?;
        writeln!(out, "trace: {}", trace.display()).ok();
    }
    writeln!(out, "results: {}", results.display()).ok();
    Ok(out)
}

/// One manifest entry: path and optional color count.
fn parse_manifest(text: &str, base: &Path) -> CliResult<Vec<(PathBuf, Option<usize>)>> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        let path = PathBuf::from(tok.next().unwrap_or_default());
        let q = tok
            .next()
            .map(|t| t.parse::<usize>())
            .transpose()
            .map_err(|_| CliError::from(Error::parse(i + 1, format!("bad color count in `{line}`"))))?;
        if tok.next().is_some() {
            return Err(Error::parse(i + 1, format!("expected `path [q]`, got `{line}`")).into());
        }
        let resolved = if path.is_relative() && base.join(&path).is_file() {
            base.join(&path)
        } else {
            path
        };
        entries.push((resolved, q));
    }
    if entries.is_empty() {
        return Err(Error::parse(0, "manifest lists no instances").into());
    }
    Ok(entries)
}

fn summary_csv(rows: &[MethodSummary]) -> String {
    let opt = |x: Option<String>| x.unwrap_or_default();
    let mut out = String::from("instance,method,runs,best_wrong_edges,mean_wrong_edges,success_probability,mean_t_comp,tts,error\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.instance,
            r.method,
            r.runs,
            opt(r.best_wrong_edges.map(|x| x.to_string())),
            opt(r.mean_wrong_edges.map(|x| x.to_string())),
            opt(r.success_probability.map(|x| x.to_string())),
            opt(r.mean_t_comp.map(|x| x.to_string())),
            opt(r.tts.map(|x| x.to_string())),
            opt(r.error.as_ref().map(|e| format!("\"{}\"", e.replace('"', "'")))),
        )
        .ok();
    }
    out
}

fn cmd_bench(args: &BenchArgs, s: &Settings, cfg: &ConfigFile) -> CliResult<String> {
    let text = io::read_text(&args.manifest).map_err(input_err)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let entries = parse_manifest(&text, base)?;
    let methods = match cfg.pick_list(args.methods.clone(), "methods")? {
        Some(v) => v.iter().map(|m| m.parse::<Method>()).collect::<Result<Vec<_>, _>>()?,
        None => vec![s.method.unwrap_or(Method::VectorizedGibbs)],
    };
    let mut instances = Vec::new();
    let mut failed = Vec::new();
    for (path, q) in &entries {
        match load_coloring(path, q.or(s.q)) {
            Ok(i) => instances.push(i),
            Err(e) => {
                eprintln!("warning: skipping {}: {}", path.display(), e.message);
                failed.push(MethodSummary {
                    instance: stem(path),
                    method: String::new(),
                    runs: 0,
                    best_wrong_edges: None,
                    mean_wrong_edges: None,
                    success_probability: None,
                    mean_t_comp: None,
                    tts: None,
                    error: Some(e.message),
                });
            }
        }
    }
    if instances.is_empty() {
        return Err(CliError {
            code: EXIT_INPUT,
            message: "no manifest instance could be loaded".into(),
        });
    }
    let mut plan = ExperimentPlan::new(instances, methods);
    plan.runs = s.runs.unwrap_or(plan.runs);
    plan.sweeps = s.sweeps.unwrap_or(plan.sweeps);
    plan.threshold = cfg.pick(args.threshold, "threshold")?.unwrap_or(plan.threshold);
    plan.seed = s.seed;
    plan.params = s.params.clone();
    let mut report = run_experiment(&plan)?;
    report.summaries.extend(failed);

    let mut written = Vec::new();
    if !report.records.is_empty() {
        written.push(write_records(&report.records, s, "bench_results")?);
    }
    let summary_path = match s.format {
        Format::Json => {
            let p = s.out_dir.join("bench_summary.json");
            write_file(&p, &report.summary_json()?)?;
            p
        }
        Format::Csv => {
            let p = s.out_dir.join("bench_summary.csv");
            write_file(&p, &summary_csv(&report.summaries))?;
            p
        }
    };
    written.push(summary_path);
    let mut hist = BTreeMap::<(String, String, usize), usize>::new();
    for r in &report.records {
        *hist.entry((r.instance.clone(), r.method.clone(), r.wrong_edges)).or_default() += 1;
    }
    let mut hist_csv = String::from("instance,method,wrong_edges,count\n");
    for ((i, m, w), c) in &hist {
        writeln!(hist_csv, "{i},{m},{w},{c}").ok();
    }
    let hist_path = s.out_dir.join("bench_error_histogram.csv");
    write_file(&hist_path, &hist_csv)?;
    written.push(hist_path);

    let mut out = format!(
        "{:<14} {:<17} {:>5} {:>6} {:>9} {:>6} {:>12}\n",
        "instance", "method", "runs", "best", "mean", "p_s", "tts_s"
    );
    for r in &report.summaries {
        match &r.error {
            Some(e) => writeln!(out, "{:<14} {:<17} error: {e}", r.instance, r.method).ok(),
            None => writeln!(
                out,
                "{:<14} {:<17} {:>5} {:>6} {:>9.3} {:>6.3} {:>12}",
                r.instance,
                r.method,
                r.runs,
                r.best_wrong_edges.unwrap_or(0),
                r.mean_wrong_edges.unwrap_or(f64::NAN),
                r.success_probability.unwrap_or(f64::NAN),
                r.tts.map(|t| match t.seconds() {
                    Some(x) => format!("{x:.4}"),
                    None => t.to_string(),
                })
                .unwrap_or_default(),
            )
            .ok(),
        };
    }
    for p in written {
        writeln!(out, "wrote {}", p.display()).ok();
    }
    Ok(out)
}

fn cmd_grid(args: &GridArgs, s: &Settings, cfg: &ConfigFile) -> CliResult<String> {
    let a_grid = cfg.pick_list(args.a_grid.clone(), "a")?.unwrap_or(DEFAULT_GRID.to_vec());
    let b_grid = cfg.pick_list(args.b_grid.clone(), "b")?.unwrap_or(DEFAULT_GRID.to_vec());
    let (name, result) = if let Some(tsp) = &args.tsp {
        let inst = load_tsp(tsp, cfg.pick(args.cities, "cities")?)?;
        let opt = held_karp(&inst)?.optimum;
        let budget = GridBudget {
            runs: s.runs.unwrap_or(20),
            sweeps: s.sweeps.unwrap_or(4000),
            seed: s.seed,
        };
        let method = s.method.unwrap_or(Method::VectorizedGibbs);
        let r = match method {
            Method::VectorizedGibbs => {
                let wt = cfg.pick_list(args.wt_grid.clone(), "wt")?.unwrap_or(DEFAULT_GRID.to_vec());
                grid_search_tsp_wt(&inst, opt, &wt, &budget)?
            }
            Method::OnehotGibbs => grid_search_tsp_onehot(&inst, opt, &a_grid, &b_grid, &budget)?,
            m => return Err(CliError::usage(format!("TSP grid supports vectorized-gibbs and onehot-gibbs, not {m}"))),
        };
        (format!("{}_{}", inst.name, method.tag()), r)
    } else {
        let path = args.instance.as_ref().expect("clap requires --instance or --tsp");
        let inst = load_coloring(path, s.q)?;
        let method = s.method.unwrap_or(Method::OnehotGibbs);
        let budget = GridBudget {
            runs: s.runs.unwrap_or(10),
            sweeps: s.sweeps.unwrap_or(1000),
            seed: s.seed,
        };
        let r = grid_search_coloring(&inst, method, &a_grid, &b_grid, &s.params, &budget)?;
        (format!("{}_{}", inst.name, method.tag()), r)
    };
    let path = s.out_dir.join(format!("{name}_grid.csv"));
    write_file(&path, &result.surface_csv()?)?;
    let fmt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
    Ok(format!(
        "points: {}\nbest: a = {}, b = {}, wt = {}, mean_error = {}\nsurface: {}\n",
        result.surface.len(),
        fmt(result.best.a),
        fmt(result.best.b),
        fmt(result.best.wt),
        result.best.mean_error,
        path.display()
    ))
}

fn cmd_oracle(args: &OracleArgs, s: &Settings, cfg: &ConfigFile) -> CliResult<String> {
    let mut out = String::new();
    let (name, result) = if let Some(tsp) = &args.tsp {
        let inst = load_tsp(tsp, cfg.pick(args.cities, "cities")?)?;
        let r = held_karp(&inst)?;
        writeln!(out, "instance: {} ({} cities)", inst.name, inst.num_cities()).ok();
        let raw = match &r.witness {
            Witness::Tour(t) => (0..t.len()).map(|i| inst.raw_distance(t[i], t[(i + 1) % t.len()])).sum(),
            _ => r.optimum * inst.scale(),
        };
        writeln!(out, "optimum: {raw}").ok();
        writeln!(out, "optimum_normalized: {}", r.optimum).ok();
        (inst.name.clone(), r)
    } else {
        let path = args.instance.as_ref().expect("clap requires --instance or --tsp");
        let q = cfg.pick(args.q, "q")?;
        if q.is_some_and(|q| q < 2) {
            return Err(CliError::usage("--q must be at least 2"));
        }
        let inst = load_coloring(path, q)?;
        let r = exact_min_conflicts(&inst)?;
        writeln!(out, "instance: {} (q = {})", inst.name, inst.q).ok();
        writeln!(out, "min_conflicts: {}", r.optimum).ok();
        (inst.name.clone(), r)
    };
    match &result.witness {
        Witness::Tour(t) | Witness::Coloring(t) => {
            let items: Vec<String> = t.iter().map(|x| x.to_string()).collect();
            writeln!(out, "witness: {}", items.join(" ")).ok();
        }
        Witness::State(_) => {}
    }
    let path = s.out_dir.join(format!("{name}_oracle.json"));
    let json = serde_json::to_string_pretty(&result).map_err(|e| CliError::from(Error::Serialization(e.to_string())))?;
    write_file(&path, &json)?;
    writeln!(out, "result: {}", path.display()).ok();
    Ok(out)
}

fn cmd_hw(args: &HwArgs, s: &Settings) -> CliResult<String> {
    let inst = load_coloring(&args.instance, s.q)?;
    let model = vectorized::build_coloring_model(&inst)?;
    let sweeps = s.sweeps.unwrap_or(1000);
    let cfg = FixedPointConfig::with_seed(s.seed);
    let run = run_hw(&model, s.params.temperature, sweeps, &cfg, &HwLimits::default())?;
    let colors = vectorized::coloring_layout(&inst).decode_all(&run.trace.best_state)?;
    let (wrong, rate) = count_wrong(&inst, &colors);
    let sum = &run.summary;
    let stem = format!("{}_hw", inst.name);
    let summary_path = s.out_dir.join(format!("{stem}_summary.json"));
    write_file(&summary_path, &summary_json(sum)?)?;
    let trace_path = s.out_dir.join(format!("{stem}_trace.csv"));
    write_file(&trace_path, &history_csv(&run.trace.energy_history)?)?;
    let mut out = String::new();
    writeln!(out, "instance: {} ({} p-bits)", inst.name, sum.total_bits).ok();
    writeln!(out, "sweeps: {}", sum.sweeps).ok();
    writeln!(out, "cycles: {}", sum.cycles).ok();
    writeln!(out, "clock_mhz: {}", sum.clock_hz / 1e6).ok();
    writeln!(out, "projected_seconds: {:.9}", sum.projected_seconds).ok();
    writeln!(out, "saturated_updates: {}", sum.saturated_updates).ok();
    writeln!(out, "best_energy: {}", sum.best_energy).ok();
    writeln!(out, "wrong_edges: {wrong}").ok();
    writeln!(out, "error_rate: {rate}").ok();
    writeln!(out, "summary: {}", summary_path.display()).ok();
    writeln!(out, "trace: {}", trace_path.display()).ok();
    Ok(out)
}
