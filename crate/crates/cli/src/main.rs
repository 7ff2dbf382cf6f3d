//! `hfasson` command-line front end.
//!
//! Exit codes: 0 success, 1 user error (bad flags, unknown function,
//! invalid dimension, unreadable input, unwritable output), 2 internal error.
//! CSV outputs start with `#` lines echoing the effective flags and
//! configuration; `--out` is not echoed.

mod settings;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hfasson::bench::{self, DimensionMode};
use hfasson::crvanet::{self, RocPoint, SensingScenario, VEHICLE_COUNTS};
use hfasson::friedman::{self, Metric, RankMatrix, RankOptions, DEFAULT_ZERO_FLOOR};
use hfasson::harness::{self, ExperimentPlan};
use hfasson::optimizer::{self, Algorithm, OptimizerConfig, Problem};

use settings::Settings;

#[derive(Debug, Parser)]
#[command(name = "hfasson", version, about = "Hybrid swarm optimizer, benchmarks, rank statistics and spectrum-sensing simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the benchmark catalog as CSV.
    List(ListArgs),
    /// One optimization run; writes the run record as JSON.
    Run(RunArgs),
    /// Repeated-seed experiment grid; writes the summary CSV.
    Plan(PlanArgs),
    /// Friedman ranking of a summary CSV.
    Stats(StatsArgs),
    /// Energy-detector ROC grid.
    Roc(RocArgs),
    /// Spectrum utilization with optimized against fixed thresholds.
    Vanet(VanetArgs),
}

#[derive(Debug, Args)]
struct ListArgs {
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Common {
    /// Population size.
    #[arg(long)]
    pop: Option<usize>,
    /// Iterations per run.
    #[arg(long)]
    iters: Option<usize>,
    /// `key = value` settings file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_algorithm, default_value = "hfasson")]
    algorithm: Algorithm,
    #[arg(long)]
    function: u8,
    /// Defaults to 30 for scalable functions and to the fixed dimension
    /// otherwise.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlanArgs {
    /// Comma-separated; defaults to all four.
    #[arg(long, value_parser = parse_algorithm, value_delimiter = ',')]
    algorithm: Vec<Algorithm>,
    /// Comma-separated ids; defaults to 1 to 23.
    #[arg(long, value_delimiter = ',')]
    function: Vec<u8>,
    #[arg(long, value_delimiter = ',', default_values_t = [30, 50, 100])]
    dim: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Seed of trial 0; trial t uses seed + t.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    workers: Option<usize>,
    /// Wall-clock cap per cell in milliseconds.
    #[arg(long)]
    budget_ms: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the full results, per-trial data included.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Best,
    Mean,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Rank only this dimension.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, value_enum, default_value_t = MetricArg::Best)]
    metric: MetricArg,
    /// Magnitudes below this rank as exact zeros; 0 compares raw values.
    #[arg(long, default_value_t = DEFAULT_ZERO_FLOOR)]
    zero_floor: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RocArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
          default_values_t = [-17.0, -10.0, -5.0, 0.0, 5.0, 10.0, 17.0])]
    snr: Vec<f64>,
    /// Explicit thresholds; by default one threshold per `--pfa` target.
    #[arg(long, value_delimiter = ',')]
    threshold: Vec<f64>,
    /// Theoretical false-alarm targets used to place thresholds.
    #[arg(long, value_delimiter = ',',
          default_values_t = [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99])]
    pfa: Vec<f64>,
    /// Sensings per hypothesis and SNR.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VanetArgs {
    #[arg(long, value_delimiter = ',', default_values_t = VEHICLE_COUNTS)]
    vehicles: Vec<usize>,
    /// Number of paired seeds.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// First seed; trial t uses seed + t.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    User(String),
    Internal(String),
}

impl From<hfasson::Error> for Failure {
    fn from(e: hfasson::Error) -> Self {
        match e {
            hfasson::Error::Json(_) => Failure::Internal(e.to_string()),
            _ => Failure::User(e.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: hfasson::Error| e.to_string())
}

fn load_settings(common: Option<&Path>) -> CliResult<Settings> {
    match common {
        Some(path) => Settings::load(path).map_err(Failure::User),
        None => Ok(Settings::default()),
    }
}

fn optimizer_config(settings: &Settings, common: &Common) -> OptimizerConfig {
    let mut cfg = settings.optimizer.clone();
    if let Some(p) = common.pop {
        cfg.population = p;
    }
    if let Some(i) = common.iters {
        cfg.iter_max = i;
    }
    cfg
}

fn emit(out: Option<&Path>, content: &str) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::User(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string(value).map_err(|e| Failure::Internal(e.to_string()))
}

fn csv_text(write: impl FnOnce(&mut Vec<u8>) -> hfasson::Result<()>) -> CliResult<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Failure::Internal(e.to_string()))
}

fn with_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> CliResult<T> {
    match workers {
        None => Ok(job()),
        Some(n) => rayon_pool(n).map(|pool| pool.install(job)),
    }
}

fn rayon_pool(n: usize) -> CliResult<rayon::ThreadPool> {
    if n == 0 {
        return Err(Failure::User("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Failure::Internal(e.to_string()))
}

fn list(args: &ListArgs) -> CliResult {
    let mut text = String::from("id,name,lower,upper,dimension,known_optimum\n");
    for f in bench::catalog() {
        let dim = match f.dimension_mode {
            DimensionMode::Scalable => "scalable".to_string(),
            DimensionMode::Fixed(d) => d.to_string(),
        };
        let optimum = f
            .known_optimum(f.canonical_dimension())
            .map(|v| v.to_string())
            .unwrap_or_default();
        writeln!(text, "{},{},{},{},{dim},{optimum}", f.id, f.name, f.lower, f.upper).expect("string write");
    }
    emit(args.out.as_deref(), &text)
}

fn run(args: &RunArgs) -> CliResult {
    let settings = load_settings(args.common.config.as_deref())?;
    let cfg = optimizer_config(&settings, &args.common);
    let function = bench::by_id(args.function)?;
    let dim = args.dim.unwrap_or(function.canonical_dimension());
    let problem = Problem::new(args.function, dim)?;
    let record = optimizer::optimize(&problem, args.algorithm, &cfg, args.seed)?;
    let mut text = serde_json::to_string_pretty(&record).map_err(|e| Failure::Internal(e.to_string()))?;
    text.push('\n');
    emit(args.out.as_deref(), &text)
}

fn plan(args: &PlanArgs) -> CliResult {
    let settings = load_settings(args.common.config.as_deref())?;
    let cfg = optimizer_config(&settings, &args.common);
    let algorithms = if args.algorithm.is_empty() {
        Algorithm::ALL.to_vec()
    } else {
        args.algorithm.clone()
    };
    let function_ids = if args.function.is_empty() {
        (1..=23).collect()
    } else {
        args.function.clone()
    };
    for &id in &function_ids {
        bench::by_id(id)?;
    }
    let plan = ExperimentPlan {
        algorithms,
        function_ids,
        dimensions: args.dim.clone(),
        trials: args.trials,
        cfg,
        seed_base: args.seed,
        cell_budget_ms: args.budget_ms,
    };
    let table = match args.workers {
        Some(n) => {
            if n == 0 {
                return Err(Failure::User("--workers must be at least 1".into()));
            }
            harness::run_plan_with_workers(&plan, n)?
        }
        None => harness::run_plan(&plan)?,
    };
    let mut text = format!(
        "# hfasson plan --algorithm {} --function {} --dim {} --trials {} --seed {}{}\n# config {}\n",
        join(&plan.algorithms),
        join(&plan.function_ids),
        join(&plan.dimensions),
        plan.trials,
        plan.seed_base,
        plan.cell_budget_ms.map(|b| format!(" --budget-ms {b}")).unwrap_or_default(),
        json(&plan.cfg)?,
    );
    text += &csv_text(|buf| harness::write_rows(&table.summary(), buf))?;
    if let Some(path) = &args.json {
        harness::export_json(&table, path)
            .map_err(|e| Failure::User(format!("cannot write {}: {e}", path.display())))?;
    }
    emit(args.out.as_deref(), &text)
}

fn stats(args: &StatsArgs) -> CliResult {
    let rows = harness::read_csv(&args.input)
        .map_err(|e| Failure::User(format!("cannot read {}: {e}", args.input.display())))?;
    let opts = RankOptions {
        minimize: true,
        metric: match args.metric {
            MetricArg::Best => Metric::Best,
            MetricArg::Mean => Metric::Mean,
        },
        zero_floor: args.zero_floor,
    };
    let matrix = RankMatrix::from_rows(&rows, args.dim, opts)?;
    let result = friedman::friedman(&matrix)?;
    let k = matrix.n_algorithms() as f64;
    let expected = k * (k + 1.0) / 2.0;
    let bad = matrix
        .ranks
        .iter()
        .filter(|r| (r.iter().sum::<f64>() - expected).abs() > 1e-9)
        .count();
    if bad > 0 {
        return Err(Failure::Internal(format!("{bad} rank rows do not sum to {expected}")));
    }
    eprintln!(
        "rank-sum check: {} problems x {} algorithms, every row sums to k(k+1)/2 = {expected}",
        matrix.n_problems(),
        matrix.n_algorithms()
    );
    let counts = friedman::first_place_counts(&matrix);
    let mut text = format!(
        "# hfasson stats --input {} --metric {} --zero-floor {:e}{}\n",
        args.input.display(),
        match args.metric {
            MetricArg::Best => "best",
            MetricArg::Mean => "mean",
        },
        args.zero_floor,
        args.dim.map(|d| format!(" --dim {d}")).unwrap_or_default(),
    );
    text += &csv_text(|buf| friedman::write_report(&result, &counts, buf))?;
    emit(args.out.as_deref(), &text)
}

fn roc(args: &RocArgs) -> CliResult {
    let settings = load_settings(args.config.as_deref())?;
    let scenario = settings.scenario;
    scenario.validate()?;
    let thresholds: Vec<f64> = if args.threshold.is_empty() {
        if let Some(bad) = args.pfa.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(Failure::User(format!("--pfa targets must lie in (0, 1), got {bad}")));
        }
        args.pfa
            .iter()
            .map(|&p| crvanet::threshold_for_pfa(p, scenario.samples_per_sensing, scenario.noise_variance))
            .collect()
    } else {
        args.threshold.clone()
    };
    let points: Vec<RocPoint> = crvanet::roc_curve(&scenario, &args.snr, &thresholds, args.trials, args.seed)?;
    let mut text = format!(
        "# hfasson roc --snr {} --threshold {} --trials {} --seed {}\n# scenario {}\n",
        join(&args.snr),
        join(&thresholds),
        args.trials,
        args.seed,
        json(&scenario)?,
    );
    text += &csv_text(|buf| crvanet::write_roc_csv(&points, buf))?;
    emit(args.out.as_deref(), &text)
}

fn vanet(args: &VanetArgs) -> CliResult {
    let settings = load_settings(args.common.config.as_deref())?;
    let cfg = optimizer_config(&settings, &args.common);
    let scenario: SensingScenario = settings.scenario.clone();
    if args.trials == 0 || args.vehicles.is_empty() {
        return Err(Failure::User("vanet needs at least one seed and one vehicle count".into()));
    }
    let seeds: Vec<u64> = (0..args.trials as u64).map(|t| args.seed + t).collect();
    let rows = with_pool(args.workers, || {
        crvanet::utilization_study(&scenario, &args.vehicles, &seeds, &cfg, &settings.search)
    })??;
    let mut text = format!(
        "# hfasson vanet --vehicles {} --trials {} --seed {}\n# config {}\n# scenario {}\n# search {}\n",
        join(&args.vehicles),
        args.trials,
        args.seed,
        json(&cfg)?,
        json(&scenario)?,
        json(&settings.search)?,
    );
    text += &csv_text(|buf| crvanet::write_utilization_csv(&rows, buf))?;
    emit(args.out.as_deref(), &text)
}

fn dispatch(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::List(a) => list(a),
        Command::Run(a) => run(a),
        Command::Plan(a) => plan(a),
        Command::Stats(a) => stats(a),
        Command::Roc(a) => roc(a),
        Command::Vanet(a) => vanet(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| dispatch(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::User(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Ok(Err(Failure::Internal(msg))) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(2),
    }
}
