//! Repeated-seed experiments over algorithms, functions and dimensions, and
//! their CSV/JSON export.
//!
//! Every (algorithm, function, dimension) cell runs `trials` seeds,
//! `seed_base + trial`. Results do not depend on thread count or scheduling;
//! only the `wall_ms` fields and, when a budget is set, the timeout markers
//! are timing dependent.

use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench;
use crate::error::{Error, Result};
use crate::optimizer::{optimize_until, Algorithm, OptimizerConfig, Problem, RunRecord};

/// Absolute tolerance used for "reached the optimum".
pub const OPTIMUM_TOLERANCE: f64 = 1e-12;

/// What to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentPlan {
    pub algorithms: Vec<Algorithm>,
    pub function_ids: Vec<u8>,
    /// Dimensions for the scalable functions; fixed-dimension functions
    /// always run at their own dimension.
    pub dimensions: Vec<usize>,
    pub trials: usize,
    pub cfg: OptimizerConfig,
    pub seed_base: u64,
    /// Wall-clock cap per cell. Trials of a capped cell run one after the
    /// other and stop at the deadline; the cell is then marked as timed out.
    pub cell_budget_ms: Option<u64>,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            function_ids: (1..=23).collect(),
            dimensions: vec![30, 50, 100],
            trials: 10,
            cfg: OptimizerConfig::default(),
            seed_base: 0,
            cell_budget_ms: None,
        }
    }
}

/// Identifies one cell of a results table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub function_id: u8,
    pub dimension: usize,
    pub algorithm: Algorithm,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        self.cfg.validate()
    }

    /// Cells in (function, dimension, algorithm) order, without duplicates.
    pub fn cells(&self) -> Result<Vec<CellKey>> {
        let mut keys = Vec::new();
        for &id in &self.function_ids {
            let f = bench::by_id(id)?;
            let dims = if f.is_scalable() {
                self.dimensions.clone()
            } else {
                vec![f.canonical_dimension()]
            };
            for dim in dims {
                f.check_dimension(dim)?;
                for &algorithm in &self.algorithms {
                    keys.push(CellKey {
                        function_id: id,
                        dimension: dim,
                        algorithm,
                    });
                }
            }
        }
        keys.sort();
        keys.dedup();
        Ok(keys)
    }

    pub fn seed(&self, trial: usize) -> u64 {
        self.seed_base.wrapping_add(trial as u64)
    }
}

/// Per-trial digest of a [`RunRecord`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub seed: u64,
    pub final_fitness: f64,
    /// First iteration within [`OPTIMUM_TOLERANCE`] of the known optimum.
    pub iteration_at_known_optimum: Option<usize>,
    /// First iteration within [`OPTIMUM_TOLERANCE`] of the run's final best.
    pub iteration_at_final_best: Option<usize>,
    pub iterations_run: usize,
    pub completed: bool,
    pub newton_accepted: u64,
    pub wall_ms: f64,
}

impl TrialSummary {
    pub fn from_record(record: &RunRecord) -> Self {
        let known = record
            .function_id
            .and_then(|id| bench::by_id(id).ok())
            .and_then(|f| f.known_optimum(record.dimension));
        Self {
            seed: record.seed,
            final_fitness: record.final_fitness,
            iteration_at_known_optimum: known
                .and_then(|t| iteration_at_target(&record.trace, t, OPTIMUM_TOLERANCE)),
            iteration_at_final_best: iteration_at_optimum(&record.trace, OPTIMUM_TOLERANCE),
            iterations_run: record.trace.last().map_or(0, |p| p.0),
            completed: record.completed(),
            newton_accepted: record.newton_accepted,
            wall_ms: record.wall_ms,
        }
    }
}

/// Whether every trial of a cell finished its budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Timeout,
}

impl CellStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Timeout => "timeout",
        }
    }
}

/// Aggregated trials of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub key: CellKey,
    pub best_over_trials: f64,
    pub mean: f64,
    pub status: CellStatus,
    pub per_trial: Vec<TrialSummary>,
}

impl CellResult {
    fn from_trials(key: CellKey, per_trial: Vec<TrialSummary>, budget_hit: bool) -> Self {
        let finals: Vec<f64> = per_trial.iter().map(|t| t.final_fitness).collect();
        let best_over_trials = finals.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = finals.iter().sum::<f64>() / finals.len().max(1) as f64;
        let timed_out = budget_hit || per_trial.iter().any(|t| !t.completed);
        Self {
            key,
            best_over_trials,
            mean,
            status: if timed_out { CellStatus::Timeout } else { CellStatus::Ok },
            per_trial,
        }
    }

    /// Median of the known-optimum hit iterations, with misses counted as
    /// later than any hit. `None` when at least half the trials missed.
    pub fn median_iteration_at_optimum(&self) -> Option<f64> {
        median_with_misses(self.per_trial.iter().map(|t| t.iteration_at_known_optimum))
    }
}

/// Median where `None` ranks after every `Some`; `None` if the median falls
/// on a miss.
pub fn median_with_misses(values: impl IntoIterator<Item = Option<usize>>) -> Option<f64> {
    let mut v: Vec<f64> = values
        .into_iter()
        .map(|x| x.map_or(f64::INFINITY, |i| i as f64))
        .collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let m = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    m.is_finite().then_some(m)
}

/// All cells of a finished plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub plan: ExperimentPlan,
    pub cells: Vec<CellResult>,
}

impl ResultsTable {
    pub fn get(&self, algorithm: Algorithm, function_id: u8, dimension: usize) -> Option<&CellResult> {
        let key = CellKey {
            function_id,
            dimension,
            algorithm,
        };
        self.cells.iter().find(|c| c.key == key)
    }

    /// One rounded row per cell, exactly as [`export_csv`] writes it.
    pub fn summary(&self) -> Vec<SummaryRow> {
        self.cells.iter().map(SummaryRow::from_cell).collect()
    }

    /// Equality ignoring wall-clock fields.
    pub fn same_results(&self, other: &ResultsTable) -> bool {
        fn strip(t: &ResultsTable) -> ResultsTable {
            let mut t = t.clone();
            for c in &mut t.cells {
                for trial in &mut c.per_trial {
                    trial.wall_ms = 0.0;
                }
            }
            t
        }
        strip(self) == strip(other)
    }
}

/// Run every cell of `plan` on the global rayon pool.
pub fn run_plan(plan: &ExperimentPlan) -> Result<ResultsTable> {
    plan.validate()?;
    let cells = plan.cells()?;
    let results = match plan.cell_budget_ms {
        None => {
            let jobs: Vec<(usize, usize)> = (0..cells.len())
                .flat_map(|c| (0..plan.trials).map(move |t| (c, t)))
                .collect();
            let records: Vec<Result<TrialSummary>> = jobs
                .par_iter()
                .map(|&(c, t)| run_trial(plan, cells[c], t, None).map(|r| TrialSummary::from_record(&r)))
                .collect();
            let mut records = records.into_iter();
            let mut out = Vec::with_capacity(cells.len());
            for key in &cells {
                let trials = records.by_ref().take(plan.trials).collect::<Result<Vec<_>>>()?;
                out.push(CellResult::from_trials(*key, trials, false));
            }
            out
        }
        Some(ms) => cells
            .par_iter()
            .map(|key| run_budgeted_cell(plan, *key, Duration::from_millis(ms)))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(ResultsTable {
        plan: plan.clone(),
        cells: results,
    })
}

/// [`run_plan`] on a dedicated pool with `workers` threads.
pub fn run_plan_with_workers(plan: &ExperimentPlan, workers: usize) -> Result<ResultsTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| run_plan(plan))
}

fn run_trial(plan: &ExperimentPlan, key: CellKey, trial: usize, deadline: Option<Instant>) -> Result<RunRecord> {
    let problem = Problem::new(key.function_id, key.dimension)?;
    optimize_until(&problem, key.algorithm, &plan.cfg, plan.seed(trial), deadline)
}

fn run_budgeted_cell(plan: &ExperimentPlan, key: CellKey, budget: Duration) -> Result<CellResult> {
    let deadline = Instant::now() + budget;
    let mut trials = Vec::with_capacity(plan.trials);
    let mut budget_hit = false;
    for t in 0..plan.trials {
        if Instant::now() >= deadline {
            budget_hit = true;
            break;
        }
        let record = run_trial(plan, key, t, Some(deadline))?;
        trials.push(TrialSummary::from_record(&record));
    }
    Ok(CellResult::from_trials(key, trials, budget_hit))
}

/// First iteration whose best fitness is within `tolerance` (absolute) of
/// the trace's final best.
pub fn iteration_at_optimum(trace: &[(usize, f64)], tolerance: f64) -> Option<usize> {
    let last = trace.last()?.1;
    iteration_at_target(trace, last, tolerance)
}

/// First iteration whose best fitness is within `tolerance` of `target`.
pub fn iteration_at_target(trace: &[(usize, f64)], target: f64, tolerance: f64) -> Option<usize> {
    trace
        .iter()
        .find(|(_, f)| (f - target).abs() <= tolerance)
        .map(|(it, _)| *it)
}

/// One CSV row. Used both for our results (`source = "measured"`) and for
/// the published reference values (`source = "paper"`, no mean or trials).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub function: u8,
    pub dimension: usize,
    pub best: f64,
    pub mean: Option<f64>,
    pub trials: Option<usize>,
    pub source: String,
    pub status: String,
}

impl SummaryRow {
    pub fn from_cell(cell: &CellResult) -> Self {
        Self {
            algorithm: cell.key.algorithm.name().to_string(),
            function: cell.key.function_id,
            dimension: cell.key.dimension,
            best: round_sig(cell.best_over_trials),
            mean: Some(round_sig(cell.mean)),
            trials: Some(cell.per_trial.len()),
            source: "measured".to_string(),
            status: cell.status.as_str().to_string(),
        }
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "algorithm",
    "function",
    "dimension",
    "best",
    "mean",
    "trials",
    "source",
    "status",
];

/// `x` rendered with six significant digits, e.g. `1.23457E+04`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mantissa}E{exp:+03}")
}

/// `x` rounded to six significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        format_sci(x).parse().expect("formatted float")
    } else {
        x
    }
}

/// Write rows with the fixed header; numbers in [`format_sci`] form.
pub fn write_rows<W: std::io::Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.clone(),
            r.function.to_string(),
            r.dimension.to_string(),
            format_sci(r.best),
            r.mean.map(format_sci).unwrap_or_default(),
            r.trials.map(|t| t.to_string()).unwrap_or_default(),
            r.source.clone(),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parse rows in the [`CSV_HEADER`] schema. Lines starting with `#` are
/// skipped.
pub fn read_rows<R: std::io::Read>(input: R) -> Result<Vec<SummaryRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::InvalidInput(format!(
            "unexpected CSV header {header:?}; expected {CSV_HEADER:?}"
        )));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn export_csv(table: &ResultsTable, path: &Path) -> Result<()> {
    write_rows(&table.summary(), std::fs::File::create(path)?)
}

/// Full table, per-trial data included.
pub fn export_json(table: &ResultsTable, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(file, table)?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    read_rows(std::fs::File::open(path)?)
}

/// The published best-fitness values of all nine compared algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceData {
    pub rows: Vec<SummaryRow>,
}

const REFERENCE_BEST: &str = include_str!("../data/reference_best.csv");

impl ReferenceData {
    /// The checked-in table (23 functions x 3 dimensions x 9 algorithms).
    pub fn published() -> Self {
        Self {
            rows: read_rows(REFERENCE_BEST.as_bytes()).expect("bundled reference data parses"),
        }
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        Ok(Self { rows: read_csv(path)? })
    }

    pub fn value(&self, algorithm: &str, function: u8, dimension: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.function == function && r.dimension == dimension)
            .map(|r| r.best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_plan() -> ExperimentPlan {
        ExperimentPlan {
            algorithms: vec![Algorithm::Sso, Algorithm::Hfasson],
            function_ids: vec![1, 16],
            dimensions: vec![5],
            trials: 3,
            cfg: OptimizerConfig {
                population: 8,
                iter_max: 15,
                ..OptimizerConfig::default()
            },
            seed_base: 100,
            cell_budget_ms: None,
        }
    }

    #[test]
    fn cells_use_fixed_dimensions_and_dedupe() {
        let plan = ExperimentPlan {
            dimensions: vec![30, 50],
            function_ids: vec![14, 1, 14],
            algorithms: vec![Algorithm::Fa],
            ..tiny_plan()
        };
        let cells = plan.cells().unwrap();
        let dims: Vec<(u8, usize)> = cells.iter().map(|c| (c.function_id, c.dimension)).collect();
        assert_eq!(dims, vec![(1, 30), (1, 50), (14, 2)]);
        assert!(ExperimentPlan { dimensions: vec![0], ..tiny_plan() }.cells().is_err());
        assert!(ExperimentPlan { function_ids: vec![30], ..tiny_plan() }.cells().is_err());
    }

    #[test]
    fn plan_runs_are_reproducible_and_consistent() {
        let plan = tiny_plan();
        let a = run_plan(&plan).unwrap();
        let b = run_plan_with_workers(&plan, 1).unwrap();
        assert!(a.same_results(&b));
        assert_eq!(a.cells.len(), 4);
        for c in &a.cells {
            assert_eq!(c.per_trial.len(), 3);
            assert!(c.mean >= c.best_over_trials);
            let min = c.per_trial.iter().map(|t| t.final_fitness).fold(f64::INFINITY, f64::min);
            assert_eq!(c.best_over_trials, min);
            let seeds: Vec<u64> = c.per_trial.iter().map(|t| t.seed).collect();
            assert_eq!(seeds, vec![100, 101, 102]);
            assert_eq!(c.status, CellStatus::Ok);
        }
        let one = run_plan(&ExperimentPlan { trials: 1, ..plan }).unwrap();
        assert!(one.cells.iter().all(|c| c.per_trial.len() == 1));
    }

    #[test]
    fn zero_trials_is_rejected() {
        assert!(run_plan(&ExperimentPlan { trials: 0, ..tiny_plan() }).is_err());
    }

    #[test]
    fn exhausted_budget_marks_timeouts() {
        let plan = ExperimentPlan {
            cell_budget_ms: Some(0),
            ..tiny_plan()
        };
        let t = run_plan(&plan).unwrap();
        assert!(t.cells.iter().all(|c| c.status == CellStatus::Timeout));
        let roomy = run_plan(&ExperimentPlan {
            cell_budget_ms: Some(600_000),
            ..tiny_plan()
        })
        .unwrap();
        let unbounded = run_plan(&tiny_plan()).unwrap();
        let roomy = ResultsTable {
            plan: unbounded.plan.clone(),
            ..roomy
        };
        assert!(roomy.same_results(&unbounded));
    }

    #[test]
    fn iteration_at_optimum_cases() {
        let flat = [(0, 0.0), (1, 0.0)];
        assert_eq!(iteration_at_optimum(&flat, 1e-12), Some(0));
        let trace = [(0, 5.0), (1, 1.0), (2, 1e-13), (3, 0.0)];
        assert_eq!(iteration_at_optimum(&trace, 1e-12), Some(2));
        assert_eq!(iteration_at_optimum(&trace, 0.0), Some(3));
        assert_eq!(iteration_at_optimum(&trace, 2.0), Some(1));
        assert_eq!(iteration_at_target(&trace, -1.0, 1e-12), None);
        assert_eq!(iteration_at_optimum(&[], 1.0), None);
    }

    #[test]
    fn medians_treat_misses_as_late() {
        assert_eq!(median_with_misses([Some(3), Some(1), Some(2)]), Some(2.0));
        assert_eq!(median_with_misses([Some(3), None, Some(1)]), Some(3.0));
        assert_eq!(median_with_misses([Some(3), None, None]), None);
        assert_eq!(median_with_misses([Some(4), Some(2)]), Some(3.0));
        assert_eq!(median_with_misses([]), None);
    }

    #[test]
    fn sci_format() {
        assert_eq!(format_sci(12345.678), "1.23457E+04");
        assert_eq!(format_sci(0.0), "0.00000E+00");
        assert_eq!(format_sci(-3.2e-120), "-3.20000E-120");
        assert_eq!(round_sig(1.234_567_8), 1.23457);
        assert_eq!(format_sci(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_round_trip() {
        let t = run_plan(&tiny_plan()).unwrap();
        let mut buf = Vec::new();
        write_rows(&t.summary(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("algorithm,function,dimension,best,mean,trials,source,status\n"));
        assert_eq!(read_rows(buf.as_slice()).unwrap(), t.summary());

        let mut empty = Vec::new();
        write_rows(&[], &mut empty).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().lines().count(), 1);
        assert!(read_rows("a,b\n1,2\n".as_bytes()).is_err());

        let annotated = format!("# hfasson plan --trials 2\n{text}");
        assert_eq!(read_rows(annotated.as_bytes()).unwrap(), t.summary());
    }

    #[test]
    fn reference_data_is_complete() {
        let r = ReferenceData::published();
        assert_eq!(r.rows.len(), 23 * 3 * 9);
        assert_eq!(r.value("HFASSON", 1, 30), Some(0.0));
        assert_eq!(r.value("HFASSO", 10, 30), Some(8.8818e-16));
        assert_eq!(r.value("WCMFO", 5, 30), Some(9013.4));
        assert_eq!(r.value("GWOCS", 14, 50), Some(-1990.0));
        assert!(r.rows.iter().all(|row| row.source == "paper" && row.mean.is_none()));
    }
}
