//! Population optimizers over box-bounded domains: FA, SSO, HFASSO and
//! HFASSON.
//!
//! All four share [`SwarmState`] and are driven one iteration at a time by
//! [`step`]. [`optimize`] runs a full budget from a seed and returns a
//! [`RunRecord`].
//!
//! Random draws come from a single [`SimRng`] stream consumed in a fixed
//! order: initial positions (agent by agent, coordinate by coordinate), then
//! initial velocities in the same order; each step then draws per agent in
//! population order, as documented on the step functions.

mod config;
pub mod moves;
mod step;
mod swarm;

use std::time::Instant;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::bench::{self, BenchmarkFunction};
use crate::error::Result;
use crate::newton::Bounds;
use crate::SimRng;

pub use config::{Algorithm, OptimizerConfig};
pub use step::{step, step_fa, step_hybrid, step_sso, StepStats};
pub use swarm::{Agent, SwarmState};

/// A box-bounded minimization problem.
pub trait Objective: Sync {
    fn dimension(&self) -> usize;
    fn bounds(&self) -> Bounds;
    /// Objective value at `x`, which is always inside the box.
    fn evaluate(&self, x: &[f64], rng: &mut SimRng) -> f64;
    /// Stochastic objectives are never Newton-refined.
    fn is_stochastic(&self) -> bool {
        false
    }
    /// Benchmark id, when the objective is one of f1 to f23.
    fn function_id(&self) -> Option<u8> {
        None
    }
}

/// One benchmark function at a validated dimension.
#[derive(Debug, Clone, Copy)]
pub struct Problem {
    pub function: &'static BenchmarkFunction,
    pub dim: usize,
}

impl Problem {
    pub fn new(function_id: u8, dim: usize) -> Result<Self> {
        let function = bench::by_id(function_id)?;
        function.check_dimension(dim)?;
        Ok(Self { function, dim })
    }
}

impl Objective for Problem {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn bounds(&self) -> Bounds {
        let (lo, hi) = self.function.bounds();
        Bounds::new(lo, hi)
    }

    fn evaluate(&self, x: &[f64], rng: &mut SimRng) -> f64 {
        self.function.evaluate_unchecked(x, rng)
    }

    fn is_stochastic(&self) -> bool {
        self.function.stochastic
    }

    fn function_id(&self) -> Option<u8> {
        Some(self.function.id)
    }
}

/// A deterministic closure over a box.
pub struct FnObjective<F> {
    pub dim: usize,
    pub bounds: Bounds,
    pub f: F,
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn dimension(&self) -> usize {
        self.dim
    }

    fn bounds(&self) -> Bounds {
        self.bounds
    }

    fn evaluate(&self, x: &[f64], _rng: &mut SimRng) -> f64 {
        (self.f)(x)
    }
}

/// Outcome of one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub function_id: Option<u8>,
    pub dimension: usize,
    pub seed: u64,
    pub config: OptimizerConfig,
    /// `(iteration, global best fitness)` from iteration 0 (after
    /// initialization) to `iter_max`.
    pub trace: Vec<(usize, f64)>,
    pub final_position: Vec<f64>,
    pub final_fitness: f64,
    /// Newton sweeps that were accepted over the whole run.
    pub newton_accepted: u64,
    pub wall_ms: f64,
}

impl RunRecord {
    /// First iteration whose best fitness is within `tol` of `target`.
    pub fn first_iteration_within(&self, target: f64, tol: f64) -> Option<usize> {
        self.trace
            .iter()
            .find(|(_, f)| (f - target).abs() <= tol)
            .map(|(it, _)| *it)
    }

    /// Whether all `iter_max` iterations ran.
    pub fn completed(&self) -> bool {
        self.trace.len() == self.config.iter_max + 1
    }

    /// Equality ignoring the wall-clock field.
    pub fn same_result(&self, other: &RunRecord) -> bool {
        RunRecord {
            wall_ms: 0.0,
            ..self.clone()
        } == RunRecord {
            wall_ms: 0.0,
            ..other.clone()
        }
    }
}

/// Run `algorithm` for `cfg.iter_max` iterations from `seed`.
///
/// Newton refinement is switched on for HFASSON and off for every other
/// algorithm, whatever `cfg.newton_enabled` says; the effective value is
/// stored in the record.
pub fn optimize(problem: &dyn Objective, algorithm: Algorithm, cfg: &OptimizerConfig, seed: u64) -> Result<RunRecord> {
    optimize_until(problem, algorithm, cfg, seed, None)
}

/// [`optimize`] that stops early once `deadline` has passed; the trace then
/// ends at the last completed iteration (see [`RunRecord::completed`]).
pub fn optimize_until(
    problem: &dyn Objective,
    algorithm: Algorithm,
    cfg: &OptimizerConfig,
    seed: u64,
    deadline: Option<Instant>,
) -> Result<RunRecord> {
    let cfg = OptimizerConfig {
        newton_enabled: algorithm == Algorithm::Hfasson,
        ..cfg.clone()
    };
    cfg.validate()?;
    let start = Instant::now();
    let mut rng = SimRng::seed_from_u64(seed);
    let mut state = SwarmState::initialize(problem, &cfg, &mut rng);
    let mut trace = Vec::with_capacity(cfg.iter_max + 1);
    trace.push((0, state.global_best_fitness));
    let mut newton_accepted = 0;
    for _ in 0..cfg.iter_max {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let stats = step(&mut state, problem, algorithm, &cfg, &mut rng);
        newton_accepted += stats.newton_accepted;
        trace.push((state.iteration, state.global_best_fitness));
    }
    Ok(RunRecord {
        algorithm,
        function_id: problem.function_id(),
        dimension: problem.dimension(),
        seed,
        config: cfg,
        trace,
        final_position: state.global_best_position,
        final_fitness: state.global_best_fitness,
        newton_accepted,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
