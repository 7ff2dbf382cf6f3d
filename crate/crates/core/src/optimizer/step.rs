use rand::Rng;

use crate::newton::{self, Bounds};
use crate::SimRng;

use super::moves::{
    draw_attraction_factor, draw_ph_factor, fa_move, fa_random_walk, hfasson_velocity, inertia_weight,
    position_update, sso_initial_velocity, sso_velocity,
};
use super::{Algorithm, Objective, OptimizerConfig, SwarmState};

/// Bookkeeping for one iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub evaluations: u64,
    pub newton_accepted: u64,
}

fn vmax(cfg: &OptimizerConfig, bounds: Bounds) -> Option<f64> {
    cfg.velocity_clamp_fraction.map(|f| f * bounds.range())
}

/// One iteration of `algorithm`.
pub fn step(
    state: &mut SwarmState,
    problem: &dyn Objective,
    algorithm: Algorithm,
    cfg: &OptimizerConfig,
    rng: &mut SimRng,
) -> StepStats {
    match algorithm {
        Algorithm::Fa => step_fa(state, problem, cfg, rng),
        Algorithm::Sso => step_sso(state, problem, cfg, rng),
        Algorithm::Hfasso | Algorithm::Hfasson => step_hybrid(state, problem, cfg, rng),
    }
}

/// Firefly iteration. For each `i` in order and each `j` in order, firefly
/// `i` moves toward `j` whenever `j` is currently brighter, and is
/// re-evaluated after every move. The firefly that was brightest at the start
/// of the iteration, which has nobody to follow, takes a random walk.
pub fn step_fa(state: &mut SwarmState, problem: &dyn Objective, cfg: &OptimizerConfig, rng: &mut SimRng) -> StepStats {
    let bounds = problem.bounds();
    let mut stats = StepStats::default();
    let brightest = brightest(state);
    let n = state.agents.len();
    for i in 0..n {
        for j in 0..n {
            if state.agents[j].fitness < state.agents[i].fitness {
                let moved = fa_move(&state.agents[i].position, &state.agents[j].position, bounds, cfg, rng)
                    .expect("agents share one dimension");
                let f = problem.evaluate(&moved, rng);
                stats.evaluations += 1;
                state.agents[i].set(moved, f);
            }
        }
    }
    let walked = fa_random_walk(&state.agents[brightest].position, bounds, cfg, rng);
    let f = problem.evaluate(&walked, rng);
    stats.evaluations += 1;
    state.agents[brightest].set(walked, f);
    state.update_global_best();
    state.iteration += 1;
    stats
}

fn brightest(state: &SwarmState) -> usize {
    let mut best = 0;
    for (k, a) in state.agents.iter().enumerate() {
        if a.fitness < state.agents[best].fitness {
            best = k;
        }
    }
    best
}

/// Sperm-swarm iteration. Per agent in order: damping and pH for the initial
/// velocity, then one pH/temperature pair for the personal-best term and one
/// for the global-best term. The global best is the one held at the start of
/// the iteration.
pub fn step_sso(state: &mut SwarmState, problem: &dyn Objective, cfg: &OptimizerConfig, rng: &mut SimRng) -> StepStats {
    let bounds = problem.bounds();
    let vmax = vmax(cfg, bounds);
    let mut stats = StepStats::default();
    let gbest = state.global_best_position.clone();
    for agent in &mut state.agents {
        let v0 = sso_initial_velocity(&agent.velocity, rng, cfg);
        let c_personal = draw_attraction_factor(rng, cfg);
        let c_global = draw_attraction_factor(rng, cfg);
        let mut v = sso_velocity(
            &v0,
            &agent.position,
            &agent.personal_best_position,
            &gbest,
            c_personal,
            c_global,
            vmax,
        );
        let mut x = agent.position.clone();
        position_update(&mut x, &mut v, bounds);
        let f = problem.evaluate(&x, rng);
        stats.evaluations += 1;
        agent.velocity = v;
        agent.set(x, f);
    }
    state.update_global_best();
    state.iteration += 1;
    stats
}

/// Hybrid iteration shared by HFASSO and HFASSON:
///
/// 1. inertia weight for the current iteration;
/// 2. when `fa_attraction_in_hybrid`, an attraction pass: each agent in order
///    picks a uniformly random strictly brighter agent, moves toward it and
///    keeps the move only if it improves its own fitness;
/// 3. per agent in order, draw `log10(pH1)` and `log10(pH2) * log10(T1)`,
///    update the velocity toward the global best and then the position;
/// 4. when `newton_enabled` and the objective is deterministic, one Newton
///    sweep per agent, kept only if it improves;
/// 5. personal and global bests are updated.
pub fn step_hybrid(
    state: &mut SwarmState,
    problem: &dyn Objective,
    cfg: &OptimizerConfig,
    rng: &mut SimRng,
) -> StepStats {
    let bounds = problem.bounds();
    let vmax = vmax(cfg, bounds);
    let mut stats = StepStats::default();
    let w = inertia_weight(state.iteration, cfg);

    if cfg.fa_attraction_in_hybrid {
        attraction_pass(state, problem, bounds, cfg, rng, &mut stats);
        state.update_global_best();
    }

    let gbest = state.global_best_position.clone();
    for agent in &mut state.agents {
        let ph = draw_ph_factor(rng, cfg);
        let attraction = draw_attraction_factor(rng, cfg);
        let mut v = hfasson_velocity(&agent.velocity, &agent.position, &gbest, w, ph, attraction, vmax);
        let mut x = agent.position.clone();
        position_update(&mut x, &mut v, bounds);
        let f = problem.evaluate(&x, rng);
        stats.evaluations += 1;
        agent.velocity = v;
        agent.set(x, f);
    }

    if cfg.newton_enabled && !problem.is_stochastic() {
        let fd = cfg.fd_config();
        for agent in &mut state.agents {
            let mut evals = 0u64;
            let mut f = |x: &[f64]| {
                evals += 1;
                problem.evaluate(x, rng)
            };
            let refined = newton::refine_from(&mut f, &agent.position, agent.fitness, bounds, &fd);
            stats.evaluations += evals;
            if refined.improved {
                stats.newton_accepted += 1;
                agent.set(refined.position, refined.fitness);
            }
        }
    }

    state.update_global_best();
    state.iteration += 1;
    stats
}

fn attraction_pass(
    state: &mut SwarmState,
    problem: &dyn Objective,
    bounds: Bounds,
    cfg: &OptimizerConfig,
    rng: &mut SimRng,
    stats: &mut StepStats,
) {
    let n = state.agents.len();
    let mut brighter = Vec::with_capacity(n);
    for i in 0..n {
        brighter.clear();
        let fi = state.agents[i].fitness;
        brighter.extend((0..n).filter(|&j| state.agents[j].fitness < fi));
        if brighter.is_empty() {
            continue;
        }
        let j = brighter[rng.random_range(0..brighter.len())];
        let moved = fa_move(&state.agents[i].position, &state.agents[j].position, bounds, cfg, rng)
            .expect("agents share one dimension");
        let f = problem.evaluate(&moved, rng);
        stats.evaluations += 1;
        if f < fi {
            state.agents[i].set(moved, f);
        }
    }
}
