//! Straight-line re-implementation of the hybrid velocity/position update,
//! checked bit-for-bit against the library on the 2-D sphere. Random pairs
//! of initial positions and velocities almost always hit a bound within
//! three iterations, so the reference applies the clamp rules too.

use hfasson::optimizer::{step_hybrid, Algorithm, Objective, OptimizerConfig, Problem, SwarmState};
use hfasson::SimRng;
use rand::{Rng, SeedableRng};

const POP: usize = 5;
const DIM: usize = 2;
const ITERS: usize = 3;

struct Path {
    positions: Vec<[[f64; DIM]; POP]>,
    best: Vec<f64>,
}

fn sphere(x: &[f64; DIM]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn reference(seed: u64) -> Path {
    let mut rng = SimRng::seed_from_u64(seed);
    let mut x = [[0.0; DIM]; POP];
    let mut v = [[0.0; DIM]; POP];
    for agent in x.iter_mut() {
        for c in agent.iter_mut() {
            *c = rng.random_range(-100.0..=100.0);
        }
    }
    for agent in v.iter_mut() {
        for c in agent.iter_mut() {
            *c = rng.random_range(-100.0..=100.0);
        }
    }
    let mut g = x[0];
    let mut gf = sphere(&x[0]);
    for a in &x {
        if sphere(a) < gf {
            gf = sphere(a);
            g = *a;
        }
    }
    let mut path = Path {
        positions: vec![x],
        best: vec![gf],
    };
    let mut pbest: Vec<f64> = x.iter().map(sphere).collect();
    let mut pbest_x = x;
    for it in 0..ITERS {
        let w = 0.9 - it as f64 * (0.9 - 0.2) / ITERS as f64;
        for a in 0..POP {
            let ph1: f64 = rng.random_range(7.0..14.0);
            let ph2: f64 = rng.random_range(7.0..14.0);
            let t1: f64 = rng.random_range(35.1..38.5);
            for k in 0..DIM {
                v[a][k] = w * ph1.log10() * v[a][k] + ph2.log10() * t1.log10() * (g[k] - x[a][k]);
                v[a][k] = v[a][k].clamp(-100.0, 100.0);
                let moved = x[a][k] + v[a][k];
                x[a][k] = moved.clamp(-100.0, 100.0);
                if x[a][k] != moved {
                    v[a][k] = 0.0;
                }
            }
            let f = sphere(&x[a]);
            if f < pbest[a] {
                pbest[a] = f;
                pbest_x[a] = x[a];
            }
        }
        for a in 0..POP {
            if pbest[a] < gf {
                gf = pbest[a];
                g = pbest_x[a];
            }
        }
        path.positions.push(x);
        path.best.push(gf);
    }
    path
}

#[test]
fn library_matches_reference_path() {
    let cfg = OptimizerConfig {
        population: POP,
        iter_max: ITERS,
        newton_enabled: false,
        fa_attraction_in_hybrid: false,
        ..OptimizerConfig::default()
    };
    let problem = Problem::new(1, DIM).unwrap();
    assert_eq!(problem.bounds().range(), 200.0);
    for seed in 0..50u64 {
        let path = reference(seed);
        let mut rng = SimRng::seed_from_u64(seed);
        let mut state = SwarmState::initialize(&problem, &cfg, &mut rng);
        for it in 0..=ITERS {
            if it > 0 {
                step_hybrid(&mut state, &problem, &cfg, &mut rng);
            }
            for (a, agent) in state.agents.iter().enumerate() {
                assert_eq!(agent.position.as_slice(), path.positions[it][a].as_slice(), "seed {seed} it {it}");
            }
            assert_eq!(state.global_best_fitness, path.best[it], "seed {seed} it {it}");
        }
        let record = hfasson::optimizer::optimize(&problem, Algorithm::Hfasso, &cfg, seed).unwrap();
        let trace: Vec<f64> = record.trace.iter().map(|p| p.1).collect();
        assert_eq!(trace, path.best);
    }
}
