use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::SimRng;

use super::{Objective, OptimizerConfig};

/// One swarm member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub fitness: f64,
    pub personal_best_position: Vec<f64>,
    pub personal_best_fitness: f64,
}

impl Agent {
    pub fn new(position: Vec<f64>, velocity: Vec<f64>, fitness: f64) -> Self {
        Self {
            personal_best_position: position.clone(),
            personal_best_fitness: fitness,
            position,
            velocity,
            fitness,
        }
    }

    /// Move to `position` with value `fitness`, keeping the personal best.
    pub fn set(&mut self, position: Vec<f64>, fitness: f64) {
        self.position = position;
        self.fitness = fitness;
        self.record();
    }

    /// Fold the current position into the personal best (strict `<`).
    pub fn record(&mut self) {
        if self.fitness < self.personal_best_fitness {
            self.personal_best_fitness = self.fitness;
            self.personal_best_position.clone_from(&self.position);
        }
    }
}

/// The population plus the best point seen so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmState {
    pub agents: Vec<Agent>,
    pub global_best_position: Vec<f64>,
    pub global_best_fitness: f64,
    pub iteration: usize,
}

impl SwarmState {
    /// Positions uniform in the box, velocities uniform in
    /// `+-velocity_clamp_fraction * range` (half the range when unclamped).
    pub fn initialize(problem: &dyn Objective, cfg: &OptimizerConfig, rng: &mut SimRng) -> Self {
        let b = problem.bounds();
        let d = problem.dimension();
        let positions: Vec<Vec<f64>> = (0..cfg.population)
            .map(|_| (0..d).map(|_| rng.random_range(b.lower..=b.upper)).collect())
            .collect();
        let vmax = cfg.velocity_clamp_fraction.unwrap_or(0.5) * b.range();
        let velocities: Vec<Vec<f64>> = (0..cfg.population)
            .map(|_| (0..d).map(|_| rng.random_range(-vmax..=vmax)).collect())
            .collect();
        let agents = positions
            .into_iter()
            .zip(velocities)
            .map(|(x, v)| {
                let f = problem.evaluate(&x, rng);
                Agent::new(x, v, f)
            })
            .collect();
        Self::from_agents(agents)
    }

    /// Build a state from explicit agents; the global best is the first
    /// agent holding the smallest personal best.
    pub fn from_agents(agents: Vec<Agent>) -> Self {
        assert!(!agents.is_empty(), "a swarm needs at least one agent");
        let mut state = Self {
            global_best_position: agents[0].personal_best_position.clone(),
            global_best_fitness: agents[0].personal_best_fitness,
            agents,
            iteration: 0,
        };
        state.update_global_best();
        state
    }

    /// Scan the personal bests in order; strict `<` so the first one found
    /// wins ties.
    pub fn update_global_best(&mut self) {
        for a in &self.agents {
            if a.personal_best_fitness < self.global_best_fitness {
                self.global_best_fitness = a.personal_best_fitness;
                self.global_best_position.clone_from(&a.personal_best_position);
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.global_best_position.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::Problem;
    use rand::SeedableRng;

    #[test]
    fn initialization_respects_bounds_and_bests() {
        let p = Problem::new(5, 8).unwrap();
        let cfg = OptimizerConfig::default();
        let mut rng = SimRng::seed_from_u64(1);
        let s = SwarmState::initialize(&p, &cfg, &mut rng);
        assert_eq!(s.agents.len(), 30);
        let vmax = 0.5 * 60.0;
        for a in &s.agents {
            assert!(a.position.iter().all(|v| (-30.0..=30.0).contains(v)));
            assert!(a.velocity.iter().all(|v| v.abs() <= vmax));
            assert_eq!(a.velocity.len(), a.position.len());
            assert_eq!(a.fitness, a.personal_best_fitness);
        }
        let min = s.agents.iter().map(|a| a.fitness).fold(f64::INFINITY, f64::min);
        assert_eq!(s.global_best_fitness, min);
    }

    #[test]
    fn first_found_best_wins_ties() {
        let agents = vec![
            Agent::new(vec![3.0], vec![0.0], 2.0),
            Agent::new(vec![1.0], vec![0.0], 1.0),
            Agent::new(vec![-1.0], vec![0.0], 1.0),
        ];
        let s = SwarmState::from_agents(agents);
        assert_eq!(s.global_best_position, vec![1.0]);
    }

    #[test]
    fn personal_best_only_improves() {
        let mut a = Agent::new(vec![0.0], vec![0.0], 1.0);
        a.set(vec![2.0], 4.0);
        assert_eq!((a.personal_best_fitness, a.personal_best_position.clone()), (1.0, vec![0.0]));
        a.set(vec![0.5], 0.25);
        assert_eq!((a.personal_best_fitness, a.personal_best_position), (0.25, vec![0.5]));
    }
}
