//! Update equations of the firefly, sperm-swarm and hybrid optimizers.
//!
//! The random coefficients are drawn by the `draw_*` helpers and passed in
//! explicitly, so every update can be replayed with fixed coefficients.

use rand::Rng;

use crate::error::{Error, Result};
use crate::newton::Bounds;
use crate::SimRng;

use super::OptimizerConfig;

/// `beta0 * exp(-gamma * r^m)`.
pub fn fa_attractiveness(r: f64, cfg: &OptimizerConfig) -> f64 {
    cfg.beta0 * (-cfg.gamma * r.powf(cfg.m_exponent)).exp()
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Move firefly `xi` toward the brighter `xj`:
/// `xi + beta(r_ij) * (xj - xi) + alpha * eps * range`, `eps ~ U(0, 1)` per
/// coordinate, clamped to the box.
pub fn fa_move(
    xi: &[f64],
    xj: &[f64],
    bounds: Bounds,
    cfg: &OptimizerConfig,
    rng: &mut SimRng,
) -> Result<Vec<f64>> {
    if xi.len() != xj.len() {
        return Err(Error::DimensionMismatch {
            left: xi.len(),
            right: xj.len(),
        });
    }
    let beta = fa_attractiveness(euclidean(xi, xj), cfg);
    let scale = cfg.alpha * bounds.range();
    Ok(xi
        .iter()
        .zip(xj)
        .map(|(a, b)| {
            let eps: f64 = rng.random();
            bounds.clamp(a + beta * (b - a) + scale * eps)
        })
        .collect())
}

/// Random walk of the brightest firefly, which has nobody to follow.
pub fn fa_random_walk(xi: &[f64], bounds: Bounds, cfg: &OptimizerConfig, rng: &mut SimRng) -> Vec<f64> {
    let scale = cfg.alpha * bounds.range();
    xi.iter()
        .map(|a| {
            let eps: f64 = rng.random();
            bounds.clamp(a + scale * eps)
        })
        .collect()
}

fn uniform(rng: &mut SimRng, range: (f64, f64)) -> f64 {
    rng.random_range(range.0..range.1)
}

/// `log10(pH)` with pH drawn from the configured range.
pub fn draw_ph_factor(rng: &mut SimRng, cfg: &OptimizerConfig) -> f64 {
    uniform(rng, cfg.ph_range).log10()
}

/// `log10(pH) * log10(T)`.
pub fn draw_attraction_factor(rng: &mut SimRng, cfg: &OptimizerConfig) -> f64 {
    let ph = uniform(rng, cfg.ph_range);
    let temp = uniform(rng, cfg.temp_range);
    ph.log10() * temp.log10()
}

/// Initial sperm velocity `d_f * v_prev * log10(pH)`.
pub fn sso_initial_velocity(v_prev: &[f64], rng: &mut SimRng, cfg: &OptimizerConfig) -> Vec<f64> {
    let damping = uniform(rng, cfg.delta_range);
    let ph = draw_ph_factor(rng, cfg);
    scale_velocity(v_prev, damping * ph)
}

pub fn scale_velocity(v: &[f64], factor: f64) -> Vec<f64> {
    v.iter().map(|x| x * factor).collect()
}

/// Clamp every component to `+-vmax`.
pub fn clamp_velocity(v: &mut [f64], vmax: Option<f64>) {
    if let Some(m) = vmax {
        for c in v.iter_mut() {
            *c = c.clamp(-m, m);
        }
    }
}

/// Sperm velocity: `v0 + c_p * (pbest - x) + c_g * (gbest - x)`.
pub fn sso_velocity(
    v0: &[f64],
    position: &[f64],
    personal_best: &[f64],
    global_best: &[f64],
    c_personal: f64,
    c_global: f64,
    vmax: Option<f64>,
) -> Vec<f64> {
    let mut v: Vec<f64> = (0..position.len())
        .map(|k| {
            v0[k]
                + c_personal * (personal_best[k] - position[k])
                + c_global * (global_best[k] - position[k])
        })
        .collect();
    clamp_velocity(&mut v, vmax);
    v
}

/// Linear inertia schedule from `w_max` at iteration 0 to `w_min` at
/// `iter_max`.
pub fn inertia_weight(iteration: usize, cfg: &OptimizerConfig) -> f64 {
    let t = iteration.min(cfg.iter_max) as f64;
    cfg.w_max - t * (cfg.w_max - cfg.w_min) / cfg.iter_max as f64
}

/// Hybrid velocity:
/// `w * log10(pH1) * v + log10(pH2) * log10(T1) * (gbest - x)`.
pub fn hfasson_velocity(
    velocity: &[f64],
    position: &[f64],
    global_best: &[f64],
    w: f64,
    ph_factor: f64,
    attraction: f64,
    vmax: Option<f64>,
) -> Vec<f64> {
    let mut v: Vec<f64> = (0..position.len())
        .map(|k| w * ph_factor * velocity[k] + attraction * (global_best[k] - position[k]))
        .collect();
    clamp_velocity(&mut v, vmax);
    v
}

/// `x + v`, clamped per coordinate. Any coordinate that hits a bound gets
/// its velocity component zeroed.
pub fn position_update(position: &mut [f64], velocity: &mut [f64], bounds: Bounds) {
    for (x, v) in position.iter_mut().zip(velocity.iter_mut()) {
        let moved = *x + *v;
        let clamped = bounds.clamp(moved);
        if clamped != moved {
            *v = 0.0;
        }
        *x = clamped;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn cfg() -> OptimizerConfig {
        OptimizerConfig::default()
    }

    #[test]
    fn attractiveness_values() {
        assert_eq!(fa_attractiveness(0.0, &cfg()), 2.0);
        let unit = OptimizerConfig { beta0: 1.0, ..cfg() };
        assert!((fa_attractiveness(1.0, &unit) - (-1.0f64).exp()).abs() < 1e-15);
        assert!(fa_attractiveness(1e3, &cfg()) < 1e-300);
        let mut prev = f64::INFINITY;
        for k in 0..50 {
            let b = fa_attractiveness(k as f64 * 0.1, &cfg());
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn firefly_moves() {
        let mut rng = SimRng::seed_from_u64(3);
        let b = Bounds::new(-10.0, 10.0);
        let still = OptimizerConfig { alpha: 0.0, ..cfg() };
        assert_eq!(fa_move(&[1.0, 2.0], &[1.0, 2.0], b, &still, &mut rng).unwrap(), vec![1.0, 2.0]);

        let full = OptimizerConfig { alpha: 0.0, beta0: 1.0, gamma: 1e-300, ..cfg() };
        let out = fa_move(&[0.0, 0.0], &[1.0, 0.0], b, &full, &mut rng).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-12 && out[1] == 0.0);

        let unit = OptimizerConfig { alpha: 0.0, beta0: 1.0, ..cfg() };
        let out = fa_move(&[0.0], &[1.0], b, &unit, &mut rng).unwrap();
        assert!((out[0] - (-1.0f64).exp()).abs() < 1e-15);

        assert!(fa_move(&[0.0], &[1.0, 2.0], b, &cfg(), &mut rng).is_err());
    }

    #[test]
    fn firefly_noise_is_forward_and_bounded() {
        let mut rng = SimRng::seed_from_u64(4);
        let b = Bounds::new(-100.0, 100.0);
        for _ in 0..100 {
            let out = fa_move(&[0.0; 3], &[0.0; 3], b, &cfg(), &mut rng).unwrap();
            assert!(out.iter().all(|v| (0.0..=40.0).contains(v)));
        }
    }

    #[test]
    fn sso_initial_velocity_cases() {
        let mut rng = SimRng::seed_from_u64(5);
        assert_eq!(sso_initial_velocity(&[0.0; 4], &mut rng, &cfg()), vec![0.0; 4]);
        let pinned = OptimizerConfig {
            delta_range: (1.0 - 1e-15, 1.0),
            ph_range: (10.0, 10.0 + 1e-12),
            ..cfg()
        };
        let out = sso_initial_velocity(&[3.0, -2.0], &mut rng, &pinned);
        assert!((out[0] - 3.0).abs() < 1e-9 && (out[1] + 2.0).abs() < 1e-9);
        let v = [1.0, 2.0, -2.0];
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..1000 {
            let ratio = norm(&sso_initial_velocity(&v, &mut rng, &cfg())) / norm(&v);
            assert!(ratio > 0.0 && ratio <= 14f64.log10());
        }
    }

    #[test]
    fn sso_velocity_cases() {
        let z = sso_velocity(&[0.0], &[2.0], &[2.0], &[2.0], 1.4, 1.7, None);
        assert_eq!(z, vec![0.0]);
        let v = sso_velocity(&[0.0], &[0.0], &[1.0], &[1.0], 1.5, 1.5, None);
        assert_eq!(v, vec![3.0]);
        let clamped = sso_velocity(&[0.0], &[0.0], &[1.0], &[1.0], 1.5, 1.5, Some(2.0));
        assert_eq!(clamped, vec![2.0]);
    }

    #[test]
    fn coefficient_ranges() {
        let mut rng = SimRng::seed_from_u64(6);
        let (lo, hi) = (7f64.log10() * 35.1f64.log10(), 14f64.log10() * 38.5f64.log10());
        assert!((lo - 1.306).abs() < 1e-3 && (hi - 1.817).abs() < 1e-3);
        for _ in 0..10_000 {
            let c = draw_attraction_factor(&mut rng, &cfg());
            assert!(c >= lo && c <= hi);
            let p = draw_ph_factor(&mut rng, &cfg());
            assert!(p >= 7f64.log10() && p <= 14f64.log10());
        }
    }

    #[test]
    fn inertia_schedule() {
        let c = cfg();
        assert_eq!(inertia_weight(0, &c), 0.9);
        assert!((inertia_weight(1000, &c) - 0.2).abs() < 1e-15);
        assert!((inertia_weight(500, &c) - 0.55).abs() < 1e-15);
        for t in 0..1000 {
            assert!(inertia_weight(t + 1, &c) < inertia_weight(t, &c));
        }
    }

    #[test]
    fn hybrid_velocity_cases() {
        let zero = hfasson_velocity(&[0.0; 2], &[1.0, 1.0], &[1.0, 1.0], 0.7, 1.0, 1.5, None);
        assert_eq!(zero, vec![0.0, 0.0]);
        // w = 0: pure attraction c * d
        let v = hfasson_velocity(&[5.0], &[0.0], &[2.0], 0.0, 1.0, 1.4, None);
        assert!((v[0] - 2.8).abs() < 1e-15);
        // at the global best only the inertia term survives
        let v = hfasson_velocity(&[2.0], &[1.0], &[1.0], 0.5, 0.9, 1.4, None);
        assert!((v[0] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn position_update_cases() {
        let b = Bounds::new(-100.0, 100.0);
        let (mut x, mut v) = (vec![1.0, 1.0], vec![0.0, 0.0]);
        position_update(&mut x, &mut v, b);
        assert_eq!(x, vec![1.0, 1.0]);
        let (mut x, mut v) = (vec![99.0], vec![5.0]);
        position_update(&mut x, &mut v, b);
        assert_eq!((x, v), (vec![100.0], vec![0.0]));
        let (mut x, mut v) = (vec![0.0], vec![3.0]);
        position_update(&mut x, &mut v, b);
        assert_eq!((x, v), (vec![3.0], vec![3.0]));
    }
}
