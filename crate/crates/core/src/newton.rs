//! Coordinate-wise Newton-Raphson refinement with finite-difference
//! derivatives.
//!
//! Each coordinate takes the minimization step `x_i - g'(x_i) / g''(x_i)`,
//! i.e. a diagonal-Hessian Newton sweep. Where the base stencil sees no
//! positive curvature it is widened first; steps are skipped where the
//! curvature is still not clearly positive, capped to a fraction of the range and
//! clamped to the box. [`refine`] only returns a point that strictly improves
//! the objective.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite-difference and step-control settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    /// Step relative to `|x_i|`.
    pub fd_step_rel: f64,
    /// Smallest absolute step.
    pub fd_step_abs_floor: f64,
    /// Newton steps with `g'' <= second_deriv_floor` are skipped.
    pub second_deriv_floor: f64,
    /// Cap on `|dx|` as a fraction of the coordinate range.
    pub max_step: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            fd_step_rel: 1e-6,
            fd_step_abs_floor: 1e-5,
            second_deriv_floor: 1e-12,
            max_step: 0.5,
        }
    }
}

impl FdConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.fd_step_rel,
            self.fd_step_abs_floor,
            self.second_deriv_floor,
            self.max_step,
        ]
        .iter()
        .all(|v| *v > 0.0 && v.is_finite());
        if !positive || self.max_step > 1.0 {
            return Err(Error::InvalidConfig(format!(
                "finite-difference settings must be positive with max_step <= 1: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Box applied to every coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn range(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }

    pub fn contains(&self, v: f64) -> bool {
        (self.lower..=self.upper).contains(&v)
    }
}

/// Grow the stencil while the curvature signal is below this multiple of the
/// rounding noise in the three function values.
const NOISE_RATIO: f64 = 1e10;
const GROWTH: f64 = 10.0;
const MAX_GROWTH_STEPS: usize = 12;
/// Widest stencil arm as a fraction of the coordinate range.
const MAX_ARM: f64 = 1.0;

/// Three-point derivative estimate along one coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub first: f64,
    pub second: f64,
}

/// When the stencil is widened beyond the base step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// Base step only.
    Fixed,
    /// Widen while the curvature is lost in rounding noise.
    NoiseAware,
    /// Widen also while the curvature is not clearly positive, so flat
    /// plateaus, kinks and locally concave stretches still yield a usable
    /// Newton step.
    Searching,
}

/// Offsets `(s, t)` of the two probe points relative to `x_i`.
///
/// Interior points get the symmetric stencil `(-h, h)`. Near a bound the arm
/// on that side is shortened; on a bound both probes go inward, at `h/2`
/// and `h`.
fn offsets(xi: f64, h: f64, bounds: Option<Bounds>) -> Option<(f64, f64)> {
    let Some(b) = bounds else {
        return Some((-h, h));
    };
    let down = h.min(xi - b.lower);
    let up = h.min(b.upper - xi);
    match (down > 0.0, up > 0.0) {
        (true, true) => Some((-down, up)),
        (false, true) => Some((up / 2.0, up)),
        (true, false) => Some((-down, -down / 2.0)),
        (false, false) => None,
    }
}

/// Derivatives of the parabola through `(0, f0)`, `(s, fs)`, `(t, ft)`.
fn parabola(f0: f64, s: f64, fs: f64, t: f64, ft: f64) -> Derivatives {
    if s == -t {
        // central differences
        let h = t;
        return Derivatives {
            first: (ft - fs) / (2.0 * h),
            second: (ft - 2.0 * f0 + fs) / (h * h),
        };
    }
    let second = 2.0 * ((ft - f0) / t - (fs - f0) / s) / (t - s);
    let first = (fs - f0) / s - 0.5 * second * s;
    Derivatives { first, second }
}

/// First and second derivative of `f` along coordinate `i` at `x`, where
/// `f(x) = centre`.
///
/// The base step is `max(fd_step_abs_floor, fd_step_rel * |x_i|)`; `mode`
/// decides whether it is widened by factors of ten, up to the full range.
/// Returns `None` when no stencil fits in the box.
pub fn derivatives<F>(
    f: &mut F,
    x: &mut [f64],
    centre: f64,
    i: usize,
    bounds: Option<Bounds>,
    cfg: &FdConfig,
    mode: Stencil,
) -> Option<Derivatives>
where
    F: FnMut(&[f64]) -> f64,
{
    let xi = x[i];
    let mut h = cfg.fd_step_abs_floor.max(cfg.fd_step_rel * xi.abs());
    let max_arm = bounds.map_or(f64::INFINITY, |b| MAX_ARM * b.range());
    let mut grown = 0;
    loop {
        let (s, t) = offsets(xi, h, bounds)?;
        x[i] = xi + s;
        let fs = f(x);
        x[i] = xi + t;
        let ft = f(x);
        x[i] = xi;
        let d = parabola(centre, s, fs, t, ft);

        let noise = f64::EPSILON * (centre.abs() + fs.abs() + ft.abs());
        let curvature = 0.5 * d.second.abs() * s.abs().max(t.abs()).powi(2);
        let resolved = curvature >= NOISE_RATIO * noise;
        let done = match mode {
            Stencil::Fixed => true,
            Stencil::NoiseAware => resolved,
            Stencil::Searching => resolved && d.second > cfg.second_deriv_floor,
        };
        if done || grown == MAX_GROWTH_STEPS || h >= max_arm {
            return Some(d);
        }
        h = (h * GROWTH).min(max_arm);
        grown += 1;
    }
}

/// Central difference `(f(x+h) - f(x-h)) / 2h` along coordinate `i`.
///
/// Near a bound the stencil is made one-sided (see [`derivatives`]).
pub fn first_derivative<F>(f: &mut F, x: &[f64], i: usize, bounds: Option<Bounds>, cfg: &FdConfig) -> f64
where
    F: FnMut(&[f64]) -> f64,
{
    let centre = f(x);
    let mut work = x.to_vec();
    derivatives(f, &mut work, centre, i, bounds, cfg, Stencil::Fixed).map_or(0.0, |d| d.first)
}

/// Second difference `(f(x+h) - 2f(x) + f(x-h)) / h^2` along coordinate `i`,
/// widened out of rounding noise.
pub fn second_derivative<F>(f: &mut F, x: &[f64], i: usize, bounds: Option<Bounds>, cfg: &FdConfig) -> f64
where
    F: FnMut(&[f64]) -> f64,
{
    let centre = f(x);
    let mut work = x.to_vec();
    derivatives(f, &mut work, centre, i, bounds, cfg, Stencil::NoiseAware).map_or(0.0, |d| d.second)
}

/// Newton target for coordinate `i` given `f(x) = centre`, or `None` when
/// the step is skipped. Uses the [`Stencil::Searching`] estimate.
fn newton_target<F>(
    f: &mut F,
    x: &mut [f64],
    centre: f64,
    i: usize,
    bounds: Bounds,
    cfg: &FdConfig,
) -> Option<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let d = derivatives(f, x, centre, i, Some(bounds), cfg, Stencil::Searching)?;
    if !(d.second > cfg.second_deriv_floor) || !d.first.is_finite() {
        return None;
    }
    let cap = cfg.max_step * bounds.range();
    let delta = (-d.first / d.second).clamp(-cap, cap);
    let target = bounds.clamp(x[i] + delta);
    (target != x[i]).then_some(target)
}

/// One Newton step on coordinate `i`. Returns `x` unchanged when the
/// curvature guard rejects the step.
pub fn newton_coordinate_step<F>(f: &mut F, x: &[f64], i: usize, bounds: Bounds, cfg: &FdConfig) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut out = x.to_vec();
    let centre = f(x);
    if let Some(t) = newton_target(f, &mut out, centre, i, bounds, cfg) {
        out[i] = t;
    }
    out
}

/// Result of a refinement sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Refined {
    pub position: Vec<f64>,
    pub fitness: f64,
    pub improved: bool,
}

/// One sequential sweep over all coordinates, starting from a point whose
/// value `fx` is already known. Each coordinate sees the updates of the
/// previous ones. The swept point is returned only if it strictly improves
/// on `fx`.
pub fn refine_from<F>(f: &mut F, x: &[f64], fx: f64, bounds: Bounds, cfg: &FdConfig) -> Refined
where
    F: FnMut(&[f64]) -> f64,
{
    let mut work = x.to_vec();
    let mut current = fx;
    let mut moved = false;
    let n = work.len();
    for i in 0..n {
        if let Some(t) = newton_target(f, &mut work, current, i, bounds, cfg) {
            work[i] = t;
            current = f(&work);
            moved = true;
        }
    }
    if moved && current < fx {
        Refined {
            position: work,
            fitness: current,
            improved: true,
        }
    } else {
        Refined {
            position: x.to_vec(),
            fitness: fx,
            improved: false,
        }
    }
}

/// One sweep from `x`; returns the refined point if it improves `f`, else `x`.
pub fn refine<F>(f: &mut F, x: &[f64], bounds: Bounds, cfg: &FdConfig) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let fx = f(x);
    refine_from(f, x, fx, bounds, cfg).position
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench;

    fn cfg() -> FdConfig {
        FdConfig::default()
    }

    #[test]
    fn derivatives_of_simple_functions() {
        let mut sq = |x: &[f64]| x[0] * x[0];
        assert!((first_derivative(&mut sq, &[3.0], 0, None, &cfg()) - 6.0).abs() < 1e-6);
        assert!((second_derivative(&mut sq, &[3.0], 0, None, &cfg()) - 2.0).abs() < 1e-4);
        assert!((second_derivative(&mut sq, &[-7.5], 0, None, &cfg()) - 2.0).abs() < 1e-4);

        let mut constant = |_: &[f64]| 4.2;
        assert_eq!(first_derivative(&mut constant, &[1.0], 0, None, &cfg()), 0.0);

        let mut linear = |x: &[f64]| 3.0 * x[0] - 1.0;
        assert!(second_derivative(&mut linear, &[2.0], 0, None, &cfg()).abs() < 1e-4);

        let mut quartic = |x: &[f64]| x[0].powi(4);
        assert!((second_derivative(&mut quartic, &[1.0], 0, None, &cfg()) - 12.0).abs() < 1e-2);
    }

    #[test]
    fn rosenbrock_gradient_at_origin() {
        let mut f = |x: &[f64]| bench::rosenbrock(x);
        let g = first_derivative(&mut f, &[0.0, 0.0], 0, Some(Bounds::new(-30.0, 30.0)), &cfg());
        assert!((g - -2.0).abs() < 1e-4, "{g}");
    }

    #[test]
    fn newton_is_exact_on_quadratics() {
        let b = Bounds::new(-10.0, 10.0);
        let mut sq = |x: &[f64]| x[0] * x[0];
        let out = newton_coordinate_step(&mut sq, &[3.0], 0, b, &cfg());
        assert!(out[0].abs() < 1e-9);

        let mut shifted = |x: &[f64]| 2.5 * (x[0] - 1.25).powi(2) + 7.0;
        let out = newton_coordinate_step(&mut shifted, &[-4.0], 0, b, &cfg());
        assert!((out[0] - 1.25).abs() < 1e-8, "{}", out[0]);
    }

    #[test]
    fn flat_and_concave_directions_are_left_alone() {
        let b = Bounds::new(-10.0, 10.0);
        let mut linear = |x: &[f64]| 2.0 * x[0];
        assert_eq!(newton_coordinate_step(&mut linear, &[1.0], 0, b, &cfg()), vec![1.0]);
        let mut concave = |x: &[f64]| -x[0] * x[0];
        assert_eq!(refine(&mut concave, &[1.0], b, &cfg()), vec![1.0]);
    }

    #[test]
    fn step_is_capped_and_clamped() {
        let b = Bounds::new(-1.0, 1.0);
        // minimiser at 50, far outside the box
        let mut f = |x: &[f64]| (x[0] - 50.0).powi(2);
        let out = newton_coordinate_step(&mut f, &[0.0], 0, b, &cfg());
        assert_eq!(out, vec![1.0]);
        let tight = FdConfig {
            max_step: 0.1,
            ..cfg()
        };
        let out = newton_coordinate_step(&mut f, &[0.0], 0, b, &tight);
        assert!((out[0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn refine_sphere_lands_on_origin() {
        let b = Bounds::new(-100.0, 100.0);
        let x: Vec<f64> = (0..30).map(|i| -90.0 + 6.1 * i as f64).collect();
        let mut f = |x: &[f64]| bench::sphere(x);
        let out = refine(&mut f, &x, b, &cfg());
        assert!(out.iter().all(|v| v.abs() < 1e-6), "{out:?}");
        assert!(bench::sphere(&out) < bench::sphere(&x));
    }

    #[test]
    fn refine_keeps_stationary_points() {
        let b = Bounds::new(-5.0, 5.0);
        let mut f = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2);
        assert_eq!(refine(&mut f, &[1.0, -2.0], b, &cfg()), vec![1.0, -2.0]);
    }

    #[test]
    fn points_on_the_boundary_use_inward_stencils() {
        let b = Bounds::new(0.0, 1.0);
        let mut f = |x: &[f64]| (x[0] - 0.5).powi(2);
        let out = newton_coordinate_step(&mut f, &[1.0], 0, b, &cfg());
        assert!((out[0] - 0.5).abs() < 1e-9);
        let out = newton_coordinate_step(&mut f, &[0.0], 0, b, &cfg());
        assert!((out[0] - 0.5).abs() < 1e-9);
        let g = first_derivative(&mut f, &[0.999_999_9], 0, Some(b), &cfg());
        assert!((g - 1.0).abs() < 1e-5, "{g}");
    }

    #[test]
    fn parabola_matches_central_formulas() {
        let d = parabola(1.0, -0.5, 2.0, 0.5, 4.0);
        assert_eq!(d.first, (4.0 - 2.0) / 1.0);
        assert_eq!(d.second, (4.0 - 2.0 + 2.0) / 0.25);
        // y = 3 + 2t + 5t^2 sampled at t = 0.25 and t = 1
        let p = |t: f64| 3.0 + 2.0 * t + 5.0 * t * t;
        let d = parabola(p(0.0), 0.25, p(0.25), 1.0, p(1.0));
        assert!((d.first - 2.0).abs() < 1e-12 && (d.second - 10.0).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        assert!(FdConfig { max_step: 1.5, ..cfg() }.validate().is_err());
        assert!(FdConfig { fd_step_rel: 0.0, ..cfg() }.validate().is_err());
    }
}
