use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::newton::FdConfig;

/// The four population optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Algorithm {
    Fa,
    Sso,
    Hfasso,
    Hfasson,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Fa, Algorithm::Sso, Algorithm::Hfasso, Algorithm::Hfasson];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Fa => "FA",
            Algorithm::Sso => "SSO",
            Algorithm::Hfasso => "HFASSO",
            Algorithm::Hfasson => "HFASSON",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fa" => Ok(Algorithm::Fa),
            "sso" => Ok(Algorithm::Sso),
            "hfasso" => Ok(Algorithm::Hfasso),
            "hfasson" => Ok(Algorithm::Hfasson),
            other => Err(Error::InvalidInput(format!(
                "unknown algorithm {other:?}; expected one of fa, sso, hfasso, hfasson"
            ))),
        }
    }
}

/// Tunables shared by all four optimizers.
///
/// Defaults follow the published parameter table: population 30, 1000
/// iterations, `gamma = 1`, `beta0 = 2`, `alpha = 0.2`, pH drawn from
/// (7, 14), temperature from (35.1, 38.5), inertia from 0.9 down to 0.2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub population: usize,
    pub iter_max: usize,
    /// Light absorption coefficient.
    pub gamma: f64,
    /// Attractiveness at distance zero.
    pub beta0: f64,
    /// Mutation (random walk) coefficient.
    pub alpha: f64,
    /// Distance exponent in the attractiveness decay.
    pub m_exponent: f64,
    /// Velocity damping factor range.
    pub delta_range: (f64, f64),
    pub ph_range: (f64, f64),
    pub temp_range: (f64, f64),
    pub w_min: f64,
    pub w_max: f64,
    /// Newton refinement in the hybrid step. [`crate::optimizer::optimize`]
    /// sets it from the algorithm (off for HFASSO, on for HFASSON).
    pub newton_enabled: bool,
    pub fd_step_rel: f64,
    pub fd_step_abs_floor: f64,
    pub second_deriv_floor: f64,
    /// Newton step cap as a fraction of the range.
    pub newton_max_step: f64,
    /// Run the firefly attraction pass inside the hybrid step.
    pub fa_attraction_in_hybrid: bool,
    /// `|v_k| <= fraction * (upper - lower)`; `None` disables clamping.
    pub velocity_clamp_fraction: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let fd = FdConfig::default();
        Self {
            population: 30,
            iter_max: 1000,
            gamma: 1.0,
            beta0: 2.0,
            alpha: 0.2,
            m_exponent: 2.0,
            delta_range: (0.0, 1.0),
            ph_range: (7.0, 14.0),
            temp_range: (35.1, 38.5),
            w_min: 0.2,
            w_max: 0.9,
            newton_enabled: true,
            fd_step_rel: fd.fd_step_rel,
            fd_step_abs_floor: fd.fd_step_abs_floor,
            second_deriv_floor: fd.second_deriv_floor,
            newton_max_step: fd.max_step,
            fa_attraction_in_hybrid: true,
            velocity_clamp_fraction: Some(0.5),
        }
    }
}

impl OptimizerConfig {
    pub fn fd_config(&self) -> FdConfig {
        FdConfig {
            fd_step_rel: self.fd_step_rel,
            fd_step_abs_floor: self.fd_step_abs_floor,
            second_deriv_floor: self.second_deriv_floor,
            max_step: self.newton_max_step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.population < 2 {
            return fail("population must be at least 2");
        }
        if self.iter_max == 0 {
            return fail("iter_max must be positive");
        }
        if !(0.0 <= self.w_min && self.w_min < self.w_max && self.w_max <= 1.0) {
            return fail("inertia weights need 0 <= w_min < w_max <= 1");
        }
        if !(self.gamma > 0.0) || !(self.beta0 > 0.0) || !(self.alpha >= 0.0) {
            return fail("need gamma > 0, beta0 > 0, alpha >= 0");
        }
        if !(self.m_exponent > 0.0) {
            return fail("m_exponent must be positive");
        }
        let ordered = |r: (f64, f64)| r.0 < r.1;
        if !ordered(self.delta_range) || self.delta_range.0 < 0.0 || self.delta_range.1 > 1.0 {
            return fail("delta_range must be an interval inside [0, 1]");
        }
        if !ordered(self.ph_range) || self.ph_range.0 <= 1.0 {
            return fail("ph_range must be an interval above 1");
        }
        if !ordered(self.temp_range) || self.temp_range.0 <= 1.0 {
            return fail("temp_range must be an interval above 1");
        }
        if let Some(v) = self.velocity_clamp_fraction {
            if !(v > 0.0) {
                return fail("velocity_clamp_fraction must be positive");
            }
        }
        self.fd_config().validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        OptimizerConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let base = OptimizerConfig::default();
        let bad = [
            OptimizerConfig { population: 1, ..base.clone() },
            OptimizerConfig { w_min: 0.9, w_max: 0.2, ..base.clone() },
            OptimizerConfig { gamma: 0.0, ..base.clone() },
            OptimizerConfig { ph_range: (0.5, 14.0), ..base.clone() },
            OptimizerConfig { alpha: -0.1, ..base.clone() },
            OptimizerConfig { newton_max_step: 2.0, ..base.clone() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("pso".parse::<Algorithm>().is_err());
    }
}
