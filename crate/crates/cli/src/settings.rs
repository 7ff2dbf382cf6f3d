//! `key = value` settings files.
//!
//! Keys are the snake_case field names of the optimizer configuration, the
//! sensing scenario and the threshold search, plus the parameter-table
//! spellings listed in [`alias`]. Blank lines and `#` comments are ignored.
//! Ranges are written `lo, hi`.

use std::path::Path;
use std::str::FromStr;

use hfasson::crvanet::{SensingScenario, ThresholdObjective, ThresholdSearch};
use hfasson::optimizer::OptimizerConfig;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub optimizer: OptimizerConfig,
    pub scenario: SensingScenario,
    pub search: ThresholdSearch,
}

fn alias(key: &str) -> &str {
    match key {
        "population_size" => "population",
        "number_of_iterations" | "iterations" | "generations" => "iter_max",
        "light_absorption_coefficient" => "gamma",
        "attraction_coefficient_base_value" => "beta0",
        "mutation_coefficient" => "alpha",
        "damping_factor_of_velocity" | "damping_factor" => "delta_range",
        "ph" => "ph_range",
        "temperature" => "temp_range",
        "number_of_channels" => "channels",
        "number_of_primary_users" => "primary_users",
        "number_of_secondary_users" => "secondary_users",
        "number_of_vehicles" => "vehicles",
        "snr_in_db" | "snr" => "snr_db",
        "samples" => "samples_per_sensing",
        "slots" => "slot_count",
        "minimum_speed" => "speed_min",
        "maximum_speed" => "speed_max",
        other => other,
    }
}

fn normalize(key: &str) -> String {
    key.trim()
        .to_ascii_lowercase()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect::<String>()
        .split('_')
        .filter(|p| !p.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("{key}: cannot parse {value:?}"))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>, String> {
    value.split(',').map(|v| num(key, v)).collect()
}

fn range(key: &str, value: &str) -> Result<(f64, f64), String> {
    match list(key, value)?.as_slice() {
        [lo, hi] => Ok((*lo, *hi)),
        _ => Err(format!("{key}: expected `lo, hi`, got {value:?}")),
    }
}

fn flag(key: &str, value: &str) -> Result<bool, String> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("{key}: expected true or false, got {value:?}")),
    }
}

fn optional(key: &str, value: &str) -> Result<Option<f64>, String> {
    match value.trim().to_ascii_lowercase().as_str() {
        "none" | "off" => Ok(None),
        _ => num(key, value).map(Some),
    }
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut s = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
            s.set(key, value).map_err(|e| format!("line {}: {e}", n + 1))?;
        }
        Ok(s)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let normalized = normalize(key);
        let k = alias(&normalized);
        let o = &mut self.optimizer;
        let sc = &mut self.scenario;
        let se = &mut self.search;
        match k {
            "population" => o.population = num(k, value)?,
            "iter_max" => o.iter_max = num(k, value)?,
            "gamma" => o.gamma = num(k, value)?,
            "beta0" => o.beta0 = num(k, value)?,
            "alpha" => o.alpha = num(k, value)?,
            "m_exponent" => o.m_exponent = num(k, value)?,
            "delta_range" => o.delta_range = range(k, value)?,
            "ph_range" => o.ph_range = range(k, value)?,
            "temp_range" => o.temp_range = range(k, value)?,
            "w_min" => o.w_min = num(k, value)?,
            "w_max" => o.w_max = num(k, value)?,
            "fd_step_rel" => o.fd_step_rel = num(k, value)?,
            "fd_step_abs_floor" => o.fd_step_abs_floor = num(k, value)?,
            "second_deriv_floor" => o.second_deriv_floor = num(k, value)?,
            "newton_max_step" => o.newton_max_step = num(k, value)?,
            "fa_attraction_in_hybrid" => o.fa_attraction_in_hybrid = flag(k, value)?,
            "velocity_clamp_fraction" => o.velocity_clamp_fraction = optional(k, value)?,
            "channels" => sc.channels = num(k, value)?,
            "primary_users" => sc.primary_users = num(k, value)?,
            "secondary_users" => sc.secondary_users = num(k, value)?,
            "vehicles" => sc.vehicles = num(k, value)?,
            "snr_db" => sc.snr_db = num(k, value)?,
            "samples_per_sensing" => sc.samples_per_sensing = num(k, value)?,
            "noise_variance" => sc.noise_variance = num(k, value)?,
            "slot_count" => sc.slot_count = num(k, value)?,
            "speed_min" => sc.speed_min = num(k, value)?,
            "speed_max" => sc.speed_max = num(k, value)?,
            "speed_range" => (sc.speed_min, sc.speed_max) = range(k, value)?,
            "pu_activity" => sc.pu_activity = list(k, value)?,
            "traffic_load" => sc.traffic_load = num(k, value)?,
            "reselect_rate" => sc.reselect_rate = num(k, value)?,
            "bank_trials" => se.bank_trials = num(k, value)?,
            "pd_floor" => se.pd_floor = num(k, value)?,
            "miss_weight" => se.miss_weight = optional(k, value)?,
            "objective" => {
                se.objective = match value.trim().to_ascii_lowercase().as_str() {
                    "false_alarm" => ThresholdObjective::FalseAlarm,
                    "literal" => ThresholdObjective::Literal,
                    other => return Err(format!("objective: expected false_alarm or literal, got {other:?}")),
                }
            }
            _ => return Err(format!("unknown setting {key:?}")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_table_spellings() {
        let s = Settings::parse(
            "# parameter table\n\
             Population size = 20\n\
             Number of iterations = 50   # short run\n\
             Temperature = 35.5, 38.5\n\
             Number of channels = 4\n\
             SNR in dB = -12\n\
             pu_activity = 0.1, 0.2, 0.3, 0.4\n\
             velocity_clamp_fraction = none\n\
             objective = literal\n",
        )
        .unwrap();
        assert_eq!(s.optimizer.population, 20);
        assert_eq!(s.optimizer.iter_max, 50);
        assert_eq!(s.optimizer.temp_range, (35.5, 38.5));
        assert_eq!(s.optimizer.velocity_clamp_fraction, None);
        assert_eq!(s.scenario.channels, 4);
        assert_eq!(s.scenario.snr_db, -12.0);
        assert_eq!(s.scenario.pu_activity, vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(s.search.objective, ThresholdObjective::Literal);
    }

    #[test]
    fn errors_name_the_line() {
        let e = Settings::parse("population = 3\nwarp_factor = 9\n").unwrap_err();
        assert!(e.contains("line 2") && e.contains("warp_factor"), "{e}");
        assert!(Settings::parse("population 3").is_err());
        assert!(Settings::parse("temperature = 35").is_err());
        assert!(Settings::parse("population = many").is_err());
    }
}
