//! Energy-detection spectrum sensing and a time-slotted multi-channel
//! vehicular network, with HFASSON tuning the detection threshold.
//!
//! Signal model: under H0 every sample is real AWGN of variance `σ²`; under
//! H1 a real Gaussian primary signal of power `σ²·snr` is added. The
//! statistic `Ted = Σ s(n)²` is then a scaled chi-square with `N` degrees of
//! freedom, which makes the Gaussian approximation in [`theoretical_pfa`] an
//! independent oracle.
//!
//! Monte-Carlo trial `t` draws from the seed's ChaCha stream `t`, so results
//! do not depend on the rayon pool size.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::newton::Bounds;
use crate::optimizer::{optimize, Algorithm, FnObjective, OptimizerConfig, RunRecord};
use crate::SimRng;

/// Vehicle counts evaluated in the utilization study.
pub const VEHICLE_COUNTS: [usize; 5] = [20, 40, 60, 80, 100];

/// Theoretical false-alarm rate of the fixed baseline threshold.
pub const BASELINE_PFA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    /// Channel idle: noise only.
    H0,
    /// Primary user transmitting.
    H1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensingScenario {
    pub channels: usize,
    /// Primary user `p` is licensed on channel `p % channels`.
    pub primary_users: usize,
    /// Cognitive radios available per slot; vehicles with traffic compete
    /// for them.
    pub secondary_users: usize,
    pub vehicles: usize,
    pub snr_db: f64,
    pub samples_per_sensing: usize,
    pub noise_variance: f64,
    pub slot_count: usize,
    pub speed_min: f64,
    pub speed_max: f64,
    /// Per-channel probability that each of its primary users is on in a
    /// slot. Empty means 0.5 everywhere.
    pub pu_activity: Vec<f64>,
    /// Probability that a vehicle has a packet to send in a slot.
    pub traffic_load: f64,
    /// Channel re-selection probability per slot at `speed_max`; slower
    /// vehicles re-select proportionally less often.
    pub reselect_rate: f64,
}

impl Default for SensingScenario {
    fn default() -> Self {
        Self {
            channels: 5,
            primary_users: 5,
            secondary_users: 6,
            vehicles: 20,
            snr_db: -10.0,
            samples_per_sensing: 1000,
            noise_variance: 1.0,
            slot_count: 500,
            speed_min: 10.0,
            speed_max: 30.0,
            pu_activity: Vec::new(),
            traffic_load: 0.1,
            reselect_rate: 0.2,
        }
    }
}

impl SensingScenario {
    pub fn snr_linear(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    /// On-probability of each channel's primary users.
    pub fn activity(&self, channel: usize) -> f64 {
        self.pu_activity.get(channel).copied().unwrap_or(0.5)
    }

    /// Long-run share of slots in which a channel is occupied by a primary
    /// user, averaged over channels.
    pub fn mean_pu_occupancy(&self) -> f64 {
        let per_channel = |c: usize| {
            let owners = (0..self.primary_users).filter(|p| p % self.channels == c).count();
            1.0 - (1.0 - self.activity(c)).powi(owners as i32)
        };
        (0..self.channels).map(per_channel).sum::<f64>() / self.channels as f64
    }

    /// Slot count is checked separately by [`run_network_sim`].
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.channels == 0 || self.primary_users == 0 || self.secondary_users == 0 || self.vehicles == 0 {
            return fail("channel, user and vehicle counts must be positive".into());
        }
        if self.samples_per_sensing == 0 {
            return fail("samples_per_sensing must be positive".into());
        }
        if !self.snr_db.is_finite() || !(self.noise_variance > 0.0 && self.noise_variance.is_finite()) {
            return fail("snr_db must be finite and noise_variance positive".into());
        }
        if !(0.0 < self.speed_min && self.speed_min <= self.speed_max && self.speed_max.is_finite()) {
            return fail("speeds need 0 < speed_min <= speed_max".into());
        }
        if !self.pu_activity.is_empty() && self.pu_activity.len() != self.channels {
            return fail(format!(
                "pu_activity has {} entries for {} channels",
                self.pu_activity.len(),
                self.channels
            ));
        }
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        if !self.pu_activity.iter().all(|&p| unit(p)) || !unit(self.traffic_load) || !unit(self.reselect_rate) {
            return fail("pu_activity, traffic_load and reselect_rate must lie in [0, 1]".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorOutcome {
    pub ted: f64,
    pub decision: Hypothesis,
    pub truth: Hypothesis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub snr_db: f64,
    pub threshold: f64,
    pub pfa: f64,
    pub pd: f64,
}

/// `Σ s(n)²`.
pub fn ed_statistic(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("energy detection needs at least one sample".into()));
    }
    Ok(samples.iter().map(|s| s * s).sum())
}

fn received_energy(scenario: &SensingScenario, truth: Hypothesis, rng: &mut SimRng) -> f64 {
    let noise_sd = scenario.noise_variance.sqrt();
    let signal_sd = (scenario.noise_variance * scenario.snr_linear()).sqrt();
    let mut ted = 0.0;
    for _ in 0..scenario.samples_per_sensing {
        let noise: f64 = rng.sample::<f64, _>(StandardNormal) * noise_sd;
        let s = match truth {
            Hypothesis::H0 => noise,
            Hypothesis::H1 => rng.sample::<f64, _>(StandardNormal) * signal_sd + noise,
        };
        ted += s * s;
    }
    ted
}

/// One sensing period: H1 is declared iff `Ted > threshold`.
pub fn sense(scenario: &SensingScenario, truth: Hypothesis, threshold: f64, rng: &mut SimRng) -> DetectorOutcome {
    let ted = received_energy(scenario, truth, rng);
    DetectorOutcome {
        ted,
        decision: if ted > threshold { Hypothesis::H1 } else { Hypothesis::H0 },
        truth,
    }
}

/// Sorted energy samples under both hypotheses from one seed. Pfa and Pd at
/// any threshold are read off the same sample set, so both are exactly
/// non-increasing in the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct TedBank {
    pub h0: Vec<f64>,
    pub h1: Vec<f64>,
}

impl TedBank {
    pub fn generate(scenario: &SensingScenario, trials: usize, seed: u64) -> Result<Self> {
        scenario.validate()?;
        if trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        let pairs: Vec<(f64, f64)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = SimRng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let h0 = received_energy(scenario, Hypothesis::H0, &mut rng);
                let h1 = received_energy(scenario, Hypothesis::H1, &mut rng);
                (h0, h1)
            })
            .collect();
        let (mut h0, mut h1): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        h0.sort_by(f64::total_cmp);
        h1.sort_by(f64::total_cmp);
        Ok(Self { h0, h1 })
    }

    fn exceed(sorted: &[f64], threshold: f64) -> f64 {
        let below = sorted.partition_point(|&t| t <= threshold);
        (sorted.len() - below) as f64 / sorted.len() as f64
    }

    pub fn pfa(&self, threshold: f64) -> f64 {
        Self::exceed(&self.h0, threshold)
    }

    pub fn pd(&self, threshold: f64) -> f64 {
        Self::exceed(&self.h1, threshold)
    }

    /// Smallest bank threshold whose empirical Pfa is at most `pfa`.
    pub fn threshold_for_pfa(&self, pfa: f64) -> f64 {
        let n = self.h0.len();
        let allowed = (pfa.clamp(0.0, 1.0) * n as f64).floor() as usize;
        if allowed >= n {
            0.0
        } else {
            self.h0[n - 1 - allowed]
        }
    }
}

/// Empirical `(pd, pfa)` over `trials` sensings under each hypothesis.
pub fn estimate_pd_pfa(scenario: &SensingScenario, threshold: f64, trials: usize, seed: u64) -> Result<(f64, f64)> {
    let bank = TedBank::generate(scenario, trials, seed)?;
    Ok((bank.pd(threshold), bank.pfa(threshold)))
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Gaussian approximation `Q((μ - Nσ²) / (σ²·sqrt(2N)))`; accurate for
/// `N >= 100`.
pub fn theoretical_pfa(threshold: f64, samples: usize, noise_variance: f64) -> f64 {
    let n = samples as f64;
    let z = (threshold - n * noise_variance) / (noise_variance * (2.0 * n).sqrt());
    std_normal().sf(z)
}

/// Inverse of [`theoretical_pfa`] for `pfa` in `(0, 1)`.
pub fn threshold_for_pfa(pfa: f64, samples: usize, noise_variance: f64) -> f64 {
    let n = samples as f64;
    let z = std_normal().inverse_cdf(1.0 - pfa);
    n * noise_variance + z * noise_variance * (2.0 * n).sqrt()
}

/// The fixed threshold of the non-optimized detector.
pub fn baseline_threshold(scenario: &SensingScenario) -> f64 {
    threshold_for_pfa(BASELINE_PFA, scenario.samples_per_sensing, scenario.noise_variance)
}

/// Pfa/Pd grid. For each SNR one bank is drawn from `seed`, so the noise-only
/// samples (and therefore Pfa) are shared across SNRs.
pub fn roc_curve(
    scenario: &SensingScenario,
    snr_list: &[f64],
    thresholds: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<RocPoint>> {
    if snr_list.is_empty() || thresholds.is_empty() {
        return Err(Error::InvalidInput("roc_curve needs at least one SNR and one threshold".into()));
    }
    let mut points = Vec::with_capacity(snr_list.len() * thresholds.len());
    for &snr_db in snr_list {
        let bank = TedBank::generate(&SensingScenario { snr_db, ..scenario.clone() }, trials, seed)?;
        for &threshold in thresholds {
            points.push(RocPoint {
                snr_db,
                threshold,
                pfa: bank.pfa(threshold),
                pd: bank.pd(threshold),
            });
        }
    }
    Ok(points)
}

/// The printed sensing fitness `Thres · (-Pfa) · (β0 · δ · α)`.
pub fn sensing_fitness(thres: f64, pfa: f64, delta: f64, cfg: &OptimizerConfig) -> f64 {
    thres * -pfa * (cfg.beta0 * delta * cfg.alpha)
}

/// Damping factor for one threshold search, fixed for the whole run.
pub fn draw_delta(cfg: &OptimizerConfig, rng: &mut SimRng) -> f64 {
    let (lo, hi) = cfg.delta_range;
    rng.random_range(lo..hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdObjective {
    /// `β0·δ·α · μ_max · Pfa(μ) + λ · p_on · max(0, pd_floor - Pd(μ))`:
    /// false alarms are minimized while the detector keeps at least
    /// `pd_floor` detection probability on occupied channels.
    #[default]
    FalseAlarm,
    /// `sensing_fitness(μ, Pfa(μ)) + λ · (1 - Pd(μ))` taken literally. Its
    /// minimum sits below the noise floor, where nearly every idle channel
    /// is reported busy.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdSearch {
    pub objective: ThresholdObjective,
    /// Sensings per hypothesis behind the empirical Pfa and Pd.
    pub bank_trials: usize,
    pub pd_floor: f64,
    /// Miss penalty weight; `None` means `10 · μ_max`.
    pub miss_weight: Option<f64>,
}

impl Default for ThresholdSearch {
    fn default() -> Self {
        Self {
            objective: ThresholdObjective::FalseAlarm,
            bank_trials: 2000,
            pd_floor: 0.5,
            miss_weight: None,
        }
    }
}

/// Upper end of the threshold search: twice the mean H1 energy.
pub fn mu_max(scenario: &SensingScenario) -> f64 {
    2.0 * scenario.samples_per_sensing as f64 * scenario.noise_variance * (1.0 + scenario.snr_linear())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub threshold: f64,
    pub mu_max: f64,
    pub delta: f64,
    /// Bank estimates at `threshold`.
    pub pfa: f64,
    pub pd: f64,
    pub record: RunRecord,
}

pub fn optimize_threshold(scenario: &SensingScenario, cfg: &OptimizerConfig, seed: u64) -> Result<ThresholdResult> {
    optimize_threshold_with(scenario, cfg, &ThresholdSearch::default(), seed)
}

/// HFASSON over the single variable `μ ∈ [0, μ_max]`. The bank and `δ` come
/// from `seed` and the optimizer runs from the same seed, so the objective
/// is deterministic.
pub fn optimize_threshold_with(
    scenario: &SensingScenario,
    cfg: &OptimizerConfig,
    search: &ThresholdSearch,
    seed: u64,
) -> Result<ThresholdResult> {
    if !(0.0..=1.0).contains(&search.pd_floor) {
        return Err(Error::InvalidConfig("pd_floor must lie in [0, 1]".into()));
    }
    cfg.validate()?;
    let bank = TedBank::generate(scenario, search.bank_trials, seed)?;
    let mut rng = SimRng::seed_from_u64(seed);
    let delta = draw_delta(cfg, &mut rng);
    let upper = mu_max(scenario);
    let lambda = search.miss_weight.unwrap_or(10.0 * upper);
    let p_on = scenario.mean_pu_occupancy();
    let objective = FnObjective {
        dim: 1,
        bounds: Bounds::new(0.0, upper),
        f: |x: &[f64]| {
            let mu = x[0];
            let (pfa, pd) = (bank.pfa(mu), bank.pd(mu));
            match search.objective {
                ThresholdObjective::FalseAlarm => {
                    -sensing_fitness(upper, pfa, delta, cfg) + lambda * p_on * (search.pd_floor - pd).max(0.0)
                }
                ThresholdObjective::Literal => sensing_fitness(mu, pfa, delta, cfg) + lambda * (1.0 - pd),
            }
        },
    };
    let record = optimize(&objective, Algorithm::Hfasson, cfg, seed)?;
    let threshold = record.final_position[0];
    Ok(ThresholdResult {
        threshold,
        mu_max: upper,
        delta,
        pfa: bank.pfa(threshold),
        pd: bank.pd(threshold),
        record,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkOutcome {
    /// Busy channel-slots (primary or secondary) over all channel-slots.
    pub utilization_pct: f64,
    /// Channel-slots carrying a secondary transmission on an idle channel.
    pub su_utilization_pct: f64,
    /// Secondary transmissions on channels a primary user occupied.
    pub collisions: u64,
    pub slots: usize,
}

/// Time-slotted simulation. Each slot: primary users switch on per
/// `pu_activity`; vehicles re-select channels with speed-scaled probability;
/// up to `secondary_users` vehicles with traffic sense their channel and
/// transmit when they find it idle.
///
/// Random draws never depend on the threshold, so runs with the same seed
/// and different thresholds see the same traffic and the same energies.
pub fn run_network_sim(scenario: &SensingScenario, threshold: f64, seed: u64) -> Result<NetworkOutcome> {
    scenario.validate()?;
    if scenario.slot_count == 0 {
        return Err(Error::InvalidConfig("slot_count must be positive".into()));
    }
    if !(threshold >= 0.0) {
        return Err(Error::InvalidInput(format!("threshold must be non-negative, got {threshold}")));
    }
    let mut rng = SimRng::seed_from_u64(seed);
    let k = scenario.channels;
    let speeds: Vec<f64> = (0..scenario.vehicles)
        .map(|_| rng.random_range(scenario.speed_min..=scenario.speed_max))
        .collect();
    let mut channel_of: Vec<usize> = (0..scenario.vehicles).map(|_| rng.random_range(0..k)).collect();
    let (mut busy, mut su_used, mut collisions) = (0u64, 0u64, 0u64);
    let mut pu_on = vec![false; k];
    let mut su_on = vec![false; k];
    let mut waiting = Vec::with_capacity(scenario.vehicles);
    for _ in 0..scenario.slot_count {
        pu_on.fill(false);
        for p in 0..scenario.primary_users {
            let c = p % k;
            if rng.random_bool(scenario.activity(c)) {
                pu_on[c] = true;
            }
        }
        waiting.clear();
        for v in 0..scenario.vehicles {
            if rng.random_bool(scenario.reselect_rate * speeds[v] / scenario.speed_max) {
                channel_of[v] = rng.random_range(0..k);
            }
            if rng.random_bool(scenario.traffic_load) {
                waiting.push(v);
            }
        }
        let radios = waiting.len().min(scenario.secondary_users);
        su_on.fill(false);
        for pick in index::sample(&mut rng, waiting.len(), radios) {
            let c = channel_of[waiting[pick]];
            let truth = if pu_on[c] { Hypothesis::H1 } else { Hypothesis::H0 };
            if sense(scenario, truth, threshold, &mut rng).decision == Hypothesis::H0 {
                su_on[c] = true;
                if pu_on[c] {
                    collisions += 1;
                }
            }
        }
        for c in 0..k {
            if pu_on[c] || su_on[c] {
                busy += 1;
            }
            if su_on[c] && !pu_on[c] {
                su_used += 1;
            }
        }
    }
    let total = (k * scenario.slot_count) as f64;
    Ok(NetworkOutcome {
        utilization_pct: 100.0 * busy as f64 / total,
        su_utilization_pct: 100.0 * su_used as f64 / total,
        collisions,
        slots: scenario.slot_count,
    })
}

/// One row of the utilization study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilizationRow {
    pub vehicles: usize,
    pub seed: u64,
    pub threshold: f64,
    pub baseline_threshold: f64,
    pub utilization_pct: f64,
    pub baseline_pct: f64,
    pub su_utilization_pct: f64,
    pub baseline_su_pct: f64,
    pub collisions: u64,
    pub baseline_collisions: u64,
}

/// Optimized against baseline threshold on paired seeds. The optimized
/// threshold depends only on the sensing model and the seed, so it is
/// computed once per seed and reused for every vehicle count.
pub fn utilization_study(
    scenario: &SensingScenario,
    vehicles: &[usize],
    seeds: &[u64],
    cfg: &OptimizerConfig,
    search: &ThresholdSearch,
) -> Result<Vec<UtilizationRow>> {
    let baseline = baseline_threshold(scenario);
    let thresholds = seeds
        .par_iter()
        .map(|&s| optimize_threshold_with(scenario, cfg, search, s).map(|r| r.threshold))
        .collect::<Result<Vec<f64>>>()?;
    let jobs: Vec<(usize, usize)> = vehicles
        .iter()
        .flat_map(|&v| (0..seeds.len()).map(move |i| (v, i)))
        .collect();
    jobs.par_iter()
        .map(|&(v, i)| {
            let sc = SensingScenario {
                vehicles: v,
                ..scenario.clone()
            };
            let opt = run_network_sim(&sc, thresholds[i], seeds[i])?;
            let base = run_network_sim(&sc, baseline, seeds[i])?;
            Ok(UtilizationRow {
                vehicles: v,
                seed: seeds[i],
                threshold: thresholds[i],
                baseline_threshold: baseline,
                utilization_pct: opt.utilization_pct,
                baseline_pct: base.utilization_pct,
                su_utilization_pct: opt.su_utilization_pct,
                baseline_su_pct: base.su_utilization_pct,
                collisions: opt.collisions,
                baseline_collisions: base.collisions,
            })
        })
        .collect()
}

/// Median of the optimized and baseline utilization for one vehicle count.
pub fn median_utilization(rows: &[UtilizationRow], vehicles: usize) -> Option<(f64, f64)> {
    let pick = |f: fn(&UtilizationRow) -> f64| {
        let mut v: Vec<f64> = rows.iter().filter(|r| r.vehicles == vehicles).map(f).collect();
        v.sort_by(f64::total_cmp);
        match v.len() {
            0 => None,
            n if n % 2 == 1 => Some(v[n / 2]),
            n => Some((v[n / 2 - 1] + v[n / 2]) / 2.0),
        }
    };
    Some((pick(|r| r.utilization_pct)?, pick(|r| r.baseline_pct)?))
}

/// `snr_db,threshold,pfa,pd`.
pub fn write_roc_csv<W: std::io::Write>(points: &[RocPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["snr_db", "threshold", "pfa", "pd"])?;
    for p in points {
        w.write_record([p.snr_db, p.threshold, p.pfa, p.pd].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// `vehicles,seed,utilization_pct,baseline_pct` followed by the secondary
/// columns of [`UtilizationRow`].
pub fn write_utilization_csv<W: std::io::Write>(rows: &[UtilizationRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "vehicles",
        "seed",
        "utilization_pct",
        "baseline_pct",
        "su_utilization_pct",
        "baseline_su_pct",
        "collisions",
        "baseline_collisions",
        "threshold",
        "baseline_threshold",
    ])?;
    for r in rows {
        w.write_record([
            r.vehicles.to_string(),
            r.seed.to_string(),
            r.utilization_pct.to_string(),
            r.baseline_pct.to_string(),
            r.su_utilization_pct.to_string(),
            r.baseline_su_pct.to_string(),
            r.collisions.to_string(),
            r.baseline_collisions.to_string(),
            r.threshold.to_string(),
            r.baseline_threshold.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
