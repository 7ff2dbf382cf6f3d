//! Friedman rank test over algorithms x problems.
//!
//! Ranks are 1 for the best value, ties get the average of the ranks they
//! span. `chi2 = 12n / (k(k+1)) * (sum_j Rbar_j^2 - k(k+1)^2 / 4)` with
//! `df = k - 1`; significance lookup is left to the caller.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{format_sci, SummaryRow};

/// Which summary value to rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Best,
    Mean,
}

/// Values with `|v| < DEFAULT_ZERO_FLOOR` are ranked as exact zeros.
///
/// Published tables print machine-precision residues such as `8.88E-16`
/// (the double-precision value of Ackley at its optimum) next to exact
/// zeros; the floor makes those compare equal.
pub const DEFAULT_ZERO_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankOptions {
    pub minimize: bool,
    pub metric: Metric,
    /// `0.0` compares raw values.
    pub zero_floor: f64,
}

impl Default for RankOptions {
    fn default() -> Self {
        Self {
            minimize: true,
            metric: Metric::Best,
            zero_floor: DEFAULT_ZERO_FLOOR,
        }
    }
}

/// Averaged-tie ranks of one problem row; rank 1 is the best value.
pub fn rank_problem(values: &[f64], minimize: bool) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidInput("cannot rank an empty row".into()));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(*bad));
    }
    let key = |v: f64| if minimize { v } else { -v };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| key(values[a]).total_cmp(&key(values[b])));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end share ranks start+1 ..= end
        let shared = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = shared;
        }
        start = end;
    }
    Ok(ranks)
}

fn apply_floor(v: f64, floor: f64) -> f64 {
    if v.abs() < floor {
        0.0
    } else {
        v
    }
}

/// Ranks of `k` algorithms on `n` problems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankMatrix {
    /// `(function id, dimension)` per row.
    pub problems: Vec<(u8, usize)>,
    pub algorithms: Vec<String>,
    /// Values after the zero floor, `values[problem][algorithm]`.
    pub values: Vec<Vec<f64>>,
    pub ranks: Vec<Vec<f64>>,
}

impl RankMatrix {
    pub fn from_values(
        problems: Vec<(u8, usize)>,
        algorithms: Vec<String>,
        values: Vec<Vec<f64>>,
        opts: RankOptions,
    ) -> Result<Self> {
        if values.len() != problems.len() {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: problems.len(),
            });
        }
        let values: Vec<Vec<f64>> = values
            .into_iter()
            .map(|row| row.into_iter().map(|v| apply_floor(v, opts.zero_floor)).collect())
            .collect();
        let mut ranks = Vec::with_capacity(values.len());
        for row in &values {
            if row.len() != algorithms.len() {
                return Err(Error::DimensionMismatch {
                    left: row.len(),
                    right: algorithms.len(),
                });
            }
            ranks.push(rank_problem(row, opts.minimize)?);
        }
        Ok(Self {
            problems,
            algorithms,
            values,
            ranks,
        })
    }

    /// Build from summary rows, optionally restricted to one dimension.
    /// Algorithms keep their order of first appearance; every problem must
    /// have a value for every algorithm.
    pub fn from_rows(rows: &[SummaryRow], dimension: Option<usize>, opts: RankOptions) -> Result<Self> {
        let mut algorithms: Vec<String> = Vec::new();
        let mut table: BTreeMap<(u8, usize), BTreeMap<String, f64>> = BTreeMap::new();
        for r in rows.iter().filter(|r| dimension.is_none_or(|d| r.dimension == d)) {
            if !algorithms.contains(&r.algorithm) {
                algorithms.push(r.algorithm.clone());
            }
            let v = match opts.metric {
                Metric::Best => r.best,
                Metric::Mean => r.mean.ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "{} on f{} {}D has no mean value",
                        r.algorithm, r.function, r.dimension
                    ))
                })?,
            };
            table
                .entry((r.function, r.dimension))
                .or_default()
                .insert(r.algorithm.clone(), v);
        }
        let mut problems = Vec::with_capacity(table.len());
        let mut values = Vec::with_capacity(table.len());
        for (problem, by_alg) in table {
            let row = algorithms
                .iter()
                .map(|a| {
                    by_alg.get(a).copied().ok_or_else(|| {
                        Error::InvalidInput(format!("{a} has no value for f{} {}D", problem.0, problem.1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            problems.push(problem);
            values.push(row);
        }
        Self::from_values(problems, algorithms, values, opts)
    }

    pub fn n_problems(&self) -> usize {
        self.problems.len()
    }

    pub fn n_algorithms(&self) -> usize {
        self.algorithms.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub algorithms: Vec<String>,
    pub avg_ranks: Vec<f64>,
    pub chi2: f64,
    pub df: usize,
}

pub fn friedman(m: &RankMatrix) -> Result<FriedmanResult> {
    let (n, k) = (m.n_problems(), m.n_algorithms());
    if n < 2 || k < 2 {
        return Err(Error::Degenerate(format!(
            "the Friedman test needs at least 2 problems and 2 algorithms, got {n} x {k}"
        )));
    }
    let avg_ranks: Vec<f64> = (0..k)
        .map(|j| m.ranks.iter().map(|row| row[j]).sum::<f64>() / n as f64)
        .collect();
    let (nf, kf) = (n as f64, k as f64);
    let sum_sq: f64 = avg_ranks.iter().map(|r| r * r).sum();
    let chi2 = 12.0 * nf / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0).powi(2) / 4.0);
    Ok(FriedmanResult {
        algorithms: m.algorithms.clone(),
        avg_ranks,
        // rounding can leave a tiny negative residue
        chi2: chi2.max(0.0),
        df: k - 1,
    })
}

/// Problems on which each algorithm holds the best value, ties counted for
/// every tied algorithm. Same order as `m.algorithms`.
pub fn first_place_counts(m: &RankMatrix) -> Vec<usize> {
    let mut counts = vec![0; m.n_algorithms()];
    for ranks in &m.ranks {
        let top = ranks.iter().copied().fold(f64::INFINITY, f64::min);
        for (j, r) in ranks.iter().enumerate() {
            if *r == top {
                counts[j] += 1;
            }
        }
    }
    counts
}

/// `algorithm,avg_rank,first_places,chi2,df`, one line per algorithm.
pub fn write_report<W: std::io::Write>(result: &FriedmanResult, counts: &[usize], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "avg_rank", "first_places", "chi2", "df"])?;
    for (j, alg) in result.algorithms.iter().enumerate() {
        w.write_record([
            alg.clone(),
            format_sci(result.avg_ranks[j]),
            counts[j].to_string(),
            format_sci(result.chi2),
            result.df.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
