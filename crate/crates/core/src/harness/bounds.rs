//! Theoretical guarantee checks.
//!
//! For each experiment grid point the harness computes the closed-form
//! guarantee values for the policies that have them, runs the Monte Carlo
//! estimate, and passes when the empirical mean plus three standard errors
//! stays at or below the guarantee (the guarantees bound expectations, so
//! single runs may exceed them).

use std::f64::consts::E;
use std::io::Write;

use serde::Serialize;

use crate::engine::expected_regret;
use crate::graphs::SequenceKind;
use crate::learners::PolicySpec;
use crate::measures::{self, ExactOptions, MeasureError};

use super::{HarnessConfig, HarnessError};

/// Hold-phase count scale `ceil(T^{2/3} c^{-2/3} mas^{1/3})`: the worst-case
/// number of resample events of the threshold policy.
pub fn threshold_event_budget(rounds: usize, c: f64, mas_min: usize) -> u64 {
    ((rounds as f64).powf(2.0 / 3.0) * c.powf(-2.0 / 3.0) * (mas_min as f64).cbrt()).ceil() as u64
}

/// Expected resample budget `0.5 mas^{1/3} T^{2/3} c^{1/3}` of the decaying
/// resample schedule.
pub fn exp3sc_resample_budget(rounds: usize, c: f64, mas_min: usize) -> f64 {
    0.5 * (mas_min as f64).cbrt() * (rounds as f64).powf(2.0 / 3.0) * c.cbrt()
}

/// Guarantee on the threshold policy's expected switch count:
/// `2 T^{2/3} c^{-2/3} mas^{1/3}`.
pub fn threshold_switch_bound(rounds: usize, c: f64, mas_min: usize) -> f64 {
    2.0 * (rounds as f64).powf(2.0 / 3.0) * c.powf(-2.0 / 3.0) * (mas_min as f64).cbrt()
}

/// Partial sum of the descending order statistics with a fractional last
/// term; indices beyond the sequence reuse the smallest value.
fn partial_sum_desc(mas_sorted_desc: &[usize], count: f64) -> f64 {
    let at = |j: usize| -> f64 {
        let idx = j.min(mas_sorted_desc.len()) - 1;
        mas_sorted_desc[idx] as f64
    };
    if count <= 0.0 {
        return 0.0;
    }
    let whole = count.floor() as usize;
    let mut sum = 0.0;
    for j in 1..=whole {
        sum += at(j);
    }
    let frac = count - whole as f64;
    if frac > 0.0 {
        sum += frac * at(whole + 1);
    }
    sum
}

/// Guarantee on the threshold policy's expected regret (switching costs
/// included) under its default learning rate.
pub fn threshold_regret_bound(rounds: usize, c: f64, k: usize, mas_sorted_desc: &[usize]) -> f64 {
    let mas_min = *mas_sorted_desc.last().expect("non-empty") as f64;
    let t = rounds as f64;
    let head = 3.0 * t.powf(2.0 / 3.0) * c.cbrt() * mas_min.cbrt();
    let budget = threshold_event_budget(rounds, c, mas_min as usize) as f64;
    let tail = E * c * (k as f64).ln() / (2.0 * (E - 1.0) * mas_min)
        * partial_sum_desc(mas_sorted_desc, budget);
    head + tail
}

/// Sharper guarantee for fixed undirected graphs:
/// `4 T^{2/3} c^{1/3} alpha^{1/3} ln(K)`.
pub fn symmetric_regret_bound(rounds: usize, c: f64, k: usize, alpha: usize) -> f64 {
    4.0 * (rounds as f64).powf(2.0 / 3.0) * c.cbrt() * (alpha as f64).cbrt() * (k as f64).ln()
}

/// Guarantee on the decaying-resample policy's expected regret:
/// `1.5 c^{4/3} mas^{1/3} T^{2/3} + (2 ln(K) / mas^{2/3}) * sum_{j<=n*} mas_(j)`.
pub fn exp3sc_regret_bound(rounds: usize, c: f64, k: usize, mas_sorted_desc: &[usize]) -> f64 {
    let mas_min = *mas_sorted_desc.last().expect("non-empty") as f64;
    let t = rounds as f64;
    let head = 1.5 * c.powf(4.0 / 3.0) * mas_min.cbrt() * t.powf(2.0 / 3.0);
    let budget = exp3sc_resample_budget(rounds, c, mas_min as usize);
    let tail = 2.0 * (k as f64).ln() / mas_min.powf(2.0 / 3.0)
        * partial_sum_desc(mas_sorted_desc, budget);
    head + tail
}

/// One guarantee check for one grid point.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub experiment: String,
    pub policy: String,
    /// `switches` or `regret` / `regret-symmetric`.
    pub check: String,
    pub num_actions: usize,
    pub switching_cost: f64,
    pub rounds: usize,
    pub n_seeds: usize,
    pub mas_min: usize,
    pub alpha: usize,
    pub event_budget: u64,
    pub resample_budget: f64,
    pub bound: f64,
    pub empirical_mean: f64,
    pub empirical_se: f64,
    pub mean_plus_3se: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Runs the guarantee checks for every applicable `(policy, rounds)` point.
///
/// Exact measures are required: an action count beyond the exact solvers is
/// an error here, never a silent greedy fallback.
pub fn check_bounds(config: &HarnessConfig) -> Result<BoundReport, HarnessError> {
    let mut rows = Vec::new();
    for exp in &config.experiments {
        if exp.switching_cost <= 0.0 {
            return Err(HarnessError::Config(format!(
                "experiment {:?}: guarantee checks need a positive switching cost",
                exp.name
            )));
        }
        let sequence_spec = exp.sequence_spec()?;
        for &rounds in &exp.rounds_grid {
            let sequence = sequence_spec.materialize(rounds)?;
            let k = sequence.num_actions();
            let opts = ExactOptions {
                max_k: exp
                    .exact_limit
                    .unwrap_or(measures::EXACT_HARD_LIMIT)
                    .min(measures::EXACT_HARD_LIMIT),
                ..ExactOptions::default()
            };
            if k > opts.max_k {
                return Err(HarnessError::Measure(MeasureError::ExceedsExactLimit {
                    k,
                    max_k: opts.max_k,
                }));
            }
            let report = measures::measure_report(&sequence, &opts)?;
            let mas_min = report.mas_min();
            let alpha_first = report.alpha_per_graph[0];
            let symmetric_fixed = matches!(
                sequence.kind(),
                SequenceKind::Mab | SequenceKind::Clique | SequenceKind::FixedSymmetric
            );

            for policy in &exp.policies {
                let checks: Vec<(&str, f64, bool)> = match policy {
                    PolicySpec::ThresholdExp3 { .. } => {
                        let mut v = vec![
                            (
                                "switches",
                                threshold_switch_bound(rounds, exp.switching_cost, mas_min),
                                true,
                            ),
                            (
                                "regret",
                                threshold_regret_bound(
                                    rounds,
                                    exp.switching_cost,
                                    k,
                                    &report.mas_sorted_desc,
                                ),
                                false,
                            ),
                        ];
                        if symmetric_fixed {
                            v.push((
                                "regret-symmetric",
                                symmetric_regret_bound(
                                    rounds,
                                    exp.switching_cost,
                                    k,
                                    alpha_first,
                                ),
                                false,
                            ));
                        }
                        v
                    }
                    PolicySpec::Exp3Sc => vec![(
                        "regret",
                        exp3sc_regret_bound(
                            rounds,
                            exp.switching_cost,
                            k,
                            &report.mas_sorted_desc,
                        ),
                        false,
                    )],
                    _ => Vec::new(),
                };
                if checks.is_empty() {
                    continue;
                }
                let game = exp.game_config(policy, rounds)?;
                let stats = expected_regret(&game, exp.n_seeds)?;
                for (check, bound, on_switches) in checks {
                    let (mean, se) = if on_switches {
                        (stats.mean_switches, stats.se_switches)
                    } else {
                        (stats.mean_regret, stats.se_regret)
                    };
                    let mean_plus_3se = mean + 3.0 * se;
                    rows.push(BoundRow {
                        experiment: exp.name.clone(),
                        policy: policy.name(),
                        check: check.to_string(),
                        num_actions: k,
                        switching_cost: exp.switching_cost,
                        rounds,
                        n_seeds: exp.n_seeds,
                        mas_min,
                        alpha: alpha_first,
                        event_budget: threshold_event_budget(
                            rounds,
                            exp.switching_cost,
                            mas_min,
                        ),
                        resample_budget: exp3sc_resample_budget(
                            rounds,
                            exp.switching_cost,
                            mas_min,
                        ),
                        bound,
                        empirical_mean: mean,
                        empirical_se: se,
                        mean_plus_3se,
                        pass: mean_plus_3se <= bound,
                    });
                }
            }
        }
    }
    Ok(BoundReport { rows })
}

pub fn write_bounds_csv(report: &BoundReport, out: &mut impl Write) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "experiment",
        "policy",
        "check",
        "k",
        "c",
        "T",
        "seeds",
        "mas_min",
        "alpha",
        "event_budget",
        "resample_budget",
        "bound",
        "empirical_mean",
        "empirical_se",
        "mean_plus_3se",
        "pass",
    ])
    .map_err(|e| HarnessError::CsvFormat(e.to_string()))?;
    for r in &report.rows {
        w.write_record([
            r.experiment.clone(),
            r.policy.clone(),
            r.check.clone(),
            r.num_actions.to_string(),
            format!("{:.6}", r.switching_cost),
            r.rounds.to_string(),
            r.n_seeds.to_string(),
            r.mas_min.to_string(),
            r.alpha.to_string(),
            r.event_budget.to_string(),
            format!("{:.6}", r.resample_budget),
            format!("{:.6}", r.bound),
            format!("{:.6}", r.empirical_mean),
            format!("{:.6}", r.empirical_se),
            format!("{:.6}", r.mean_plus_3se),
            r.pass.to_string(),
        ])
        .map_err(|e| HarnessError::CsvFormat(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Aligned text rendering, one line per check.
pub fn render_bounds_text(report: &BoundReport) -> String {
    let mut s = String::new();
    for r in &report.rows {
        s.push_str(&format!(
            "{:<12} {:<15} {:<17} T={:<7} bound={:<12.2} mean+3se={:<12.2} {}\n",
            r.experiment,
            r.policy,
            r.check,
            r.rounds,
            r.bound,
            r.mean_plus_3se,
            if r.pass { "PASS" } else { "FAIL" }
        ));
    }
    s
}
