//! Parameter sweeps over experiment grids.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::expected_regret;

use super::{HarnessConfig, HarnessError};

/// One `(experiment, policy, rounds)` grid point.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub experiment: String,
    pub policy: String,
    pub graphs: String,
    pub adversary: String,
    pub switching_cost: f64,
    pub rounds: usize,
    pub n_seeds: usize,
    /// `"ok"` or the error message for this grid point.
    pub status: String,
    pub mean_regret: Option<f64>,
    pub se_regret: Option<f64>,
    pub mean_switches: Option<f64>,
    pub se_switches: Option<f64>,
    /// Wall time; written to the timing sidecar, not the results CSV, so the
    /// results file is byte-identical across runs of the same config.
    pub wall_ms: f64,
}

/// Runs every grid point of every experiment. Points execute in parallel and
/// are reported in deterministic (experiment, policy, rounds) order; a failed
/// point becomes an error row and the sweep continues.
pub fn run_sweep(config: &HarnessConfig) -> Result<Vec<SweepRow>, HarnessError> {
    let mut points = Vec::new();
    for exp in &config.experiments {
        for policy in &exp.policies {
            for &rounds in &exp.rounds_grid {
                points.push((exp, policy.clone(), rounds));
            }
        }
    }
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|(exp, policy, rounds)| {
            let started = Instant::now();
            let outcome = exp
                .game_config(policy, *rounds)
                .and_then(|config| Ok(expected_regret(&config, exp.n_seeds)?));
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            let mut row = SweepRow {
                experiment: exp.name.clone(),
                policy: policy.name(),
                graphs: exp.graphs.clone(),
                adversary: exp.adversary.clone(),
                switching_cost: exp.switching_cost,
                rounds: *rounds,
                n_seeds: exp.n_seeds,
                status: "ok".into(),
                mean_regret: None,
                se_regret: None,
                mean_switches: None,
                se_switches: None,
                wall_ms,
            };
            match outcome {
                Ok(stats) => {
                    row.mean_regret = Some(stats.mean_regret);
                    row.se_regret = Some(stats.se_regret);
                    row.mean_switches = Some(stats.mean_switches);
                    row.se_switches = Some(stats.se_switches);
                }
                Err(err) => row.status = err.to_string(),
            }
            row
        })
        .collect();
    Ok(rows)
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.6}")).unwrap_or_default()
}

pub const SWEEP_HEADER: [&str; 12] = [
    "experiment",
    "policy",
    "graphs",
    "adversary",
    "c",
    "T",
    "seeds",
    "status",
    "mean_regret",
    "se_regret",
    "mean_switches",
    "se_switches",
];

/// Writes the results CSV with fixed six-decimal float formatting; identical
/// configs produce byte-identical output.
pub fn write_sweep_csv(rows: &[SweepRow], out: &mut impl Write) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)
        .map_err(|e| HarnessError::CsvFormat(e.to_string()))?;
    for row in rows {
        w.write_record([
            row.experiment.clone(),
            row.policy.clone(),
            row.graphs.clone(),
            row.adversary.clone(),
            format!("{:.6}", row.switching_cost),
            row.rounds.to_string(),
            row.n_seeds.to_string(),
            row.status.clone(),
            fmt_opt(row.mean_regret),
            fmt_opt(row.se_regret),
            fmt_opt(row.mean_switches),
            fmt_opt(row.se_switches),
        ])
        .map_err(|e| HarnessError::CsvFormat(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the wall-time sidecar (not deterministic, kept out of the results).
pub fn write_timing_csv(rows: &[SweepRow], out: &mut impl Write) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["experiment", "policy", "T", "wall_ms"])
        .map_err(|e| HarnessError::CsvFormat(e.to_string()))?;
    for row in rows {
        w.write_record([
            row.experiment.clone(),
            row.policy.clone(),
            row.rounds.to_string(),
            format!("{:.3}", row.wall_ms),
        ])
        .map_err(|e| HarnessError::CsvFormat(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
