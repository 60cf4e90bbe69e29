//! Configuration-driven experiment harness.
//!
//! A config file is flat TOML, one table per experiment:
//!
//! ```toml
//! [figure-pi]
//! policies = ["threshold-exp3", "exp3-set"]
//! graphs = "cliques:k=25,alpha=5"
//! adversary = "walk"
//! T = [20000]
//! c = 0.35
//! seeds = 20
//! seed = 1
//! ```
//!
//! Keys: `policies` (required list), `graphs` (required spec string:
//! `mab:k=..`, `clique:k=..`, `cliques:k=..,alpha=..`, `erdos:k=..,p=..`,
//! `erdos-sym:k=..,p=..`, or `file:<path>`), `adversary` (`walk`, `split`,
//! `bernoulli`, or `file:<csv>`; default `walk`), `T` (int or ascending int
//! list), `c` (positive float), `seeds` (default 20), `seed` (default 1),
//! and optional `mas_hint`, `exact_limit`, `threshold_eta`, `exp3_set_eta`,
//! `batch_size`.

mod bounds;
mod fit;
mod plot;
mod sweep;

use std::fs;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::adversary::{read_table_csv, AdversaryError};
use crate::engine::{AdversarySpec, EngineError, GameConfig};
use crate::graphs::{parse_graph, GraphError, SequenceSpec};
use crate::learners::{PolicyError, PolicySpec};
use crate::measures::MeasureError;

pub use bounds::{
    check_bounds, exp3sc_regret_bound, render_bounds_text, symmetric_regret_bound,
    threshold_event_budget, threshold_regret_bound, threshold_switch_bound, write_bounds_csv,
    BoundReport, BoundRow, exp3sc_resample_budget,
};
pub use fit::{fit_regret_exponent, ExponentFit};
pub use plot::{axis_range, emit_plots, read_sweep_csv, render_line_chart, PlotSeries};
pub use sweep::{run_sweep, write_sweep_csv, write_timing_csv, SweepRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("config parse error: {0}")]
    Toml(String),
    #[error("experiment {experiment:?}: policy list must not be empty")]
    NoPolicies { experiment: String },
    #[error("experiment {experiment:?}: T grid must be non-empty and strictly increasing")]
    BadRoundsGrid { experiment: String },
    #[error("regret-exponent fit needs at least {needed} positive points, got {got}")]
    NotEnoughPoints { needed: usize, got: usize },
    #[error("plot input is empty")]
    EmptyPlot,
    #[error("csv format error: {0}")]
    CsvFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

// ---------------------------------------------------------------------------
// Experiment spec
// ---------------------------------------------------------------------------

/// One experiment: a policy set crossed with a horizon grid on one
/// environment.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub name: String,
    pub policies: Vec<PolicySpec>,
    /// Raw graph spec string, resolved at run time.
    pub graphs: String,
    /// Adversary spec string: `walk`, `split`, `bernoulli`, or `file:<csv>`.
    pub adversary: String,
    /// Horizon grid, strictly increasing.
    pub rounds_grid: Vec<usize>,
    pub switching_cost: f64,
    pub n_seeds: usize,
    pub seed: u64,
    pub mas_hint: Option<usize>,
    pub exact_limit: Option<usize>,
}

impl ExperimentSpec {
    fn validate(&self) -> Result<(), HarnessError> {
        if self.policies.is_empty() {
            return Err(HarnessError::NoPolicies {
                experiment: self.name.clone(),
            });
        }
        if self.rounds_grid.is_empty() || self.rounds_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::BadRoundsGrid {
                experiment: self.name.clone(),
            });
        }
        if self.switching_cost < 0.0 {
            return Err(HarnessError::Config(format!(
                "experiment {:?}: switching cost must be non-negative",
                self.name
            )));
        }
        if self.n_seeds < 2 {
            return Err(HarnessError::Config(format!(
                "experiment {:?}: seeds must be at least 2",
                self.name
            )));
        }
        Ok(())
    }

    /// Resolves the graph spec string (generator or `file:`).
    pub fn sequence_spec(&self) -> Result<SequenceSpec, HarnessError> {
        resolve_sequence_spec(&self.graphs)
    }

    /// Resolves the adversary spec string.
    pub fn adversary_spec(&self) -> Result<AdversarySpec, HarnessError> {
        resolve_adversary_spec(&self.adversary)
    }

    /// The game config for one `(policy, rounds)` grid point.
    pub fn game_config(
        &self,
        policy: &PolicySpec,
        rounds: usize,
    ) -> Result<GameConfig, HarnessError> {
        Ok(GameConfig {
            switching_cost: self.switching_cost,
            rounds,
            seed: self.seed,
            policy: policy.clone(),
            sequence: self.sequence_spec()?,
            adversary: self.adversary_spec()?,
            mas_hint: self.mas_hint,
            exact_limit: self.exact_limit,
        })
    }
}

/// Resolves a graph spec string into a buildable sequence spec.
pub fn resolve_sequence_spec(spec: &str) -> Result<SequenceSpec, HarnessError> {
    if let Some(path) = spec.strip_prefix("file:") {
        let text = fs::read_to_string(path.trim())?;
        let parsed = parse_graph(&text)?;
        for warning in &parsed.warnings {
            log::warn!("{path}: {warning}");
        }
        return Ok(SequenceSpec::Fixed {
            graph: Arc::new(parsed.graph),
        });
    }
    Ok(SequenceSpec::parse(spec)?)
}

/// Resolves an adversary spec string.
pub fn resolve_adversary_spec(spec: &str) -> Result<AdversarySpec, HarnessError> {
    match spec.trim() {
        "walk" => Ok(AdversarySpec::GaussianWalk),
        "split" => Ok(AdversarySpec::Split { blocks: None }),
        "bernoulli" => Ok(AdversarySpec::Bernoulli),
        other => {
            if let Some(path) = other.strip_prefix("file:") {
                let file = fs::File::open(path.trim())?;
                let mut reader = std::io::BufReader::new(file);
                let table = read_table_csv(&mut reader)?;
                return Ok(AdversarySpec::Table(Arc::new(table)));
            }
            Err(HarnessError::Config(format!(
                "unknown adversary {other:?} (known: walk, split, bernoulli, file:<csv>)"
            )))
        }
    }
}

/// A parsed config file: experiments in file order.
#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub experiments: Vec<ExperimentSpec>,
}

impl HarnessConfig {
    /// Applies CLI-level overrides to every experiment.
    pub fn with_overrides(mut self, seed: Option<u64>, n_seeds: Option<usize>) -> Self {
        for exp in &mut self.experiments {
            if let Some(s) = seed {
                exp.seed = s;
            }
            if let Some(n) = n_seeds {
                exp.n_seeds = n;
            }
        }
        self
    }
}

pub fn load_config(path: &Path) -> Result<HarnessConfig, HarnessError> {
    parse_config_str(&fs::read_to_string(path)?)
}

/// Section order follows the file; the TOML table itself may reorder keys.
fn section_order(text: &str) -> Vec<String> {
    let mut names = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('[') && line.ends_with(']') {
            let name = line[1..line.len() - 1].trim();
            if !name.is_empty() {
                names.push(name.trim_matches('"').to_string());
            }
        }
    }
    names
}

pub fn parse_config_str(text: &str) -> Result<HarnessConfig, HarnessError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| HarnessError::Toml(e.to_string()))?;
    for (key, value) in &table {
        if !value.is_table() {
            return Err(HarnessError::Config(format!(
                "top-level key {key:?} is not allowed; every key belongs in an \
                 [experiment] section"
            )));
        }
    }
    let mut experiments = Vec::new();
    for name in section_order(text) {
        if name.contains('.') {
            return Err(HarnessError::Config(format!(
                "section {name:?}: nested tables are not supported; sections are flat"
            )));
        }
        let Some(value) = table.get(&name) else {
            continue;
        };
        let section = value.as_table().ok_or_else(|| {
            HarnessError::Config(format!("section {name:?} must be a table"))
        })?;
        experiments.push(parse_experiment(&name, section)?);
    }
    if experiments.is_empty() {
        return Err(HarnessError::Config(
            "config has no experiment sections".into(),
        ));
    }
    Ok(HarnessConfig { experiments })
}

fn parse_experiment(name: &str, section: &toml::Table) -> Result<ExperimentSpec, HarnessError> {
    let context = |key: &str, what: &str| {
        HarnessError::Config(format!("experiment {name:?}, key {key:?}: {what}"))
    };
    for key in section.keys() {
        const KNOWN: &[&str] = &[
            "policies",
            "graphs",
            "adversary",
            "T",
            "c",
            "seeds",
            "seed",
            "mas_hint",
            "exact_limit",
            "threshold_eta",
            "exp3_set_eta",
            "batch_size",
        ];
        if !KNOWN.contains(&key.as_str()) {
            return Err(context(key, "unknown key"));
        }
    }

    let policy_names = section
        .get("policies")
        .and_then(|v| v.as_array())
        .ok_or_else(|| context("policies", "required list of policy names"))?;
    let threshold_eta = get_f64(section, "threshold_eta", name)?;
    let exp3_set_eta = get_f64(section, "exp3_set_eta", name)?;
    let batch_size = get_usize(section, "batch_size", name)?;
    let mut policies = Vec::new();
    for v in policy_names {
        let s = v
            .as_str()
            .ok_or_else(|| context("policies", "entries must be strings"))?;
        let mut spec = PolicySpec::parse(s)?;
        match &mut spec {
            PolicySpec::ThresholdExp3 { eta } => *eta = threshold_eta,
            PolicySpec::Exp3Set { eta } => *eta = exp3_set_eta,
            PolicySpec::BatchExp3 { batch_size: b } => *b = batch_size,
            _ => {}
        }
        policies.push(spec);
    }

    let graphs = section
        .get("graphs")
        .and_then(|v| v.as_str())
        .ok_or_else(|| context("graphs", "required graph spec string"))?
        .to_string();
    let adversary = section
        .get("adversary")
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| context("adversary", "must be a string"))
        })
        .transpose()?
        .unwrap_or_else(|| "walk".to_string());

    let rounds_grid = match section.get("T") {
        Some(toml::Value::Integer(one)) => vec![usize::try_from(*one)
            .map_err(|_| context("T", "must be positive"))?],
        Some(toml::Value::Array(items)) => {
            let mut grid = Vec::new();
            for item in items {
                let v = item
                    .as_integer()
                    .ok_or_else(|| context("T", "entries must be integers"))?;
                grid.push(usize::try_from(v).map_err(|_| context("T", "must be positive"))?);
            }
            grid
        }
        _ => return Err(context("T", "required int or int list")),
    };

    let switching_cost = section
        .get("c")
        .and_then(|v| v.as_float().or_else(|| v.as_integer().map(|i| i as f64)))
        .ok_or_else(|| context("c", "required number"))?;

    let spec = ExperimentSpec {
        name: name.to_string(),
        policies,
        graphs,
        adversary,
        rounds_grid,
        switching_cost,
        n_seeds: get_usize(section, "seeds", name)?.unwrap_or(20),
        seed: get_u64(section, "seed", name)?.unwrap_or(1),
        mas_hint: get_usize(section, "mas_hint", name)?,
        exact_limit: get_usize(section, "exact_limit", name)?,
    };
    spec.validate()?;
    Ok(spec)
}

fn get_usize(
    section: &toml::Table,
    key: &str,
    name: &str,
) -> Result<Option<usize>, HarnessError> {
    match section.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_integer()
            .and_then(|i| usize::try_from(i).ok())
            .map(Some)
            .ok_or_else(|| {
                HarnessError::Config(format!(
                    "experiment {name:?}, key {key:?}: must be a non-negative integer"
                ))
            }),
    }
}

fn get_u64(section: &toml::Table, key: &str, name: &str) -> Result<Option<u64>, HarnessError> {
    match section.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_integer()
            .and_then(|i| u64::try_from(i).ok())
            .map(Some)
            .ok_or_else(|| {
                HarnessError::Config(format!(
                    "experiment {name:?}, key {key:?}: must be a non-negative integer"
                ))
            }),
    }
}

fn get_f64(section: &toml::Table, key: &str, name: &str) -> Result<Option<f64>, HarnessError> {
    match section.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_float()
            .or_else(|| v.as_integer().map(|i| i as f64))
            .map(Some)
            .ok_or_else(|| {
                HarnessError::Config(format!(
                    "experiment {name:?}, key {key:?}: must be a number"
                ))
            }),
    }
}
