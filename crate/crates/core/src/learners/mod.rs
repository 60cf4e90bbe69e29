//! Learner policies.
//!
//! Every policy implements [`Policy`]: `act(t)` returns the round-`t` action,
//! then `observe(t, ..)` delivers the revealed `(action, loss)` pairs together
//! with that round's feedback graph (the graph is revealed only after the
//! action, matching the uninformed setting). The engine hands a policy exactly
//! the losses of the played action's out-neighborhood, never more.
//!
//! Loss estimates are importance-weighted: an observed loss is divided by the
//! observation probability `q_i = sum of p_j over j with i in S(j)`, which
//! makes the estimate unbiased. The self-loop guarantees `q_i >= p_i > 0`,
//! so no division by zero is reachable.

mod batch_exp3;
mod exp3_sc;
mod exp3_set;
mod threshold_exp3;
mod uniform;

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::FeedbackGraph;

pub use batch_exp3::BatchExp3;
pub use exp3_sc::Exp3Sc;
pub use exp3_set::Exp3Set;
pub use threshold_exp3::{ThresholdExp3, ThresholdExp3State};
pub use uniform::{FixedAction, UniformRandom};

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("act({t}) called out of order; expected round {expected}")]
    ActOutOfOrder { t: usize, expected: usize },
    #[error("act({t}) called twice without an intervening observe")]
    DuplicateAct { t: usize },
    #[error("observe({t}) called without a matching act")]
    ObserveWithoutAct { t: usize },
    #[error("revealed set at round {t} is missing the played action {action}")]
    MissingSelfObservation { t: usize, action: usize },
    #[error("loss estimates overflowed the supported range")]
    EstimateOverflow,
    #[error("invalid policy parameter: {0}")]
    InvalidParameter(String),
}

/// What a policy sees after acting: the revealed `(action, loss)` pairs for
/// the played action's out-neighborhood, plus the round's graph.
pub struct Observation<'a> {
    pub revealed: &'a [(usize, f64)],
    pub graph: &'a FeedbackGraph,
}

/// Behavioral contract for one game run: `act(t)` exactly once per round,
/// then `observe(t, ..)`, with `t` strictly increasing from 1.
pub trait Policy: Send {
    fn act(&mut self, t: usize) -> Result<usize, PolicyError>;
    fn observe(&mut self, t: usize, obs: &Observation<'_>) -> Result<(), PolicyError>;
}

// ---------------------------------------------------------------------------
// Protocol guard
// ---------------------------------------------------------------------------

/// Tracks the act/observe alternation shared by all policies.
#[derive(Debug, Default, Clone)]
pub(crate) struct RoundGuard {
    last_acted: usize,
    awaiting_observe: bool,
}

impl RoundGuard {
    pub fn begin_act(&mut self, t: usize) -> Result<(), PolicyError> {
        if self.awaiting_observe {
            return Err(if t == self.last_acted {
                PolicyError::DuplicateAct { t }
            } else {
                PolicyError::ActOutOfOrder {
                    t,
                    expected: self.last_acted,
                }
            });
        }
        if t <= self.last_acted {
            return Err(PolicyError::ActOutOfOrder {
                t,
                expected: self.last_acted + 1,
            });
        }
        self.last_acted = t;
        self.awaiting_observe = true;
        Ok(())
    }

    pub fn begin_observe(&mut self, t: usize) -> Result<(), PolicyError> {
        if !self.awaiting_observe || t != self.last_acted {
            return Err(PolicyError::ObserveWithoutAct { t });
        }
        self.awaiting_observe = false;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Shared numerics
// ---------------------------------------------------------------------------

/// Normalized exponentiation of log-weights with max-shift; shift invariance
/// keeps the result stable however large the (negative) log-weights grow.
pub fn softmax(log_weights: &[f64], out: &mut [f64]) {
    debug_assert_eq!(log_weights.len(), out.len());
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &lw) in out.iter_mut().zip(log_weights) {
        let e = (lw - max).exp();
        *o = e;
        sum += e;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

/// Inverse-CDF sample over ascending action indices; deterministic given the
/// RNG stream.
pub fn sample_index(rng: &mut ChaCha12Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = i;
        }
        cum += p;
        if u < cum {
            return i;
        }
    }
    last_positive
}

/// Observation probabilities `q_i = sum of p_j over in-neighbors j of i`.
pub fn observation_probabilities(graph: &FeedbackGraph, probs: &[f64]) -> Vec<f64> {
    (0..graph.num_actions())
        .map(|i| graph.in_neighbors(i).iter().map(|&j| probs[j]).sum())
        .collect()
}

pub(crate) const ESTIMATE_CAP: f64 = 1e300;

pub(crate) fn check_estimates(values: &[f64]) -> Result<(), PolicyError> {
    if values.iter().any(|v| !v.is_finite() || v.abs() > ESTIMATE_CAP) {
        return Err(PolicyError::EstimateOverflow);
    }
    Ok(())
}

pub(crate) fn find_played(
    revealed: &[(usize, f64)],
    action: usize,
    t: usize,
) -> Result<f64, PolicyError> {
    revealed
        .iter()
        .find(|&&(i, _)| i == action)
        .map(|&(_, loss)| loss)
        .ok_or(PolicyError::MissingSelfObservation { t, action })
}

// ---------------------------------------------------------------------------
// Policy specs
// ---------------------------------------------------------------------------

/// Everything a policy needs to configure itself for one game.
#[derive(Debug, Clone, Copy)]
pub struct PolicyContext {
    pub num_actions: usize,
    pub horizon: usize,
    pub switching_cost: f64,
    /// Smallest maximum-acyclic-set size over the sequence, `mas(G_(T))`.
    /// Exact for fixed-graph experiments; user-supplied otherwise.
    pub mas_hint: usize,
}

/// Buildable policy description used by configs, sweeps, and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PolicySpec {
    ThresholdExp3 { eta: Option<f64> },
    Exp3Sc,
    Exp3Set { eta: Option<f64> },
    BatchExp3 { batch_size: Option<usize> },
    Uniform,
    FixedAction { action: usize },
}

impl PolicySpec {
    pub fn name(&self) -> String {
        match self {
            PolicySpec::ThresholdExp3 { .. } => "threshold-exp3".into(),
            PolicySpec::Exp3Sc => "exp3-sc".into(),
            PolicySpec::Exp3Set { .. } => "exp3-set".into(),
            PolicySpec::BatchExp3 { .. } => "batch-exp3".into(),
            PolicySpec::Uniform => "uniform".into(),
            PolicySpec::FixedAction { action } => format!("fixed:{action}"),
        }
    }

    /// Parses a policy name; hyphens/underscores and case are ignored, so
    /// `exp3sc`, `EXP3-SC`, and `exp3_sc` are all the same policy.
    pub fn parse(s: &str) -> Result<Self, PolicyError> {
        let norm: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_' && *c != '.')
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "thresholdexp3" => Ok(PolicySpec::ThresholdExp3 { eta: None }),
            "exp3sc" => Ok(PolicySpec::Exp3Sc),
            "exp3set" => Ok(PolicySpec::Exp3Set { eta: None }),
            "batchexp3" => Ok(PolicySpec::BatchExp3 { batch_size: None }),
            "uniform" | "uniformrandom" => Ok(PolicySpec::Uniform),
            _ => {
                if let Some(rest) = norm.strip_prefix("fixed:") {
                    let action = rest.parse::<usize>().map_err(|_| {
                        PolicyError::InvalidParameter(format!("bad fixed action in {s:?}"))
                    })?;
                    return Ok(PolicySpec::FixedAction { action });
                }
                Err(PolicyError::InvalidParameter(format!(
                    "unknown policy {s:?} (known: threshold-exp3, exp3-sc, exp3-set, \
                     batch-exp3, uniform, fixed:<i>)"
                )))
            }
        }
    }

    /// Builds a fresh policy instance for one run.
    pub fn build(
        &self,
        ctx: &PolicyContext,
        seed: u64,
    ) -> Result<Box<dyn Policy>, PolicyError> {
        if ctx.num_actions == 0 {
            return Err(PolicyError::InvalidParameter(
                "policies need at least one action".into(),
            ));
        }
        Ok(match self {
            PolicySpec::ThresholdExp3 { eta } => {
                Box::new(ThresholdExp3::new(ctx, *eta, seed)?)
            }
            PolicySpec::Exp3Sc => Box::new(Exp3Sc::new(ctx, seed)?),
            PolicySpec::Exp3Set { eta } => Box::new(Exp3Set::new(ctx, *eta, seed)?),
            PolicySpec::BatchExp3 { batch_size } => {
                Box::new(BatchExp3::new(ctx, *batch_size, seed)?)
            }
            PolicySpec::Uniform => Box::new(UniformRandom::new(ctx.num_actions, seed)),
            PolicySpec::FixedAction { action } => {
                if *action >= ctx.num_actions {
                    return Err(PolicyError::InvalidParameter(format!(
                        "fixed action {action} out of range for {} actions",
                        ctx.num_actions
                    )));
                }
                Box::new(FixedAction::new(*action))
            }
        })
    }
}
