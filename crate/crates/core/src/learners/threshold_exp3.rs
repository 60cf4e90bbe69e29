//! Threshold EXP3: exponential weights with event-gated resampling.
//!
//! The policy holds its action between "events". An event fires at the first
//! round, after the hold length exceeds a budget `gamma` (which caps how long
//! a bad action can be ridden), or when the pending importance-weighted losses
//! cross a data-dependent threshold. Only at an event do the weights and the
//! sampling distribution change; between events the action, the distribution,
//! and the committed estimates are frozen and only the pending estimates grow.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::{
    check_estimates, find_played, observation_probabilities, sample_index, softmax, Observation,
    Policy, PolicyContext, PolicyError, RoundGuard,
};

/// Evolving state, exposed read-only for inspection and tests.
#[derive(Debug, Clone)]
pub struct ThresholdExp3State {
    /// Log-weights `log w_i`; updates subtract `eta * pending`.
    pub log_weights: Vec<f64>,
    /// Sampling distribution, recomputed only at events.
    pub probabilities: Vec<f64>,
    /// Committed estimates: importance-weighted losses up to the last event.
    pub committed: Vec<f64>,
    /// Pending estimates accumulated since the last event.
    pub pending: Vec<f64>,
    /// Rounds since the last event, inclusive of the event round.
    pub rounds_since_event: usize,
    /// Currently held action (after the first act).
    pub held_action: Option<usize>,
    /// Observation probabilities from the previous round.
    pub last_obs_probs: Vec<f64>,
}

pub struct ThresholdExp3 {
    num_actions: usize,
    switching_cost: f64,
    mas_hint: usize,
    eta: f64,
    gamma: f64,
    state: ThresholdExp3State,
    rng: ChaCha12Rng,
    guard: RoundGuard,
}

impl ThresholdExp3 {
    pub fn new(ctx: &PolicyContext, eta: Option<f64>, seed: u64) -> Result<Self, PolicyError> {
        let k = ctx.num_actions;
        if ctx.mas_hint == 0 {
            return Err(PolicyError::InvalidParameter(
                "mas hint must be at least 1".into(),
            ));
        }
        if ctx.horizon == 0 {
            return Err(PolicyError::InvalidParameter(
                "horizon must be at least 1".into(),
            ));
        }
        let eta = match eta {
            Some(e) if e > 0.0 && e <= 1.0 => e,
            Some(e) => {
                return Err(PolicyError::InvalidParameter(format!(
                    "eta must lie in (0, 1], got {e}"
                )));
            }
            None => Self::default_eta(k, ctx.horizon, ctx.switching_cost, ctx.mas_hint),
        };
        let gamma = (ctx.horizon as f64).cbrt() * ctx.switching_cost.powf(2.0 / 3.0)
            / (ctx.mas_hint as f64).cbrt();
        Ok(Self {
            num_actions: k,
            switching_cost: ctx.switching_cost,
            mas_hint: ctx.mas_hint,
            eta,
            gamma,
            state: ThresholdExp3State {
                log_weights: vec![0.0; k],
                probabilities: vec![1.0 / k as f64; k],
                committed: vec![0.0; k],
                pending: vec![0.0; k],
                rounds_since_event: 1,
                held_action: None,
                last_obs_probs: vec![1.0 / k as f64; k],
            },
            rng: ChaCha12Rng::seed_from_u64(seed),
            guard: RoundGuard::default(),
        })
    }

    /// Default learning rate `ln(K) / (T^{2/3} c^{1/3} mas^{1/3})`, clamped
    /// into `(0, 1]`.
    pub fn default_eta(k: usize, horizon: usize, c: f64, mas_hint: usize) -> f64 {
        let raw = (k as f64).ln()
            / ((horizon as f64).powf(2.0 / 3.0) * c.cbrt() * (mas_hint as f64).cbrt());
        if raw > 0.0 {
            raw.min(1.0)
        } else {
            1.0
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Hold budget `T^{1/3} c^{2/3} / mas^{1/3}`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Loss-threshold scale `max(0, ln(t c^2 / mas)) / 3`.
    pub fn epsilon(&self, t: usize) -> f64 {
        let arg = (t as f64) * self.switching_cost * self.switching_cost / self.mas_hint as f64;
        (arg.ln().max(0.0)) / 3.0
    }

    pub fn state(&self) -> &ThresholdExp3State {
        &self.state
    }

    #[cfg(test)]
    pub(crate) fn state_mut(&mut self) -> &mut ThresholdExp3State {
        &mut self.state
    }

    /// The loss-threshold event, evaluated with the held action and the state
    /// carried from the end of round `t - 1`. Two clauses: every rival's total
    /// estimate must exceed the threshold, and some rival must still be within
    /// the threshold once the held action's pending loss is discounted.
    fn loss_threshold_event(&self, t: usize) -> bool {
        let Some(held) = self.state.held_action else {
            return false;
        };
        let threshold = self.epsilon(t) / self.eta + 1.0 / self.state.last_obs_probs[held];
        let pending_held = self.state.pending[held];
        let mut all_exceed = true;
        let mut any_within = false;
        for i in 0..self.num_actions {
            if i == held {
                continue;
            }
            let total = self.state.committed[i] + self.state.pending[i];
            if total <= threshold {
                all_exceed = false;
                break;
            }
            if total - pending_held <= threshold {
                any_within = true;
            }
        }
        self.num_actions > 1 && all_exceed && any_within
    }
}

impl Policy for ThresholdExp3 {
    fn act(&mut self, t: usize) -> Result<usize, PolicyError> {
        self.guard.begin_act(t)?;
        let event = t == 1
            || (self.state.rounds_since_event as f64) > self.gamma
            || self.loss_threshold_event(t);
        if event {
            if t != 1 {
                for i in 0..self.num_actions {
                    self.state.committed[i] += self.state.pending[i];
                    self.state.log_weights[i] -= self.eta * self.state.pending[i];
                }
                softmax(&self.state.log_weights, &mut self.state.probabilities);
            }
            let action = sample_index(&mut self.rng, &self.state.probabilities);
            self.state.held_action = Some(action);
            self.state.rounds_since_event = 1;
            self.state.pending.fill(0.0);
        } else {
            self.state.rounds_since_event += 1;
        }
        Ok(self.state.held_action.expect("held action set on event"))
    }

    fn observe(&mut self, t: usize, obs: &Observation<'_>) -> Result<(), PolicyError> {
        self.guard.begin_observe(t)?;
        let held = self.state.held_action.expect("observe follows act");
        find_played(obs.revealed, held, t)?;
        let q = observation_probabilities(obs.graph, &self.state.probabilities);
        for &(i, loss) in obs.revealed {
            self.state.pending[i] += loss / q[i];
        }
        self.state.last_obs_probs = q;
        check_estimates(&self.state.pending)?;
        check_estimates(&self.state.committed)
    }
}
