//! EXP3 SET: importance-weighted exponential weights, resampled every round.
//!
//! The graph-feedback baseline without any switching control: each round the
//! distribution is recomputed from cumulative estimates and a fresh action is
//! drawn. Under switching costs its per-round resampling makes the switch
//! count grow linearly with the horizon.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::{
    check_estimates, find_played, observation_probabilities, sample_index, softmax, Observation,
    Policy, PolicyContext, PolicyError, RoundGuard,
};

pub struct Exp3Set {
    eta: f64,
    cumulative: Vec<f64>,
    probabilities: Vec<f64>,
    log_terms: Vec<f64>,
    held_action: Option<usize>,
    rng: ChaCha12Rng,
    guard: RoundGuard,
}

impl Exp3Set {
    pub fn new(ctx: &PolicyContext, eta: Option<f64>, seed: u64) -> Result<Self, PolicyError> {
        if ctx.mas_hint == 0 || ctx.horizon == 0 {
            return Err(PolicyError::InvalidParameter(
                "mas hint and horizon must be at least 1".into(),
            ));
        }
        let k = ctx.num_actions;
        let eta = match eta {
            Some(e) if e > 0.0 => e,
            Some(e) => {
                return Err(PolicyError::InvalidParameter(format!(
                    "eta must be positive, got {e}"
                )));
            }
            None => Self::default_eta(k, ctx.horizon, ctx.mas_hint),
        };
        Ok(Self {
            eta,
            cumulative: vec![0.0; k],
            probabilities: vec![1.0 / k as f64; k],
            log_terms: vec![0.0; k],
            held_action: None,
            rng: ChaCha12Rng::seed_from_u64(seed),
            guard: RoundGuard::default(),
        })
    }

    /// Baseline tuning `sqrt(ln(K) / (mas * T))`; degenerates to 0-rate only
    /// for K = 1 where the distribution is trivially a point mass.
    pub fn default_eta(k: usize, horizon: usize, mas_hint: usize) -> f64 {
        ((k as f64).ln() / ((mas_hint * horizon) as f64)).sqrt()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }
}

impl Policy for Exp3Set {
    fn act(&mut self, t: usize) -> Result<usize, PolicyError> {
        self.guard.begin_act(t)?;
        for (term, &cum) in self.log_terms.iter_mut().zip(&self.cumulative) {
            *term = -self.eta * cum;
        }
        softmax(&self.log_terms, &mut self.probabilities);
        let action = sample_index(&mut self.rng, &self.probabilities);
        self.held_action = Some(action);
        Ok(action)
    }

    fn observe(&mut self, t: usize, obs: &Observation<'_>) -> Result<(), PolicyError> {
        self.guard.begin_observe(t)?;
        let held = self.held_action.expect("observe follows act");
        find_played(obs.revealed, held, t)?;
        let q = observation_probabilities(obs.graph, &self.probabilities);
        for &(i, loss) in obs.revealed {
            self.cumulative[i] += loss / q[i];
        }
        check_estimates(&self.cumulative)
    }
}
