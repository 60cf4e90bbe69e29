//! EXP3.SC: horizon-free exponential weights with a decaying resample rate.
//!
//! Each round the sampling distribution is recomputed from the cumulative
//! importance-weighted estimates with a time-decaying learning rate; with
//! probability `eps_t` (decaying like `t^{-1/3}`) the action is resampled,
//! otherwise the previous action is held. Exploration is front-loaded and the
//! policy needs no knowledge of the horizon.
//!
//! Observation probabilities `q` are taken from the distribution in force at
//! the action's last resample: that is the distribution the played action was
//! actually drawn from, which is what makes the importance-weighted estimates
//! telescope to plain loss sums in expectation. Re-deriving `q` from the
//! per-round softmax instead couples a held action's collapsing probability
//! to its own growing loss estimates, and that feedback loop diverges.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::{
    check_estimates, find_played, observation_probabilities, sample_index, softmax, Observation,
    Policy, PolicyContext, PolicyError, RoundGuard,
};

pub struct Exp3Sc {
    num_actions: usize,
    switching_cost: f64,
    mas_hint: usize,
    /// Cumulative importance-weighted loss estimates.
    cumulative: Vec<f64>,
    probabilities: Vec<f64>,
    /// Distribution from the round of the last resample; observation
    /// probabilities are computed against it.
    selection_probs: Vec<f64>,
    log_terms: Vec<f64>,
    held_action: Option<usize>,
    rng: ChaCha12Rng,
    guard: RoundGuard,
}

impl Exp3Sc {
    pub fn new(ctx: &PolicyContext, seed: u64) -> Result<Self, PolicyError> {
        if ctx.mas_hint == 0 {
            return Err(PolicyError::InvalidParameter(
                "mas hint must be at least 1".into(),
            ));
        }
        if ctx.switching_cost <= 0.0 {
            return Err(PolicyError::InvalidParameter(format!(
                "exp3-sc needs a positive switching cost, got {}",
                ctx.switching_cost
            )));
        }
        let k = ctx.num_actions;
        Ok(Self {
            num_actions: k,
            switching_cost: ctx.switching_cost,
            mas_hint: ctx.mas_hint,
            cumulative: vec![0.0; k],
            probabilities: vec![1.0 / k as f64; k],
            selection_probs: vec![1.0 / k as f64; k],
            log_terms: vec![0.0; k],
            held_action: None,
            rng: ChaCha12Rng::seed_from_u64(seed),
            guard: RoundGuard::default(),
        })
    }

    /// Raw schedule value `0.5 c^{1/3} mas^{1/3} / t^{1/3}`, before clamping.
    pub fn epsilon(&self, t: usize) -> f64 {
        0.5 * self.switching_cost.cbrt() * (self.mas_hint as f64).cbrt() / (t as f64).cbrt()
    }

    /// The probability actually used for the resample coin; the schedule can
    /// exceed 1 for small `t`, so it is clamped into `[0, 1]`.
    pub fn resample_probability(&self, t: usize) -> f64 {
        self.epsilon(t).min(1.0)
    }

    /// Learning rate `ln(K) / (t^{2/3} c^{1/3} mas^{1/3})`.
    pub fn eta(&self, t: usize) -> f64 {
        (self.num_actions as f64).ln()
            / ((t as f64).powf(2.0 / 3.0)
                * self.switching_cost.cbrt()
                * (self.mas_hint as f64).cbrt())
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }
}

impl Policy for Exp3Sc {
    fn act(&mut self, t: usize) -> Result<usize, PolicyError> {
        self.guard.begin_act(t)?;
        let eta = self.eta(t);
        for (term, &cum) in self.log_terms.iter_mut().zip(&self.cumulative) {
            *term = -eta * cum;
        }
        softmax(&self.log_terms, &mut self.probabilities);
        // Draw order: at t = 1 a single sample; afterwards the resample coin
        // first, then (only on resample) the sample.
        let action = if t == 1 {
            self.selection_probs.copy_from_slice(&self.probabilities);
            sample_index(&mut self.rng, &self.probabilities)
        } else {
            let eps = self.resample_probability(t);
            let coin: f64 = self.rng.random();
            if coin < eps {
                self.selection_probs.copy_from_slice(&self.probabilities);
                sample_index(&mut self.rng, &self.probabilities)
            } else {
                self.held_action.expect("held action exists after round 1")
            }
        };
        self.held_action = Some(action);
        Ok(action)
    }

    fn observe(&mut self, t: usize, obs: &Observation<'_>) -> Result<(), PolicyError> {
        self.guard.begin_observe(t)?;
        let held = self.held_action.expect("observe follows act");
        find_played(obs.revealed, held, t)?;
        // q comes from the distribution the action was drawn from.
        let q = observation_probabilities(obs.graph, &self.selection_probs);
        for &(i, loss) in obs.revealed {
            self.cumulative[i] += loss / q[i];
        }
        check_estimates(&self.cumulative)
    }
}
