//! Batch EXP3: exponential weights played in fixed batches.
//!
//! The action is sampled once per batch and held for `tau` rounds; at the
//! next batch boundary the weights are updated with the batch-summed
//! importance-weighted loss of the played action and a fresh action is drawn.
//! The batch length `tau = ceil((2c)^{2/3} (T/K)^{1/3})` balances the
//! `sqrt(tau T K log K)` estimation regret against the `c T / tau` switching
//! cost. The classic variant consumes only the played action's own loss and
//! ignores side observations.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::{
    check_estimates, find_played, sample_index, softmax, Observation, Policy, PolicyContext,
    PolicyError, RoundGuard,
};

pub struct BatchExp3 {
    tau: usize,
    eta: f64,
    log_weights: Vec<f64>,
    probabilities: Vec<f64>,
    current: Option<usize>,
    prob_at_sample: f64,
    batch_loss: f64,
    pos_in_batch: usize,
    rng: ChaCha12Rng,
    guard: RoundGuard,
}

impl BatchExp3 {
    pub fn new(
        ctx: &PolicyContext,
        batch_size: Option<usize>,
        seed: u64,
    ) -> Result<Self, PolicyError> {
        if ctx.horizon == 0 {
            return Err(PolicyError::InvalidParameter(
                "horizon must be at least 1".into(),
            ));
        }
        let k = ctx.num_actions;
        let tau = match batch_size {
            Some(0) => {
                return Err(PolicyError::InvalidParameter(
                    "batch size must be at least 1".into(),
                ));
            }
            Some(t) => t,
            None => Self::default_batch_size(ctx.horizon, k, ctx.switching_cost),
        };
        let batches = ctx.horizon.div_ceil(tau);
        // Meta-round losses live in [0, tau], so the standard rate for that
        // many meta-rounds is divided by tau.
        let eta = if k > 1 {
            (2.0 * (k as f64).ln() / (batches as f64 * k as f64)).sqrt() / tau as f64
        } else {
            1.0
        };
        Ok(Self {
            tau,
            eta,
            log_weights: vec![0.0; k],
            probabilities: vec![1.0 / k as f64; k],
            current: None,
            prob_at_sample: 1.0,
            batch_loss: 0.0,
            pos_in_batch: 0,
            rng: ChaCha12Rng::seed_from_u64(seed),
            guard: RoundGuard::default(),
        })
    }

    /// `max(1, ceil((2c)^{2/3} (T/K)^{1/3}))`.
    pub fn default_batch_size(horizon: usize, k: usize, c: f64) -> usize {
        let raw = (2.0 * c).powf(2.0 / 3.0) * (horizon as f64 / k as f64).cbrt();
        (raw.ceil() as usize).max(1)
    }

    pub fn batch_size(&self) -> usize {
        self.tau
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }
}

impl Policy for BatchExp3 {
    fn act(&mut self, t: usize) -> Result<usize, PolicyError> {
        self.guard.begin_act(t)?;
        if self.pos_in_batch == 0 {
            if let Some(prev) = self.current {
                let estimate = self.batch_loss / self.prob_at_sample;
                self.log_weights[prev] -= self.eta * estimate;
                softmax(&self.log_weights, &mut self.probabilities);
                check_estimates(&self.log_weights)?;
            }
            let action = sample_index(&mut self.rng, &self.probabilities);
            self.current = Some(action);
            self.prob_at_sample = self.probabilities[action];
            self.batch_loss = 0.0;
        }
        self.pos_in_batch = (self.pos_in_batch + 1) % self.tau;
        Ok(self.current.expect("current action set at batch start"))
    }

    fn observe(&mut self, t: usize, obs: &Observation<'_>) -> Result<(), PolicyError> {
        self.guard.begin_observe(t)?;
        let current = self.current.expect("observe follows act");
        let own_loss = find_played(obs.revealed, current, t)?;
        // Only the played action's loss is consumed; side observations are
        // ignored by the classic batch scheme.
        self.batch_loss += own_loss;
        Ok(())
    }
}
