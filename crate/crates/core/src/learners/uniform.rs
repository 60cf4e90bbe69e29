//! Trivial baselines: uniform-random play and a pinned action.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::{find_played, Observation, Policy, PolicyError, RoundGuard};

/// Samples uniformly every round; ignores all feedback.
pub struct UniformRandom {
    num_actions: usize,
    held: usize,
    rng: ChaCha12Rng,
    guard: RoundGuard,
}

impl UniformRandom {
    pub fn new(num_actions: usize, seed: u64) -> Self {
        Self {
            num_actions,
            held: 0,
            rng: ChaCha12Rng::seed_from_u64(seed),
            guard: RoundGuard::default(),
        }
    }
}

impl Policy for UniformRandom {
    fn act(&mut self, t: usize) -> Result<usize, PolicyError> {
        self.guard.begin_act(t)?;
        self.held = self.rng.random_range(0..self.num_actions);
        Ok(self.held)
    }

    fn observe(&mut self, t: usize, obs: &Observation<'_>) -> Result<(), PolicyError> {
        self.guard.begin_observe(t)?;
        find_played(obs.revealed, self.held, t)?;
        Ok(())
    }
}

/// Always plays one action; useful as a zero-variance reference.
pub struct FixedAction {
    action: usize,
    guard: RoundGuard,
}

impl FixedAction {
    pub fn new(action: usize) -> Self {
        Self {
            action,
            guard: RoundGuard::default(),
        }
    }
}

impl Policy for FixedAction {
    fn act(&mut self, t: usize) -> Result<usize, PolicyError> {
        self.guard.begin_act(t)?;
        Ok(self.action)
    }

    fn observe(&mut self, t: usize, obs: &Observation<'_>) -> Result<(), PolicyError> {
        self.guard.begin_observe(t)?;
        find_played(obs.revealed, self.action, t)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::FeedbackGraph;

    #[test]
    fn uniform_covers_actions_deterministically() {
        let g = FeedbackGraph::mab(4).unwrap();
        let run = |seed| {
            let mut p = UniformRandom::new(4, seed);
            let mut actions = Vec::new();
            for t in 1..=100 {
                let a = p.act(t).unwrap();
                actions.push(a);
                let revealed = vec![(a, 0.0)];
                p.observe(
                    t,
                    &Observation {
                        revealed: &revealed,
                        graph: &g,
                    },
                )
                .unwrap();
            }
            actions
        };
        let a = run(1);
        assert_eq!(a, run(1));
        for i in 0..4 {
            assert!(a.contains(&i));
        }
    }
}
