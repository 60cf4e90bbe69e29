//! Game engine: plays a policy against a fixed loss table over a graph
//! sequence and accounts losses, switches, and regret.
//!
//! Regret is realized loss plus `c` per switch minus the best fixed action's
//! total loss; the first action incurs no switching cost. All sums run in
//! ascending round order, so traces are bit-reproducible for a given seed.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::adversary::{
    bernoulli_adversary_with, gaussian_walk_adversary_with, split_adversary, AdversaryError,
    LossTable,
};
use crate::graphs::{GraphError, GraphSequence, SequenceSpec};
use crate::learners::{Observation, Policy, PolicyContext, PolicyError, PolicySpec};
use crate::measures::{self, ExactOptions, IndependenceSequence, MeasureError};
use crate::seeding;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("game needs at least 1 round")]
    NoRounds,
    #[error("switching cost must be non-negative, got {c}")]
    NegativeSwitchingCost { c: f64 },
    #[error("loss table has {table} rounds but the graph sequence has {sequence}")]
    RoundMismatch { table: usize, sequence: usize },
    #[error("loss table has {table} actions but the graph sequence has {sequence}")]
    ActionMismatch { table: usize, sequence: usize },
    #[error("policy returned action {action}, out of range for {k} actions")]
    ActionOutOfRange { action: usize, k: usize },
    #[error("expected-regret estimation needs at least 2 seeds, got {n}")]
    NotEnoughSeeds { n: usize },
    #[error("policy protocol violation: {0}")]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

// ---------------------------------------------------------------------------
// Adversary spec
// ---------------------------------------------------------------------------

/// Buildable description of the adversary for one game.
#[derive(Debug, Clone)]
pub enum AdversarySpec {
    /// Multi-scale Gaussian random-walk construction over the whole sequence.
    GaussianWalk,
    /// Walk construction applied independently per block; `None` blocks mean
    /// the greedy sequence split decides.
    Split { blocks: Option<Vec<Vec<usize>>> },
    /// Bernoulli gap construction.
    Bernoulli,
    /// A fixed table used verbatim for every run.
    Table(Arc<LossTable>),
}

impl AdversarySpec {
    /// Randomized adversaries draw a fresh table per evaluation seed; fixed
    /// tables are shared across seeds.
    pub fn randomized(&self) -> bool {
        !matches!(self, AdversarySpec::Table(_))
    }

    pub fn label(&self) -> String {
        match self {
            AdversarySpec::GaussianWalk => "walk".into(),
            AdversarySpec::Split { .. } => "split".into(),
            AdversarySpec::Bernoulli => "bernoulli".into(),
            AdversarySpec::Table(_) => "table".into(),
        }
    }
}

// ---------------------------------------------------------------------------
// GameConfig / GameTrace
// ---------------------------------------------------------------------------

/// Full description of one game; a pure function of its fields and a seed.
#[derive(Debug, Clone)]
pub struct GameConfig {
    pub switching_cost: f64,
    pub rounds: usize,
    pub seed: u64,
    pub policy: PolicySpec,
    pub sequence: SequenceSpec,
    pub adversary: AdversarySpec,
    /// Override for `mas(G_(T))`; computed exactly when absent.
    pub mas_hint: Option<usize>,
    /// Raises the exact-measure action limit (capped at the bitset width).
    pub exact_limit: Option<usize>,
}

impl GameConfig {
    fn exact_options(&self) -> ExactOptions {
        let mut opts = ExactOptions::wide();
        if let Some(limit) = self.exact_limit {
            opts.max_k = limit.min(measures::EXACT_HARD_LIMIT);
        }
        opts
    }
}

/// Everything recorded about one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameTrace {
    pub switching_cost: f64,
    /// Actions `i_1..i_T`.
    pub actions: Vec<usize>,
    /// Realized losses `l_t(i_t)`.
    pub realized_losses: Vec<f64>,
    /// `i_t != i_{t-1}` for `t = 2..T`.
    pub switch_flags: Vec<bool>,
    pub switch_count: usize,
    pub realized_loss_sum: f64,
    /// `min_k sum_t l_t(k)`.
    pub best_fixed_loss: f64,
    /// `realized_loss_sum + c * switch_count - best_fixed_loss`.
    pub realized_regret: f64,
    /// Cumulative loss plus switching cost after each round, for plotting.
    pub per_round_cumulative: Vec<f64>,
}

/// Runs one game of `policy` against `table` under `seq`.
pub fn run_game(
    policy: &mut dyn Policy,
    seq: &GraphSequence,
    table: &LossTable,
    switching_cost: f64,
) -> Result<GameTrace, EngineError> {
    let rounds = seq.len();
    if rounds == 0 {
        return Err(EngineError::NoRounds);
    }
    if switching_cost < 0.0 {
        return Err(EngineError::NegativeSwitchingCost { c: switching_cost });
    }
    if table.rounds() != rounds {
        return Err(EngineError::RoundMismatch {
            table: table.rounds(),
            sequence: rounds,
        });
    }
    let k = seq.num_actions();
    if table.num_actions() != k {
        return Err(EngineError::ActionMismatch {
            table: table.num_actions(),
            sequence: k,
        });
    }

    let mut actions = Vec::with_capacity(rounds);
    let mut realized_losses = Vec::with_capacity(rounds);
    let mut switch_flags = Vec::with_capacity(rounds.saturating_sub(1));
    let mut per_round_cumulative = Vec::with_capacity(rounds);
    let mut loss_sum = 0.0f64;
    let mut switch_count = 0usize;
    let mut revealed: Vec<(usize, f64)> = Vec::with_capacity(k);

    for t in 1..=rounds {
        let action = policy.act(t)?;
        if action >= k {
            return Err(EngineError::ActionOutOfRange { action, k });
        }
        let graph = seq.graph(t - 1);
        revealed.clear();
        for &j in graph.out_neighbors(action) {
            revealed.push((j, table.loss(t - 1, j)));
        }
        policy.observe(
            t,
            &Observation {
                revealed: &revealed,
                graph,
            },
        )?;

        if t > 1 {
            let switched = action != actions[t - 2];
            switch_flags.push(switched);
            if switched {
                switch_count += 1;
            }
        }
        let loss = table.loss(t - 1, action);
        loss_sum += loss;
        actions.push(action);
        realized_losses.push(loss);
        per_round_cumulative.push(loss_sum + switching_cost * switch_count as f64);
    }

    let best_fixed_loss = (0..k)
        .map(|i| table.column_sum(i))
        .fold(f64::INFINITY, f64::min);
    let realized_regret = loss_sum + switching_cost * switch_count as f64 - best_fixed_loss;

    Ok(GameTrace {
        switching_cost,
        actions,
        realized_losses,
        switch_flags,
        switch_count,
        realized_loss_sum: loss_sum,
        best_fixed_loss,
        realized_regret,
        per_round_cumulative,
    })
}

// ---------------------------------------------------------------------------
// Prepared games and Monte Carlo evaluation
// ---------------------------------------------------------------------------

/// A config with its sequence materialized and measures precomputed, ready to
/// run under many seeds.
pub struct PreparedGame {
    pub sequence: GraphSequence,
    pub policy: PolicySpec,
    pub adversary: AdversarySpec,
    pub switching_cost: f64,
    pub mas_hint: usize,
    iset: Option<IndependenceSequence>,
    split_blocks: Option<Vec<Vec<usize>>>,
}

/// Materializes the sequence, resolves the `mas` hint, and precomputes what
/// the adversary needs.
pub fn prepare(config: &GameConfig) -> Result<PreparedGame, EngineError> {
    let sequence = config.sequence.materialize(config.rounds)?;
    let opts = config.exact_options();
    let mas_hint = match config.mas_hint {
        Some(hint) => hint,
        None => {
            let mut min = usize::MAX;
            for (graph, _) in sequence.unique_graphs() {
                min = min.min(measures::mas_size(graph, &opts)?);
            }
            min
        }
    };

    let mut iset = None;
    let mut split_blocks = None;
    match &config.adversary {
        AdversarySpec::GaussianWalk | AdversarySpec::Bernoulli => {
            iset = Some(measures::independence_sequence(&sequence, &opts)?);
        }
        AdversarySpec::Split { blocks } => {
            split_blocks = Some(match blocks {
                Some(b) => b.clone(),
                None => {
                    measures::greedy_sequence_split(&sequence, config.switching_cost, &opts)?
                        .block_indices()
                }
            });
        }
        AdversarySpec::Table(shared) => {
            if shared.rounds() != sequence.len() {
                return Err(EngineError::RoundMismatch {
                    table: shared.rounds(),
                    sequence: sequence.len(),
                });
            }
            if shared.num_actions() != sequence.num_actions() {
                return Err(EngineError::ActionMismatch {
                    table: shared.num_actions(),
                    sequence: sequence.num_actions(),
                });
            }
        }
    }

    Ok(PreparedGame {
        sequence,
        policy: config.policy.clone(),
        adversary: config.adversary.clone(),
        switching_cost: config.switching_cost,
        mas_hint,
        iset,
        split_blocks,
    })
}

impl PreparedGame {
    /// Builds (or reuses) the loss table for one evaluation seed.
    pub fn table_for(&self, seed: u64) -> Result<Arc<LossTable>, EngineError> {
        let adv_seed = seeding::mix(seed, seeding::ADVERSARY_STREAM);
        Ok(match &self.adversary {
            AdversarySpec::GaussianWalk => Arc::new(gaussian_walk_adversary_with(
                &self.sequence,
                self.switching_cost,
                adv_seed,
                self.iset.as_ref().expect("precomputed in prepare"),
            )?),
            AdversarySpec::Split { .. } => Arc::new(split_adversary(
                &self.sequence,
                self.switching_cost,
                adv_seed,
                self.split_blocks.as_ref().expect("precomputed in prepare"),
            )?),
            AdversarySpec::Bernoulli => Arc::new(bernoulli_adversary_with(
                &self.sequence,
                adv_seed,
                self.iset.as_ref().expect("precomputed in prepare"),
            )?),
            AdversarySpec::Table(table) => table.clone(),
        })
    }

    pub fn policy_context(&self) -> PolicyContext {
        PolicyContext {
            num_actions: self.sequence.num_actions(),
            horizon: self.sequence.len(),
            switching_cost: self.switching_cost,
            mas_hint: self.mas_hint,
        }
    }

    /// Runs one seeded game: the adversary and the policy use independent
    /// streams derived from `seed`.
    pub fn run(&self, seed: u64) -> Result<GameTrace, EngineError> {
        let table = self.table_for(seed)?;
        let ctx = self.policy_context();
        let mut policy = self
            .policy
            .build(&ctx, seeding::mix(seed, seeding::POLICY_STREAM))?;
        run_game(policy.as_mut(), &self.sequence, &table, self.switching_cost)
    }
}

/// Runs the configured game once with the config's own seed.
pub fn run_game_config(config: &GameConfig) -> Result<GameTrace, EngineError> {
    prepare(config)?.run(config.seed)
}

/// Monte Carlo summary over seeds.
#[derive(Debug, Clone, Serialize)]
pub struct RegretStats {
    pub n_runs: usize,
    pub mean_regret: f64,
    pub se_regret: f64,
    pub mean_switches: f64,
    pub se_switches: f64,
    pub mean_loss: f64,
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Estimates expected regret over `n_seeds` runs with seeds
/// `config.seed + 1 ..= config.seed + n_seeds`.
///
/// Fixed tables are reused across runs (only the player randomizes);
/// randomized adversaries draw a fresh table per seed, because the
/// expectation then includes the adversary's own randomness. Runs execute in
/// parallel and are reduced in seed order.
pub fn expected_regret(config: &GameConfig, n_seeds: usize) -> Result<RegretStats, EngineError> {
    if n_seeds < 2 {
        return Err(EngineError::NotEnoughSeeds { n: n_seeds });
    }
    let prepared = prepare(config)?;
    let traces: Vec<GameTrace> = (1..=n_seeds as u64)
        .into_par_iter()
        .map(|offset| prepared.run(config.seed.wrapping_add(offset)))
        .collect::<Result<_, _>>()?;
    let regrets: Vec<f64> = traces.iter().map(|t| t.realized_regret).collect();
    let switches: Vec<f64> = traces.iter().map(|t| t.switch_count as f64).collect();
    let losses: Vec<f64> = traces.iter().map(|t| t.realized_loss_sum).collect();
    let (mean_regret, se_regret) = mean_and_se(&regrets);
    let (mean_switches, se_switches) = mean_and_se(&switches);
    Ok(RegretStats {
        n_runs: n_seeds,
        mean_regret,
        se_regret,
        mean_switches,
        se_switches,
        mean_loss: losses.iter().sum::<f64>() / losses.len() as f64,
    })
}

/// Writes a trace as CSV: `t,action,loss,switched,cum_loss,cum_switch_cost`.
pub fn write_trace_csv(trace: &GameTrace, out: &mut impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "action", "loss", "switched", "cum_loss", "cum_switch_cost"])?;
    let mut cum_loss = 0.0f64;
    let mut switches = 0usize;
    for t in 0..trace.actions.len() {
        let switched = t > 0 && trace.switch_flags[t - 1];
        if switched {
            switches += 1;
        }
        cum_loss += trace.realized_losses[t];
        w.write_record([
            (t + 1).to_string(),
            trace.actions[t].to_string(),
            trace.realized_losses[t].to_string(),
            u8::from(switched).to_string(),
            cum_loss.to_string(),
            (trace.switching_cost * switches as f64).to_string(),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{constant_table, fixed_table_adversary};
    use crate::graphs::{FeedbackGraph, GraphKind};
    use crate::learners::UniformRandom;

    fn mab_config(k: usize, rounds: usize, policy: PolicySpec) -> GameConfig {
        GameConfig {
            switching_cost: 0.35,
            rounds,
            seed: 1,
            policy,
            sequence: SequenceSpec::Generated {
                kind: GraphKind::Mab,
                num_actions: k,
                graph_seed: 0,
            },
            adversary: AdversarySpec::GaussianWalk,
            mas_hint: None,
            exact_limit: None,
        }
    }

    #[test]
    fn zero_table_regret_equals_switch_cost() {
        let seq = GraphSequence::mab(3, 50).unwrap();
        let table = constant_table(50, 3, 0.0).unwrap();
        let mut policy = UniformRandom::new(3, 9);
        let trace = run_game(&mut policy, &seq, &table, 0.5).unwrap();
        assert_eq!(
            trace.realized_regret,
            0.5 * trace.switch_count as f64
        );
        let ones = constant_table(50, 3, 1.0).unwrap();
        let mut policy = UniformRandom::new(3, 9);
        let trace = run_game(&mut policy, &seq, &ones, 0.5).unwrap();
        assert!((trace.realized_regret - 0.5 * trace.switch_count as f64).abs() < 1e-9);
    }

    #[test]
    fn single_action_game_has_no_switches_and_no_regret() {
        let seq = GraphSequence::mab(1, 20).unwrap();
        let table = constant_table(20, 1, 0.7).unwrap();
        let mut policy = UniformRandom::new(1, 0);
        let trace = run_game(&mut policy, &seq, &table, 0.35).unwrap();
        assert_eq!(trace.switch_count, 0);
        assert_eq!(trace.realized_regret, 0.0);
    }

    #[test]
    fn best_fixed_action_is_the_zero_column() {
        let rows: Vec<Vec<f64>> = (0..10).map(|_| vec![1.0, 0.0, 1.0]).collect();
        let table = fixed_table_adversary(rows).unwrap();
        assert_eq!(table.column_sum(1), 0.0);
        let seq = GraphSequence::mab(3, 10).unwrap();
        let mut policy = crate::learners::FixedAction::new(1);
        let trace = run_game(&mut policy, &seq, &table, 0.35).unwrap();
        assert_eq!(trace.best_fixed_loss, 0.0);
        assert_eq!(trace.realized_regret, 0.0);
    }

    #[test]
    fn regret_identity_holds_exactly() {
        let config = mab_config(4, 128, PolicySpec::Uniform);
        let trace = run_game_config(&config).unwrap();
        assert_eq!(
            trace.realized_regret,
            trace.realized_loss_sum + 0.35 * trace.switch_count as f64 - trace.best_fixed_loss
        );
        assert_eq!(
            trace.switch_count,
            trace.switch_flags.iter().filter(|&&s| s).count()
        );
        // The cumulative curve ends at total loss plus total switch cost.
        let last = *trace.per_round_cumulative.last().unwrap();
        assert!(
            (last - (trace.realized_loss_sum + 0.35 * trace.switch_count as f64)).abs() < 1e-9
        );
        assert!(trace
            .per_round_cumulative
            .windows(2)
            .all(|w| w[1] >= w[0] - 1e-12));
    }

    /// Policy wrapper recording everything it is shown.
    struct SpyPolicy {
        inner: UniformRandom,
        seen: Vec<(usize, Vec<usize>)>,
        last_action: usize,
    }

    impl Policy for SpyPolicy {
        fn act(&mut self, t: usize) -> Result<usize, PolicyError> {
            self.last_action = self.inner.act(t)?;
            Ok(self.last_action)
        }

        fn observe(&mut self, t: usize, obs: &Observation<'_>) -> Result<(), PolicyError> {
            self.seen
                .push((self.last_action, obs.revealed.iter().map(|&(i, _)| i).collect()));
            self.inner.observe(t, obs)
        }
    }

    #[test]
    fn engine_reveals_exactly_the_out_neighborhood() {
        let g = FeedbackGraph::new(4, [(0, 1), (2, 3), (3, 0)]).unwrap();
        let seq = GraphSequence::fixed(g.clone(), 60).unwrap();
        let table = constant_table(60, 4, 0.5).unwrap();
        let mut spy = SpyPolicy {
            inner: UniformRandom::new(4, 3),
            seen: Vec::new(),
            last_action: 0,
        };
        run_game(&mut spy, &seq, &table, 0.35).unwrap();
        for (action, revealed) in &spy.seen {
            let expected: Vec<usize> = g.out_neighbors(*action).iter().copied().collect();
            assert_eq!(revealed, &expected);
        }
    }

    #[test]
    fn mab_reveals_only_the_played_action() {
        let seq = GraphSequence::mab(5, 30).unwrap();
        let table = constant_table(30, 5, 0.25).unwrap();
        let mut spy = SpyPolicy {
            inner: UniformRandom::new(5, 8),
            seen: Vec::new(),
            last_action: 0,
        };
        run_game(&mut spy, &seq, &table, 0.35).unwrap();
        for (action, revealed) in &spy.seen {
            assert_eq!(revealed, &vec![*action]);
        }
    }

    #[test]
    fn traces_are_byte_identical_for_equal_seeds() {
        for policy in [
            PolicySpec::ThresholdExp3 { eta: None },
            PolicySpec::Exp3Sc,
            PolicySpec::Exp3Set { eta: None },
            PolicySpec::BatchExp3 { batch_size: None },
            PolicySpec::Uniform,
        ] {
            let config = mab_config(5, 200, policy.clone());
            let a = run_game_config(&config).unwrap();
            let b = run_game_config(&config).unwrap();
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                serde_json::to_string(&b).unwrap(),
                "{policy:?}"
            );
            let mut other = config.clone();
            other.seed = 2;
            let c = run_game_config(&other).unwrap();
            assert_ne!(
                serde_json::to_string(&a).unwrap(),
                serde_json::to_string(&c).unwrap(),
                "{policy:?}"
            );
        }
    }

    #[test]
    fn deterministic_policy_on_fixed_table_has_zero_se() {
        let rows: Vec<Vec<f64>> = (0..40).map(|t| vec![(t % 2) as f64, 0.5]).collect();
        let table = Arc::new(fixed_table_adversary(rows).unwrap());
        let config = GameConfig {
            switching_cost: 0.35,
            rounds: 40,
            seed: 3,
            policy: PolicySpec::FixedAction { action: 0 },
            sequence: SequenceSpec::Generated {
                kind: GraphKind::Mab,
                num_actions: 2,
                graph_seed: 0,
            },
            adversary: AdversarySpec::Table(table),
            mas_hint: None,
            exact_limit: None,
        };
        let stats = expected_regret(&config, 8).unwrap();
        assert_eq!(stats.se_regret, 0.0);
        assert_eq!(stats.se_switches, 0.0);
    }

    #[test]
    fn uniform_policy_matches_closed_form_mean() {
        // One zero column, ones elsewhere, K = 2, c = 0: the uniform policy
        // incurs about T/2 while the best fixed action incurs 0.
        let rounds = 1000;
        let rows: Vec<Vec<f64>> = (0..rounds).map(|_| vec![0.0, 1.0]).collect();
        let table = Arc::new(fixed_table_adversary(rows).unwrap());
        let config = GameConfig {
            switching_cost: 0.0,
            rounds,
            seed: 10,
            policy: PolicySpec::Uniform,
            sequence: SequenceSpec::Generated {
                kind: GraphKind::Mab,
                num_actions: 2,
                graph_seed: 0,
            },
            adversary: AdversarySpec::Table(table),
            mas_hint: None,
            exact_limit: None,
        };
        let stats = expected_regret(&config, 24).unwrap();
        let expected = rounds as f64 / 2.0;
        assert!(
            (stats.mean_regret - expected).abs() <= 3.0 * stats.se_regret,
            "mean {} vs expected {expected} (se {})",
            stats.mean_regret,
            stats.se_regret
        );
    }

    #[test]
    fn expected_regret_requires_two_seeds() {
        let config = mab_config(3, 16, PolicySpec::Uniform);
        assert!(matches!(
            expected_regret(&config, 1),
            Err(EngineError::NotEnoughSeeds { n: 1 })
        ));
    }

    #[test]
    fn randomized_adversaries_redraw_per_seed_fixed_tables_do_not() {
        let config = mab_config(4, 64, PolicySpec::FixedAction { action: 0 });
        let prepared = prepare(&config).unwrap();
        let a = prepared.table_for(1).unwrap();
        let b = prepared.table_for(2).unwrap();
        assert_ne!(a.row(0), b.row(0));

        let fixed = Arc::new(constant_table(64, 4, 0.5).unwrap());
        let mut config2 = mab_config(4, 64, PolicySpec::FixedAction { action: 0 });
        config2.adversary = AdversarySpec::Table(fixed);
        let prepared2 = prepare(&config2).unwrap();
        let a = prepared2.table_for(1).unwrap();
        let b = prepared2.table_for(2).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let seq = GraphSequence::mab(3, 10).unwrap();
        let table = constant_table(10, 4, 0.5).unwrap();
        let mut policy = UniformRandom::new(3, 0);
        assert!(matches!(
            run_game(&mut policy, &seq, &table, 0.35),
            Err(EngineError::ActionMismatch { .. })
        ));
        let table = constant_table(9, 3, 0.5).unwrap();
        let mut policy = UniformRandom::new(3, 0);
        assert!(matches!(
            run_game(&mut policy, &seq, &table, 0.35),
            Err(EngineError::RoundMismatch { .. })
        ));
    }

    #[test]
    fn protocol_violations_abort_with_diagnostics() {
        struct BrokenPolicy;
        impl Policy for BrokenPolicy {
            fn act(&mut self, _t: usize) -> Result<usize, PolicyError> {
                Ok(0)
            }
            fn observe(&mut self, t: usize, _obs: &Observation<'_>) -> Result<(), PolicyError> {
                Err(PolicyError::ObserveWithoutAct { t })
            }
        }
        let seq = GraphSequence::mab(2, 4).unwrap();
        let table = constant_table(4, 2, 0.1).unwrap();
        assert!(matches!(
            run_game(&mut BrokenPolicy, &seq, &table, 0.35),
            Err(EngineError::Policy(_))
        ));
    }

    #[test]
    fn trace_csv_has_expected_shape() {
        let config = mab_config(3, 12, PolicySpec::Uniform);
        let trace = run_game_config(&config).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,action,loss,switched,cum_loss,cum_switch_cost");
        assert_eq!(lines.len(), 13);
        assert!(lines[1].starts_with("1,"));
    }
}
