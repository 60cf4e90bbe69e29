//! Loss-table generators.
//!
//! All adversaries here are oblivious: they fix the full `T x K` loss table
//! before play, as a pure function of their inputs and a seed.
//!
//! The centerpiece is the multi-scale Gaussian random-walk adversary. It picks
//! a hidden best action `X` uniformly from the sequence-wide independent set,
//! drives a common random walk `W_t = W_{rho(t)} + y_t` (where `rho(t)` clears
//! the lowest set bit of `t`), and assigns every action the walk value plus
//! `0.5`, minus a small gap for `X`, plus a small penalty for actions outside
//! the independent set. Losses are clipped to `[0, 1]`; the pre-clip table,
//! the walk, and its Gaussian steps are retained in metadata so the structure
//! can be verified after the fact.
//!
//! A split variant runs that construction independently on disjoint blocks of
//! rounds, and a Bernoulli variant assigns coin-flip losses with a hidden
//! `sqrt(beta / T)` gap.

use std::io::{BufRead, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{GraphError, GraphSequence};
use crate::measures::{self, ExactOptions, IndependenceSequence, MeasureError};
use crate::seeding;

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("round index must be at least 1 (the bit-clearing recursion is undefined at 0)")]
    ZeroRound,
    #[error(
        "walk adversary requires at least two actions jointly independent across \
         the sequence, got beta = {beta}"
    )]
    BetaTooSmall { beta: usize },
    #[error("block {block} has beta = {beta}; every block needs beta > 1")]
    BlockBetaTooSmall { block: usize, beta: usize },
    #[error("walk adversary needs at least 2 rounds, got {rounds}")]
    HorizonTooSmall { rounds: usize },
    #[error("switching-cost scale must be positive, got {c}")]
    InvalidScale { c: f64 },
    #[error("Bernoulli gap sqrt(beta/T) = {eps} exceeds 0.5; increase the horizon")]
    EpsilonTooLarge { eps: f64 },
    #[error("loss at round {t}, action {i} is {value}, outside [0, 1]")]
    LossOutOfRange { t: usize, i: usize, value: f64 },
    #[error("losses must form a non-empty rectangular table")]
    EmptyTable,
    #[error("blocks do not partition the rounds: {reason}")]
    BadBlocks { reason: String },
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

// ---------------------------------------------------------------------------
// Bit-clearing round recursion
// ---------------------------------------------------------------------------

/// Exponent of the largest power of two dividing `t`.
pub fn delta(t: u64) -> Result<u32, AdversaryError> {
    if t == 0 {
        return Err(AdversaryError::ZeroRound);
    }
    Ok(t.trailing_zeros())
}

/// `t` with its lowest set bit cleared, i.e. `t - 2^{delta(t)}`.
pub fn rho(t: u64) -> Result<u64, AdversaryError> {
    if t == 0 {
        return Err(AdversaryError::ZeroRound);
    }
    Ok(t & (t - 1))
}

/// The chain `t, rho(t), rho(rho(t)), ..., 0`; its length minus one equals
/// the popcount of `t`.
pub fn rho_chain(t: u64) -> Result<Vec<u64>, AdversaryError> {
    if t == 0 {
        return Err(AdversaryError::ZeroRound);
    }
    let mut chain = vec![t];
    let mut cur = t;
    while cur != 0 {
        cur &= cur - 1;
        chain.push(cur);
    }
    Ok(chain)
}

/// The multi-scale walk: `w[t] = w[rho(t)] + y[t]`, `w[0] = 0`, with `y_t`
/// i.i.d. Gaussian with standard deviation `sigma`, drawn in round order.
/// Returns `(y, w)` for rounds `1..=rounds`, 0-indexed by `round - 1`.
pub fn multiscale_walk(rounds: usize, sigma: f64, rng: &mut ChaCha12Rng) -> (Vec<f64>, Vec<f64>) {
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and positive");
    let mut y = Vec::with_capacity(rounds);
    let mut w = vec![0.0f64; rounds + 1];
    for t in 1..=rounds {
        let step: f64 = normal.sample(rng);
        y.push(step);
        w[t] = w[t & (t - 1)] + step;
    }
    (y, w.split_off(1))
}

// ---------------------------------------------------------------------------
// LossTable
// ---------------------------------------------------------------------------

/// Generation metadata for one walk block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockMeta {
    /// Global 0-based rounds covered by this block, ascending.
    pub rounds: Vec<usize>,
    /// Hidden best action, drawn uniformly from `independent_set`.
    pub best_action: usize,
    /// Actions jointly independent across the block's graphs.
    pub independent_set: Vec<usize>,
    /// Gap applied to the best action.
    pub eps1: f64,
    /// Penalty applied outside the independent set.
    pub eps2: f64,
    /// Standard deviation of the walk steps.
    pub sigma: f64,
    /// Gaussian steps `y_1..y_N` (block-local rounds).
    pub steps: Vec<f64>,
    /// Walk values `W_1..W_N` (block-local rounds).
    pub walk: Vec<f64>,
}

/// Generation metadata for a walk table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WalkMeta {
    /// Pre-clip losses, row-major `T x K`.
    pub preclip: Vec<f64>,
    /// One entry per independent generation block (one for the plain walk).
    pub blocks: Vec<BlockMeta>,
}

/// Generation metadata for a Bernoulli table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BernoulliMeta {
    pub hidden_action: usize,
    pub eps: f64,
    pub independent_set: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TableMeta {
    Walk(WalkMeta),
    Bernoulli(BernoulliMeta),
}

/// A fixed `T x K` loss table with all entries in `[0, 1]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LossTable {
    rounds: usize,
    num_actions: usize,
    /// Row-major, `losses[t * K + i]`.
    losses: Vec<f64>,
    pub meta: Option<TableMeta>,
}

impl LossTable {
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    /// Loss of action `i` at 0-based round `t0`.
    pub fn loss(&self, t0: usize, i: usize) -> f64 {
        self.losses[t0 * self.num_actions + i]
    }

    /// Row of 0-based round `t0`.
    pub fn row(&self, t0: usize) -> &[f64] {
        let start = t0 * self.num_actions;
        &self.losses[start..start + self.num_actions]
    }

    /// Pre-clip value when walk metadata is present.
    pub fn preclip(&self, t0: usize, i: usize) -> Option<f64> {
        match &self.meta {
            Some(TableMeta::Walk(meta)) => Some(meta.preclip[t0 * self.num_actions + i]),
            _ => None,
        }
    }

    /// Column sum in ascending round order.
    pub fn column_sum(&self, i: usize) -> f64 {
        (0..self.rounds).map(|t| self.loss(t, i)).sum()
    }
}

fn clip(a: f64) -> f64 {
    a.clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// Walk adversary
// ---------------------------------------------------------------------------

fn walk_parameters(c: f64, beta: usize, rounds: usize) -> (f64, f64, f64) {
    let log2_t = (rounds as f64).log2();
    let eps1 = c.cbrt() * (beta as f64).cbrt() / (rounds as f64).cbrt() / (9.0 * log2_t);
    (eps1, eps1, 1.0 / (9.0 * log2_t))
}

fn walk_block(
    seq: &GraphSequence,
    c: f64,
    block_seed: u64,
    rounds_global: Vec<usize>,
    iset: &IndependenceSequence,
    block_index: usize,
) -> Result<(BlockMeta, Vec<Vec<f64>>), AdversaryError> {
    let n = rounds_global.len();
    if n < 2 {
        return Err(AdversaryError::HorizonTooSmall { rounds: n });
    }
    if iset.beta <= 1 {
        return Err(if block_index == 0 && n == seq.len() {
            AdversaryError::BetaTooSmall { beta: iset.beta }
        } else {
            AdversaryError::BlockBetaTooSmall {
                block: block_index,
                beta: iset.beta,
            }
        });
    }
    let k = seq.num_actions();
    let (eps1, eps2, sigma) = walk_parameters(c, iset.beta, n);

    let threshold = 27.0 * c * (n as f64).log2().powf(1.5) / (iset.beta as f64).powi(2);
    if (n as f64) < threshold {
        log::warn!(
            "walk adversary: horizon {n} is below the regime threshold {threshold:.1}; \
             the gap eps1 = {eps1:.3e} may not be clip-safe"
        );
    }

    let mut rng = ChaCha12Rng::seed_from_u64(block_seed);
    // Draw order, fixed for reproducibility: best action first, then the
    // Gaussian steps in round order.
    let best_action = iset.set[rng.random_range(0..iset.set.len())];
    let (steps, walk) = multiscale_walk(n, sigma, &mut rng);

    let mut in_set = vec![false; k];
    for &i in &iset.set {
        in_set[i] = true;
    }
    let mut preclip_rows = Vec::with_capacity(n);
    for w in &walk {
        let base = w + 0.5;
        let row: Vec<f64> = (0..k)
            .map(|i| {
                if i == best_action {
                    base - eps1
                } else if in_set[i] {
                    base
                } else {
                    base + eps2
                }
            })
            .collect();
        preclip_rows.push(row);
    }

    Ok((
        BlockMeta {
            rounds: rounds_global,
            best_action,
            independent_set: iset.set.clone(),
            eps1,
            eps2,
            sigma,
            steps,
            walk,
        },
        preclip_rows,
    ))
}

// The adversary needs the exact independent set; allow the full bitset range
// and rely on the time budget as the guard.
fn exact_options() -> ExactOptions {
    ExactOptions::wide()
}

/// Multi-scale Gaussian random-walk adversary over the whole sequence.
pub fn gaussian_walk_adversary(
    seq: &GraphSequence,
    c: f64,
    seed: u64,
) -> Result<LossTable, AdversaryError> {
    let iset = measures::independence_sequence(seq, &exact_options())?;
    gaussian_walk_adversary_with(seq, c, seed, &iset)
}

/// Walk adversary with a precomputed independence sequence (avoids repeated
/// exact solves when generating many tables for one sequence).
pub fn gaussian_walk_adversary_with(
    seq: &GraphSequence,
    c: f64,
    seed: u64,
    iset: &IndependenceSequence,
) -> Result<LossTable, AdversaryError> {
    if c <= 0.0 {
        return Err(AdversaryError::InvalidScale { c });
    }
    let rounds: Vec<usize> = (0..seq.len()).collect();
    assemble_walk_table(seq, c, seed, vec![(rounds, iset.clone())])
}

/// Walk adversary applied independently to each block of a partition of the
/// rounds. Block `m` is seeded with a child seed derived from `(seed, m)`;
/// with the identity partition this is bit-for-bit the plain walk adversary.
pub fn split_adversary(
    seq: &GraphSequence,
    c: f64,
    seed: u64,
    blocks: &[Vec<usize>],
) -> Result<LossTable, AdversaryError> {
    if c <= 0.0 {
        return Err(AdversaryError::InvalidScale { c });
    }
    validate_partition(seq.len(), blocks)?;
    let opts = exact_options();
    let mut prepared = Vec::with_capacity(blocks.len());
    for rounds in blocks {
        let sub = seq.subsequence(rounds)?;
        let iset = measures::independence_sequence(&sub, &opts)?;
        prepared.push((rounds.clone(), iset));
    }
    assemble_walk_table(seq, c, seed, prepared)
}

fn validate_partition(rounds: usize, blocks: &[Vec<usize>]) -> Result<(), AdversaryError> {
    let bad = |reason: String| AdversaryError::BadBlocks { reason };
    if blocks.is_empty() {
        return Err(bad("no blocks given".into()));
    }
    let mut seen = vec![false; rounds];
    for (m, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(bad(format!("block {m} is empty")));
        }
        let mut prev: Option<usize> = None;
        for &t in block {
            if t >= rounds {
                return Err(bad(format!("block {m} references round {t} >= {rounds}")));
            }
            if seen[t] {
                return Err(bad(format!("round {t} appears in more than one block")));
            }
            if prev.is_some_and(|p| p >= t) {
                return Err(bad(format!("block {m} is not strictly ascending")));
            }
            seen[t] = true;
            prev = Some(t);
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(bad(format!("round {missing} is not covered by any block")));
    }
    Ok(())
}

fn assemble_walk_table(
    seq: &GraphSequence,
    c: f64,
    seed: u64,
    blocks: Vec<(Vec<usize>, IndependenceSequence)>,
) -> Result<LossTable, AdversaryError> {
    let t_total = seq.len();
    let k = seq.num_actions();
    let mut preclip = vec![0.0f64; t_total * k];
    let mut block_metas = Vec::with_capacity(blocks.len());
    for (m, (rounds, iset)) in blocks.into_iter().enumerate() {
        let block_seed = seeding::mix(seed, m as u64);
        let (meta, rows) = walk_block(seq, c, block_seed, rounds, &iset, m)?;
        for (local, &global) in meta.rounds.iter().enumerate() {
            preclip[global * k..(global + 1) * k].copy_from_slice(&rows[local]);
        }
        block_metas.push(meta);
    }
    let losses: Vec<f64> = preclip.iter().map(|&a| clip(a)).collect();
    Ok(LossTable {
        rounds: t_total,
        num_actions: k,
        losses,
        meta: Some(TableMeta::Walk(WalkMeta {
            preclip,
            blocks: block_metas,
        })),
    })
}

// ---------------------------------------------------------------------------
// Bernoulli adversary
// ---------------------------------------------------------------------------

/// Bernoulli gap adversary: a hidden action drawn from the sequence-wide
/// independent set gets mean `0.5 - sqrt(beta/T)`, the rest of the set gets
/// mean `0.5`, and actions outside the set get loss 1 every round.
pub fn bernoulli_adversary(seq: &GraphSequence, seed: u64) -> Result<LossTable, AdversaryError> {
    let iset = measures::independence_sequence(seq, &exact_options())?;
    bernoulli_adversary_with(seq, seed, &iset)
}

pub fn bernoulli_adversary_with(
    seq: &GraphSequence,
    seed: u64,
    iset: &IndependenceSequence,
) -> Result<LossTable, AdversaryError> {
    let rounds = seq.len();
    let k = seq.num_actions();
    if rounds == 0 {
        return Err(AdversaryError::EmptyTable);
    }
    let eps = ((iset.beta as f64) / (rounds as f64)).sqrt();
    if eps > 0.5 {
        return Err(AdversaryError::EpsilonTooLarge { eps });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    // Draw order: hidden action first, then per round the coins of the
    // independent-set actions in ascending order. Actions outside the set are
    // deterministic and consume no randomness.
    let hidden = iset.set[rng.random_range(0..iset.set.len())];
    let mut in_set = vec![false; k];
    for &i in &iset.set {
        in_set[i] = true;
    }
    let mut losses = Vec::with_capacity(rounds * k);
    for _ in 0..rounds {
        let mut row = vec![1.0f64; k];
        for &i in &iset.set {
            let p_loss = if i == hidden { 0.5 - eps } else { 0.5 };
            row[i] = if rng.random::<f64>() < p_loss { 1.0 } else { 0.0 };
        }
        losses.extend_from_slice(&row);
    }
    Ok(LossTable {
        rounds,
        num_actions: k,
        losses,
        meta: Some(TableMeta::Bernoulli(BernoulliMeta {
            hidden_action: hidden,
            eps,
            independent_set: iset.set.clone(),
        })),
    })
}

// ---------------------------------------------------------------------------
// Fixed tables
// ---------------------------------------------------------------------------

/// Wraps an explicit table verbatim after validating the `[0, 1]` range.
pub fn fixed_table_adversary(rows: Vec<Vec<f64>>) -> Result<LossTable, AdversaryError> {
    let rounds = rows.len();
    let k = rows.first().map(|r| r.len()).unwrap_or(0);
    if rounds == 0 || k == 0 {
        return Err(AdversaryError::EmptyTable);
    }
    let mut losses = Vec::with_capacity(rounds * k);
    for (t, row) in rows.iter().enumerate() {
        if row.len() != k {
            return Err(AdversaryError::EmptyTable);
        }
        for (i, &value) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(AdversaryError::LossOutOfRange { t: t + 1, i, value });
            }
            losses.push(value);
        }
    }
    Ok(LossTable {
        rounds,
        num_actions: k,
        losses,
        meta: None,
    })
}

/// All-constant table, handy for tests and engine identities.
pub fn constant_table(rounds: usize, k: usize, value: f64) -> Result<LossTable, AdversaryError> {
    fixed_table_adversary(vec![vec![value; k]; rounds])
}

// ---------------------------------------------------------------------------
// CSV / JSON serialization
// ---------------------------------------------------------------------------

/// Writes the table as CSV with header `t,i,loss`; `t` is 1-based, `i` is a
/// 0-based action index, and losses use the shortest round-trip float format.
pub fn write_table_csv(table: &LossTable, out: &mut impl Write) -> Result<(), AdversaryError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "i", "loss"])
        .map_err(csv_io_error)?;
    for t in 0..table.rounds {
        for i in 0..table.num_actions {
            w.write_record([
                (t + 1).to_string(),
                i.to_string(),
                table.loss(t, i).to_string(),
            ])
            .map_err(csv_io_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_io_error(e: csv::Error) -> AdversaryError {
    AdversaryError::Csv {
        line: 0,
        message: e.to_string(),
    }
}

/// Reads a table written by [`write_table_csv`]. Rows may arrive in any
/// order, but every `(t, i)` cell must appear exactly once.
pub fn read_table_csv(input: &mut impl BufRead) -> Result<LossTable, AdversaryError> {
    let mut lines = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if idx == 0 {
            let header = line.trim();
            if header != "t,i,loss" {
                return Err(AdversaryError::Csv {
                    line: 1,
                    message: format!("expected header \"t,i,loss\", got {header:?}"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(AdversaryError::Csv {
                line: idx + 1,
                message: format!("expected 3 fields, got {}", parts.len()),
            });
        }
        let t: usize = parts[0].trim().parse().map_err(|_| AdversaryError::Csv {
            line: idx + 1,
            message: format!("bad round {:?}", parts[0]),
        })?;
        let i: usize = parts[1].trim().parse().map_err(|_| AdversaryError::Csv {
            line: idx + 1,
            message: format!("bad action {:?}", parts[1]),
        })?;
        let loss: f64 = parts[2].trim().parse().map_err(|_| AdversaryError::Csv {
            line: idx + 1,
            message: format!("bad loss {:?}", parts[2]),
        })?;
        if t == 0 {
            return Err(AdversaryError::Csv {
                line: idx + 1,
                message: "rounds are 1-based".into(),
            });
        }
        lines.push((idx + 1, t - 1, i, loss));
    }
    let rounds = lines.iter().map(|&(_, t, _, _)| t + 1).max().unwrap_or(0);
    let k = lines.iter().map(|&(_, _, i, _)| i + 1).max().unwrap_or(0);
    if rounds == 0 || k == 0 {
        return Err(AdversaryError::EmptyTable);
    }
    let mut losses = vec![f64::NAN; rounds * k];
    let mut filled = vec![false; rounds * k];
    for (line, t, i, loss) in lines {
        if !(0.0..=1.0).contains(&loss) {
            return Err(AdversaryError::LossOutOfRange {
                t: t + 1,
                i,
                value: loss,
            });
        }
        let idx = t * k + i;
        if filled[idx] {
            return Err(AdversaryError::Csv {
                line,
                message: format!("duplicate cell (t = {}, i = {i})", t + 1),
            });
        }
        filled[idx] = true;
        losses[idx] = loss;
    }
    if let Some(missing) = filled.iter().position(|&f| !f) {
        return Err(AdversaryError::Csv {
            line: 0,
            message: format!(
                "missing cell (t = {}, i = {})",
                missing / k + 1,
                missing % k
            ),
        });
    }
    Ok(LossTable {
        rounds,
        num_actions: k,
        losses,
        meta: None,
    })
}

/// Metadata as pretty JSON, when present.
pub fn meta_json(table: &LossTable) -> Option<String> {
    table
        .meta
        .as_ref()
        .map(|m| serde_json::to_string_pretty(m).expect("meta serializes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate_graph, FeedbackGraph, GraphKind};

    fn cliques_seq(rounds: usize) -> GraphSequence {
        let g = generate_graph(&GraphKind::CliquePartition { cliques: 5 }, 25, 0).unwrap();
        GraphSequence::fixed(g, rounds).unwrap()
    }

    #[test]
    fn delta_and_rho_examples() {
        assert_eq!(delta(12).unwrap(), 2);
        assert_eq!(rho(12).unwrap(), 8);
        assert_eq!(delta(1).unwrap(), 0);
        assert_eq!(rho(1).unwrap(), 0);
        for k in 0..=20 {
            assert_eq!(rho(1u64 << k).unwrap(), 0);
        }
        assert!(matches!(delta(0), Err(AdversaryError::ZeroRound)));
        assert!(matches!(rho(0), Err(AdversaryError::ZeroRound)));
    }

    #[test]
    fn rho_chain_examples() {
        assert_eq!(rho_chain(12).unwrap(), vec![12, 8, 0]);
        assert_eq!(rho_chain(7).unwrap(), vec![7, 6, 4, 0]);
        for t in 1..=4096u64 {
            let chain = rho_chain(t).unwrap();
            assert_eq!(chain.len() - 1, t.count_ones() as usize);
            assert_eq!(*chain.last().unwrap(), 0);
        }
    }

    #[test]
    fn walk_matches_chain_reconstruction() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let (y, w) = multiscale_walk(257, 0.01, &mut rng);
        for t in 1..=257usize {
            // Independent reconstruction: sum the steps over the chain, in
            // ascending round order (the same order the recursion folds them).
            let mut chain: Vec<u64> = rho_chain(t as u64).unwrap();
            chain.pop(); // drop the trailing 0
            chain.reverse();
            let mut acc = 0.0f64;
            for s in chain {
                acc += y[(s - 1) as usize];
            }
            assert_eq!(acc, w[t - 1], "round {t}");
        }
    }

    #[test]
    fn walk_parameters_match_reference_values() {
        // c = 0.35, beta = 5, T = 20000.
        let (eps1, eps2, sigma) = walk_parameters(0.35, 5, 20000);
        let expected =
            0.35f64.cbrt() * 5f64.cbrt() / 20000f64.cbrt() / (9.0 * 20000f64.log2());
        assert_eq!(eps1, expected);
        assert_eq!(eps1, eps2);
        assert!((eps1 - 3.45e-4).abs() < 1e-6);
        assert!((sigma - 1.0 / (9.0 * 20000f64.log2())).abs() < 1e-15);
    }

    #[test]
    fn walk_table_structure() {
        let seq = cliques_seq(64);
        let table = gaussian_walk_adversary(&seq, 0.35, 11).unwrap();
        let Some(TableMeta::Walk(meta)) = &table.meta else {
            panic!("walk table must carry walk meta");
        };
        assert_eq!(meta.blocks.len(), 1);
        let block = &meta.blocks[0];
        assert_eq!(block.independent_set, vec![0, 5, 10, 15, 20]);
        let x = block.best_action;
        assert!(block.independent_set.contains(&x));

        for t in 0..64 {
            // Clipping invariant.
            for i in 0..25 {
                assert_eq!(table.loss(t, i), table.preclip(t, i).unwrap().clamp(0.0, 1.0));
            }
            // Within the independent set (minus the best action) the pre-clip
            // loss has no action dependence.
            let inside: Vec<f64> = block
                .independent_set
                .iter()
                .filter(|&&i| i != x)
                .map(|&i| table.preclip(t, i).unwrap())
                .collect();
            for v in &inside {
                assert_eq!(*v, inside[0]);
            }
            // Per-round ordering and gap structure.
            let best = table.preclip(t, x).unwrap();
            for i in 0..25 {
                let v = table.preclip(t, i).unwrap();
                assert!(v >= best);
                if i != x {
                    if block.independent_set.contains(&i) {
                        assert!((v - best - block.eps1).abs() < 1e-12);
                    } else {
                        assert!((v - best - (block.eps1 + block.eps2)).abs() < 1e-12);
                        assert!(v >= inside[0]);
                    }
                }
            }
            // Formula reconstruction is bit-exact.
            let base = block.walk[t] + 0.5;
            for i in 0..25 {
                let expected = if i == x {
                    base - block.eps1
                } else if block.independent_set.contains(&i) {
                    base
                } else {
                    base + block.eps2
                };
                assert_eq!(table.preclip(t, i).unwrap(), expected);
            }
        }
    }

    #[test]
    fn walk_is_deterministic() {
        let seq = cliques_seq(32);
        let a = gaussian_walk_adversary(&seq, 0.35, 3).unwrap();
        let b = gaussian_walk_adversary(&seq, 0.35, 3).unwrap();
        let c = gaussian_walk_adversary(&seq, 0.35, 4).unwrap();
        assert_eq!(a.losses, b.losses);
        assert_ne!(a.losses, c.losses);
    }

    #[test]
    fn walk_rejects_degenerate_inputs() {
        let clique = GraphSequence::clique(4, 16).unwrap();
        assert!(matches!(
            gaussian_walk_adversary(&clique, 0.35, 0),
            Err(AdversaryError::BetaTooSmall { beta: 1 })
        ));
        let seq = cliques_seq(1);
        assert!(matches!(
            gaussian_walk_adversary(&seq, 0.35, 0),
            Err(AdversaryError::HorizonTooSmall { rounds: 1 })
        ));
        let seq = cliques_seq(8);
        assert!(matches!(
            gaussian_walk_adversary(&seq, 0.0, 0),
            Err(AdversaryError::InvalidScale { .. })
        ));
    }

    #[test]
    fn identity_split_is_bitwise_identical_to_walk() {
        let seq = cliques_seq(48);
        let walk = gaussian_walk_adversary(&seq, 0.35, 9).unwrap();
        let split = split_adversary(&seq, 0.35, 9, &[(0..48).collect()]).unwrap();
        assert_eq!(walk.losses, split.losses);
        let (Some(TableMeta::Walk(a)), Some(TableMeta::Walk(b))) = (&walk.meta, &split.meta)
        else {
            panic!("both tables carry walk meta");
        };
        assert_eq!(a.preclip, b.preclip);
        assert_eq!(a.blocks[0].best_action, b.blocks[0].best_action);
        assert_eq!(a.blocks[0].walk, b.blocks[0].walk);
    }

    #[test]
    fn two_block_split_has_independent_structures() {
        let seq = cliques_seq(40);
        let blocks: Vec<Vec<usize>> = vec![(0..20).collect(), (20..40).collect()];
        let table = split_adversary(&seq, 0.35, 21, &blocks).unwrap();
        let Some(TableMeta::Walk(meta)) = &table.meta else {
            panic!("split table must carry walk meta");
        };
        assert_eq!(meta.blocks.len(), 2);
        let total: usize = meta.blocks.iter().map(|b| b.rounds.len()).sum();
        assert_eq!(total, 40);
        assert_ne!(meta.blocks[0].steps, meta.blocks[1].steps);
        for block in &meta.blocks {
            // Per-block gap structure holds at the block's own rounds.
            let x = block.best_action;
            for (local, &global) in block.rounds.iter().enumerate() {
                let base = block.walk[local] + 0.5;
                assert_eq!(table.preclip(global, x).unwrap(), base - block.eps1);
            }
        }
    }

    #[test]
    fn split_rejects_bad_partitions_and_low_beta_blocks() {
        let seq = cliques_seq(10);
        let overlap: Vec<Vec<usize>> = vec![(0..6).collect(), (5..10).collect()];
        assert!(matches!(
            split_adversary(&seq, 0.35, 0, &overlap),
            Err(AdversaryError::BadBlocks { .. })
        ));
        let gap: Vec<Vec<usize>> = vec![(0..4).collect(), (5..10).collect()];
        assert!(matches!(
            split_adversary(&seq, 0.35, 0, &gap),
            Err(AdversaryError::BadBlocks { .. })
        ));

        let mixed = GraphSequence::varying(
            std::iter::repeat_with(|| FeedbackGraph::clique(4).unwrap())
                .take(4)
                .chain(std::iter::repeat_with(|| FeedbackGraph::mab(4).unwrap()).take(4))
                .collect(),
        )
        .unwrap();
        let blocks: Vec<Vec<usize>> = vec![(0..4).collect(), (4..8).collect()];
        match split_adversary(&mixed, 0.35, 0, &blocks) {
            Err(AdversaryError::BlockBetaTooSmall { block: 0, beta: 1 }) => {}
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn bernoulli_support_and_outside_rows() {
        let seq = GraphSequence::mab(4, 64).unwrap();
        let table = bernoulli_adversary(&seq, 123).unwrap();
        for t in 0..64 {
            for i in 0..4 {
                let v = table.loss(t, i);
                assert!(v == 0.0 || v == 1.0);
            }
        }

        // A graph where actions 2 and 3 are adjacent to everything via two
        // cliques; the independent set is {0, 2} joining one vertex per clique.
        let g = generate_graph(&GraphKind::CliquePartition { cliques: 2 }, 4, 0).unwrap();
        let seq = GraphSequence::fixed(g, 100).unwrap();
        let table = bernoulli_adversary(&seq, 5).unwrap();
        let Some(TableMeta::Bernoulli(meta)) = &table.meta else {
            panic!("bernoulli meta expected");
        };
        assert_eq!(meta.independent_set, vec![0, 2]);
        for t in 0..100 {
            for i in 0..4 {
                if !meta.independent_set.contains(&i) {
                    assert_eq!(table.loss(t, i), 1.0);
                }
            }
        }
    }

    #[test]
    fn bernoulli_and_split_are_deterministic() {
        let seq = GraphSequence::mab(4, 64).unwrap();
        let a = bernoulli_adversary(&seq, 9).unwrap();
        let b = bernoulli_adversary(&seq, 9).unwrap();
        let c = bernoulli_adversary(&seq, 10).unwrap();
        assert_eq!(a.losses, b.losses);
        assert_ne!(a.losses, c.losses);

        let seq = cliques_seq(24);
        let blocks: Vec<Vec<usize>> = vec![(0..12).collect(), (12..24).collect()];
        let a = split_adversary(&seq, 0.35, 4, &blocks).unwrap();
        let b = split_adversary(&seq, 0.35, 4, &blocks).unwrap();
        assert_eq!(a.losses, b.losses);
    }

    #[test]
    fn bernoulli_rejects_large_eps() {
        // beta = 4, T = 8 gives eps = sqrt(0.5) > 0.5.
        let seq = GraphSequence::mab(4, 8).unwrap();
        assert!(matches!(
            bernoulli_adversary(&seq, 0),
            Err(AdversaryError::EpsilonTooLarge { .. })
        ));
    }

    #[test]
    fn bernoulli_hidden_arm_mean() {
        let rounds = 100_000;
        let seq = GraphSequence::mab(4, rounds).unwrap();
        let table = bernoulli_adversary(&seq, 77).unwrap();
        let Some(TableMeta::Bernoulli(meta)) = &table.meta else {
            panic!();
        };
        let mean = table.column_sum(meta.hidden_action) / rounds as f64;
        let target = 0.5 - meta.eps;
        let tol = 3.0 * (0.25 / rounds as f64).sqrt();
        assert!(
            (mean - target).abs() <= tol,
            "mean {mean} vs target {target} (tol {tol})"
        );
    }

    #[test]
    fn fixed_table_validation() {
        let table = fixed_table_adversary(vec![vec![0.0, 1.0], vec![0.5, 0.25]]).unwrap();
        assert_eq!(table.rounds(), 2);
        assert_eq!(table.loss(1, 1), 0.25);
        match fixed_table_adversary(vec![vec![0.0, 1.5]]) {
            Err(AdversaryError::LossOutOfRange { t: 1, i: 1, value }) => {
                assert_eq!(value, 1.5);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(fixed_table_adversary(vec![]).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let seq = cliques_seq(16);
        let table = gaussian_walk_adversary(&seq, 0.35, 42).unwrap();
        let mut buf = Vec::new();
        write_table_csv(&table, &mut buf).unwrap();
        let parsed = read_table_csv(&mut std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(parsed.rounds(), table.rounds());
        assert_eq!(parsed.num_actions(), table.num_actions());
        assert_eq!(parsed.losses, table.losses);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let text = "t,i,loss\n1,0,0.5\n1,0,0.6\n";
        match read_table_csv(&mut std::io::Cursor::new(text)) {
            Err(AdversaryError::Csv { line: 3, message }) => {
                assert!(message.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = "wrong,header\n";
        assert!(matches!(
            read_table_csv(&mut std::io::Cursor::new(text)),
            Err(AdversaryError::Csv { line: 1, .. })
        ));
        let text = "t,i,loss\n1,0,0.5\n2,1,0.5\n";
        assert!(read_table_csv(&mut std::io::Cursor::new(text)).is_err());
    }

    #[test]
    fn meta_json_round_trips() {
        let seq = cliques_seq(8);
        let table = gaussian_walk_adversary(&seq, 0.35, 1).unwrap();
        let json = meta_json(&table).unwrap();
        let parsed: TableMeta = serde_json::from_str(&json).unwrap();
        match (parsed, table.meta.unwrap()) {
            (TableMeta::Walk(a), TableMeta::Walk(b)) => {
                assert_eq!(a.preclip, b.preclip);
                assert_eq!(a.blocks[0].steps, b.blocks[0].steps);
            }
            _ => panic!("expected walk meta"),
        }
    }
}
