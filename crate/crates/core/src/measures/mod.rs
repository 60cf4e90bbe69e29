//! Graph-combinatorics measures used by the adversaries and bound checks.
//!
//! For a single graph `G` the two quantities of interest are the independence
//! number `alpha(G)` (largest set of mutually non-adjacent actions, where
//! `i, j` count as adjacent if an edge exists in either direction) and
//! `mas(G)`, the largest vertex subset whose induced subgraph, ignoring
//! self-loops, contains no directed cycle. For a sequence `G_1..G_T` the
//! sequence-wide independence number `beta` is the largest set of actions
//! simultaneously independent in every graph; because independent sets are
//! downward closed this equals the independence number of the edge-union
//! graph, which is how it is computed here (the direct tuple enumeration is
//! kept as a test oracle only).
//!
//! Exact solvers are branch-and-bound over `u64` bitsets and refuse action
//! counts above a configurable limit; greedy variants handle any size.

mod exact;
mod split;

use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::graphs::{FeedbackGraph, GraphError, GraphSequence};

pub use split::{greedy_sequence_split, SequenceSplit};

use exact::{BitGraph, MasSolver, MisSolver};

/// Hard representation cap for the exact solvers (one `u64` bitset word).
pub const EXACT_HARD_LIMIT: usize = 64;

/// Controls on the exact branch-and-bound solvers.
#[derive(Debug, Clone)]
pub struct ExactOptions {
    /// Refuse exact computation above this many actions.
    pub max_k: usize,
    /// Abort a single solve when it exceeds this wall-clock budget.
    pub time_budget: Option<Duration>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            max_k: 24,
            time_budget: Some(Duration::from_secs(10)),
        }
    }
}

impl ExactOptions {
    /// Options with the limit raised to the hard cap; used by the harness,
    /// where graph families are known and the time budget is the guard.
    pub fn wide() -> Self {
        Self {
            max_k: EXACT_HARD_LIMIT,
            ..Self::default()
        }
    }

    fn check(&self, k: usize) -> Result<(), MeasureError> {
        if k > EXACT_HARD_LIMIT {
            return Err(MeasureError::TooManyActions { k });
        }
        if k > self.max_k.min(EXACT_HARD_LIMIT) {
            return Err(MeasureError::ExceedsExactLimit {
                k,
                max_k: self.max_k.min(EXACT_HARD_LIMIT),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error(
        "exact measures support up to {max_k} actions, got {k}; \
         use greedy_independent_set / greedy_mas for larger graphs"
    )]
    ExceedsExactLimit { k: usize, max_k: usize },
    #[error("exact measures are limited to {EXACT_HARD_LIMIT} actions, got {k}")]
    TooManyActions { k: usize },
    #[error("exact measure computation exceeded its time budget of {budget:?}")]
    TimeBudgetExceeded { budget: Duration },
    #[error("sequence measures need a non-empty sequence")]
    EmptySequence,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

// ---------------------------------------------------------------------------
// Exact single-graph measures
// ---------------------------------------------------------------------------

/// Size of a maximum independent set of `g`.
pub fn independence_number(g: &FeedbackGraph, opts: &ExactOptions) -> Result<usize, MeasureError> {
    opts.check(g.num_actions())?;
    let bits = BitGraph::from_graph(g);
    let mut solver = MisSolver::new(&bits, opts.time_budget);
    solver.max_size()
}

/// Lexicographically smallest maximum independent set of `g`.
pub fn max_independent_set(
    g: &FeedbackGraph,
    opts: &ExactOptions,
) -> Result<Vec<usize>, MeasureError> {
    opts.check(g.num_actions())?;
    let bits = BitGraph::from_graph(g);
    let mut solver = MisSolver::new(&bits, opts.time_budget);
    solver.lex_min_witness()
}

/// Size of a maximum induced acyclic vertex set of `g` (self-loops ignored).
pub fn mas_size(g: &FeedbackGraph, opts: &ExactOptions) -> Result<usize, MeasureError> {
    opts.check(g.num_actions())?;
    let bits = BitGraph::from_graph(g);
    let mut solver = MasSolver::new(&bits, opts.time_budget);
    solver.max_size()
}

/// Lexicographically smallest maximum induced acyclic vertex set of `g`.
pub fn max_acyclic_set(
    g: &FeedbackGraph,
    opts: &ExactOptions,
) -> Result<Vec<usize>, MeasureError> {
    opts.check(g.num_actions())?;
    let bits = BitGraph::from_graph(g);
    let mut solver = MasSolver::new(&bits, opts.time_budget);
    solver.lex_min_witness()
}

// ---------------------------------------------------------------------------
// Sequence measures
// ---------------------------------------------------------------------------

/// The sequence-wide independence number together with one witness set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceSequence {
    /// Largest number of actions simultaneously independent in every graph.
    pub beta: usize,
    /// Lexicographically smallest witness of that size.
    pub set: Vec<usize>,
}

/// Computes `beta` and its witness for a sequence as the maximum independent
/// set of the edge-union graph.
pub fn independence_sequence(
    seq: &GraphSequence,
    opts: &ExactOptions,
) -> Result<IndependenceSequence, MeasureError> {
    if seq.is_empty() {
        return Err(MeasureError::EmptySequence);
    }
    let union = seq.union_graph();
    let set = max_independent_set(&union, opts)?;
    Ok(IndependenceSequence {
        beta: set.len(),
        set,
    })
}

// ---------------------------------------------------------------------------
// Greedy fallbacks (any action count)
// ---------------------------------------------------------------------------

fn undirected_adjacency(g: &FeedbackGraph) -> Vec<Vec<usize>> {
    let k = g.num_actions();
    let mut adj = vec![Vec::new(); k];
    for (u, v) in g.edges() {
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Minimum-degree greedy independent set; size is a lower bound on the exact
/// independence number.
pub fn greedy_independent_set(g: &FeedbackGraph) -> Vec<usize> {
    let k = g.num_actions();
    let adj = undirected_adjacency(g);
    let mut alive = vec![true; k];
    let mut degree: Vec<usize> = adj.iter().map(|list| list.len()).collect();
    let mut chosen = Vec::new();
    loop {
        let mut pick: Option<usize> = None;
        for v in 0..k {
            if alive[v] && pick.is_none_or(|best| degree[v] < degree[best]) {
                pick = Some(v);
            }
        }
        let Some(v) = pick else { break };
        chosen.push(v);
        alive[v] = false;
        for &u in &adj[v] {
            if alive[u] {
                alive[u] = false;
                for &w in &adj[u] {
                    degree[w] = degree[w].saturating_sub(1);
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

fn induced_is_acyclic(out: &[Vec<usize>], members: &[usize], candidate: usize) -> bool {
    // Kahn's algorithm on the induced subgraph, self-loops ignored.
    let mut in_set: Vec<bool> = Vec::new();
    let n = out.len();
    in_set.resize(n, false);
    for &v in members {
        in_set[v] = true;
    }
    in_set[candidate] = true;
    let mut active: Vec<usize> = members.iter().copied().chain([candidate]).collect();
    loop {
        let before = active.len();
        active.retain(|&v| {
            let has_out = out[v].iter().any(|&w| w != v && in_set[w]);
            if !has_out {
                in_set[v] = false;
            }
            has_out
        });
        if active.is_empty() {
            return true;
        }
        if active.len() == before {
            return false;
        }
    }
}

/// Greedy induced-acyclic set: scans actions in ascending (degree, index)
/// order and keeps those that leave the induced subgraph acyclic. Size is a
/// lower bound on the exact `mas`.
pub fn greedy_mas(g: &FeedbackGraph) -> Vec<usize> {
    let k = g.num_actions();
    let mut out = vec![Vec::new(); k];
    let mut degree = vec![0usize; k];
    for (u, v) in g.edges() {
        if u != v {
            out[u].push(v);
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&v| (degree[v], v));
    let mut chosen: Vec<usize> = Vec::new();
    for v in order {
        if induced_is_acyclic(&out, &chosen, v) {
            chosen.push(v);
        }
    }
    chosen.sort_unstable();
    chosen
}

// ---------------------------------------------------------------------------
// Measure report
// ---------------------------------------------------------------------------

/// Per-sequence measure summary.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureReport {
    pub num_actions: usize,
    pub rounds: usize,
    pub kind: String,
    /// `alpha(G_t)` per round.
    pub alpha_per_graph: Vec<usize>,
    /// `mas(G_t)` per round.
    pub mas_per_graph: Vec<usize>,
    /// Order statistics `mas(G_(1)) >= ... >= mas(G_(T))`.
    pub mas_sorted_desc: Vec<usize>,
    /// Sequence-wide independence number.
    pub beta: usize,
    /// Witness set of size `beta`, independent in every graph.
    pub independence_sequence_set: Vec<usize>,
    /// True when greedy fallbacks were used (sizes are lower bounds).
    pub approximate: bool,
}

impl MeasureReport {
    /// Smallest `mas` in the sequence, i.e. the last order statistic.
    pub fn mas_min(&self) -> usize {
        *self.mas_sorted_desc.last().expect("non-empty sequence")
    }

    /// Aligned text rendering for the CLI.
    pub fn render_text(&self) -> String {
        fn join(values: &[usize]) -> String {
            let mut all: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            if all.len() > 16 {
                let tail = all.split_off(8);
                format!(
                    "{} ... {} ({} values)",
                    all.join(" "),
                    tail[tail.len() - 4..].join(" "),
                    values.len()
                )
            } else {
                all.join(" ")
            }
        }
        let set = self
            .independence_sequence_set
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        format!(
            "graphs:                   {}\n\
             actions (K):              {}\n\
             kind:                     {}\n\
             alpha per graph:          {}\n\
             mas per graph:            {}\n\
             mas sorted desc:          {}\n\
             beta:                     {}\n\
             independence sequence set: {{{}}}\n\
             method:                   {}\n",
            self.rounds,
            self.num_actions,
            self.kind,
            join(&self.alpha_per_graph),
            join(&self.mas_per_graph),
            join(&self.mas_sorted_desc),
            self.beta,
            set,
            if self.approximate {
                "greedy (lower bounds)"
            } else {
                "exact"
            }
        )
    }
}

/// Computes the full report. Uses exact solvers when the action count is
/// within `opts`; otherwise falls back to the greedy variants and marks the
/// report approximate.
pub fn measure_report(
    seq: &GraphSequence,
    opts: &ExactOptions,
) -> Result<MeasureReport, MeasureError> {
    if seq.is_empty() {
        return Err(MeasureError::EmptySequence);
    }
    let k = seq.num_actions();
    let rounds = seq.len();
    let exact = k <= opts.max_k.min(EXACT_HARD_LIMIT);

    let mut alpha_per_graph = vec![0usize; rounds];
    let mut mas_per_graph = vec![0usize; rounds];
    for (graph, occurrences) in seq.unique_graphs() {
        let (alpha, mas) = if exact {
            (
                independence_number(graph, opts)?,
                mas_size(graph, opts)?,
            )
        } else {
            (greedy_independent_set(graph).len(), greedy_mas(graph).len())
        };
        for t in occurrences {
            alpha_per_graph[t] = alpha;
            mas_per_graph[t] = mas;
        }
    }
    let mut mas_sorted_desc = mas_per_graph.clone();
    mas_sorted_desc.sort_unstable_by(|a, b| b.cmp(a));

    let (beta, set) = if exact {
        let is = independence_sequence(seq, opts)?;
        (is.beta, is.set)
    } else {
        let set = greedy_independent_set(&seq.union_graph());
        (set.len(), set)
    };

    Ok(MeasureReport {
        num_actions: k,
        rounds,
        kind: seq.kind().label().to_string(),
        alpha_per_graph,
        mas_per_graph,
        mas_sorted_desc,
        beta,
        independence_sequence_set: set,
        approximate: !exact,
    })
}
