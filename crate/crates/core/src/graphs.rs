//! Feedback graphs and graph sequences.
//!
//! A feedback graph over `K` actions is a directed graph where an edge
//! `u -> v` means that playing `u` reveals the loss of `v` that round. Every
//! action always observes its own loss, so self-loops are mandatory;
//! constructors, generators, and the parser force them rather than erroring.
//!
//! Graphs and sequences are immutable after construction and safe to share
//! across concurrent simulation runs.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("number of actions must be at least 1, got {k}")]
    InvalidActionCount { k: usize },
    #[error("edge probability must lie in [0, 1], got {p}")]
    InvalidProbability { p: f64 },
    #[error("clique count must lie in 1..={k}, got {alpha}")]
    InvalidCliqueCount { alpha: usize, k: usize },
    #[error("action {action} out of range for {k} actions")]
    ActionOutOfRange { action: usize, k: usize },
    #[error("graph sequence must not be empty")]
    EmptySequence,
    #[error("all graphs in a sequence must share the action count: expected {expected}, found {found}")]
    MixedActionCounts { expected: usize, found: usize },
    #[error("union of an empty graph collection is undefined")]
    EmptyUnion,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown graph spec {spec:?}: {message}")]
    BadSpec { spec: String, message: String },
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

// ---------------------------------------------------------------------------
// FeedbackGraph
// ---------------------------------------------------------------------------

/// Directed observation graph over `K` actions with mandatory self-loops.
///
/// `out_neighbors(i)` is the set `S(i)` of actions whose losses are revealed
/// when `i` is played; `in_neighbors(i)` is the precomputed reverse adjacency
/// used for observation probabilities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackGraph {
    k: usize,
    out: Vec<BTreeSet<usize>>,
    #[serde(skip)]
    ins: Vec<Vec<usize>>,
}

impl FeedbackGraph {
    /// Builds a graph from directed edges, forcing all self-loops.
    pub fn new(
        k: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if k == 0 {
            return Err(GraphError::InvalidActionCount { k });
        }
        let mut out: Vec<BTreeSet<usize>> = (0..k).map(|i| BTreeSet::from([i])).collect();
        for (u, v) in edges {
            if u >= k {
                return Err(GraphError::ActionOutOfRange { action: u, k });
            }
            if v >= k {
                return Err(GraphError::ActionOutOfRange { action: v, k });
            }
            out[u].insert(v);
        }
        Ok(Self::from_out_sets(k, out))
    }

    fn from_out_sets(k: usize, out: Vec<BTreeSet<usize>>) -> Self {
        let mut ins: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (u, targets) in out.iter().enumerate() {
            for &v in targets {
                ins[v].push(u);
            }
        }
        // BTreeSet iteration is ascending in u, so each ins[v] is sorted.
        Self { k, out, ins }
    }

    /// Bandit feedback: only self-loops.
    pub fn mab(k: usize) -> Result<Self, GraphError> {
        Self::new(k, std::iter::empty())
    }

    /// Full information: every action reveals every loss.
    pub fn clique(k: usize) -> Result<Self, GraphError> {
        if k == 0 {
            return Err(GraphError::InvalidActionCount { k });
        }
        let all: BTreeSet<usize> = (0..k).collect();
        Ok(Self::from_out_sets(k, vec![all; k]))
    }

    pub fn num_actions(&self) -> usize {
        self.k
    }

    /// The revealed set `S(i)`.
    pub fn out_neighbors(&self, i: usize) -> &BTreeSet<usize> {
        &self.out[i]
    }

    /// Actions `j` with `i` in `S(j)`, ascending.
    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.ins[i]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u].contains(&v)
    }

    /// All directed edges including self-loops, source-major ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, targets)| targets.iter().map(move |&v| (u, v)))
    }

    /// Number of non-loop directed edges.
    pub fn non_loop_edge_count(&self) -> usize {
        self.edges().filter(|&(u, v)| u != v).count()
    }

    /// True when `u -> v` implies `v -> u` for all non-loop edges.
    pub fn is_symmetric(&self) -> bool {
        self.edges()
            .filter(|&(u, v)| u != v)
            .all(|(u, v)| self.has_edge(v, u))
    }

    pub fn is_mab(&self) -> bool {
        self.out.iter().all(|s| s.len() == 1)
    }

    pub fn is_clique(&self) -> bool {
        self.out.iter().all(|s| s.len() == self.k)
    }

    /// Two actions are adjacent when a non-loop edge exists in either
    /// direction; this is the adjacency used by all independence measures.
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        u != v && (self.has_edge(u, v) || self.has_edge(v, u))
    }
}

/// Edge-set union of a non-empty collection of graphs on the same actions.
pub fn union_of<'a>(
    graphs: impl IntoIterator<Item = &'a FeedbackGraph>,
) -> Result<FeedbackGraph, GraphError> {
    let mut iter = graphs.into_iter();
    let first = iter.next().ok_or(GraphError::EmptyUnion)?;
    let k = first.k;
    let mut out = first.out.clone();
    for g in iter {
        if g.k != k {
            return Err(GraphError::MixedActionCounts {
                expected: k,
                found: g.k,
            });
        }
        for (u, targets) in g.out.iter().enumerate() {
            out[u].extend(targets.iter().copied());
        }
    }
    Ok(FeedbackGraph::from_out_sets(k, out))
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Single-graph generator families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GraphKind {
    /// Self-loops only.
    Mab,
    /// Undirected clique.
    Clique,
    /// Each ordered non-loop pair drawn independently with probability `p`;
    /// with `symmetric`, each unordered pair is drawn once and added in both
    /// directions.
    Erdos { p: f64, symmetric: bool },
    /// Disjoint union of `cliques` cliques of size `ceil(K / cliques)`; its
    /// independence number is exactly `cliques`.
    CliquePartition { cliques: usize },
}

/// Generates a feedback graph; a pure function of `(kind, k, seed)`.
pub fn generate_graph(kind: &GraphKind, k: usize, seed: u64) -> Result<FeedbackGraph, GraphError> {
    if k == 0 {
        return Err(GraphError::InvalidActionCount { k });
    }
    match *kind {
        GraphKind::Mab => FeedbackGraph::mab(k),
        GraphKind::Clique => FeedbackGraph::clique(k),
        GraphKind::Erdos { p, symmetric } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(GraphError::InvalidProbability { p });
            }
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            if symmetric {
                for u in 0..k {
                    for v in (u + 1)..k {
                        if rng.random::<f64>() < p {
                            edges.push((u, v));
                            edges.push((v, u));
                        }
                    }
                }
            } else {
                for u in 0..k {
                    for v in 0..k {
                        if u != v && rng.random::<f64>() < p {
                            edges.push((u, v));
                        }
                    }
                }
            }
            FeedbackGraph::new(k, edges)
        }
        GraphKind::CliquePartition { cliques } => {
            if cliques == 0 || cliques > k {
                return Err(GraphError::InvalidCliqueCount { alpha: cliques, k });
            }
            let size = k.div_ceil(cliques);
            let mut edges = Vec::new();
            for start in (0..k).step_by(size) {
                let end = (start + size).min(k);
                for u in start..end {
                    for v in start..end {
                        if u != v {
                            edges.push((u, v));
                        }
                    }
                }
            }
            FeedbackGraph::new(k, edges)
        }
    }
}

/// Parses a generator spec string such as `mab:k=5`, `clique:k=25`,
/// `cliques:k=25,alpha=5`, `erdos:k=10,p=0.2,seed=3`, or
/// `erdos-sym:k=10,p=0.5`.
pub fn parse_generator_spec(spec: &str) -> Result<(GraphKind, usize, u64), GraphError> {
    let bad = |message: &str| GraphError::BadSpec {
        spec: spec.to_string(),
        message: message.to_string(),
    };
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n.trim(), r.trim()),
        None => (spec.trim(), ""),
    };
    let mut k = None;
    let mut p = None;
    let mut alpha = None;
    let mut seed = 0u64;
    for part in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad("parameters must look like key=value"))?;
        match key.trim() {
            "k" | "K" => {
                k = Some(value.trim().parse::<usize>().map_err(|_| bad("bad k"))?);
            }
            "p" => p = Some(value.trim().parse::<f64>().map_err(|_| bad("bad p"))?),
            "alpha" => {
                alpha = Some(
                    value
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| bad("bad alpha"))?,
                );
            }
            "seed" => seed = value.trim().parse::<u64>().map_err(|_| bad("bad seed"))?,
            other => {
                return Err(GraphError::BadSpec {
                    spec: spec.to_string(),
                    message: format!("unknown parameter {other:?}"),
                });
            }
        }
    }
    let k = k.ok_or_else(|| bad("missing k"))?;
    let kind = match name {
        "mab" => GraphKind::Mab,
        "clique" => GraphKind::Clique,
        "cliques" => GraphKind::CliquePartition {
            cliques: alpha.ok_or_else(|| bad("cliques requires alpha"))?,
        },
        "erdos" => GraphKind::Erdos {
            p: p.ok_or_else(|| bad("erdos requires p"))?,
            symmetric: false,
        },
        "erdos-sym" => GraphKind::Erdos {
            p: p.ok_or_else(|| bad("erdos-sym requires p"))?,
            symmetric: true,
        },
        other => {
            return Err(GraphError::BadSpec {
                spec: spec.to_string(),
                message: format!("unknown generator {other:?}"),
            });
        }
    };
    Ok((kind, k, seed))
}

// ---------------------------------------------------------------------------
// Graph file format
// ---------------------------------------------------------------------------

/// Parse result: the graph plus warnings (currently only missing self-loops).
#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: FeedbackGraph,
    pub warnings: Vec<String>,
}

/// Parses the text graph format.
///
/// The first non-comment line is `K <int>`; every further line is `u -> v`
/// (directed) or `u -- v` (both directions). `#` starts a comment and blank
/// lines are skipped. Self-loop lines are optional; missing ones are inserted
/// with a warning.
pub fn parse_graph(text: &str) -> Result<ParsedGraph, GraphError> {
    let mut k: Option<usize> = None;
    let mut k_line = 0usize;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut explicit_loops: BTreeSet<usize> = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.split_once('#') {
            Some((before, _)) => before.trim(),
            None => raw.trim(),
        };
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('K') {
            let rest = rest.trim();
            if let Ok(value) = rest.parse::<usize>() {
                if k.is_some() {
                    return Err(parse_err(
                        line_no,
                        format!("duplicate K header (first seen on line {k_line})"),
                    ));
                }
                if value == 0 {
                    return Err(parse_err(line_no, "K must be at least 1"));
                }
                k = Some(value);
                k_line = line_no;
                continue;
            }
        }
        let k = k.ok_or_else(|| parse_err(line_no, "expected header \"K <int>\" before edges"))?;
        let (u, v, both) = parse_edge_line(line, line_no)?;
        for action in [u, v] {
            if action >= k {
                return Err(parse_err(
                    line_no,
                    format!("action index {action} out of range for K = {k}"),
                ));
            }
        }
        if u == v {
            explicit_loops.insert(u);
        }
        edges.push((u, v));
        if both {
            edges.push((v, u));
        }
    }

    let k = k.ok_or_else(|| parse_err(text.lines().count().max(1), "missing \"K <int>\" header"))?;
    let graph = FeedbackGraph::new(k, edges)?;
    let missing: Vec<usize> = (0..k).filter(|i| !explicit_loops.contains(i)).collect();
    let mut warnings = Vec::new();
    if !missing.is_empty() {
        warnings.push(format!(
            "inserted missing self-loops for {} action(s): {missing:?}",
            missing.len()
        ));
    }
    Ok(ParsedGraph { graph, warnings })
}

fn parse_edge_line(line: &str, line_no: usize) -> Result<(usize, usize, bool), GraphError> {
    let (lhs, rhs, both) = if let Some((l, r)) = line.split_once("->") {
        (l, r, false)
    } else if let Some((l, r)) = line.split_once("--") {
        (l, r, true)
    } else {
        return Err(parse_err(
            line_no,
            format!("expected \"u -> v\" or \"u -- v\", got {line:?}"),
        ));
    };
    let u = lhs
        .trim()
        .parse::<usize>()
        .map_err(|_| parse_err(line_no, format!("bad source action {:?}", lhs.trim())))?;
    let v = rhs
        .trim()
        .parse::<usize>()
        .map_err(|_| parse_err(line_no, format!("bad target action {:?}", rhs.trim())))?;
    Ok((u, v, both))
}

/// Serializes a graph in the text format; `parse_graph` round-trips it.
pub fn serialize_graph(g: &FeedbackGraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "K {}", g.num_actions());
    for (u, v) in g.edges() {
        let _ = writeln!(s, "{u} -> {v}");
    }
    s
}

// ---------------------------------------------------------------------------
// GraphSequence
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceKind {
    Mab,
    Clique,
    FixedSymmetric,
    FixedDirected,
    TimeVarying,
}

impl SequenceKind {
    pub fn label(&self) -> &'static str {
        match self {
            SequenceKind::Mab => "mab",
            SequenceKind::Clique => "clique",
            SequenceKind::FixedSymmetric => "fixed-symmetric",
            SequenceKind::FixedDirected => "fixed-directed",
            SequenceKind::TimeVarying => "time-varying",
        }
    }

    /// Fixed sequences (including the MAB and clique special cases) repeat one
    /// graph for every round.
    pub fn is_fixed(&self) -> bool {
        !matches!(self, SequenceKind::TimeVarying)
    }
}

/// Ordered feedback graphs `G_1..G_T`, all on the same actions.
///
/// Fixed sequences share one graph allocation, so long horizons stay cheap.
#[derive(Debug, Clone)]
pub struct GraphSequence {
    kind: SequenceKind,
    graphs: Vec<Arc<FeedbackGraph>>,
}

fn fixed_kind(g: &FeedbackGraph) -> SequenceKind {
    if g.is_mab() {
        SequenceKind::Mab
    } else if g.is_clique() {
        SequenceKind::Clique
    } else if g.is_symmetric() {
        SequenceKind::FixedSymmetric
    } else {
        SequenceKind::FixedDirected
    }
}

impl GraphSequence {
    /// Repeats one graph for `rounds` rounds; the kind is inferred.
    pub fn fixed(graph: FeedbackGraph, rounds: usize) -> Result<Self, GraphError> {
        if rounds == 0 {
            return Err(GraphError::EmptySequence);
        }
        let kind = fixed_kind(&graph);
        let shared = Arc::new(graph);
        Ok(Self {
            kind,
            graphs: vec![shared; rounds],
        })
    }

    pub fn mab(k: usize, rounds: usize) -> Result<Self, GraphError> {
        Self::fixed(FeedbackGraph::mab(k)?, rounds)
    }

    pub fn clique(k: usize, rounds: usize) -> Result<Self, GraphError> {
        Self::fixed(FeedbackGraph::clique(k)?, rounds)
    }

    /// Builds a time-varying sequence from per-round graphs.
    pub fn varying(graphs: Vec<FeedbackGraph>) -> Result<Self, GraphError> {
        let first_k = graphs.first().ok_or(GraphError::EmptySequence)?.k;
        for g in &graphs {
            if g.k != first_k {
                return Err(GraphError::MixedActionCounts {
                    expected: first_k,
                    found: g.k,
                });
            }
        }
        Ok(Self {
            kind: SequenceKind::TimeVarying,
            graphs: graphs.into_iter().map(Arc::new).collect(),
        })
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn num_actions(&self) -> usize {
        self.graphs[0].k
    }

    /// Graph of round `t0 + 1` (0-based index).
    pub fn graph(&self, t0: usize) -> &FeedbackGraph {
        &self.graphs[t0]
    }

    pub fn graphs(&self) -> impl Iterator<Item = &FeedbackGraph> {
        self.graphs.iter().map(|g| g.as_ref())
    }

    /// Deduplicated per-round graphs as `(graph, occurrences)` in first-seen
    /// order. Fixed sequences yield a single entry.
    pub fn unique_graphs(&self) -> Vec<(&FeedbackGraph, Vec<usize>)> {
        let mut seen: Vec<(*const FeedbackGraph, usize)> = Vec::new();
        let mut result: Vec<(&FeedbackGraph, Vec<usize>)> = Vec::new();
        for (t, g) in self.graphs.iter().enumerate() {
            let ptr = Arc::as_ptr(g);
            match seen.iter().find(|(p, _)| *p == ptr) {
                Some(&(_, idx)) => result[idx].1.push(t),
                None => {
                    seen.push((ptr, result.len()));
                    result.push((g.as_ref(), vec![t]));
                }
            }
        }
        result
    }

    /// Sub-sequence restricted to the given ascending 0-based rounds.
    pub fn subsequence(&self, rounds: &[usize]) -> Result<GraphSequence, GraphError> {
        if rounds.is_empty() {
            return Err(GraphError::EmptySequence);
        }
        let mut graphs = Vec::with_capacity(rounds.len());
        for &t in rounds {
            let g = self
                .graphs
                .get(t)
                .ok_or(GraphError::ActionOutOfRange {
                    action: t,
                    k: self.graphs.len(),
                })?
                .clone();
            graphs.push(g);
        }
        let kind = if graphs
            .iter()
            .all(|g| Arc::ptr_eq(g, &graphs[0]) || **g == *graphs[0])
        {
            fixed_kind(&graphs[0])
        } else {
            SequenceKind::TimeVarying
        };
        Ok(GraphSequence { kind, graphs })
    }

    /// Edge-set union over the whole sequence.
    pub fn union_graph(&self) -> FeedbackGraph {
        let mut unique = self.unique_graphs().into_iter().map(|(g, _)| g);
        let first = unique.next().expect("sequences are non-empty");
        union_of(std::iter::once(first).chain(unique)).expect("same action count by construction")
    }
}

// ---------------------------------------------------------------------------
// SequenceSpec
// ---------------------------------------------------------------------------

/// Buildable description of a graph sequence, used by configs and the CLI.
#[derive(Debug, Clone)]
pub enum SequenceSpec {
    /// One generated graph repeated every round.
    Generated {
        kind: GraphKind,
        num_actions: usize,
        graph_seed: u64,
    },
    /// One concrete graph (for example file-loaded) repeated every round.
    Fixed { graph: Arc<FeedbackGraph> },
    /// Explicit graphs cycled to fill the horizon.
    Cycled { graphs: Vec<Arc<FeedbackGraph>> },
}

impl SequenceSpec {
    pub fn parse(spec: &str) -> Result<Self, GraphError> {
        let (kind, num_actions, graph_seed) = parse_generator_spec(spec)?;
        Ok(SequenceSpec::Generated {
            kind,
            num_actions,
            graph_seed,
        })
    }

    pub fn num_actions(&self) -> Result<usize, GraphError> {
        match self {
            SequenceSpec::Generated { num_actions, .. } => Ok(*num_actions),
            SequenceSpec::Fixed { graph } => Ok(graph.num_actions()),
            SequenceSpec::Cycled { graphs } => graphs
                .first()
                .map(|g| g.num_actions())
                .ok_or(GraphError::EmptySequence),
        }
    }

    /// Materializes the sequence for a horizon of `rounds` rounds.
    pub fn materialize(&self, rounds: usize) -> Result<GraphSequence, GraphError> {
        if rounds == 0 {
            return Err(GraphError::EmptySequence);
        }
        match self {
            SequenceSpec::Generated {
                kind,
                num_actions,
                graph_seed,
            } => GraphSequence::fixed(generate_graph(kind, *num_actions, *graph_seed)?, rounds),
            SequenceSpec::Fixed { graph } => {
                let kind = fixed_kind(graph);
                Ok(GraphSequence {
                    kind,
                    graphs: vec![graph.clone(); rounds],
                })
            }
            SequenceSpec::Cycled { graphs } => {
                if graphs.is_empty() {
                    return Err(GraphError::EmptySequence);
                }
                let k = graphs[0].num_actions();
                for g in graphs.iter() {
                    if g.num_actions() != k {
                        return Err(GraphError::MixedActionCounts {
                            expected: k,
                            found: g.num_actions(),
                        });
                    }
                }
                if graphs.len() == 1 {
                    let kind = fixed_kind(&graphs[0]);
                    return Ok(GraphSequence {
                        kind,
                        graphs: vec![graphs[0].clone(); rounds],
                    });
                }
                let seq: Vec<Arc<FeedbackGraph>> = (0..rounds)
                    .map(|t| graphs[t % graphs.len()].clone())
                    .collect();
                Ok(GraphSequence {
                    kind: SequenceKind::TimeVarying,
                    graphs: seq,
                })
            }
        }
    }
}
