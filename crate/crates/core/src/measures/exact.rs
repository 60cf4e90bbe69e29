//! Bitset branch-and-bound solvers for the exact measures.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::graphs::FeedbackGraph;

use super::MeasureError;

/// Bitset view of a feedback graph, self-loops stripped.
pub(super) struct BitGraph {
    pub k: usize,
    /// Undirected adjacency: bit `v` of `und[u]` set iff an edge exists
    /// between `u` and `v` in either direction.
    pub und: Vec<u64>,
    /// Directed non-loop out-edges.
    pub out: Vec<u64>,
}

impl BitGraph {
    pub fn from_graph(g: &FeedbackGraph) -> Self {
        let k = g.num_actions();
        debug_assert!(k <= 64);
        let mut und = vec![0u64; k];
        let mut out = vec![0u64; k];
        for (u, v) in g.edges() {
            if u != v {
                out[u] |= 1 << v;
                und[u] |= 1 << v;
                und[v] |= 1 << u;
            }
        }
        Self { k, und, out }
    }

    pub fn all_mask(&self) -> u64 {
        if self.k == 64 {
            u64::MAX
        } else {
            (1u64 << self.k) - 1
        }
    }
}

struct Deadline {
    deadline: Option<Instant>,
    budget: Duration,
    nodes: u64,
}

impl Deadline {
    fn new(budget: Option<Duration>) -> Self {
        Self {
            deadline: budget.map(|b| Instant::now() + b),
            budget: budget.unwrap_or_default(),
            nodes: 0,
        }
    }

    fn tick(&mut self) -> Result<(), MeasureError> {
        self.nodes += 1;
        if self.nodes & 0xFFF == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() > deadline {
                    return Err(MeasureError::TimeBudgetExceeded {
                        budget: self.budget,
                    });
                }
            }
        }
        Ok(())
    }
}

fn iter_bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

// ---------------------------------------------------------------------------
// Maximum independent set
// ---------------------------------------------------------------------------

pub(super) struct MisSolver<'a> {
    g: &'a BitGraph,
    deadline: Deadline,
}

impl<'a> MisSolver<'a> {
    pub fn new(g: &'a BitGraph, budget: Option<Duration>) -> Self {
        Self {
            g,
            deadline: Deadline::new(budget),
        }
    }

    /// Greedy minimum-degree lower bound within `cand`.
    fn greedy_size(&self, mut cand: u64) -> usize {
        let mut size = 0;
        while cand != 0 {
            let v = iter_bits(cand)
                .min_by_key(|&v| ((self.g.und[v] & cand).count_ones(), v))
                .expect("cand non-empty");
            size += 1;
            cand &= !(self.g.und[v] | (1 << v));
        }
        size
    }

    /// Matching-based upper bound: every edge of a matching inside `cand`
    /// forces at least one excluded endpoint.
    fn matching_bound(&self, cand: u64) -> usize {
        let mut unmatched = cand;
        let mut pairs = 0usize;
        while unmatched != 0 {
            let v = unmatched.trailing_zeros() as usize;
            unmatched &= !(1u64 << v);
            let partners = self.g.und[v] & unmatched;
            if partners != 0 {
                let u = partners.trailing_zeros() as usize;
                unmatched &= !(1u64 << u);
                pairs += 1;
            }
        }
        cand.count_ones() as usize - pairs
    }

    /// Max independent-set size within `cand`, assuming `size` already chosen;
    /// stops early once `target` is reached (when provided).
    fn search(
        &mut self,
        cand: u64,
        size: usize,
        best: &mut usize,
        target: Option<usize>,
    ) -> Result<(), MeasureError> {
        self.deadline.tick()?;
        if size > *best {
            *best = size;
        }
        if let Some(t) = target {
            if *best >= t {
                return Ok(());
            }
        }
        if cand == 0 || size + self.matching_bound(cand) <= *best {
            return Ok(());
        }
        // Branch on the highest-degree candidate; isolated vertices are free.
        let mut free = 0usize;
        let mut pivot = None;
        let mut pivot_deg = 0;
        for v in iter_bits(cand) {
            let deg = (self.g.und[v] & cand).count_ones();
            if deg == 0 {
                free += 1;
            } else if pivot.is_none() || deg > pivot_deg {
                pivot = Some(v);
                pivot_deg = deg;
            }
        }
        let Some(v) = pivot else {
            // All candidates are mutually non-adjacent.
            let total = size + free;
            if total > *best {
                *best = total;
            }
            return Ok(());
        };
        let bit = 1u64 << v;
        // Include v.
        self.search(cand & !(self.g.und[v] | bit), size + 1, best, target)?;
        // Exclude v.
        self.search(cand & !bit, size, best, target)
    }

    fn reaches(&mut self, cand: u64, base: usize, target: usize) -> Result<bool, MeasureError> {
        if base >= target {
            return Ok(true);
        }
        let mut best = base;
        self.search(cand, base, &mut best, Some(target))?;
        Ok(best >= target)
    }

    pub fn max_size(&mut self) -> Result<usize, MeasureError> {
        let all = self.g.all_mask();
        let mut best = self.greedy_size(all);
        self.search(all, 0, &mut best, None)?;
        Ok(best)
    }

    /// Lexicographically smallest maximum independent set, found by fixing the
    /// smallest feasible vertex at each position.
    pub fn lex_min_witness(&mut self) -> Result<Vec<usize>, MeasureError> {
        let alpha = self.max_size()?;
        let mut chosen: Vec<usize> = Vec::with_capacity(alpha);
        let mut cand = self.g.all_mask();
        while chosen.len() < alpha {
            let mut picked = None;
            for v in iter_bits(cand) {
                let bit = 1u64 << v;
                // Later elements must exceed v, so restrict to higher indices.
                let higher = cand & !((bit << 1).wrapping_sub(1));
                let rest = higher & !(self.g.und[v] | bit);
                if self.reaches(rest, chosen.len() + 1, alpha)? {
                    chosen.push(v);
                    cand = rest;
                    picked = Some(v);
                    break;
                }
            }
            debug_assert!(picked.is_some(), "witness reconstruction must progress");
            if picked.is_none() {
                break;
            }
        }
        Ok(chosen)
    }
}

// ---------------------------------------------------------------------------
// Maximum induced acyclic set
// ---------------------------------------------------------------------------

pub(super) struct MasSolver<'a> {
    g: &'a BitGraph,
    deadline: Deadline,
    acyclic_cache: HashMap<u64, bool>,
}

impl<'a> MasSolver<'a> {
    pub fn new(g: &'a BitGraph, budget: Option<Duration>) -> Self {
        Self {
            g,
            deadline: Deadline::new(budget),
            acyclic_cache: HashMap::new(),
        }
    }

    /// Topological-order test on the induced subgraph, memoized per mask.
    fn is_acyclic(&mut self, mask: u64) -> bool {
        if mask == 0 {
            return true;
        }
        if let Some(&v) = self.acyclic_cache.get(&mask) {
            return v;
        }
        let mut m = mask;
        loop {
            let mut removed = false;
            for v in iter_bits(m) {
                if self.g.out[v] & m == 0 {
                    m &= !(1u64 << v);
                    removed = true;
                }
            }
            if m == 0 {
                self.acyclic_cache.insert(mask, true);
                return true;
            }
            if !removed {
                self.acyclic_cache.insert(mask, false);
                return false;
            }
        }
    }

    fn greedy_size(&mut self, cand: u64) -> usize {
        let mut chosen = 0u64;
        let mut order: Vec<usize> = iter_bits(cand).collect();
        order.sort_by_key(|&v| ((self.g.und[v] & cand).count_ones(), v));
        for v in order {
            let next = chosen | (1u64 << v);
            if self.is_acyclic(next) {
                chosen = next;
            }
        }
        chosen.count_ones() as usize
    }

    fn search(
        &mut self,
        cand: u64,
        included: u64,
        best: &mut usize,
        target: Option<usize>,
    ) -> Result<(), MeasureError> {
        self.deadline.tick()?;
        let size = included.count_ones() as usize;
        if size > *best {
            *best = size;
        }
        if let Some(t) = target {
            if *best >= t {
                return Ok(());
            }
        }
        if cand == 0 || size + cand.count_ones() as usize <= *best {
            return Ok(());
        }
        // Branch on the candidate with the most edges among live vertices.
        let live = cand | included;
        let v = iter_bits(cand)
            .max_by_key(|&v| ((self.g.und[v] & live).count_ones(), std::cmp::Reverse(v)))
            .expect("cand non-empty");
        let bit = 1u64 << v;
        if self.is_acyclic(included | bit) {
            self.search(cand & !bit, included | bit, best, target)?;
        }
        self.search(cand & !bit, included, best, target)
    }

    fn reaches(&mut self, cand: u64, included: u64, target: usize) -> Result<bool, MeasureError> {
        if included.count_ones() as usize >= target {
            return Ok(true);
        }
        let mut best = included.count_ones() as usize;
        self.search(cand, included, &mut best, Some(target))?;
        Ok(best >= target)
    }

    pub fn max_size(&mut self) -> Result<usize, MeasureError> {
        let all = self.g.all_mask();
        let mut best = self.greedy_size(all);
        self.search(all, 0, &mut best, None)?;
        Ok(best)
    }

    pub fn lex_min_witness(&mut self) -> Result<Vec<usize>, MeasureError> {
        let mas = self.max_size()?;
        let mut chosen_mask = 0u64;
        let mut chosen: Vec<usize> = Vec::with_capacity(mas);
        let mut cand = self.g.all_mask();
        while chosen.len() < mas {
            let mut progressed = false;
            for v in iter_bits(cand) {
                let bit = 1u64 << v;
                if !self.is_acyclic(chosen_mask | bit) {
                    continue;
                }
                let higher = cand & !((bit << 1).wrapping_sub(1));
                if self.reaches(higher, chosen_mask | bit, mas)? {
                    chosen.push(v);
                    chosen_mask |= bit;
                    cand = higher;
                    progressed = true;
                    break;
                }
            }
            debug_assert!(progressed, "witness reconstruction must progress");
            if !progressed {
                break;
            }
        }
        Ok(chosen)
    }
}
