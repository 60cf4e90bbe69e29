//! Independent enumeration oracles shared by the integration tests.
//!
//! Everything here recomputes quantities by brute force, independent of the
//! branch-and-bound and reduction paths in the library.

use std::collections::HashSet;

use banditsim::graphs::FeedbackGraph;

/// True when the masked vertex set is independent (no non-loop edge in either
/// direction between members).
pub fn mask_is_independent(g: &FeedbackGraph, mask: u64) -> bool {
    let members: Vec<usize> = (0..g.num_actions())
        .filter(|&v| mask & (1 << v) != 0)
        .collect();
    members
        .iter()
        .all(|&u| members.iter().all(|&v| !g.adjacent(u, v)))
}

/// True when the masked vertex set induces an acyclic subgraph, self-loops
/// ignored (repeated sink elimination).
pub fn mask_is_acyclic(g: &FeedbackGraph, mask: u64) -> bool {
    let k = g.num_actions();
    let mut in_set = vec![false; k];
    let mut active = Vec::new();
    for (v, flag) in in_set.iter_mut().enumerate() {
        if mask & (1 << v) != 0 {
            *flag = true;
            active.push(v);
        }
    }
    loop {
        let before = active.len();
        active.retain(|&v| {
            let has_out = g.out_neighbors(v).iter().any(|&w| w != v && in_set[w]);
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

/// Independence number by full subset enumeration.
pub fn alpha_by_enumeration(g: &FeedbackGraph) -> usize {
    let k = g.num_actions();
    assert!(k <= 20, "enumeration oracle is for small graphs");
    (0u64..(1 << k))
        .filter(|&m| mask_is_independent(g, m))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap()
}

/// Maximum induced acyclic set size by full subset enumeration.
pub fn mas_by_enumeration(g: &FeedbackGraph) -> usize {
    let k = g.num_actions();
    assert!(k <= 20, "enumeration oracle is for small graphs");
    (0u64..(1 << k))
        .filter(|&m| mask_is_acyclic(g, m))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap()
}

/// All maximal independent sets of `g` as bitmasks.
pub fn maximal_independent_sets(g: &FeedbackGraph) -> Vec<u64> {
    let k = g.num_actions();
    assert!(k <= 16);
    let mut sets = Vec::new();
    'mask: for mask in 0u64..(1 << k) {
        if !mask_is_independent(g, mask) {
            continue;
        }
        for v in 0..k {
            if mask & (1 << v) == 0 && mask_is_independent(g, mask | (1 << v)) {
                continue 'mask; // extensible, not maximal
            }
        }
        sets.push(mask);
    }
    sets
}

/// Sequence-wide independence number by direct tuple maximization: fold the
/// per-graph maximal independent sets, intersecting and deduplicating.
pub fn beta_by_tuple_enumeration(graphs: &[&FeedbackGraph]) -> usize {
    assert!(!graphs.is_empty());
    let mut candidates: HashSet<u64> = maximal_independent_sets(graphs[0]).into_iter().collect();
    for g in &graphs[1..] {
        let sets = maximal_independent_sets(g);
        let mut next = HashSet::new();
        for &c in &candidates {
            for &m in &sets {
                next.insert(c & m);
            }
        }
        candidates = next;
    }
    candidates
        .into_iter()
        .map(|c| c.count_ones() as usize)
        .max()
        .unwrap()
}
