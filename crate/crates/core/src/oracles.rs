//! Brute-force solvers and independent checkers for tiny instances.
//!
//! These deliberately share as little code as possible with the main
//! algorithms: distances are recomputed with plain all-pairs BFS, spanner
//! validity is checked pair by pair, and optima come from exhaustive search
//! under an explicit search-space budget.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::graph::{Distance, EdgeId, Graph, VertexId};
use crate::label_cover::{LabelCoverInstance, Labeling, MinRepInstance, RepCover, Side, Symbol};
use crate::spanner::EdgeSubset;

/// Default cap on the number of candidates an exact solver may examine.
pub const DEFAULT_SEARCH_SPACE: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_search_space: u128,
    pub time_limit: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_search_space: DEFAULT_SEARCH_SPACE,
            time_limit: None,
        }
    }
}

struct Clock {
    start: Instant,
    limit: Option<Duration>,
    ticks: u64,
}

impl Clock {
    fn new(budget: &OracleBudget) -> Self {
        Clock {
            start: Instant::now(),
            limit: budget.time_limit,
            ticks: 0,
        }
    }

    fn tick(&mut self, what: &str) -> Result<()> {
        self.ticks += 1;
        if self.ticks.is_multiple_of(1024) {
            if let Some(limit) = self.limit {
                if self.start.elapsed() > limit {
                    return Err(Error::Timeout(format!("{what} exceeded {limit:?}")));
                }
            }
        }
        Ok(())
    }
}

fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    (0..exp).try_fold(1u128, |acc, _| acc.checked_mul(base))
}

fn binomial(n: usize, r: usize) -> Option<u128> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Advances `idx` to the next `r`-combination of `0..n` in lexicographic
/// order; false once exhausted.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let r = idx.len();
    let Some(pos) = (0..r).rev().find(|&i| idx[i] < n - r + i) else {
        return false;
    };
    idx[pos] += 1;
    for i in pos + 1..r {
        idx[i] = idx[i - 1] + 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactValue {
    pub value: Ratio<u64>,
    pub satisfied: usize,
    pub labeling: Labeling,
}

/// Exact Label Cover value.
///
/// Enumerates all labelings of the side with the smaller search space
/// `σ^|side|` (lexicographically, vertex 0 most significant) and, for each,
/// labels every vertex of the other side optimally on its own (lowest
/// symbol on ties). The first optimal labeling found is returned.
pub fn lc_value_exact(lc: &LabelCoverInstance, budget: &OracleBudget) -> Result<ExactValue> {
    let space = |side: Side| checked_pow(lc.sigma(side) as u128, lc.count(side)).unwrap_or(u128::MAX);
    let fixed = if space(Side::A) <= space(Side::B) { Side::A } else { Side::B };
    let free = match fixed {
        Side::A => Side::B,
        Side::B => Side::A,
    };
    let required = space(fixed);
    if required > budget.max_search_space {
        return Err(Error::resource("label cover search space", required, budget.max_search_space));
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); lc.count(free)];
    for (id, e) in lc.edges().iter().enumerate() {
        incident[match free {
            Side::A => e.a,
            Side::B => e.b,
        }]
        .push(id);
    }
    let mut clock = Clock::new(budget);
    let mut assignment: Vec<Symbol> = vec![0; lc.count(fixed)];
    let mut best: Option<(usize, Vec<Symbol>, Vec<Symbol>)> = None;
    loop {
        clock.tick("label cover search")?;
        let mut total = 0;
        let mut free_labels = Vec::with_capacity(lc.count(free));
        for edges in &incident {
            let mut best_sym = (0usize, 0 as Symbol);
            for s in 0..lc.sigma(free) {
                let count = edges
                    .iter()
                    .filter(|&&id| {
                        let e = &lc.edges()[id];
                        let rel = lc.relation(e);
                        match fixed {
                            Side::A => rel.contains(assignment[e.a], s),
                            Side::B => rel.contains(s, assignment[e.b]),
                        }
                    })
                    .count();
                if count > best_sym.0 {
                    best_sym = (count, s);
                }
            }
            total += best_sym.0;
            free_labels.push(best_sym.1);
        }
        if best.as_ref().is_none_or(|b| total > b.0) {
            best = Some((total, assignment.clone(), free_labels));
        }
        // Odometer increment, last vertex fastest.
        let sigma = lc.sigma(fixed);
        let Some(pos) = (0..assignment.len()).rev().find(|&i| assignment[i] + 1 < sigma) else {
            break;
        };
        assignment[pos] += 1;
        for s in &mut assignment[pos + 1..] {
            *s = 0;
        }
    }
    let (satisfied, fixed_labels, free_labels) = best.expect("at least one labeling");
    let labeling = match fixed {
        Side::A => Labeling::new(fixed_labels, free_labels),
        Side::B => Labeling::new(free_labels, fixed_labels),
    };
    let value = lc.value(&labeling)?;
    Ok(ExactValue {
        value,
        satisfied,
        labeling,
    })
}

/// A minimum REP-cover by exhaustive search over vertex subsets of
/// increasing size, in lexicographic order of Min-Rep indices. Only groups
/// of supervertices with an incident superedge are candidates.
pub fn min_repcover_exact(mr: &MinRepInstance, budget: &OracleBudget) -> Result<RepCover> {
    let lc = mr.source();
    let deg_a = lc.degrees(Side::A);
    let deg_b = lc.degrees(Side::B);
    let mut candidates: Vec<VertexId> = Vec::new();
    for (i, &d) in deg_a.iter().enumerate() {
        if d > 0 {
            candidates.extend(mr.group(Side::A, i));
        }
    }
    for (j, &d) in deg_b.iter().enumerate() {
        if d > 0 {
            candidates.extend(mr.group(Side::B, j));
        }
    }
    let pairs: Vec<Vec<(VertexId, VertexId)>> = lc.edges().iter().map(|&e| mr.superedge_pairs(e).collect()).collect();
    let mut selected = vec![false; mr.vertex_count()];
    let mut clock = Clock::new(budget);
    let mut spent: u128 = 0;
    let start = mr.non_isolated_supervertices();
    for size in start..=candidates.len() {
        let here = binomial(candidates.len(), size).unwrap_or(u128::MAX);
        spent = spent.saturating_add(here);
        if spent > budget.max_search_space {
            return Err(Error::resource("REP-cover search space", spent, budget.max_search_space));
        }
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            clock.tick("REP-cover search")?;
            for &i in &idx {
                selected[candidates[i]] = true;
            }
            let ok = pairs.iter().all(|ps| ps.iter().any(|&(u, w)| selected[u] && selected[w]));
            for &i in &idx {
                selected[candidates[i]] = false;
            }
            if ok {
                return Ok(idx.iter().map(|&i| mr.member_of(candidates[i])).collect());
            }
            if !next_combination(&mut idx, candidates.len()) {
                break;
            }
        }
    }
    unreachable!("the full candidate set covers every superedge")
}

/// Exact distances from `src` by plain BFS.
fn distances(adj: &[Vec<VertexId>], src: VertexId) -> Vec<Distance> {
    let mut dist = vec![Distance::Infinite; adj.len()];
    let mut queue = VecDeque::from([src]);
    dist[src] = Distance::Finite(0);
    while let Some(u) = queue.pop_front() {
        let Distance::Finite(d) = dist[u] else { unreachable!() };
        for &w in &adj[u] {
            if dist[w] == Distance::Infinite {
                dist[w] = Distance::Finite(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

fn adjacency<'a>(n: usize, edges: impl IntoIterator<Item = &'a (VertexId, VertexId)>) -> Vec<Vec<VertexId>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

/// Stretch condition checked over all vertex pairs:
/// `dist_h(u, v) ≤ k·dist_g(u, v)` whenever `u` and `v` are connected in `g`.
pub fn verify_spanner_all_pairs(g: &Graph, h: &EdgeSubset, k: usize) -> Result<bool> {
    h.check_host(g)?;
    let n = g.vertex_count();
    let adj_g = adjacency(n, g.edges());
    let adj_h = adjacency(n, h.members().iter().map(|&e| &g.edges()[e]));
    for u in 0..n {
        let dg = distances(&adj_g, u);
        let dh = distances(&adj_h, u);
        for v in 0..n {
            if let Distance::Finite(d) = dg[v] {
                if dh[v].exceeds(k * d) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Girth from a BFS rooted at every vertex: each non-tree edge `(u, v)`
/// closes a walk of length `d(u) + d(v) + 1`, and the minimum over all
/// roots is the girth.
pub fn girth_independent(g: &Graph) -> Distance {
    let n = g.vertex_count();
    let adj = adjacency(n, g.edges());
    let mut best = Distance::Infinite;
    for root in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::from([root]);
        dist[root] = 0;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    best = best.min(Distance::Finite(dist[u] + dist[w] + 1));
                }
            }
        }
    }
    best
}

fn component_count(adj: &[Vec<VertexId>]) -> usize {
    let mut seen = vec![false; adj.len()];
    let mut count = 0;
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Per-edge spanner test on an explicit edge selection.
fn spans(g: &Graph, chosen: &[bool], k: usize, adj: &mut [Vec<VertexId>]) -> bool {
    for list in adj.iter_mut() {
        list.clear();
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if chosen[e] {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    g.edges()
        .iter()
        .enumerate()
        .all(|(e, &(u, v))| chosen[e] || !distances(adj, u)[v].exceeds(k))
}

/// A minimum k-spanner by exhaustive search over edge subsets of increasing
/// size (lexicographic order of edge ids), starting from `n − components`.
pub fn min_spanner_exact(g: &Graph, k: usize, budget: &OracleBudget) -> Result<EdgeSubset> {
    let n = g.vertex_count();
    let m = g.edge_count();
    let start = n - component_count(&adjacency(n, g.edges()));
    let mut adj = vec![Vec::new(); n];
    let mut chosen = vec![false; m];
    let mut clock = Clock::new(budget);
    let mut spent: u128 = 0;
    for size in start..=m {
        spent = spent.saturating_add(binomial(m, size).unwrap_or(u128::MAX));
        if spent > budget.max_search_space {
            return Err(Error::resource("spanner search space", spent, budget.max_search_space));
        }
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            clock.tick("spanner search")?;
            for &e in &idx {
                chosen[e] = true;
            }
            let ok = spans(g, &chosen, k, &mut adj);
            for &e in &idx {
                chosen[e] = false;
            }
            if ok {
                return EdgeSubset::new(g, idx);
            }
            if !next_combination(&mut idx, m) {
                break;
            }
        }
    }
    unreachable!("the full edge set spans itself")
}

/// Every k-spanner of `g`, as sorted edge-id lists, by enumerating all
/// `2^m` edge subsets.
pub fn enumerate_spanners(g: &Graph, k: usize, budget: &OracleBudget) -> Result<Vec<Vec<EdgeId>>> {
    let m = g.edge_count();
    let space = checked_pow(2, m).unwrap_or(u128::MAX);
    if space > budget.max_search_space {
        return Err(Error::resource("spanner enumeration", space, budget.max_search_space));
    }
    let mut adj = vec![Vec::new(); g.vertex_count()];
    let mut clock = Clock::new(budget);
    let mut out = Vec::new();
    let mut chosen = vec![false; m];
    for bits in 0..space as u64 {
        clock.tick("spanner enumeration")?;
        for (e, c) in chosen.iter_mut().enumerate() {
            *c = bits >> e & 1 == 1;
        }
        if spans(g, &chosen, k, &mut adj) {
            out.push((0..m).filter(|&e| chosen[e]).collect());
        }
    }
    Ok(out)
}
