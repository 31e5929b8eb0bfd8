//! Undirected simple graphs: hop distances, girth and shortest cycles through an edge.
//!
//! Vertex ids are dense `0..n`. Edge ids are positions in the canonical edge
//! list, which stores every edge as `(min, max)` sorted lexicographically.
//! Graphs are immutable once built.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Unweighted hop distance; `Infinite` compares greater than every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    /// `self > bound`, with `Infinite` exceeding every bound.
    pub fn exceeds(self, bound: usize) -> bool {
        match self {
            Distance::Finite(d) => d > bound,
            Distance::Infinite => true,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Simple undirected graph with a CSR adjacency index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    offsets: Vec<usize>,
    // (neighbour, edge id), sorted by neighbour within each vertex
    adjacency: Vec<(VertexId, EdgeId)>,
}

impl Graph {
    /// Builds a graph, canonicalising edge orientation and order.
    ///
    /// Rejects self-loops, duplicate edges (in either orientation) and
    /// endpoints outside `0..n`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::input(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::input(format!("self-loop at vertex {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_canonical(n, list))
    }

    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, Vec::new())
    }

    /// `edges` must already be canonical: oriented, sorted and duplicate-free.
    pub(crate) fn from_canonical(n: usize, edges: Vec<(VertexId, VertexId)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(u, v)| u < v && v < n));
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut adjacency = vec![(0, 0); offsets[n]];
        // Walking edges in canonical order leaves every adjacency slice sorted.
        for (id, &(u, v)) in edges.iter().enumerate() {
            adjacency[cursor[u]] = (v, id);
            cursor[u] += 1;
            adjacency[cursor[v]] = (u, id);
            cursor[v] += 1;
        }
        Graph {
            n,
            edges,
            offsets,
            adjacency,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Result<(VertexId, VertexId)> {
        self.edges
            .get(e)
            .copied()
            .ok_or_else(|| Error::input(format!("edge id {e} out of range 0..{}", self.edges.len())))
    }

    /// `(neighbour, edge id)` pairs sorted by neighbour.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let nbrs = self.neighbors(u);
        nbrs.binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| nbrs[i].1)
    }

    /// Subgraph on the same vertex set keeping the edges selected by `keep`.
    pub fn edge_subgraph(&self, mut keep: impl FnMut(EdgeId) -> bool) -> Graph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(id, _)| keep(*id))
            .map(|(_, &e)| e)
            .collect();
        Graph::from_canonical(self.n, edges)
    }

    /// SHA-256 over the vertex count and canonical edge list (little-endian u64s).
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        h.update((self.edges.len() as u64).to_le_bytes());
        for &(u, v) in &self.edges {
            h.update((u as u64).to_le_bytes());
            h.update((v as u64).to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Reusable BFS state; resetting only touches the vertices visited last time.
pub(crate) struct Bfs {
    dist: Vec<u32>,
    parent: Vec<usize>,
    touched: Vec<usize>,
    queue: VecDeque<usize>,
}

const UNSEEN: u32 = u32::MAX;

impl Bfs {
    pub(crate) fn new(n: usize) -> Self {
        Bfs {
            dist: vec![UNSEEN; n],
            parent: vec![usize::MAX; n],
            touched: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v] = UNSEEN;
            self.parent[v] = usize::MAX;
        }
        self.touched.clear();
        self.queue.clear();
    }

    fn visit(&mut self, v: usize, d: u32, parent: usize) {
        self.dist[v] = d;
        self.parent[v] = parent;
        self.touched.push(v);
        self.queue.push_back(v);
    }

    /// Explores from `src` up to depth `cap`, never crossing `skip`. Returns
    /// early once `target` is reached.
    pub(crate) fn run(
        &mut self,
        g: &Graph,
        src: VertexId,
        cap: Option<usize>,
        skip: Option<EdgeId>,
        target: Option<VertexId>,
    ) {
        self.reset();
        self.visit(src, 0, usize::MAX);
        if target == Some(src) {
            return;
        }
        while let Some(u) = self.queue.pop_front() {
            let du = self.dist[u];
            if cap.is_some_and(|c| du as usize >= c) {
                continue;
            }
            for &(w, e) in g.neighbors(u) {
                if Some(e) == skip || self.dist[w] != UNSEEN {
                    continue;
                }
                self.visit(w, du + 1, u);
                if target == Some(w) {
                    return;
                }
            }
        }
    }

    pub(crate) fn distance(&self, v: VertexId) -> Distance {
        match self.dist[v] {
            UNSEEN => Distance::Infinite,
            d => Distance::Finite(d as usize),
        }
    }

    fn path_to(&self, v: VertexId) -> Vec<VertexId> {
        let mut path = vec![v];
        let mut cur = v;
        while self.parent[cur] != usize::MAX {
            cur = self.parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }
}

/// Bounded bidirectional search answering `dist(u, v) ≤ cap`.
///
/// Each round grows whichever side's frontier has the smaller total degree
/// by one level, and stops when a newly reached vertex was already seen from
/// the other side. Reuses its buffers across queries.
pub(crate) struct PairSearch {
    side: Vec<u8>,
    touched: Vec<usize>,
    frontier: [Vec<usize>; 2],
    next: Vec<usize>,
}

impl PairSearch {
    pub(crate) fn new(n: usize) -> Self {
        PairSearch {
            side: vec![0; n],
            touched: Vec::new(),
            frontier: [Vec::new(), Vec::new()],
            next: Vec::new(),
        }
    }

    pub(crate) fn within(&mut self, g: &Graph, u: VertexId, v: VertexId, cap: usize) -> bool {
        if u == v {
            return true;
        }
        for &t in &self.touched {
            self.side[t] = 0;
        }
        self.touched.clear();
        self.side[u] = 1;
        self.side[v] = 2;
        self.touched.extend([u, v]);
        self.frontier[0].clear();
        self.frontier[1].clear();
        self.frontier[0].push(u);
        self.frontier[1].push(v);
        let mut radius = 0;
        while radius < cap {
            let cost = |f: &Vec<usize>| f.iter().map(|&x| g.degree(x)).sum::<usize>();
            let s = usize::from(cost(&self.frontier[1]) < cost(&self.frontier[0]));
            let (mine, theirs) = (s as u8 + 1, 2 - s as u8);
            self.next.clear();
            for &x in &self.frontier[s] {
                for &(y, _) in g.neighbors(x) {
                    let tag = self.side[y];
                    if tag == theirs {
                        return true;
                    }
                    if tag == 0 {
                        self.side[y] = mine;
                        self.touched.push(y);
                        self.next.push(y);
                    }
                }
            }
            if self.next.is_empty() {
                return false;
            }
            std::mem::swap(&mut self.frontier[s], &mut self.next);
            radius += 1;
        }
        false
    }
}

/// Exact hop distances from `src`. With `cap`, vertices farther than `cap`
/// report `Infinite`.
pub fn bfs_distances(g: &Graph, src: VertexId, cap: Option<usize>) -> Result<Vec<Distance>> {
    if src >= g.vertex_count() {
        return Err(Error::input(format!(
            "source vertex {src} out of range 0..{}",
            g.vertex_count()
        )));
    }
    let mut bfs = Bfs::new(g.vertex_count());
    bfs.run(g, src, cap, None, None);
    Ok((0..g.vertex_count()).map(|v| bfs.distance(v)).collect())
}

/// Length of the shortest cycle through edge `e`, i.e. `dist_{g-e}(u, v) + 1`.
/// `Infinite` iff `e` is a bridge.
pub fn edge_cycle_length(g: &Graph, e: EdgeId) -> Result<Distance> {
    g.edge(e)?;
    let mut bfs = Bfs::new(g.vertex_count());
    Ok(edge_cycle_length_with(g, e, None, &mut bfs))
}

/// Like [`edge_cycle_length`] but only looks for cycles of length at most
/// `max_len`; longer cycles report `Infinite`.
pub fn edge_cycle_length_within(g: &Graph, e: EdgeId, max_len: usize) -> Result<Distance> {
    g.edge(e)?;
    let mut bfs = Bfs::new(g.vertex_count());
    Ok(edge_cycle_length_with(g, e, Some(max_len), &mut bfs))
}

pub(crate) fn edge_cycle_length_with(
    g: &Graph,
    e: EdgeId,
    max_len: Option<usize>,
    bfs: &mut Bfs,
) -> Distance {
    let (u, v) = g.edges()[e];
    let cap = match max_len {
        Some(0) | Some(1) => return Distance::Infinite,
        Some(m) => Some(m - 1),
        None => None,
    };
    bfs.run(g, u, cap, Some(e), Some(v));
    match bfs.distance(v) {
        Distance::Finite(d) => Distance::Finite(d + 1),
        Distance::Infinite => Distance::Infinite,
    }
}

/// Vertices of a shortest cycle through `e`, starting at its smaller
/// endpoint and ending at the larger one. `None` for bridges.
pub fn shortest_cycle_through(g: &Graph, e: EdgeId) -> Result<Option<Vec<VertexId>>> {
    let (u, v) = g.edge(e)?;
    let mut bfs = Bfs::new(g.vertex_count());
    bfs.run(g, u, None, Some(e), Some(v));
    if bfs.distance(v).is_finite() {
        Ok(Some(bfs.path_to(v)))
    } else {
        Ok(None)
    }
}

/// Girth by per-edge removal and BFS; `Infinite` for forests.
pub fn girth(g: &Graph) -> Distance {
    let mut bfs = Bfs::new(g.vertex_count());
    let mut best = Distance::Infinite;
    for e in 0..g.edge_count() {
        let cap = match best {
            Distance::Finite(3) => break,
            Distance::Finite(b) => Some(b - 1),
            Distance::Infinite => None,
        };
        let len = edge_cycle_length_with(g, e, cap, &mut bfs);
        best = best.min(len);
    }
    best
}

/// Id of an edge realising the girth, with the minimum id among such edges.
pub fn girth_edge(g: &Graph) -> Option<(EdgeId, usize)> {
    let mut bfs = Bfs::new(g.vertex_count());
    let mut best: Option<(EdgeId, usize)> = None;
    for e in 0..g.edge_count() {
        let cap = best.map(|(_, b)| b - 1);
        if let Distance::Finite(len) = edge_cycle_length_with(g, e, cap, &mut bfs) {
            if best.is_none_or(|(_, b)| len < b) {
                best = Some((e, len));
            }
        }
    }
    best
}

/// Two-colouring (`0`/`1` per vertex) if `g` has no odd cycle.
pub fn is_bipartite(g: &Graph) -> Option<Vec<u8>> {
    const NONE: u8 = u8::MAX;
    let mut colour = vec![NONE; g.vertex_count()];
    let mut queue = VecDeque::new();
    for root in 0..g.vertex_count() {
        if colour[root] != NONE {
            continue;
        }
        colour[root] = 0;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &(w, _) in g.neighbors(u) {
                if colour[w] == NONE {
                    colour[w] = 1 - colour[u];
                    queue.push_back(w);
                } else if colour[w] == colour[u] {
                    return None;
                }
            }
        }
    }
    Some(colour)
}

/// Number of connected components (isolated vertices count).
pub fn component_count(g: &Graph) -> usize {
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = Vec::new();
    let mut count = 0;
    for root in 0..g.vertex_count() {
        if seen[root] {
            continue;
        }
        count += 1;
        seen[root] = true;
        stack.push(root);
        while let Some(u) = stack.pop() {
            for &(w, _) in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Small named graphs used throughout the tests and docs.
pub mod named {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        Graph::new(a + b, (0..a).flat_map(|u| (0..b).map(move |v| (u, a + v)))).unwrap()
    }

    pub fn star(leaves: usize) -> Graph {
        Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v))).unwrap()
    }

    pub fn petersen() -> Graph {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Graph::new(10, outer.chain(spokes).chain(inner)).unwrap()
    }
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::named::*;
    use super::*;
    use proptest::prelude::*;

    use Distance::{Finite, Infinite};

    #[test]
    fn rejects_malformed_edge_lists() {
        assert!(matches!(Graph::new(3, [(0, 0)]), Err(Error::Input(_))));
        assert!(matches!(Graph::new(3, [(0, 1), (1, 0)]), Err(Error::Input(_))));
        assert!(matches!(Graph::new(3, [(0, 3)]), Err(Error::Input(_))));
    }

    #[test]
    fn canonical_edge_ids() {
        let g = Graph::new(4, [(3, 2), (1, 0), (2, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (2, 3)]);
        assert_eq!(g.find_edge(2, 0), Some(1));
        assert_eq!(g.find_edge(1, 3), None);
        for v in 0..4 {
            let nbrs = g.neighbors(v);
            assert!(nbrs.windows(2).all(|w| w[0].0 < w[1].0));
            for &(w, e) in nbrs {
                let (a, b) = g.edges()[e];
                assert!((a, b) == (v.min(w), v.max(w)));
            }
        }
    }

    #[test]
    fn bfs_on_path_and_disconnected_vertex() {
        let g = Graph::new(4, [(0, 1), (1, 2)]).unwrap();
        let d = bfs_distances(&g, 0, None).unwrap();
        assert_eq!(d, vec![Finite(0), Finite(1), Finite(2), Infinite]);
        assert!(bfs_distances(&g, 4, None).is_err());
    }

    #[test]
    fn bfs_cap_on_six_cycle() {
        let d = bfs_distances(&cycle(6), 0, Some(2)).unwrap();
        let mut finite: Vec<_> = d.iter().filter_map(|d| d.finite()).collect();
        finite.sort();
        assert_eq!(finite, vec![0, 1, 1, 2, 2]);
        assert_eq!(d[3], Infinite);
    }

    #[test]
    fn girth_of_named_graphs() {
        assert_eq!(girth(&cycle(4)), Finite(4));
        assert_eq!(girth(&complete(4)), Finite(3));
        assert_eq!(girth(&path(7)), Infinite);
        assert_eq!(girth(&star(5)), Infinite);
        assert_eq!(girth(&petersen()), Finite(5));
        assert_eq!(girth(&Graph::empty(0)), Infinite);
    }

    #[test]
    fn edge_cycle_lengths() {
        let c6 = cycle(6);
        for e in 0..6 {
            assert_eq!(edge_cycle_length(&c6, e).unwrap(), Finite(6));
            assert_eq!(edge_cycle_length_within(&c6, e, 5).unwrap(), Infinite);
        }
        let k4 = complete(4);
        for e in 0..6 {
            assert_eq!(edge_cycle_length(&k4, e).unwrap(), Finite(3));
        }
        assert_eq!(edge_cycle_length(&path(3), 0).unwrap(), Infinite);
        assert!(edge_cycle_length(&path(3), 2).is_err());
    }

    #[test]
    fn shortest_cycle_is_a_real_cycle() {
        let g = petersen();
        let cyc = shortest_cycle_through(&g, 0).unwrap().unwrap();
        assert_eq!(cyc.len(), 5);
        let (u, v) = g.edges()[0];
        assert_eq!((cyc[0], *cyc.last().unwrap()), (u, v));
        for w in cyc.windows(2) {
            assert!(g.find_edge(w[0], w[1]).is_some());
        }
        assert!(shortest_cycle_through(&path(3), 0).unwrap().is_none());
    }

    #[test]
    fn bipartiteness() {
        let c = is_bipartite(&cycle(4)).unwrap();
        for &(u, v) in cycle(4).edges() {
            assert_ne!(c[u], c[v]);
        }
        assert!(is_bipartite(&cycle(5)).is_none());
        assert_eq!(is_bipartite(&Graph::empty(3)), Some(vec![0, 0, 0]));
    }

    #[test]
    fn components() {
        assert_eq!(component_count(&Graph::empty(3)), 3);
        assert_eq!(component_count(&cycle(5)), 1);
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            let m = pairs.len();
            proptest::collection::vec(any::<bool>(), m).prop_map(move |mask| {
                Graph::new(
                    n,
                    pairs.iter().zip(mask).filter(|(_, k)| *k).map(|(p, _)| *p),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn pair_search_matches_bfs(g in arb_graph(12), cap in 0usize..6) {
            let mut search = PairSearch::new(g.vertex_count());
            for u in 0..g.vertex_count() {
                let d = bfs_distances(&g, u, None).unwrap();
                for v in 0..g.vertex_count() {
                    prop_assert_eq!(search.within(&g, u, v, cap), !d[v].exceeds(cap));
                }
            }
        }

        #[test]
        fn girth_is_min_edge_cycle_length(g in arb_graph(12)) {
            let per_edge = (0..g.edge_count())
                .map(|e| edge_cycle_length(&g, e).unwrap())
                .min()
                .unwrap_or(Infinite);
            prop_assert_eq!(girth(&g), per_edge);
            match girth_edge(&g) {
                Some((_, len)) => prop_assert_eq!(Finite(len), per_edge),
                None => prop_assert_eq!(per_edge, Infinite),
            }
        }

        #[test]
        fn bipartite_girth_is_even(g in arb_graph(12)) {
            if is_bipartite(&g).is_some() {
                match girth(&g) {
                    Infinite => {}
                    Finite(l) => prop_assert!(l >= 4 && l % 2 == 0),
                }
            }
        }

        #[test]
        fn distances_are_symmetric(g in arb_graph(10)) {
            let all: Vec<_> = (0..g.vertex_count())
                .map(|s| bfs_distances(&g, s, None).unwrap())
                .collect();
            for u in 0..g.vertex_count() {
                for v in 0..g.vertex_count() {
                    prop_assert_eq!(all[u][v], all[v][u]);
                }
            }
        }
    }
}
