//! The k-spanner gadget built from a Min-Rep instance, spanner verification,
//! proper-spanner conversion, both reduction directions and a greedy
//! baseline.
//!
//! Vertex layout of the gadget graph `G'`:
//!
//! * `0..n` are the Min-Rep vertices, numbered as in [`MinRepInstance`];
//! * the S towers follow: `s(p, i, level) = n + (p·|A| + i)·k_A + level − 1`;
//! * then the T towers: `t(p, j, level) = n + x·|A|·k_A + (p·|B| + j)·k_B + level − 1`.
//!
//! Copies `p` are 0-based and tower levels 1-based, so `s(p, i, 1)` is the
//! tower vertex adjacent to the group `A_i` and `s(p, i, k_A)` is the one
//! carrying the superedge copies.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format;
use crate::graph::{self, Distance, EdgeId, Graph, PairSearch, VertexId};
use crate::label_cover::{MinRepInstance, RepCover, Side};

/// Largest gadget (edges or vertices) built without an explicit budget.
pub const DEFAULT_EDGE_BUDGET: u128 = 20_000_000;

/// How the number of tower copies `x` is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CopyCount {
    /// `⌈n²/ñ⌉`.
    #[default]
    Default,
    /// The smallest `x` for which the reduction's size bounds still hold,
    /// see [`copy_floor`].
    Floor,
    Fixed(usize),
}

impl FromStr for CopyCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(CopyCount::Default),
            "floor" => Ok(CopyCount::Floor),
            _ => s
                .parse()
                .map(CopyCount::Fixed)
                .map_err(|_| Error::input(format!("copy count must be `default`, `floor` or a number, got `{s}`"))),
        }
    }
}

impl fmt::Display for CopyCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CopyCount::Default => f.write_str("default"),
            CopyCount::Floor => f.write_str("floor"),
            CopyCount::Fixed(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpannerOptions {
    pub copies: CopyCount,
    /// Build even when the supergirth is below `k + 2`, recording a warning.
    pub allow_short_supergirth: bool,
    pub edge_budget: u128,
}

impl Default for SpannerOptions {
    fn default() -> Self {
        SpannerOptions {
            copies: CopyCount::Default,
            allow_short_supergirth: false,
            edge_budget: DEFAULT_EDGE_BUDGET,
        }
    }
}

/// `⌈n²/ñ⌉`.
pub fn default_copies(n: usize, n_tilde: usize) -> usize {
    (n * n).div_ceil(n_tilde.max(1))
}

/// `⌈max(|E|, n)/ñ⌉`, where `E` is the Min-Rep edge set.
///
/// With `x` at least this large, `|E| ≤ xñ` and `n ≤ xñ`, which is all the
/// size arguments need: any k-spanner `H` then has `|H| ≥ |E|`, `|E_M|`
/// and `|Ê|`, so the proper spanner has at most `6|H|` edges, and a cover
/// `C` with `|C| ≥ ñ` yields a spanner of at most `(k+1)·x·|C|` edges.
pub fn copy_floor(mr: &MinRepInstance) -> usize {
    let n_tilde = mr.source().supervertex_count().max(1);
    mr.graph()
        .edge_count()
        .max(mr.vertex_count())
        .div_ceil(n_tilde)
        .max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexRole {
    MinRepA { i: usize, alpha: u32 },
    MinRepB { j: usize, beta: u32 },
    S { i: usize, level: usize, copy: usize },
    T { j: usize, level: usize, copy: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeFamily {
    /// Min-Rep edges.
    MinRep,
    /// Edges along an S or T tower.
    Tower,
    /// `(s(p, i, 1), u)` for `u ∈ A_i`.
    SA,
    /// `(w, t(p, j, 1))` for `w ∈ B_j`.
    TB,
    /// `(s(p, i, k_A), t(p, j, k_B))` for a superedge `(i, j)`.
    Super { copy: usize },
}

/// A set of edge ids of a host graph, identified by its fingerprint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSubset {
    host: String,
    edge_count: usize,
    members: Vec<EdgeId>,
}

impl EdgeSubset {
    pub fn new(host: &Graph, members: impl IntoIterator<Item = EdgeId>) -> Result<Self> {
        Self::with_fingerprint(host.fingerprint(), host.edge_count(), members)
    }

    pub fn with_fingerprint(
        host: String,
        edge_count: usize,
        members: impl IntoIterator<Item = EdgeId>,
    ) -> Result<Self> {
        let mut members: Vec<EdgeId> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&e) = members.last() {
            if e >= edge_count {
                return Err(Error::input(format!("edge id {e} out of range 0..{edge_count}")));
            }
        }
        Ok(EdgeSubset {
            host,
            edge_count,
            members,
        })
    }

    pub fn full(host: &Graph) -> Self {
        EdgeSubset {
            host: host.fingerprint(),
            edge_count: host.edge_count(),
            members: (0..host.edge_count()).collect(),
        }
    }

    fn from_mask(host: String, mask: &[bool]) -> Self {
        EdgeSubset {
            host,
            edge_count: mask.len(),
            members: (0..mask.len()).filter(|&e| mask[e]).collect(),
        }
    }

    pub fn host(&self) -> &str {
        &self.host
    }

    pub fn members(&self) -> &[EdgeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.members.binary_search(&e).is_ok()
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.edge_count];
        for &e in &self.members {
            mask[e] = true;
        }
        mask
    }

    /// The members as a graph on the host's vertex set.
    pub fn subgraph(&self, host: &Graph) -> Result<Graph> {
        self.check_host(host)?;
        let mask = self.mask();
        Ok(host.edge_subgraph(|e| mask[e]))
    }

    pub fn check_host(&self, host: &Graph) -> Result<()> {
        self.check_fingerprint(&host.fingerprint())
    }

    fn check_fingerprint(&self, fingerprint: &str) -> Result<()> {
        if self.host != fingerprint {
            return Err(Error::input(format!(
                "edge subset belongs to host {}, not {fingerprint}",
                self.host
            )));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        format::write_subset(&self.host, &self.members)
    }

    /// Parses a SUBSET v1 document and checks it against `host`.
    pub fn parse(text: &str, host: &Graph) -> Result<Self> {
        let (fingerprint, members) = format::parse_subset(text)?;
        let subset = Self::with_fingerprint(fingerprint, host.edge_count(), members)?;
        subset.check_host(host)?;
        Ok(subset)
    }
}

/// The gadget graph `G'` together with its vertex roles and edge families.
#[derive(Clone, Debug)]
pub struct SpannerInstance {
    base: Graph,
    fingerprint: String,
    k: usize,
    k_a: usize,
    k_b: usize,
    x: usize,
    copies: CopyCount,
    minrep: MinRepInstance,
    families: Vec<EdgeFamily>,
    hat: Vec<EdgeId>,
    u_choice: Vec<VertexId>,
    w_choice: Vec<VertexId>,
    warnings: Vec<String>,
}

fn supervertex_name(a_count: usize, v: VertexId) -> String {
    if v < a_count {
        format!("a{v}")
    } else {
        format!("b{}", v - a_count)
    }
}

/// Builds `G'` for stretch `k`. The source instance must have supergirth at
/// least `k + 2` unless `opts.allow_short_supergirth` is set.
pub fn build_spanner_instance(mr: &MinRepInstance, k: usize, opts: &SpannerOptions) -> Result<SpannerInstance> {
    if k < 3 {
        return Err(Error::input(format!("stretch k must be at least 3, got {k}")));
    }
    let lc = mr.source();
    let n_tilde = lc.supervertex_count();
    if n_tilde == 0 {
        return Err(Error::input("instance has no supervertices"));
    }
    let n = mr.vertex_count();
    let mut warnings = Vec::new();

    let supergraph = lc.supergraph();
    if let Distance::Finite(g) = graph::girth(&supergraph) {
        if g < k + 2 {
            let (e, _) = graph::girth_edge(&supergraph).expect("graph has a cycle");
            let cycle = graph::shortest_cycle_through(&supergraph, e)?
                .expect("girth edge lies on a cycle")
                .into_iter()
                .map(|v| supervertex_name(lc.a_count(), v))
                .collect::<Vec<_>>()
                .join(" ");
            let msg = format!("supergirth {g} is below k + 2 = {}; short supercycle: {cycle}", k + 2);
            if !opts.allow_short_supergirth {
                return Err(Error::Precondition(msg));
            }
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }

    let floor = copy_floor(mr);
    let x = match opts.copies {
        CopyCount::Default => default_copies(n, n_tilde),
        CopyCount::Floor => floor,
        CopyCount::Fixed(0) => return Err(Error::input("copy count must be at least 1")),
        CopyCount::Fixed(x) => x,
    };
    if x < floor {
        let msg = format!("x = {x} is below {floor}; the reduction's size bounds are not guaranteed");
        log::warn!("{msg}");
        warnings.push(msg);
    }

    let k_a = (k - 1) / 2;
    let k_b = k / 2;
    let (a, b) = (lc.a_count(), lc.b_count());
    let (sa, sb) = (lc.sigma_a() as usize, lc.sigma_b() as usize);
    let xu = x as u128;
    let vertex_count = n as u128 + xu * (a * k_a + b * k_b) as u128;
    let edge_count = mr.graph().edge_count() as u128
        + xu * ((a * (k_a - 1) + b * (k_b - 1)) as u128
            + (a * sa + b * sb) as u128
            + lc.superedge_count() as u128);
    let size = vertex_count.max(edge_count);
    if size > opts.edge_budget {
        return Err(Error::resource("gadget graph size", size, opts.edge_budget));
    }

    let layout = Layout { n, a, b, x, k_a, k_b };
    let mut list: Vec<(VertexId, VertexId, EdgeFamily)> = Vec::with_capacity(edge_count as usize);
    list.extend(mr.graph().edges().iter().map(|&(u, w)| (u, w, EdgeFamily::MinRep)));
    for copy in 0..x {
        for i in 0..a {
            for level in 1..k_a {
                list.push((layout.s(copy, i, level), layout.s(copy, i, level + 1), EdgeFamily::Tower));
            }
            for u in mr.group(Side::A, i) {
                list.push((u, layout.s(copy, i, 1), EdgeFamily::SA));
            }
        }
        for j in 0..b {
            for level in 1..k_b {
                list.push((layout.t(copy, j, level), layout.t(copy, j, level + 1), EdgeFamily::Tower));
            }
            for w in mr.group(Side::B, j) {
                list.push((w, layout.t(copy, j, 1), EdgeFamily::TB));
            }
        }
        for e in lc.edges() {
            list.push((layout.s(copy, e.a, k_a), layout.t(copy, e.b, k_b), EdgeFamily::Super { copy }));
        }
    }
    list.sort_unstable_by_key(|&(u, v, _)| (u, v));
    let families = list.iter().map(|t| t.2).collect();
    let base = Graph::from_canonical(vertex_count as usize, list.into_iter().map(|(u, v, _)| (u, v)).collect());

    let u_choice: Vec<VertexId> = (0..a).map(|i| mr.group(Side::A, i).start).collect();
    let w_choice: Vec<VertexId> = (0..b).map(|j| mr.group(Side::B, j).start).collect();
    let mut hat = Vec::new();
    let id = |u, v| base.find_edge(u, v).expect("gadget edge exists");
    for (i, &u_i) in u_choice.iter().enumerate() {
        hat.extend(mr.group(Side::A, i).map(|u| id(u, layout.s(0, i, 1))));
        hat.extend((0..x).map(|copy| id(u_i, layout.s(copy, i, 1))));
    }
    for (j, &w_j) in w_choice.iter().enumerate() {
        hat.extend(mr.group(Side::B, j).map(|w| id(w, layout.t(0, j, 1))));
        hat.extend((0..x).map(|copy| id(w_j, layout.t(copy, j, 1))));
    }
    hat.sort_unstable();
    hat.dedup();

    Ok(SpannerInstance {
        fingerprint: base.fingerprint(),
        base,
        k,
        k_a,
        k_b,
        x,
        copies: opts.copies,
        minrep: mr.clone(),
        families,
        hat,
        u_choice,
        w_choice,
        warnings,
    })
}

#[derive(Clone, Copy, Debug)]
struct Layout {
    n: usize,
    a: usize,
    b: usize,
    x: usize,
    k_a: usize,
    k_b: usize,
}

impl Layout {
    fn s(&self, copy: usize, i: usize, level: usize) -> VertexId {
        self.n + (copy * self.a + i) * self.k_a + level - 1
    }

    fn t(&self, copy: usize, j: usize, level: usize) -> VertexId {
        self.n + self.x * self.a * self.k_a + (copy * self.b + j) * self.k_b + level - 1
    }
}

impl SpannerInstance {
    fn layout(&self) -> Layout {
        let lc = self.minrep.source();
        Layout {
            n: self.minrep.vertex_count(),
            a: lc.a_count(),
            b: lc.b_count(),
            x: self.x,
            k_a: self.k_a,
            k_b: self.k_b,
        }
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    /// Fingerprint of [`Self::base`], the host id of its edge subsets.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn k_a(&self) -> usize {
        self.k_a
    }

    pub fn k_b(&self) -> usize {
        self.k_b
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn copies(&self) -> CopyCount {
        self.copies
    }

    pub fn source(&self) -> &MinRepInstance {
        &self.minrep
    }

    /// Min-Rep graph size.
    pub fn n(&self) -> usize {
        self.minrep.vertex_count()
    }

    /// Supergraph size `|A| + |B|`.
    pub fn n_tilde(&self) -> usize {
        self.minrep.source().supervertex_count()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Whether `x` is at least [`copy_floor`], so the size bounds apply.
    pub fn size_bounds_apply(&self) -> bool {
        self.x >= copy_floor(&self.minrep)
    }

    pub fn s_vertex(&self, copy: usize, i: usize, level: usize) -> VertexId {
        self.layout().s(copy, i, level)
    }

    pub fn t_vertex(&self, copy: usize, j: usize, level: usize) -> VertexId {
        self.layout().t(copy, j, level)
    }

    pub fn role(&self, v: VertexId) -> VertexRole {
        let l = self.layout();
        if v < l.n {
            let m = self.minrep.member_of(v);
            return match m.side {
                Side::A => VertexRole::MinRepA { i: m.vertex, alpha: m.symbol },
                Side::B => VertexRole::MinRepB { j: m.vertex, beta: m.symbol },
            };
        }
        let r = v - l.n;
        let s_total = l.x * l.a * l.k_a;
        if r < s_total {
            let q = r / l.k_a;
            VertexRole::S {
                i: q % l.a,
                level: r % l.k_a + 1,
                copy: q / l.a,
            }
        } else {
            let r = r - s_total;
            let q = r / l.k_b;
            VertexRole::T {
                j: q % l.b,
                level: r % l.k_b + 1,
                copy: q / l.b,
            }
        }
    }

    pub fn family(&self, e: EdgeId) -> EdgeFamily {
        self.families[e]
    }

    pub fn families(&self) -> &[EdgeFamily] {
        &self.families
    }

    /// The distinguished edge set `Ê`, sorted.
    pub fn hat_edges(&self) -> &[EdgeId] {
        &self.hat
    }

    /// `u_i`: the lowest-index vertex of `A_i`.
    pub fn u_choice(&self) -> &[VertexId] {
        &self.u_choice
    }

    /// `w_j`: the lowest-index vertex of `B_j`.
    pub fn w_choice(&self) -> &[VertexId] {
        &self.w_choice
    }

    pub fn family_count(&self, pred: impl Fn(EdgeFamily) -> bool) -> usize {
        self.families.iter().filter(|&&f| pred(f)).count()
    }

    pub fn subset(&self, members: impl IntoIterator<Item = EdgeId>) -> Result<EdgeSubset> {
        EdgeSubset::with_fingerprint(self.fingerprint.clone(), self.base.edge_count(), members)
    }

    pub fn full_subset(&self) -> EdgeSubset {
        EdgeSubset::from_mask(self.fingerprint.clone(), &vec![true; self.base.edge_count()])
    }

    fn check_subset(&self, h: &EdgeSubset) -> Result<()> {
        h.check_fingerprint(&self.fingerprint)
    }

    fn edge_id(&self, u: VertexId, v: VertexId) -> EdgeId {
        self.base.find_edge(u, v).expect("gadget edge exists")
    }

    /// Copy, superedge endpoints `(i, j)` and superedge id of an `E_G̃` edge.
    fn gadget_edge(&self, e: EdgeId) -> Option<(usize, usize, usize, usize)> {
        let EdgeFamily::Super { copy } = self.families[e] else {
            return None;
        };
        let (s, t) = self.base.edges()[e];
        let (VertexRole::S { i, .. }, VertexRole::T { j, .. }) = (self.role(s), self.role(t)) else {
            unreachable!("gadget edges join S and T towers");
        };
        let id = self
            .minrep
            .source()
            .find_superedge(i, j)
            .expect("gadget edge has a superedge");
        Some((copy, i, j, id))
    }

    fn canonical_path_where(&self, e: EdgeId, in_h: impl Fn(EdgeId) -> bool) -> Option<Vec<VertexId>> {
        let (copy, i, j, id) = self.gadget_edge(e)?;
        let l = self.layout();
        let tower_s = (1..l.k_a).all(|lv| in_h(self.edge_id(l.s(copy, i, lv), l.s(copy, i, lv + 1))));
        let tower_t = (1..l.k_b).all(|lv| in_h(self.edge_id(l.t(copy, j, lv), l.t(copy, j, lv + 1))));
        if !(tower_s && tower_t) {
            return None;
        }
        let (s1, t1) = (l.s(copy, i, 1), l.t(copy, j, 1));
        let se = self.minrep.source().edges()[id];
        let (u, w) = self.minrep.superedge_pairs(se).find(|&(u, w)| {
            in_h(self.edge_id(u, s1)) && in_h(self.edge_id(u, w)) && in_h(self.edge_id(w, t1))
        })?;
        let mut path: Vec<VertexId> = (1..=l.k_a).rev().map(|lv| l.s(copy, i, lv)).collect();
        path.push(u);
        path.push(w);
        path.extend((1..=l.k_b).map(|lv| l.t(copy, j, lv)));
        Some(path)
    }

    /// A canonical path for the `E_G̃` edge `e` inside `h`: down the S
    /// tower, into `A_i`, across a Min-Rep edge, out of `B_j` and up the T
    /// tower. The lexicographically first Min-Rep edge is used; the path
    /// has exactly `k` edges.
    pub fn canonical_span_check(&self, h: &EdgeSubset, e: EdgeId) -> Result<Option<Vec<VertexId>>> {
        self.check_subset(h)?;
        if e >= self.base.edge_count() {
            return Err(Error::input(format!("edge id {e} out of range")));
        }
        if !matches!(self.families[e], EdgeFamily::Super { .. }) {
            return Err(Error::input(format!("edge {e} is not a superedge copy")));
        }
        Ok(self.canonical_path_where(e, |f| h.contains(f)))
    }

    /// `E_G̃` edges that are neither in `h` nor spanned by a canonical path
    /// in `h`. Every k-spanner of a gadget with supergirth ≥ k + 2 has none.
    pub fn uncanonical_gadget_edges(&self, h: &EdgeSubset) -> Result<Vec<EdgeId>> {
        self.check_subset(h)?;
        let mask = h.mask();
        Ok((0..self.base.edge_count())
            .into_par_iter()
            .filter(|&e| {
                matches!(self.families[e], EdgeFamily::Super { .. })
                    && !mask[e]
                    && self.canonical_path_where(e, |f| mask[f]).is_none()
            })
            .collect())
    }

    /// Checks the structural invariants of the gadget: vertex and family
    /// counts, the size of `Ê`, one superedge copy per copy index and the
    /// degree-2 interior of the towers.
    pub fn audit(&self) -> Result<()> {
        let l = self.layout();
        let lc = self.minrep.source();
        let fail = |msg: String| Err(Error::Precondition(format!("gadget audit: {msg}")));
        let vertices = l.n + l.x * (l.a * l.k_a + l.b * l.k_b);
        if self.base.vertex_count() != vertices {
            return fail(format!("{} vertices, expected {vertices}", self.base.vertex_count()));
        }
        let counts = [
            (EdgeFamily::MinRep, self.minrep.graph().edge_count()),
            (EdgeFamily::Tower, l.x * (l.a * (l.k_a - 1) + l.b * (l.k_b - 1))),
            (EdgeFamily::SA, l.x * l.a * lc.sigma_a() as usize),
            (EdgeFamily::TB, l.x * l.b * lc.sigma_b() as usize),
        ];
        for (family, expected) in counts {
            let got = self.family_count(|f| f == family);
            if got != expected {
                return fail(format!("{got} {family:?} edges, expected {expected}"));
            }
        }
        let mut per_copy = vec![Vec::new(); l.x];
        for e in 0..self.base.edge_count() {
            if let Some((copy, i, j, _)) = self.gadget_edge(e) {
                per_copy[copy].push((i, j));
            }
        }
        let superedges: Vec<(usize, usize)> = lc.edges().iter().map(|e| (e.a, e.b)).collect();
        for (copy, mut list) in per_copy.into_iter().enumerate() {
            list.sort_unstable();
            if list != superedges {
                return fail(format!("copy {copy} of the superedges differs from the supergraph"));
            }
        }
        let hat = l.n + l.x * self.n_tilde() - self.n_tilde();
        if self.hat.len() != hat {
            return fail(format!("|Ê| = {}, expected {hat}", self.hat.len()));
        }
        for v in l.n..self.base.vertex_count() {
            let (level, top) = match self.role(v) {
                VertexRole::S { level, .. } => (level, l.k_a),
                VertexRole::T { level, .. } => (level, l.k_b),
                _ => unreachable!(),
            };
            if level > 1 && level < top && self.base.degree(v) != 2 {
                return fail(format!("interior tower vertex {v} has degree {}", self.base.degree(v)));
            }
        }
        Ok(())
    }

    /// Converts a k-spanner into a proper one (no `E_G̃` edges):
    /// `(h \ E_G̃) ∪ E ∪ E_M ∪ Ê`, plus, for every dropped `E_G̃` edge, the
    /// two tower attachments of a canonical path through the
    /// lexicographically first Min-Rep edge of its superedge.
    pub fn make_proper(&self, h: &EdgeSubset) -> Result<EdgeSubset> {
        self.require_spanner(h)?;
        let l = self.layout();
        let mut mask = h.mask();
        for (e, keep) in mask.iter_mut().enumerate() {
            match self.families[e] {
                EdgeFamily::MinRep | EdgeFamily::Tower => *keep = true,
                EdgeFamily::Super { .. } => *keep = false,
                EdgeFamily::SA | EdgeFamily::TB => {}
            }
        }
        for &e in &self.hat {
            mask[e] = true;
        }
        for &e in h.members() {
            if let Some((copy, i, j, id)) = self.gadget_edge(e) {
                let se = self.minrep.source().edges()[id];
                let (u, w) = self
                    .minrep
                    .superedge_pairs(se)
                    .next()
                    .expect("relations are nonempty");
                mask[self.edge_id(u, l.s(copy, i, 1))] = true;
                mask[self.edge_id(w, l.t(copy, j, 1))] = true;
            }
        }
        Ok(EdgeSubset::from_mask(self.fingerprint.clone(), &mask))
    }

    fn require_spanner(&self, h: &EdgeSubset) -> Result<()> {
        self.check_subset(h)?;
        if let Some(e) = unspanned_edge(&self.base, h, self.k) {
            let (u, v) = self.base.edges()[e];
            return Err(Error::input(format!(
                "not a {}-spanner: edge {e} ({u}, {v}) is not spanned",
                self.k
            )));
        }
        Ok(())
    }

    /// Extracts a REP-cover from a k-spanner: make it proper, read off for
    /// every copy `p` the Min-Rep vertices attached to copy-`p` towers, and
    /// keep the smallest such set (lowest `p` on ties).
    pub fn repcover_from_spanner(&self, h: &EdgeSubset) -> Result<ExtractedCover> {
        let proper = self.make_proper(h)?;
        let mut sizes = vec![0usize; self.x];
        let attachment = |e: EdgeId| -> Option<(usize, VertexId)> {
            let (u, v) = self.base.edges()[e];
            match (self.families[e], self.role(v)) {
                (EdgeFamily::SA, VertexRole::S { copy, .. }) | (EdgeFamily::TB, VertexRole::T { copy, .. }) => {
                    Some((copy, u))
                }
                _ => None,
            }
        };
        for &e in proper.members() {
            if let Some((copy, _)) = attachment(e) {
                sizes[copy] += 1;
            }
        }
        let copy = (0..self.x).min_by_key(|&p| (sizes[p], p)).expect("x ≥ 1");
        let cover: RepCover = proper
            .members()
            .iter()
            .filter_map(|&e| attachment(e))
            .filter(|&(p, _)| p == copy)
            .map(|(_, u)| self.minrep.member_of(u))
            .collect();
        Ok(ExtractedCover {
            cover,
            copy,
            copy_sizes: sizes,
            proper,
        })
    }

    /// Builds a k-spanner from a REP-cover: every cover vertex is attached
    /// to its towers in every copy, plus `E ∪ E_M ∪ Ê`.
    pub fn spanner_from_repcover(&self, cover: &RepCover) -> Result<EdgeSubset> {
        if let Some(id) = self.minrep.first_uncovered(cover)? {
            let e = self.minrep.source().edges()[id];
            return Err(Error::input(format!(
                "not a REP-cover: superedge {id} (a{}, b{}) is uncovered",
                e.a, e.b
            )));
        }
        let l = self.layout();
        let mut mask: Vec<bool> = self
            .families
            .iter()
            .map(|f| matches!(f, EdgeFamily::MinRep | EdgeFamily::Tower))
            .collect();
        for &e in &self.hat {
            mask[e] = true;
        }
        for m in cover.iter() {
            let u = self.minrep.vertex_index(m.side, m.vertex, m.symbol);
            for copy in 0..l.x {
                let tower = match m.side {
                    Side::A => l.s(copy, m.vertex, 1),
                    Side::B => l.t(copy, m.vertex, 1),
                };
                mask[self.edge_id(u, tower)] = true;
            }
        }
        Ok(EdgeSubset::from_mask(self.fingerprint.clone(), &mask))
    }

    pub fn metadata(&self) -> SpannerMeta {
        let lc = self.minrep.source();
        SpannerMeta {
            schema: "spanner_meta_v1".to_string(),
            host: self.fingerprint.clone(),
            k: self.k,
            k_a: self.k_a,
            k_b: self.k_b,
            x: self.x,
            copies: self.copies,
            n: self.n(),
            n_tilde: self.n_tilde(),
            a_count: lc.a_count(),
            b_count: lc.b_count(),
            sigma_a: lc.sigma_a(),
            sigma_b: lc.sigma_b(),
            vertex_count: self.base.vertex_count(),
            edge_count: self.base.edge_count(),
            u_choice: self.u_choice.clone(),
            w_choice: self.w_choice.clone(),
            hat_edges: self.hat.clone(),
            roles: (0..self.base.vertex_count()).map(|v| self.role(v)).collect(),
            families: self.families.clone(),
            warnings: self.warnings.clone(),
        }
    }
}

/// Result of [`SpannerInstance::repcover_from_spanner`].
#[derive(Clone, Debug)]
pub struct ExtractedCover {
    pub cover: RepCover,
    /// The copy `p` whose set `U^p` was returned.
    pub copy: usize,
    /// `|U^p|` for every copy.
    pub copy_sizes: Vec<usize>,
    /// The proper spanner the cover was read from.
    pub proper: EdgeSubset,
}

/// Sidecar document describing a serialized gadget graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpannerMeta {
    pub schema: String,
    pub host: String,
    pub k: usize,
    pub k_a: usize,
    pub k_b: usize,
    pub x: usize,
    pub copies: CopyCount,
    pub n: usize,
    pub n_tilde: usize,
    pub a_count: usize,
    pub b_count: usize,
    pub sigma_a: u32,
    pub sigma_b: u32,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub u_choice: Vec<VertexId>,
    pub w_choice: Vec<VertexId>,
    pub hat_edges: Vec<EdgeId>,
    pub roles: Vec<VertexRole>,
    pub families: Vec<EdgeFamily>,
    pub warnings: Vec<String>,
}

/// Smallest edge id whose endpoints are more than `k` apart in `h`.
fn unspanned_edge(g: &Graph, h: &EdgeSubset, k: usize) -> Option<EdgeId> {
    let mask = h.mask();
    let hg = g.edge_subgraph(|e| mask[e]);
    (0..g.edge_count())
        .into_par_iter()
        .filter(|&e| !mask[e])
        .map_init(
            || PairSearch::new(g.vertex_count()),
            |search, e| {
                let (u, v) = g.edges()[e];
                (!search.within(&hg, u, v, k)).then_some(e)
            },
        )
        .flatten()
        .min()
}

/// The smallest edge of `g` not spanned within distance `k` by `h`, or
/// `None` if `h` is a k-spanner of `g`.
pub fn first_unspanned_edge(g: &Graph, h: &EdgeSubset, k: usize) -> Result<Option<EdgeId>> {
    h.check_host(g)?;
    Ok(unspanned_edge(g, h, k))
}

/// Whether every edge `(u, v)` of `g` has `dist_h(u, v) ≤ k`. On unweighted
/// graphs this is equivalent to the all-pairs stretch condition.
pub fn verify_spanner(g: &Graph, h: &EdgeSubset, k: usize) -> Result<bool> {
    Ok(first_unspanned_edge(g, h, k)?.is_none())
}

/// Greedy k-spanner: scan edges in canonical order and keep an edge iff its
/// endpoints are more than `k` apart in the edges kept so far. The result
/// has girth greater than `k + 1`.
pub fn greedy_spanner(g: &Graph, k: usize) -> EdgeSubset {
    let n = g.vertex_count();
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    let mut dist = vec![u32::MAX; n];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    let mut members = Vec::new();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        for &t in &touched {
            dist[t] = u32::MAX;
        }
        touched.clear();
        queue.clear();
        dist[u] = 0;
        touched.push(u);
        queue.push_back(u);
        let mut reached = false;
        'bfs: while let Some(x) = queue.pop_front() {
            if dist[x] as usize >= k {
                break;
            }
            for &y in &adj[x] {
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    touched.push(y);
                    if y == v {
                        reached = true;
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
        }
        if !reached {
            adj[u].push(v);
            adj[v].push(u);
            members.push(e);
        }
    }
    EdgeSubset::with_fingerprint(g.fingerprint(), g.edge_count(), members).expect("ids come from g")
}

/// Size bound for the proper spanner built from `h`: `6|H|`.
pub fn proper_size_bound(h_len: usize) -> usize {
    6 * h_len
}

/// Whether an extracted cover respects `|C| ≤ 6|H|/x`.
pub fn cover_within_bound(cover_len: usize, h_len: usize, x: usize) -> bool {
    (cover_len as u128) * (x as u128) <= 6 * h_len as u128
}

/// `(k+1)·x·|C|`, the size bound for a spanner built from a cover.
pub fn spanner_size_bound(k: usize, x: usize, cover_len: usize) -> u128 {
    (k as u128 + 1) * x as u128 * cover_len as u128
}
