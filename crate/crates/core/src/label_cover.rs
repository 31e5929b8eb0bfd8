//! Label Cover instances, labelings, the expanded Min-Rep graph and REP-covers.
//!
//! A [`LabelCoverInstance`] is a bipartite supergraph `(A, B, E)` with a
//! nonempty relation `π_e ⊆ Σ_A × Σ_B` on every superedge. Superedges are
//! kept sorted by `(a, b)`, so superedge ids coincide with the edge ids of
//! [`LabelCoverInstance::supergraph`], where the A block occupies vertices
//! `0..|A|` and the B block `|A|..|A|+|B|`.
//!
//! Relations are interned in a pool: constructions such as parallel
//! repetition produce hundreds of thousands of superedges that share a
//! handful of distinct relations.

use std::collections::{BTreeSet, HashMap};
use std::ops::Range;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, Distance, Graph, VertexId};

pub type Symbol = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::A => "A",
            Side::B => "B",
        }
    }
}

/// Sorted, duplicate-free, nonempty set of accepted `(α, β)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    pairs: Vec<(Symbol, Symbol)>,
}

impl Relation {
    pub fn new(mut pairs: Vec<(Symbol, Symbol)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::input("relation must be nonempty"));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Relation { pairs })
    }

    /// `Σ_A × Σ_B`.
    pub fn complete(sigma_a: u32, sigma_b: u32) -> Self {
        let pairs = (0..sigma_a)
            .flat_map(|a| (0..sigma_b).map(move |b| (a, b)))
            .collect::<Vec<_>>();
        Relation::new(pairs).expect("alphabets are nonempty")
    }

    pub fn pairs(&self) -> &[(Symbol, Symbol)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, alpha: Symbol, beta: Symbol) -> bool {
        self.pairs.binary_search(&(alpha, beta)).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SuperEdge {
    pub a: usize,
    pub b: usize,
    /// Index into [`LabelCoverInstance::relations`].
    pub relation: usize,
}

#[derive(Clone, Debug)]
pub struct LabelCoverInstance {
    a_count: usize,
    b_count: usize,
    sigma_a: u32,
    sigma_b: u32,
    edges: Vec<SuperEdge>,
    relations: Vec<Relation>,
}

impl PartialEq for LabelCoverInstance {
    fn eq(&self, other: &Self) -> bool {
        self.a_count == other.a_count
            && self.b_count == other.b_count
            && self.sigma_a == other.sigma_a
            && self.sigma_b == other.sigma_b
            && self.edges.len() == other.edges.len()
            && self.edges.iter().zip(&other.edges).all(|(x, y)| {
                (x.a, x.b) == (y.a, y.b) && self.relation(x) == other.relation(y)
            })
    }
}

impl Eq for LabelCoverInstance {}

impl LabelCoverInstance {
    /// Builds an instance from explicit `(a, b, relation)` triples, interning
    /// identical relations.
    pub fn new(
        a_count: usize,
        b_count: usize,
        sigma_a: u32,
        sigma_b: u32,
        edges: impl IntoIterator<Item = (usize, usize, Relation)>,
    ) -> Result<Self> {
        let mut pool: Vec<Relation> = Vec::new();
        let mut index: HashMap<Relation, usize> = HashMap::new();
        let mut list = Vec::new();
        for (a, b, rel) in edges {
            let id = *index.entry(rel.clone()).or_insert_with(|| {
                pool.push(rel);
                pool.len() - 1
            });
            list.push(SuperEdge { a, b, relation: id });
        }
        Self::from_pool(a_count, b_count, sigma_a, sigma_b, list, pool)
    }

    /// Builds an instance from superedges that reference a relation pool.
    /// Edges are sorted into canonical order and unused relations dropped.
    pub fn from_pool(
        a_count: usize,
        b_count: usize,
        sigma_a: u32,
        sigma_b: u32,
        mut edges: Vec<SuperEdge>,
        relations: Vec<Relation>,
    ) -> Result<Self> {
        if sigma_a == 0 || sigma_b == 0 {
            return Err(Error::input("alphabet sizes must be at least 1"));
        }
        for rel in &relations {
            if rel.is_empty() {
                return Err(Error::input("relation must be nonempty"));
            }
            if let Some(&(x, y)) = rel.pairs().iter().find(|&&(x, y)| x >= sigma_a || y >= sigma_b) {
                return Err(Error::input(format!(
                    "relation pair ({x}, {y}) outside Σ_A={sigma_a} × Σ_B={sigma_b}"
                )));
            }
        }
        for e in &edges {
            if e.a >= a_count || e.b >= b_count {
                return Err(Error::input(format!(
                    "superedge ({}, {}) outside |A|={a_count}, |B|={b_count}",
                    e.a, e.b
                )));
            }
            if e.relation >= relations.len() {
                return Err(Error::input(format!("relation id {} out of range", e.relation)));
            }
        }
        edges.sort_unstable_by_key(|e| (e.a, e.b));
        if let Some(w) = edges.windows(2).find(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b)) {
            return Err(Error::input(format!(
                "duplicate superedge ({}, {})",
                w[0].a, w[0].b
            )));
        }
        Ok(Self::compact(a_count, b_count, sigma_a, sigma_b, edges, relations))
    }

    /// Renumbers the pool in first-use order along the canonical edge list.
    fn compact(
        a_count: usize,
        b_count: usize,
        sigma_a: u32,
        sigma_b: u32,
        mut edges: Vec<SuperEdge>,
        relations: Vec<Relation>,
    ) -> Self {
        let mut remap = vec![usize::MAX; relations.len()];
        let mut pool = Vec::new();
        for e in &mut edges {
            if remap[e.relation] == usize::MAX {
                remap[e.relation] = pool.len();
                pool.push(relations[e.relation].clone());
            }
            e.relation = remap[e.relation];
        }
        LabelCoverInstance {
            a_count,
            b_count,
            sigma_a,
            sigma_b,
            edges,
            relations: pool,
        }
    }

    pub fn a_count(&self) -> usize {
        self.a_count
    }

    pub fn b_count(&self) -> usize {
        self.b_count
    }

    pub fn sigma_a(&self) -> u32 {
        self.sigma_a
    }

    pub fn sigma_b(&self) -> u32 {
        self.sigma_b
    }

    pub fn count(&self, side: Side) -> usize {
        match side {
            Side::A => self.a_count,
            Side::B => self.b_count,
        }
    }

    pub fn sigma(&self, side: Side) -> u32 {
        match side {
            Side::A => self.sigma_a,
            Side::B => self.sigma_b,
        }
    }

    /// Superedges in canonical `(a, b)` order.
    pub fn edges(&self) -> &[SuperEdge] {
        &self.edges
    }

    pub fn superedge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, e: &SuperEdge) -> &Relation {
        &self.relations[e.relation]
    }

    /// Supergraph size `ñ = |A| + |B|`.
    pub fn supervertex_count(&self) -> usize {
        self.a_count + self.b_count
    }

    /// Id of a supervertex in [`Self::supergraph`].
    pub fn supervertex(&self, side: Side, v: usize) -> VertexId {
        match side {
            Side::A => v,
            Side::B => self.a_count + v,
        }
    }

    pub fn find_superedge(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search_by_key(&(a, b), |e| (e.a, e.b)).ok()
    }

    pub fn degrees(&self, side: Side) -> Vec<usize> {
        let mut deg = vec![0; self.count(side)];
        for e in &self.edges {
            match side {
                Side::A => deg[e.a] += 1,
                Side::B => deg[e.b] += 1,
            }
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        let a = self.degrees(Side::A).into_iter().max().unwrap_or(0);
        let b = self.degrees(Side::B).into_iter().max().unwrap_or(0);
        a.max(b)
    }

    /// `Some(d)` when every supervertex has degree exactly `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let mut all = self.degrees(Side::A);
        all.extend(self.degrees(Side::B));
        let first = *all.first()?;
        all.iter().all(|&d| d == first).then_some(first)
    }

    /// Bipartite supergraph, A block first, one edge per superedge.
    pub fn supergraph(&self) -> Graph {
        let edges = self
            .edges
            .iter()
            .map(|e| (e.a, self.a_count + e.b))
            .collect();
        Graph::from_canonical(self.supervertex_count(), edges)
    }

    /// Girth of the supergraph.
    pub fn supergirth(&self) -> Distance {
        graph::girth(&self.supergraph())
    }

    /// Same supervertices and alphabets, keeping only the selected superedges.
    pub fn retain_edges(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(id, _)| keep(*id))
            .map(|(_, e)| *e)
            .collect();
        Self::compact(
            self.a_count,
            self.b_count,
            self.sigma_a,
            self.sigma_b,
            edges,
            self.relations.clone(),
        )
    }

    pub fn check_labeling(&self, lab: &Labeling) -> Result<()> {
        if lab.gamma_a.len() != self.a_count || lab.gamma_b.len() != self.b_count {
            return Err(Error::input(format!(
                "labeling covers {}+{} supervertices, instance has {}+{}",
                lab.gamma_a.len(),
                lab.gamma_b.len(),
                self.a_count,
                self.b_count
            )));
        }
        if let Some(s) = lab.gamma_a.iter().find(|&&s| s >= self.sigma_a) {
            return Err(Error::input(format!("A-label {s} outside Σ_A={}", self.sigma_a)));
        }
        if let Some(s) = lab.gamma_b.iter().find(|&&s| s >= self.sigma_b) {
            return Err(Error::input(format!("B-label {s} outside Σ_B={}", self.sigma_b)));
        }
        Ok(())
    }

    pub fn is_satisfied(&self, e: &SuperEdge, lab: &Labeling) -> bool {
        self.relation(e).contains(lab.gamma_a[e.a], lab.gamma_b[e.b])
    }

    pub fn satisfied_count(&self, lab: &Labeling) -> Result<usize> {
        self.check_labeling(lab)?;
        Ok(self.edges.iter().filter(|e| self.is_satisfied(e, lab)).count())
    }

    /// Fraction of satisfied superedges. An instance without superedges has value 1.
    pub fn value(&self, lab: &Labeling) -> Result<Ratio<u64>> {
        let sat = self.satisfied_count(lab)? as u64;
        if self.edges.is_empty() {
            return Ok(Ratio::from_integer(1));
        }
        Ok(Ratio::new(sat, self.edges.len() as u64))
    }

    /// Sum of relation sizes, i.e. the Min-Rep edge count.
    pub fn relation_pair_total(&self) -> usize {
        self.edges.iter().map(|e| self.relation(e).len()).sum()
    }
}

/// One symbol per supervertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    pub gamma_a: Vec<Symbol>,
    pub gamma_b: Vec<Symbol>,
}

impl Labeling {
    pub fn new(gamma_a: Vec<Symbol>, gamma_b: Vec<Symbol>) -> Self {
        Labeling { gamma_a, gamma_b }
    }

    pub fn uniform(lc: &LabelCoverInstance, symbol: Symbol) -> Self {
        Labeling {
            gamma_a: vec![symbol; lc.a_count()],
            gamma_b: vec![symbol; lc.b_count()],
        }
    }

    pub fn get(&self, side: Side, v: usize) -> Symbol {
        match side {
            Side::A => self.gamma_a[v],
            Side::B => self.gamma_b[v],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RepMember {
    pub side: Side,
    pub vertex: usize,
    pub symbol: Symbol,
}

/// A set of representatives `(side, supervertex, symbol)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepCover {
    members: BTreeSet<RepMember>,
}

impl RepCover {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, side: Side, vertex: usize, symbol: Symbol) -> bool {
        self.members.insert(RepMember {
            side,
            vertex,
            symbol,
        })
    }

    pub fn contains(&self, side: Side, vertex: usize, symbol: Symbol) -> bool {
        self.members.contains(&RepMember {
            side,
            vertex,
            symbol,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in `(side, vertex, symbol)` order.
    pub fn iter(&self) -> impl Iterator<Item = &RepMember> {
        self.members.iter()
    }
}

impl FromIterator<RepMember> for RepCover {
    fn from_iter<I: IntoIterator<Item = RepMember>>(iter: I) -> Self {
        RepCover {
            members: iter.into_iter().collect(),
        }
    }
}

/// The Min-Rep graph on `(A × Σ_A) ⊎ (B × Σ_B)`.
///
/// Vertex `(a, α)` has index `a·|Σ_A| + α`; vertex `(b, β)` has index
/// `|A|·|Σ_A| + b·|Σ_B| + β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinRepInstance {
    source: LabelCoverInstance,
    graph: Graph,
}

pub fn minrep_expand(lc: &LabelCoverInstance) -> MinRepInstance {
    let sa = lc.sigma_a() as usize;
    let sb = lc.sigma_b() as usize;
    let offset = lc.a_count() * sa;
    let n = offset + lc.b_count() * sb;
    let mut edges = Vec::with_capacity(lc.relation_pair_total());
    for e in lc.edges() {
        for &(alpha, beta) in lc.relation(e).pairs() {
            edges.push((e.a * sa + alpha as usize, offset + e.b * sb + beta as usize));
        }
    }
    edges.sort_unstable();
    MinRepInstance {
        source: lc.clone(),
        graph: Graph::from_canonical(n, edges),
    }
}

impl MinRepInstance {
    pub fn source(&self) -> &LabelCoverInstance {
        &self.source
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Min-Rep graph size `n = |A|·|Σ_A| + |B|·|Σ_B|`.
    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn vertex_index(&self, side: Side, v: usize, symbol: Symbol) -> VertexId {
        let lc = &self.source;
        match side {
            Side::A => v * lc.sigma_a() as usize + symbol as usize,
            Side::B => {
                lc.a_count() * lc.sigma_a() as usize
                    + v * lc.sigma_b() as usize
                    + symbol as usize
            }
        }
    }

    pub fn member_of(&self, index: VertexId) -> RepMember {
        let lc = &self.source;
        let sa = lc.sigma_a() as usize;
        let sb = lc.sigma_b() as usize;
        let offset = lc.a_count() * sa;
        if index < offset {
            RepMember {
                side: Side::A,
                vertex: index / sa,
                symbol: (index % sa) as Symbol,
            }
        } else {
            let r = index - offset;
            RepMember {
                side: Side::B,
                vertex: r / sb,
                symbol: (r % sb) as Symbol,
            }
        }
    }

    /// Index range of the group `A_v` or `B_v`.
    pub fn group(&self, side: Side, v: usize) -> Range<VertexId> {
        let start = self.vertex_index(side, v, 0);
        start..start + self.source.sigma(side) as usize
    }

    /// Min-Rep edges `(u, w)` realising superedge `e`, in lexicographic order.
    pub fn superedge_pairs(&self, e: SuperEdge) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.source.relation(&e).pairs().iter().map(move |&(alpha, beta)| {
            (
                self.vertex_index(Side::A, e.a, alpha),
                self.vertex_index(Side::B, e.b, beta),
            )
        })
    }

    fn check_cover_ranges(&self, cover: &RepCover) -> Result<()> {
        for m in cover.iter() {
            if m.vertex >= self.source.count(m.side) || m.symbol >= self.source.sigma(m.side) {
                return Err(Error::input(format!(
                    "cover member {} {} {} out of range",
                    m.side.as_str(),
                    m.vertex,
                    m.symbol
                )));
            }
        }
        Ok(())
    }

    /// First superedge (canonical order) with no covering representative pair.
    pub fn first_uncovered(&self, cover: &RepCover) -> Result<Option<usize>> {
        self.check_cover_ranges(cover)?;
        let lc = &self.source;
        let mut sym_a: Vec<Vec<Symbol>> = vec![Vec::new(); lc.a_count()];
        let mut sym_b: Vec<Vec<Symbol>> = vec![Vec::new(); lc.b_count()];
        for m in cover.iter() {
            match m.side {
                Side::A => sym_a[m.vertex].push(m.symbol),
                Side::B => sym_b[m.vertex].push(m.symbol),
            }
        }
        for (id, e) in lc.edges().iter().enumerate() {
            let rel = lc.relation(e);
            let covered = sym_a[e.a]
                .iter()
                .any(|&x| sym_b[e.b].iter().any(|&y| rel.contains(x, y)));
            if !covered {
                return Ok(Some(id));
            }
        }
        Ok(None)
    }

    pub fn repcover_valid(&self, cover: &RepCover) -> Result<bool> {
        Ok(self.first_uncovered(cover)?.is_none())
    }

    /// Supervertices with at least one incident superedge; every valid cover
    /// holds at least this many members.
    pub fn non_isolated_supervertices(&self) -> usize {
        let lc = &self.source;
        let a = lc.degrees(Side::A).iter().filter(|&&d| d > 0).count();
        let b = lc.degrees(Side::B).iter().filter(|&&d| d > 0).count();
        a + b
    }
}

/// One representative per supervertex: the symbol the labeling assigns.
pub fn labeling_to_repcover(lc: &LabelCoverInstance, lab: &Labeling) -> Result<RepCover> {
    lc.check_labeling(lab)?;
    let a = lab.gamma_a.iter().enumerate().map(|(v, &s)| RepMember {
        side: Side::A,
        vertex: v,
        symbol: s,
    });
    let b = lab.gamma_b.iter().enumerate().map(|(v, &s)| RepMember {
        side: Side::B,
        vertex: v,
        symbol: s,
    });
    Ok(a.chain(b).collect())
}

/// Small fixed instances shared by tests, examples and the acceptance suite.
pub mod fixtures {
    use super::*;

    /// Four-cycle a0-b0-a1-b1 over `{0,1}` with three equality relations
    /// and one inequality relation; no labeling satisfies all four.
    pub fn xor_odd_cycle() -> LabelCoverInstance {
        let eq = Relation::new(vec![(0, 0), (1, 1)]).unwrap();
        let ne = Relation::new(vec![(0, 1), (1, 0)]).unwrap();
        LabelCoverInstance::new(
            2,
            2,
            2,
            2,
            [
                (0, 0, eq.clone()),
                (0, 1, eq.clone()),
                (1, 0, eq),
                (1, 1, ne),
            ],
        )
        .unwrap()
    }

    pub fn single_edge(relation: Vec<(Symbol, Symbol)>, sigma_a: u32, sigma_b: u32) -> LabelCoverInstance {
        LabelCoverInstance::new(1, 1, sigma_a, sigma_b, [(0, 0, Relation::new(relation).unwrap())]).unwrap()
    }
}
