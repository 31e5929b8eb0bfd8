//! The instance pipeline: 3SAT(5) formulas, the clause/variable Label Cover
//! instance, regularisation by duplication and parallel repetition.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::label_cover::{LabelCoverInstance, Labeling, Relation, Side, SuperEdge, Symbol};
use crate::rng;

/// Occurrences of every variable in a 3SAT(5) formula.
pub const OCCURRENCES: usize = 5;
/// Satisfying assignments of a 3-literal clause.
pub const CLAUSE_ALPHABET: u32 = 7;
/// Default cap on the number of superedges produced by [`parallel_repetition`].
pub const DEFAULT_REPETITION_BUDGET: u128 = 10_000_000;

const MAX_GENERATION_ATTEMPTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }
}

pub type Clause = [Literal; 3];

/// 3-CNF formula in which every variable occurs in exactly five clauses.
///
/// Literals within a clause are stored sorted by variable, and the variables
/// of a clause are distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula3Sat5 {
    var_count: usize,
    clauses: Vec<Clause>,
    seed: Option<u64>,
    planted: Option<Vec<bool>>,
}

impl Formula3Sat5 {
    pub fn new(
        var_count: usize,
        mut clauses: Vec<Clause>,
        seed: Option<u64>,
        planted: Option<Vec<bool>>,
    ) -> Result<Self> {
        check_var_count(var_count)?;
        if clauses.len() != OCCURRENCES * var_count / 3 {
            return Err(Error::input(format!(
                "{} clauses, expected 5n'/3 = {}",
                clauses.len(),
                OCCURRENCES * var_count / 3
            )));
        }
        let mut occurrences = vec![0usize; var_count];
        for (i, clause) in clauses.iter_mut().enumerate() {
            clause.sort();
            if clause.iter().any(|l| l.var >= var_count) {
                return Err(Error::input(format!("clause {i} uses a variable outside 0..{var_count}")));
            }
            if clause[0].var == clause[1].var || clause[1].var == clause[2].var {
                return Err(Error::input(format!("clause {i} repeats a variable")));
            }
            for l in clause.iter() {
                occurrences[l.var] += 1;
            }
        }
        if let Some(v) = occurrences.iter().position(|&c| c != OCCURRENCES) {
            return Err(Error::input(format!(
                "variable {v} occurs {} times, expected {OCCURRENCES}",
                occurrences[v]
            )));
        }
        if let Some(p) = &planted {
            if p.len() != var_count {
                return Err(Error::input("planted assignment length differs from variable count"));
            }
        }
        Ok(Formula3Sat5 {
            var_count,
            clauses,
            seed,
            planted,
        })
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn planted(&self) -> Option<&[bool]> {
        self.planted.as_deref()
    }

    pub fn satisfied_clauses(&self, assignment: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|l| l.holds(assignment)))
            .count()
    }
}

fn check_var_count(n_prime: usize) -> Result<()> {
    if n_prime < 3 || !n_prime.is_multiple_of(3) {
        return Err(Error::input(format!(
            "variable count must be a positive multiple of 3, got {n_prime}"
        )));
    }
    Ok(())
}

/// Random 3SAT(5) formula from a configuration model: five slots per
/// variable are shuffled into triples, reshuffling whenever a triple repeats
/// a variable. Polarities are uniform; with a planted assignment, any clause
/// it falsifies gets one uniformly chosen literal flipped.
pub fn gen_3sat5(n_prime: usize, seed: u64, planted: Option<&[bool]>) -> Result<Formula3Sat5> {
    check_var_count(n_prime)?;
    if planted.is_some_and(|p| p.len() != n_prime) {
        return Err(Error::input("planted assignment length differs from variable count"));
    }
    let mut rng = rng::stream(seed);
    let mut slots: Vec<usize> = (0..n_prime)
        .flat_map(|v| std::iter::repeat_n(v, OCCURRENCES))
        .collect();
    let mut attempts = 0;
    loop {
        attempts += 1;
        slots.shuffle(&mut rng);
        if slots
            .chunks_exact(3)
            .all(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
        {
            break;
        }
        if attempts == MAX_GENERATION_ATTEMPTS {
            return Err(Error::resource(
                "3SAT(5) triple partition attempts",
                attempts as u128 + 1,
                MAX_GENERATION_ATTEMPTS as u128,
            ));
        }
    }
    let clauses = slots
        .chunks_exact(3)
        .map(|t| {
            let mut clause: Clause = [0, 1, 2].map(|i| Literal {
                var: t[i],
                positive: rng.random::<bool>(),
            });
            if let Some(p) = planted {
                if !clause.iter().any(|l| l.holds(p)) {
                    let j = rng.random_range(0..3);
                    clause[j].positive = !clause[j].positive;
                }
            }
            clause
        })
        .collect();
    Formula3Sat5::new(n_prime, clauses, Some(seed), planted.map(<[bool]>::to_vec))
}

/// The seven satisfying assignments of `clause` as 3-bit masks, ascending.
/// Bit 2 holds the first variable, bit 0 the last.
pub fn clause_assignments(clause: &Clause) -> [u8; 7] {
    let falsifying = clause
        .iter()
        .fold(0u8, |acc, l| (acc << 1) | u8::from(!l.positive));
    let mut out = [0u8; 7];
    let mut i = 0;
    for m in 0..8u8 {
        if m != falsifying {
            out[i] = m;
            i += 1;
        }
    }
    out
}

fn mask_bit(mask: u8, position: usize) -> u8 {
    (mask >> (2 - position)) & 1
}

/// Clause/variable Label Cover instance: A = clauses (alphabet: the seven
/// satisfying assignments), B = variables (alphabet `{false, true}`), one
/// superedge per occurrence whose relation checks consistency.
pub fn lc_from_3sat5(f: &Formula3Sat5) -> LabelCoverInstance {
    let mut pool: Vec<Relation> = Vec::new();
    let mut index: HashMap<(usize, [u8; 7]), usize> = HashMap::new();
    let mut edges = Vec::with_capacity(3 * f.clauses().len());
    for (c, clause) in f.clauses().iter().enumerate() {
        let sat = clause_assignments(clause);
        for (pos, lit) in clause.iter().enumerate() {
            let id = *index.entry((pos, sat)).or_insert_with(|| {
                let pairs = sat
                    .iter()
                    .enumerate()
                    .map(|(alpha, &m)| (alpha as Symbol, mask_bit(m, pos) as Symbol))
                    .collect();
                pool.push(Relation::new(pairs).expect("seven pairs"));
                pool.len() - 1
            });
            edges.push(SuperEdge {
                a: c,
                b: lit.var,
                relation: id,
            });
        }
    }
    LabelCoverInstance::from_pool(f.clauses().len(), f.var_count(), CLAUSE_ALPHABET, 2, edges, pool)
        .expect("3SAT(5) instance is well formed")
}

/// Labeling induced by a variable assignment. Clauses the assignment
/// falsifies get symbol 0.
pub fn lift_assignment(f: &Formula3Sat5, assignment: &[bool]) -> Result<Labeling> {
    if assignment.len() != f.var_count() {
        return Err(Error::input("assignment length differs from variable count"));
    }
    let gamma_a = f
        .clauses()
        .iter()
        .map(|clause| {
            let m = clause
                .iter()
                .fold(0u8, |acc, l| (acc << 1) | u8::from(assignment[l.var]));
            clause_assignments(clause)
                .iter()
                .position(|&s| s == m)
                .unwrap_or(0) as Symbol
        })
        .collect();
    let gamma_b = assignment.iter().map(|&b| Symbol::from(b)).collect();
    Ok(Labeling::new(gamma_a, gamma_b))
}

/// `(d_A, d_B)` when every A vertex has degree `d_A ≥ 1` and every B vertex
/// degree `d_B ≥ 1`.
pub fn biregular_degrees(lc: &LabelCoverInstance) -> Result<(usize, usize)> {
    let uniform = |side: Side| -> Result<usize> {
        let deg = lc.degrees(side);
        match deg.first() {
            Some(&d) if d > 0 && deg.iter().all(|&x| x == d) => Ok(d),
            _ => Err(Error::Precondition(format!(
                "regularize needs every {}-vertex to have the same positive degree",
                side.as_str()
            ))),
        }
    };
    Ok((uniform(Side::A)?, uniform(Side::B)?))
}

/// Duplication: `d_A` copies of A, `d_B` copies of B and a copy of the edge
/// set between every pair of copies, so every vertex ends with degree
/// `d_A·d_B`. For a 3SAT(5) instance that is three copies of A, five of B,
/// and a 15-regular result with `|A'| = |B'| = 5n'`.
///
/// Copy `i` of A vertex `a` is `i·|A| + a`; likewise for B.
pub fn regularize(lc: &LabelCoverInstance) -> Result<LabelCoverInstance> {
    let (da, db) = biregular_degrees(lc)?;
    let (na, nb) = (lc.a_count(), lc.b_count());
    let mut edges = Vec::with_capacity(da * db * lc.superedge_count());
    for i in 0..da {
        for j in 0..db {
            edges.extend(lc.edges().iter().map(|e| SuperEdge {
                a: i * na + e.a,
                b: j * nb + e.b,
                relation: e.relation,
            }));
        }
    }
    LabelCoverInstance::from_pool(
        da * na,
        db * nb,
        lc.sigma_a(),
        lc.sigma_b(),
        edges,
        lc.relations().to_vec(),
    )
}

fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    (0..exp).try_fold(1u128, |acc, _| acc.checked_mul(base))
}

/// Digits of `x` in base `base`, most significant first, `len` of them.
fn digits(mut x: usize, base: usize, len: usize, out: &mut [usize]) {
    for slot in out[..len].iter_mut().rev() {
        *slot = x % base;
        x /= base;
    }
}

/// `ℓ`-fold parallel repetition with explicit tuple enumeration.
///
/// Vertices, symbols and superedges are `ℓ`-tuples indexed row-major (first
/// coordinate most significant). A tuple of symbols satisfies a tuple of
/// superedges iff every coordinate is satisfied. Fails with a resource error
/// when `|E|^ℓ` exceeds `budget`.
pub fn parallel_repetition(
    lc: &LabelCoverInstance,
    ell: usize,
    budget: u128,
) -> Result<LabelCoverInstance> {
    if ell == 0 {
        return Err(Error::input("repetition count must be at least 1"));
    }
    let m = lc.superedge_count();
    let required = checked_pow(m as u128, ell).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::resource("parallel repetition superedges", required, budget));
    }
    let too_big = |what: &str, base: usize| -> Result<usize> {
        checked_pow(base as u128, ell)
            .filter(|&v| v <= u32::MAX as u128)
            .map(|v| v as usize)
            .ok_or_else(|| {
                Error::resource(
                    what,
                    checked_pow(base as u128, ell).unwrap_or(u128::MAX),
                    u32::MAX as u128,
                )
            })
    };
    let sigma_a = too_big("repeated Σ_A", lc.sigma_a() as usize)?;
    let sigma_b = too_big("repeated Σ_B", lc.sigma_b() as usize)?;
    let a_count = too_big("repeated |A|", lc.a_count())?;
    let b_count = too_big("repeated |B|", lc.b_count())?;

    let mut pool: Vec<Relation> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut edges = Vec::with_capacity(required as usize);
    let mut tuple = vec![0usize; ell];
    for t in 0..required as usize {
        digits(t, m, ell, &mut tuple);
        let mut a = 0;
        let mut b = 0;
        let mut rels = Vec::with_capacity(ell);
        for &ei in &tuple {
            let e = lc.edges()[ei];
            a = a * lc.a_count() + e.a;
            b = b * lc.b_count() + e.b;
            rels.push(e.relation);
        }
        let id = match index.get(&rels) {
            Some(&id) => id,
            None => {
                pool.push(product_relation(lc, &rels));
                index.insert(rels, pool.len() - 1);
                pool.len() - 1
            }
        };
        edges.push(SuperEdge { a, b, relation: id });
    }
    LabelCoverInstance::from_pool(
        a_count,
        b_count,
        sigma_a as u32,
        sigma_b as u32,
        edges,
        pool,
    )
}

fn product_relation(lc: &LabelCoverInstance, rels: &[usize]) -> Relation {
    let (sa, sb) = (lc.sigma_a(), lc.sigma_b());
    let mut pairs: Vec<(Symbol, Symbol)> = vec![(0, 0)];
    for &r in rels {
        let factor = lc.relations()[r].pairs();
        pairs = pairs
            .iter()
            .flat_map(|&(x, y)| factor.iter().map(move |&(p, q)| (x * sa + p, y * sb + q)))
            .collect();
    }
    Relation::new(pairs).expect("product of nonempty relations")
}

/// Pipeline stage a labeling is carried through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftStage {
    Regularize,
    Repetition(usize),
}

/// Carries a labeling of `pre` through a stage: copied per block for
/// regularisation, coordinate-wise tuples for repetition.
pub fn lift_labeling(pre: &LabelCoverInstance, lab: &Labeling, stage: LiftStage) -> Result<Labeling> {
    pre.check_labeling(lab)?;
    match stage {
        LiftStage::Regularize => {
            let (da, db) = biregular_degrees(pre)?;
            Ok(Labeling::new(
                lab.gamma_a.repeat(da),
                lab.gamma_b.repeat(db),
            ))
        }
        LiftStage::Repetition(ell) => {
            if ell == 0 {
                return Err(Error::input("repetition count must be at least 1"));
            }
            let lift = |gamma: &[Symbol], sigma: u32| -> Result<Vec<Symbol>> {
                let count = checked_pow(gamma.len() as u128, ell)
                    .filter(|&c| c <= 1 << 32)
                    .ok_or_else(|| Error::resource("lifted labeling", u128::MAX, 1 << 32))?
                    as usize;
                let mut tuple = vec![0usize; ell];
                Ok((0..count)
                    .map(|t| {
                        digits(t, gamma.len(), ell, &mut tuple);
                        tuple.iter().fold(0, |acc, &v| acc * sigma + gamma[v])
                    })
                    .collect())
            };
            Ok(Labeling::new(
                lift(&lab.gamma_a, pre.sigma_a())?,
                lift(&lab.gamma_b, pre.sigma_b())?,
            ))
        }
    }
}
