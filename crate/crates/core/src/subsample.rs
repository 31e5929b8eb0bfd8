//! Superedge subsampling, short-cycle stripping and the Monte Carlo harness
//! used to check the sampling statistics empirically.
//!
//! Each superedge is kept independently with probability
//! `p = α·log2|Σ_A| / d`. The decision for superedge `e` is
//! [`rng::item_keep`]`(seed, e, p)`, so the sampled edge set depends only on
//! the instance, `p` and the seed. Monte Carlo trial `t` uses the seed
//! [`rng::derive_seed`]`(seed, "trial", t)`.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, Bfs, Distance, Graph};
use crate::label_cover::{LabelCoverInstance, Labeling, Side};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleParams {
    pub alpha: f64,
    /// Cycle-length threshold: stripping removes superedges on cycles of length ≤ k.
    pub k: usize,
    pub seed: u64,
    /// Clamp `p` to 1 instead of rejecting `α·log2|Σ_A| > d`.
    pub clamp_p: bool,
    /// Degree used in `p`; defaults to the maximum supergraph degree.
    pub degree: Option<usize>,
}

impl SampleParams {
    pub fn new(alpha: f64, k: usize, seed: u64) -> Result<Self> {
        let params = SampleParams {
            alpha,
            k,
            seed,
            clamp_p: true,
            degree: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_degree(mut self, d: usize) -> Self {
        self.degree = Some(d);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::input(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.k < 3 {
            return Err(Error::input(format!("cycle threshold k must be at least 3, got {}", self.k)));
        }
        if self.degree == Some(0) {
            return Err(Error::input("degree override must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleProbability {
    /// `α·log2|Σ_A| / d` before clamping.
    pub raw: f64,
    pub p: f64,
    pub clamped: bool,
    pub degree: usize,
}

/// `p = α·log2(σ_A)/d`, clamped to 1 when `clamp` is set.
pub fn sample_probability(alpha: f64, sigma_a: u32, d: usize, clamp: bool) -> Result<SampleProbability> {
    if sigma_a < 2 {
        return Err(Error::input(format!("|Σ_A| must be at least 2, got {sigma_a}")));
    }
    if d == 0 {
        return Err(Error::input("degree must be at least 1"));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::input(format!("alpha must be positive, got {alpha}")));
    }
    let raw = alpha * f64::from(sigma_a).log2() / d as f64;
    if raw > 1.0 && !clamp {
        return Err(Error::input(format!(
            "sampling probability {raw} exceeds 1 and clamping is disabled"
        )));
    }
    Ok(SampleProbability {
        raw,
        p: raw.min(1.0),
        clamped: raw > 1.0,
        degree: d,
    })
}

/// Degree entering `p`: the override, else the maximum supergraph degree.
pub fn sampling_degree(lc: &LabelCoverInstance, params: &SampleParams) -> Result<usize> {
    if let Some(d) = params.degree {
        return Ok(d);
    }
    if lc.regular_degree().is_none() {
        warn!(
            "supergraph is not regular; using maximum degree {} for the sampling probability",
            lc.max_degree()
        );
    }
    match lc.max_degree() {
        0 => Err(Error::input("instance has no superedges and no degree override")),
        d => Ok(d),
    }
}

pub fn params_probability(lc: &LabelCoverInstance, params: &SampleParams) -> Result<SampleProbability> {
    params.validate()?;
    let d = sampling_degree(lc, params)?;
    let prob = sample_probability(params.alpha, lc.sigma_a(), d, params.clamp_p)?;
    if prob.clamped {
        warn!("sampling probability {} clamped to 1", prob.raw);
    }
    Ok(prob)
}

#[derive(Clone, Debug)]
pub struct Subsample {
    pub instance: LabelCoverInstance,
    pub probability: SampleProbability,
    /// Ids (in the input) of the superedges that survived.
    pub kept: Vec<usize>,
}

/// Keeps every superedge independently with probability `p`; relations and
/// supervertices are untouched.
pub fn subsample(lc: &LabelCoverInstance, params: &SampleParams) -> Result<Subsample> {
    let probability = params_probability(lc, params)?;
    let kept: Vec<usize> = (0..lc.superedge_count())
        .filter(|&e| rng::item_keep(params.seed, e as u64, probability.p))
        .collect();
    let mut mask = vec![false; lc.superedge_count()];
    for &e in &kept {
        mask[e] = true;
    }
    Ok(Subsample {
        instance: lc.retain_edges(|e| mask[e]),
        probability,
        kept,
    })
}

/// Superedges lying on a cycle of length at most `k` in the supergraph.
pub fn bad_edges(lc: &LabelCoverInstance, k: usize) -> Vec<usize> {
    short_cycle_edges(&lc.supergraph(), k)
}

pub(crate) fn short_cycle_edges(g: &Graph, k: usize) -> Vec<usize> {
    (0..g.edge_count())
        .into_par_iter()
        .map_init(
            || Bfs::new(g.vertex_count()),
            |bfs, e| graph::edge_cycle_length_with(g, e, Some(k), bfs).is_finite(),
        )
        .enumerate()
        .filter(|(_, bad)| *bad)
        .map(|(e, _)| e)
        .collect()
}

#[derive(Clone, Debug)]
pub struct Stripped {
    pub instance: LabelCoverInstance,
    /// Ids (in the input) of the removed superedges, ascending.
    pub removed: Vec<usize>,
}

/// Removes, in one simultaneous pass, every superedge on a cycle of length
/// at most `k`. Removal cannot create cycles, so the result has supergirth
/// greater than `k`.
pub fn strip_bad_edges(lc: &LabelCoverInstance, k: usize) -> Stripped {
    let removed = bad_edges(lc, k);
    let mut bad = vec![false; lc.superedge_count()];
    for &e in &removed {
        bad[e] = true;
    }
    Stripped {
        instance: lc.retain_edges(|e| !bad[e]),
        removed,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DegreeSummary {
    pub min: usize,
    pub mean: f64,
    pub max: usize,
}

impl DegreeSummary {
    fn of(degrees: &[usize]) -> Self {
        if degrees.is_empty() {
            return Self::default();
        }
        DegreeSummary {
            min: *degrees.iter().min().unwrap(),
            mean: degrees.iter().sum::<usize>() as f64 / degrees.len() as f64,
            max: *degrees.iter().max().unwrap(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub a: DegreeSummary,
    pub b: DegreeSummary,
    pub all: DegreeSummary,
}

/// Exact per-side degree summaries of the supergraph.
pub fn degree_stats(lc: &LabelCoverInstance) -> DegreeStats {
    let a = lc.degrees(Side::A);
    let b = lc.degrees(Side::B);
    let all: Vec<usize> = a.iter().chain(&b).copied().collect();
    DegreeStats {
        a: DegreeSummary::of(&a),
        b: DegreeSummary::of(&b),
        all: DegreeSummary::of(&all),
    }
}

/// Evidence gathered along one sample-then-strip run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub params: SampleParams,
    pub probability: SampleProbability,
    pub edges_before: usize,
    pub edges_sampled: usize,
    pub bad_edges: usize,
    pub edges_after: usize,
    pub degrees_before: DegreeStats,
    pub degrees_sampled: DegreeStats,
    pub degrees_after: DegreeStats,
    pub girth_after: Distance,
}

/// Subsamples, strips cycles of length ≤ `params.k` and records the counts.
pub fn sample_and_strip(
    lc: &LabelCoverInstance,
    params: &SampleParams,
) -> Result<(Subsample, Stripped, SampleStats)> {
    let sampled = subsample(lc, params)?;
    let stripped = strip_bad_edges(&sampled.instance, params.k);
    let stats = SampleStats {
        params: *params,
        probability: sampled.probability,
        edges_before: lc.superedge_count(),
        edges_sampled: sampled.instance.superedge_count(),
        bad_edges: stripped.removed.len(),
        edges_after: stripped.instance.superedge_count(),
        degrees_before: degree_stats(lc),
        degrees_sampled: degree_stats(&sampled.instance),
        degrees_after: degree_stats(&stripped.instance),
        girth_after: stripped.instance.supergirth(),
    };
    Ok((sampled, stripped, stats))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub trials: usize,
    pub p: f64,
    pub mean: f64,
    pub std_dev: f64,
    pub std_error: f64,
    /// Value the mean should concentrate around.
    pub expected: f64,
}

impl MonteCarloSummary {
    fn from_counts(counts: &[usize], p: f64, expected: f64) -> Self {
        let n = counts.len() as f64;
        let mean = counts.iter().sum::<usize>() as f64 / n;
        let var = if counts.len() > 1 {
            counts
                .iter()
                .map(|&c| (c as f64 - mean).powi(2))
                .sum::<f64>()
                / (n - 1.0)
        } else {
            0.0
        };
        MonteCarloSummary {
            trials: counts.len(),
            p,
            mean,
            std_dev: var.sqrt(),
            std_error: (var / n).sqrt(),
            expected,
        }
    }

    /// `|mean − expected|` in standard errors (0 when both are degenerate).
    pub fn z_score(&self) -> f64 {
        let diff = (self.mean - self.expected).abs();
        if self.std_error == 0.0 {
            if diff == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            diff / self.std_error
        }
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    Ok(())
}

fn trial_seed(params: &SampleParams, t: usize) -> u64 {
    rng::derive_seed(params.seed, "trial", t as u64)
}

/// Mean number of kept superedges over independent trials.
pub fn montecarlo_kept_edges(
    lc: &LabelCoverInstance,
    params: &SampleParams,
    trials: usize,
) -> Result<MonteCarloSummary> {
    check_trials(trials)?;
    let p = params_probability(lc, params)?.p;
    let m = lc.superedge_count();
    let counts: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(params, t);
            (0..m).filter(|&e| rng::item_keep(seed, e as u64, p)).count()
        })
        .collect();
    Ok(MonteCarloSummary::from_counts(&counts, p, p * m as f64))
}

/// Mean number of superedges that are both kept and satisfied by `lab`.
pub fn montecarlo_satisfied(
    lc: &LabelCoverInstance,
    lab: &Labeling,
    params: &SampleParams,
    trials: usize,
) -> Result<MonteCarloSummary> {
    check_trials(trials)?;
    let p = params_probability(lc, params)?.p;
    let satisfied: Vec<usize> = lc
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| lc.is_satisfied(e, lab))
        .map(|(id, _)| id)
        .collect();
    lc.check_labeling(lab)?;
    let counts: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(params, t);
            satisfied
                .iter()
                .filter(|&&e| rng::item_keep(seed, e as u64, p))
                .count()
        })
        .collect();
    Ok(MonteCarloSummary::from_counts(&counts, p, p * satisfied.len() as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeBandSummary {
    pub trials: usize,
    pub lower: f64,
    pub upper: f64,
    pub vertex_trials: usize,
    pub outside: usize,
    pub fraction_outside: f64,
}

/// Fraction of (vertex, trial) pairs whose sampled degree falls outside
/// `[lower, upper]`.
pub fn montecarlo_degree_band(
    lc: &LabelCoverInstance,
    params: &SampleParams,
    trials: usize,
    lower: f64,
    upper: f64,
) -> Result<DegreeBandSummary> {
    check_trials(trials)?;
    let p = params_probability(lc, params)?.p;
    let na = lc.a_count();
    let nv = lc.supervertex_count();
    let outside: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(params, t);
            let mut deg = vec![0usize; nv];
            for (id, e) in lc.edges().iter().enumerate() {
                if rng::item_keep(seed, id as u64, p) {
                    deg[e.a] += 1;
                    deg[na + e.b] += 1;
                }
            }
            deg.iter()
                .filter(|&&d| (d as f64) < lower || (d as f64) > upper)
                .count()
        })
        .collect();
    let outside: usize = outside.iter().sum();
    let vertex_trials = nv * trials;
    Ok(DegreeBandSummary {
        trials,
        lower,
        upper,
        vertex_trials,
        outside,
        fraction_outside: outside as f64 / vertex_trials as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortCycleSummary {
    pub trials: usize,
    pub k: usize,
    pub kept_edges: usize,
    pub short_cycle_edges: usize,
    /// Empirical probability that a kept superedge lies on a cycle of length ≤ k.
    pub frequency: f64,
    /// `2·(α·log2|Σ_A|)^(k−1) / d`.
    pub bound: f64,
}

/// Frequency with which a kept superedge lies on a short cycle of the
/// sampled supergraph, next to the union bound `2(α log|Σ_A|)^(k−1)/d`.
pub fn montecarlo_short_cycles(
    lc: &LabelCoverInstance,
    params: &SampleParams,
    trials: usize,
) -> Result<ShortCycleSummary> {
    check_trials(trials)?;
    let prob = params_probability(lc, params)?;
    let per_trial: Vec<(usize, usize)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sampled = subsample(lc, &params.with_seed(trial_seed(params, t)))
                .expect("parameters validated above");
            let g = sampled.instance.supergraph();
            let mut bfs = Bfs::new(g.vertex_count());
            let short = (0..g.edge_count())
                .filter(|&e| graph::edge_cycle_length_with(&g, e, Some(params.k), &mut bfs).is_finite())
                .count();
            (g.edge_count(), short)
        })
        .collect();
    let kept_edges: usize = per_trial.iter().map(|x| x.0).sum();
    let short: usize = per_trial.iter().map(|x| x.1).sum();
    let mean_degree = params.alpha * f64::from(lc.sigma_a()).log2();
    Ok(ShortCycleSummary {
        trials,
        k: params.k,
        kept_edges,
        short_cycle_edges: short,
        frequency: if kept_edges == 0 { 0.0 } else { short as f64 / kept_edges as f64 },
        bound: 2.0 * mean_degree.powi(params.k as i32 - 1) / prob.degree as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;
    use crate::label_cover::Relation;

    fn from_graph(g: &Graph, a: usize) -> LabelCoverInstance {
        LabelCoverInstance::new(
            a,
            g.vertex_count() - a,
            2,
            2,
            g.edges().iter().map(|&(u, v)| (u, v - a, Relation::complete(2, 2))),
        )
        .unwrap()
    }

    fn c6() -> LabelCoverInstance {
        // a0-b0-a1-b1-a2-b2-a0
        LabelCoverInstance::new(
            3,
            3,
            2,
            2,
            (0..3).flat_map(|i| [(i, i, Relation::complete(2, 2)), ((i + 1) % 3, i, Relation::complete(2, 2))]),
        )
        .unwrap()
    }

    #[test]
    fn probability_arithmetic() {
        assert_eq!(sample_probability(2.0, 2, 8, true).unwrap().p, 0.25);
        let p = sample_probability(8.0, 4, 16, true).unwrap();
        assert_eq!((p.p, p.clamped), (1.0, false));
        let p = sample_probability(32.0, 16, 64, true).unwrap();
        assert_eq!((p.raw, p.p, p.clamped), (2.0, 1.0, true));
        assert!(sample_probability(32.0, 16, 64, false).is_err());
        assert!(sample_probability(1.0, 1, 64, true).is_err());
        assert!(sample_probability(1.0, 2, 0, true).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(SampleParams::new(0.0, 3, 0).is_err());
        assert!(SampleParams::new(1.0, 2, 0).is_err());
        assert!(SampleParams::new(f64::NAN, 3, 0).is_err());
    }

    #[test]
    fn full_probability_keeps_everything() {
        let lc = c6();
        let params = SampleParams::new(100.0, 3, 5).unwrap();
        let s = subsample(&lc, &params).unwrap();
        assert!(s.probability.clamped);
        assert_eq!(s.instance, lc);
    }

    #[test]
    fn sampling_is_deterministic() {
        let lc = c6();
        let params = SampleParams::new(1.0, 3, 99).unwrap();
        let x = subsample(&lc, &params).unwrap();
        let y = subsample(&lc, &params).unwrap();
        assert_eq!(x.kept, y.kept);
        assert_eq!(x.instance, y.instance);
    }

    #[test]
    fn bad_edges_on_six_cycle() {
        let lc = c6();
        assert_eq!(lc.supergirth(), Distance::Finite(6));
        assert_eq!(bad_edges(&lc, 6), (0..6).collect::<Vec<_>>());
        assert!(bad_edges(&lc, 5).is_empty());
    }

    #[test]
    fn k23_is_stripped_bare() {
        let lc = from_graph(&named::complete_bipartite(2, 3), 2);
        assert_eq!(bad_edges(&lc, 4).len(), 6);
        let s = strip_bad_edges(&lc, 4);
        assert_eq!(s.instance.superedge_count(), 0);
        assert_eq!(s.instance.supergirth(), Distance::Infinite);
    }

    #[test]
    fn forests_are_untouched() {
        let lc = from_graph(&named::star(4), 1);
        for k in 3..8 {
            assert_eq!(strip_bad_edges(&lc, k).instance, lc);
        }
    }

    #[test]
    fn degree_stats_examples() {
        let lc = c6();
        let s = degree_stats(&lc);
        assert_eq!((s.all.min, s.all.max, s.all.mean), (2, 2, 2.0));
        let empty = LabelCoverInstance::new(0, 0, 1, 1, Vec::new()).unwrap();
        assert_eq!(degree_stats(&empty), DegreeStats::default());
    }

    #[test]
    fn montecarlo_edge_cases() {
        let lc = c6();
        let params = SampleParams::new(100.0, 3, 1).unwrap();
        let all_sat = Labeling::uniform(&lc, 0);
        let m = montecarlo_satisfied(&lc, &all_sat, &params, 50).unwrap();
        assert_eq!((m.mean, m.std_error), (6.0, 0.0));

        let never = LabelCoverInstance::new(
            1,
            1,
            2,
            2,
            [(0, 0, Relation::new(vec![(1, 1)]).unwrap())],
        )
        .unwrap();
        let m = montecarlo_satisfied(&never, &Labeling::uniform(&never, 0), &params, 10).unwrap();
        assert_eq!(m.mean, 0.0);
        assert!(montecarlo_kept_edges(&lc, &params, 0).is_err());
    }

    #[test]
    fn trials_do_not_depend_on_thread_count() {
        let lc = c6();
        let params = SampleParams::new(0.5, 3, 17).unwrap().with_degree(2);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| montecarlo_kept_edges(&lc, &params, 500).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
