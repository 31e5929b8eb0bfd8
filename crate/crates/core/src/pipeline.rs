//! End-to-end runs: formula → Label Cover → regularise → repeat → sample →
//! strip → Min-Rep → spanner gadget → spanner → REP-cover, with a trace of
//! every stage.
//!
//! Stage seeds are derived from the master seed: the formula uses
//! `derive_seed(seed, "gen-3sat5", 0)`, the planted assignment
//! `derive_seed(seed, "planted", 0)` and the subsampling
//! `derive_seed(seed, "subsample", 0)`.

use log::info;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::{
    self, gen_3sat5, lc_from_3sat5, lift_assignment, lift_labeling, parallel_repetition, regularize,
    Formula3Sat5, LiftStage,
};
use crate::error::{Error, Result};
use crate::graph::Distance;
use crate::label_cover::{labeling_to_repcover, minrep_expand, LabelCoverInstance, Labeling, MinRepInstance};
use crate::rng;
use crate::spanner::{
    self, build_spanner_instance, greedy_spanner, CopyCount, EdgeSubset, ExtractedCover, SpannerInstance,
    SpannerOptions,
};
use crate::subsample::{
    self, degree_stats, montecarlo_kept_edges, montecarlo_satisfied, DegreeStats, MonteCarloSummary,
    SampleParams, SampleProbability, Subsample,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Number of formula variables (a positive multiple of 3).
    pub vars: usize,
    /// Parallel repetition exponent.
    pub ell: usize,
    pub alpha: f64,
    /// Spanner stretch; sampling strips cycles of length ≤ k + 1.
    pub k: usize,
    pub seed: u64,
    /// Plant a satisfying assignment and carry it through every stage.
    pub planted: bool,
    pub copies: CopyCount,
    pub clamp_p: bool,
    pub repetition_budget: u128,
    pub edge_budget: u128,
}

impl PipelineConfig {
    pub fn new(vars: usize, ell: usize, alpha: f64, k: usize, seed: u64) -> Self {
        PipelineConfig {
            vars,
            ell,
            alpha,
            k,
            seed,
            planted: false,
            copies: CopyCount::Default,
            clamp_p: true,
            repetition_budget: constructions::DEFAULT_REPETITION_BUDGET,
            edge_budget: spanner::DEFAULT_EDGE_BUDGET,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub a_count: usize,
    pub b_count: usize,
    pub sigma_a: u32,
    pub sigma_b: u32,
    pub superedges: usize,
    pub max_degree: usize,
}

impl InstanceSummary {
    pub fn of(lc: &LabelCoverInstance) -> Self {
        InstanceSummary {
            a_count: lc.a_count(),
            b_count: lc.b_count(),
            sigma_a: lc.sigma_a(),
            sigma_b: lc.sigma_b(),
            superedges: lc.superedge_count(),
            max_degree: lc.max_degree(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpannerSummary {
    pub k: usize,
    pub k_a: usize,
    pub k_b: usize,
    pub x: usize,
    pub copy_floor: usize,
    pub size_bounds_apply: bool,
    pub n: usize,
    pub n_tilde: usize,
    pub vertices: usize,
    pub edges: usize,
    pub hat_edges: usize,
    pub host: String,
}

/// What the final stages produced and whether each check passed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionOutcome {
    /// `"planted-cover"` or `"greedy"`.
    pub spanner_source: String,
    pub input_cover_size: Option<usize>,
    pub spanner_size: usize,
    pub spanner_verified: bool,
    /// `(k+1)·x·|C|` for the planted cover, when the size bounds apply.
    pub spanner_bound: Option<u128>,
    pub proper_size: usize,
    pub extracted_copy: usize,
    pub extracted_cover_size: usize,
    pub extracted_cover_valid: bool,
    /// Whether `|C'| ≤ 6|H|/x`.
    pub cover_within_bound: bool,
}

impl ReductionOutcome {
    /// Every check that applies passed.
    pub fn passed(&self) -> bool {
        self.spanner_verified
            && self.extracted_cover_valid
            && self.cover_within_bound
            && self.spanner_bound.is_none_or(|b| self.spanner_size as u128 <= b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub schema: String,
    pub config: PipelineConfig,
    pub gen_seed: u64,
    pub subsample_seed: u64,
    pub planted_assignment: Option<String>,
    pub label_cover: InstanceSummary,
    pub regularized: InstanceSummary,
    pub repeated: InstanceSummary,
    pub probability: SampleProbability,
    pub sampled: InstanceSummary,
    pub stripped_edges: usize,
    pub stripped: InstanceSummary,
    pub supergirth: Distance,
    pub degrees: DegreeStats,
    /// Value of the carried planted labeling on the repeated and the final
    /// instance, as `"num/den"`.
    pub planted_values: Option<(String, String)>,
    pub minrep_vertices: usize,
    pub minrep_edges: usize,
    pub spanner: SpannerSummary,
    pub outcome: ReductionOutcome,
    pub warnings: Vec<String>,
}

/// Artifacts of a pipeline run.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub formula: Formula3Sat5,
    pub label_cover: LabelCoverInstance,
    pub regularized: LabelCoverInstance,
    pub repeated: LabelCoverInstance,
    pub sampled: Subsample,
    pub stripped: LabelCoverInstance,
    pub labeling: Option<Labeling>,
    pub minrep: MinRepInstance,
    pub spanner: SpannerInstance,
    pub spanner_edges: EdgeSubset,
    pub extracted: ExtractedCover,
    pub trace: PipelineTrace,
}

/// Planted assignment the pipeline derives from its master seed.
pub fn planted_bits(seed: u64, vars: usize) -> Vec<bool> {
    let mut stream = rng::stream(rng::derive_seed(seed, "planted", 0));
    (0..vars).map(|_| stream.random::<bool>()).collect()
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineRun> {
    if cfg.ell == 0 {
        return Err(Error::input("repetition count must be at least 1"));
    }
    if cfg.k < 3 {
        return Err(Error::input(format!("stretch k must be at least 3, got {}", cfg.k)));
    }
    let mut warnings = Vec::new();
    let gen_seed = rng::derive_seed(cfg.seed, "gen-3sat5", 0);
    let subsample_seed = rng::derive_seed(cfg.seed, "subsample", 0);
    let planted = cfg.planted.then(|| planted_bits(cfg.seed, cfg.vars));

    let formula = gen_3sat5(cfg.vars, gen_seed, planted.as_deref())?;
    let label_cover = lc_from_3sat5(&formula);
    let regularized = regularize(&label_cover)?;
    let repeated = parallel_repetition(&regularized, cfg.ell, cfg.repetition_budget)?;
    info!(
        "repeated instance: |A|={} |B|={} |E|={}",
        repeated.a_count(),
        repeated.b_count(),
        repeated.superedge_count()
    );

    let labeling = match &planted {
        Some(bits) => {
            let lab = lift_assignment(&formula, bits)?;
            let lab = lift_labeling(&label_cover, &lab, LiftStage::Regularize)?;
            Some(lift_labeling(&regularized, &lab, LiftStage::Repetition(cfg.ell))?)
        }
        None => None,
    };

    let params = SampleParams {
        alpha: cfg.alpha,
        k: cfg.k + 1,
        seed: subsample_seed,
        clamp_p: cfg.clamp_p,
        degree: None,
    };
    params.validate()?;
    let sampled = subsample::subsample(&repeated, &params)?;
    if sampled.probability.clamped {
        warnings.push(format!("sampling probability {} clamped to 1", sampled.probability.raw));
    }
    let stripped = subsample::strip_bad_edges(&sampled.instance, cfg.k + 1);
    let supergirth = stripped.instance.supergirth();
    let stripped_edges = stripped.removed.len();
    let stripped = stripped.instance;

    let planted_values = match &labeling {
        Some(lab) => Some((
            repeated.value(lab)?.to_string(),
            stripped.value(lab)?.to_string(),
        )),
        None => None,
    };

    let minrep = minrep_expand(&stripped);
    let opts = SpannerOptions {
        copies: cfg.copies,
        allow_short_supergirth: false,
        edge_budget: cfg.edge_budget,
    };
    let si = build_spanner_instance(&minrep, cfg.k, &opts)?;
    warnings.extend(si.warnings().iter().cloned());
    info!(
        "gadget graph: {} vertices, {} edges, x = {}",
        si.base().vertex_count(),
        si.base().edge_count(),
        si.x()
    );

    let (source, input_cover, h) = match &labeling {
        Some(lab) => {
            let cover = labeling_to_repcover(&stripped, lab)?;
            let h = si.spanner_from_repcover(&cover)?;
            ("planted-cover", Some(cover), h)
        }
        None => ("greedy", None, greedy_spanner(si.base(), cfg.k)),
    };
    let spanner_verified = spanner::verify_spanner(si.base(), &h, cfg.k)?;
    let extracted = si.repcover_from_spanner(&h)?;
    let extracted_cover_valid = minrep.repcover_valid(&extracted.cover)?;
    let bounds = si.size_bounds_apply();
    let spanner_bound = match &input_cover {
        Some(c) if bounds && c.len() >= si.n_tilde() => Some(spanner::spanner_size_bound(cfg.k, si.x(), c.len())),
        _ => None,
    };
    let outcome = ReductionOutcome {
        spanner_source: source.to_string(),
        input_cover_size: input_cover.as_ref().map(|c| c.len()),
        spanner_size: h.len(),
        spanner_verified,
        spanner_bound,
        proper_size: extracted.proper.len(),
        extracted_copy: extracted.copy,
        extracted_cover_size: extracted.cover.len(),
        extracted_cover_valid,
        cover_within_bound: !bounds || spanner::cover_within_bound(extracted.cover.len(), h.len(), si.x()),
    };

    let trace = PipelineTrace {
        schema: "pipeline_trace_v1".to_string(),
        config: *cfg,
        gen_seed,
        subsample_seed,
        planted_assignment: planted
            .as_ref()
            .map(|bits| bits.iter().map(|&b| if b { '1' } else { '0' }).collect()),
        label_cover: InstanceSummary::of(&label_cover),
        regularized: InstanceSummary::of(&regularized),
        repeated: InstanceSummary::of(&repeated),
        probability: sampled.probability,
        sampled: InstanceSummary::of(&sampled.instance),
        stripped_edges,
        stripped: InstanceSummary::of(&stripped),
        supergirth,
        degrees: degree_stats(&stripped),
        planted_values,
        minrep_vertices: minrep.vertex_count(),
        minrep_edges: minrep.graph().edge_count(),
        spanner: SpannerSummary {
            k: si.k(),
            k_a: si.k_a(),
            k_b: si.k_b(),
            x: si.x(),
            copy_floor: spanner::copy_floor(&minrep),
            size_bounds_apply: bounds,
            n: si.n(),
            n_tilde: si.n_tilde(),
            vertices: si.base().vertex_count(),
            edges: si.base().edge_count(),
            hat_edges: si.hat_edges().len(),
            host: si.fingerprint().to_string(),
        },
        outcome,
        warnings,
    };

    Ok(PipelineRun {
        formula,
        label_cover,
        regularized,
        repeated,
        sampled,
        stripped,
        labeling,
        minrep,
        spanner: si,
        spanner_edges: h,
        extracted,
        trace,
    })
}

/// Sampling statistics document (`stats_v1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsDocument {
    pub schema: String,
    pub params: SampleParams,
    pub probability: SampleProbability,
    pub instance: InstanceSummary,
    pub degrees: DegreeStats,
    pub supergirth: Distance,
    pub sampled: InstanceSummary,
    pub sampled_degrees: DegreeStats,
    pub bad_edges: usize,
    pub stripped: InstanceSummary,
    pub stripped_degrees: DegreeStats,
    pub stripped_supergirth: Distance,
    pub trials: usize,
    pub kept_edges: Option<MonteCarloSummary>,
    pub satisfied: Option<MonteCarloSummary>,
}

/// One sample-and-strip run with `params`, plus Monte Carlo aggregates over
/// `trials` independent trials (none when `trials` is 0). The satisfied
/// count is tracked when a labeling is given.
pub fn stats_document(
    lc: &LabelCoverInstance,
    params: &SampleParams,
    trials: usize,
    labeling: Option<&Labeling>,
) -> Result<StatsDocument> {
    let (sampled, stripped, stats) = subsample::sample_and_strip(lc, params)?;
    let kept_edges = if trials > 0 {
        Some(montecarlo_kept_edges(lc, params, trials)?)
    } else {
        None
    };
    let satisfied = match labeling {
        Some(lab) if trials > 0 => Some(montecarlo_satisfied(lc, lab, params, trials)?),
        _ => None,
    };
    Ok(StatsDocument {
        schema: "stats_v1".to_string(),
        params: *params,
        probability: stats.probability,
        instance: InstanceSummary::of(lc),
        degrees: stats.degrees_before,
        supergirth: lc.supergirth(),
        sampled: InstanceSummary::of(&sampled.instance),
        sampled_degrees: stats.degrees_sampled,
        bad_edges: stats.bad_edges,
        stripped: InstanceSummary::of(&stripped.instance),
        stripped_degrees: stats.degrees_after,
        stripped_supergirth: stats.girth_after,
        trials,
        kept_edges,
        satisfied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_run_passes_every_check() {
        let mut cfg = PipelineConfig::new(3, 1, 4.0, 3, 7);
        cfg.planted = true;
        let run = run_pipeline(&cfg).unwrap();
        let t = &run.trace;
        assert_eq!((t.regularized.a_count, t.regularized.b_count), (15, 15));
        assert_eq!(t.planted_values, Some(("1".to_string(), "1".to_string())));
        assert!(t.supergirth.exceeds(cfg.k + 1));
        assert!(t.outcome.passed(), "{:?}", t.outcome);
        assert_eq!(t.outcome.input_cover_size, Some(30));
    }

    #[test]
    fn greedy_run_and_determinism() {
        let mut cfg = PipelineConfig::new(3, 1, 2.0, 3, 11);
        cfg.copies = CopyCount::Floor;
        let a = run_pipeline(&cfg).unwrap();
        let b = run_pipeline(&cfg).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.trace.outcome.spanner_source, "greedy");
        assert!(a.trace.outcome.passed(), "{:?}", a.trace.outcome);
    }

    #[test]
    fn stats_document_serializes() {
        let f = gen_3sat5(3, 1, None).unwrap();
        let lc = regularize(&lc_from_3sat5(&f)).unwrap();
        let params = SampleParams::new(2.0, 4, 5).unwrap();
        let doc = stats_document(&lc, &params, 20, None).unwrap();
        let json = serde_json::to_string(&doc).unwrap();
        assert!(json.contains("\"schema\":\"stats_v1\""));
        let back: StatsDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
    }
}
