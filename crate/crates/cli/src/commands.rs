use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use log::{info, warn};

use lcspanner::constructions::{gen_3sat5, lc_from_3sat5, parallel_repetition, regularize};
use lcspanner::format;
use lcspanner::graph::{self, Graph};
use lcspanner::oracles::{self, OracleBudget};
use lcspanner::pipeline::{self, run_pipeline, PipelineConfig, PipelineRun};
use lcspanner::rng::derive_seed;
use lcspanner::spanner::{
    build_spanner_instance, first_unspanned_edge, greedy_spanner, EdgeSubset, SpannerInstance, SpannerOptions,
};
use lcspanner::subsample::{self, SampleParams};
use lcspanner::{minrep_expand, LabelCoverInstance};

use crate::{Budget, Command, Gadget, Output, PipelineArgs, Sample};

/// A verification that ran to completion and failed.
#[derive(Debug)]
struct Rejected(String);

impl std::fmt::Display for Rejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Rejected {}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Rejected>().is_some() {
        return 1;
    }
    match err.chain().find_map(|e| e.downcast_ref::<lcspanner::Error>()) {
        Some(e) if e.is_resource() => 3,
        _ => 2,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_lc(path: &Path) -> Result<LabelCoverInstance> {
    format::parse_lc(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph> {
    format::parse_graph(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_subset(path: &Path, host: &Graph) -> Result<EdgeSubset> {
    EdgeSubset::parse(&read(path)?, host).with_context(|| format!("in {}", path.display()))
}

fn oracle_budget(b: &Budget) -> Result<OracleBudget> {
    let time_limit = match b.time_limit {
        Some(s) if s.is_finite() && s > 0.0 => Some(Duration::from_secs_f64(s)),
        Some(s) => bail!(lcspanner::Error::Input(format!("time limit must be positive, got {s}"))),
        None => None,
    };
    Ok(OracleBudget {
        max_search_space: b.budget,
        time_limit,
    })
}

fn gadget(lc: &LabelCoverInstance, g: &Gadget) -> Result<SpannerInstance> {
    let opts = SpannerOptions {
        copies: g.copies,
        allow_short_supergirth: g.unsafe_supergirth,
        edge_budget: g.edge_budget,
    };
    let si = build_spanner_instance(&minrep_expand(lc), g.k, &opts)?;
    for w in si.warnings() {
        warn!("{w}");
    }
    Ok(si)
}

fn sample_params(s: &Sample) -> Result<SampleParams> {
    let mut params = SampleParams::new(s.alpha, s.k, derive_seed(s.seed, "subsample", 0))?;
    params.clamp_p = !s.no_clamp;
    if let Some(d) = s.degree {
        params = params.with_degree(d);
    }
    Ok(params)
}

/// The first edge of `host` that `h` does not span within `k` hops, described.
fn unspanned(host: &Graph, h: &EdgeSubset, k: usize) -> Result<Option<String>> {
    Ok(first_unspanned_edge(host, h, k)?.map(|e| {
        let (u, v) = host.edges()[e];
        format!("not a {k}-spanner: edge {e} ({u}, {v}) is not spanned")
    }))
}

/// Input check for commands whose argument must already be a spanner.
fn require_spanner(host: &Graph, h: &EdgeSubset, k: usize) -> Result<()> {
    match unspanned(host, h, k)? {
        None => Ok(()),
        Some(msg) => Err(lcspanner::Error::Input(msg).into()),
    }
}

pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::Gen3Sat5 {
            vars,
            seed,
            planted,
            output,
        } => {
            let bits = planted.then(|| pipeline::planted_bits(seed, vars));
            let f = gen_3sat5(vars, derive_seed(seed, "gen-3sat5", 0), bits.as_deref())?;
            emit(&output, &format::write_formula(&f))?;
        }
        Command::LcFrom3Sat { formula, output } => {
            let f = format::parse_formula(&read(&formula)?).with_context(|| format!("in {}", formula.display()))?;
            emit(&output, &format::write_lc(&lc_from_3sat5(&f)))?;
        }
        Command::Regularize { instance, output } => {
            emit(&output, &format::write_lc(&regularize(&load_lc(&instance)?)?))?;
        }
        Command::Parrep {
            instance,
            ell,
            budget,
            output,
        } => {
            let lc = parallel_repetition(&load_lc(&instance)?, ell, budget)?;
            emit(&output, &format::write_lc(&lc))?;
        }
        Command::Subsample {
            instance,
            sample,
            output,
        } => {
            let lc = load_lc(&instance)?;
            let s = subsample::subsample(&lc, &sample_params(&sample)?)?;
            if s.probability.clamped {
                warn!("sampling probability {} clamped to 1", s.probability.raw);
            }
            info!("p = {}, kept {} of {} superedges", s.probability.p, s.kept.len(), lc.superedge_count());
            emit(&output, &format::write_lc(&s.instance))?;
        }
        Command::StripCycles { instance, k, output } => {
            let stripped = subsample::strip_bad_edges(&load_lc(&instance)?, k);
            info!(
                "removed {} superedges, supergirth now {}",
                stripped.removed.len(),
                stripped.instance.supergirth()
            );
            emit(&output, &format::write_lc(&stripped.instance))?;
        }
        Command::Girth { input } => {
            let text = read(&input)?;
            let g = if text.trim_start().starts_with("LC") {
                format::parse_lc(&text)?.supergraph()
            } else {
                format::parse_graph(&text)?
            };
            println!("{}", graph::girth(&g));
        }
        Command::MinrepExpand { instance, output } => {
            let mr = minrep_expand(&load_lc(&instance)?);
            emit(&output, &format::write_graph(mr.graph()))?;
        }
        Command::SpannerReduce {
            instance,
            gadget: g,
            meta,
            output,
        } => {
            let si = gadget(&load_lc(&instance)?, &g)?;
            info!(
                "gadget: {} vertices, {} edges, x = {}",
                si.base().vertex_count(),
                si.base().edge_count(),
                si.x()
            );
            emit(&output, &format::write_graph(si.base()))?;
            if let Some(path) = meta {
                write_file(&path, &serde_json::to_string_pretty(&si.metadata())?)?;
            }
        }
        Command::SpannerVerify { graph, subset, k } => {
            let host = load_graph(&graph)?;
            let h = load_subset(&subset, &host)?;
            if let Some(msg) = unspanned(&host, &h, k)? {
                return Err(Rejected(msg).into());
            }
            println!("verified: {} of {} edges form a {k}-spanner", h.len(), host.edge_count());
        }
        Command::SpannerGreedy { graph, k, output } => {
            let host = load_graph(&graph)?;
            emit(&output, &greedy_spanner(&host, k).to_text())?;
        }
        Command::SpannerFromCover {
            instance,
            cover,
            gadget: g,
            output,
        } => {
            let si = gadget(&load_lc(&instance)?, &g)?;
            let c = format::parse_cover(&read(&cover)?).with_context(|| format!("in {}", cover.display()))?;
            if let Some(e) = si.source().first_uncovered(&c)? {
                bail!(lcspanner::Error::Input(format!("not a REP-cover: superedge {e} has no covered pair")));
            }
            let h = si.spanner_from_repcover(&c)?;
            emit(&output, &h.to_text())?;
        }
        Command::CoverFromSpanner {
            instance,
            subset,
            gadget: g,
            output,
        } => {
            let si = gadget(&load_lc(&instance)?, &g)?;
            let h = load_subset(&subset, si.base())?;
            require_spanner(si.base(), &h, si.k())?;
            let extracted = si.repcover_from_spanner(&h)?;
            info!("cover of size {} from copy {}", extracted.cover.len(), extracted.copy);
            emit(&output, &format::write_cover(&extracted.cover))?;
        }
        Command::MakeProper {
            instance,
            subset,
            gadget: g,
            output,
        } => {
            let si = gadget(&load_lc(&instance)?, &g)?;
            let h = load_subset(&subset, si.base())?;
            require_spanner(si.base(), &h, si.k())?;
            emit(&output, &si.make_proper(&h)?.to_text())?;
        }
        Command::SolveLcExact {
            instance,
            budget,
            output,
        } => {
            let lc = load_lc(&instance)?;
            let best = oracles::lc_value_exact(&lc, &oracle_budget(&budget)?)?;
            println!(
                "value {} ({} of {} superedges)",
                best.value,
                best.satisfied,
                lc.superedge_count()
            );
            if let Some(path) = &output.out {
                write_file(path, &format::write_labeling(&best.labeling))?;
            }
        }
        Command::SolveCoverExact {
            instance,
            budget,
            output,
        } => {
            let mr = minrep_expand(&load_lc(&instance)?);
            let cover = oracles::min_repcover_exact(&mr, &oracle_budget(&budget)?)?;
            println!("minimum REP-cover size {}", cover.len());
            if let Some(path) = &output.out {
                write_file(path, &format::write_cover(&cover))?;
            }
        }
        Command::SolveSpannerExact {
            graph,
            k,
            budget,
            output,
        } => {
            let host = load_graph(&graph)?;
            let h = oracles::min_spanner_exact(&host, k, &oracle_budget(&budget)?)?;
            println!("minimum {k}-spanner size {}", h.len());
            if let Some(path) = &output.out {
                write_file(path, &h.to_text())?;
            }
        }
        Command::Pipeline(args) => return run_pipeline_command(&args),
        Command::Stats {
            instance,
            sample,
            trials,
            labeling,
            output,
        } => {
            let lc = load_lc(&instance)?;
            let lab = match labeling {
                Some(path) => Some(
                    format::parse_labeling(&read(&path)?, &lc).with_context(|| format!("in {}", path.display()))?,
                ),
                None => None,
            };
            let start = Instant::now();
            let doc = pipeline::stats_document(&lc, &sample_params(&sample)?, trials, lab.as_ref())?;
            info!("stats computed in {:.2?}", start.elapsed());
            emit(&output, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
        }
    }
    Ok(0)
}

struct Artifacts {
    dir: PathBuf,
    written: Vec<(String, usize)>,
}

impl Artifacts {
    fn write(&mut self, name: &str, text: &str) -> Result<()> {
        write_file(&self.dir.join(name), text)?;
        self.written.push((name.to_string(), text.len()));
        Ok(())
    }

    fn read(&self, name: &str) -> Result<String> {
        read(&self.dir.join(name))
    }
}

fn run_pipeline_command(args: &PipelineArgs) -> Result<u8> {
    let mut cfg = PipelineConfig::new(args.vars, args.ell, args.alpha, args.k, args.seed);
    cfg.planted = args.planted;
    cfg.copies = args.copies;
    cfg.clamp_p = !args.no_clamp;
    cfg.repetition_budget = args.repetition_budget;
    cfg.edge_budget = args.edge_budget;
    let start = Instant::now();
    let run = run_pipeline(&cfg)?;
    info!("pipeline finished in {:.2?}", start.elapsed());
    for w in &run.trace.warnings {
        warn!("{w}");
    }

    fs::create_dir_all(&args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let mut out = Artifacts {
        dir: args.out_dir.clone(),
        written: Vec::new(),
    };
    out.write("formula.cnf", &format::write_formula(&run.formula))?;
    out.write("label_cover.lc", &format::write_lc(&run.label_cover))?;
    out.write("regularized.lc", &format::write_lc(&run.regularized))?;
    out.write("repeated.lc", &format::write_lc(&run.repeated))?;
    out.write("sampled.lc", &format::write_lc(&run.sampled.instance))?;
    out.write("stripped.lc", &format::write_lc(&run.stripped))?;
    if let Some(lab) = &run.labeling {
        out.write("planted.label", &format::write_labeling(lab))?;
    }
    out.write("minrep.graph", &format::write_graph(run.minrep.graph()))?;
    out.write("gadget.graph", &format::write_graph(run.spanner.base()))?;
    if args.meta {
        out.write("gadget.meta.json", &serde_json::to_string_pretty(&run.spanner.metadata())?)?;
    }
    out.write("spanner.subset", &run.spanner_edges.to_text())?;
    out.write("proper.subset", &run.extracted.proper.to_text())?;
    out.write("cover.txt", &format::write_cover(&run.extracted.cover))?;
    out.write("trace.json", &(serde_json::to_string_pretty(&run.trace)? + "\n"))?;

    audit(&out, &run).context("artifact self-audit failed")?;
    print_summary(&run, &out);
    if !run.trace.outcome.passed() {
        return Err(Rejected(format!("reduction checks failed: {:?}", run.trace.outcome)).into());
    }
    Ok(0)
}

/// Re-parses every artifact and compares it with the in-memory value and
/// the sizes recorded in the trace.
fn audit(out: &Artifacts, run: &PipelineRun) -> Result<()> {
    let mismatch = |what: &str| anyhow!(Rejected(format!("{what} does not match its artifact")));
    if format::parse_formula(&out.read("formula.cnf")?)? != run.formula {
        return Err(mismatch("formula"));
    }
    for (name, lc) in [
        ("label_cover.lc", &run.label_cover),
        ("regularized.lc", &run.regularized),
        ("repeated.lc", &run.repeated),
        ("sampled.lc", &run.sampled.instance),
        ("stripped.lc", &run.stripped),
    ] {
        if &format::parse_lc(&out.read(name)?)? != lc {
            return Err(mismatch(name));
        }
    }
    let stripped = format::parse_lc(&out.read("stripped.lc")?)?;
    if let Some(lab) = &run.labeling {
        if &format::parse_labeling(&out.read("planted.label")?, &stripped)? != lab {
            return Err(mismatch("planted labeling"));
        }
    }
    let minrep = format::parse_graph(&out.read("minrep.graph")?)?;
    let gadget = format::parse_graph(&out.read("gadget.graph")?)?;
    if &minrep != run.minrep.graph() || &gadget != run.spanner.base() {
        return Err(mismatch("graph"));
    }
    let h = EdgeSubset::parse(&out.read("spanner.subset")?, &gadget)?;
    let proper = EdgeSubset::parse(&out.read("proper.subset")?, &gadget)?;
    let cover = format::parse_cover(&out.read("cover.txt")?)?;
    if h != run.spanner_edges || proper != run.extracted.proper || cover != run.extracted.cover {
        return Err(mismatch("spanner or cover"));
    }

    let t = &run.trace;
    let sizes = [
        ("stripped superedges", t.stripped.superedges, stripped.superedge_count()),
        ("Min-Rep vertices", t.minrep_vertices, minrep.vertex_count()),
        ("Min-Rep edges", t.minrep_edges, minrep.edge_count()),
        ("gadget vertices", t.spanner.vertices, gadget.vertex_count()),
        ("gadget edges", t.spanner.edges, gadget.edge_count()),
        ("spanner size", t.outcome.spanner_size, h.len()),
        ("proper spanner size", t.outcome.proper_size, proper.len()),
        ("extracted cover size", t.outcome.extracted_cover_size, cover.len()),
    ];
    for (what, traced, recomputed) in sizes {
        if traced != recomputed {
            return Err(anyhow!(Rejected(format!("trace records {what} {traced}, artifact has {recomputed}"))));
        }
    }
    if t.supergirth != stripped.supergirth() {
        return Err(mismatch("supergirth"));
    }
    Ok(())
}

fn print_summary(run: &PipelineRun, out: &Artifacts) {
    let t = &run.trace;
    println!("{:<14} {:>8} {:>8} {:>6} {:>6} {:>10}", "stage", "|A|", "|B|", "σ_A", "σ_B", "superedges");
    for (name, s) in [
        ("label cover", &t.label_cover),
        ("regularized", &t.regularized),
        ("repeated", &t.repeated),
        ("sampled", &t.sampled),
        ("stripped", &t.stripped),
    ] {
        println!(
            "{name:<14} {:>8} {:>8} {:>6} {:>6} {:>10}",
            s.a_count, s.b_count, s.sigma_a, s.sigma_b, s.superedges
        );
    }
    println!("sampling p        {} (raw {})", t.probability.p, t.probability.raw);
    println!("supergirth        {} (stripped {} superedges)", t.supergirth, t.stripped_edges);
    if let Some((before, after)) = &t.planted_values {
        println!("planted value     {before} before sampling, {after} after stripping");
    }
    let s = &t.spanner;
    println!(
        "gadget            {} vertices, {} edges, k = {}, x = {} (floor {})",
        s.vertices, s.edges, s.k, s.x, s.copy_floor
    );
    let o = &t.outcome;
    println!(
        "spanner           {} edges from {}, verified {}",
        o.spanner_size, o.spanner_source, o.spanner_verified
    );
    if let Some(bound) = o.spanner_bound {
        println!("spanner bound     {bound}");
    }
    println!(
        "extracted cover   {} members from copy {}, valid {}, within bound {}",
        o.extracted_cover_size, o.extracted_copy, o.extracted_cover_valid, o.cover_within_bound
    );
    println!("artifacts in {}:", out.dir.display());
    for (name, bytes) in &out.written {
        println!("  {name:<18} {bytes} bytes");
    }
}
