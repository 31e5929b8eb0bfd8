use lcspanner::format;
use lcspanner::pipeline::{run_pipeline, PipelineConfig};
use lcspanner::spanner::{verify_spanner, CopyCount, EdgeSubset};

fn planted_run() -> lcspanner::pipeline::PipelineRun {
    let mut cfg = PipelineConfig::new(3, 1, 4.0, 3, 7);
    cfg.planted = true;
    run_pipeline(&cfg).unwrap()
}

#[test]
fn every_pipeline_artifact_round_trips() {
    let run = planted_run();
    let text = format::write_formula(&run.formula);
    assert_eq!(format::parse_formula(&text).unwrap(), run.formula);
    for lc in [&run.label_cover, &run.regularized, &run.repeated, &run.stripped] {
        let text = format::write_lc(lc);
        let back = format::parse_lc(&text).unwrap();
        assert_eq!(&back, lc);
        assert_eq!(format::write_lc(&back), text);
    }
    let lab = run.labeling.as_ref().unwrap();
    let text = format::write_labeling(lab);
    assert_eq!(&format::parse_labeling(&text, &run.stripped).unwrap(), lab);

    let g = run.spanner.base();
    let text = format::write_graph(g);
    assert_eq!(&format::parse_graph(&text).unwrap(), g);
    let subset = EdgeSubset::parse(&run.spanner_edges.to_text(), g).unwrap();
    assert_eq!(subset, run.spanner_edges);
    let cover = format::parse_cover(&format::write_cover(&run.extracted.cover)).unwrap();
    assert_eq!(cover, run.extracted.cover);
    assert!(run.spanner.source().repcover_valid(&cover).unwrap());

    let meta = run.spanner.metadata();
    let json = serde_json::to_string(&meta).unwrap();
    let back: lcspanner::spanner::SpannerMeta = serde_json::from_str(&json).unwrap();
    assert_eq!(back, meta);
}

#[test]
fn trace_sizes_match_the_artifacts() {
    let run = planted_run();
    let t = &run.trace;
    assert!(t.outcome.passed());
    assert!(t.supergirth.exceeds(4));
    assert_eq!(t.stripped.superedges, run.stripped.superedge_count());
    assert_eq!(t.spanner.edges, run.spanner.base().edge_count());
    assert_eq!(t.spanner.vertices, run.spanner.base().vertex_count());
    assert_eq!(t.outcome.spanner_size, run.spanner_edges.len());
    assert_eq!(t.outcome.extracted_cover_size, run.extracted.cover.len());
    assert!(verify_spanner(run.spanner.base(), &run.spanner_edges, 3).unwrap());
}

#[test]
fn subset_from_another_host_is_rejected() {
    let run = planted_run();
    let other = lcspanner::graph::named::cycle(5);
    assert!(EdgeSubset::parse(&run.spanner_edges.to_text(), &other).is_err());
}

#[test]
fn greedy_pipeline_is_reproducible() {
    let mut cfg = PipelineConfig::new(3, 1, 1.0, 3, 11);
    cfg.copies = CopyCount::Fixed(2);
    let a = run_pipeline(&cfg).unwrap();
    let b = run_pipeline(&cfg).unwrap();
    assert_eq!(a.spanner_edges, b.spanner_edges);
    assert_eq!(
        serde_json::to_string(&a.trace).unwrap(),
        serde_json::to_string(&b.trace).unwrap()
    );
}
