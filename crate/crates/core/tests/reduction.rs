use num_rational::Ratio;
use proptest::prelude::*;

use lcspanner::oracles::{self, OracleBudget};
use lcspanner::spanner::{
    build_spanner_instance, cover_within_bound, spanner_size_bound, verify_spanner, CopyCount, EdgeFamily,
    SpannerOptions,
};
use lcspanner::subsample::{self, SampleParams};
use lcspanner::{
    labeling_to_repcover, minrep_expand, LabelCoverInstance, Labeling, RepCover, Relation, Side,
};

fn arb_relation(sa: u32, sb: u32) -> impl Strategy<Value = Relation> {
    let all: Vec<(u32, u32)> = (0..sa).flat_map(|x| (0..sb).map(move |y| (x, y))).collect();
    proptest::sample::subsequence(all.clone(), 1..=all.len()).prop_map(|p| Relation::new(p).unwrap())
}

/// Tiny instances with up to three supervertices per side.
fn arb_lc() -> impl Strategy<Value = LabelCoverInstance> {
    (1..=3usize, 1..=3usize, 1..=3u32, 1..=3u32).prop_flat_map(|(a, b, sa, sb)| {
        let slots: Vec<(usize, usize)> = (0..a).flat_map(|i| (0..b).map(move |j| (i, j))).collect();
        let n = slots.len();
        (
            proptest::sample::subsequence(slots, 0..=n),
            proptest::collection::vec(arb_relation(sa, sb), n),
        )
            .prop_map(move |(chosen, rels)| {
                let triples = chosen.into_iter().zip(rels).map(|((i, j), r)| (i, j, r));
                LabelCoverInstance::new(a, b, sa, sb, triples).unwrap()
            })
    })
}

/// Every Min-Rep vertex of every non-isolated supervertex.
fn full_cover(lc: &LabelCoverInstance) -> RepCover {
    let mut cover = RepCover::new();
    for e in lc.edges() {
        for s in 0..lc.sigma_a() {
            cover.insert(Side::A, e.a, s);
        }
        for s in 0..lc.sigma_b() {
            cover.insert(Side::B, e.b, s);
        }
    }
    cover
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduction_directions_respect_their_bounds(lc in arb_lc(), k in 3..=5usize, x in 1..=3usize) {
        let stripped = subsample::strip_bad_edges(&lc, k + 1).instance;
        prop_assume!(stripped.superedge_count() > 0);
        let mr = minrep_expand(&stripped);
        let opts = SpannerOptions { copies: CopyCount::Fixed(x), ..SpannerOptions::default() };
        let si = build_spanner_instance(&mr, k, &opts).unwrap();
        let budget = OracleBudget::default();
        let minimum = oracles::min_repcover_exact(&mr, &budget).unwrap();
        for cover in [full_cover(&stripped), minimum] {
            prop_assert!(mr.repcover_valid(&cover).unwrap());
            let h = si.spanner_from_repcover(&cover).unwrap();
            prop_assert!(verify_spanner(si.base(), &h, k).unwrap());
            prop_assert!(si.uncanonical_gadget_edges(&h).unwrap().is_empty());
            if si.size_bounds_apply() && cover.len() >= si.n_tilde() {
                prop_assert!(h.len() as u128 <= spanner_size_bound(k, x, cover.len()));
            }

            let proper = si.make_proper(&h).unwrap();
            let gadget_free = proper.members().iter().all(|&e| !matches!(si.family(e), EdgeFamily::Super { .. }));
            prop_assert!(gadget_free);
            prop_assert!(verify_spanner(si.base(), &proper, k).unwrap());
            prop_assert!(proper.len() <= 6 * h.len());
            prop_assert_eq!(si.make_proper(&proper).unwrap(), proper);

            let back = si.repcover_from_spanner(&h).unwrap();
            prop_assert!(mr.repcover_valid(&back.cover).unwrap());
            prop_assert!(cover_within_bound(back.cover.len(), h.len(), x));
            prop_assert!(back.cover.len() <= 6 * (k + 1) * cover.len());
        }
    }

    #[test]
    fn gadget_families_match_the_supergraph(lc in arb_lc(), k in 3..=6usize, x in 1..=3usize) {
        let stripped = subsample::strip_bad_edges(&lc, k + 1).instance;
        prop_assume!(stripped.superedge_count() > 0);
        let mr = minrep_expand(&stripped);
        let opts = SpannerOptions { copies: CopyCount::Fixed(x), ..SpannerOptions::default() };
        let si = build_spanner_instance(&mr, k, &opts).unwrap();
        for p in 0..x {
            let count = si.family_count(|f| f == EdgeFamily::Super { copy: p });
            prop_assert_eq!(count, stripped.superedge_count());
        }
        prop_assert_eq!(si.family_count(|f| f == EdgeFamily::MinRep), mr.graph().edge_count());
        prop_assert_eq!(si.k_a() + si.k_b(), k - 1);
        let full = si.full_subset();
        for (e, f) in si.families().iter().enumerate() {
            if matches!(f, EdgeFamily::Super { .. }) {
                let path = si.canonical_span_check(&full, e).unwrap().expect("full graph spans canonically");
                prop_assert_eq!(path.len(), k + 1);
            }
        }
    }

    #[test]
    fn stripping_is_one_pass_and_keeps_completeness(lc in arb_lc(), k in 3..=6usize, seed in any::<u64>()) {
        let stripped = subsample::strip_bad_edges(&lc, k);
        prop_assert!(stripped.instance.supergirth().exceeds(k));
        prop_assert!(subsample::bad_edges(&stripped.instance, k).is_empty());
        prop_assert_eq!(stripped.instance.superedge_count() + stripped.removed.len(), lc.superedge_count());

        let budget = OracleBudget::default();
        let best = oracles::lc_value_exact(&lc, &budget).unwrap();
        let valid = minrep_expand(&lc)
            .repcover_valid(&labeling_to_repcover(&lc, &best.labeling).unwrap())
            .unwrap();
        prop_assert_eq!(valid, best.value == Ratio::from_integer(1));
        if valid && lc.sigma_a() >= 2 {
            let params = SampleParams::new(1.0, k, seed).unwrap().with_degree(lc.max_degree().max(1));
            let sampled = subsample::subsample(&lc, &params).unwrap();
            prop_assert_eq!(sampled.instance.value(&best.labeling).unwrap(), Ratio::from_integer(1));
        }
    }

    #[test]
    fn minimum_cover_needs_every_active_supervertex(lc in arb_lc()) {
        let mr = minrep_expand(&lc);
        let cover = oracles::min_repcover_exact(&mr, &OracleBudget::default()).unwrap();
        prop_assert!(mr.repcover_valid(&cover).unwrap());
        prop_assert!(cover.len() >= mr.non_isolated_supervertices());
    }
}

#[test]
fn unsatisfying_labeling_gives_an_invalid_cover() {
    let lc = lcspanner::label_cover::fixtures::xor_odd_cycle();
    let mr = minrep_expand(&lc);
    let cover = labeling_to_repcover(&lc, &Labeling::uniform(&lc, 0)).unwrap();
    assert!(!mr.repcover_valid(&cover).unwrap());
    assert!(mr.first_uncovered(&cover).unwrap().is_some());
}
