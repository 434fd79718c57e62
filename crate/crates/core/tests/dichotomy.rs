use std::collections::BTreeSet;

use dissim_select::data::{Label, WriterId};
use dissim_select::dichotomy::{
    build_evaluation_trials, build_training_set, dissimilarity, fuse_scores, reference_set, EvaluationPlan, PairKind,
    PairLabel, TrainingPlan,
};
use dissim_select::metrics::Truth;
use dissim_select::synthetic::{generate, GeneratorConfig};
use dissim_select::Error;
use proptest::prelude::*;

/// Multiples of 2^-10 in [-1024, 1024]: differences and sums are exact in f64.
fn vectors(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-(1i64 << 20)..=(1 << 20)).prop_map(|k| k as f64 / 1024.0), dim)
}

proptest! {
    #[test]
    fn dissimilarity_is_a_nonnegative_symmetric_elementwise_metric(
        (a, b, c) in (1usize..16).prop_flat_map(|d| (vectors(d), vectors(d), vectors(d)))
    ) {
        let ab = dissimilarity(&a, &b).unwrap();
        let ba = dissimilarity(&b, &a).unwrap();
        let ac = dissimilarity(&a, &c).unwrap();
        let cb = dissimilarity(&c, &b).unwrap();
        prop_assert_eq!(&ab, &ba);
        for j in 0..a.len() {
            prop_assert!(ab[j] >= 0.0);
            prop_assert!(ab[j] <= ac[j] + cb[j]);
        }
        prop_assert!(dissimilarity(&a, &a).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fusion_is_permutation_invariant_and_monotone(
        mut scores in prop::collection::vec(-10f64..10.0, 1..20),
        bump in 0f64..5.0,
        at in any::<prop::sample::Index>(),
    ) {
        let fused = fuse_scores(&scores).unwrap();
        prop_assert!(scores.iter().all(|&s| s <= fused));
        let mut reversed = scores.clone();
        reversed.reverse();
        prop_assert_eq!(fuse_scores(&reversed).unwrap(), fused);
        let i = at.index(scores.len());
        scores[i] += bump;
        prop_assert!(fuse_scores(&scores).unwrap() >= fused);
    }
}

#[test]
fn length_mismatch_and_empty_fusion_are_rejected() {
    assert!(matches!(dissimilarity(&[1.0], &[1.0, 2.0]), Err(Error::Dimension { .. })));
    assert!(fuse_scores(&[]).is_err());
}

fn small_population() -> dissim_select::data::Dataset {
    generate(&GeneratorConfig { n_writers: 8, dim: 6, informative_dims: 3, ..GeneratorConfig::default() }).unwrap()
}

#[test]
fn training_set_composition() {
    let ds = small_population();
    let writers: BTreeSet<WriterId> = [2, 3, 5].map(WriterId).into();
    let plan = TrainingPlan { references: 4, genuine: 3, random_forgery: 2 };
    let set = build_training_set(&ds, &writers, plan, 11).unwrap();
    assert_eq!(set.len(), writers.len() * plan.references * (plan.genuine + plan.random_forgery));
    for s in &set {
        assert!(writers.contains(&s.writer));
        assert!(s.reference_index < plan.references);
        assert_eq!(s.values.len(), ds.dim());
        match s.pair_kind {
            PairKind::GenuineVsRef => assert_eq!(s.label(), PairLabel::Positive),
            PairKind::RandomVsRef => assert_eq!(s.label(), PairLabel::Negative),
            PairKind::SkilledVsRef => panic!("skilled forgeries never enter training"),
        }
    }
    let positives = set.iter().filter(|s| s.label() == PairLabel::Positive).count();
    assert_eq!(positives, writers.len() * plan.references * plan.genuine);
    assert_eq!(build_training_set(&ds, &writers, plan, 11).unwrap(), set);
}

#[test]
fn references_and_questioned_genuines_do_not_overlap() {
    let ds = small_population();
    let writer = WriterId(4);
    let refs = reference_set(&ds, writer, 12, 3).unwrap();
    assert_eq!(refs.len(), 12);
    let plan = EvaluationPlan { references: 12, genuine: 10, skilled: 10 };
    let trials = build_evaluation_trials(&ds, &BTreeSet::from([writer]), plan, 3).unwrap();
    assert_eq!(trials.len(), 20);
    let genuines: Vec<_> = ds.samples_of(writer, Label::Genuine).collect();
    for t in trials.iter().filter(|t| t.truth == Truth::Genuine) {
        assert_eq!(t.rows().count(), 12);
        // A questioned genuine is never one of the references: no row is all zeros.
        assert!(t.rows().all(|u| u.iter().any(|&v| v != 0.0)));
    }
    assert!(genuines.len() >= 22);
}

#[test]
fn insufficient_genuines_are_reported() {
    let ds = small_population();
    let plan = EvaluationPlan { references: 20, genuine: 10, skilled: 1 };
    let err = build_evaluation_trials(&ds, &BTreeSet::from([WriterId(1)]), plan, 0).unwrap_err();
    assert!(matches!(err, Error::InsufficientSamples { .. }), "{err}");
}
