mod support;

use morphtag::analysis::{diff_tags, diff_tags_checked, f_measure, DiffReport, MatchPredicate, Tag};
use morphtag::number::Number;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::diff_oracle::{max_matching, random_tags};

fn pr(r: &DiffReport) -> (Number, Number, Number) {
    (r.precision, r.recall, r.f_measure)
}

#[test]
fn hand_counted_sets() {
    let x = |i, l| Tag::new(i, l, "X");
    let one = Number::one();
    let half = Number::new(1, 2);
    assert_eq!(pr(&diff_tags(&[x(0, 4)], &[x(0, 4)], MatchPredicate::Exact)), (one, one, one));
    assert_eq!(
        pr(&diff_tags(&[x(0, 4), x(10, 3)], &[x(0, 4), x(20, 2)], MatchPredicate::Exact)),
        (half, half, half)
    );
    // Two of three reference tags found, two of four candidates correct.
    let a = [x(0, 3), x(5, 3), x(10, 3)];
    let b = [x(0, 3), x(5, 3), x(15, 1), x(20, 2)];
    let r = diff_tags(&a, &b, MatchPredicate::Exact);
    assert_eq!(pr(&r), (half, Number::new(2, 3), Number::new(4, 7)));
    assert_eq!(r.common.len(), 2);
    assert_eq!(r.only_a, vec![x(10, 3)]);
    assert_eq!(r.only_b, vec![x(15, 1), x(20, 2)]);
}

#[test]
fn containment_predicates() {
    let a = [Tag::new(0, 6, "X")];
    let b = [Tag::new(2, 2, "X")];
    assert_eq!(diff_tags(&a, &b, MatchPredicate::AIncludesB).common.len(), 1);
    assert_eq!(diff_tags(&a, &b, MatchPredicate::Exact).common.len(), 0);
    assert_eq!(diff_tags(&a, &b, MatchPredicate::BIncludesA).common.len(), 0);
}

#[test]
fn out_of_bounds_is_rejected() {
    let err = diff_tags_checked(&[Tag::new(8, 4, "X")], &[], MatchPredicate::Exact, 10).unwrap_err();
    assert!(err.to_string().contains("outside"));
}

#[test]
fn random_pairs_match_oracle_and_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..500 {
        let a = random_tags(&mut rng, 6);
        let b = random_tags(&mut rng, 6);
        let count = |p| diff_tags(&a, &b, p).common.len();
        for p in MatchPredicate::ALL {
            assert_eq!(count(p), max_matching(&a, &b, p), "case {case} {p}");
        }
        let exact = count(MatchPredicate::Exact);
        for inc in [MatchPredicate::AIncludesB, MatchPredicate::BIncludesA] {
            assert!(exact <= count(inc) && count(inc) <= count(MatchPredicate::Intersection), "case {case}");
        }
    }
}

fn tag_strategy() -> impl Strategy<Value = Tag> {
    (0usize..20, 1usize..6, prop::sample::select(vec!["X", "Y"])).prop_map(|(i, l, s)| Tag::new(i, l, s))
}

proptest! {
    #[test]
    fn scores_in_unit_interval(a in prop::collection::vec(tag_strategy(), 0..8),
                               b in prop::collection::vec(tag_strategy(), 0..8)) {
        for p in MatchPredicate::ALL {
            let r = diff_tags(&a, &b, p);
            for v in [r.precision, r.recall, r.f_measure] {
                prop_assert!(v >= Number::zero() && v <= Number::one());
            }
            prop_assert!(r.f_measure <= r.precision.max(r.recall));
            prop_assert!(r.f_measure >= r.precision.min(r.recall) || r.f_measure.is_zero());
            prop_assert_eq!(r.f_measure, f_measure(r.precision, r.recall));
            prop_assert_eq!(r.common.len() + r.only_a.len(), a.len());
            prop_assert_eq!(r.common.len() + r.only_b.len(), b.len());
        }
    }

    #[test]
    fn swapping_sets_swaps_precision_and_recall(a in prop::collection::vec(tag_strategy(), 0..8),
                                                b in prop::collection::vec(tag_strategy(), 0..8)) {
        for p in MatchPredicate::ALL {
            let ab = diff_tags(&a, &b, p);
            let ba = diff_tags(&b, &a, p.swapped());
            prop_assert_eq!((ab.precision, ab.recall), (ba.recall, ba.precision));
        }
    }

    #[test]
    fn identical_sets_score_one(a in prop::collection::vec(tag_strategy(), 0..8)) {
        let r = diff_tags(&a, &a, MatchPredicate::Exact);
        prop_assert_eq!(pr(&r), (Number::one(), Number::one(), Number::one()));
    }
}
