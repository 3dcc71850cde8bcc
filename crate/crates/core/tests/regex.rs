mod support;

use morphtag::formula::TagSetSequence;
use morphtag::regex::{parse_rules, Expr, Pattern, RuleSet, DEFAULT_MAX_STEPS};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use support::oracle;

fn pattern_for(e: &Expr) -> Pattern {
    let mut set = RuleSet::new(oracle::ALPHABET.iter().map(|s| s.to_string()));
    set.add("r", &e.to_string()).unwrap_or_else(|err| panic!("{e}: {err}"));
    assert_eq!(&set.get("r").unwrap().expr, e, "display/parse round trip");
    Pattern::new(&set, "r")
}

fn single(label: &str, n: usize) -> TagSetSequence {
    TagSetSequence::from_labels((0..n).map(|_| vec![label.to_string()]))
}

#[test]
fn random_cases_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..500 {
        let k = 1 + case % 4;
        let labels = &oracle::ALPHABET[..k];
        let e = oracle::random_expr(&mut rng, 4, labels);
        let seq = oracle::random_sequence(&mut rng, 12, labels);
        let p = pattern_for(&e);
        let got = p.find(&seq, DEFAULT_MAX_STEPS).unwrap();
        let spans: Vec<(usize, usize)> = got.iter().map(|m| (m.start(), m.end())).collect();
        assert_eq!(spans, oracle::spans(&e, &seq), "case {case}: {e}");
        for m in &got {
            assert!(m.tree.is_well_formed(), "case {case}: {e}: {:?}", m.tree);
            assert_eq!(m.tree.leaves().len(), m.tree.len());
        }
    }
}

#[test]
fn upto_lengths() {
    let labels: BTreeSet<String> = ["f".to_string()].into();
    let set = parse_rules("r: f^3;", &labels).unwrap();
    let p = Pattern::new(&set, "r");
    for n in 0..=5 {
        let ends = p.accepted_ends(&single("f", n), 0, DEFAULT_MAX_STEPS).unwrap();
        let expected: Vec<usize> = (0..=n.min(3)).collect();
        assert_eq!(ends, expected, "length {n}");
    }
}

#[test]
fn alternation_is_union_at_fixed_start() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let f = oracle::random_expr(&mut rng, 3, &oracle::ALPHABET[..3]);
        let g = oracle::random_expr(&mut rng, 3, &oracle::ALPHABET[..3]);
        let seq = oracle::random_sequence(&mut rng, 8, &oracle::ALPHABET[..3]);
        let pf = pattern_for(&f);
        let pg = pattern_for(&g);
        let por = pattern_for(&Expr::or(vec![f.clone(), g.clone()]));
        let pand = pattern_for(&Expr::and(f.clone(), g.clone()));
        for s in 0..=seq.len() {
            let a: BTreeSet<usize> = pf.accepted_ends(&seq, s, DEFAULT_MAX_STEPS).unwrap().into_iter().collect();
            let b: BTreeSet<usize> = pg.accepted_ends(&seq, s, DEFAULT_MAX_STEPS).unwrap().into_iter().collect();
            let u: BTreeSet<usize> = por.accepted_ends(&seq, s, DEFAULT_MAX_STEPS).unwrap().into_iter().collect();
            let i: BTreeSet<usize> = pand.accepted_ends(&seq, s, DEFAULT_MAX_STEPS).unwrap().into_iter().collect();
            assert_eq!(u, a.union(&b).copied().collect());
            assert_eq!(i, a.intersection(&b).copied().collect());
        }
    }
}

#[test]
fn matches_sorted_and_disjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let e = oracle::random_expr(&mut rng, 3, &oracle::ALPHABET[..2]);
        let seq = oracle::random_sequence(&mut rng, 12, &oracle::ALPHABET[..2]);
        let spans = pattern_for(&e).find_spans(&seq, DEFAULT_MAX_STEPS).unwrap();
        assert!(spans.windows(2).all(|w| w[0].1 <= w[1].0));
        assert!(spans.iter().all(|(s, e)| s < e));
    }
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop::sample::select(vec!["A", "B", "C", "NONE"]).prop_map(Expr::label);
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::concat),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::or),
            inner.clone().prop_map(Expr::star),
            inner.clone().prop_map(Expr::plus),
            inner.clone().prop_map(Expr::optional),
            (inner.clone(), 1u32..5).prop_map(|(e, x)| Expr::up_to(e, x)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::and(l, r)),
            (inner, "[a-z][a-z0-9_]{0,4}").prop_map(|(e, b)| e.bind(b)),
        ]
    })
}

proptest! {
    #[test]
    fn printed_rules_parse_back(e in arb_expr()) {
        let mut set = RuleSet::new(["A", "B", "C"].iter().map(|s| s.to_string()));
        set.add("r", &e.to_string()).unwrap();
        prop_assert_eq!(&set.get("r").unwrap().expr, &e);
    }
}
