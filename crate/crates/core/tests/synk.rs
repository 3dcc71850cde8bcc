mod support;

use morphtag::synk::{GlossGraph, MAX_SYN_ORDER};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use support::syn_oracle::{closure, fig_water, graph, random_entries, Entries};

fn seeds(s: &str) -> BTreeSet<String> {
    BTreeSet::from([s.to_string()])
}

#[test]
fn water_example() {
    let g = graph(&fig_water());
    let one = g.syn_closure("mA'", 1).unwrap();
    assert!(one.contains("n.d.h") && !one.contains("r^s^s"));
    assert!(g.syn_closure("mA'", 2).unwrap().contains("r^s^s"));
    assert!(g.is_syn("r^s^s", "mA'", 2).unwrap());
    assert!(!g.is_syn("r^s^s", "mA'", 1).unwrap());
    assert!(g.is_syn("mA'", "mA'", 1).unwrap());
}

#[test]
fn order_bounds() {
    let g = graph(&fig_water());
    for k in [-1, 0, 8, 100] {
        assert!(g.syn_closure("mA'", k).is_err());
        assert!(g.gloss_closure("water", k).is_err());
    }
    for k in 1..=MAX_SYN_ORDER as i64 {
        assert!(g.syn_closure("mA'", k).is_ok());
    }
}

#[test]
fn unknown_word_has_empty_closure() {
    let g = graph(&fig_water());
    for k in 1..=7 {
        assert!(g.syn_closure("xyz", k).unwrap().is_empty());
    }
}

#[test]
fn lexicon_words_seed_by_their_stems() {
    let words = BTreeMap::from([("alias".to_string(), seeds("mA'"))]);
    let g = GlossGraph::from_parts(fig_water(), words);
    assert_eq!(g.syn_closure("alias", 2).unwrap(), g.syn_closure("mA'", 2).unwrap());
}

#[test]
fn random_graphs_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let e = random_entries(&mut rng);
        let g = graph(&e);
        for s in e.keys() {
            let mut prev = BTreeSet::new();
            for k in 1..=7 {
                let got = g.syn_closure(s, k).unwrap();
                assert_eq!(*got, closure(&e, &seeds(s), k as usize), "{s} k={k} in {e:?}");
                assert!(prev.is_subset(&*got));
                prev = (*got).clone();
            }
        }
    }
}

#[test]
fn gloss_closure_agrees_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let e = random_entries(&mut rng);
        let g = graph(&e);
        for gloss in (0..10).map(|i| format!("g{i}")) {
            let holders: BTreeSet<String> =
                e.iter().filter(|(_, gs)| gs.contains(&gloss)).map(|(s, _)| s.clone()).collect();
            for k in 1..=4 {
                let want = closure(&e, &holders, k);
                assert_eq!(*g.gloss_closure(&gloss, k as i64).unwrap(), want, "{gloss} k={k}");
            }
        }
    }
}

fn entries_strategy() -> impl Strategy<Value = Entries> {
    prop::collection::btree_map(
        "s[0-9]",
        prop::collection::btree_set("g[0-5]", 0..4),
        1..10,
    )
}

proptest! {
    #[test]
    fn closure_is_monotone(e in entries_strategy(), k in 1i64..7) {
        let g = graph(&e);
        for s in e.keys() {
            let a = g.syn_closure(s, k).unwrap();
            let b = g.syn_closure(s, k + 1).unwrap();
            prop_assert!(a.is_subset(&b));
        }
    }

    #[test]
    fn relation_is_symmetric(e in entries_strategy(), k in 1i64..=7) {
        let g = graph(&e);
        for a in e.keys() {
            for b in e.keys() {
                prop_assert_eq!(g.is_syn(a, b, k).unwrap(), g.is_syn(b, a, k).unwrap());
            }
        }
    }

    #[test]
    fn stems_with_glosses_are_self_synonyms(e in entries_strategy()) {
        let g = graph(&e);
        for (s, gs) in &e {
            prop_assert_eq!(g.syn_closure(s, 1).unwrap().contains(s), !gs.is_empty());
        }
    }
}
