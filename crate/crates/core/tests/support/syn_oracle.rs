//! Reference synonymy closure by repeated full-set expansion, and random
//! stem–gloss graphs.

use morphtag::synk::GlossGraph;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};

pub type Entries = BTreeMap<String, BTreeSet<String>>;

/// Stems sharing at least one gloss with some stem of `from`.
fn step(entries: &Entries, from: &BTreeSet<String>) -> BTreeSet<String> {
    entries
        .iter()
        .filter(|(_, gs)| {
            from.iter()
                .any(|s| entries.get(s).is_some_and(|mine| !mine.is_disjoint(gs)))
        })
        .map(|(s, _)| s.clone())
        .collect()
}

/// Union of the first `k` expansion levels from `seeds`.
pub fn closure(entries: &Entries, seeds: &BTreeSet<String>, k: usize) -> BTreeSet<String> {
    let mut level = seeds.clone();
    let mut all = BTreeSet::new();
    for _ in 0..k {
        level = step(entries, &level);
        all.extend(level.iter().cloned());
    }
    all
}

pub fn fig_water() -> Entries {
    [
        ("mA'", vec!["water"]),
        ("n.d.h", vec!["water", "leak", "spray"]),
        ("r^s^s", vec!["spray", "splatter"]),
    ]
    .into_iter()
    .map(|(s, gs)| (s.to_string(), gs.into_iter().map(String::from).collect()))
    .collect()
}

/// Up to 12 stems over up to 10 glosses, each stem with 0..=3 glosses.
pub fn random_entries<R: Rng>(rng: &mut R) -> Entries {
    let stems = rng.gen_range(1..=12);
    let glosses = rng.gen_range(1..=10);
    (0..stems)
        .map(|i| {
            let n = rng.gen_range(0..=3);
            let gs = (0..n).map(|_| format!("g{}", rng.gen_range(0..glosses))).collect();
            (format!("s{i}"), gs)
        })
        .collect()
}

pub fn graph(entries: &Entries) -> GlossGraph {
    GlossGraph::from_parts(entries.clone(), BTreeMap::new())
}
