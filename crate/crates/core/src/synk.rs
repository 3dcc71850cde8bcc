//! The stem–gloss bipartite graph and the extended synonymy closure.
//!
//! Two stems are directly related when they share at least one gloss. The
//! closure of order `k` collects every stem reachable within `k` such steps
//! from the stems of a lexicon word.

use crate::morphology::{Lexicon, MorphSolution};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};
use thiserror::Error;

pub const MAX_SYN_ORDER: u8 = 7;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("synonymy order {0} is outside 1..=7")]
pub struct SynOrderError(pub i64);

pub fn check_order(k: i64) -> Result<u8, SynOrderError> {
    if (1..=MAX_SYN_ORDER as i64).contains(&k) {
        Ok(k as u8)
    } else {
        Err(SynOrderError(k))
    }
}

type ClosureKey = (Seed, u8);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Seed {
    Word(String),
    Gloss(String),
}

pub struct GlossGraph {
    stem_to_glosses: BTreeMap<String, BTreeSet<String>>,
    gloss_to_stems: BTreeMap<String, BTreeSet<String>>,
    word_to_stems: BTreeMap<String, BTreeSet<String>>,
    cache: RwLock<HashMap<ClosureKey, Arc<BTreeSet<String>>>>,
}

impl fmt::Debug for GlossGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GlossGraph")
            .field("stems", &self.stem_to_glosses.len())
            .field("glosses", &self.gloss_to_stems.len())
            .finish()
    }
}

impl Clone for GlossGraph {
    fn clone(&self) -> Self {
        GlossGraph::from_parts(
            self.stem_to_glosses.clone(),
            self.word_to_stems.clone(),
        )
    }
}

impl Default for GlossGraph {
    fn default() -> Self {
        GlossGraph::from_parts(BTreeMap::new(), BTreeMap::new())
    }
}

impl GlossGraph {
    /// `stem_to_glosses` is the gloss map; every stem is also a lexicon word
    /// mapping to itself, and `words` adds further lexicon-word entries.
    pub fn from_parts(
        stem_to_glosses: BTreeMap<String, BTreeSet<String>>,
        words: BTreeMap<String, BTreeSet<String>>,
    ) -> Self {
        let mut gloss_to_stems: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (stem, glosses) in &stem_to_glosses {
            for g in glosses {
                gloss_to_stems.entry(g.clone()).or_default().insert(stem.clone());
            }
        }
        let mut word_to_stems: BTreeMap<String, BTreeSet<String>> = stem_to_glosses
            .keys()
            .map(|s| (s.clone(), BTreeSet::from([s.clone()])))
            .collect();
        for (w, stems) in words {
            word_to_stems.entry(w).or_default().extend(stems);
        }
        GlossGraph {
            stem_to_glosses,
            gloss_to_stems,
            word_to_stems,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn from_lexicon(lexicon: &Lexicon) -> Self {
        let mut stem_to_glosses: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for s in lexicon.stems() {
            stem_to_glosses
                .entry(s.form.clone())
                .or_default()
                .extend(s.glosses.iter().cloned());
        }
        GlossGraph::from_parts(stem_to_glosses, lexicon.words().clone())
    }

    pub fn glosses(&self, stem: &str) -> Option<&BTreeSet<String>> {
        self.stem_to_glosses.get(stem)
    }

    pub fn stems_with_gloss(&self, gloss: &str) -> Option<&BTreeSet<String>> {
        self.gloss_to_stems.get(gloss)
    }

    /// The seed stems of a lexicon word (empty when the word is unknown).
    pub fn word_stems(&self, word: &str) -> BTreeSet<String> {
        self.word_to_stems.get(word).cloned().unwrap_or_default()
    }

    pub fn stem_count(&self) -> usize {
        self.stem_to_glosses.len()
    }

    /// Stems sharing a gloss with any stem of `from`.
    fn neighbors<'a>(&'a self, from: impl IntoIterator<Item = &'a String>) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for s in from {
            for g in self.stem_to_glosses.get(s).into_iter().flatten() {
                if let Some(stems) = self.gloss_to_stems.get(g) {
                    out.extend(stems.iter().cloned());
                }
            }
        }
        out
    }

    /// Breadth-first expansion: level 1 is the neighborhood of the seeds,
    /// each later level expands only the stems first reached on the level
    /// before it.
    fn expand(&self, seeds: &BTreeSet<String>, k: u8) -> BTreeSet<String> {
        let mut reached = self.neighbors(seeds);
        let mut frontier: BTreeSet<String> = reached.clone();
        for _ in 1..k {
            if frontier.is_empty() {
                break;
            }
            let next: BTreeSet<String> = self
                .neighbors(&frontier)
                .into_iter()
                .filter(|s| !reached.contains(s))
                .collect();
            reached.extend(next.iter().cloned());
            frontier = next;
        }
        reached
    }

    fn cached(&self, key: ClosureKey, seeds: impl FnOnce() -> BTreeSet<String>) -> Arc<BTreeSet<String>> {
        if let Some(hit) = self.cache.read().expect("closure cache poisoned").get(&key) {
            return hit.clone();
        }
        let result = Arc::new(self.expand(&seeds(), key.1));
        self.cache
            .write()
            .expect("closure cache poisoned")
            .insert(key, result.clone());
        result
    }

    /// The union of `Sy^1(word) ..= Sy^k(word)`.
    pub fn syn_closure(&self, word: &str, k: i64) -> Result<Arc<BTreeSet<String>>, SynOrderError> {
        let k = check_order(k)?;
        Ok(self.cached((Seed::Word(word.to_string()), k), || self.word_stems(word)))
    }

    /// Closure seeded with the stems carrying `gloss` instead of a word's stems.
    pub fn gloss_closure(&self, gloss: &str, k: i64) -> Result<Arc<BTreeSet<String>>, SynOrderError> {
        let k = check_order(k)?;
        Ok(self.cached((Seed::Gloss(gloss.to_string()), k), || {
            self.gloss_to_stems.get(gloss).cloned().unwrap_or_default()
        }))
    }

    /// Whether some stem of `word` lies in the closure of `cf`.
    pub fn is_syn(&self, word: &str, cf: &str, k: i64) -> Result<bool, SynOrderError> {
        let closure = self.syn_closure(cf, k)?;
        Ok(self.word_stems(word).iter().any(|s| closure.contains(s)))
    }

    /// As [`GlossGraph::is_syn`], taking the stems from analyzed solutions.
    pub fn solutions_syn(
        &self,
        solutions: &[MorphSolution],
        cf: &str,
        k: i64,
    ) -> Result<bool, SynOrderError> {
        let closure = self.syn_closure(cf, k)?;
        Ok(solutions.iter().any(|s| closure.contains(&s.stem.form)))
    }
}
