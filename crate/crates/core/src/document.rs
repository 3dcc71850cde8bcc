//! An analyzed document together with its tag sets and, for every tag on a
//! word, the solution that earned it.

use crate::formula::{compute_tag_sequence, witness, MbfTagType, TagSetSequence, NONE};
use crate::morphology::{AnalyzedWord, MorphSolution, Word};
use crate::regex::MatchNode;
use crate::synk::GlossGraph;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A readable feature of a word or of a matched span.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpanFeature {
    #[default]
    Text,
    Gloss,
    Pos,
    Stem,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzedDocument {
    pub text: String,
    pub words: Vec<AnalyzedWord>,
    pub tags: TagSetSequence,
    /// Per word: tag label → index of its witness solution.
    witnesses: Vec<BTreeMap<String, usize>>,
}

impl AnalyzedDocument {
    pub fn new(text: impl Into<String>, words: Vec<AnalyzedWord>, mbfs: &[MbfTagType], graph: &GlossGraph) -> Self {
        let tags = compute_tag_sequence(&words, mbfs, graph);
        let witnesses = words
            .iter()
            .zip(&tags.per_word)
            .map(|(w, labels)| {
                labels
                    .iter()
                    .filter_map(|l| {
                        let i = match mbfs.iter().find(|t| &t.label == l) {
                            Some(t) => witness(&t.formula, &w.solutions, graph).unwrap_or(0),
                            None => 0,
                        };
                        (i < w.solutions.len()).then(|| (l.clone(), i))
                    })
                    .collect()
            })
            .collect();
        AnalyzedDocument {
            text: text.into(),
            words,
            tags,
            witnesses,
        }
    }

    /// A document with given tag sets and no morphology.
    pub fn from_tags(tags: TagSetSequence) -> Self {
        let words: Vec<AnalyzedWord> = tags
            .words
            .iter()
            .map(|w| AnalyzedWord {
                word: w.clone(),
                solutions: Vec::new(),
            })
            .collect();
        let text = tags.words.iter().map(|w| w.surface.as_str()).collect::<Vec<_>>().join(" ");
        AnalyzedDocument {
            text,
            witnesses: vec![BTreeMap::new(); words.len()],
            words,
            tags,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i].word
    }

    /// The solution supporting `label` on word `i`, falling back to the first.
    pub fn solution(&self, i: usize, label: &str) -> Option<&MorphSolution> {
        let sols = &self.words[i].solutions;
        let idx = self.witnesses[i].get(label).copied().unwrap_or(0);
        sols.get(idx)
    }

    /// Words `[start, end)` joined by single spaces.
    pub fn span_text(&self, start: usize, end: usize) -> String {
        self.words[start..end]
            .iter()
            .map(|w| w.word.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Character offset and length covered by words `[start, end)`.
    pub fn char_span(&self, start: usize, end: usize) -> (usize, usize) {
        if start >= end {
            let at = self.words.get(start).map(|w| w.word.index).unwrap_or(self.text.chars().count());
            return (at, 0);
        }
        let first = &self.words[start].word;
        let last = &self.words[end - 1].word;
        (first.index, last.end() - first.index)
    }

    /// The value of `feature` for one leaf of a match tree.
    pub fn leaf_feature(&self, leaf: &MatchNode, feature: SpanFeature) -> String {
        let label = leaf.label.as_deref().unwrap_or(NONE);
        let sol = self.solution(leaf.start, label);
        match feature {
            SpanFeature::Text => self.word(leaf.start).surface.clone(),
            SpanFeature::Gloss => sol
                .map(|s| s.stem.gloss.iter().cloned().collect::<Vec<_>>().join("/"))
                .unwrap_or_default(),
            SpanFeature::Pos => sol.map(|s| s.pos_string()).unwrap_or_default(),
            SpanFeature::Stem => sol.map(|s| s.stem.form.clone()).unwrap_or_default(),
        }
    }

    /// `feature` of a matched node: its text, or the leaf values joined by spaces.
    pub fn node_feature(&self, node: &MatchNode, feature: SpanFeature) -> String {
        if feature == SpanFeature::Text {
            return self.span_text(node.start, node.end);
        }
        node.leaves()
            .into_iter()
            .map(|l| self.leaf_feature(l, feature))
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Stem of the first non-`NONE` leaf (or of the first leaf).
    pub fn head_stem(&self, node: &MatchNode) -> Option<String> {
        let leaves = node.leaves();
        let head = leaves
            .iter()
            .find(|l| l.label.as_deref() != Some(NONE))
            .or(leaves.first())?;
        let stem = self.leaf_feature(head, SpanFeature::Stem);
        (!stem.is_empty()).then_some(stem)
    }
}
