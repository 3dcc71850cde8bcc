//! Atomic terms and Boolean formulae over morphological solutions.
//!
//! A formula is a disjunction of possibly negated atomic terms. Evaluating
//! every formula of a project over a document yields the per-word tag sets
//! that the expression matcher consumes; words matched by no formula get the
//! singleton `{NONE}`.

use crate::morphology::{AnalyzedWord, MorphSolution, Word};
use crate::synk::{check_order, GlossGraph};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Label of the default tag given to words no formula matches.
pub const NONE: &str = "NONE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    Prefix,
    Stem,
    Suffix,
    #[serde(rename = "pos", alias = "POS")]
    Pos,
    Gloss,
    Category,
}

impl FromStr for Feature {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, FormulaError> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "prefix" => Feature::Prefix,
            "stem" => Feature::Stem,
            "suffix" => Feature::Suffix,
            "pos" => Feature::Pos,
            "gloss" => Feature::Gloss,
            "category" => Feature::Category,
            _ => return Err(FormulaError::UnknownFeature(s.to_string())),
        })
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Feature::Prefix => "prefix",
            Feature::Stem => "stem",
            Feature::Suffix => "suffix",
            Feature::Pos => "pos",
            Feature::Gloss => "gloss",
            Feature::Category => "category",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Predicate {
    #[serde(rename = "isA")]
    IsA,
    #[serde(rename = "contains")]
    Contains,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("term on {0} has an empty value")]
    EmptyValue(Feature),
    #[error("synonymy order on {0} is only allowed for stem and gloss terms")]
    SynOnFeature(Feature),
    #[error(transparent)]
    SynOrder(#[from] crate::synk::SynOrderError),
    #[error("formula has no terms")]
    Empty,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AtomicTerm {
    pub feature: Feature,
    #[serde(default = "default_predicate")]
    pub predicate: Predicate,
    pub value: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub negated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub syn_k: Option<u8>,
}

fn default_predicate() -> Predicate {
    Predicate::IsA
}

impl AtomicTerm {
    pub fn new(feature: Feature, predicate: Predicate, value: impl Into<String>) -> Self {
        AtomicTerm {
            feature,
            predicate,
            value: value.into(),
            negated: false,
            syn_k: None,
        }
    }

    pub fn is_a(feature: Feature, value: impl Into<String>) -> Self {
        Self::new(feature, Predicate::IsA, value)
    }

    pub fn contains(feature: Feature, value: impl Into<String>) -> Self {
        Self::new(feature, Predicate::Contains, value)
    }

    pub fn syn(feature: Feature, value: impl Into<String>, k: u8) -> Self {
        AtomicTerm {
            syn_k: Some(k),
            ..Self::is_a(feature, value)
        }
    }

    pub fn negate(mut self) -> Self {
        self.negated = !self.negated;
        self
    }

    pub fn validate(&self) -> Result<(), FormulaError> {
        if self.value.is_empty() {
            return Err(FormulaError::EmptyValue(self.feature));
        }
        if let Some(k) = self.syn_k {
            if !matches!(self.feature, Feature::Stem | Feature::Gloss) {
                return Err(FormulaError::SynOnFeature(self.feature));
            }
            check_order(k as i64)?;
        }
        Ok(())
    }

    /// Whether one solution satisfies the (un-negated) predicate.
    pub fn matches_solution(&self, sol: &MorphSolution) -> bool {
        let v = self.value.as_str();
        let affixes = |ms: &[crate::morphology::Morpheme], joined: String| match self.predicate {
            Predicate::IsA => (!ms.is_empty() && joined == v) || ms.iter().any(|m| m.form == v),
            Predicate::Contains => joined.contains(v),
        };
        let tags = |get: fn(&crate::morphology::Morpheme) -> &BTreeSet<String>| {
            sol.morphemes().any(|m| {
                let set = get(m);
                match self.predicate {
                    Predicate::IsA => set.contains(v),
                    Predicate::Contains => set.iter().any(|t| t.contains(v)),
                }
            })
        };
        match self.feature {
            Feature::Prefix => affixes(&sol.prefixes, sol.prefix_string()),
            Feature::Suffix => affixes(&sol.suffixes, sol.suffix_string()),
            Feature::Stem => match self.predicate {
                Predicate::IsA => sol.stem.form == v,
                Predicate::Contains => sol.stem.form.contains(v),
            },
            Feature::Pos => sol.morphemes().any(|m| match self.predicate {
                Predicate::IsA => m.pos == v || m.pos.trim_end_matches('+') == v,
                Predicate::Contains => m.pos.contains(v),
            }),
            Feature::Gloss => tags(|m| &m.gloss),
            Feature::Category => tags(|m| &m.category),
        }
    }
}

/// Evaluates one atomic term over the solution set of a word.
pub fn eval_term(term: &AtomicTerm, solutions: &[MorphSolution], graph: &GlossGraph) -> bool {
    let raw = match term.syn_k {
        Some(k) => {
            let closure = match term.feature {
                Feature::Gloss => graph.gloss_closure(&term.value, k as i64),
                _ => graph.syn_closure(&term.value, k as i64),
            };
            match closure {
                Ok(c) => solutions.iter().any(|s| c.contains(&s.stem.form)),
                Err(_) => false,
            }
        }
        None => solutions.iter().any(|s| term.matches_solution(s)),
    };
    raw != term.negated
}

/// A disjunction of terms, or the distinguished default formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FormulaRepr", into = "FormulaRepr")]
pub enum BoolFormula {
    Other,
    Terms(Vec<AtomicTerm>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FormulaRepr {
    Keyword(String),
    Terms {
        terms: Vec<AtomicTerm>,
    },
}

impl TryFrom<FormulaRepr> for BoolFormula {
    type Error = String;

    fn try_from(r: FormulaRepr) -> Result<Self, String> {
        match r {
            FormulaRepr::Keyword(k) if k == "OTHER" => Ok(BoolFormula::Other),
            FormulaRepr::Keyword(k) => Err(format!("unknown formula keyword {k:?}")),
            FormulaRepr::Terms { terms } => Ok(BoolFormula::Terms(terms)),
        }
    }
}

impl From<BoolFormula> for FormulaRepr {
    fn from(f: BoolFormula) -> Self {
        match f {
            BoolFormula::Other => FormulaRepr::Keyword("OTHER".into()),
            BoolFormula::Terms(terms) => FormulaRepr::Terms { terms },
        }
    }
}

impl BoolFormula {
    pub fn any_of(terms: impl IntoIterator<Item = AtomicTerm>) -> Self {
        BoolFormula::Terms(terms.into_iter().collect())
    }

    pub fn validate(&self) -> Result<(), FormulaError> {
        match self {
            BoolFormula::Other => Ok(()),
            BoolFormula::Terms(t) if t.is_empty() => Err(FormulaError::Empty),
            BoolFormula::Terms(t) => t.iter().try_for_each(AtomicTerm::validate),
        }
    }
}

/// True iff any term holds. `OTHER` is never true here: it is realized by
/// the `NONE` default of [`compute_tag_sequence`].
pub fn eval_formula(f: &BoolFormula, solutions: &[MorphSolution], graph: &GlossGraph) -> bool {
    match f {
        BoolFormula::Other => false,
        BoolFormula::Terms(terms) => terms.iter().any(|t| eval_term(t, solutions, graph)),
    }
}

/// Index of the first solution that satisfies `f` on its own, if any.
pub fn witness(f: &BoolFormula, solutions: &[MorphSolution], graph: &GlossGraph) -> Option<usize> {
    (0..solutions.len()).find(|&i| eval_formula(f, &solutions[i..=i], graph))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Legend {
    pub color: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub bold: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub italic: bool,
}

impl Default for Legend {
    fn default() -> Self {
        Legend {
            color: "#000000".into(),
            bold: false,
            italic: false,
        }
    }
}

impl Legend {
    pub fn is_valid_color(&self) -> bool {
        let c = self.color.as_bytes();
        c.len() == 7 && c[0] == b'#' && c[1..].iter().all(u8::is_ascii_hexdigit)
    }
}

/// A named formula rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MbfTagType {
    pub label: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub legend: Legend,
    pub formula: BoolFormula,
}

impl MbfTagType {
    pub fn new(label: impl Into<String>, formula: BoolFormula) -> Self {
        MbfTagType {
            label: label.into(),
            description: String::new(),
            legend: Legend::default(),
            formula,
        }
    }
}

/// Per-word tag sets in document order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TagSetSequence {
    pub words: Vec<Word>,
    pub per_word: Vec<BTreeSet<String>>,
}

impl TagSetSequence {
    pub fn len(&self) -> usize {
        self.per_word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_word.is_empty()
    }

    /// Builds a sequence straight from label sets; empty sets become `{NONE}`.
    pub fn from_labels<I, S>(sets: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator,
        S::Item: Into<String>,
    {
        let per_word: Vec<BTreeSet<String>> = sets
            .into_iter()
            .map(|s| {
                let set: BTreeSet<String> = s.into_iter().map(Into::into).collect();
                if set.is_empty() {
                    BTreeSet::from([NONE.to_string()])
                } else {
                    set
                }
            })
            .collect();
        let mut at = 0;
        let words = (0..per_word.len())
            .map(|i| {
                let w = Word::new(format!("w{i}"), at);
                at = w.end() + 1;
                w
            })
            .collect();
        TagSetSequence { words, per_word }
    }
}

pub fn compute_tag_sequence(
    doc: &[AnalyzedWord],
    tag_types: &[MbfTagType],
    graph: &GlossGraph,
) -> TagSetSequence {
    let per_word = doc
        .iter()
        .map(|w| {
            let mut set: BTreeSet<String> = tag_types
                .iter()
                .filter(|tt| eval_formula(&tt.formula, &w.solutions, graph))
                .map(|tt| tt.label.clone())
                .collect();
            if set.is_empty() {
                set.insert(NONE.to_string());
            }
            set
        })
        .collect();
    TagSetSequence {
        words: doc.iter().map(|w| w.word.clone()).collect(),
        per_word,
    }
}
