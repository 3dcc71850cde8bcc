//! Comparing tag sets and tag-type sets.
//!
//! Tags are matched one-to-one when their labels are equal and their spans
//! satisfy an overlap predicate. Precision, recall and F-measure are exact
//! rationals.

use crate::number::Number;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TagSource {
    #[default]
    Auto,
    Manual,
}

/// A labelled character span.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tag {
    pub index: usize,
    pub length: usize,
    pub label: String,
    #[serde(default)]
    pub source: TagSource,
}

impl Tag {
    pub fn new(index: usize, length: usize, label: impl Into<String>) -> Self {
        Tag {
            index,
            length,
            label: label.into(),
            source: TagSource::Auto,
        }
    }

    pub fn manual(mut self) -> Self {
        self.source = TagSource::Manual;
        self
    }

    pub fn end(&self) -> usize {
        self.index + self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum MatchPredicate {
    /// Spans share at least one character.
    Intersection,
    /// Identical spans.
    Exact,
    /// The reference span contains the candidate span.
    AIncludesB,
    /// The candidate span contains the reference span.
    BIncludesA,
}

impl MatchPredicate {
    pub const ALL: [MatchPredicate; 4] = [
        MatchPredicate::Intersection,
        MatchPredicate::Exact,
        MatchPredicate::AIncludesB,
        MatchPredicate::BIncludesA,
    ];

    pub fn holds(self, a: &Tag, b: &Tag) -> bool {
        match self {
            MatchPredicate::Intersection => a.index.max(b.index) < a.end().min(b.end()),
            MatchPredicate::Exact => a.index == b.index && a.length == b.length,
            MatchPredicate::AIncludesB => a.index <= b.index && b.end() <= a.end(),
            MatchPredicate::BIncludesA => b.index <= a.index && a.end() <= b.end(),
        }
    }

    /// The predicate with the roles of the two sets exchanged.
    pub fn swapped(self) -> Self {
        match self {
            MatchPredicate::AIncludesB => MatchPredicate::BIncludesA,
            MatchPredicate::BIncludesA => MatchPredicate::AIncludesB,
            p => p,
        }
    }
}

impl FromStr for MatchPredicate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "intersection" => MatchPredicate::Intersection,
            "exact" => MatchPredicate::Exact,
            "aincludesb" => MatchPredicate::AIncludesB,
            "bincludesa" => MatchPredicate::BIncludesA,
            _ => {
                return Err(format!(
                    "unknown predicate {s:?} (expected intersection, exact, a-includes-b or b-includes-a)"
                ))
            }
        })
    }
}

impl fmt::Display for MatchPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchPredicate::Intersection => "intersection",
            MatchPredicate::Exact => "exact",
            MatchPredicate::AIncludesB => "a-includes-b",
            MatchPredicate::BIncludesA => "b-includes-a",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("tag {label:?} at {index}+{length} lies outside the document ({doc_len} characters)")]
    OutOfBounds {
        label: String,
        index: usize,
        length: usize,
        doc_len: usize,
    },
    #[error("tag {label:?} at {index} has zero length")]
    Empty { label: String, index: usize },
}

/// Checks every tag is a non-empty span inside a document of `doc_len` characters.
pub fn validate_tags(tags: &[Tag], doc_len: usize) -> Result<(), DiffError> {
    for t in tags {
        if t.length == 0 {
            return Err(DiffError::Empty {
                label: t.label.clone(),
                index: t.index,
            });
        }
        if t.end() > doc_len {
            return Err(DiffError::OutOfBounds {
                label: t.label.clone(),
                index: t.index,
                length: t.length,
                doc_len,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiffReport {
    pub predicate: MatchPredicate,
    /// Matched (reference, candidate) pairs.
    pub common: Vec<(Tag, Tag)>,
    pub only_a: Vec<Tag>,
    pub only_b: Vec<Tag>,
    #[serde(with = "crate::number")]
    pub precision: Number,
    #[serde(with = "crate::number")]
    pub recall: Number,
    #[serde(with = "crate::number")]
    pub f_measure: Number,
}

fn ratio(num: usize, den: usize) -> Number {
    if den == 0 {
        Number::one()
    } else {
        Number::new(num as i64, den as i64)
    }
}

/// Harmonic mean of `p` and `r`, zero when both are zero.
pub fn f_measure(p: Number, r: Number) -> Number {
    if (p + r).is_zero() {
        Number::zero()
    } else {
        Number::from_integer(2) * p * r / (p + r)
    }
}

/// One-to-one matching between `a` (reference) and `b` (candidate): a greedy
/// pass in start order, then augmenting paths up to maximum cardinality.
/// Returns, for each tag of `a` in sorted order, its partner index in sorted `b`.
fn match_tags(a: &[Tag], b: &[Tag], pred: MatchPredicate) -> Vec<Option<usize>> {
    let adj: Vec<Vec<usize>> = a
        .iter()
        .map(|x| {
            (0..b.len())
                .filter(|&j| b[j].label == x.label && pred.holds(x, &b[j]))
                .collect()
        })
        .collect();
    let mut of_a = vec![None; a.len()];
    let mut of_b: Vec<Option<usize>> = vec![None; b.len()];
    for i in 0..a.len() {
        if let Some(&j) = adj[i].iter().find(|&&j| of_b[j].is_none()) {
            of_a[i] = Some(j);
            of_b[j] = Some(i);
        }
    }
    fn augment(
        i: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        of_a: &mut [Option<usize>],
        of_b: &mut [Option<usize>],
    ) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if of_b[j].is_none_or(|k| augment(k, adj, seen, of_a, of_b)) {
                of_a[i] = Some(j);
                of_b[j] = Some(i);
                return true;
            }
        }
        false
    }
    for i in 0..a.len() {
        if of_a[i].is_none() {
            let mut seen = vec![false; b.len()];
            augment(i, &adj, &mut seen, &mut of_a, &mut of_b);
        }
    }
    of_a
}

/// Compares candidate tags `b` against reference tags `a`.
pub fn diff_tags(a: &[Tag], b: &[Tag], pred: MatchPredicate) -> DiffReport {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    let partner = match_tags(&a, &b, pred);
    let mut used = vec![false; b.len()];
    let mut common = Vec::new();
    let mut only_a = Vec::new();
    for (i, p) in partner.iter().enumerate() {
        match p {
            Some(j) => {
                used[*j] = true;
                common.push((a[i].clone(), b[*j].clone()));
            }
            None => only_a.push(a[i].clone()),
        }
    }
    let only_b: Vec<Tag> = b.iter().zip(&used).filter(|(_, u)| !**u).map(|(t, _)| t.clone()).collect();
    let precision = ratio(common.len(), b.len());
    let recall = ratio(common.len(), a.len());
    DiffReport {
        predicate: pred,
        f_measure: f_measure(precision, recall),
        common,
        only_a,
        only_b,
        precision,
        recall,
    }
}

/// [`diff_tags`] after checking both sets against the document length.
pub fn diff_tags_checked(a: &[Tag], b: &[Tag], pred: MatchPredicate, doc_len: usize) -> Result<DiffReport, DiffError> {
    validate_tags(a, doc_len)?;
    validate_tags(b, doc_len)?;
    Ok(diff_tags(a, b, pred))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TagTypeDiff {
    pub common: BTreeSet<String>,
    pub only_first: BTreeSet<String>,
    pub only_second: BTreeSet<String>,
}

/// Partitions two sets of tag-type labels.
pub fn diff_tagtypes<'a, I, J>(first: I, second: J) -> TagTypeDiff
where
    I: IntoIterator<Item = &'a str>,
    J: IntoIterator<Item = &'a str>,
{
    let t1: BTreeSet<String> = first.into_iter().map(String::from).collect();
    let t2: BTreeSet<String> = second.into_iter().map(String::from).collect();
    TagTypeDiff {
        common: t1.intersection(&t2).cloned().collect(),
        only_first: t1.difference(&t2).cloned().collect(),
        only_second: t2.difference(&t1).cloned().collect(),
    }
}
