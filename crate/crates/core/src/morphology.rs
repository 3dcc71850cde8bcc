//! Words, morphological solutions and the analyzers that produce them.
//!
//! A solution segments a word into `prefix* stem suffix*`, each morpheme
//! carrying POS, gloss and category tags. Two analyzers are provided: a
//! [`Lexicon`]-backed segmenter that enumerates every decomposition, and a
//! [`SolutionTable`] loaded from a precomputed solutions file.

use crate::number::{self, Number};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// A token of a document. `index` and `length` count characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    pub surface: String,
    pub index: usize,
    pub length: usize,
}

impl Word {
    pub fn new(surface: impl Into<String>, index: usize) -> Self {
        let surface = surface.into();
        let length = surface.chars().count();
        Word { surface, index, length }
    }

    pub fn end(&self) -> usize {
        self.index + self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphemeKind {
    Prefix,
    Stem,
    Suffix,
}

impl fmt::Display for MorphemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MorphemeKind::Prefix => "prefix",
            MorphemeKind::Stem => "stem",
            MorphemeKind::Suffix => "suffix",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Morpheme {
    pub form: String,
    pub kind: MorphemeKind,
    pub pos: String,
    pub gloss: BTreeSet<String>,
    pub category: BTreeSet<String>,
    pub index: usize,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MorphSolution {
    pub prefixes: Vec<Morpheme>,
    pub stem: Morpheme,
    pub suffixes: Vec<Morpheme>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "number::opt"
    )]
    pub numeric_value: Option<Number>,
}

impl MorphSolution {
    /// All morphemes in surface order.
    pub fn morphemes(&self) -> impl Iterator<Item = &Morpheme> {
        self.prefixes
            .iter()
            .chain(std::iter::once(&self.stem))
            .chain(self.suffixes.iter())
    }

    pub fn prefix_string(&self) -> String {
        self.prefixes.iter().map(|m| m.form.as_str()).collect()
    }

    pub fn suffix_string(&self) -> String {
        self.suffixes.iter().map(|m| m.form.as_str()).collect()
    }

    /// The POS concatenation `P` in prefix, stem, suffix order, joined with `+`.
    pub fn pos_string(&self) -> String {
        self.morphemes()
            .map(|m| m.pos.trim_end_matches('+'))
            .filter(|p| !p.is_empty())
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn total_length(&self) -> usize {
        self.morphemes().map(|m| m.length).sum()
    }
}

/// A stem entry of the lexicon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StemEntry {
    pub form: String,
    #[serde(default)]
    pub pos: String,
    #[serde(default)]
    pub glosses: BTreeSet<String>,
    #[serde(default)]
    pub categories: BTreeSet<String>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "number::opt"
    )]
    pub numeric_value: Option<Number>,
}

/// A prefix or suffix entry of the lexicon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffixEntry {
    pub form: String,
    #[serde(default)]
    pub pos: String,
    #[serde(default)]
    pub glosses: BTreeSet<String>,
    #[serde(default)]
    pub categories: BTreeSet<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("duplicate category name {0:?}")]
    DuplicateCategory(String),
    #[error("{kind} {form:?} uses undeclared category {category:?}")]
    UnknownCategory {
        kind: MorphemeKind,
        form: String,
        category: String,
    },
    #[error("{kind} {form:?} uses gloss {gloss:?} outside the gloss universe")]
    UnknownGloss {
        kind: MorphemeKind,
        form: String,
        gloss: String,
    },
    #[error("{kind} entry has an empty form")]
    EmptyForm { kind: MorphemeKind },
    #[error("lexicon word {word:?} maps to unknown stem {stem:?}")]
    UnknownWordStem { word: String, stem: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct LexiconFile {
    #[serde(default)]
    categories: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    glosses: Option<Vec<String>>,
    #[serde(default)]
    stems: Vec<StemEntry>,
    #[serde(default)]
    prefixes: Vec<AffixEntry>,
    #[serde(default)]
    suffixes: Vec<AffixEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    words: BTreeMap<String, BTreeSet<String>>,
}

/// Stems, affixes and the user-defined category set, indexed by form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LexiconFile", into = "LexiconFile")]
pub struct Lexicon {
    file: LexiconFile,
    #[serde(skip)]
    stem_index: HashMap<String, Vec<usize>>,
    #[serde(skip)]
    prefix_index: HashMap<String, Vec<usize>>,
    #[serde(skip)]
    suffix_index: HashMap<String, Vec<usize>>,
    #[serde(skip)]
    max_prefix_chars: usize,
    #[serde(skip)]
    max_suffix_chars: usize,
}

impl From<Lexicon> for LexiconFile {
    fn from(lex: Lexicon) -> Self {
        lex.file
    }
}

impl TryFrom<LexiconFile> for Lexicon {
    type Error = LexiconError;

    fn try_from(file: LexiconFile) -> Result<Self, LexiconError> {
        let mut seen = BTreeSet::new();
        for c in &file.categories {
            if !seen.insert(c.as_str()) {
                return Err(LexiconError::DuplicateCategory(c.clone()));
            }
        }
        let universe: Option<BTreeSet<&str>> = file
            .glosses
            .as_ref()
            .map(|g| g.iter().map(String::as_str).collect());
        let check = |kind, form: &str, glosses: &BTreeSet<String>, cats: &BTreeSet<String>| {
            if form.is_empty() {
                return Err(LexiconError::EmptyForm { kind });
            }
            if let Some(c) = cats.iter().find(|c| !seen.contains(c.as_str())) {
                return Err(LexiconError::UnknownCategory {
                    kind,
                    form: form.to_string(),
                    category: c.clone(),
                });
            }
            if let Some(universe) = &universe {
                if let Some(g) = glosses.iter().find(|g| !universe.contains(g.as_str())) {
                    return Err(LexiconError::UnknownGloss {
                        kind,
                        form: form.to_string(),
                        gloss: g.clone(),
                    });
                }
            }
            Ok(())
        };
        for s in &file.stems {
            check(MorphemeKind::Stem, &s.form, &s.glosses, &s.categories)?;
        }
        for a in &file.prefixes {
            check(MorphemeKind::Prefix, &a.form, &a.glosses, &a.categories)?;
        }
        for a in &file.suffixes {
            check(MorphemeKind::Suffix, &a.form, &a.glosses, &a.categories)?;
        }
        let stem_forms: BTreeSet<&str> = file.stems.iter().map(|s| s.form.as_str()).collect();
        for (word, stems) in &file.words {
            if let Some(s) = stems.iter().find(|s| !stem_forms.contains(s.as_str())) {
                return Err(LexiconError::UnknownWordStem {
                    word: word.clone(),
                    stem: s.clone(),
                });
            }
        }

        fn index<'a>(forms: impl Iterator<Item = &'a str>) -> HashMap<String, Vec<usize>> {
            let mut map: HashMap<String, Vec<usize>> = HashMap::new();
            for (i, f) in forms.enumerate() {
                map.entry(f.to_string()).or_default().push(i);
            }
            map
        }
        let max_chars = |entries: &[AffixEntry]| {
            entries.iter().map(|a| a.form.chars().count()).max().unwrap_or(0)
        };
        Ok(Lexicon {
            stem_index: index(file.stems.iter().map(|s| s.form.as_str())),
            prefix_index: index(file.prefixes.iter().map(|a| a.form.as_str())),
            suffix_index: index(file.suffixes.iter().map(|a| a.form.as_str())),
            max_prefix_chars: max_chars(&file.prefixes),
            max_suffix_chars: max_chars(&file.suffixes),
            file,
        })
    }
}

impl Lexicon {
    pub fn new(
        categories: Vec<String>,
        stems: Vec<StemEntry>,
        prefixes: Vec<AffixEntry>,
        suffixes: Vec<AffixEntry>,
    ) -> Result<Self, LexiconError> {
        LexiconFile {
            categories,
            glosses: None,
            stems,
            prefixes,
            suffixes,
            words: BTreeMap::new(),
        }
        .try_into()
    }

    /// Adds explicit lexicon-word to stem mappings, on top of the implicit
    /// identity mapping of every stem form.
    pub fn with_words(
        self,
        words: BTreeMap<String, BTreeSet<String>>,
    ) -> Result<Self, LexiconError> {
        let mut file = self.file;
        file.words.extend(words);
        file.try_into()
    }

    pub fn stems(&self) -> &[StemEntry] {
        &self.file.stems
    }

    pub fn prefixes(&self) -> &[AffixEntry] {
        &self.file.prefixes
    }

    pub fn suffixes(&self) -> &[AffixEntry] {
        &self.file.suffixes
    }

    pub fn categories(&self) -> &[String] {
        &self.file.categories
    }

    pub fn words(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.file.words
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FormatError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| FormatError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| FormatError::Schema {
            record: None,
            message: e.to_string(),
        })
    }

    /// Every decomposition of `surface` into known affix sequences.
    fn affix_splits(
        &self,
        chars: &[char],
        index: &HashMap<String, Vec<usize>>,
        max_len: usize,
    ) -> Vec<Vec<(usize, usize)>> {
        // (entry, char length) sequences covering `chars` exactly.
        if chars.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for len in 1..=max_len.min(chars.len()) {
            let head: String = chars[..len].iter().collect();
            if let Some(entries) = index.get(&head) {
                let tails = self.affix_splits(&chars[len..], index, max_len);
                for &e in entries {
                    for tail in &tails {
                        let mut seq = Vec::with_capacity(tail.len() + 1);
                        seq.push((e, len));
                        seq.extend_from_slice(tail);
                        out.push(seq);
                    }
                }
            }
        }
        out
    }
}

fn affix_morpheme(entry: &AffixEntry, kind: MorphemeKind, index: usize, length: usize) -> Morpheme {
    Morpheme {
        form: entry.form.clone(),
        kind,
        pos: entry.pos.clone(),
        gloss: entry.glosses.clone(),
        category: entry.categories.clone(),
        index,
        length,
    }
}

/// Produces the morphological solutions of a single word.
pub trait Analyzer: Send + Sync {
    fn analyze_word(&self, word: &Word) -> Vec<MorphSolution>;
}

impl Analyzer for Lexicon {
    fn analyze_word(&self, word: &Word) -> Vec<MorphSolution> {
        analyze_word(word, self)
    }
}

/// Enumerates every segmentation of `word` into `prefix* stem suffix*` known
/// to the lexicon. The result is sorted and free of duplicates; an unknown
/// word yields an empty set.
pub fn analyze_word(word: &Word, lexicon: &Lexicon) -> Vec<MorphSolution> {
    let chars: Vec<char> = word.surface.chars().collect();
    let n = chars.len();
    let mut out = Vec::new();
    for stem_start in 0..n {
        let prefix_splits = lexicon.affix_splits(
            &chars[..stem_start],
            &lexicon.prefix_index,
            lexicon.max_prefix_chars,
        );
        if prefix_splits.is_empty() {
            continue;
        }
        for stem_end in stem_start + 1..=n {
            let form: String = chars[stem_start..stem_end].iter().collect();
            let Some(stems) = lexicon.stem_index.get(&form) else {
                continue;
            };
            let suffix_splits = lexicon.affix_splits(
                &chars[stem_end..],
                &lexicon.suffix_index,
                lexicon.max_suffix_chars,
            );
            for prefixes in &prefix_splits {
                for suffixes in &suffix_splits {
                    for &s in stems {
                        let entry = &lexicon.file.stems[s];
                        let mut at = word.index;
                        let prefixes = prefixes
                            .iter()
                            .map(|&(e, len)| {
                                let m = affix_morpheme(
                                    &lexicon.file.prefixes[e],
                                    MorphemeKind::Prefix,
                                    at,
                                    len,
                                );
                                at += len;
                                m
                            })
                            .collect();
                        let stem = Morpheme {
                            form: entry.form.clone(),
                            kind: MorphemeKind::Stem,
                            pos: entry.pos.clone(),
                            gloss: entry.glosses.clone(),
                            category: entry.categories.clone(),
                            index: at,
                            length: stem_end - stem_start,
                        };
                        at += stem_end - stem_start;
                        let suffixes = suffixes
                            .iter()
                            .map(|&(e, len)| {
                                let m = affix_morpheme(
                                    &lexicon.file.suffixes[e],
                                    MorphemeKind::Suffix,
                                    at,
                                    len,
                                );
                                at += len;
                                m
                            })
                            .collect();
                        out.push(MorphSolution {
                            prefixes,
                            stem,
                            suffixes,
                            numeric_value: entry.numeric_value,
                        });
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// A word together with its solution set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzedWord {
    pub word: Word,
    pub solutions: Vec<MorphSolution>,
}

fn is_word_char(c: char) -> bool {
    if c.is_alphanumeric() {
        return true;
    }
    // combining marks (Latin and Arabic diacritics)
    matches!(c as u32,
        0x0300..=0x036F
        | 0x0610..=0x061A
        | 0x064B..=0x065F
        | 0x0670
        | 0x06D6..=0x06DC
        | 0x06DF..=0x06E4
        | 0x06E7..=0x06E8
        | 0x06EA..=0x06ED)
}

/// Splits a document on whitespace and punctuation. Offsets are in characters.
pub fn tokenize(document: &str) -> Vec<Word> {
    let mut words = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    for (i, c) in document.chars().enumerate() {
        if is_word_char(c) {
            if current.is_empty() {
                start = i;
            }
            current.push(c);
        } else if !current.is_empty() {
            words.push(Word::new(std::mem::take(&mut current), start));
        }
    }
    if !current.is_empty() {
        words.push(Word::new(current, start));
    }
    words
}

pub fn analyze_text(document: &str, analyzer: &dyn Analyzer) -> Vec<AnalyzedWord> {
    tokenize(document)
        .into_iter()
        .map(|word| AnalyzedWord {
            solutions: analyzer.analyze_word(&word),
            word,
        })
        .collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{}{message}", record.map(|r| format!("record {r}: ")).unwrap_or_default())]
    Schema {
        record: Option<usize>,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionRecord {
    word: String,
    index: usize,
    length: usize,
    solutions: Vec<MorphSolution>,
}

fn validate_record(rec: &SolutionRecord) -> Result<(), String> {
    let chars = rec.word.chars().count();
    if chars != rec.length {
        return Err(format!(
            "word {:?} has {} characters but length {}",
            rec.word, chars, rec.length
        ));
    }
    for (i, sol) in rec.solutions.iter().enumerate() {
        let mut at = rec.index;
        for m in sol.morphemes() {
            if m.length == 0 {
                return Err(format!("solution {i}: morpheme {:?} has zero length", m.form));
            }
            if m.index != at {
                return Err(format!(
                    "solution {i}: morpheme {:?} starts at {} but {} was expected",
                    m.form, m.index, at
                ));
            }
            at += m.length;
        }
        let kinds_ok = sol.prefixes.iter().all(|m| m.kind == MorphemeKind::Prefix)
            && sol.stem.kind == MorphemeKind::Stem
            && sol.suffixes.iter().all(|m| m.kind == MorphemeKind::Suffix);
        if !kinds_ok {
            return Err(format!("solution {i}: morpheme kinds out of order"));
        }
        if sol.total_length() != rec.length {
            return Err(format!(
                "solution {i}: morpheme lengths sum to {} but the word has length {}",
                sol.total_length(),
                rec.length
            ));
        }
    }
    Ok(())
}

/// Parses a solutions file, validating every record.
pub fn parse_solutions(json: &str) -> Result<Vec<AnalyzedWord>, FormatError> {
    let values: Vec<serde_json::Value> =
        serde_json::from_str(json).map_err(|e| FormatError::Schema {
            record: None,
            message: e.to_string(),
        })?;
    let mut out = Vec::with_capacity(values.len());
    let mut last_end = 0;
    for (i, v) in values.into_iter().enumerate() {
        let rec: SolutionRecord =
            serde_json::from_value(v).map_err(|e| FormatError::Schema {
                record: Some(i),
                message: e.to_string(),
            })?;
        validate_record(&rec).map_err(|message| FormatError::Schema {
            record: Some(i),
            message,
        })?;
        if rec.index < last_end {
            return Err(FormatError::Schema {
                record: Some(i),
                message: format!("word {:?} overlaps the previous record", rec.word),
            });
        }
        last_end = rec.index + rec.length;
        out.push(AnalyzedWord {
            word: Word {
                surface: rec.word,
                index: rec.index,
                length: rec.length,
            },
            solutions: rec.solutions,
        });
    }
    Ok(out)
}

/// Canonical solutions-file text (sorted keys, two-space indent, trailing LF).
pub fn solutions_to_string(words: &[AnalyzedWord]) -> String {
    let records: Vec<SolutionRecord> = words
        .iter()
        .map(|w| SolutionRecord {
            word: w.word.surface.clone(),
            index: w.word.index,
            length: w.word.length,
            solutions: w.solutions.clone(),
        })
        .collect();
    crate::io::canonical_json(&records)
}

pub fn load_solutions_file(path: impl AsRef<Path>) -> Result<Vec<AnalyzedWord>, FormatError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_solutions(&text)
}

pub fn write_solutions_file(
    words: &[AnalyzedWord],
    path: impl AsRef<Path>,
) -> std::io::Result<()> {
    std::fs::write(path, solutions_to_string(words))
}

/// An analyzer backed by precomputed solutions, looked up by position first
/// and by surface form second.
#[derive(Debug, Clone, Default)]
pub struct SolutionTable {
    by_position: HashMap<(usize, String), Vec<MorphSolution>>,
    by_surface: HashMap<String, Vec<MorphSolution>>,
}

impl SolutionTable {
    pub fn new(words: &[AnalyzedWord]) -> Self {
        let mut table = SolutionTable::default();
        for w in words {
            table
                .by_position
                .insert((w.word.index, w.word.surface.clone()), w.solutions.clone());
            table
                .by_surface
                .entry(w.word.surface.clone())
                .or_insert_with(|| w.solutions.clone());
        }
        table
    }
}

impl Analyzer for SolutionTable {
    fn analyze_word(&self, word: &Word) -> Vec<MorphSolution> {
        self.by_position
            .get(&(word.index, word.surface.clone()))
            .or_else(|| self.by_surface.get(&word.surface))
            .map(|sols| {
                // Shift stored offsets onto this occurrence.
                sols.iter()
                    .map(|s| rebase(s, word.index))
                    .collect()
            })
            .unwrap_or_default()
    }
}

fn rebase(sol: &MorphSolution, index: usize) -> MorphSolution {
    let mut sol = sol.clone();
    let base = sol.morphemes().map(|m| m.index).min().unwrap_or(index);
    let shift = |m: &mut Morpheme| m.index = m.index - base + index;
    sol.prefixes.iter_mut().for_each(shift);
    shift(&mut sol.stem);
    sol.suffixes.iter_mut().for_each(shift);
    sol
}
