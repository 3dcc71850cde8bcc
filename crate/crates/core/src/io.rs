//! File formats: project files, tags files and entity-graph files.
//!
//! Every file carries a `version` field and is written as canonical JSON
//! (sorted keys, two-space indent, UTF-8, trailing LF), so writing the same
//! value twice gives identical bytes. Documents are referenced by SHA-256 so
//! a tags file can detect that its text has changed.

use crate::actions::{ActionSpec, Annotation, Script};
use crate::analysis::Tag;
use crate::formula::{Legend, MbfTagType, NONE};
use crate::morphology::Lexicon;
use crate::regex::{compile, MatchNode, RuleSet};
use crate::relations::{EntityGraph, RelationDef};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("missing `version` field")]
    MissingVersion,
    #[error("unsupported {kind} version {found} (expected {FORMAT_VERSION})")]
    UnsupportedVersion { kind: &'static str, found: serde_json::Value },
    #[error("at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn io_err(path: &Path, e: std::io::Error) -> IoError {
    IoError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Sorted keys, two-space indent, trailing LF.
pub fn canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable value");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable value");
    s.push('\n');
    s
}

/// Deserializes `json`, reporting schema errors with the path to the field.
pub fn from_json<T: DeserializeOwned>(json: &str) -> Result<T, IoError> {
    let de = &mut serde_json::Deserializer::from_str(json);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            IoError::Syntax(inner.to_string())
        } else {
            IoError::Schema { path, message: inner.to_string() }
        }
    })
}

/// Deserializes a versioned file after checking its `version` field.
fn from_versioned<T: DeserializeOwned>(json: &str, kind: &'static str) -> Result<T, IoError> {
    let v: serde_json::Value = serde_json::from_str(json).map_err(|e| IoError::Syntax(e.to_string()))?;
    match v.get("version") {
        None => return Err(IoError::MissingVersion),
        Some(found) if found.as_u64() != Some(FORMAT_VERSION as u64) => {
            return Err(IoError::UnsupportedVersion {
                kind,
                found: found.clone(),
            })
        }
        _ => {}
    }
    from_json(json)
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Where a project's lexicon comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LexiconSource {
    /// Path to a lexicon file, relative to the project file.
    Path(PathBuf),
    Inline(Box<Lexicon>),
}

/// A named expression rule with its display settings and scripts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MreTagType {
    pub label: String,
    pub expression: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub legend: Legend,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub actions: Vec<ActionSpec>,
}

impl MreTagType {
    pub fn new(label: &str, expression: &str) -> Self {
        MreTagType {
            label: label.into(),
            expression: expression.into(),
            description: String::new(),
            legend: Legend::default(),
            actions: Vec::new(),
        }
    }

    pub fn with_action(mut self, spec: ActionSpec) -> Self {
        self.actions.push(spec);
        self
    }
}

fn yes() -> bool {
    true
}

/// Formulae, rules, actions and relations applied together to documents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ProjectFile {
    pub version: u32,
    pub lexicon: LexiconSource,
    #[serde(default)]
    pub mbf: Vec<MbfTagType>,
    #[serde(default)]
    pub mre: Vec<MreTagType>,
    #[serde(default)]
    pub relations: Vec<RelationDef>,
    /// Add synonymy edges between entity nodes.
    #[serde(default = "yes")]
    pub synonymy_edges: bool,
}

impl ProjectFile {
    pub fn new(lexicon: LexiconSource) -> Self {
        ProjectFile {
            version: FORMAT_VERSION,
            lexicon,
            mbf: Vec::new(),
            mre: Vec::new(),
            relations: Vec::new(),
            synonymy_edges: true,
        }
    }

    pub fn from_json(json: &str) -> Result<Self, IoError> {
        let p: ProjectFile = from_versioned(json, "project")?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        canonical_json(self)
    }

    /// The rules of the project, parsed against its formula labels.
    pub fn rule_set(&self) -> Result<RuleSet, IoError> {
        let mut set = RuleSet::new(self.mbf.iter().map(|t| t.label.clone()));
        set.add_all(self.mre.iter().map(|r| (r.label.as_str(), r.expression.as_str())))
            .map_err(|e| IoError::Invalid(e.to_string()))?;
        Ok(set)
    }

    /// Checks every cross-reference in the project.
    pub fn validate(&self) -> Result<(), IoError> {
        let invalid = |m: String| Err(IoError::Invalid(m));
        if self.version != FORMAT_VERSION {
            return Err(IoError::UnsupportedVersion {
                kind: "project",
                found: self.version.into(),
            });
        }
        let mut labels = BTreeSet::new();
        let legends = self
            .mbf
            .iter()
            .map(|t| (&t.label, &t.legend))
            .chain(self.mre.iter().map(|r| (&r.label, &r.legend)));
        for (label, legend) in legends {
            if label == NONE {
                return invalid(format!("tag type {label}: the label is reserved"));
            }
            if !labels.insert(label.as_str()) {
                return invalid(format!("tag type {label}: duplicate label"));
            }
            if !legend.is_valid_color() {
                return invalid(format!("tag type {label}: invalid legend color {:?}", legend.color));
            }
        }
        for t in &self.mbf {
            t.formula
                .validate()
                .map_err(|e| IoError::Invalid(format!("tag type {}: {e}", t.label)))?;
        }
        let set = self.rule_set()?;
        for r in &self.mre {
            let compiled = compile(&set, &r.label);
            let paths = compiled.binding_paths();
            for a in &r.actions {
                Script::parse(a).map_err(|e| IoError::Invalid(format!("rule {} action: {e}", r.label)))?;
                if !a.binding.is_empty() && !paths.contains(&a.binding) {
                    return invalid(format!("rule {} action: unknown binding {}", r.label, a.binding));
                }
            }
        }
        let mut names = BTreeSet::new();
        for rel in &self.relations {
            if !names.insert(rel.name.as_str()) {
                return invalid(format!("relation {}: duplicate name", rel.name));
            }
            if set.get(&rel.rule).is_none() {
                return invalid(format!("relation {}: unknown rule {}", rel.name, rel.rule));
            }
            rel.validate(&compile(&set, &rel.rule))
                .map_err(|e| IoError::Invalid(e.to_string()))?;
        }
        Ok(())
    }

    /// Loads the lexicon, resolving a relative path against `base`.
    pub fn load_lexicon(&self, base: &Path) -> Result<Lexicon, IoError> {
        match &self.lexicon {
            LexiconSource::Inline(l) => Ok((**l).clone()),
            LexiconSource::Path(p) => {
                let path = base.join(p);
                let text = read_text(&path)?;
                from_json(&text).map_err(|e| IoError::Invalid(format!("lexicon {}: {e}", path.display())))
            }
        }
    }
}

pub fn read_project(path: &Path) -> Result<ProjectFile, IoError> {
    ProjectFile::from_json(&read_text(path)?)
}

pub fn write_project(project: &ProjectFile, path: &Path) -> Result<(), IoError> {
    write_text(path, &project.to_json())
}

/// Identifies the text a tags file was computed from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub sha256: String,
    /// Length in characters.
    pub length: usize,
}

impl DocumentRef {
    pub fn of(text: &str, name: Option<String>) -> Self {
        DocumentRef {
            name,
            sha256: sha256_hex(text),
            length: text.chars().count(),
        }
    }
}

/// One expression match with its parse tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchRecord {
    pub rule: String,
    pub index: usize,
    pub length: usize,
    pub tree: MatchNode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagsFile {
    pub version: u32,
    pub document: DocumentRef,
    #[serde(default)]
    pub tags: Vec<Tag>,
    #[serde(default)]
    pub matches: Vec<MatchRecord>,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
    /// Path of the entity-graph file, relative to the tags file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
}

impl TagsFile {
    pub fn new(document: DocumentRef) -> Self {
        TagsFile {
            version: FORMAT_VERSION,
            document,
            tags: Vec::new(),
            matches: Vec::new(),
            annotations: Vec::new(),
            graph: None,
        }
    }

    pub fn from_json(json: &str) -> Result<Self, IoError> {
        let t: TagsFile = from_versioned(json, "tags")?;
        t.validate()?;
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        canonical_json(self)
    }

    /// Checks that every span lies within the referenced document.
    pub fn validate(&self) -> Result<(), IoError> {
        let len = self.document.length;
        let check = |what: &str, index: usize, length: usize| {
            if index + length > len {
                Err(IoError::Invalid(format!(
                    "{what} at {index}+{length} exceeds the document length {len}"
                )))
            } else {
                Ok(())
            }
        };
        for t in &self.tags {
            check(&format!("tag {}", t.label), t.index, t.length)?;
        }
        for m in &self.matches {
            check(&format!("match of {}", m.rule), m.index, m.length)?;
        }
        for a in &self.annotations {
            check(&format!("annotation {}", a.label), a.index, a.length)?;
        }
        Ok(())
    }

    /// Checks that `text` is the referenced document.
    pub fn check_document(&self, text: &str) -> Result<(), IoError> {
        let actual = sha256_hex(text);
        if actual != self.document.sha256 {
            return Err(IoError::Invalid(format!(
                "document hash {actual} does not match the tags file ({})",
                self.document.sha256
            )));
        }
        Ok(())
    }
}

pub fn read_tags(path: &Path) -> Result<TagsFile, IoError> {
    TagsFile::from_json(&read_text(path)?)
}

pub fn write_tags(tags: &TagsFile, path: &Path) -> Result<(), IoError> {
    tags.validate()?;
    write_text(path, &tags.to_json())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub version: u32,
    pub document: DocumentRef,
    #[serde(flatten)]
    pub graph: EntityGraph,
}

impl GraphFile {
    pub fn new(document: DocumentRef, graph: EntityGraph) -> Self {
        GraphFile {
            version: FORMAT_VERSION,
            document,
            graph,
        }
    }

    pub fn from_json(json: &str) -> Result<Self, IoError> {
        let g: GraphFile = from_versioned(json, "graph")?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        canonical_json(self)
    }

    /// Checks node ids are unique and every edge joins known nodes.
    pub fn validate(&self) -> Result<(), IoError> {
        let mut ids = BTreeSet::new();
        for n in &self.graph.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(IoError::Invalid(format!("duplicate node id {}", n.id)));
            }
            if n.index + n.length > self.document.length {
                return Err(IoError::Invalid(format!("node {} exceeds the document length", n.id)));
            }
        }
        for e in &self.graph.edges {
            for end in [&e.source, &e.destination] {
                if !ids.contains(end.as_str()) {
                    return Err(IoError::Invalid(format!("edge {} refers to unknown node {end}", e.label)));
                }
            }
        }
        Ok(())
    }
}

pub fn read_graph(path: &Path) -> Result<GraphFile, IoError> {
    GraphFile::from_json(&read_text(path)?)
}

pub fn write_graph(graph: &GraphFile, path: &Path) -> Result<(), IoError> {
    graph.validate()?;
    write_text(path, &graph.to_json())
}
