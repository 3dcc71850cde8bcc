//! The full extraction pipeline for one project: analyze a document, tag
//! its words, match every rule, run action scripts and build the entity
//! graph.

use crate::actions::{ActionEnv, ActionError, Interpreter, Script};
use crate::analysis::Tag;
use crate::document::AnalyzedDocument;
use crate::formula::NONE;
use crate::io::{read_project, DocumentRef, GraphFile, IoError, MatchRecord, ProjectFile, TagsFile};
use crate::morphology::{analyze_text, AnalyzedWord, Analyzer, Lexicon};
use crate::regex::{MatchError, Pattern, RuleMatch, DEFAULT_MAX_STEPS};
use crate::relations::{add_synonymy_edges, extract_relations, EntityGraph};
use crate::synk::GlossGraph;
use serde::Serialize;
use std::fmt;
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Load,
    Analyze,
    Simulate,
    Actions,
    Relations,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Load => "load",
            Stage::Analyze => "analyze",
            Stage::Simulate => "simulate",
            Stage::Actions => "actions",
            Stage::Relations => "relations",
            Stage::Write => "write",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{stage}: {message}")]
pub struct EngineError {
    pub stage: Stage,
    pub message: String,
}

impl EngineError {
    pub fn new(stage: Stage, message: impl fmt::Display) -> Self {
        EngineError {
            stage,
            message: message.to_string(),
        }
    }
}

impl From<MatchError> for EngineError {
    fn from(e: MatchError) -> Self {
        EngineError::new(Stage::Simulate, e)
    }
}

impl From<ActionError> for EngineError {
    fn from(e: ActionError) -> Self {
        EngineError::new(Stage::Actions, e)
    }
}

/// Everything one run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub document: AnalyzedDocument,
    pub matches: Vec<RuleMatch>,
    pub env: ActionEnv,
    pub graph: EntityGraph,
}

impl RunOutput {
    /// Non-`NONE` formula tags, one per word and label.
    pub fn word_tags(&self) -> Vec<Tag> {
        let doc = &self.document;
        doc.tags
            .per_word
            .iter()
            .zip(&doc.tags.words)
            .flat_map(|(labels, w)| {
                labels
                    .iter()
                    .filter(|l| l.as_str() != NONE)
                    .map(|l| Tag::new(w.index, w.length, l.clone()))
            })
            .collect()
    }

    /// Expression matches as character-span tags.
    pub fn match_tags(&self) -> Vec<Tag> {
        self.match_records()
            .into_iter()
            .filter(|m| m.length > 0)
            .map(|m| Tag::new(m.index, m.length, m.rule))
            .collect()
    }

    pub fn match_records(&self) -> Vec<MatchRecord> {
        match_records(&self.document, &self.matches)
    }

    pub fn document_ref(&self, name: Option<String>) -> DocumentRef {
        DocumentRef::of(&self.document.text, name)
    }

    pub fn tags_file(&self, name: Option<String>, graph: Option<String>) -> TagsFile {
        let mut t = TagsFile::new(self.document_ref(name));
        t.tags = self.word_tags();
        t.matches = self.match_records();
        t.annotations = self.env.emitted.clone();
        t.graph = graph;
        t
    }

    pub fn graph_file(&self, name: Option<String>) -> GraphFile {
        GraphFile::new(self.document_ref(name), self.graph.clone())
    }
}

/// Matches with their character spans.
pub fn match_records(doc: &AnalyzedDocument, matches: &[RuleMatch]) -> Vec<MatchRecord> {
    matches
        .iter()
        .map(|m| {
            let (index, length) = doc.char_span(m.start(), m.end());
            MatchRecord {
                rule: m.rule.clone(),
                index,
                length,
                tree: m.tree.clone(),
            }
        })
        .collect()
}

/// A validated project ready to process documents. Cheap to share across
/// threads; each call works on its own state.
#[derive(Clone)]
pub struct Engine {
    project: ProjectFile,
    analyzer: Arc<dyn Analyzer>,
    glosses: Arc<GlossGraph>,
    patterns: Vec<Pattern>,
    scripts: Vec<Vec<Script>>,
    interpreter: Interpreter,
    max_steps: u64,
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine")
            .field("rules", &self.patterns.iter().map(|p| p.name()).collect::<Vec<_>>())
            .field("max_steps", &self.max_steps)
            .finish()
    }
}

impl Engine {
    pub fn new(project: ProjectFile, lexicon: Lexicon) -> Result<Self, EngineError> {
        let load = |e: IoError| EngineError::new(Stage::Load, e);
        project.validate().map_err(load)?;
        let set = project.rule_set().map_err(load)?;
        let patterns = project.mre.iter().map(|r| Pattern::new(&set, &r.label)).collect();
        let scripts = project
            .mre
            .iter()
            .map(|r| r.actions.iter().map(Script::parse).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| EngineError::new(Stage::Load, e))?;
        Ok(Engine {
            glosses: Arc::new(GlossGraph::from_lexicon(&lexicon)),
            analyzer: Arc::new(lexicon),
            project,
            patterns,
            scripts,
            interpreter: Interpreter::new(),
            max_steps: DEFAULT_MAX_STEPS,
        })
    }

    /// Reads a project file and the lexicon it references.
    pub fn load(path: &Path) -> Result<Self, EngineError> {
        let project = read_project(path).map_err(|e| EngineError::new(Stage::Load, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let lexicon = project
            .load_lexicon(base)
            .map_err(|e| EngineError::new(Stage::Load, e))?;
        Self::new(project, lexicon)
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    /// Replaces the lexicon analyzer, e.g. with precomputed solutions.
    pub fn with_analyzer(mut self, analyzer: Arc<dyn Analyzer>) -> Self {
        self.analyzer = analyzer;
        self
    }

    pub fn interpreter_mut(&mut self) -> &mut Interpreter {
        &mut self.interpreter
    }

    pub fn project(&self) -> &ProjectFile {
        &self.project
    }

    pub fn glosses(&self) -> &GlossGraph {
        &self.glosses
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps
    }

    pub fn analyze(&self, text: &str) -> Vec<AnalyzedWord> {
        analyze_text(text, self.analyzer.as_ref())
    }

    /// Analyzes and tags `text`.
    pub fn document(&self, text: &str) -> AnalyzedDocument {
        self.tag_words(text, self.analyze(text))
    }

    pub fn tag_words(&self, text: &str, words: Vec<AnalyzedWord>) -> AnalyzedDocument {
        AnalyzedDocument::new(text, words, &self.project.mbf, &self.glosses)
    }

    /// Matches of every rule, rule by rule in project order.
    pub fn simulate(&self, doc: &AnalyzedDocument) -> Result<Vec<RuleMatch>, EngineError> {
        let mut out = Vec::new();
        for p in &self.patterns {
            out.extend(p.find(&doc.tags, self.max_steps)?);
        }
        Ok(out)
    }

    /// Runs each rule's scripts over its matches in document order.
    pub fn run_actions(&self, doc: &AnalyzedDocument, matches: &[RuleMatch]) -> Result<ActionEnv, EngineError> {
        let mut env = ActionEnv::default();
        let mut ordered: Vec<&RuleMatch> = matches.iter().collect();
        ordered.sort_by_key(|m| (m.start(), m.end()));
        for m in ordered {
            if let Some(i) = self.patterns.iter().position(|p| p.name() == m.rule) {
                self.interpreter.run(doc, m, &self.scripts[i], &mut env)?;
            }
        }
        Ok(env)
    }

    pub fn relations(&self, doc: &AnalyzedDocument, matches: &[RuleMatch]) -> EntityGraph {
        let g = extract_relations(doc, matches, &self.project.relations);
        if self.project.synonymy_edges {
            add_synonymy_edges(&g, &self.glosses)
        } else {
            g
        }
    }

    pub fn run(&self, text: &str) -> Result<RunOutput, EngineError> {
        self.run_document(self.document(text))
    }

    pub fn run_document(&self, document: AnalyzedDocument) -> Result<RunOutput, EngineError> {
        let matches = self.simulate(&document)?;
        let env = self.run_actions(&document, &matches)?;
        let graph = self.relations(&document, &matches);
        Ok(RunOutput {
            document,
            matches,
            env,
            graph,
        })
    }
}
