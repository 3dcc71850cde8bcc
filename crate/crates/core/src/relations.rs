//! Relation tuples over match trees and the entity graph they produce.
//!
//! An occurrence of a binding is a non-empty node of a match tree carrying
//! that binding path. Two occurrences co-occur when one contains the other
//! or their lowest common ancestor is not a repetition, i.e. they were
//! matched in the same iteration of every enclosing loop.

use crate::document::{AnalyzedDocument, SpanFeature};
use crate::regex::{CompiledRule, MatchNode, Node, RuleMatch};
use crate::synk::GlossGraph;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Label of the default cross-reference edges.
pub const IS_SYN: &str = "isSyn";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RelationDef {
    pub name: String,
    pub rule: String,
    pub source: String,
    pub destination: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "is_text")]
    pub label_feature: SpanFeature,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub next_flag: bool,
}

fn is_text(f: &SpanFeature) -> bool {
    *f == SpanFeature::Text
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("relation {relation}: rule {rule} has no binding {binding}")]
    UnknownBinding {
        relation: String,
        rule: String,
        binding: String,
    },
    #[error("relation {relation}: binding {binding} is not inside a repetition")]
    NextOutsideRepetition { relation: String, binding: String },
}

impl RelationDef {
    pub fn new(name: &str, rule: &str, source: &str, destination: &str, label: &str) -> Self {
        RelationDef {
            name: name.into(),
            rule: rule.into(),
            source: source.into(),
            destination: destination.into(),
            label: label.into(),
            label_feature: SpanFeature::Text,
            next_flag: false,
        }
    }

    pub fn with_feature(mut self, f: SpanFeature) -> Self {
        self.label_feature = f;
        self
    }

    pub fn next(mut self) -> Self {
        self.next_flag = true;
        self
    }

    pub fn validate(&self, rule: &CompiledRule) -> Result<(), RelationError> {
        let paths = rule.binding_paths();
        for b in [&self.source, &self.destination, &self.label] {
            if !paths.contains(b) {
                return Err(RelationError::UnknownBinding {
                    relation: self.name.clone(),
                    rule: rule.name.clone(),
                    binding: b.clone(),
                });
            }
        }
        if self.next_flag && !under_repetition(&rule.root, &self.destination, false) {
            return Err(RelationError::NextOutsideRepetition {
                relation: self.name.clone(),
                binding: self.destination.clone(),
            });
        }
        Ok(())
    }
}

fn under_repetition(n: &Node, binding: &str, inside: bool) -> bool {
    if inside && n.binding.as_deref() == Some(binding) {
        return true;
    }
    let inside = inside || n.repetition;
    n.children.iter().any(|c| under_repetition(c, binding, inside))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EntityNode {
    pub id: String,
    pub text: String,
    /// Word span, end exclusive.
    pub start: usize,
    pub end: usize,
    /// Character offset and length in the document.
    pub index: usize,
    pub length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head_stem: Option<String>,
    /// Rules whose matches contain this node.
    pub rules: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EntityEdge {
    pub source: String,
    pub destination: String,
    pub label: String,
    pub relation: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityGraph {
    pub nodes: Vec<EntityNode>,
    pub edges: Vec<EntityEdge>,
}

impl EntityGraph {
    pub fn node(&self, id: &str) -> Option<&EntityNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_by_text(&self, text: &str) -> Option<&EntityNode> {
        self.nodes.iter().find(|n| n.text == text)
    }

    /// `(source text, destination text, label)` per edge.
    pub fn edge_texts(&self) -> Vec<(String, String, String)> {
        let text = |id: &str| self.node(id).map(|n| n.text.clone()).unwrap_or_default();
        self.edges
            .iter()
            .map(|e| (text(&e.source), text(&e.destination), e.label.clone()))
            .collect()
    }
}

/// A node of a tree with its child-index path from the root.
struct Occurrence<'a> {
    node: &'a MatchNode,
    path: Vec<usize>,
}

fn occurrences<'a>(root: &'a MatchNode, binding: &str) -> Vec<Occurrence<'a>> {
    let mut out = Vec::new();
    let mut stack = vec![(root, Vec::new())];
    while let Some((n, path)) = stack.pop() {
        if n.binding.as_deref() == Some(binding) && !n.is_empty() {
            out.push(Occurrence {
                node: n,
                path: path.clone(),
            });
        }
        for (i, c) in n.children.iter().enumerate().rev() {
            let mut p = path.clone();
            p.push(i);
            stack.push((c, p));
        }
    }
    out
}

fn at<'a>(root: &'a MatchNode, path: &[usize]) -> &'a MatchNode {
    path.iter().fold(root, |n, &i| &n.children[i])
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn co_occur(root: &MatchNode, a: &Occurrence, b: &Occurrence) -> bool {
    let d = common_prefix(&a.path, &b.path);
    d == a.path.len() || d == b.path.len() || !at(root, &a.path[..d]).repetition
}

/// `b` is in the iteration right after the one holding `a`.
fn follows(root: &MatchNode, a: &Occurrence, b: &Occurrence) -> bool {
    let d = common_prefix(&a.path, &b.path);
    d < a.path.len() && d < b.path.len() && at(root, &a.path[..d]).repetition && b.path[d] == a.path[d] + 1
}

type Span = (usize, usize);

#[derive(Default)]
struct GraphBuilder {
    nodes: BTreeMap<Span, EntityNode>,
    edges: BTreeSet<(Span, Span, String, String)>,
}

impl GraphBuilder {
    fn add_node(&mut self, doc: &AnalyzedDocument, n: &MatchNode, rule: &str) -> Span {
        let span = (n.start, n.end);
        let entry = self.nodes.entry(span).or_insert_with(|| {
            let (index, length) = doc.char_span(n.start, n.end);
            EntityNode {
                id: String::new(),
                text: doc.span_text(n.start, n.end),
                start: n.start,
                end: n.end,
                index,
                length,
                head_stem: doc.head_stem(n),
                rules: BTreeSet::new(),
                attributes: BTreeMap::new(),
            }
        });
        entry.rules.insert(rule.to_string());
        span
    }

    fn finish(self) -> EntityGraph {
        let ids: BTreeMap<Span, String> = self
            .nodes
            .keys()
            .enumerate()
            .map(|(i, s)| (*s, format!("n{i}")))
            .collect();
        let nodes = self
            .nodes
            .into_iter()
            .map(|(s, mut n)| {
                n.id = ids[&s].clone();
                n
            })
            .collect();
        let edges = self
            .edges
            .into_iter()
            .map(|(a, b, label, relation)| EntityEdge {
                source: ids[&a].clone(),
                destination: ids[&b].clone(),
                label,
                relation,
            })
            .collect();
        EntityGraph { nodes, edges }
    }
}

/// One edge per co-occurring `(source, destination, label)` triple of each
/// definition within each match of its rule.
pub fn extract_relations(doc: &AnalyzedDocument, matches: &[RuleMatch], defs: &[RelationDef]) -> EntityGraph {
    let mut g = GraphBuilder::default();
    for m in matches {
        let root = &m.tree;
        for def in defs.iter().filter(|d| d.rule == m.rule) {
            let sources = occurrences(root, &def.source);
            let dests = occurrences(root, &def.destination);
            let labels = occurrences(root, &def.label);
            for a in &sources {
                for b in &dests {
                    let related = if def.next_flag {
                        follows(root, a, b)
                    } else {
                        !std::ptr::eq(a.node, b.node) && co_occur(root, a, b)
                    };
                    if !related {
                        continue;
                    }
                    for r in &labels {
                        let fits = if def.next_flag {
                            co_occur(root, b, r)
                        } else {
                            co_occur(root, a, r) && co_occur(root, b, r)
                        };
                        if !fits {
                            continue;
                        }
                        let sa = g.add_node(doc, a.node, &m.rule);
                        let sb = g.add_node(doc, b.node, &m.rule);
                        let label = doc.node_feature(r.node, def.label_feature);
                        g.edges.insert((sa, sb, label, def.name.clone()));
                    }
                }
            }
        }
    }
    g.finish()
}

/// Adds an `isSyn` edge for every node pair whose head stems are related
/// within two gloss-sharing steps. Idempotent.
pub fn add_synonymy_edges(graph: &EntityGraph, glosses: &GlossGraph) -> EntityGraph {
    let mut out = graph.clone();
    let existing: BTreeSet<(String, String)> = graph
        .edges
        .iter()
        .filter(|e| e.relation == IS_SYN)
        .map(|e| (e.source.clone(), e.destination.clone()))
        .collect();
    let mut ordered: Vec<&EntityNode> = graph.nodes.iter().collect();
    ordered.sort_by_key(|n| (n.start, n.end));
    for (i, a) in ordered.iter().enumerate() {
        for b in &ordered[i + 1..] {
            let (Some(ha), Some(hb)) = (&a.head_stem, &b.head_stem) else { continue };
            let related = glosses.syn_closure(hb, 2).map(|c| c.contains(ha)).unwrap_or(false)
                || glosses.syn_closure(ha, 2).map(|c| c.contains(hb)).unwrap_or(false);
            if related && !existing.contains(&(a.id.clone(), b.id.clone())) {
                out.edges.push(EntityEdge {
                    source: a.id.clone(),
                    destination: b.id.clone(),
                    label: IS_SYN.into(),
                    relation: IS_SYN.into(),
                });
            }
        }
    }
    out.edges.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::TagSetSequence;
    use crate::regex::{parse_rules, Pattern, DEFAULT_MAX_STEPS};

    fn run(src: &str, tags: &[&str], defs: &[RelationDef]) -> EntityGraph {
        let labels = ["A", "B", "T", "P"].iter().map(|s| s.to_string()).collect();
        let set = parse_rules(src, &labels).unwrap();
        let name = set.rules().last().unwrap().name.clone();
        let p = Pattern::new(&set, &name);
        for d in defs {
            d.validate(&p.rule).unwrap();
        }
        let seq = TagSetSequence::from_labels(tags.iter().map(|t| vec![t.to_string()]));
        let doc = AnalyzedDocument::from_tags(seq);
        let matches = p.find(&doc.tags, DEFAULT_MAX_STEPS).unwrap();
        extract_relations(&doc, &matches, defs)
    }

    #[test]
    fn sibling_bindings_relate() {
        let g = run("r: $a=A $t=T $b=B;", &["A", "T", "B"], &[RelationDef::new("x", "r", "a", "b", "t")]);
        assert_eq!(g.edge_texts(), vec![("w0".into(), "w2".into(), "w1".into())]);
    }

    #[test]
    fn missing_optional_gives_no_edge() {
        let g = run("r: $a=A $t=T? $b=B;", &["A", "B"], &[RelationDef::new("x", "r", "a", "b", "t")]);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn chain_uses_next_iteration() {
        let g = run(
            "r: ($t=T $p=P)+;",
            &["T", "P", "T", "P", "T", "P"],
            &[RelationDef::new("chain", "r", "p", "p", "t").next()],
        );
        assert_eq!(
            g.edge_texts(),
            vec![
                ("w1".into(), "w3".into(), "w2".into()),
                ("w3".into(), "w5".into(), "w4".into())
            ]
        );
    }

    #[test]
    fn different_iterations_do_not_relate() {
        let g = run("r: ($t=T $p=P)+;", &["T", "P", "T", "P"], &[RelationDef::new("x", "r", "t", "p", "t")]);
        assert_eq!(g.edges.len(), 2);
    }

    #[test]
    fn validation() {
        let labels = ["A", "T"].iter().map(|s| s.to_string()).collect();
        let set = parse_rules("r: $a=A $t=T;", &labels).unwrap();
        let p = Pattern::new(&set, "r");
        assert!(matches!(
            RelationDef::new("x", "r", "a", "zz", "t").validate(&p.rule),
            Err(RelationError::UnknownBinding { .. })
        ));
        assert!(matches!(
            RelationDef::new("x", "r", "a", "a", "t").next().validate(&p.rule),
            Err(RelationError::NextOutsideRepetition { .. })
        ));
    }

    #[test]
    fn synonymy_edges() {
        let g = EntityGraph {
            nodes: vec![
                EntityNode {
                    id: "n0".into(),
                    text: "x".into(),
                    start: 0,
                    end: 1,
                    index: 0,
                    length: 1,
                    head_stem: Some("mA'".into()),
                    rules: BTreeSet::new(),
                    attributes: BTreeMap::new(),
                },
                EntityNode {
                    id: "n1".into(),
                    text: "y".into(),
                    start: 1,
                    end: 2,
                    index: 2,
                    length: 1,
                    head_stem: Some("r^s^s".into()),
                    rules: BTreeSet::new(),
                    attributes: BTreeMap::new(),
                },
            ],
            edges: vec![],
        };
        let stems: BTreeMap<String, BTreeSet<String>> = [
            ("mA'", vec!["water"]),
            ("n.d.h", vec!["water", "spray"]),
            ("r^s^s", vec!["spray"]),
        ]
        .into_iter()
        .map(|(s, gs)| (s.to_string(), gs.into_iter().map(String::from).collect()))
        .collect();
        let gg = GlossGraph::from_parts(stems, BTreeMap::new());
        let once = add_synonymy_edges(&g, &gg);
        assert_eq!(once.edges.len(), 1);
        assert_eq!(add_synonymy_edges(&once, &gg), once);
        let single = EntityGraph {
            nodes: vec![g.nodes[0].clone()],
            edges: vec![],
        };
        assert_eq!(add_synonymy_edges(&single, &gg), single);
    }
}
