//! Thompson construction with open/close markers for every node.
//!
//! A conjunction `l & r` becomes a single `Conj` edge: both operands are
//! built as detached fragments and the edge jumps to every position where
//! both accept the same span.

use super::compile::{CompiledRule, Node, NodeKind};
use super::ast::NONE;

pub type StateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Epsilon,
    Open(usize),
    Close(usize),
    /// Consumes one word whose tag set holds `labels[i]`.
    Symbol(usize),
    Conj(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub kind: EdgeKind,
    pub to: StateId,
}

/// Entry and exit states of a sub-automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fragment {
    pub entry: StateId,
    pub exit: StateId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conjunction {
    pub node: usize,
    pub left: Fragment,
    pub right: Fragment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    /// Outgoing edges per state, in priority order.
    pub edges: Vec<Vec<Edge>>,
    pub labels: Vec<String>,
    pub conjunctions: Vec<Conjunction>,
    pub main: Fragment,
}

impl Nfa {
    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    /// Index of the reserved `NONE` label, if the automaton uses it.
    pub fn none_symbol(&self) -> Option<usize> {
        self.labels.iter().position(|l| l == NONE)
    }
}

struct Builder {
    edges: Vec<Vec<Edge>>,
    labels: Vec<String>,
    conjunctions: Vec<Conjunction>,
}

impl Builder {
    fn state(&mut self) -> StateId {
        self.edges.push(Vec::new());
        self.edges.len() - 1
    }

    fn edge(&mut self, from: StateId, kind: EdgeKind, to: StateId) {
        self.edges[from].push(Edge { kind, to });
    }

    fn eps(&mut self, from: StateId, to: StateId) {
        self.edge(from, EdgeKind::Epsilon, to);
    }

    fn symbol(&mut self, label: &str) -> usize {
        match self.labels.iter().position(|l| l == label) {
            Some(i) => i,
            None => {
                self.labels.push(label.to_string());
                self.labels.len() - 1
            }
        }
    }

    fn build(&mut self, node: &Node) -> Fragment {
        let entry = self.state();
        let a = self.state();
        let b = self.state();
        let exit = self.state();
        self.edge(entry, EdgeKind::Open(node.id), a);
        self.edge(b, EdgeKind::Close(node.id), exit);
        match node.kind {
            NodeKind::Label => {
                let sym = self.symbol(node.label.as_deref().unwrap_or(NONE));
                self.edge(a, EdgeKind::Symbol(sym), b);
            }
            NodeKind::Concat => {
                let mut at = a;
                for c in &node.children {
                    let f = self.build(c);
                    self.eps(at, f.entry);
                    at = f.exit;
                }
                self.eps(at, b);
            }
            NodeKind::Or => {
                for c in &node.children {
                    let f = self.build(c);
                    self.eps(a, f.entry);
                    self.eps(f.exit, b);
                }
            }
            NodeKind::Optional => {
                let f = self.build(&node.children[0]);
                self.eps(a, f.entry);
                self.eps(a, b);
                self.eps(f.exit, b);
            }
            NodeKind::Star => {
                let f = self.build(&node.children[0]);
                self.eps(a, f.entry);
                self.eps(a, b);
                self.eps(f.exit, a);
            }
            NodeKind::Plus => {
                let f = self.build(&node.children[0]);
                self.eps(a, f.entry);
                self.eps(f.exit, f.entry);
                self.eps(f.exit, b);
            }
            NodeKind::And => {
                let left = self.build(&node.children[0]);
                let right = self.build(&node.children[1]);
                self.conjunctions.push(Conjunction {
                    node: node.id,
                    left,
                    right,
                });
                self.edge(a, EdgeKind::Conj(self.conjunctions.len() - 1), b);
            }
        }
        Fragment { entry, exit }
    }
}

pub fn build_nfa(rule: &CompiledRule) -> Nfa {
    build_nfa_for(&rule.root)
}

pub fn build_nfa_for(root: &Node) -> Nfa {
    let mut b = Builder {
        edges: Vec::new(),
        labels: Vec::new(),
        conjunctions: Vec::new(),
    };
    let main = b.build(root);
    Nfa {
        edges: b.edges,
        labels: b.labels,
        conjunctions: b.conjunctions,
        main,
    }
}
