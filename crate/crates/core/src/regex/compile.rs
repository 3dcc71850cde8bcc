//! Lowering of a rule into a numbered node tree: rule references are
//! expanded inline and `f^x` is rewritten into alternatives.

use super::ast::{expand_upto, Expr, ExprKind};
use super::parser::RuleSet;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Label,
    Concat,
    Star,
    Plus,
    Optional,
    And,
    Or,
}

impl NodeKind {
    /// Whether the children of a match of this node are iterations.
    pub fn is_loop(self) -> bool {
        matches!(self, NodeKind::Star | NodeKind::Plus)
    }
}

/// One node of a compiled rule; `id` is its pre-order number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: usize,
    pub kind: NodeKind,
    /// Formula label, for `Label` nodes.
    pub label: Option<String>,
    /// Qualified binding path, e.g. `s2.x` for `x` inside a reference bound as `s2`.
    pub binding: Option<String>,
    /// Name of the rule this node was expanded from, on reference roots.
    pub rule: Option<String>,
    /// Children are iterations (loops and the sequences generated for `f^x`).
    pub repetition: bool,
    pub children: Vec<Node>,
}

impl Node {
    pub fn walk(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }
}

/// A rule lowered to nodes, with per-id metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledRule {
    pub name: String,
    pub root: Node,
    /// `nodes[id]` is the node numbered `id`, without its children.
    pub nodes: Vec<Node>,
}

impl CompiledRule {
    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    /// Every distinct binding path in the rule.
    pub fn binding_paths(&self) -> Vec<String> {
        let mut out: Vec<String> = self.nodes.iter().filter_map(|n| n.binding.clone()).collect();
        out.sort();
        out.dedup();
        out
    }
}

fn qualify(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

fn blank(kind: NodeKind) -> Node {
    Node {
        id: 0,
        kind,
        label: None,
        binding: None,
        rule: None,
        repetition: false,
        children: Vec::new(),
    }
}

fn lower(expr: &Expr, prefix: &str, set: &RuleSet) -> Node {
    let binding = expr.binding.as_ref().map(|b| qualify(prefix, b));
    let mut node = match &expr.kind {
        ExprKind::UpTo(..) => {
            let expanded = expand_upto(expr);
            return lower(&expanded, prefix, set);
        }
        ExprKind::Rule(name) => {
            let inner_prefix = qualify(prefix, expr.binding.as_deref().unwrap_or(name));
            let body = &set.get(name).expect("resolved by the parser").expr;
            let mut inner = lower(body, &inner_prefix, set);
            if inner.binding.is_some() {
                let mut wrap = blank(NodeKind::Concat);
                wrap.children.push(inner);
                inner = wrap;
            }
            inner.rule = Some(name.clone());
            inner
        }
        ExprKind::Label(l) => Node {
            label: Some(l.clone()),
            ..blank(NodeKind::Label)
        },
        ExprKind::Concat(v) => Node {
            children: v.iter().map(|c| lower(c, prefix, set)).collect(),
            ..blank(NodeKind::Concat)
        },
        ExprKind::Or(v) => Node {
            children: v.iter().map(|c| lower(c, prefix, set)).collect(),
            ..blank(NodeKind::Or)
        },
        ExprKind::Star(c) => Node {
            children: vec![lower(c, prefix, set)],
            ..blank(NodeKind::Star)
        },
        ExprKind::Plus(c) => Node {
            children: vec![lower(c, prefix, set)],
            ..blank(NodeKind::Plus)
        },
        ExprKind::Optional(c) => Node {
            children: vec![lower(c, prefix, set)],
            ..blank(NodeKind::Optional)
        },
        ExprKind::And(l, r) => Node {
            children: vec![lower(l, prefix, set), lower(r, prefix, set)],
            ..blank(NodeKind::And)
        },
    };
    node.binding = binding;
    node.repetition = expr.repetition || node.kind.is_loop();
    node
}

fn number(node: &mut Node, next: &mut usize, flat: &mut Vec<Node>) {
    node.id = *next;
    *next += 1;
    flat.push(Node {
        children: Vec::new(),
        ..node.clone()
    });
    for c in &mut node.children {
        number(c, next, flat);
    }
}

/// Lowers rule `name` of `set`. Panics if the rule does not exist.
pub fn compile(set: &RuleSet, name: &str) -> CompiledRule {
    let rule = set.get(name).unwrap_or_else(|| panic!("no rule named {name}"));
    compile_expr(set, name, &rule.expr)
}

/// Lowers a free-standing expression whose references resolve in `set`.
pub fn compile_expr(set: &RuleSet, name: &str, expr: &Expr) -> CompiledRule {
    let mut root = lower(expr, "", set);
    let mut flat = Vec::new();
    number(&mut root, &mut 0, &mut flat);
    CompiledRule {
        name: name.to_string(),
        root,
        nodes: flat,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_rules;
    use super::*;
    use std::collections::BTreeSet;

    fn set(src: &str, labels: &[&str]) -> RuleSet {
        let labels: BTreeSet<String> = labels.iter().map(|s| s.to_string()).collect();
        parse_rules(src, &labels).unwrap()
    }

    #[test]
    fn references_expand_with_qualified_bindings() {
        let s = set("inner: $x=A B;\nouter: $y=inner inner;", &["A", "B"]);
        let c = compile(&s, "outer");
        assert_eq!(c.binding_paths(), vec!["inner.x", "y", "y.x"]);
        assert_eq!(c.root.kind, NodeKind::Concat);
        assert_eq!(c.root.children[0].rule.as_deref(), Some("inner"));
    }

    #[test]
    fn ids_are_preorder() {
        let s = set("r: (A | B)+ C?;", &["A", "B", "C"]);
        let c = compile(&s, "r");
        let ids: Vec<usize> = c.root.walk().iter().map(|n| n.id).collect();
        assert_eq!(ids, (0..c.nodes.len()).collect::<Vec<_>>());
        assert!(c.nodes.iter().any(|n| n.kind == NodeKind::Plus && n.repetition));
    }

    #[test]
    fn upto_lowers_to_or_of_repetitions() {
        let s = set("r: $o=A^2;", &["A"]);
        let c = compile(&s, "r");
        assert_eq!(c.root.kind, NodeKind::Or);
        assert_eq!(c.root.binding.as_deref(), Some("o"));
        assert!(c.root.children.iter().all(|k| k.repetition));
        assert_eq!(c.root.children[1].children.len(), 2);
    }

    #[test]
    fn bound_rule_root_is_wrapped() {
        let s = set("inner: $x=A;\nouter: $y=inner;", &["A"]);
        let c = compile(&s, "outer");
        assert_eq!(c.root.binding.as_deref(), Some("y"));
        assert_eq!(c.root.children[0].binding.as_deref(), Some("y.x"));
    }
}
