//! Action scripts attached to rule bindings.
//!
//! Pre-match scripts run in pre-order over a match tree and on-match
//! scripts in post-order. Variables live in an [`ActionEnv`] shared by all
//! matches of a document, visited in document order.

pub mod parser;

use crate::document::{AnalyzedDocument, SpanFeature};
use crate::number::{format_number, Number};
use crate::regex::{MatchNode, RuleMatch};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Zero};
use parser::{parse_statements, Accessor, AssignOp, BinOp, Expr, Stmt, UnOp};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Runtime(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum Value {
    Unset,
    Number(#[serde(with = "crate::number")] Number),
    Text(String),
    Bool(bool),
}

impl Value {
    pub fn int(n: i64) -> Self {
        Value::Number(Number::from_integer(n))
    }

    pub fn truthy(&self) -> bool {
        match self {
            Value::Unset => false,
            Value::Number(n) => !n.is_zero(),
            Value::Text(s) => !s.is_empty(),
            Value::Bool(b) => *b,
        }
    }

    pub fn as_number(&self) -> Result<Number, ActionError> {
        match self {
            Value::Unset => Ok(Number::zero()),
            Value::Number(n) => Ok(*n),
            Value::Bool(b) => Ok(Number::from_integer(*b as i64)),
            Value::Text(s) => Err(ActionError::Runtime(format!("expected a number, found text {s:?}"))),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unset => Ok(()),
            Value::Number(n) => f.write_str(&format_number(n)),
            Value::Text(s) => f.write_str(s),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Phase {
    PreMatch,
    OnMatch,
}

/// Script source and where it attaches. An empty binding is the rule root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    #[serde(default)]
    pub binding: String,
    pub phase: Phase,
    pub source: String,
}

impl ActionSpec {
    pub fn new(binding: &str, phase: Phase, source: &str) -> Self {
        ActionSpec {
            binding: binding.into(),
            phase,
            source: source.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Script {
    pub binding: String,
    pub phase: Phase,
    stmts: Vec<Stmt>,
    refs: BTreeSet<String>,
}

impl Script {
    pub fn parse(spec: &ActionSpec) -> Result<Self, ActionError> {
        let stmts = parse_statements(&spec.source)?;
        let mut refs = BTreeSet::new();
        for s in &stmts {
            stmt_refs(s, &mut refs);
        }
        Ok(Script {
            binding: spec.binding.clone(),
            phase: spec.phase,
            stmts,
            refs,
        })
    }

    /// Binding paths the script reads.
    pub fn references(&self) -> &BTreeSet<String> {
        &self.refs
    }
}

fn stmt_refs(s: &Stmt, out: &mut BTreeSet<String>) {
    match s {
        Stmt::Assign { value, .. } => expr_refs(value, out),
        Stmt::If { branches, otherwise } => {
            for (c, body) in branches {
                expr_refs(c, out);
                body.iter().for_each(|s| stmt_refs(s, out));
            }
            otherwise.iter().flatten().for_each(|s| stmt_refs(s, out));
        }
        Stmt::Emit { label, value } => {
            expr_refs(label, out);
            expr_refs(value, out);
        }
        Stmt::Print(v) => v.iter().for_each(|e| expr_refs(e, out)),
        Stmt::Call(e) => expr_refs(e, out),
    }
}

fn expr_refs(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Access { binding, .. } => {
            out.insert(binding.clone());
        }
        Expr::Unary(_, x) => expr_refs(x, out),
        Expr::Binary(_, a, b) => {
            expr_refs(a, out);
            expr_refs(b, out);
        }
        Expr::Call { args, .. } => args.iter().for_each(|a| expr_refs(a, out)),
        Expr::Num(_) | Expr::Str(_) | Expr::Bool(_) | Expr::Var(_) => {}
    }
}

/// Parses `source` as a script; convenience for validation.
pub fn parse_action(source: &str) -> Result<(), ActionError> {
    parse_statements(source).map(|_| ())
}

/// A value emitted by `emit(label, value)`, attached to the node whose
/// script emitted it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Annotation {
    pub rule: String,
    pub label: String,
    pub value: Value,
    /// Word span, end exclusive.
    pub start: usize,
    pub end: usize,
    pub index: usize,
    pub length: usize,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionEnv {
    pub variables: BTreeMap<String, Value>,
    pub emitted: Vec<Annotation>,
    pub output: Vec<String>,
}

impl ActionEnv {
    pub fn get(&self, name: &str) -> Value {
        self.variables.get(name).cloned().unwrap_or(Value::Unset)
    }
}

pub type HostFn = Arc<dyn Fn(&[Value]) -> Result<Value, String> + Send + Sync>;

/// Runs scripts over match trees. Host functions registered here are
/// callable from scripts by name.
#[derive(Clone, Default)]
pub struct Interpreter {
    host: HashMap<String, HostFn>,
}

impl fmt::Debug for Interpreter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Interpreter")
            .field("host", &self.host.keys().collect::<Vec<_>>())
            .finish()
    }
}

struct Frame<'a> {
    doc: &'a AnalyzedDocument,
    rule: &'a str,
    node: &'a MatchNode,
    bound: HashMap<&'a str, &'a MatchNode>,
}

impl Interpreter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, f: impl Fn(&[Value]) -> Result<Value, String> + Send + Sync + 'static) {
        self.host.insert(name.to_string(), Arc::new(f));
    }

    /// Runs `scripts` over one match: pre-match scripts on entering each
    /// node, on-match scripts on leaving it.
    pub fn run(
        &self,
        doc: &AnalyzedDocument,
        m: &RuleMatch,
        scripts: &[Script],
        env: &mut ActionEnv,
    ) -> Result<(), ActionError> {
        if scripts.is_empty() {
            return Ok(());
        }
        let mut ancestors = Vec::new();
        self.visit(doc, &m.rule, &m.tree, true, &mut ancestors, scripts, env)
    }

    #[allow(clippy::too_many_arguments)]
    fn visit<'a>(
        &self,
        doc: &'a AnalyzedDocument,
        rule: &'a str,
        node: &'a MatchNode,
        is_root: bool,
        ancestors: &mut Vec<&'a MatchNode>,
        scripts: &[Script],
        env: &mut ActionEnv,
    ) -> Result<(), ActionError> {
        let attached = |phase: Phase| {
            scripts.iter().filter(move |s| {
                s.phase == phase
                    && !node.is_empty()
                    && (node.binding.as_deref() == Some(s.binding.as_str()) || (is_root && s.binding.is_empty()))
            })
        };
        for s in attached(Phase::PreMatch) {
            self.run_script(doc, rule, node, ancestors, s, env)?;
        }
        ancestors.push(node);
        for c in &node.children {
            self.visit(doc, rule, c, false, ancestors, scripts, env)?;
        }
        ancestors.pop();
        for s in attached(Phase::OnMatch) {
            self.run_script(doc, rule, node, ancestors, s, env)?;
        }
        Ok(())
    }

    fn run_script<'a>(
        &self,
        doc: &'a AnalyzedDocument,
        rule: &'a str,
        node: &'a MatchNode,
        ancestors: &[&'a MatchNode],
        script: &'a Script,
        env: &mut ActionEnv,
    ) -> Result<(), ActionError> {
        let mut bound = HashMap::new();
        for r in &script.refs {
            match resolve(r, node, ancestors) {
                Some(n) => {
                    bound.insert(r.as_str(), n);
                }
                None => return Ok(()),
            }
        }
        let frame = Frame { doc, rule, node, bound };
        self.exec(&frame, &script.stmts, env)
    }

    fn exec(&self, f: &Frame, stmts: &[Stmt], env: &mut ActionEnv) -> Result<(), ActionError> {
        for s in stmts {
            match s {
                Stmt::Assign { name, op, value } => {
                    let v = self.eval(f, value, env)?;
                    let new = match op {
                        AssignOp::Set => v,
                        AssignOp::Add => binary(BinOp::Add, env.get(name), v)?,
                        AssignOp::Sub => binary(BinOp::Sub, env.get(name), v)?,
                        AssignOp::Mul => binary(BinOp::Mul, env.get(name), v)?,
                        AssignOp::Div => binary(BinOp::Div, env.get(name), v)?,
                    };
                    env.variables.insert(name.clone(), new);
                }
                Stmt::If { branches, otherwise } => {
                    let mut taken = false;
                    for (cond, body) in branches {
                        if self.eval(f, cond, env)?.truthy() {
                            self.exec(f, body, env)?;
                            taken = true;
                            break;
                        }
                    }
                    if !taken {
                        if let Some(body) = otherwise {
                            self.exec(f, body, env)?;
                        }
                    }
                }
                Stmt::Emit { label, value } => {
                    let label = self.eval(f, label, env)?.to_string();
                    let value = self.eval(f, value, env)?;
                    let (index, length) = f.doc.char_span(f.node.start, f.node.end);
                    env.emitted.push(Annotation {
                        rule: f.rule.to_string(),
                        label,
                        value,
                        start: f.node.start,
                        end: f.node.end,
                        index,
                        length,
                        text: f.node.text.clone(),
                    });
                }
                Stmt::Print(parts) => {
                    let mut line = String::new();
                    for p in parts {
                        line.push_str(&self.eval(f, p, env)?.to_string());
                    }
                    env.output.push(line);
                }
                Stmt::Call(e) => {
                    self.eval(f, e, env)?;
                }
            }
        }
        Ok(())
    }

    fn eval(&self, f: &Frame, e: &Expr, env: &ActionEnv) -> Result<Value, ActionError> {
        Ok(match e {
            Expr::Num(n) => Value::Number(*n),
            Expr::Str(s) => Value::Text(s.clone()),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Var(v) => env.get(v),
            Expr::Access { binding, accessor } => {
                let n = f.bound[binding.as_str()];
                access(f.doc, binding, n, *accessor)?
            }
            Expr::Unary(UnOp::Not, x) => Value::Bool(!self.eval(f, x, env)?.truthy()),
            Expr::Unary(UnOp::Neg, x) => Value::Number(-self.eval(f, x, env)?.as_number()?),
            Expr::Binary(BinOp::And, a, b) => {
                Value::Bool(self.eval(f, a, env)?.truthy() && self.eval(f, b, env)?.truthy())
            }
            Expr::Binary(BinOp::Or, a, b) => {
                Value::Bool(self.eval(f, a, env)?.truthy() || self.eval(f, b, env)?.truthy())
            }
            Expr::Binary(op, a, b) => binary(*op, self.eval(f, a, env)?, self.eval(f, b, env)?)?,
            Expr::Call {
                name,
                args,
                line,
                column,
            } => {
                let func = self
                    .host
                    .get(name)
                    .ok_or_else(|| ActionError::Runtime(format!("{line}:{column}: unknown function `{name}`")))?;
                let vals = args.iter().map(|a| self.eval(f, a, env)).collect::<Result<Vec<_>, _>>()?;
                func(&vals).map_err(|m| ActionError::Runtime(format!("{name}: {m}")))?
            }
        })
    }
}

/// The node itself, else the first non-empty bound node in its subtree,
/// else in the subtree of the nearest ancestor that has one.
fn resolve<'a>(binding: &str, node: &'a MatchNode, ancestors: &[&'a MatchNode]) -> Option<&'a MatchNode> {
    let find = |root: &'a MatchNode| {
        root.walk()
            .into_iter()
            .find(|n| n.binding.as_deref() == Some(binding) && !n.is_empty())
    };
    find(node).or_else(|| ancestors.iter().rev().find_map(|a| find(a)))
}

fn access(doc: &AnalyzedDocument, binding: &str, n: &MatchNode, a: Accessor) -> Result<Value, ActionError> {
    Ok(match a {
        Accessor::Text => Value::Text(n.text.clone()),
        Accessor::Position => Value::int(doc.char_span(n.start, n.end).0 as i64),
        Accessor::Length => Value::int(doc.char_span(n.start, n.end).1 as i64),
        Accessor::Stem => Value::Text(doc.node_feature(n, SpanFeature::Stem)),
        Accessor::Pos => Value::Text(doc.node_feature(n, SpanFeature::Pos)),
        Accessor::Gloss => Value::Text(doc.node_feature(n, SpanFeature::Gloss)),
        Accessor::Number => {
            let values: Vec<Number> = n
                .leaves()
                .into_iter()
                .filter_map(|l| doc.solution(l.start, l.label.as_deref().unwrap_or_default()))
                .filter_map(|s| s.numeric_value)
                .collect();
            match values.as_slice() {
                [v] => Value::Number(*v),
                _ => {
                    return Err(ActionError::Runtime(format!(
                        "${binding} at word {:?} has no numeric value",
                        n.text
                    )))
                }
            }
        }
    })
}

fn overflow() -> ActionError {
    ActionError::Runtime("arithmetic overflow".into())
}

fn binary(op: BinOp, a: Value, b: Value) -> Result<Value, ActionError> {
    use Value::*;
    Ok(match op {
        BinOp::Add => match (&a, &b) {
            (Text(_), _) | (_, Text(_)) => Text(format!("{a}{b}")),
            _ => Number(a.as_number()?.checked_add(&b.as_number()?).ok_or_else(overflow)?),
        },
        BinOp::Sub => Number(a.as_number()?.checked_sub(&b.as_number()?).ok_or_else(overflow)?),
        BinOp::Mul => Number(a.as_number()?.checked_mul(&b.as_number()?).ok_or_else(overflow)?),
        BinOp::Div => {
            let d = b.as_number()?;
            if d.is_zero() {
                return Err(ActionError::Runtime("division by zero".into()));
            }
            Number(a.as_number()?.checked_div(&d).ok_or_else(overflow)?)
        }
        BinOp::Eq | BinOp::Ne => {
            let eq = match (&a, &b) {
                (Text(x), Text(y)) => x == y,
                (Text(_), _) | (_, Text(_)) => a.to_string() == b.to_string(),
                (Bool(_), _) | (_, Bool(_)) => a.truthy() == b.truthy(),
                _ => a.as_number()? == b.as_number()?,
            };
            Bool(eq == (op == BinOp::Eq))
        }
        BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => {
            let ord = match (&a, &b) {
                (Text(x), Text(y)) => x.cmp(y),
                _ => a.as_number()?.cmp(&b.as_number()?),
            };
            Bool(match op {
                BinOp::Lt => ord.is_lt(),
                BinOp::Gt => ord.is_gt(),
                BinOp::Le => ord.is_le(),
                _ => ord.is_ge(),
            })
        }
        BinOp::And => Bool(a.truthy() && b.truthy()),
        BinOp::Or => Bool(a.truthy() || b.truthy()),
    })
}
