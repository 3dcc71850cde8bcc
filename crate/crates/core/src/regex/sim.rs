//! Subset simulation over tag-set sequences, leftmost-longest scanning and
//! parse-tree reconstruction from marker edges.

use super::ast::NONE;
use super::compile::{CompiledRule, NodeKind};
use super::nfa::{build_nfa, EdgeKind, Fragment, Nfa, StateId};
use super::parser::RuleSet;
use crate::formula::TagSetSequence;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::rc::Rc;
use thiserror::Error;

pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("rule {rule}: simulation exceeded the budget of {limit} steps")]
    BudgetExceeded { rule: String, limit: u64 },
}

/// One node of a match parse tree. Spans are word indices, end exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MatchNode {
    pub node: usize,
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binding: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub repetition: bool,
    pub start: usize,
    pub end: usize,
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<MatchNode>,
}

impl MatchNode {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Nodes in pre-order.
    pub fn walk(&self) -> Vec<&MatchNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    /// Label leaves in document order.
    pub fn leaves(&self) -> Vec<&MatchNode> {
        self.walk().into_iter().filter(|n| n.kind == NodeKind::Label).collect()
    }

    /// Checks that leaves are single words and that children cover their
    /// parent contiguously and in order.
    pub fn is_well_formed(&self) -> bool {
        if self.kind == NodeKind::Label {
            return self.children.is_empty() && self.len() == 1 && self.label.is_some();
        }
        if self.start > self.end {
            return false;
        }
        if self.kind == NodeKind::And {
            return self.children.len() == 1
                && self.children[0].start == self.start
                && self.children[0].end == self.end
                && self.children[0].is_well_formed();
        }
        let mut at = self.start;
        for c in &self.children {
            if c.start != at || !c.is_well_formed() {
                return false;
            }
            at = c.end;
        }
        at == self.end || (self.children.is_empty() && self.start == self.end)
    }
}

/// A match of a named rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleMatch {
    pub rule: String,
    pub tree: MatchNode,
}

impl RuleMatch {
    pub fn start(&self) -> usize {
        self.tree.start
    }

    pub fn end(&self) -> usize {
        self.tree.end
    }
}

/// A compiled rule with its automaton.
#[derive(Debug, Clone)]
pub struct Pattern {
    pub rule: CompiledRule,
    pub nfa: Nfa,
}

impl Pattern {
    pub fn new(set: &RuleSet, name: &str) -> Self {
        Self::from_rule(super::compile::compile(set, name))
    }

    pub fn from_rule(rule: CompiledRule) -> Self {
        let nfa = build_nfa(&rule);
        Pattern { rule, nfa }
    }

    pub fn name(&self) -> &str {
        &self.rule.name
    }

    /// Leftmost-longest, non-overlapping, non-empty matches.
    pub fn find(&self, seq: &TagSetSequence, max_steps: u64) -> Result<Vec<RuleMatch>, MatchError> {
        let mut m = Matcher::new(self, seq, max_steps);
        let spans = m.scan()?;
        spans
            .into_iter()
            .map(|(s, e)| {
                Ok(RuleMatch {
                    rule: self.rule.name.clone(),
                    tree: m.reconstruct(self.nfa.main, s, e)?,
                })
            })
            .collect()
    }

    /// The spans `find` would return, without building trees.
    pub fn find_spans(&self, seq: &TagSetSequence, max_steps: u64) -> Result<Vec<(usize, usize)>, MatchError> {
        Matcher::new(self, seq, max_steps).scan()
    }

    /// Every end position `e` such that the rule accepts words `[start, e)`.
    pub fn accepted_ends(&self, seq: &TagSetSequence, start: usize, max_steps: u64) -> Result<Vec<usize>, MatchError> {
        let mut m = Matcher::new(self, seq, max_steps);
        let mut ends = m.run(self.nfa.main, start, None, false)?.0;
        ends.sort_unstable();
        ends.dedup();
        Ok(ends)
    }
}

struct Matcher<'a> {
    pattern: &'a Pattern,
    seq: &'a TagSetSequence,
    /// `symbols[p][l]`: label `l` fires on word `p`.
    symbols: Vec<Vec<bool>>,
    steps: u64,
    max_steps: u64,
    conj_memo: HashMap<(usize, usize), Rc<Vec<usize>>>,
}

type RunResult = (Vec<usize>, Vec<Vec<StateId>>);

impl<'a> Matcher<'a> {
    fn new(pattern: &'a Pattern, seq: &'a TagSetSequence, max_steps: u64) -> Self {
        let labels = &pattern.nfa.labels;
        let symbols = seq
            .per_word
            .iter()
            .map(|set| {
                labels
                    .iter()
                    .map(|l| {
                        if l == NONE {
                            set.len() == 1 && set.contains(NONE)
                        } else {
                            set.contains(l)
                        }
                    })
                    .collect()
            })
            .collect();
        Matcher {
            pattern,
            seq,
            symbols,
            steps: 0,
            max_steps,
            conj_memo: HashMap::new(),
        }
    }

    fn len(&self) -> usize {
        self.seq.per_word.len()
    }

    fn scan(&mut self) -> Result<Vec<(usize, usize)>, MatchError> {
        let mut out = Vec::new();
        let mut s = 0;
        while s < self.len() {
            let ends = self.run(self.pattern.nfa.main, s, None, false)?.0;
            match ends.into_iter().max() {
                Some(e) if e > s => {
                    out.push((s, e));
                    s = e;
                }
                _ => s += 1,
            }
        }
        Ok(out)
    }

    fn tick(&mut self) -> Result<(), MatchError> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(MatchError::BudgetExceeded {
                rule: self.pattern.rule.name.clone(),
                limit: self.max_steps,
            });
        }
        Ok(())
    }

    /// Simulates `frag` from `start`. Returns the positions where its exit is
    /// reached (with repeats) and, if `record`, the states reached per position.
    fn run(&mut self, frag: Fragment, start: usize, limit: Option<usize>, record: bool) -> Result<RunResult, MatchError> {
        let nfa = &self.pattern.nfa;
        let n = limit.unwrap_or(self.len());
        let mut pending: Vec<Vec<StateId>> = vec![Vec::new(); n - start + 1];
        pending[0].push(frag.entry);
        let mut mark = vec![usize::MAX; nfa.state_count()];
        let mut furthest = start;
        let mut ends = Vec::new();
        let mut recs = Vec::new();
        for p in start..=n {
            let mut work = std::mem::take(&mut pending[p - start]);
            if work.is_empty() && p >= furthest {
                break;
            }
            let mut reached = Vec::new();
            while let Some(s) = work.pop() {
                if mark[s] == p {
                    continue;
                }
                mark[s] = p;
                self.tick()?;
                if record {
                    reached.push(s);
                }
                if s == frag.exit {
                    ends.push(p);
                }
                for edge in &nfa.edges[s] {
                    match edge.kind {
                        EdgeKind::Epsilon | EdgeKind::Open(_) | EdgeKind::Close(_) => work.push(edge.to),
                        EdgeKind::Symbol(l) => {
                            if p < n && self.symbols[p][l] {
                                pending[p + 1 - start].push(edge.to);
                                furthest = furthest.max(p + 1);
                            }
                        }
                        EdgeKind::Conj(k) => {
                            for &q in self.conj_ends(k, p)?.iter() {
                                if q > n {
                                    continue;
                                }
                                if q == p {
                                    work.push(edge.to);
                                } else {
                                    pending[q - start].push(edge.to);
                                    furthest = furthest.max(q);
                                }
                            }
                        }
                    }
                }
            }
            if record {
                recs.push(reached);
            }
        }
        Ok((ends, recs))
    }

    /// Ends `q` (ascending) such that both operands of conjunction `k`
    /// accept words `[p, q)`.
    fn conj_ends(&mut self, k: usize, p: usize) -> Result<Rc<Vec<usize>>, MatchError> {
        if let Some(hit) = self.conj_memo.get(&(k, p)) {
            return Ok(hit.clone());
        }
        let c = self.pattern.nfa.conjunctions[k];
        let mut left = self.run(c.left, p, None, false)?.0;
        left.sort_unstable();
        left.dedup();
        let mut right = self.run(c.right, p, None, false)?.0;
        right.sort_unstable();
        right.dedup();
        let both: Vec<usize> = left.into_iter().filter(|q| right.binary_search(q).is_ok()).collect();
        let both = Rc::new(both);
        self.conj_memo.insert((k, p), both.clone());
        Ok(both)
    }

    /// Outgoing moves of `(state, pos)` into live configurations, in priority order.
    fn moves(
        &mut self,
        state: StateId,
        pos: usize,
        start: usize,
        end: usize,
        live: &[Vec<bool>],
    ) -> Result<Vec<(EdgeKind, StateId, usize)>, MatchError> {
        let nfa = &self.pattern.nfa;
        let mut out = Vec::new();
        for edge in &nfa.edges[state] {
            match edge.kind {
                EdgeKind::Epsilon | EdgeKind::Open(_) | EdgeKind::Close(_) => {
                    if live[pos - start][edge.to] {
                        out.push((edge.kind, edge.to, pos));
                    }
                }
                EdgeKind::Symbol(l) => {
                    if pos < end && self.symbols[pos][l] && live[pos + 1 - start][edge.to] {
                        out.push((edge.kind, edge.to, pos + 1));
                    }
                }
                EdgeKind::Conj(k) => {
                    for &q in self.conj_ends(k, pos)?.iter().rev() {
                        if q <= end && live[q - start][edge.to] {
                            out.push((edge.kind, edge.to, q));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Builds the parse tree of `frag` over `[start, end)`, which must be accepted.
    fn reconstruct(&mut self, frag: Fragment, start: usize, end: usize) -> Result<MatchNode, MatchError> {
        let states = self.pattern.nfa.state_count();
        let (_, recs) = self.run(frag, start, Some(end), true)?;
        let width = end - start + 1;
        let mut forward = vec![vec![false; states]; width];
        for (i, r) in recs.iter().enumerate() {
            for &s in r {
                forward[i][s] = true;
            }
        }
        let mut live = vec![vec![false; states]; width];
        live[end - start][frag.exit] = forward[end - start][frag.exit];
        for p in (start..=end).rev() {
            let candidates: Vec<StateId> = recs.get(p - start).cloned().unwrap_or_default();
            loop {
                let mut changed = false;
                for &u in &candidates {
                    if live[p - start][u] {
                        continue;
                    }
                    if !self.moves(u, p, start, end, &live)?.is_empty() {
                        live[p - start][u] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }

        struct Frame {
            state: StateId,
            pos: usize,
            moves: Vec<(EdgeKind, StateId, usize)>,
            next: usize,
        }
        let mut visited = vec![vec![false; states]; width];
        visited[0][frag.entry] = true;
        let first = self.moves(frag.entry, start, start, end, &live)?;
        let mut stack = vec![Frame {
            state: frag.entry,
            pos: start,
            moves: first,
            next: 0,
        }];
        loop {
            let top = stack.last_mut().expect("accepted span has a path");
            if top.state == frag.exit && top.pos == end {
                break;
            }
            if top.next < top.moves.len() {
                let (_, to, q) = top.moves[top.next];
                top.next += 1;
                if !visited[q - start][to] {
                    visited[q - start][to] = true;
                    let moves = self.moves(to, q, start, end, &live)?;
                    stack.push(Frame {
                        state: to,
                        pos: q,
                        moves,
                        next: 0,
                    });
                }
            } else {
                stack.pop();
            }
        }

        let mut open: Vec<MatchNode> = Vec::new();
        let mut root = None;
        for f in &stack[..stack.len() - 1] {
            let (kind, _, q) = f.moves[f.next - 1];
            match kind {
                EdgeKind::Open(id) => open.push(self.blank(id, f.pos)),
                EdgeKind::Close(_) => {
                    let mut m = open.pop().expect("balanced markers");
                    m.end = f.pos;
                    m.text = self.text(m.start, m.end);
                    prune(&mut m);
                    match open.last_mut() {
                        Some(parent) => parent.children.push(m),
                        None => root = Some(m),
                    }
                }
                EdgeKind::Conj(k) => {
                    let left = self.pattern.nfa.conjunctions[k].left;
                    let sub = self.reconstruct(left, f.pos, q)?;
                    open.last_mut().expect("conjunction inside its node").children.push(sub);
                }
                EdgeKind::Epsilon | EdgeKind::Symbol(_) => {}
            }
        }
        Ok(root.expect("path closes the root"))
    }

    fn blank(&self, id: usize, start: usize) -> MatchNode {
        let n = self.pattern.rule.node(id);
        MatchNode {
            node: id,
            kind: n.kind,
            binding: n.binding.clone(),
            rule: n.rule.clone(),
            label: n.label.clone(),
            repetition: n.repetition,
            start,
            end: start,
            text: String::new(),
            children: Vec::new(),
        }
    }

    fn text(&self, start: usize, end: usize) -> String {
        self.seq.words[start..end]
            .iter()
            .map(|w| w.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Drops zero-width loop iterations (a zero-width `+` keeps its first).
fn prune(m: &mut MatchNode) {
    if !m.kind.is_loop() {
        return;
    }
    let first = m.children.first().cloned();
    m.children.retain(|c| !c.is_empty());
    if m.kind == NodeKind::Plus && m.children.is_empty() {
        m.children.extend(first);
    }
}
