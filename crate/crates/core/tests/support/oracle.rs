//! Reference semantics for the rule language, computed directly on the
//! syntax tree by enumerating accepted spans, plus random case generation.

use morphtag::formula::{TagSetSequence, NONE};
use morphtag::regex::{Expr, ExprKind};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeSet;

fn fires(label: &str, set: &BTreeSet<String>) -> bool {
    if label == NONE {
        set.len() == 1 && set.contains(NONE)
    } else {
        set.contains(label)
    }
}

/// All `j` such that `e` accepts words `[i, j)`.
pub fn ends(e: &Expr, seq: &[BTreeSet<String>], i: usize) -> BTreeSet<usize> {
    match &e.kind {
        ExprKind::Label(l) => {
            if i < seq.len() && fires(l, &seq[i]) {
                BTreeSet::from([i + 1])
            } else {
                BTreeSet::new()
            }
        }
        ExprKind::Rule(r) => panic!("oracle does not resolve rule {r}"),
        ExprKind::Concat(v) => {
            let mut at = BTreeSet::from([i]);
            for c in v {
                at = at.iter().flat_map(|&j| ends(c, seq, j)).collect();
            }
            at
        }
        ExprKind::Or(v) => v.iter().flat_map(|c| ends(c, seq, i)).collect(),
        ExprKind::Optional(c) => {
            let mut out = ends(c, seq, i);
            out.insert(i);
            out
        }
        ExprKind::Star(c) => star(c, seq, BTreeSet::from([i])),
        ExprKind::Plus(c) => star(c, seq, ends(c, seq, i)),
        ExprKind::UpTo(c, x) => {
            let mut out = BTreeSet::from([i]);
            let mut at = BTreeSet::from([i]);
            for _ in 0..*x {
                at = at.iter().flat_map(|&j| ends(c, seq, j)).collect();
                out.extend(at.iter().copied());
            }
            out
        }
        ExprKind::And(l, r) => {
            let r = ends(r, seq, i);
            ends(l, seq, i).intersection(&r).copied().collect()
        }
    }
}

fn star(c: &Expr, seq: &[BTreeSet<String>], from: BTreeSet<usize>) -> BTreeSet<usize> {
    let mut reached = from.clone();
    let mut frontier = from;
    while !frontier.is_empty() {
        let next: BTreeSet<usize> = frontier
            .iter()
            .flat_map(|&j| ends(c, seq, j))
            .filter(|j| !reached.contains(j))
            .collect();
        reached.extend(next.iter().copied());
        frontier = next;
    }
    reached
}

/// Leftmost-longest non-overlapping non-empty spans.
pub fn spans(e: &Expr, seq: &TagSetSequence) -> Vec<(usize, usize)> {
    let sets = &seq.per_word;
    let mut out = Vec::new();
    let mut s = 0;
    while s < sets.len() {
        match ends(e, sets, s).into_iter().next_back() {
            Some(j) if j > s => {
                out.push((s, j));
                s = j;
            }
            _ => s += 1,
        }
    }
    out
}

pub const ALPHABET: [&str; 4] = ["A", "B", "C", "D"];

/// Random expression of depth at most `depth` over `labels` (plus `NONE`).
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32, labels: &[&str]) -> Expr {
    let leaf = depth <= 1 || rng.gen_bool(0.25);
    let mut e = if leaf {
        if rng.gen_bool(0.1) {
            Expr::label(NONE)
        } else {
            Expr::label(*labels.choose(rng).unwrap())
        }
    } else {
        let d = depth - 1;
        match rng.gen_range(0..8) {
            0 => Expr::concat((0..rng.gen_range(2..=3)).map(|_| random_expr(rng, d, labels)).collect()),
            1 => Expr::or((0..rng.gen_range(2..=3)).map(|_| random_expr(rng, d, labels)).collect()),
            2 => Expr::star(random_expr(rng, d, labels)),
            3 => Expr::plus(random_expr(rng, d, labels)),
            4 => Expr::optional(random_expr(rng, d, labels)),
            5 => Expr::up_to(random_expr(rng, d, labels), rng.gen_range(1..=3)),
            6 => Expr::and(random_expr(rng, d, labels), random_expr(rng, d, labels)),
            _ => Expr::concat(vec![random_expr(rng, d, labels), random_expr(rng, d, labels)]),
        }
    };
    if rng.gen_bool(0.15) {
        e.binding = Some(format!("b{}", rng.gen_range(0..3)));
    }
    e
}

/// Random sequence of tag sets; an empty draw becomes `{NONE}`.
pub fn random_sequence<R: Rng>(rng: &mut R, max_len: usize, labels: &[&str]) -> TagSetSequence {
    let len = rng.gen_range(0..=max_len);
    TagSetSequence::from_labels((0..len).map(|_| {
        labels
            .iter()
            .filter(|_| rng.gen_bool(0.35))
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
    }))
}
