//! Surface syntax tree of the rule language.

use std::fmt;

/// Reserved label matching words whose tag set is exactly `{NONE}`.
pub use crate::formula::NONE;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    /// A formula label (or `NONE`).
    Label(String),
    /// A reference to an earlier rule, expanded inline on compilation.
    Rule(String),
    Concat(Vec<Expr>),
    Star(Box<Expr>),
    Plus(Box<Expr>),
    Optional(Box<Expr>),
    UpTo(Box<Expr>, u32),
    And(Box<Expr>, Box<Expr>),
    Or(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub binding: Option<String>,
    /// Set on the sequences generated for `f^x`, whose children are iterations.
    pub repetition: bool,
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            binding: None,
            repetition: false,
        }
    }

    pub fn label(l: impl Into<String>) -> Self {
        Expr::new(ExprKind::Label(l.into()))
    }

    pub fn rule(r: impl Into<String>) -> Self {
        Expr::new(ExprKind::Rule(r.into()))
    }

    pub fn concat(items: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Concat(items))
    }

    pub fn or(items: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Or(items))
    }

    pub fn star(e: Expr) -> Self {
        Expr::new(ExprKind::Star(Box::new(e)))
    }

    pub fn plus(e: Expr) -> Self {
        Expr::new(ExprKind::Plus(Box::new(e)))
    }

    pub fn optional(e: Expr) -> Self {
        Expr::new(ExprKind::Optional(Box::new(e)))
    }

    pub fn up_to(e: Expr, x: u32) -> Self {
        Expr::new(ExprKind::UpTo(Box::new(e), x))
    }

    pub fn and(l: Expr, r: Expr) -> Self {
        Expr::new(ExprKind::And(Box::new(l), Box::new(r)))
    }

    pub fn bind(mut self, name: impl Into<String>) -> Self {
        self.binding = Some(name.into());
        self
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Label(_) | ExprKind::Rule(_) => vec![],
            ExprKind::Concat(v) | ExprKind::Or(v) => v.iter().collect(),
            ExprKind::Star(c) | ExprKind::Plus(c) | ExprKind::Optional(c) | ExprKind::UpTo(c, _) => {
                vec![c]
            }
            ExprKind::And(l, r) => vec![l, r],
        }
    }

    /// Every binding name declared in this expression (not following rule references).
    pub fn bindings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if let Some(b) = &e.binding {
                out.push(b.clone());
            }
            stack.extend(e.children().into_iter().rev());
        }
        out
    }
}

/// Rewrites every `f^x` into `f? | ff | … | f…f` (x copies in the last
/// alternative); `f^1` becomes `f?`.
pub fn expand_upto(expr: &Expr) -> Expr {
    let kind = match &expr.kind {
        ExprKind::Label(_) | ExprKind::Rule(_) => expr.kind.clone(),
        ExprKind::Concat(v) => ExprKind::Concat(v.iter().map(expand_upto).collect()),
        ExprKind::Or(v) => ExprKind::Or(v.iter().map(expand_upto).collect()),
        ExprKind::Star(c) => ExprKind::Star(Box::new(expand_upto(c))),
        ExprKind::Plus(c) => ExprKind::Plus(Box::new(expand_upto(c))),
        ExprKind::Optional(c) => ExprKind::Optional(Box::new(expand_upto(c))),
        ExprKind::And(l, r) => ExprKind::And(Box::new(expand_upto(l)), Box::new(expand_upto(r))),
        ExprKind::UpTo(c, x) => {
            let inner = expand_upto(c);
            let mut first = Expr::optional(inner.clone());
            first.repetition = true;
            if *x <= 1 {
                first.binding = expr.binding.clone();
                return first;
            }
            let mut alts = vec![first];
            for n in 2..=*x {
                let mut seq = Expr::concat(vec![inner.clone(); n as usize]);
                seq.repetition = true;
                alts.push(seq);
            }
            ExprKind::Or(alts)
        }
    };
    Expr {
        kind,
        binding: expr.binding.clone(),
        repetition: expr.repetition,
    }
}

/// Writes `e` as an operand, parenthesized when it would otherwise bind
/// differently. `level`: 0 = alternative, 1 = conjunct, 2 = sequence item,
/// 3 = postfix operand.
fn operand(f: &mut fmt::Formatter<'_>, e: &Expr, level: u8) -> fmt::Result {
    let wrap = match (&e.kind, e.binding.is_some()) {
        (_, true) => level >= 3,
        (ExprKind::Concat(v), _) if v.is_empty() => false,
        (ExprKind::Or(_), _) => true,
        (ExprKind::And(..), _) => level >= 1,
        (ExprKind::Concat(_), _) => level >= 2,
        _ => false,
    };
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints source that parses back to an equal tree
/// (ignoring the `repetition` flag, which the parser never sets).
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(b) = &self.binding {
            write!(f, "${b}=")?;
            let bare = Expr {
                binding: None,
                ..self.clone()
            };
            return operand(f, &bare, 3);
        }
        match &self.kind {
            ExprKind::Label(l) | ExprKind::Rule(l) => f.write_str(l),
            ExprKind::Concat(v) if v.is_empty() => f.write_str("()"),
            ExprKind::Concat(v) => {
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    operand(f, c, 2)?;
                }
                Ok(())
            }
            ExprKind::Or(v) => {
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    operand(f, c, 0)?;
                }
                Ok(())
            }
            ExprKind::And(l, r) => {
                operand(f, l, 1)?;
                f.write_str(" & ")?;
                operand(f, r, 1)
            }
            ExprKind::Star(c) => {
                operand(f, c, 3)?;
                f.write_str("*")
            }
            ExprKind::Plus(c) => {
                operand(f, c, 3)?;
                f.write_str("+")
            }
            ExprKind::Optional(c) => {
                operand(f, c, 3)?;
                f.write_str("?")
            }
            ExprKind::UpTo(c, x) => {
                operand(f, c, 3)?;
                write!(f, "^{x}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upto_three() {
        let f = Expr::label("f");
        let mut a = Expr::optional(f.clone());
        a.repetition = true;
        let mut b = Expr::concat(vec![f.clone(), f.clone()]);
        b.repetition = true;
        let mut c = Expr::concat(vec![f.clone(), f.clone(), f.clone()]);
        c.repetition = true;
        assert_eq!(expand_upto(&Expr::up_to(f, 3)), Expr::or(vec![a, b, c]));
    }

    #[test]
    fn upto_one_is_optional() {
        let e = expand_upto(&Expr::up_to(Expr::label("f"), 1).bind("x"));
        assert!(matches!(e.kind, ExprKind::Optional(_)));
        assert_eq!(e.binding.as_deref(), Some("x"));
    }

    #[test]
    fn display() {
        let e = Expr::plus(Expr::concat(vec![
            Expr::label("TOLD").bind("s1"),
            Expr::rule("nar").bind("s2"),
        ]));
        assert_eq!(e.to_string(), "($s1=TOLD $s2=nar)+");
        let e = Expr::or(vec![Expr::label("A"), Expr::concat(vec![Expr::label("B"), Expr::label("C")])]);
        assert_eq!(e.to_string(), "A | B C");
    }
}
