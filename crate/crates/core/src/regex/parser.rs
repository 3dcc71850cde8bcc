//! Lexer and recursive-descent parser for rule sources such as
//! `name: PN ((MEAN)? PN)*;`.
//!
//! Precedence from tightest: postfix (`? * + ^N`), juxtaposition, `&`, `|`.

use super::ast::{Expr, ExprKind, NONE};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Largest accepted `^N` bound.
pub const MAX_UPTO: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub rule: Option<String>,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = &self.rule {
            write!(f, "rule {r}: ")?;
        }
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Punct(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(s) => write!(f, "number `{s}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            Tok::Int(chars[start..i].iter().collect())
        } else if is_ident_start(c) {
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if ":;()|&?*+^=$".contains(c) {
            i += 1;
            Tok::Punct(c)
        } else {
            return Err(ParseError {
                rule: None,
                line: tl,
                column: tc,
                message: format!("unexpected character `{c}`"),
            });
        };
        col += i - start;
        out.push(Token {
            tok,
            line: tl,
            column: tc,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

/// A named rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub expr: Expr,
}

/// An ordered local grammar; rules may only reference earlier rules.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    labels: BTreeSet<String>,
    rules: Vec<Rule>,
}

impl RuleSet {
    /// `labels` are the formula labels rules may refer to.
    pub fn new(labels: impl IntoIterator<Item = String>) -> Self {
        RuleSet {
            labels: labels.into_iter().collect(),
            rules: Vec::new(),
        }
    }

    pub fn labels(&self) -> &BTreeSet<String> {
        &self.labels
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// Parses and appends one rule body.
    pub fn add(&mut self, name: &str, expression: &str) -> Result<(), ParseError> {
        self.add_all([(name, expression)])
    }

    /// Parses several rule bodies in order; a body referring to a rule that
    /// comes later in the list is reported as a forward reference.
    pub fn add_all<'a>(
        &mut self,
        items: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<(), ParseError> {
        let items: Vec<(&str, &str)> = items.into_iter().collect();
        let names: Vec<String> = items.iter().map(|(n, _)| n.to_string()).collect();
        for (i, (name, src)) in items.iter().enumerate() {
            let tokens = lex(src).map_err(|e| ParseError {
                rule: Some(name.to_string()),
                ..e
            })?;
            let mut p = Parser {
                tokens: &tokens,
                pos: 0,
                set: self,
                current: name,
                later: &names[i + 1..],
            };
            let result = p.check_name(name, 1, 1).and_then(|_| {
                let e = p.expr()?;
                if p.peek() == &Tok::Punct(';') {
                    p.pos += 1;
                }
                p.expect_eof()?;
                Ok(e)
            });
            let expr = result.map_err(|e| ParseError {
                rule: Some(name.to_string()),
                ..e
            })?;
            self.rules.push(Rule {
                name: name.to_string(),
                expr,
            });
        }
        Ok(())
    }
}

/// Parses a multi-rule source of `name: expr;` items.
pub fn parse_rules(source: &str, labels: &BTreeSet<String>) -> Result<RuleSet, ParseError> {
    let tokens = lex(source)?;
    let mut names = Vec::new();
    for w in tokens.windows(2) {
        if let (Tok::Ident(n), Tok::Punct(':')) = (&w[0].tok, &w[1].tok) {
            names.push(n.clone());
        }
    }
    let mut set = RuleSet::new(labels.iter().cloned());
    let mut pos = 0;
    let mut index = 0;
    if tokens[0].tok == Tok::Eof {
        return Err(ParseError {
            rule: None,
            line: 1,
            column: 1,
            message: "empty rule source".into(),
        });
    }
    while tokens[pos].tok != Tok::Eof {
        let t = &tokens[pos];
        let name = match &t.tok {
            Tok::Ident(n) => n.clone(),
            other => {
                return Err(ParseError {
                    rule: None,
                    line: t.line,
                    column: t.column,
                    message: format!("expected a rule name, found {other}"),
                })
            }
        };
        let later: Vec<String> = names.iter().skip(index + 1).cloned().collect();
        let mut p = Parser {
            tokens: &tokens,
            pos: pos + 1,
            set: &set,
            current: &name,
            later: &later,
        };
        let wrap = |e: ParseError| ParseError {
            rule: Some(name.clone()),
            ..e
        };
        p.check_name(&name, t.line, t.column).map_err(wrap)?;
        p.expect(':').map_err(wrap)?;
        let expr = p.expr().map_err(wrap)?;
        p.expect(';').map_err(wrap)?;
        pos = p.pos;
        set.rules.push(Rule { name, expr });
        index += 1;
    }
    Ok(set)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    set: &'a RuleSet,
    current: &'a str,
    later: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let t = &self.tokens[self.pos];
        Err(ParseError {
            rule: None,
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == &Tok::Punct(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{c}`, found {}", self.peek()))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            Tok::Punct(')') => self.err("unbalanced `)`"),
            other => self.err(format!("unexpected {other}")),
        }
    }

    fn check_name(&self, name: &str, line: usize, column: usize) -> Result<(), ParseError> {
        let message = if self.set.get(name).is_some() {
            format!("duplicate rule `{name}`")
        } else if self.set.labels.contains(name) {
            format!("rule `{name}` shadows a formula label")
        } else if name == NONE || name == "OTHER" {
            format!("`{name}` is reserved")
        } else if name.is_empty() || !name.chars().next().is_some_and(is_ident_start) || !name.chars().all(is_ident_char) {
            format!("invalid rule name {name:?}")
        } else {
            return Ok(());
        };
        Err(ParseError {
            rule: None,
            line,
            column,
            message,
        })
    }

    fn resolve(&self, name: &str) -> Result<Expr, ParseError> {
        if name == NONE || name == "OTHER" {
            Ok(Expr::label(NONE))
        } else if self.set.get(name).is_some() {
            Ok(Expr::rule(name))
        } else if self.set.labels.contains(name) {
            Ok(Expr::label(name))
        } else if name == self.current {
            self.err(format!("rule `{name}` references itself"))
        } else if self.later.iter().any(|l| l == name) {
            self.err(format!("forward reference to rule `{name}`"))
        } else {
            self.err(format!("unknown label `{name}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut alts = vec![self.conj()?];
        while self.peek() == &Tok::Punct('|') {
            self.pos += 1;
            alts.push(self.conj()?);
        }
        Ok(if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            Expr::or(alts)
        })
    }

    fn conj(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.seq()?;
        while self.peek() == &Tok::Punct('&') {
            self.pos += 1;
            let right = self.seq()?;
            left = Expr::and(left, right);
        }
        Ok(left)
    }

    fn seq(&mut self) -> Result<Expr, ParseError> {
        let mut items = Vec::new();
        while matches!(self.peek(), Tok::Ident(_) | Tok::Punct('(') | Tok::Punct('$')) {
            items.push(self.postfix()?);
        }
        match items.len() {
            0 => self.err(format!("expected an expression, found {}", self.peek())),
            1 => Ok(items.pop().unwrap()),
            _ => Ok(Expr::concat(items)),
        }
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == &Tok::Punct('$') {
            if let (Tok::Ident(name), Tok::Punct('=')) = (
                &self.tokens[self.pos + 1].tok,
                self.tokens.get(self.pos + 2).map(|t| &t.tok).unwrap_or(&Tok::Eof),
            ) {
                let name = name.clone();
                self.pos += 3;
                let inner = self.postfix()?;
                if inner.binding.is_some() {
                    return self.err(format!("`{name}` binds an already bound expression"));
                }
                return Ok(inner.bind(name));
            }
        }
        let mut e = self.primary()?;
        loop {
            e = match self.peek() {
                Tok::Punct('?') => Expr::optional(e),
                Tok::Punct('*') => Expr::star(e),
                Tok::Punct('+') => Expr::plus(e),
                Tok::Punct('^') => {
                    self.pos += 1;
                    let n = match self.peek() {
                        Tok::Int(s) => s.parse::<u32>().ok(),
                        _ => return self.err("expected a positive integer after `^`"),
                    };
                    match n {
                        Some(0) => return self.err("up-to bound must be at least 1"),
                        Some(n) if n <= MAX_UPTO => Expr::up_to(e, n),
                        _ => return self.err(format!("up-to bound exceeds {MAX_UPTO}")),
                    }
                }
                _ => return Ok(e),
            };
            self.pos += 1;
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Punct('$') => {
                self.pos += 1;
                match self.peek().clone() {
                    Tok::Ident(name) => {
                        let e = self.resolve(&name)?;
                        self.pos += 1;
                        Ok(e)
                    }
                    other => self.err(format!("expected an identifier after `$`, found {other}")),
                }
            }
            Tok::Ident(name) => {
                let e = self.resolve(&name)?;
                self.pos += 1;
                Ok(e)
            }
            Tok::Punct('(') => {
                self.pos += 1;
                if self.peek() == &Tok::Punct(')') {
                    self.pos += 1;
                    return Ok(Expr::concat(vec![]));
                }
                let e = self.expr()?;
                match self.peek() {
                    Tok::Punct(')') => {
                        self.pos += 1;
                        Ok(e)
                    }
                    Tok::Eof | Tok::Punct(';') => self.err("unbalanced `(`"),
                    other => self.err(format!("expected `)`, found {other}")),
                }
            }
            other => self.err(format!("expected an expression, found {other}")),
        }
    }
}

impl ExprKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExprKind::Label(_) => "label",
            ExprKind::Rule(_) => "rule",
            ExprKind::Concat(_) => "concat",
            ExprKind::Star(_) => "star",
            ExprKind::Plus(_) => "plus",
            ExprKind::Optional(_) => "optional",
            ExprKind::UpTo(..) => "upto",
            ExprKind::And(..) => "and",
            ExprKind::Or(_) => "or",
        }
    }
}
