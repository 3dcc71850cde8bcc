//! Lexer and parser for action scripts.

use super::ActionError;
use crate::number::{parse_number, Number};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Accessor {
    Text,
    Number,
    Position,
    Length,
    Stem,
    Pos,
    Gloss,
}

impl Accessor {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "text" => Accessor::Text,
            "number" => Accessor::Number,
            "position" => Accessor::Position,
            "length" => Accessor::Length,
            "stem" => Accessor::Stem,
            "pos" => Accessor::Pos,
            "gloss" => Accessor::Gloss,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Number),
    Str(String),
    Bool(bool),
    Var(String),
    Access { binding: String, accessor: Accessor },
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call { name: String, args: Vec<Expr>, line: usize, column: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Assign { name: String, op: AssignOp, value: Expr },
    If { branches: Vec<(Expr, Vec<Stmt>)>, otherwise: Option<Vec<Stmt>> },
    Emit { label: Expr, value: Expr },
    Print(Vec<Expr>),
    Call(Expr),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(Number),
    Str(String),
    /// `$a.b.c`, split on dots.
    Binding(Vec<String>),
    Op(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

const OPS: [&str; 25] = [
    "==", "!=", "<=", ">=", "&&", "||", "<<", "+=", "-=", "*=", "/=", "=", "<", ">", "+", "-", "*", "/", "!",
    "(", ")", "{", "}", ";", ",",
];

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ActionError {
    ActionError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>, ActionError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let ident = |chars: &[char], mut i: usize| {
        let start = i;
        while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
            i += 1;
        }
        (chars[start..i].iter().collect::<String>(), i)
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let start = i;
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
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            col += 2;
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
            if i >= chars.len() {
                return Err(syntax(tl, tc, "unterminated comment"));
            }
            i += 2;
            col += 2;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            Tok::Num(parse_number(&s).ok_or_else(|| syntax(tl, tc, format!("invalid number `{s}`")))?)
        } else if c.is_alphabetic() || c == '_' {
            let (s, j) = ident(&chars, i);
            i = j;
            Tok::Ident(s)
        } else if c == '$' {
            let mut parts = Vec::new();
            i += 1;
            loop {
                let (s, j) = ident(&chars, i);
                if s.is_empty() {
                    return Err(syntax(tl, tc, "expected a binding name after `$`"));
                }
                parts.push(s);
                i = j;
                if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(|c| c.is_alphabetic() || *c == '_') {
                    i += 1;
                } else {
                    break;
                }
            }
            Tok::Binding(parts)
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(syntax(tl, tc, "unterminated string")),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        let e = match chars.get(i + 1) {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some(&e @ ('"' | '\\')) => e,
                            _ => return Err(syntax(tl, tc, "invalid escape in string")),
                        };
                        s.push(e);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            Tok::Str(s)
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match OPS.iter().find(|op| rest.starts_with(**op)) {
                Some(op) => {
                    i += op.len();
                    Tok::Op(op)
                }
                None => return Err(syntax(tl, tc, format!("unexpected character `{c}`"))),
            }
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

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.tokens[self.pos];
        (t.line, t.column)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ActionError> {
        let (l, c) = self.here();
        Err(syntax(l, c, message))
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if *o == op)
    }

    fn eat(&mut self, op: &str) -> bool {
        if self.is_op(op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: &str) -> Result<(), ActionError> {
        if self.eat(op) {
            Ok(())
        } else {
            self.err(format!("expected `{op}`, found {}", describe(self.peek())))
        }
    }

    fn program(&mut self) -> Result<Vec<Stmt>, ActionError> {
        let mut out = Vec::new();
        while self.peek() != &Tok::Eof {
            if self.eat(";") {
                continue;
            }
            if self.is_op("}") {
                return self.err("unbalanced `}`");
            }
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ActionError> {
        if self.eat("{") {
            let mut out = Vec::new();
            while !self.eat("}") {
                if self.peek() == &Tok::Eof {
                    return self.err("unbalanced `{`");
                }
                if self.eat(";") {
                    continue;
                }
                out.push(self.stmt()?);
            }
            Ok(out)
        } else {
            Ok(vec![self.stmt()?])
        }
    }

    fn stmt(&mut self) -> Result<Stmt, ActionError> {
        let name = match self.peek() {
            Tok::Ident(n) => n.clone(),
            other => return self.err(format!("expected a statement, found {}", describe(other))),
        };
        if name == "if" {
            self.pos += 1;
            let mut branches = Vec::new();
            let mut otherwise = None;
            loop {
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                branches.push((cond, self.block()?));
                if !matches!(self.peek(), Tok::Ident(k) if k == "else") {
                    break;
                }
                self.pos += 1;
                if matches!(self.peek(), Tok::Ident(k) if k == "if") {
                    self.pos += 1;
                    continue;
                }
                otherwise = Some(self.block()?);
                break;
            }
            return Ok(Stmt::If { branches, otherwise });
        }
        self.pos += 1;
        if name == "cout" && self.is_op("<<") {
            let mut parts = Vec::new();
            while self.eat("<<") {
                if matches!(self.peek(), Tok::Ident(k) if k == "endl") {
                    self.pos += 1;
                    continue;
                }
                parts.push(self.expr()?);
            }
            self.expect(";")?;
            return Ok(Stmt::Print(parts));
        }
        let op = match self.peek() {
            Tok::Op("=") => Some(AssignOp::Set),
            Tok::Op("+=") => Some(AssignOp::Add),
            Tok::Op("-=") => Some(AssignOp::Sub),
            Tok::Op("*=") => Some(AssignOp::Mul),
            Tok::Op("/=") => Some(AssignOp::Div),
            _ => None,
        };
        if let Some(op) = op {
            self.pos += 1;
            let value = self.expr()?;
            self.expect(";")?;
            return Ok(Stmt::Assign { name, op, value });
        }
        if self.is_op("(") {
            self.pos -= 1;
            let (line, column) = self.here();
            self.pos += 1;
            let args = self.args()?;
            self.expect(";")?;
            return match name.as_str() {
                "emit" if args.len() == 2 => {
                    let mut it = args.into_iter();
                    Ok(Stmt::Emit {
                        label: it.next().unwrap(),
                        value: it.next().unwrap(),
                    })
                }
                "emit" => Err(syntax(line, column, "emit takes a label and a value")),
                "print" => Ok(Stmt::Print(args)),
                _ => Ok(Stmt::Call(Expr::Call { name, args, line, column })),
            };
        }
        self.err(format!("expected an assignment or call after `{name}`"))
    }

    fn args(&mut self) -> Result<Vec<Expr>, ActionError> {
        self.expect("(")?;
        let mut args = Vec::new();
        if !self.eat(")") {
            loop {
                args.push(self.expr()?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(args)
    }

    fn expr(&mut self) -> Result<Expr, ActionError> {
        self.binary(0)
    }

    fn binary(&mut self, level: usize) -> Result<Expr, ActionError> {
        const LEVELS: [&[(&str, BinOp)]; 5] = [
            &[("||", BinOp::Or)],
            &[("&&", BinOp::And)],
            &[("==", BinOp::Eq), ("!=", BinOp::Ne)],
            &[("<=", BinOp::Le), (">=", BinOp::Ge), ("<", BinOp::Lt), (">", BinOp::Gt)],
            &[("+", BinOp::Add), ("-", BinOp::Sub)],
        ];
        if level == LEVELS.len() {
            return self.term();
        }
        let mut left = self.binary(level + 1)?;
        'outer: loop {
            for (op, bin) in LEVELS[level] {
                if self.eat(op) {
                    let right = self.binary(level + 1)?;
                    left = Expr::Binary(*bin, Box::new(left), Box::new(right));
                    continue 'outer;
                }
            }
            return Ok(left);
        }
    }

    fn term(&mut self) -> Result<Expr, ActionError> {
        let mut left = self.unary()?;
        loop {
            let op = if self.eat("*") {
                BinOp::Mul
            } else if self.eat("/") {
                BinOp::Div
            } else {
                return Ok(left);
            };
            let right = self.unary()?;
            left = Expr::Binary(op, Box::new(left), Box::new(right));
        }
    }

    fn unary(&mut self) -> Result<Expr, ActionError> {
        if self.eat("!") {
            return Ok(Expr::Unary(UnOp::Not, Box::new(self.unary()?)));
        }
        if self.eat("-") {
            return Ok(Expr::Unary(UnOp::Neg, Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ActionError> {
        let (line, column) = self.here();
        let e = match self.peek().clone() {
            Tok::Num(n) => Expr::Num(n),
            Tok::Str(s) => Expr::Str(s),
            Tok::Ident(k) if k == "true" => Expr::Bool(true),
            Tok::Ident(k) if k == "false" => Expr::Bool(false),
            Tok::Ident(name) => {
                self.pos += 1;
                if self.is_op("(") {
                    let args = self.args()?;
                    return Ok(Expr::Call { name, args, line, column });
                }
                return Ok(Expr::Var(name));
            }
            Tok::Binding(mut parts) => {
                let accessor = match parts.last().and_then(|p| Accessor::from_name(p)) {
                    Some(a) if parts.len() > 1 => {
                        parts.pop();
                        a
                    }
                    _ => Accessor::Text,
                };
                Expr::Access {
                    binding: parts.join("."),
                    accessor,
                }
            }
            Tok::Op("(") => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                return Ok(e);
            }
            other => return self.err(format!("expected an expression, found {}", describe(&other))),
        };
        self.pos += 1;
        Ok(e)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Str(s) => format!("{s:?}"),
        Tok::Binding(p) => format!("`${}`", p.join(".")),
        Tok::Op(o) => format!("`{o}`"),
        Tok::Eof => "end of input".into(),
    }
}

pub fn parse_statements(src: &str) -> Result<Vec<Stmt>, ActionError> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, pos: 0 };
    p.program()
}
