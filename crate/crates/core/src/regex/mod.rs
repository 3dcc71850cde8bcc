//! The rule language: parsing, compilation to automata and matching over
//! tag-set sequences.

pub mod ast;
pub mod compile;
pub mod nfa;
pub mod parser;
pub mod sim;

pub use ast::{expand_upto, Expr, ExprKind};
pub use compile::{compile, compile_expr, CompiledRule, Node, NodeKind};
pub use nfa::{build_nfa, Nfa};
pub use parser::{parse_rules, ParseError, Rule, RuleSet};
pub use sim::{MatchError, MatchNode, Pattern, RuleMatch, DEFAULT_MAX_STEPS};
