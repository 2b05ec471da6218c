//! The dependency pattern language.
//!
//! A pattern is a node constraint followed by relation chains:
//!
//! ```text
//! pattern  := node relchain*
//! relchain := ('<' | '>') label? target
//! target   := node relchain* | '(' pattern ')'
//! node     := '{' '}' | '{' attr ':' /regex/ (',' attr ':' /regex/)* '}'
//! attr     := word | lemma | pos
//! ```
//!
//! `A <rel B` says A is the dependent of B through `rel`; `A >rel B` says A
//! governs B. Unparenthesized chains associate to the right, so in
//! `A <r B <s C` the `<s C` constraint is on B. Regexes match whole tokens.

mod compile;
mod lexer;
mod parser;
mod rules;

use std::fmt;

use regex::Regex;
use thiserror::Error;

pub use compile::{compile, QueryArc, QueryGraph};
pub use parser::parse_pattern;
pub use rules::{load_rules, load_rules_str, Category, Rule, RuleFileError};

/// Nesting limit for parenthesized groups and relation chains.
pub const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct PatternError {
    pub offset: usize,
    pub kind: PatternErrorKind,
}

impl PatternError {
    pub(crate) fn new(offset: usize, kind: PatternErrorKind) -> Self {
        PatternError { offset, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternErrorKind {
    #[error("empty pattern")]
    Empty,
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unterminated regex")]
    UnterminatedRegex,
    #[error("expected {expected}, found {found}")]
    Expected { expected: &'static str, found: String },
    #[error("unbalanced {0:?}")]
    Unbalanced(char),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("attribute {0} given twice")]
    DuplicateAttribute(Attr),
    #[error("invalid relation label {0:?}")]
    BadLabel(String),
    #[error("invalid regex: {0}")]
    BadRegex(String),
    #[error("trailing input")]
    Trailing,
    #[error("nesting deeper than {MAX_DEPTH}")]
    TooDeep,
}

/// Vertex attribute a node constraint can test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Attr {
    Word,
    Lemma,
    Pos,
}

impl Attr {
    pub fn name(self) -> &'static str {
        match self {
            Attr::Word => "word",
            Attr::Lemma => "lemma",
            Attr::Pos => "pos",
        }
    }

    fn from_name(name: &str) -> Option<Attr> {
        match name {
            "word" => Some(Attr::Word),
            "lemma" => Some(Attr::Lemma),
            "pos" => Some(Attr::Pos),
            _ => None,
        }
    }
}

impl fmt::Display for Attr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One `attr:/regex/` test, compiled as a whole-token match.
#[derive(Debug, Clone)]
pub struct AttrTest {
    pub attr: Attr,
    source: String,
    regex: Regex,
}

impl AttrTest {
    pub fn new(attr: Attr, source: impl Into<String>) -> Result<Self, PatternErrorKind> {
        let source = source.into();
        let regex = regex::RegexBuilder::new(&format!("^(?:{source})$"))
            .size_limit(1 << 20)
            .build()
            .map_err(|e| PatternErrorKind::BadRegex(e.to_string()))?;
        Ok(AttrTest { attr, source, regex })
    }

    /// The regex as written, without anchoring.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn is_match(&self, value: &str) -> bool {
        self.regex.is_match(value)
    }
}

impl PartialEq for AttrTest {
    fn eq(&self, other: &Self) -> bool {
        self.attr == other.attr && self.source == other.source
    }
}

impl Eq for AttrTest {}

/// Conjunction of attribute tests on one vertex; empty means `{}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeConstraint {
    pub tests: Vec<AttrTest>,
}

impl NodeConstraint {
    pub fn wildcard() -> Self {
        NodeConstraint::default()
    }

    pub fn is_wildcard(&self) -> bool {
        self.tests.is_empty()
    }

    pub fn matches(&self, v: &crate::graph::Vertex) -> bool {
        self.tests.iter().all(|t| {
            let value = match t.attr {
                Attr::Word => &v.word,
                Attr::Lemma => &v.lemma,
                Attr::Pos => &v.pos,
            };
            t.is_match(value)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `<`: the constrained node is the dependent.
    DependentOf,
    /// `>`: the constrained node is the governor.
    GovernorOf,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationOp {
    pub direction: Direction,
    /// `None` accepts any relation.
    pub label: Option<String>,
}

impl RelationOp {
    pub fn dependent_of(label: Option<&str>) -> Self {
        RelationOp {
            direction: Direction::DependentOf,
            label: label.map(str::to_string),
        }
    }

    pub fn governor_of(label: Option<&str>) -> Self {
        RelationOp {
            direction: Direction::GovernorOf,
            label: label.map(str::to_string),
        }
    }
}

/// Checks `[a-z_]+(:[a-z_]+)?`.
pub fn is_valid_label(label: &str) -> bool {
    let part = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase() || b == b'_');
    match label.split_once(':') {
        Some((a, b)) => part(a) && part(b),
        None => part(label),
    }
}

/// Parsed pattern: an anchor node and relational constraints hanging off it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PatternAst {
    pub node: NodeConstraint,
    pub children: Vec<(RelationOp, PatternAst)>,
}

impl PatternAst {
    pub fn leaf(node: NodeConstraint) -> Self {
        PatternAst {
            node,
            children: Vec::new(),
        }
    }

    pub fn with_child(mut self, op: RelationOp, child: PatternAst) -> Self {
        self.children.push((op, child));
        self
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|(_, c)| c.node_count()).sum::<usize>()
    }
}

/// Canonical source text for `ast`. A child is parenthesized when it has its
/// own children or is followed by a sibling; a bare `{}` there would absorb
/// the following relations.
pub fn render_pattern(ast: &PatternAst) -> String {
    let mut out = String::new();
    render_into(ast, &mut out);
    out
}

fn render_into(ast: &PatternAst, out: &mut String) {
    render_node(&ast.node, out);
    for (i, (op, child)) in ast.children.iter().enumerate() {
        out.push(' ');
        out.push(match op.direction {
            Direction::DependentOf => '<',
            Direction::GovernorOf => '>',
        });
        if let Some(label) = &op.label {
            out.push_str(label);
        }
        out.push(' ');
        if child.children.is_empty() && i + 1 == ast.children.len() {
            render_node(&child.node, out);
        } else {
            out.push('(');
            render_into(child, out);
            out.push(')');
        }
    }
}

fn render_node(node: &NodeConstraint, out: &mut String) {
    out.push('{');
    for (i, t) in node.tests.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(t.attr.name());
        out.push_str(":/");
        out.push_str(&t.source.replace('/', "\\/"));
        out.push('/');
    }
    out.push('}');
}

impl fmt::Display for PatternAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_pattern(self))
    }
}
