//! Rule files: one `rule_id<TAB>category<TAB>pattern` per line, `#` comments.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{compile, parse_pattern, PatternAst, PatternError, QueryGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Negation,
    Uncertainty,
}

impl FromStr for Category {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "negation" => Ok(Category::Negation),
            "uncertainty" => Ok(Category::Uncertainty),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Negation => "negation",
            Category::Uncertainty => "uncertainty",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Rule {
    pub rule_id: String,
    pub category: Category,
    pub pattern_source: String,
    pub ast: PatternAst,
    pub compiled: QueryGraph,
    /// Position among the file's rules, starting at 0.
    pub rank: usize,
    /// 1-based line in the rule file.
    pub line: usize,
}

impl Rule {
    /// Builds a rule directly from pattern text.
    pub fn new(
        rule_id: impl Into<String>,
        category: Category,
        pattern: &str,
        rank: usize,
    ) -> Result<Self, PatternError> {
        let ast = parse_pattern(pattern)?;
        Ok(Rule {
            rule_id: rule_id.into(),
            category,
            pattern_source: pattern.to_string(),
            compiled: compile(&ast),
            ast,
            rank,
            line: 0,
        })
    }
}

#[derive(Debug, Error)]
pub enum RuleFileError {
    #[error("line {line}: expected rule_id<TAB>category<TAB>pattern")]
    Malformed { line: usize },
    #[error("line {line}: unknown category {found:?} (expected negation or uncertainty)")]
    BadCategory { line: usize, found: String },
    #[error("line {line}: duplicate rule id {rule_id:?}")]
    DuplicateId { line: usize, rule_id: String },
    #[error("line {line}: rule {rule_id:?}: {source}")]
    Pattern {
        line: usize,
        rule_id: String,
        #[source]
        source: PatternError,
    },
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

pub fn load_rules<R: BufRead>(input: R) -> Result<Vec<Rule>, RuleFileError> {
    let mut rules = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut fields = line.splitn(3, '\t');
        let (Some(id), Some(category), Some(pattern)) = (fields.next(), fields.next(), fields.next()) else {
            return Err(RuleFileError::Malformed { line: lineno });
        };
        let id = id.trim();
        if id.is_empty() {
            return Err(RuleFileError::Malformed { line: lineno });
        }
        let category: Category = category.trim().parse().map_err(|_| RuleFileError::BadCategory {
            line: lineno,
            found: category.trim().to_string(),
        })?;
        if !ids.insert(id.to_string()) {
            return Err(RuleFileError::DuplicateId {
                line: lineno,
                rule_id: id.to_string(),
            });
        }
        let pattern = pattern.trim();
        let mut rule = Rule::new(id, category, pattern, rules.len()).map_err(|source| RuleFileError::Pattern {
            line: lineno,
            rule_id: id.to_string(),
            source,
        })?;
        rule.line = lineno;
        rules.push(rule);
    }
    Ok(rules)
}

pub fn load_rules_str(input: &str) -> Result<Vec<Rule>, RuleFileError> {
    load_rules(input.as_bytes())
}
