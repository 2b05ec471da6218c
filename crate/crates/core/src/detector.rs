//! Assertion classification of finding mentions and document-level labels.
//!
//! Each mention is tested against negation rules, then uncertainty rules, in
//! rank order, with the pattern anchored at the mention's head vertex. The
//! first rule that matches decides the status.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Document, SentenceGraph};
use crate::lexicon::{FindingMention, FindingType, Lexicon, LexiconEntry, Status};
use crate::matcher::{MatchBinding, MatchOptions, Matcher};
use crate::pattern::{Category, Rule};

/// Document-level label for one finding type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocLabel {
    Positive,
    Negative,
    Uncertain,
    Absent,
}

impl fmt::Display for DocLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DocLabel::Positive => "positive",
            DocLabel::Negative => "negative",
            DocLabel::Uncertain => "uncertain",
            DocLabel::Absent => "absent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentResult {
    pub doc_id: String,
    #[serde(rename = "labels")]
    pub document_labels: BTreeMap<FindingType, DocLabel>,
    pub mentions: Vec<FindingMention>,
}

impl DocumentResult {
    /// Builds the result, deriving labels from the mentions.
    pub fn new(doc_id: impl Into<String>, mentions: Vec<FindingMention>) -> Self {
        DocumentResult {
            doc_id: doc_id.into(),
            document_labels: aggregate(&mentions),
            mentions,
        }
    }

    pub fn label(&self, finding: FindingType) -> DocLabel {
        self.document_labels.get(&finding).copied().unwrap_or(DocLabel::Absent)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("result serializes")
    }
}

/// Positive if any mention is positive, else uncertain if any is uncertain,
/// else negative if any is negative, else absent. Covers all fourteen types.
pub fn aggregate(mentions: &[FindingMention]) -> BTreeMap<FindingType, DocLabel> {
    FindingType::ALL
        .into_iter()
        .map(|t| {
            let mut statuses = mentions.iter().filter(|m| m.finding == t).map(|m| m.status);
            let label = if statuses.clone().any(|s| s == Status::Positive) {
                DocLabel::Positive
            } else if statuses.clone().any(|s| s == Status::Uncertain) {
                DocLabel::Uncertain
            } else if statuses.any(|s| s == Status::Negative) {
                DocLabel::Negative
            } else {
                DocLabel::Absent
            };
            (t, label)
        })
        .collect()
}

/// Rules in evaluation order: negation by rank, then uncertainty by rank.
fn evaluation_order(rules: &[Rule]) -> Vec<&Rule> {
    let mut ordered: Vec<&Rule> = rules.iter().collect();
    ordered.sort_by_key(|r| (r.category, r.rank));
    ordered
}

fn status_for(category: Category) -> Status {
    match category {
        Category::Negation => Status::Negative,
        Category::Uncertainty => Status::Uncertain,
    }
}

/// Lexicon, rules, and matcher settings bundled for reuse across documents.
#[derive(Debug, Clone)]
pub struct Engine {
    lexicon: Lexicon,
    rules: Vec<Rule>,
    matcher: Matcher,
}

impl Engine {
    pub fn new(lexicon: Vec<LexiconEntry>, rules: Vec<Rule>) -> Self {
        let mut rules = rules;
        rules.sort_by_key(|r| (r.category, r.rank));
        Engine {
            lexicon: Lexicon::new(lexicon),
            rules,
            matcher: Matcher::default(),
        }
    }

    pub fn with_options(mut self, options: MatchOptions) -> Self {
        self.matcher = Matcher::new(options);
        self
    }

    /// Same engine without rules of `category`.
    pub fn without(&self, category: Category) -> Self {
        let mut e = self.clone();
        e.rules.retain(|r| r.category != category);
        e
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn classify(&self, g: &SentenceGraph, m: &FindingMention) -> FindingMention {
        classify_with(&self.matcher, g, m, self.rules.iter())
    }

    pub fn explain(&self, g: &SentenceGraph, m: &FindingMention) -> Vec<(String, MatchBinding)> {
        explain_with(&self.matcher, g, m, self.rules.iter())
    }

    pub fn detect(&self, d: &Document) -> DocumentResult {
        let mentions = d
            .sentences
            .iter()
            .flat_map(|g| self.lexicon.recognize(g).into_iter().map(move |m| self.classify(g, &m)))
            .collect();
        DocumentResult::new(d.doc_id.clone(), mentions)
    }

    /// Detects every document, one at a time. Output is sorted by doc_id.
    pub fn detect_corpus_sequential(&self, docs: &[Document]) -> Vec<DocumentResult> {
        let mut out: Vec<_> = docs.iter().map(|d| self.detect(d)).collect();
        out.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        out
    }

    /// Detects documents on the rayon pool. Output is sorted by doc_id.
    #[cfg(feature = "parallel")]
    pub fn detect_corpus_parallel(&self, docs: &[Document]) -> Vec<DocumentResult> {
        use rayon::prelude::*;
        let mut out: Vec<_> = docs.par_iter().map(|d| self.detect(d)).collect();
        out.par_sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        out
    }

    pub fn detect_corpus(&self, docs: &[Document]) -> Vec<DocumentResult> {
        #[cfg(feature = "parallel")]
        {
            self.detect_corpus_parallel(docs)
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.detect_corpus_sequential(docs)
        }
    }
}

fn classify_with<'r>(
    matcher: &Matcher,
    g: &SentenceGraph,
    m: &FindingMention,
    ordered: impl Iterator<Item = &'r Rule>,
) -> FindingMention {
    let mut out = m.clone();
    out.status = Status::Positive;
    out.matched_rule = None;
    for rule in ordered {
        // a head outside the graph cannot match anything
        if matcher.any(g, &rule.compiled, m.head).unwrap_or(false) {
            out.status = status_for(rule.category);
            out.matched_rule = Some(rule.rule_id.clone());
            break;
        }
    }
    out
}

fn explain_with<'r>(
    matcher: &Matcher,
    g: &SentenceGraph,
    m: &FindingMention,
    ordered: impl Iterator<Item = &'r Rule>,
) -> Vec<(String, MatchBinding)> {
    ordered
        .filter_map(|rule| {
            let binding = matcher.anchored(g, &rule.compiled, m.head).ok().flatten()?;
            Some((rule.rule_id.clone(), binding))
        })
        .collect()
}

/// Assigns a status to `m` from the first matching rule (negation before
/// uncertainty, rank order within each).
pub fn classify_mention(g: &SentenceGraph, m: &FindingMention, rules: &[Rule]) -> FindingMention {
    classify_with(&Matcher::default(), g, m, evaluation_order(rules).into_iter())
}

/// Every rule matching at `m.head`, in the order [`classify_mention`] tries them.
pub fn explain(g: &SentenceGraph, m: &FindingMention, rules: &[Rule]) -> Vec<(String, MatchBinding)> {
    explain_with(&Matcher::default(), g, m, evaluation_order(rules).into_iter())
}

pub fn detect_document(d: &Document, lex: &[LexiconEntry], rules: &[Rule]) -> DocumentResult {
    Engine::new(lex.to_vec(), rules.to_vec()).detect(d)
}

#[derive(Debug, Error)]
pub enum ResultsError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

/// Reads JSON Lines written by [`DocumentResult::to_json_line`].
pub fn read_results<R: BufRead>(input: R) -> Result<Vec<DocumentResult>, ResultsError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line).map_err(|source| ResultsError::Json { line: i + 1, source })?;
        out.push(r);
    }
    Ok(out)
}

pub fn write_results(results: &[DocumentResult]) -> String {
    let mut s = String::new();
    for r in results {
        s.push_str(&r.to_json_line());
        s.push('\n');
    }
    s
}
