//! Negation and uncertainty detection for finding mentions in dependency-parsed
//! radiology reports.
//!
//! The pipeline has two passes. A dictionary recognizer finds mentions of the
//! fourteen finding types in each sentence graph; each mention is then tested
//! against dependency patterns anchored at its head word. A matching negation
//! rule marks it negative, a matching uncertainty rule uncertain. Mentions roll
//! up to per-document labels that can be scored against gold annotations.
//!
//! ```
//! use udneg_core::{conllu, default_engine};
//!
//! let src = "\
//! 1\tNo\tno\tDT\tDET\t_\t2\tneg\t_\t_
//! 2\tpneumothorax\tpneumothorax\tNN\tNOUN\t_\t0\troot\t_\t_
//! ";
//! let docs = conllu::parse_conllu_str(src, "report-1").unwrap();
//! let result = default_engine().detect(&docs[0]);
//! assert_eq!(result.mentions[0].status.to_string(), "negative");
//! ```

pub mod conllu;
pub mod detector;
pub mod eval;
pub mod graph;
pub mod lexicon;
pub mod matcher;
pub mod pattern;

pub use detector::{classify_mention, detect_document, explain, DocLabel, DocumentResult, Engine};
pub use graph::{Document, Edge, SentenceGraph, Vertex};
pub use lexicon::{FindingMention, FindingType, LexiconEntry, Status};
pub use matcher::{match_anchored, match_any, MatchBinding, MatchOptions, Matcher};
pub use pattern::{compile, parse_pattern, render_pattern, Category, PatternAst, QueryGraph, Rule};

/// Bundled rule file.
pub const DEFAULT_RULES: &str = include_str!("../data/rules.tsv");

/// Bundled lexicon file.
pub const DEFAULT_LEXICON: &str = include_str!("../data/lexicon.tsv");

pub fn default_rules() -> Vec<Rule> {
    pattern::load_rules_str(DEFAULT_RULES).expect("bundled rule file is valid")
}

pub fn default_lexicon() -> Vec<LexiconEntry> {
    lexicon::load_lexicon_str(DEFAULT_LEXICON).expect("bundled lexicon is valid")
}

pub fn default_engine() -> Engine {
    Engine::new(default_lexicon(), default_rules())
}
