//! Dictionary recognition of finding mentions over vertex lemmas.

use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::SentenceGraph;

/// The fourteen finding types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FindingType {
    Atelectasis,
    Cardiomegaly,
    Consolidation,
    Edema,
    Effusion,
    Emphysema,
    Fibrosis,
    Hernia,
    Infiltration,
    Mass,
    Nodule,
    #[serde(rename = "Pleural Thickening")]
    PleuralThickening,
    Pneumonia,
    Pneumothorax,
}

impl FindingType {
    pub const ALL: [FindingType; 14] = [
        FindingType::Atelectasis,
        FindingType::Cardiomegaly,
        FindingType::Consolidation,
        FindingType::Edema,
        FindingType::Effusion,
        FindingType::Emphysema,
        FindingType::Fibrosis,
        FindingType::Hernia,
        FindingType::Infiltration,
        FindingType::Mass,
        FindingType::Nodule,
        FindingType::PleuralThickening,
        FindingType::Pneumonia,
        FindingType::Pneumothorax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FindingType::Atelectasis => "Atelectasis",
            FindingType::Cardiomegaly => "Cardiomegaly",
            FindingType::Consolidation => "Consolidation",
            FindingType::Edema => "Edema",
            FindingType::Effusion => "Effusion",
            FindingType::Emphysema => "Emphysema",
            FindingType::Fibrosis => "Fibrosis",
            FindingType::Hernia => "Hernia",
            FindingType::Infiltration => "Infiltration",
            FindingType::Mass => "Mass",
            FindingType::Nodule => "Nodule",
            FindingType::PleuralThickening => "Pleural Thickening",
            FindingType::Pneumonia => "Pneumonia",
            FindingType::Pneumothorax => "Pneumothorax",
        }
    }
}

impl fmt::Display for FindingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown finding type {0:?}")]
pub struct UnknownFinding(pub String);

impl FromStr for FindingType {
    type Err = UnknownFinding;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FindingType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| UnknownFinding(s.to_string()))
    }
}

/// Assertion status of a mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Positive,
    Negative,
    Uncertain,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Positive => "positive",
            Status::Negative => "negative",
            Status::Uncertain => "uncertain",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LexiconEntry {
    pub finding: FindingType,
    /// Lowercase lemmas.
    pub phrase: Vec<String>,
    pub head_offset: usize,
}

impl LexiconEntry {
    pub fn new(finding: FindingType, phrase: &str, head_offset: usize) -> Option<Self> {
        let phrase: Vec<String> = phrase.split_whitespace().map(str::to_lowercase).collect();
        (head_offset < phrase.len()).then_some(LexiconEntry {
            finding,
            phrase,
            head_offset,
        })
    }
}

/// A recognized finding in one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FindingMention {
    pub finding: FindingType,
    pub sentence_id: String,
    /// First and last vertex index, inclusive.
    pub span: (usize, usize),
    pub head: usize,
    pub status: Status,
    #[serde(rename = "rule")]
    pub matched_rule: Option<String>,
}

impl FindingMention {
    pub fn new(finding: FindingType, sentence_id: impl Into<String>, span: (usize, usize), head: usize) -> Self {
        FindingMention {
            finding,
            sentence_id: sentence_id.into(),
            span,
            head,
            status: Status::Positive,
            matched_rule: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: expected finding<TAB>phrase<TAB>head_offset")]
    Malformed { line: usize },
    #[error("line {line}: {source}")]
    UnknownFinding {
        line: usize,
        #[source]
        source: UnknownFinding,
    },
    #[error("line {line}: head offset {found:?} is not valid for a {len}-word phrase")]
    HeadOffset { line: usize, found: String, len: usize },
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

/// Reads `finding<TAB>phrase<TAB>head_offset` lines; `#` starts a comment.
pub fn load_lexicon<R: BufRead>(input: R) -> Result<Vec<LexiconEntry>, LexiconError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(LexiconError::Malformed { line: lineno });
        }
        let finding: FindingType = fields[0]
            .trim()
            .parse()
            .map_err(|source| LexiconError::UnknownFinding { line: lineno, source })?;
        let len = fields[1].split_whitespace().count();
        if len == 0 {
            return Err(LexiconError::Malformed { line: lineno });
        }
        let bad_offset = || LexiconError::HeadOffset {
            line: lineno,
            found: fields[2].trim().to_string(),
            len,
        };
        let head_offset: usize = fields[2].trim().parse().map_err(|_| bad_offset())?;
        let entry = LexiconEntry::new(finding, fields[1], head_offset).ok_or_else(bad_offset)?;
        out.push(entry);
    }
    Ok(out)
}

pub fn load_lexicon_str(input: &str) -> Result<Vec<LexiconEntry>, LexiconError> {
    load_lexicon(input.as_bytes())
}

/// Lexicon indexed by first lemma for scanning.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    by_first: HashMap<String, Vec<usize>>,
}

impl Lexicon {
    pub fn new(entries: Vec<LexiconEntry>) -> Self {
        let mut by_first: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            by_first.entry(e.phrase[0].clone()).or_default().push(i);
        }
        Lexicon { entries, by_first }
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Longest-match recognition. Overlapping candidates are resolved by
    /// longer phrase first, then earlier start; identical spans by finding
    /// type, then head offset. Output is sorted by span start.
    pub fn recognize(&self, g: &SentenceGraph) -> Vec<FindingMention> {
        let lemmas: Vec<&str> = g.vertices().iter().map(|v| v.lemma.as_str()).collect();
        let mut candidates: Vec<(usize, &LexiconEntry)> = Vec::new();
        for start in 0..lemmas.len() {
            let Some(ids) = self.by_first.get(lemmas[start]) else {
                continue;
            };
            for &id in ids {
                let e = &self.entries[id];
                let end = start + e.phrase.len();
                if end <= lemmas.len() && e.phrase.iter().zip(&lemmas[start..end]).all(|(p, l)| p == l) {
                    candidates.push((start, e));
                }
            }
        }
        candidates.sort_by(|(sa, a), (sb, b)| {
            b.phrase
                .len()
                .cmp(&a.phrase.len())
                .then(sa.cmp(sb))
                .then(a.finding.cmp(&b.finding))
                .then(a.head_offset.cmp(&b.head_offset))
        });

        let mut taken = vec![false; lemmas.len()];
        let mut mentions = Vec::new();
        for (start, e) in candidates {
            let end = start + e.phrase.len();
            if taken[start..end].iter().any(|&t| t) {
                continue;
            }
            taken[start..end].iter_mut().for_each(|t| *t = true);
            mentions.push(FindingMention::new(
                e.finding,
                g.sentence_id(),
                (start + 1, end),
                start + 1 + e.head_offset,
            ));
        }
        mentions.sort_by_key(|m| m.span.0);
        mentions
    }
}

pub fn recognize(g: &SentenceGraph, lex: &[LexiconEntry]) -> Vec<FindingMention> {
    Lexicon::new(lex.to_vec()).recognize(g)
}
