//! Scoring against gold annotations.
//!
//! Two views: document-level positive findings, where each (document, type)
//! pair is one decision, and mention-level negations keyed by
//! (document, type, sentence, head). Overall scores are micro-averaged.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detector::{DocLabel, DocumentResult};
use crate::lexicon::{FindingType, Status};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GoldNegation {
    pub finding: FindingType,
    pub sentence_id: String,
    pub head: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldDocument {
    pub doc_id: String,
    pub positive_findings: BTreeSet<FindingType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negated_mentions: Option<BTreeSet<GoldNegation>>,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("documents without gold annotations: {0:?}")]
    MissingGold(Vec<String>),
    #[error("gold documents without system output: {0:?}")]
    MissingSystem(Vec<String>),
    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),
    #[error("gold documents lack negated_mentions: {0:?}")]
    NoNegationGold(Vec<String>),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

/// Counts and the ratios derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Prf {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    /// Ratios with a zero denominator are 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1,
        }
    }

    /// Precision or recall had a 0/0 denominator.
    pub fn undefined(&self) -> bool {
        self.tp + self.fp == 0 || self.tp + self.fn_ == 0
    }

    fn add(&mut self, tp: usize, fp: usize, fn_: usize) {
        *self = Prf::from_counts(self.tp + tp, self.fp + fp, self.fn_ + fn_);
    }

    /// `P R F` as percentages with one decimal, e.g. `89.8 85.0 87.3`.
    pub fn row(&self) -> String {
        format!(
            "{:.1} {:.1} {:.1}",
            self.precision * 100.0,
            self.recall * 100.0,
            self.f1 * 100.0
        )
    }
}

/// Unweighted means over types with any tp, fp or fn.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MacroAverage {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub overall: Prf,
    pub per_type: BTreeMap<FindingType, Prf>,
    pub macro_avg: MacroAverage,
}

impl Evaluation {
    fn from_per_type(per_type: BTreeMap<FindingType, Prf>) -> Self {
        let mut overall = Prf::default();
        for p in per_type.values() {
            overall.add(p.tp, p.fp, p.fn_);
        }
        let supported: Vec<&Prf> = per_type.values().filter(|p| p.tp + p.fp + p.fn_ > 0).collect();
        let mean = |f: fn(&Prf) -> f64| {
            if supported.is_empty() {
                0.0
            } else {
                supported.iter().map(|p| f(p)).sum::<f64>() / supported.len() as f64
            }
        };
        let macro_avg = MacroAverage {
            precision: mean(|p| p.precision),
            recall: mean(|p| p.recall),
            f1: mean(|p| p.f1),
        };
        Evaluation {
            overall,
            per_type,
            macro_avg,
        }
    }
}

fn align<'a>(
    results: &'a [DocumentResult],
    gold: &'a [GoldDocument],
) -> Result<Vec<(&'a DocumentResult, &'a GoldDocument)>, EvalError> {
    let mut by_id: HashMap<&str, &GoldDocument> = HashMap::new();
    for g in gold {
        if by_id.insert(&g.doc_id, g).is_some() {
            return Err(EvalError::DuplicateDocument(g.doc_id.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    let mut missing = Vec::new();
    let mut pairs = Vec::new();
    for r in results {
        if !seen.insert(r.doc_id.as_str()) {
            return Err(EvalError::DuplicateDocument(r.doc_id.clone()));
        }
        match by_id.get(r.doc_id.as_str()) {
            Some(g) => pairs.push((r, *g)),
            None => missing.push(r.doc_id.clone()),
        }
    }
    if !missing.is_empty() {
        missing.sort();
        return Err(EvalError::MissingGold(missing));
    }
    let mut unmatched: Vec<String> = gold
        .iter()
        .filter(|g| !seen.contains(g.doc_id.as_str()))
        .map(|g| g.doc_id.clone())
        .collect();
    if !unmatched.is_empty() {
        unmatched.sort();
        return Err(EvalError::MissingSystem(unmatched));
    }
    Ok(pairs)
}

fn empty_breakdown() -> BTreeMap<FindingType, Prf> {
    FindingType::ALL.into_iter().map(|t| (t, Prf::default())).collect()
}

/// Document-level evaluation of positive findings.
pub fn eval_positive(results: &[DocumentResult], gold: &[GoldDocument]) -> Result<Evaluation, EvalError> {
    let mut per_type = empty_breakdown();
    for (r, g) in align(results, gold)? {
        for t in FindingType::ALL {
            let sys = r.label(t) == DocLabel::Positive;
            let gold = g.positive_findings.contains(&t);
            let (tp, fp, fn_) = match (sys, gold) {
                (true, true) => (1, 0, 0),
                (true, false) => (0, 1, 0),
                (false, true) => (0, 0, 1),
                (false, false) => continue,
            };
            per_type.get_mut(&t).expect("all types present").add(tp, fp, fn_);
        }
    }
    Ok(Evaluation::from_per_type(per_type))
}

/// Mention-level evaluation of negations.
pub fn eval_negation(results: &[DocumentResult], gold: &[GoldDocument]) -> Result<Evaluation, EvalError> {
    let mut lacking: Vec<String> = gold
        .iter()
        .filter(|g| g.negated_mentions.is_none())
        .map(|g| g.doc_id.clone())
        .collect();
    if !lacking.is_empty() {
        lacking.sort();
        return Err(EvalError::NoNegationGold(lacking));
    }
    let mut per_type = empty_breakdown();
    for (r, g) in align(results, gold)? {
        let expected = g.negated_mentions.as_ref().expect("checked above");
        let predicted: BTreeSet<GoldNegation> = r
            .mentions
            .iter()
            .filter(|m| m.status == Status::Negative)
            .map(|m| GoldNegation {
                finding: m.finding,
                sentence_id: m.sentence_id.clone(),
                head: m.head,
            })
            .collect();
        for key in &predicted {
            let hit = expected.contains(key);
            per_type
                .get_mut(&key.finding)
                .expect("all types present")
                .add(hit as usize, !hit as usize, 0);
        }
        for key in expected.difference(&predicted) {
            per_type.get_mut(&key.finding).expect("all types present").add(0, 0, 1);
        }
    }
    Ok(Evaluation::from_per_type(per_type))
}

pub fn read_gold<R: BufRead>(input: R) -> Result<Vec<GoldDocument>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| EvalError::Json { line: i + 1, source })?);
    }
    Ok(out)
}

/// Fixed-width table: one row per finding type, then micro and macro rows.
/// Rows whose precision or recall divided by zero are marked with `*`.
pub fn report(title: &str, eval: &Evaluation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let _ = writeln!(
        out,
        "{:<20} {:>5} {:>5} {:>5} {:>5} {:>5} {:>5}",
        "Finding", "P", "R", "F", "TP", "FP", "FN"
    );
    let mut any_undefined = false;
    let mut row = |out: &mut String, label: &str, p: &Prf| {
        let mark = if p.undefined() {
            any_undefined = true;
            " *"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "{:<20} {:>5.1} {:>5.1} {:>5.1} {:>5} {:>5} {:>5}{mark}",
            label,
            p.precision * 100.0,
            p.recall * 100.0,
            p.f1 * 100.0,
            p.tp,
            p.fp,
            p.fn_
        );
    };
    for (t, p) in &eval.per_type {
        row(&mut out, t.name(), p);
    }
    row(&mut out, "Overall (micro)", &eval.overall);
    let m = &eval.macro_avg;
    let _ = writeln!(
        out,
        "{:<20} {:>5.1} {:>5.1} {:>5.1}",
        "Macro",
        m.precision * 100.0,
        m.recall * 100.0,
        m.f1 * 100.0
    );
    if any_undefined {
        let _ = writeln!(
            out,
            "* precision or recall has a zero denominator and is reported as 0.0"
        );
    }
    out
}
