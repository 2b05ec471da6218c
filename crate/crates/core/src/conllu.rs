//! CoNLL-U reading and writing.
//!
//! Token lines carry ten tab-separated columns. Edges come from the enhanced
//! `DEPS` column when it is filled in, otherwise from `HEAD`/`DEPREL`. Edges to
//! the root (head 0) are dropped. Multiword ranges (`1-2`) and empty nodes
//! (`1.1`) are skipped.
//!
//! Sentences are grouped into documents by `# doc_id = X` (or `# newdoc id = X`)
//! comments. Sentences seen before any such comment belong to a document named
//! by the caller, typically the file name.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::BufRead;

use thiserror::Error;

use crate::graph::{Document, Edge, GraphError, SentenceGraph, Vertex};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: invalid token id {id:?}")]
    BadId { line: usize, id: String },
    #[error("line {line}: token id {found} out of sequence, expected {expected}")]
    IdSequence { line: usize, expected: usize, found: usize },
    #[error("line {line}: non-numeric head {head:?}")]
    BadHead { line: usize, head: String },
    #[error("line {line}: malformed DEPS entry {entry:?}")]
    BadDeps { line: usize, entry: String },
    #[error("line {line}: head {head} does not exist in the sentence")]
    MissingHead { line: usize, head: usize },
    #[error("line {line}: empty dependency relation")]
    EmptyRelation { line: usize },
    #[error("line {line}: duplicate sent_id {sent_id:?} in document {doc_id:?}")]
    DuplicateSentence {
        line: usize,
        doc_id: String,
        sent_id: String,
    },
    #[error("line {line}: document id {doc_id:?} appears more than once")]
    DuplicateDocument { line: usize, doc_id: String },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

struct TokenRow {
    line: usize,
    id: usize,
    form: String,
    lemma: String,
    pos: String,
    head: usize,
    deprel: String,
    deps: Option<Vec<(String, String)>>,
    token_range: Option<(usize, usize)>,
}

#[derive(Default)]
struct PendingSentence {
    start_line: usize,
    sent_id: Option<String>,
    text: Option<String>,
    rows: Vec<TokenRow>,
}

struct Builder {
    default_doc: String,
    docs: Vec<Document>,
    doc_ids: HashSet<String>,
    sent_ids: HashSet<String>,
    current: Option<Document>,
    sentence: PendingSentence,
}

impl Builder {
    fn new(default_doc: &str) -> Self {
        Builder {
            default_doc: default_doc.to_string(),
            docs: Vec::new(),
            doc_ids: HashSet::new(),
            sent_ids: HashSet::new(),
            current: None,
            sentence: PendingSentence::default(),
        }
    }

    fn start_document(&mut self, doc_id: String, line: usize) -> Result<(), IngestError> {
        self.flush_sentence()?;
        self.close_document();
        if !self.doc_ids.insert(doc_id.clone()) {
            return Err(IngestError::DuplicateDocument { line, doc_id });
        }
        self.current = Some(Document::new(doc_id, Vec::new()));
        Ok(())
    }

    fn close_document(&mut self) {
        if let Some(doc) = self.current.take() {
            self.docs.push(doc);
        }
        self.sent_ids.clear();
    }

    fn flush_sentence(&mut self) -> Result<(), IngestError> {
        let pending = std::mem::take(&mut self.sentence);
        if pending.rows.is_empty() {
            return Ok(());
        }
        if self.current.is_none() {
            let doc_id = self.default_doc.clone();
            if !self.doc_ids.insert(doc_id.clone()) {
                return Err(IngestError::DuplicateDocument {
                    line: pending.start_line,
                    doc_id,
                });
            }
            self.current = Some(Document::new(doc_id, Vec::new()));
        }
        let doc = self.current.as_mut().expect("document opened above");
        let sent_id = pending
            .sent_id
            .clone()
            .unwrap_or_else(|| (doc.sentences.len() + 1).to_string());
        if !self.sent_ids.insert(sent_id.clone()) {
            return Err(IngestError::DuplicateSentence {
                line: pending.start_line,
                doc_id: doc.doc_id.clone(),
                sent_id,
            });
        }
        let graph = build_graph(sent_id, pending)?;
        doc.sentences.push(graph);
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<Document>, IngestError> {
        self.flush_sentence()?;
        self.close_document();
        Ok(self.docs)
    }
}

fn build_graph(sent_id: String, pending: PendingSentence) -> Result<SentenceGraph, IngestError> {
    let n = pending.rows.len();
    let spans = token_spans(pending.text.as_deref(), &pending.rows);
    let mut vertices = Vec::with_capacity(n);
    let mut edges = Vec::new();
    for (row, span) in pending.rows.iter().zip(spans) {
        let mut v = Vertex::new(row.id, row.form.clone(), row.lemma.clone(), row.pos.clone());
        v.span = span;
        vertices.push(v);

        let heads: Vec<(usize, &str)> = match &row.deps {
            Some(deps) => {
                let mut out = Vec::with_capacity(deps.len());
                for (head, rel) in deps {
                    // Heads pointing at empty nodes are dropped along with the nodes.
                    if head.contains('.') {
                        continue;
                    }
                    let h = head.parse::<usize>().map_err(|_| IngestError::BadDeps {
                        line: row.line,
                        entry: format!("{head}:{rel}"),
                    })?;
                    out.push((h, rel.as_str()));
                }
                out
            }
            None => vec![(row.head, row.deprel.as_str())],
        };
        for (head, rel) in heads {
            if head == 0 {
                continue;
            }
            if head > n {
                return Err(IngestError::MissingHead { line: row.line, head });
            }
            if rel.is_empty() {
                return Err(IngestError::EmptyRelation { line: row.line });
            }
            edges.push(Edge::new(head, row.id, rel));
        }
    }
    SentenceGraph::new(sent_id, pending.text, vertices, edges).map_err(|source| IngestError::Graph {
        line: pending.start_line,
        source,
    })
}

/// Character offsets from `TokenRange=s:e` in MISC, else by locating each form
/// in the sentence text left to right.
fn token_spans(text: Option<&str>, rows: &[TokenRow]) -> Vec<(usize, usize)> {
    let chars: Option<Vec<char>> = text.map(|t| t.chars().collect());
    let mut cursor = 0;
    rows.iter()
        .map(|row| {
            if let Some(range) = row.token_range {
                return range;
            }
            let Some(chars) = chars.as_ref() else {
                return (0, 0);
            };
            let form: Vec<char> = row.form.chars().collect();
            if form.is_empty() || form.len() > chars.len() {
                return (0, 0);
            }
            match (cursor..=chars.len() - form.len()).find(|&s| chars[s..s + form.len()] == form[..]) {
                Some(start) => {
                    cursor = start + form.len();
                    (start, cursor)
                }
                None => (0, 0),
            }
        })
        .collect()
}

fn comment_value<'a>(comment: &'a str, key: &str) -> Option<&'a str> {
    let rest = comment.strip_prefix(key)?.trim_start();
    let rest = rest.strip_prefix('=')?;
    Some(rest.trim())
}

fn parse_token_range(misc: &str) -> Option<(usize, usize)> {
    misc.split('|').find_map(|item| {
        let range = item.strip_prefix("TokenRange=")?;
        let (s, e) = range.split_once(':')?;
        let (s, e) = (s.parse().ok()?, e.parse().ok()?);
        (s < e).then_some((s, e))
    })
}

/// Parses a CoNLL-U stream into documents. `default_doc_id` names the document
/// that collects sentences appearing before any `doc_id` comment.
pub fn parse_conllu<R: BufRead>(input: R, default_doc_id: &str) -> Result<Vec<Document>, IngestError> {
    let mut builder = Builder::new(default_doc_id);
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            builder.flush_sentence()?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(id) = comment_value(comment, "doc_id").or_else(|| comment_value(comment, "newdoc id")) {
                builder.start_document(id.to_string(), lineno)?;
            } else if let Some(id) = comment_value(comment, "sent_id") {
                if builder.sentence.rows.is_empty() {
                    builder.sentence.start_line = lineno;
                }
                builder.sentence.sent_id = Some(id.to_string());
            } else if let Some(text) = comment_value(comment, "text") {
                builder.sentence.text = Some(text.to_string());
            }
            continue;
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(IngestError::ColumnCount {
                line: lineno,
                found: cols.len(),
            });
        }
        let id_col = cols[0];
        if id_col.contains('-') || id_col.contains('.') {
            continue;
        }
        let id: usize = id_col.parse().map_err(|_| IngestError::BadId {
            line: lineno,
            id: id_col.to_string(),
        })?;
        let expected = builder.sentence.rows.len() + 1;
        if id != expected {
            return Err(IngestError::IdSequence {
                line: lineno,
                expected,
                found: id,
            });
        }
        let head: usize = cols[6].parse().map_err(|_| IngestError::BadHead {
            line: lineno,
            head: cols[6].to_string(),
        })?;
        let deps = if cols[8] == "_" {
            None
        } else {
            let mut out = Vec::new();
            for entry in cols[8].split('|') {
                let (h, rel) = entry.split_once(':').ok_or_else(|| IngestError::BadDeps {
                    line: lineno,
                    entry: entry.to_string(),
                })?;
                out.push((h.to_string(), rel.to_string()));
            }
            Some(out)
        };
        let form = cols[1].to_string();
        let lemma = if cols[2] == "_" {
            form.to_lowercase()
        } else {
            cols[2].to_lowercase()
        };
        let pos = if cols[4] == "_" { cols[3] } else { cols[4] }.to_string();
        if builder.sentence.rows.is_empty() && builder.sentence.sent_id.is_none() {
            builder.sentence.start_line = lineno;
        }
        builder.sentence.rows.push(TokenRow {
            line: lineno,
            id,
            form,
            lemma,
            pos,
            head,
            deprel: cols[7].to_string(),
            deps,
            token_range: parse_token_range(cols[9]),
        });
    }
    builder.finish()
}

/// Convenience wrapper over [`parse_conllu`] for in-memory text.
pub fn parse_conllu_str(input: &str, default_doc_id: &str) -> Result<Vec<Document>, IngestError> {
    parse_conllu(input.as_bytes(), default_doc_id)
}

/// Serializes documents back to CoNLL-U.
///
/// `HEAD`/`DEPREL` hold a token's first incoming edge and `DEPS` lists every
/// incoming edge, so reparsing yields the same edge set. Known spans are kept
/// in MISC as `TokenRange`.
pub fn write_conllu(docs: &[Document]) -> String {
    let mut out = String::new();
    for doc in docs {
        let _ = writeln!(out, "# doc_id = {}", doc.doc_id);
        for s in &doc.sentences {
            let _ = writeln!(out, "# sent_id = {}", s.sentence_id());
            if let Some(text) = s.text() {
                let _ = writeln!(out, "# text = {text}");
            }
            for v in s.vertices() {
                let incoming = s.governors_of(v.index, None).expect("vertex from graph");
                let (head, deprel, deps) = match incoming.first() {
                    Some((first, _)) => {
                        let deps = incoming
                            .iter()
                            .map(|(e, _)| format!("{}:{}", e.governor, e.relation))
                            .collect::<Vec<_>>()
                            .join("|");
                        (first.governor, first.relation.as_str(), deps)
                    }
                    None => (0, "root", "_".to_string()),
                };
                let misc = if v.span == (0, 0) {
                    "_".to_string()
                } else {
                    format!("TokenRange={}:{}", v.span.0, v.span.1)
                };
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t_\t{}\t_\t{}\t{}\t{}\t{}",
                    v.index, v.word, v.lemma, v.pos, head, deprel, deps, misc
                );
            }
            out.push('\n');
        }
    }
    out
}
