//! Universal dependency graphs: tokens as vertices, typed governor→dependent edges.
//!
//! Graphs are immutable once built. A vertex may have several governors, since
//! enhanced dependencies propagate relations across conjuncts.

use std::collections::HashSet;

use thiserror::Error;

/// Errors raised while building or querying a [`SentenceGraph`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} does not exist")]
    UnknownVertex(usize),
    #[error("vertex at position {position} has index {index}; indices must be contiguous from 1")]
    NonContiguous { position: usize, index: usize },
    #[error("vertex {0} has an empty word")]
    EmptyWord(usize),
    #[error("edge {governor} -> {dependent} is a self-loop")]
    SelfLoop { governor: usize, dependent: usize },
    #[error("edge {governor} -> {dependent} has an empty relation")]
    EmptyRelation { governor: usize, dependent: usize },
    #[error("duplicate edge {governor} -{relation}-> {dependent}")]
    DuplicateEdge {
        governor: usize,
        dependent: usize,
        relation: String,
    },
}

/// A token of a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    /// 1-based token position.
    pub index: usize,
    pub word: String,
    /// Always lowercase.
    pub lemma: String,
    pub pos: String,
    /// Half-open character offsets in the sentence text; `(0, 0)` when unknown.
    pub span: (usize, usize),
}

impl Vertex {
    pub fn new(index: usize, word: impl Into<String>, lemma: impl Into<String>, pos: impl Into<String>) -> Self {
        Vertex {
            index,
            word: word.into(),
            lemma: lemma.into().to_lowercase(),
            pos: pos.into(),
            span: (0, 0),
        }
    }

    pub fn with_span(mut self, start: usize, end: usize) -> Self {
        self.span = (start, end);
        self
    }
}

/// A typed dependency from `governor` to `dependent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub governor: usize,
    pub dependent: usize,
    pub relation: String,
}

impl Edge {
    pub fn new(governor: usize, dependent: usize, relation: impl Into<String>) -> Self {
        Edge {
            governor,
            dependent,
            relation: relation.into(),
        }
    }
}

/// One sentence's dependency graph.
#[derive(Debug, Clone)]
pub struct SentenceGraph {
    sentence_id: String,
    text: Option<String>,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    // Adjacency lists of edge indices, slot 0 unused. `outgoing[v]` is sorted by
    // (dependent, relation), `incoming[v]` by (governor, relation).
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

impl SentenceGraph {
    pub fn new(
        sentence_id: impl Into<String>,
        text: Option<String>,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        for (position, v) in vertices.iter().enumerate() {
            if v.index != position + 1 {
                return Err(GraphError::NonContiguous {
                    position: position + 1,
                    index: v.index,
                });
            }
            if v.word.is_empty() {
                return Err(GraphError::EmptyWord(v.index));
            }
        }
        let n = vertices.len();
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            for end in [e.governor, e.dependent] {
                if end == 0 || end > n {
                    return Err(GraphError::UnknownVertex(end));
                }
            }
            if e.governor == e.dependent {
                return Err(GraphError::SelfLoop {
                    governor: e.governor,
                    dependent: e.dependent,
                });
            }
            if e.relation.is_empty() {
                return Err(GraphError::EmptyRelation {
                    governor: e.governor,
                    dependent: e.dependent,
                });
            }
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge {
                    governor: e.governor,
                    dependent: e.dependent,
                    relation: e.relation.clone(),
                });
            }
        }

        let mut outgoing = vec![Vec::new(); n + 1];
        let mut incoming = vec![Vec::new(); n + 1];
        for (i, e) in edges.iter().enumerate() {
            outgoing[e.governor].push(i);
            incoming[e.dependent].push(i);
        }
        for list in &mut outgoing {
            list.sort_by(|&a, &b| {
                (edges[a].dependent, &edges[a].relation).cmp(&(edges[b].dependent, &edges[b].relation))
            });
        }
        for list in &mut incoming {
            list.sort_by(|&a, &b| {
                (edges[a].governor, &edges[a].relation).cmp(&(edges[b].governor, &edges[b].relation))
            });
        }

        Ok(SentenceGraph {
            sentence_id: sentence_id.into(),
            text,
            vertices,
            edges,
            outgoing,
            incoming,
        })
    }

    pub fn sentence_id(&self) -> &str {
        &self.sentence_id
    }

    pub fn text(&self) -> Option<&str> {
        self.text.as_deref()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        index >= 1 && index <= self.vertices.len()
    }

    pub fn vertex(&self, index: usize) -> Result<&Vertex, GraphError> {
        if self.contains(index) {
            Ok(&self.vertices[index - 1])
        } else {
            Err(GraphError::UnknownVertex(index))
        }
    }

    /// First vertex whose lemma equals `lemma`.
    pub fn find_lemma(&self, lemma: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.lemma == lemma)
    }

    /// Edges leaving `v`, ordered by dependent index.
    pub fn dependents_of(&self, v: usize, relation: Option<&str>) -> Result<Vec<(&Edge, &Vertex)>, GraphError> {
        self.vertex(v)?;
        Ok(self
            .out_edges(v)
            .filter(|e| relation.is_none_or(|r| e.relation == r))
            .map(|e| (e, &self.vertices[e.dependent - 1]))
            .collect())
    }

    /// Edges entering `v`, ordered by governor index.
    pub fn governors_of(&self, v: usize, relation: Option<&str>) -> Result<Vec<(&Edge, &Vertex)>, GraphError> {
        self.vertex(v)?;
        Ok(self
            .in_edges(v)
            .filter(|e| relation.is_none_or(|r| e.relation == r))
            .map(|e| (e, &self.vertices[e.governor - 1]))
            .collect())
    }

    /// Unchecked variants used by the matcher; `v` must be a valid index.
    pub(crate) fn out_edges(&self, v: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.outgoing[v].iter().map(move |&i| &self.edges[i])
    }

    pub(crate) fn in_edges(&self, v: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.incoming[v].iter().map(move |&i| &self.edges[i])
    }

    pub fn degree(&self, v: usize) -> usize {
        if self.contains(v) {
            self.outgoing[v].len() + self.incoming[v].len()
        } else {
            0
        }
    }
}

/// Structural equality: same id, text, vertices and edge set (edge order ignored).
impl PartialEq for SentenceGraph {
    fn eq(&self, other: &Self) -> bool {
        if self.sentence_id != other.sentence_id || self.text != other.text || self.vertices != other.vertices {
            return false;
        }
        let mut a: Vec<_> = self.edges.iter().collect();
        let mut b: Vec<_> = other.edges.iter().collect();
        a.sort();
        b.sort();
        a == b
    }
}

impl Eq for SentenceGraph {}

/// A report: an ordered list of sentence graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub sentences: Vec<SentenceGraph>,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, sentences: Vec<SentenceGraph>) -> Self {
        Document {
            doc_id: doc_id.into(),
            sentences,
        }
    }
}
