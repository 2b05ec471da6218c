//! Anchored subgraph matching of a [`QueryGraph`] against a [`SentenceGraph`].
//!
//! The query is a tree, so the search walks query nodes in id order (preorder)
//! and, for each, tries the graph neighbours of its parent's image in ascending
//! vertex order. Node-constraint checks are memoized per (query node, vertex).
//!
//! Worst-case work is bounded by the number of partial assignments, at most
//! `k^(|Q|-1)` for maximum vertex degree `k`, well inside the `O(m^2 k^m)`
//! envelope for sentence length `m`.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::graph::SentenceGraph;
use crate::pattern::{Direction, QueryGraph, RelationOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("start vertex {0} does not exist")]
    UnknownStart(usize),
}

/// Which query nodes must bind to distinct vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Injectivity {
    /// Children of the same query node bind to distinct vertices.
    #[default]
    Siblings,
    /// All query nodes bind to distinct vertices.
    Global,
}

/// How a relation label in the pattern is compared with an edge label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelMatch {
    #[default]
    Exact,
    /// `nmod` also accepts `nmod:of`, `nmod:in`, ...
    Prefix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchOptions {
    pub injectivity: Injectivity,
    pub labels: LabelMatch,
}

/// A successful embedding of a query into a sentence graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchBinding {
    /// `assignment[i]` is the vertex bound to query node `i`.
    pub assignment: Vec<usize>,
    /// Vertices covered by the match.
    pub scope: BTreeSet<usize>,
}

impl MatchBinding {
    fn new(assignment: Vec<usize>) -> Self {
        let scope = assignment.iter().copied().collect();
        MatchBinding { assignment, scope }
    }

    pub fn anchor(&self) -> usize {
        self.assignment[QueryGraph::ANCHOR]
    }
}

/// Search effort counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchStats {
    /// Candidate vertices examined across all query nodes.
    pub candidates: u64,
    /// Node-constraint evaluations that missed the memo.
    pub constraint_checks: u64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Matcher {
    pub options: MatchOptions,
}

impl Matcher {
    pub fn new(options: MatchOptions) -> Self {
        Matcher { options }
    }

    /// First binding under the deterministic search order, if any.
    pub fn anchored(
        &self,
        g: &SentenceGraph,
        q: &QueryGraph,
        start: usize,
    ) -> Result<Option<MatchBinding>, MatchError> {
        self.anchored_with_stats(g, q, start).map(|(b, _)| b)
    }

    pub fn anchored_with_stats(
        &self,
        g: &SentenceGraph,
        q: &QueryGraph,
        start: usize,
    ) -> Result<(Option<MatchBinding>, MatchStats), MatchError> {
        let mut found = None;
        let stats = self.search(g, q, start, |assignment| {
            found = Some(MatchBinding::new(assignment.to_vec()));
            ControlFlow::Break(())
        })?;
        Ok((found, stats))
    }

    pub fn any(&self, g: &SentenceGraph, q: &QueryGraph, start: usize) -> Result<bool, MatchError> {
        Ok(self.anchored(g, q, start)?.is_some())
    }

    /// Every binding, in search order.
    pub fn all(&self, g: &SentenceGraph, q: &QueryGraph, start: usize) -> Result<Vec<MatchBinding>, MatchError> {
        let mut out = Vec::new();
        self.search(g, q, start, |assignment| {
            out.push(MatchBinding::new(assignment.to_vec()));
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    fn search<F>(&self, g: &SentenceGraph, q: &QueryGraph, start: usize, on_match: F) -> Result<MatchStats, MatchError>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if !g.contains(start) {
            return Err(MatchError::UnknownStart(start));
        }
        let mut search = Search {
            g,
            q,
            options: self.options,
            memo: vec![Memo::Unknown; q.len() * (g.len() + 1)],
            assignment: vec![0; q.len()],
            stats: MatchStats::default(),
            on_match,
        };
        search.stats.candidates += 1;
        if search.satisfies(QueryGraph::ANCHOR, start) {
            search.assignment[QueryGraph::ANCHOR] = start;
            let _ = search.extend(1);
        }
        Ok(search.stats)
    }
}

pub fn match_anchored(g: &SentenceGraph, q: &QueryGraph, start: usize) -> Result<Option<MatchBinding>, MatchError> {
    Matcher::default().anchored(g, q, start)
}

pub fn match_any(g: &SentenceGraph, q: &QueryGraph, start: usize) -> Result<bool, MatchError> {
    Matcher::default().any(g, q, start)
}

pub fn all_bindings(g: &SentenceGraph, q: &QueryGraph, start: usize) -> Result<Vec<MatchBinding>, MatchError> {
    Matcher::default().all(g, q, start)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Memo {
    Unknown,
    Yes,
    No,
}

struct Search<'a, F> {
    g: &'a SentenceGraph,
    q: &'a QueryGraph,
    options: MatchOptions,
    memo: Vec<Memo>,
    assignment: Vec<usize>,
    stats: MatchStats,
    on_match: F,
}

impl<F> Search<'_, F>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    fn satisfies(&mut self, node: usize, v: usize) -> bool {
        let slot = node * (self.g.len() + 1) + v;
        match self.memo[slot] {
            Memo::Yes => true,
            Memo::No => false,
            Memo::Unknown => {
                self.stats.constraint_checks += 1;
                let vertex = &self.g.vertices()[v - 1];
                let ok = self.q.nodes()[node].matches(vertex);
                self.memo[slot] = if ok { Memo::Yes } else { Memo::No };
                ok
            }
        }
    }

    fn label_ok(&self, op: &RelationOp, relation: &str) -> bool {
        match (&op.label, self.options.labels) {
            (None, _) => true,
            (Some(l), LabelMatch::Exact) => l == relation,
            (Some(l), LabelMatch::Prefix) => {
                relation == l || (relation.starts_with(l.as_str()) && relation[l.len()..].starts_with(':'))
            }
        }
    }

    fn candidates(&self, node: usize) -> Vec<usize> {
        let arc = self.q.parent_arc(node).expect("non-anchor node has a parent");
        let base = self.assignment[arc.from];
        let mut out: Vec<usize> = match arc.op.direction {
            // the child node is the governor of the parent's vertex
            Direction::DependentOf => self
                .g
                .in_edges(base)
                .filter(|e| self.label_ok(&arc.op, &e.relation))
                .map(|e| e.governor)
                .collect(),
            Direction::GovernorOf => self
                .g
                .out_edges(base)
                .filter(|e| self.label_ok(&arc.op, &e.relation))
                .map(|e| e.dependent)
                .collect(),
        };
        // adjacency lists are sorted by neighbour index
        out.dedup();
        out
    }

    fn distinct(&self, node: usize, v: usize) -> bool {
        match self.options.injectivity {
            Injectivity::Global => self.assignment[..node].iter().all(|&w| w != v),
            Injectivity::Siblings => {
                let parent = self.q.parent_arc(node).map(|a| a.from);
                (1..node).all(|other| self.q.parent_arc(other).map(|a| a.from) != parent || self.assignment[other] != v)
            }
        }
    }

    fn extend(&mut self, node: usize) -> ControlFlow<()> {
        if node == self.q.len() {
            return (self.on_match)(&self.assignment);
        }
        for v in self.candidates(node) {
            self.stats.candidates += 1;
            if !self.distinct(node, v) || !self.satisfies(node, v) {
                continue;
            }
            self.assignment[node] = v;
            self.extend(node + 1)?;
        }
        ControlFlow::Continue(())
    }
}
