use super::{NodeConstraint, PatternAst, RelationOp};

/// A constraint between a parent query node and one of its children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryArc {
    pub from: usize,
    pub to: usize,
    pub op: RelationOp,
}

/// Compiled pattern: a tree of node constraints rooted at the anchor (id 0).
///
/// Ids follow a preorder walk of the AST, so every arc has `from < to` and each
/// non-anchor node has exactly one incoming arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryGraph {
    nodes: Vec<NodeConstraint>,
    arcs: Vec<QueryArc>,
    // incoming arc index per node; None for the anchor
    parent_arc: Vec<Option<usize>>,
}

impl QueryGraph {
    pub const ANCHOR: usize = 0;

    pub fn nodes(&self) -> &[NodeConstraint] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[QueryArc] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The arc that attaches `node` to its parent.
    pub fn parent_arc(&self, node: usize) -> Option<&QueryArc> {
        self.parent_arc.get(node).copied().flatten().map(|i| &self.arcs[i])
    }

    /// Rebuilds the AST this graph was compiled from.
    pub fn to_ast(&self) -> PatternAst {
        fn build(q: &QueryGraph, id: usize) -> PatternAst {
            let mut ast = PatternAst::leaf(q.nodes[id].clone());
            for arc in q.arcs.iter().filter(|a| a.from == id) {
                ast.children.push((arc.op.clone(), build(q, arc.to)));
            }
            ast
        }
        build(self, Self::ANCHOR)
    }
}

/// Flattens an AST into a query graph with preorder node ids.
pub fn compile(ast: &PatternAst) -> QueryGraph {
    let mut q = QueryGraph {
        nodes: Vec::with_capacity(ast.node_count()),
        arcs: Vec::new(),
        parent_arc: Vec::new(),
    };
    visit(ast, None, &mut q);
    q
}

fn visit(ast: &PatternAst, parent: Option<(usize, &RelationOp)>, q: &mut QueryGraph) {
    let id = q.nodes.len();
    q.nodes.push(ast.node.clone());
    match parent {
        Some((from, op)) => {
            q.parent_arc.push(Some(q.arcs.len()));
            q.arcs.push(QueryArc {
                from,
                to: id,
                op: op.clone(),
            });
        }
        None => q.parent_arc.push(None),
    }
    for (op, child) in &ast.children {
        visit(child, Some((id, op)), q);
    }
}
