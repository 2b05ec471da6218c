//! Random instance generators and an exhaustive matching oracle shared by the
//! integration tests. The oracle works from the match definition alone and
//! never calls into the matcher.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use udneg_core::pattern::{Attr, AttrTest, Direction, NodeConstraint, PatternAst, RelationOp};
use udneg_core::{Edge, QueryGraph, SentenceGraph, Vertex};

pub const LABELS: [&str; 3] = ["a", "b", "c"];
pub const LEMMAS: [&str; 3] = ["x", "y", "z"];

/// Graph with 1..=max_n vertices and a random simple edge set over three labels.
pub fn random_graph<R: Rng>(rng: &mut R, max_n: usize) -> SentenceGraph {
    let n = rng.gen_range(1..=max_n);
    let vertices: Vec<Vertex> = (1..=n)
        .map(|i| {
            let lemma = *LEMMAS.choose(rng).unwrap();
            let pos = if rng.gen_bool(0.5) { "NN" } else { "VB" };
            Vertex::new(i, format!("{lemma}{i}"), lemma, pos)
        })
        .collect();
    let density: f64 = rng.gen_range(0.05..0.5);
    let mut edges = Vec::new();
    for gov in 1..=n {
        for dep in 1..=n {
            if gov == dep {
                continue;
            }
            for label in LABELS {
                if rng.gen_bool(density / 2.0) {
                    edges.push(Edge::new(gov, dep, label));
                }
            }
        }
    }
    SentenceGraph::new("s1", None, vertices, edges).expect("generated graph is valid")
}

fn random_constraint<R: Rng>(rng: &mut R) -> NodeConstraint {
    let mut tests = Vec::new();
    match rng.gen_range(0..6) {
        0 | 1 => {}
        2 => tests.push(AttrTest::new(Attr::Lemma, *LEMMAS.choose(rng).unwrap()).unwrap()),
        3 => tests.push(AttrTest::new(Attr::Lemma, "x|y").unwrap()),
        4 => tests.push(AttrTest::new(Attr::Pos, "NN").unwrap()),
        _ => {
            tests.push(AttrTest::new(Attr::Word, "[xz].*").unwrap());
            tests.push(AttrTest::new(Attr::Pos, "VB").unwrap());
        }
    }
    NodeConstraint { tests }
}

/// Query tree with 1..=max_nodes nodes, each attached to a random earlier node.
pub fn random_query<R: Rng>(rng: &mut R, max_nodes: usize) -> PatternAst {
    let m = rng.gen_range(1..=max_nodes);
    // parent of node i (i >= 1) is some j < i; build bottom-up from that table
    let parents: Vec<usize> = (1..m).map(|i| rng.gen_range(0..i)).collect();
    let mut nodes: Vec<PatternAst> = (0..m).map(|_| PatternAst::leaf(random_constraint(rng))).collect();
    let mut ops: Vec<Option<RelationOp>> = vec![None; m];
    for op in ops.iter_mut().skip(1) {
        let label = if rng.gen_bool(0.25) {
            None
        } else {
            Some(*LABELS.choose(rng).unwrap())
        };
        *op = Some(if rng.gen_bool(0.5) {
            RelationOp::dependent_of(label)
        } else {
            RelationOp::governor_of(label)
        });
    }
    for i in (1..m).rev() {
        let child = std::mem::replace(&mut nodes[i], PatternAst::leaf(NodeConstraint::wildcard()));
        let p = parents[i - 1];
        nodes[p].children.insert(0, (ops[i].take().unwrap(), child));
    }
    nodes.swap_remove(0)
}

fn arc_witnessed(g: &SentenceGraph, op: &RelationOp, parent_v: usize, child_v: usize) -> bool {
    let (gov, dep) = match op.direction {
        Direction::DependentOf => (child_v, parent_v),
        Direction::GovernorOf => (parent_v, child_v),
    };
    g.edges()
        .iter()
        .any(|e| e.governor == gov && e.dependent == dep && op.label.as_deref().is_none_or(|l| e.relation == l))
}

/// Checks an assignment against the definition of an anchored match.
pub fn validate(g: &SentenceGraph, q: &QueryGraph, start: usize, a: &[usize]) -> Result<(), String> {
    if a.len() != q.len() {
        return Err(format!("assignment has {} entries for {} nodes", a.len(), q.len()));
    }
    if a[0] != start {
        return Err(format!("anchor bound to {} instead of {start}", a[0]));
    }
    for (node, &v) in a.iter().enumerate() {
        let vertex = g.vertex(v).map_err(|e| e.to_string())?;
        if !q.nodes()[node].matches(vertex) {
            return Err(format!("node {node} constraint fails on vertex {v}"));
        }
    }
    for arc in q.arcs() {
        if !arc_witnessed(g, &arc.op, a[arc.from], a[arc.to]) {
            return Err(format!("arc {}->{} has no witness edge", arc.from, arc.to));
        }
    }
    for x in q.arcs() {
        for y in q.arcs() {
            if x.to < y.to && x.from == y.from && a[x.to] == a[y.to] {
                return Err(format!("siblings {} and {} share vertex {}", x.to, y.to, a[x.to]));
            }
        }
    }
    Ok(())
}

/// Lexicographically first valid assignment, found by enumerating all |V|^|Q|
/// assignments with the anchor fixed.
pub fn oracle_first(g: &SentenceGraph, q: &QueryGraph, start: usize) -> Option<Vec<usize>> {
    let n = g.len();
    let m = q.len();
    let mut a = vec![1; m];
    a[0] = start;
    loop {
        if validate(g, q, start, &a).is_ok() {
            return Some(a);
        }
        // odometer over positions 1..m, last position fastest
        let mut pos = m;
        loop {
            if pos == 1 {
                return None;
            }
            pos -= 1;
            if a[pos] < n {
                a[pos] += 1;
                for later in a.iter_mut().skip(pos + 1) {
                    *later = 1;
                }
                break;
            }
        }
    }
}

/// Every valid assignment, in lexicographic order.
pub fn oracle_all(g: &SentenceGraph, q: &QueryGraph, start: usize) -> Vec<Vec<usize>> {
    let n = g.len();
    let m = q.len();
    let mut out = Vec::new();
    let total = n.pow((m - 1) as u32);
    for code in 0..total {
        let mut a = vec![start; m];
        let mut c = code;
        for slot in a.iter_mut().skip(1).rev() {
            *slot = c % n + 1;
            c /= n;
        }
        if validate(g, q, start, &a).is_ok() {
            out.push(a);
        }
    }
    out
}

const REGEX_PIECES: [&str; 10] = ["a", "no", "x+", "[a-z]", "b|c", "\\.", "/", ".*", "(d|e)", "n?o"];
const ROUND_TRIP_LABELS: [&str; 6] = ["neg", "nmod:of", "conj:or", "dobj", "a_b", "x:y_z"];

/// Random AST over the full surface grammar, for render/parse round trips.
pub fn random_ast<R: Rng>(rng: &mut R, budget: &mut usize, depth: usize) -> PatternAst {
    let mut attrs = [Attr::Word, Attr::Lemma, Attr::Pos];
    attrs.shuffle(rng);
    let k = rng.gen_range(0..=3);
    let tests = attrs[..k]
        .iter()
        .map(|&attr| {
            let pieces = rng.gen_range(1..=3);
            let src: String = (0..pieces).map(|_| *REGEX_PIECES.choose(rng).unwrap()).collect();
            AttrTest::new(attr, src).expect("pieces form a valid regex")
        })
        .collect();
    let mut ast = PatternAst::leaf(NodeConstraint { tests });
    while *budget > 0 && depth < 6 && rng.gen_bool(0.55) {
        *budget -= 1;
        let label = if rng.gen_bool(0.3) {
            None
        } else {
            Some(*ROUND_TRIP_LABELS.choose(rng).unwrap())
        };
        let op = if rng.gen_bool(0.5) {
            RelationOp::dependent_of(label)
        } else {
            RelationOp::governor_of(label)
        };
        let child = random_ast(rng, budget, depth + 1);
        ast.children.push((op, child));
    }
    ast
}
