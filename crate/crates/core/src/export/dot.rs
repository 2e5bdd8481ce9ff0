//! Statechart-style DOT: named subtrees are labeled clusters, operators are
//! junction pseudo-nodes, and a recursion leaf is a link-back node pointing
//! at the cluster it re-enters. Node ids are derived from node paths, so the
//! output is byte-identical across runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::tree::{NodeId, Operator, Tree};

fn ident(prefix: &str, id: &NodeId) -> String {
    let mut s = prefix.to_string();
    s.push('r');
    for i in &id.0 {
        let _ = write!(s, "_{i}");
    }
    s
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

struct Render<'a> {
    out: String,
    freq: Option<&'a BTreeMap<NodeId, u64>>,
    /// Enclosing named subtrees: name, cluster id, entry node.
    scope: Vec<(String, String, String)>,
    back_edges: Vec<String>,
}

impl Render<'_> {
    fn label(&self, text: &str, id: &NodeId) -> String {
        match self.freq.and_then(|m| m.get(id)) {
            Some(n) => {
                let q = quote(text);
                format!("{}\\n{n}\"", &q[..q.len() - 1])
            }
            None => quote(text),
        }
    }

    fn line(&mut self, depth: usize, s: &str) {
        for _ in 0..depth {
            self.out.push_str("  ");
        }
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn edge(&mut self, depth: usize, a: &str, b: &str) {
        self.line(depth, &format!("{a} -> {b};"));
    }

    /// Emits the fragment of `tree` and returns its entry and exit nodes.
    fn fragment(&mut self, tree: &Tree, id: &NodeId, depth: usize) -> (String, String) {
        match tree {
            Tree::Activity(a) => {
                let n = ident("n_", id);
                let l = self.label(a.as_str(), id);
                self.line(depth, &format!("{n} [shape=box, style=rounded, label={l}];"));
                (n.clone(), n)
            }
            Tree::Silent => {
                let n = ident("n_", id);
                self.line(depth, &format!("{n} [shape=point, label=\"\"];"));
                (n.clone(), n)
            }
            Tree::Recursion(f) => {
                let n = ident("n_", id);
                let l = self.label(&format!("\u{21ba} {f}"), id);
                self.line(depth, &format!("{n} [shape=box, style=dashed, class=back, label={l}];"));
                if let Some((_, cluster, entry)) = self.scope.iter().rev().find(|s| s.0 == f.as_str()) {
                    self.back_edges.push(format!(
                        "{n} -> {entry} [style=dotted, constraint=false, lhead={cluster}];"
                    ));
                }
                (n.clone(), n)
            }
            Tree::Named(f, body) => {
                let cluster = ident("cluster_", id);
                self.line(depth, &format!("subgraph {cluster} {{"));
                let l = self.label(f.as_str(), id);
                self.line(depth + 1, &format!("label={l};"));
                // the body's entry node is only known afterwards, but every
                // fragment's entry is the first node it emits, at the child's id
                let entry = entry_of(body, &id.child(0));
                self.scope.push((f.to_string(), cluster, entry));
                let io = self.fragment(body, &id.child(0), depth + 1);
                self.scope.pop();
                self.line(depth, "}");
                io
            }
            Tree::Op(Operator::Seq, cs) => {
                let mut ends = Vec::with_capacity(cs.len());
                for (i, c) in cs.iter().enumerate() {
                    ends.push(self.fragment(c, &id.child(i), depth));
                }
                for w in ends.windows(2) {
                    self.edge(depth, &w[0].1, &w[1].0);
                }
                (ends[0].0.clone(), ends[ends.len() - 1].1.clone())
            }
            Tree::Op(op, cs) => {
                let glyph = match op {
                    Operator::Xor => "\u{d7}",
                    Operator::Par => "\u{2227}",
                    _ => "\u{27f2}",
                };
                let split = ident("j_", id) + "_in";
                let join = ident("j_", id) + "_out";
                let l = self.label(glyph, id);
                self.line(depth, &format!("{split} [shape=diamond, label={l}];"));
                self.line(depth, &format!("{join} [shape=diamond, label={}];", quote(glyph)));
                for (i, c) in cs.iter().enumerate() {
                    let (a, b) = self.fragment(c, &id.child(i), depth);
                    if *op == Operator::Loop && i > 0 {
                        self.edge(depth, &join, &a);
                        self.edge(depth, &b, &split);
                    } else {
                        self.edge(depth, &split, &a);
                        self.edge(depth, &b, &join);
                    }
                }
                (split, join)
            }
        }
    }
}

fn entry_of(tree: &Tree, id: &NodeId) -> String {
    match tree {
        Tree::Named(_, body) => entry_of(body, &id.child(0)),
        Tree::Op(Operator::Seq, cs) => entry_of(&cs[0], &id.child(0)),
        Tree::Op(..) => ident("j_", id) + "_in",
        _ => ident("n_", id),
    }
}

/// DOT rendering, with per-node frequencies appended to labels when given.
pub fn to_dot(tree: &Tree, freq: Option<&BTreeMap<NodeId, u64>>) -> String {
    let mut r = Render {
        out: String::new(),
        freq,
        scope: Vec::new(),
        back_edges: Vec::new(),
    };
    r.line(0, "digraph hptree {");
    r.line(1, "compound=true;");
    r.line(1, "rankdir=LR;");
    r.line(1, "node [fontname=\"Helvetica\"];");
    r.fragment(tree, &NodeId::root(), 1);
    for e in std::mem::take(&mut r.back_edges) {
        r.line(1, &e);
    }
    r.line(0, "}");
    r.out
}
