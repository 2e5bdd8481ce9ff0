//! Hierarchical process trees.
//!
//! Besides the four block operators and the activity/silent leaves, a tree may
//! contain named subtrees (`sub:f(P)`), which prefix `f` to every event `P`
//! produces, and recursion leaves (`rec:f`), which re-enter the nearest
//! enclosing `sub:f`. A named subtree whose body produces no events stands for
//! a call without sub-calls and emits the single event `⟨f⟩`.

mod accept;
mod filter;
mod language;
mod notation;
mod reduce;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::log::Activity;

pub use accept::{accepts, Acceptor};
pub use filter::{depth_filter, Depth};
pub use language::{event_paths, language, language_within, LangBound, Language, PathTrace};
pub use notation::parse_tree;
pub use reduce::reduce;
pub use validate::{start_end_symbols, validate, Violation, ViolationKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Seq,
    Xor,
    Loop,
    Par,
}

impl Operator {
    pub fn keyword(self) -> &'static str {
        match self {
            Operator::Seq => "seq",
            Operator::Xor => "xor",
            Operator::Loop => "loop",
            Operator::Par => "par",
        }
    }

    /// Child order does not affect the language.
    pub fn is_commutative(self) -> bool {
        matches!(self, Operator::Xor | Operator::Par)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tree {
    Activity(Activity),
    Silent,
    Op(Operator, Vec<Tree>),
    Named(Activity, Box<Tree>),
    Recursion(Activity),
}

/// Path of child indices from the root; printed as `r.0.2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub Vec<usize>);

impl NodeId {
    pub fn root() -> Self {
        NodeId(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        NodeId(v)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("r")?;
        for i in &self.0 {
            write!(f, ".{i}")?;
        }
        Ok(())
    }
}

impl Tree {
    pub fn activity(name: &Activity) -> Tree {
        Tree::Activity(name.clone())
    }

    pub fn seq(children: Vec<Tree>) -> Tree {
        Tree::Op(Operator::Seq, children)
    }

    pub fn xor(children: Vec<Tree>) -> Tree {
        Tree::Op(Operator::Xor, children)
    }

    pub fn looped(children: Vec<Tree>) -> Tree {
        Tree::Op(Operator::Loop, children)
    }

    pub fn par(children: Vec<Tree>) -> Tree {
        Tree::Op(Operator::Par, children)
    }

    pub fn named(name: &Activity, child: Tree) -> Tree {
        Tree::Named(name.clone(), Box::new(child))
    }

    /// `loop(xor(a1, …, an, tau), tau)`: accepts any sequence over the branches.
    pub fn flower(branches: Vec<Tree>) -> Tree {
        let mut choice = branches;
        choice.push(Tree::Silent);
        Tree::looped(vec![Tree::xor(choice), Tree::Silent])
    }

    pub fn children(&self) -> &[Tree] {
        match self {
            Tree::Op(_, c) => c,
            Tree::Named(_, c) => std::slice::from_ref(c),
            _ => &[],
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Tree::size).sum::<usize>()
    }

    pub fn activity_leaves(&self) -> usize {
        match self {
            Tree::Activity(_) => 1,
            _ => self.children().iter().map(Tree::activity_leaves).sum(),
        }
    }

    /// Σ(P): every activity occurring as a leaf, subtree name or recursion target.
    pub fn alphabet(&self) -> BTreeSet<Activity> {
        let mut out = BTreeSet::new();
        self.collect_alphabet(&mut out);
        out
    }

    fn collect_alphabet(&self, out: &mut BTreeSet<Activity>) {
        match self {
            Tree::Activity(a) | Tree::Recursion(a) => {
                out.insert(a.clone());
            }
            Tree::Named(f, c) => {
                out.insert(f.clone());
                c.collect_alphabet(out);
            }
            Tree::Op(_, cs) => cs.iter().for_each(|c| c.collect_alphabet(out)),
            Tree::Silent => {}
        }
    }

    pub fn contains_recursion(&self) -> bool {
        match self {
            Tree::Recursion(_) => true,
            _ => self.children().iter().any(Tree::contains_recursion),
        }
    }

    /// Whether ε is in the language. Named subtrees never produce ε, so this is
    /// a purely local property.
    pub fn nullable(&self) -> bool {
        match self {
            Tree::Silent => true,
            Tree::Activity(_) | Tree::Named(..) | Tree::Recursion(_) => false,
            Tree::Op(Operator::Seq | Operator::Par, cs) => cs.iter().all(Tree::nullable),
            Tree::Op(Operator::Xor, cs) => cs.iter().any(Tree::nullable),
            Tree::Op(Operator::Loop, cs) => cs[0].nullable(),
        }
    }

    /// Same tree with the children of every `xor`/`par` sorted by their
    /// printed canonical form.
    pub fn canonical(&self) -> Tree {
        match self {
            Tree::Op(op, cs) => {
                let mut cs: Vec<Tree> = cs.iter().map(Tree::canonical).collect();
                if op.is_commutative() {
                    let mut keyed: Vec<(String, Tree)> = cs.into_iter().map(|c| (c.to_notation(), c)).collect();
                    keyed.sort_by(|a, b| a.0.cmp(&b.0));
                    cs = keyed.into_iter().map(|(_, c)| c).collect();
                }
                Tree::Op(*op, cs)
            }
            Tree::Named(f, c) => Tree::Named(f.clone(), Box::new(c.canonical())),
            other => other.clone(),
        }
    }

    /// Structural equality modulo the order of `xor`/`par` children.
    pub fn structurally_eq(&self, other: &Tree) -> bool {
        self.canonical() == other.canonical()
    }

    /// Visits every node with its id, parents before children.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&NodeId, &'a Tree)) {
        fn go<'a>(t: &'a Tree, id: NodeId, visit: &mut impl FnMut(&NodeId, &'a Tree)) {
            visit(&id, t);
            for (i, c) in t.children().iter().enumerate() {
                go(c, id.child(i), visit);
            }
        }
        go(self, NodeId::root(), visit)
    }

    pub fn node(&self, id: &NodeId) -> Option<&Tree> {
        id.0.iter().try_fold(self, |t, &i| t.children().get(i))
    }

    /// Ids of activity leaves and named subtrees whose label contains `query`.
    /// Recursion leaves are references, not occurrences, and never match.
    pub fn search(&self, query: &str) -> Vec<NodeId> {
        let mut hits = Vec::new();
        if query.is_empty() {
            return hits;
        }
        self.walk(&mut |id, t| {
            let label = match t {
                Tree::Activity(a) | Tree::Named(a, _) => Some(a),
                _ => None,
            };
            if label.is_some_and(|a| a.as_str().contains(query)) {
                hits.push(id.clone());
            }
        });
        hits
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical().to_notation())
    }
}

impl std::str::FromStr for Tree {
    type Err = crate::error::TreeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_tree(s)
    }
}


#[cfg(test)]
mod tests {
    use super::testutil::t;
    use super::*;

    #[test]
    fn search_skips_back_references() {
        let tree = t(r#"sub:"B.process()"(xor("A.process()", seq(x, rec:"B.process()")))"#);
        let hits: Vec<String> = tree.search("process").iter().map(NodeId::to_string).collect();
        assert_eq!(hits, ["r", "r.0.0"]);
        assert!(tree.search("").is_empty());
        assert_eq!(tree.node(&NodeId(vec![0, 1, 0])), Some(&t("x")));
    }
}
