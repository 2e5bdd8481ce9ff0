//! Petri net, PNML, DOT and JSON renderings of trees.

pub mod dot;
pub mod json;
mod petri;
pub mod pnml;

use std::collections::BTreeMap;

use crate::log::HierLog;
use crate::tree::{NodeId, Tree};

pub use petri::{to_petri_net, PetriNet, Transition, TransitionKind, SINK, SOURCE};

/// Event counts per node, for annotating renderings. An activity leaf counts
/// the events it can emit directly: last path element equal to the leaf,
/// preceded by the innermost enclosing subtree name (or nothing at top
/// level). A named subtree counts the events executed anywhere inside a call
/// of that name. Operators and silent leaves get no entry.
pub fn node_frequencies(tree: &Tree, log: &HierLog) -> BTreeMap<NodeId, u64> {
    let mut leaf: BTreeMap<(Option<&str>, &str), u64> = BTreeMap::new();
    let mut inside: BTreeMap<&str, u64> = BTreeMap::new();
    for e in log.events() {
        let n = e.path.len();
        let parent = (n >= 2).then(|| e.path[n - 2].as_str());
        *leaf.entry((parent, e.path[n - 1].as_str())).or_default() += 1;
        let mut seen: Vec<&str> = e.path[..n - 1].iter().map(|a| a.as_str()).collect();
        seen.sort_unstable();
        seen.dedup();
        for f in seen {
            *inside.entry(f).or_default() += 1;
        }
    }
    let mut out = BTreeMap::new();
    fn go<'a>(
        t: &'a Tree,
        id: NodeId,
        scope: Option<&'a str>,
        leaf: &BTreeMap<(Option<&str>, &str), u64>,
        inside: &BTreeMap<&str, u64>,
        out: &mut BTreeMap<NodeId, u64>,
    ) {
        match t {
            Tree::Activity(a) => {
                out.insert(id, leaf.get(&(scope, a.as_str())).copied().unwrap_or(0));
            }
            Tree::Named(f, body) => {
                out.insert(id.clone(), inside.get(f.as_str()).copied().unwrap_or(0));
                go(body, id.child(0), Some(f.as_str()), leaf, inside, out);
            }
            Tree::Op(_, cs) => {
                for (i, c) in cs.iter().enumerate() {
                    go(c, id.child(i), scope, leaf, inside, out);
                }
            }
            Tree::Silent | Tree::Recursion(_) => {}
        }
    }
    go(tree, NodeId::root(), None, &leaf, &inside, &mut out);
    out
}
