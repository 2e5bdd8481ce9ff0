//! Membership test for the class of trees that discovery rediscovers.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{NodeId, Operator, Tree};
use crate::log::Activity;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    /// The activity occurs in more than one child of the node.
    DuplicateActivity {
        activity: Activity,
    },
    /// The first branch of a loop can start and end with these symbols.
    LoopStartEndOverlap {
        symbols: Vec<Activity>,
    },
    SilentChild,
    UnboundRecursion {
        name: Activity,
    },
    /// An operator without children, or a loop without a redo branch.
    Malformed {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub node: NodeId,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

/// All violations, parents before children. Empty iff the tree is in the class.
pub fn validate(tree: &Tree) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut scope: Vec<Activity> = Vec::new();
    check(tree, NodeId::root(), &mut scope, &mut out);
    out
}

fn check(t: &Tree, id: NodeId, scope: &mut Vec<Activity>, out: &mut Vec<Violation>) {
    let mut report = |kind| out.push(Violation { node: id.clone(), kind });
    match t {
        Tree::Recursion(f) if !scope.contains(f) => report(ViolationKind::UnboundRecursion { name: f.clone() }),
        Tree::Op(op, cs) => {
            if cs.is_empty() || (*op == Operator::Loop && cs.len() < 2) {
                report(ViolationKind::Malformed {
                    reason: format!("{} with {} children", op.keyword(), cs.len()),
                });
            }
            let alphabets: Vec<BTreeSet<Activity>> = cs.iter().map(Tree::alphabet).collect();
            let mut seen = BTreeSet::new();
            let mut duplicates = BTreeSet::new();
            for alpha in &alphabets {
                for a in alpha {
                    if !seen.insert(a) {
                        duplicates.insert(a.clone());
                    }
                }
            }
            for activity in duplicates {
                report(ViolationKind::DuplicateActivity { activity });
            }
            if *op == Operator::Loop && !cs.is_empty() {
                let (start, end) = start_end_symbols(&cs[0]);
                let symbols: Vec<Activity> = start.intersection(&end).cloned().collect();
                if !symbols.is_empty() {
                    report(ViolationKind::LoopStartEndOverlap { symbols });
                }
            }
        }
        _ => {}
    }
    if t.children().contains(&Tree::Silent) {
        for (i, c) in t.children().iter().enumerate() {
            if *c == Tree::Silent {
                out.push(Violation {
                    node: id.child(i),
                    kind: ViolationKind::SilentChild,
                });
            }
        }
    }
    if let Tree::Named(f, _) = t {
        scope.push(f.clone());
    }
    for (i, c) in t.children().iter().enumerate() {
        check(c, id.child(i), scope, out);
    }
    if let Tree::Named(..) = t {
        scope.pop();
    }
}

/// Symbols at the tree's own level that can begin and end a non-empty trace,
/// computed from the structure. A named subtree or recursion leaf contributes
/// its name.
pub fn start_end_symbols(t: &Tree) -> (BTreeSet<Activity>, BTreeSet<Activity>) {
    match t {
        Tree::Silent => Default::default(),
        Tree::Activity(a) | Tree::Named(a, _) | Tree::Recursion(a) => {
            (BTreeSet::from([a.clone()]), BTreeSet::from([a.clone()]))
        }
        Tree::Op(Operator::Xor | Operator::Par, cs) => {
            let mut s = BTreeSet::new();
            let mut e = BTreeSet::new();
            for c in cs {
                let (cs, ce) = start_end_symbols(c);
                s.extend(cs);
                e.extend(ce);
            }
            (s, e)
        }
        Tree::Op(Operator::Seq, cs) => (edge(cs.iter(), false), edge(cs.iter().rev(), true)),
        Tree::Op(Operator::Loop, cs) => {
            let (mut s, mut e) = start_end_symbols(&cs[0]);
            if cs[0].nullable() {
                for c in &cs[1..] {
                    let (rs, re) = start_end_symbols(c);
                    s.extend(rs);
                    e.extend(re);
                }
            }
            (s, e)
        }
    }
}

/// Start (or end) symbols of sequence children visited from that side.
fn edge<'a>(cs: impl Iterator<Item = &'a Tree>, end: bool) -> BTreeSet<Activity> {
    let mut out = BTreeSet::new();
    for c in cs {
        let (s, e) = start_end_symbols(c);
        out.extend(if end { e } else { s });
        if !c.nullable() {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log::testutil::act;
    use crate::tree::testutil::t;

    fn kinds(s: &str) -> Vec<ViolationKind> {
        validate(&t(s)).into_iter().map(|v| v.kind).collect()
    }

    #[test]
    fn duplicate_in_sequence() {
        assert_eq!(
            kinds("seq(a, a)"),
            vec![ViolationKind::DuplicateActivity { activity: act("a") }]
        );
    }

    #[test]
    fn single_activity_loop_body() {
        assert_eq!(
            kinds("loop(a, b)"),
            vec![ViolationKind::LoopStartEndOverlap {
                symbols: vec![act("a")]
            }]
        );
        assert!(kinds("loop(seq(a, c), b)").is_empty());
    }

    #[test]
    fn running_example_is_in_the_class() {
        let expected_model = r#"sub:"Main.main()"(seq("Main.input()", sub:"B.process()"(xor("A.process()", seq("B.stepPre()", rec:"B.process()", "B.stepPost()"))), "Main.output()"))"#;
        assert!(validate(&t(expected_model)).is_empty());
    }

    #[test]
    fn silent_and_unbound() {
        let v = validate(&t("seq(a, xor(b, tau), rec:f)"));
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].node.to_string(), "r.1.1");
        assert_eq!(v[0].kind, ViolationKind::SilentChild);
        assert_eq!(v[1].kind, ViolationKind::UnboundRecursion { name: act("f") });
        assert!(kinds("tau").is_empty());
    }

    #[test]
    fn malformed_operators() {
        let v = validate(&Tree::Op(Operator::Loop, vec![t("a")]));
        assert!(matches!(v[0].kind, ViolationKind::Malformed { .. }));
    }
}
