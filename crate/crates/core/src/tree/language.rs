//! Bounded enumeration of tree languages.
//!
//! `rec:f` denotes the language of the nearest enclosing `sub:f`, prefix
//! included. Each `sub:f` is evaluated as a bounded fixpoint: iteration `k`
//! resolves `rec:f` to the result of iteration `k - 1` (iteration 0 resolves
//! it to the empty set), for `k` up to the recursion bound.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{Operator, Tree};
use crate::error::TreeError;
use crate::log::Activity;

/// Limits for enumeration: number of events per trace, and how often any
/// single `sub:f` may be re-entered through `rec:f` along one event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LangBound {
    pub max_trace_len: usize,
    pub max_recursion_depth: usize,
}

impl LangBound {
    pub fn new(max_trace_len: usize, max_recursion_depth: usize) -> Self {
        LangBound {
            max_trace_len,
            max_recursion_depth,
        }
    }
}

impl Default for LangBound {
    fn default() -> Self {
        LangBound::new(8, 3)
    }
}

/// A trace as a sequence of event paths.
pub type PathTrace = Vec<Vec<Activity>>;
pub type Language = BTreeSet<PathTrace>;

/// Fails with `UnboundRecursion` on the first `rec:f` outside every `sub:f`.
pub(crate) fn check_bound(tree: &Tree) -> Result<(), TreeError> {
    fn go<'a>(t: &'a Tree, scope: &mut Vec<&'a Activity>) -> Result<(), TreeError> {
        match t {
            Tree::Recursion(f) if !scope.contains(&f) => Err(TreeError::UnboundRecursion(f.to_string())),
            Tree::Named(f, c) => {
                scope.push(f);
                let r = go(c, scope);
                scope.pop();
                r
            }
            _ => t.children().iter().try_for_each(|c| go(c, scope)),
        }
    }
    go(tree, &mut Vec::new())
}

/// Every trace of the tree's language with at most `max_trace_len` events and
/// recursion nesting within `max_recursion_depth`.
pub fn language(tree: &Tree, bound: LangBound) -> Result<Language, TreeError> {
    language_within(tree, bound, usize::MAX).map(|l| l.expect("no limit"))
}

/// Like [`language`], but gives up with `None` as soon as the language of any
/// subtree exceeds `limit` traces.
pub fn language_within(tree: &Tree, bound: LangBound, limit: usize) -> Result<Option<Language>, TreeError> {
    check_bound(tree)?;
    let mut ev = Enumerator {
        bound,
        paths: Vec::new(),
        ids: HashMap::new(),
        env: Vec::new(),
        limit,
        overflow: false,
    };
    let set = ev.lang(tree);
    if ev.overflow {
        return Ok(None);
    }
    Ok(Some(
        set.into_iter()
            .map(|t| t.iter().map(|&id| ev.paths[id as usize].clone()).collect())
            .collect(),
    ))
}

type Trace = Vec<u32>;
type Set = HashSet<Trace>;

struct Enumerator {
    bound: LangBound,
    paths: Vec<Vec<Activity>>,
    ids: HashMap<Vec<Activity>, u32>,
    /// Innermost last: current approximation of each enclosing `sub:f`.
    env: Vec<(Activity, Set)>,
    limit: usize,
    overflow: bool,
}

impl Enumerator {
    fn intern(&mut self, path: Vec<Activity>) -> u32 {
        if let Some(&id) = self.ids.get(&path) {
            return id;
        }
        let id = self.paths.len() as u32;
        self.paths.push(path.clone());
        self.ids.insert(path, id);
        id
    }

    fn prefixed(&mut self, f: &Activity, id: u32) -> u32 {
        let mut path = Vec::with_capacity(self.paths[id as usize].len() + 1);
        path.push(f.clone());
        path.extend(self.paths[id as usize].iter().cloned());
        self.intern(path)
    }

    fn lang(&mut self, t: &Tree) -> Set {
        if self.overflow {
            return Set::new();
        }
        let set = self.lang_of(t);
        if set.len() > self.limit {
            self.overflow = true;
            return Set::new();
        }
        set
    }

    fn lang_of(&mut self, t: &Tree) -> Set {
        let max = self.bound.max_trace_len;
        match t {
            Tree::Silent => Set::from([Vec::new()]),
            Tree::Activity(a) => {
                if max == 0 {
                    return Set::new();
                }
                let id = self.intern(vec![a.clone()]);
                Set::from([vec![id]])
            }
            Tree::Recursion(f) => self
                .env
                .iter()
                .rev()
                .find(|(g, _)| g == f)
                .map(|(_, s)| s.clone())
                .expect("bound checked before enumeration"),
            Tree::Named(f, c) => {
                self.env.push((f.clone(), Set::new()));
                let mut current = Set::new();
                for _ in 0..=self.bound.max_recursion_depth {
                    let body = self.lang(c);
                    let next = self.wrap(f, body);
                    if next == current {
                        break;
                    }
                    current = next;
                    self.env.last_mut().expect("pushed above").1 = current.clone();
                }
                self.env.pop();
                current
            }
            Tree::Op(Operator::Xor, cs) => {
                let mut out = Set::new();
                for c in cs {
                    out.extend(self.lang(c));
                }
                out
            }
            Tree::Op(Operator::Seq, cs) => {
                let mut acc = Set::from([Vec::new()]);
                for c in cs {
                    if acc.is_empty() || acc.len() > self.limit {
                        break;
                    }
                    let next = self.lang(c);
                    acc = concat(&acc, &next, max);
                }
                acc
            }
            Tree::Op(Operator::Par, cs) => {
                let mut acc = Set::from([Vec::new()]);
                for c in cs {
                    if acc.len() > self.limit {
                        break;
                    }
                    let next = self.lang(c);
                    let mut out = Set::new();
                    for a in &acc {
                        for b in &next {
                            if a.len() + b.len() <= max {
                                shuffle(a, b, &mut Vec::new(), &mut out);
                            }
                        }
                    }
                    acc = out;
                }
                acc
            }
            Tree::Op(Operator::Loop, cs) => {
                let body = self.lang(&cs[0]);
                let mut redo = Set::new();
                for c in &cs[1..] {
                    redo.extend(self.lang(c));
                }
                let mut all = body.clone();
                let mut frontier = body.clone();
                while !frontier.is_empty() && all.len() <= self.limit {
                    let extended = concat(&concat(&frontier, &redo, max), &body, max);
                    frontier = extended.into_iter().filter(|t| !all.contains(t)).collect();
                    all.extend(frontier.iter().cloned());
                }
                all
            }
        }
    }

    /// Prefixes `f` to every event; an empty body becomes the single event `⟨f⟩`.
    fn wrap(&mut self, f: &Activity, body: Set) -> Set {
        body.into_iter()
            .filter_map(|t| {
                if t.is_empty() {
                    if self.bound.max_trace_len == 0 {
                        return None;
                    }
                    return Some(vec![self.intern(vec![f.clone()])]);
                }
                Some(t.into_iter().map(|id| self.prefixed(f, id)).collect())
            })
            .collect()
    }
}

fn concat(a: &Set, b: &Set, max: usize) -> Set {
    let mut out = Set::new();
    for x in a {
        for y in b {
            if x.len() + y.len() <= max {
                let mut t = x.clone();
                t.extend_from_slice(y);
                out.insert(t);
            }
        }
    }
    out
}

fn shuffle(a: &[u32], b: &[u32], prefix: &mut Trace, out: &mut Set) {
    match (a.split_first(), b.split_first()) {
        (None, _) => {
            let mut t = prefix.clone();
            t.extend_from_slice(b);
            out.insert(t);
        }
        (_, None) => {
            let mut t = prefix.clone();
            t.extend_from_slice(a);
            out.insert(t);
        }
        (Some((&x, ra)), Some((&y, rb))) => {
            prefix.push(x);
            shuffle(ra, b, prefix, out);
            prefix.pop();
            prefix.push(y);
            shuffle(a, rb, prefix, out);
            prefix.pop();
        }
    }
}

/// Every event path the tree can produce when each `sub:f` is re-entered at
/// most `max_recursion_depth` times along one path. A superset of the events
/// occurring in `language` at the same recursion bound.
pub fn event_paths(tree: &Tree, max_recursion_depth: usize) -> Result<BTreeSet<Vec<Activity>>, TreeError> {
    check_bound(tree)?;
    let mut out = BTreeSet::new();
    let mut scope = Vec::new();
    paths_of(tree, &mut Vec::new(), &mut scope, max_recursion_depth, &mut out);
    Ok(out)
}

struct Frame<'a> {
    name: &'a Activity,
    body: &'a Tree,
    budget: usize,
}

fn paths_of<'a>(
    t: &'a Tree,
    prefix: &mut Vec<Activity>,
    scope: &mut Vec<Frame<'a>>,
    limit: usize,
    out: &mut BTreeSet<Vec<Activity>>,
) {
    match t {
        Tree::Silent => {}
        Tree::Activity(a) => {
            let mut p = prefix.clone();
            p.push(a.clone());
            out.insert(p);
        }
        Tree::Op(_, cs) => {
            for c in cs {
                paths_of(c, prefix, scope, limit, out);
            }
        }
        Tree::Named(f, c) => {
            scope.push(Frame {
                name: f,
                body: c,
                budget: limit,
            });
            enter(f, c, prefix, scope, limit, out);
            scope.pop();
        }
        Tree::Recursion(f) => {
            let Some(i) = scope.iter().rposition(|fr| fr.name == f) else {
                return;
            };
            if scope[i].budget == 0 {
                return;
            }
            let saved: Vec<Frame<'a>> = scope.drain(i + 1..).collect();
            scope[i].budget -= 1;
            let body = scope[i].body;
            enter(f, body, prefix, scope, limit, out);
            scope[i].budget += 1;
            scope.extend(saved);
        }
    }
}

fn enter<'a>(
    f: &Activity,
    body: &'a Tree,
    prefix: &mut Vec<Activity>,
    scope: &mut Vec<Frame<'a>>,
    limit: usize,
    out: &mut BTreeSet<Vec<Activity>>,
) {
    prefix.push(f.clone());
    if body.nullable() {
        out.insert(prefix.clone());
    }
    paths_of(body, prefix, scope, limit, out);
    prefix.pop();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log::testutil::act;
    use crate::tree::testutil::t;

    fn show(lang: &Language) -> BTreeSet<String> {
        lang.iter()
            .map(|tr| {
                tr.iter()
                    .map(|p| p.iter().map(Activity::as_str).collect::<Vec<_>>().join("."))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn loop_needs_one_body_execution() {
        let l = language(&t("loop(a, b)"), LangBound::new(5, 0)).unwrap();
        assert_eq!(show(&l), set(&["a", "a,b,a", "a,b,a,b,a"]));
    }

    #[test]
    fn operators() {
        let b = LangBound::new(4, 0);
        assert_eq!(show(&language(&t("seq(a, b)"), b).unwrap()), set(&["a,b"]));
        assert_eq!(show(&language(&t("xor(a, tau)"), b).unwrap()), set(&["", "a"]));
        assert_eq!(
            show(&language(&t("par(a, seq(b, c))"), b).unwrap()),
            set(&["a,b,c", "b,a,c", "b,c,a"])
        );
        assert_eq!(
            show(&language(&t("seq(a, b, c)"), LangBound::new(2, 0)).unwrap()),
            set(&[])
        );
    }

    #[test]
    fn named_subtree_prefixes_and_marks_empty_calls() {
        let b = LangBound::new(4, 0);
        assert_eq!(show(&language(&t("sub:f(seq(a, b))"), b).unwrap()), set(&["f.a,f.b"]));
        assert_eq!(
            show(&language(&t("sub:f(xor(a, tau))"), b).unwrap()),
            set(&["f", "f.a"])
        );
    }

    #[test]
    fn direct_recursion() {
        let l = language(&t("sub:f(xor(seq(a, rec:f), b))"), LangBound::new(3, 2)).unwrap();
        assert_eq!(show(&l), set(&["f.b", "f.a,f.f.b", "f.a,f.f.a,f.f.f.b"]));
    }

    #[test]
    fn nested_recursion() {
        let l = language(&t("sub:f(sub:g(xor(a, rec:f, rec:g)))"), LangBound::new(1, 1)).unwrap();
        assert!(show(&l).is_superset(&set(&["f.g.a", "f.g.g.a", "f.g.f.g.a"])));
        assert!(!show(&l).contains("f.g.g.g.a"));
    }

    #[test]
    fn recursion_to_an_empty_call() {
        let l = language(&t("sub:f(xor(rec:f, tau))"), LangBound::new(2, 2)).unwrap();
        assert_eq!(show(&l), set(&["f", "f.f", "f.f.f"]));
    }

    #[test]
    fn unbound_recursion_is_an_error() {
        assert_eq!(
            language(&t("seq(a, rec:f)"), LangBound::default()),
            Err(TreeError::UnboundRecursion("f".into()))
        );
        assert!(event_paths(&t("sub:g(rec:f)"), 1).is_err());
    }

    #[test]
    fn event_paths_cover_language_events() {
        let tree = t("sub:f(sub:g(xor(a, rec:f, rec:g, tau)))");
        let paths = event_paths(&tree, 2).unwrap();
        let lang = language(&tree, LangBound::new(2, 2)).unwrap();
        for tr in &lang {
            for p in tr {
                assert!(paths.contains(p), "{p:?}");
            }
        }
        assert!(paths.contains(&vec![act("f"), act("g")]));
    }
}
