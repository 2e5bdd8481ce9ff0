//! Membership and prefix acceptance without enumerating the language.
//!
//! The tree is flattened into an arena. A query descends over
//! `(node, subsequence of the trace's events, level)` with memoization; the
//! level is the index into each event path that the node is matched against.
//! Under a recursion limit the key also carries one budget per enclosing
//! `sub:f`.

use std::collections::HashMap;

use super::language::check_bound;
use super::{Operator, Tree};
use crate::error::TreeError;
use crate::log::{Activity, HierTrace};

/// Sentinel symbol for activities that do not occur in the tree.
const UNKNOWN: u32 = u32::MAX;

#[derive(Debug, Clone)]
enum Kind {
    Act,
    Silent,
    Op(Operator),
    Named,
    /// Target `sub:f` node and its index in this leaf's scope.
    Rec {
        target: usize,
        scope_index: usize,
    },
}

#[derive(Debug, Clone)]
struct Node {
    kind: Kind,
    children: Vec<usize>,
    nullable: bool,
    productive: bool,
    /// Sorted symbols that can appear at this node's own level.
    first: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct Acceptor {
    nodes: Vec<Node>,
    symbols: HashMap<Activity, u32>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Key {
    node: usize,
    seg: Vec<u16>,
    level: usize,
    budgets: Vec<usize>,
    prefix: bool,
}

impl Acceptor {
    pub fn new(tree: &Tree) -> Result<Self, TreeError> {
        check_bound(tree)?;
        let symbols: HashMap<Activity, u32> = tree
            .alphabet()
            .into_iter()
            .enumerate()
            .map(|(i, a)| (a, i as u32))
            .collect();
        let mut acc = Acceptor {
            nodes: Vec::new(),
            symbols,
        };
        acc.build(tree, &mut Vec::new());
        acc.fix_productive();
        Ok(acc)
    }

    /// Appends `t` and its subtree; `scope` holds enclosing named nodes with
    /// their names, outermost first.
    fn build(&mut self, t: &Tree, scope: &mut Vec<(usize, u32)>) -> usize {
        let id = self.nodes.len();
        let sym = |a: &Activity| self.symbols[a];
        let kind = match t {
            Tree::Activity(_) => Kind::Act,
            Tree::Silent => Kind::Silent,
            Tree::Op(op, _) => Kind::Op(*op),
            Tree::Named(..) => Kind::Named,
            Tree::Recursion(f) => {
                let s = sym(f);
                let scope_index = scope.iter().rposition(|&(_, g)| g == s).expect("bound checked");
                Kind::Rec {
                    target: scope[scope_index].0,
                    scope_index,
                }
            }
        };
        let first = match t {
            Tree::Activity(a) | Tree::Named(a, _) | Tree::Recursion(a) => vec![sym(a)],
            _ => Vec::new(),
        };
        self.nodes.push(Node {
            kind,
            children: Vec::new(),
            nullable: t.nullable(),
            productive: false,
            first,
        });
        if let Tree::Named(f, _) = t {
            scope.push((id, sym(f)));
        }
        let mut children = Vec::new();
        for c in t.children() {
            children.push(self.build(c, scope));
        }
        if let Tree::Named(..) = t {
            scope.pop();
        }
        if let Tree::Op(..) = t {
            let mut first: Vec<u32> = children
                .iter()
                .flat_map(|&c| self.nodes[c].first.iter().copied())
                .collect();
            first.sort_unstable();
            first.dedup();
            self.nodes[id].first = first;
        }
        self.nodes[id].children = children;
        id
    }

    /// Least fixpoint: a node is productive if its language is non-empty.
    fn fix_productive(&mut self) {
        loop {
            let mut changed = false;
            for i in 0..self.nodes.len() {
                if self.nodes[i].productive {
                    continue;
                }
                let n = &self.nodes[i];
                let p = |c: &usize| self.nodes[*c].productive;
                let now = match n.kind {
                    Kind::Act | Kind::Silent => true,
                    Kind::Named => p(&n.children[0]),
                    Kind::Rec { target, .. } => self.nodes[target].productive,
                    Kind::Op(Operator::Seq | Operator::Par) => n.children.iter().all(p),
                    Kind::Op(Operator::Xor) => n.children.iter().any(p),
                    Kind::Op(Operator::Loop) => p(&n.children[0]),
                };
                if now {
                    self.nodes[i].productive = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn encode(&self, trace: &[Vec<Activity>]) -> Vec<Vec<u32>> {
        trace
            .iter()
            .map(|p| {
                p.iter()
                    .map(|a| self.symbols.get(a).copied().unwrap_or(UNKNOWN))
                    .collect()
            })
            .collect()
    }

    fn run(&self, trace: &[Vec<Activity>], limit: Option<usize>, prefix: bool) -> bool {
        if trace.len() > u16::MAX as usize {
            return false;
        }
        let mut run = Run {
            acc: self,
            events: self.encode(trace),
            limit,
            memo: HashMap::new(),
        };
        let seg: Vec<u16> = (0..trace.len() as u16).collect();
        run.eval(0, &seg, 0, &[], prefix)
    }

    /// Whether the trace, given as event paths, is in the tree's language.
    pub fn accepts(&self, trace: &[Vec<Activity>]) -> bool {
        self.run(trace, None, false)
    }

    /// Like `accepts`, but every `sub:f` may be re-entered through `rec:f` at
    /// most `max_recursion_depth` times along one event; this is the
    /// recursion bound of `language`.
    pub fn accepts_bounded(&self, trace: &[Vec<Activity>], max_recursion_depth: usize) -> bool {
        self.run(trace, Some(max_recursion_depth), false)
    }

    /// Whether some extension of `prefix` is in the language.
    pub fn accepts_prefix(&self, prefix: &[Vec<Activity>]) -> bool {
        self.run(prefix, None, true)
    }

    pub fn accepts_trace(&self, trace: &HierTrace) -> bool {
        self.accepts(&trace.paths())
    }

    /// Whether the language is non-empty.
    pub fn productive(&self) -> bool {
        self.nodes[0].productive
    }
}

/// Membership of `trace` in the language of `tree`.
pub fn accepts(tree: &Tree, trace: &HierTrace) -> Result<bool, TreeError> {
    Ok(Acceptor::new(tree)?.accepts_trace(trace))
}

struct Run<'a> {
    acc: &'a Acceptor,
    events: Vec<Vec<u32>>,
    limit: Option<usize>,
    memo: HashMap<Key, bool>,
}

impl Run<'_> {
    fn eval(&mut self, node: usize, seg: &[u16], level: usize, budgets: &[usize], prefix: bool) -> bool {
        let n = &self.acc.nodes[node];
        if seg.is_empty() {
            return if prefix { n.productive } else { n.nullable };
        }
        let fits = seg.iter().all(|&e| {
            let p = &self.events[e as usize];
            p.len() > level && n.first.binary_search(&p[level]).is_ok()
        });
        if !fits {
            return false;
        }
        let key = Key {
            node,
            seg: seg.to_vec(),
            level,
            budgets: budgets.to_vec(),
            prefix,
        };
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let r = self.eval_uncached(node, seg, level, budgets, prefix);
        self.memo.insert(key, r);
        r
    }

    fn eval_uncached(&mut self, node: usize, seg: &[u16], level: usize, budgets: &[usize], prefix: bool) -> bool {
        let acc = self.acc;
        let n = &acc.nodes[node];
        match n.kind {
            Kind::Act => seg.len() == 1 && self.events[seg[0] as usize].len() == level + 1,
            Kind::Silent => false,
            Kind::Named => {
                let mut inner = budgets.to_vec();
                if let Some(d) = self.limit {
                    inner.push(d);
                }
                self.named(node, seg, level, &inner, prefix)
            }
            Kind::Rec { target, scope_index } => {
                let inner = match self.limit {
                    Some(_) => {
                        if budgets[scope_index] == 0 {
                            return false;
                        }
                        let mut v = budgets[..scope_index].to_vec();
                        v.push(budgets[scope_index] - 1);
                        v
                    }
                    None => Vec::new(),
                };
                self.named(target, seg, level, &inner, prefix)
            }
            Kind::Op(Operator::Xor) => n.children.iter().any(|&c| self.eval(c, seg, level, budgets, prefix)),
            Kind::Op(Operator::Seq) => self.seq(&n.children, seg, level, budgets, prefix),
            Kind::Op(Operator::Loop) => self.looped(&n.children, seg, level, budgets, prefix),
            Kind::Op(Operator::Par) => self.par(&n.children, seg, level, budgets, prefix),
        }
    }

    /// `seg` against the named node `node`, whose child runs under `inner`.
    fn named(&mut self, node: usize, seg: &[u16], level: usize, inner: &[usize], prefix: bool) -> bool {
        let child = self.acc.nodes[node].children[0];
        let lens: Vec<usize> = seg.iter().map(|&e| self.events[e as usize].len()).collect();
        if lens == [level + 1] {
            return self.acc.nodes[child].nullable;
        }
        if lens.iter().any(|&l| l == level + 1) {
            return false;
        }
        self.eval(child, seg, level + 1, inner, prefix)
    }

    fn seq(&mut self, cs: &[usize], seg: &[u16], level: usize, budgets: &[usize], prefix: bool) -> bool {
        let len = seg.len();
        let mut reach = vec![false; len + 1];
        reach[0] = true;
        for (k, &c) in cs.iter().enumerate() {
            if prefix && cs[k + 1..].iter().all(|&d| self.acc.nodes[d].productive) {
                for i in 0..=len {
                    if reach[i] && self.eval(c, &seg[i..], level, budgets, true) {
                        return true;
                    }
                }
            }
            let mut next = vec![false; len + 1];
            for i in 0..=len {
                if !reach[i] {
                    continue;
                }
                for j in i..=len {
                    if !next[j] && self.eval(c, &seg[i..j], level, budgets, false) {
                        next[j] = true;
                    }
                }
            }
            reach = next;
            if !reach.iter().any(|&b| b) {
                return false;
            }
        }
        !prefix && reach[len]
    }

    fn looped(&mut self, cs: &[usize], seg: &[u16], level: usize, budgets: &[usize], prefix: bool) -> bool {
        let len = seg.len();
        let (body, redos) = (cs[0], &cs[1..]);
        let mut starts = vec![false; len + 1];
        let mut ends = vec![false; len + 1];
        starts[0] = true;
        let mut start_queue = vec![0];
        let mut end_queue = Vec::new();
        while !start_queue.is_empty() || !end_queue.is_empty() {
            if let Some(i) = start_queue.pop() {
                for j in i..=len {
                    if !ends[j] && self.eval(body, &seg[i..j], level, budgets, false) {
                        ends[j] = true;
                        end_queue.push(j);
                    }
                }
            } else if let Some(j) = end_queue.pop() {
                for k in j..=len {
                    if starts[k] {
                        continue;
                    }
                    if redos.iter().any(|&r| self.eval(r, &seg[j..k], level, budgets, false)) {
                        starts[k] = true;
                        start_queue.push(k);
                    }
                }
            }
        }
        if !prefix {
            return ends[len];
        }
        for i in 0..=len {
            if starts[i] && self.eval(body, &seg[i..], level, budgets, true) {
                return true;
            }
        }
        if !self.acc.nodes[body].productive {
            return false;
        }
        for j in 0..=len {
            if ends[j] && redos.iter().any(|&r| self.eval(r, &seg[j..], level, budgets, true)) {
                return true;
            }
        }
        false
    }

    fn par(&mut self, cs: &[usize], seg: &[u16], level: usize, budgets: &[usize], prefix: bool) -> bool {
        let candidates: Vec<Vec<usize>> = seg
            .iter()
            .map(|&e| {
                let s = self.events[e as usize][level];
                (0..cs.len())
                    .filter(|&k| self.acc.nodes[cs[k]].first.binary_search(&s).is_ok())
                    .collect()
            })
            .collect();
        let mut parts = vec![Vec::new(); cs.len()];
        self.assign(cs, seg, &candidates, 0, &mut parts, level, budgets, prefix)
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &mut self,
        cs: &[usize],
        seg: &[u16],
        candidates: &[Vec<usize>],
        i: usize,
        parts: &mut Vec<Vec<u16>>,
        level: usize,
        budgets: &[usize],
        prefix: bool,
    ) -> bool {
        if i == seg.len() {
            return (0..cs.len()).all(|k| self.eval(cs[k], &parts[k], level, budgets, prefix));
        }
        for &k in &candidates[i] {
            parts[k].push(seg[i]);
            let ok = self.assign(cs, seg, candidates, i + 1, parts, level, budgets, prefix);
            parts[k].pop();
            if ok {
                return true;
            }
        }
        false
    }
}
