//! Seeded random trees and logs.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::evidence::{required_evidence, traces_evidence};
use crate::error::{ConformanceError, TreeError};
use crate::log::{Activity, HierLog, HierTrace};
use crate::tree::{language, language_within, start_end_symbols, validate, LangBound, Operator, Tree};

/// Shape of [`random_tree`]. Trees are always productive: a recursion leaf
/// only appears where an `xor` or a loop redo lets the run avoid it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomTreeOptions {
    pub max_leaves: usize,
    /// Activities are drawn from the first `alphabet` letters, so names repeat.
    pub alphabet: usize,
    pub named: bool,
    pub recursion: bool,
    pub silent: bool,
}

impl Default for RandomTreeOptions {
    fn default() -> Self {
        RandomTreeOptions {
            max_leaves: 6,
            alphabet: 5,
            named: true,
            recursion: true,
            silent: true,
        }
    }
}

const MAX_NAMED_DEPTH: usize = 3;
const NAME_POOL: [&str; 3] = ["f", "g", "h"];

struct Gen {
    rng: ChaCha8Rng,
    opts: RandomTreeOptions,
    /// Fresh names for every leaf and subtree, no silent leaves.
    restricted: bool,
    fresh: usize,
    /// Enclosing subtree names and whether a recursion leaf already targets them.
    scope: Vec<(Activity, bool)>,
}

impl Gen {
    fn fresh(&mut self, prefix: &str) -> Activity {
        self.fresh += 1;
        act(&format!("{prefix}{}", self.fresh - 1))
    }

    fn activity(&mut self) -> Activity {
        if self.restricted {
            self.fresh("a")
        } else {
            let i = self.rng.gen_range(0..self.opts.alphabet.max(1));
            act(&((b'a' + (i % 26) as u8) as char).to_string())
        }
    }

    fn name(&mut self) -> Activity {
        if self.restricted {
            self.fresh("f")
        } else {
            act(NAME_POOL[self.rng.gen_range(0..NAME_POOL.len())])
        }
    }

    fn recursion_target(&mut self) -> Option<Activity> {
        let open: Vec<usize> = (0..self.scope.len())
            .filter(|&i| !(self.restricted && self.scope[i].1))
            .collect();
        if open.is_empty() {
            return None;
        }
        let i = open[self.rng.gen_range(0..open.len())];
        self.scope[i].1 = true;
        Some(self.scope[i].0.clone())
    }

    fn named(&mut self, leaves: usize) -> Tree {
        let f = self.name();
        self.scope.push((f.clone(), false));
        // every named subtree must be productive on its own, so a recursion
        // leaf needs an escape inside the innermost subtree
        let body = self.node(leaves, false);
        self.scope.pop();
        Tree::Named(f, Box::new(body))
    }

    fn can_name(&self) -> bool {
        self.opts.named && self.scope.len() < MAX_NAMED_DEPTH
    }

    /// A tree with exactly `leaves` activity or recursion leaves.
    fn node(&mut self, leaves: usize, avoidable: bool) -> Tree {
        if leaves <= 1 {
            let roll: f64 = self.rng.gen();
            if self.opts.recursion && avoidable && roll < 0.3 {
                if let Some(f) = self.recursion_target() {
                    return Tree::Recursion(f);
                }
            }
            if self.can_name() && roll < 0.5 {
                return self.named(1);
            }
            if self.opts.silent && !self.restricted && roll > 0.9 {
                return Tree::Silent;
            }
            return Tree::Activity(self.activity());
        }
        let ops = if self.can_name() { 5 } else { 4 };
        match self.rng.gen_range(0..ops) {
            0 => self.operator(Operator::Seq, leaves, avoidable),
            1 => self.operator(Operator::Xor, leaves, avoidable),
            2 => self.operator(Operator::Par, leaves, avoidable),
            3 => self.looped(leaves, avoidable),
            _ => self.named(leaves),
        }
    }

    fn split(&mut self, leaves: usize, parts: usize) -> Vec<usize> {
        let mut sizes = vec![1; parts];
        for _ in parts..leaves {
            let i = self.rng.gen_range(0..parts);
            sizes[i] += 1;
        }
        sizes
    }

    fn operator(&mut self, op: Operator, leaves: usize, avoidable: bool) -> Tree {
        let parts = self.rng.gen_range(2..=leaves.min(3));
        let sizes = self.split(leaves, parts);
        let children = sizes
            .into_iter()
            .enumerate()
            .map(|(i, n)| self.node(n, avoidable || (op == Operator::Xor && i > 0)))
            .collect();
        Tree::Op(op, children)
    }

    fn looped(&mut self, leaves: usize, avoidable: bool) -> Tree {
        // a rediscoverable body needs disjoint start and end activities
        let body_min = if self.restricted { 2 } else { 1 };
        if leaves < body_min + 1 {
            return self.operator(Operator::Seq, leaves, avoidable);
        }
        let body_leaves = self.rng.gen_range(body_min..leaves);
        let body = if self.restricted {
            let sizes = self.split(body_leaves, 2);
            Tree::seq(sizes.into_iter().map(|n| self.node(n, avoidable)).collect())
        } else {
            self.node(body_leaves, avoidable)
        };
        let redo_leaves = leaves - body_leaves;
        let redos = self.rng.gen_range(1..=redo_leaves.min(2));
        let mut children = vec![body];
        for n in self.split(redo_leaves, redos) {
            children.push(self.node(n, true));
        }
        Tree::looped(children)
    }
}

fn act(name: &str) -> Activity {
    Activity::new(name).expect("generated names are valid")
}

/// A random, possibly non-rediscoverable tree: names repeat, silent leaves
/// occur, and recursion leaves may target any enclosing subtree.
pub fn random_tree(seed: u64, opts: &RandomTreeOptions) -> Tree {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        opts: opts.clone(),
        restricted: false,
        fresh: 0,
        scope: Vec::new(),
    };
    let leaves = g.rng.gen_range(1..=opts.max_leaves.max(1));
    g.node(leaves, false)
}

/// A random tree of the rediscoverable class with at most `size` leaves:
/// fresh names everywhere, no silent leaves, loop bodies with disjoint start
/// and end activities, and at most one recursion leaf per subtree name.
pub fn gen_model(seed: u64, size: usize) -> Tree {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        opts: RandomTreeOptions::default(),
        restricted: true,
        fresh: 0,
        scope: Vec::new(),
    };
    loop {
        g.fresh = 0;
        let leaves = g.rng.gen_range(1..=size.max(1));
        let tree = g.node(leaves, false);
        if validate(&tree).is_empty() && loop_bodies_disjoint(&tree) {
            return tree;
        }
    }
}

fn loop_bodies_disjoint(tree: &Tree) -> bool {
    match tree {
        Tree::Op(Operator::Loop, cs) => {
            let (s, e) = start_end_symbols(&cs[0]);
            s.is_disjoint(&e) && cs.iter().all(loop_bodies_disjoint)
        }
        _ => tree.children().iter().all(loop_bodies_disjoint),
    }
}

/// Languages larger than this are not sampled by [`random_log`].
const SAMPLE_LIMIT: usize = 20_000;

/// Up to `max_traces` distinct traces drawn uniformly from the bounded
/// language, in language order.
pub fn sample_log(tree: &Tree, bound: LangBound, max_traces: usize, seed: u64) -> Result<HierLog, TreeError> {
    let lang = language(tree, bound)?;
    Ok(pick(lang, max_traces, seed))
}

fn pick(lang: crate::tree::Language, max_traces: usize, seed: u64) -> HierLog {
    let lang: Vec<_> = lang.into_iter().collect();
    let mut picked: Vec<usize> = if lang.len() <= max_traces {
        (0..lang.len()).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sample(&mut rng, lang.len(), max_traces).into_vec()
    };
    picked.sort_unstable();
    picked
        .into_iter()
        .map(|i| HierTrace::from_paths(lang[i].clone()))
        .collect()
}

/// A random tree together with a non-empty sample of its bounded language.
/// Trees whose bounded language is empty or too large to enumerate are
/// skipped in favor of the next candidate.
pub fn random_log(seed: u64, opts: &RandomTreeOptions, bound: LangBound, max_traces: usize) -> (Tree, HierLog) {
    for attempt in 0.. {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(attempt);
        let tree = random_tree(s, opts);
        let lang = language_within(&tree, bound, SAMPLE_LIMIT).expect("generated trees are bound");
        if let Some(lang) = lang.filter(|l| !l.is_empty()) {
            return (tree, pick(lang, max_traces, s));
        }
    }
    unreachable!()
}

/// Hard cap on the trace length tried by [`gen_complete_log`].
pub const COMPLETENESS_CAP: usize = 64;

/// The bounded language as a log, with the bound doubled until the log shows
/// all the directly-follows evidence of the unbounded language.
pub fn gen_complete_log(tree: &Tree, bound: LangBound) -> Result<HierLog, ConformanceError> {
    let required = required_evidence(tree);
    let mut b = bound;
    loop {
        let lang = language(tree, b)?;
        if traces_evidence(&lang).covers(&required) {
            return Ok(lang.into_iter().map(HierTrace::from_paths).collect());
        }
        if b.max_trace_len * 2 > COMPLETENESS_CAP {
            return Err(ConformanceError::CompletenessUnreachable { cap: COMPLETENESS_CAP });
        }
        b = LangBound::new(b.max_trace_len * 2, (b.max_recursion_depth * 2).max(1));
    }
}
