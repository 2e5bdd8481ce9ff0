//! The discovery recursion over interned logs.
//!
//! Every distinct event suffix is interned once, so projecting a log one
//! level down maps each event to its tail id, and traces compare by content.
//! Symbols are numbered in name order.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use super::cut::find_cut;
use super::dfg::{filter_infrequent, Dfg};
use super::split::split_trace;
use crate::log::{Activity, HierLog, HierTrace};
use crate::tree::{reduce, Tree};

pub(crate) type Sym = u32;
pub(crate) type Ev = u32;
/// A multiset of traces with multiplicities.
pub(crate) type Mlog = BTreeMap<Vec<Ev>, u64>;

pub(crate) struct Table {
    pub syms: Vec<Activity>,
    head: Vec<Sym>,
    tail: Vec<Option<Ev>>,
    ids: HashMap<(Sym, Option<Ev>), Ev>,
}

impl Table {
    fn new(syms: Vec<Activity>) -> Self {
        Table {
            syms,
            head: Vec::new(),
            tail: Vec::new(),
            ids: HashMap::new(),
        }
    }

    fn sym(&self, a: &Activity) -> Sym {
        self.syms.binary_search(a).expect("symbol interned") as Sym
    }

    fn intern(&mut self, path: &[Sym]) -> Ev {
        let mut tail = None;
        for &s in path.iter().rev() {
            let next = self.head.len() as Ev;
            let id = *self.ids.entry((s, tail)).or_insert(next);
            if id == next {
                self.head.push(s);
                self.tail.push(tail);
            }
            tail = Some(id);
        }
        tail.expect("event paths are non-empty")
    }

    pub fn path(&self, mut e: Ev) -> Vec<Activity> {
        let mut out = vec![self.syms[self.head[e as usize] as usize].clone()];
        while let Some(t) = self.tail[e as usize] {
            out.push(self.syms[self.head[t as usize] as usize].clone());
            e = t;
        }
        out
    }

    fn head(&self, e: Ev) -> Sym {
        self.head[e as usize]
    }

    fn tail(&self, e: Ev) -> Option<Ev> {
        self.tail[e as usize]
    }

    fn act(&self, s: Sym) -> Activity {
        self.syms[s as usize].clone()
    }

    pub fn to_log(&self, log: &Mlog) -> HierLog {
        let mut out = HierLog::default();
        for (t, &c) in log {
            let trace = HierTrace::from_paths(t.iter().map(|&e| self.path(e)));
            for _ in 0..c {
                out.traces.push(trace.clone());
            }
        }
        out
    }
}

/// Interns `log`; with `flatten`, every event becomes a single activity named
/// by its dotted path.
pub(crate) fn intern_log(log: &HierLog, flatten: bool) -> (Table, Mlog) {
    if flatten && log.depth() > 1 {
        return intern_log(&log.flatten(), false);
    }
    // distinct paths first: events repeat a few paths many times over
    let mut local: FxHashMap<&[Activity], u32> = FxHashMap::default();
    let mut distinct: Vec<&[Activity]> = Vec::new();
    let traces: Vec<Vec<u32>> = log
        .traces
        .iter()
        .map(|t| {
            t.events
                .iter()
                .map(|e| {
                    *local.entry(e.path.as_slice()).or_insert_with(|| {
                        distinct.push(e.path.as_slice());
                        distinct.len() as u32 - 1
                    })
                })
                .collect()
        })
        .collect();
    let names: FxHashSet<&Activity> = distinct.iter().flat_map(|p| p.iter()).collect();
    let mut syms: Vec<Activity> = names.into_iter().cloned().collect();
    syms.sort_unstable();
    let index: FxHashMap<&str, Sym> = syms.iter().enumerate().map(|(i, a)| (a.as_str(), i as Sym)).collect();
    let mut table = Table::new(syms.clone());
    let ids: Vec<Ev> = distinct
        .iter()
        .map(|p| {
            let p: Vec<Sym> = p.iter().map(|a| index[a.as_str()]).collect();
            table.intern(&p)
        })
        .collect();
    let mut mlog = Mlog::new();
    for t in traces {
        *mlog
            .entry(t.into_iter().map(|i| ids[i as usize]).collect())
            .or_default() += 1;
    }
    (table, mlog)
}

/// Max-union: multiplicities become the maximum of both sides. Returns
/// whether `dst` grew.
pub(crate) fn max_union(dst: &mut Mlog, src: &Mlog) -> bool {
    let mut changed = false;
    for (t, &c) in src {
        let slot = dst.entry(t.clone()).or_default();
        if c > *slot {
            *slot = c;
            changed = true;
        }
    }
    changed
}

#[derive(Clone, Copy)]
enum Ctx<'c> {
    Naive,
    Rad(&'c [Sym]),
}

/// Output of one discovery run.
#[derive(Default)]
pub(crate) struct RunOut {
    pub contributions: Vec<(Vec<Sym>, Mlog)>,
    pub cut_recursions: usize,
    pub named_recursions: usize,
    pub calls: usize,
    /// Deepest nesting of cut and named-subtree recursions.
    pub max_nesting: usize,
}

pub(crate) struct Run<'a> {
    table: &'a Table,
    paths: f64,
    nesting: usize,
    pub out: RunOut,
}

impl<'a> Run<'a> {
    pub fn new(table: &'a Table, paths: f64) -> Self {
        Run {
            table,
            paths,
            nesting: 0,
            out: RunOut::default(),
        }
    }

    pub fn naive(&mut self, log: &Mlog) -> Tree {
        self.discover(log, Ctx::Naive)
    }

    fn project(&self, log: &Mlog) -> Mlog {
        let mut out = Mlog::new();
        for (t, &c) in log {
            let p: Vec<Ev> = t.iter().filter_map(|&e| self.table.tail(e)).collect();
            *out.entry(p).or_default() += c;
        }
        out
    }

    fn discover(&mut self, log: &Mlog, ctx: Ctx<'_>) -> Tree {
        self.out.calls += 1;
        let total: u64 = log.values().sum();
        let eps = log.get(&Vec::new()).copied().unwrap_or(0);
        if eps == total {
            return Tree::Silent;
        }
        if eps > 0 {
            let mut rest = log.clone();
            rest.remove(&Vec::new());
            if self.paths < 1.0 && (eps as f64) < (1.0 - self.paths) * total as f64 {
                return self.discover(&rest, ctx);
            }
            let child = self.discover(&rest, ctx);
            return Tree::xor(vec![child, Tree::Silent]);
        }

        let table = self.table;
        let f = table.head(log.keys().next().expect("non-empty log")[0]);
        let uniform = log.keys().flatten().all(|&e| table.head(e) == f);
        let mixing = log
            .keys()
            .any(|t| t.len() > 1 && t.iter().any(|&e| table.tail(e).is_none()));
        if uniform && !mixing {
            if let Ctx::Rad(c) = ctx {
                if let Some(pos) = c.iter().position(|&g| g == f) {
                    let projected = self.project(log);
                    self.out.contributions.push((c[..=pos].to_vec(), projected));
                    return Tree::Recursion(table.act(f));
                }
            }
            if log.keys().flatten().all(|&e| table.tail(e).is_none()) {
                return Tree::Activity(table.act(f));
            }
            let projected = self.project(log);
            return self.named(f, projected, ctx);
        }

        let dfg = self.dfg(log);
        let filtered;
        let graph = if self.paths >= 1.0 {
            &dfg
        } else {
            filtered = filter_infrequent(&dfg, self.paths);
            &filtered
        };
        if let Some(cut) = find_cut(graph).expect("non-empty graph") {
            self.out.cut_recursions += 1;
            let block: HashMap<Sym, usize> = cut
                .partition
                .iter()
                .enumerate()
                .flat_map(|(i, b)| b.iter().map(move |&s| (s, i)))
                .collect();
            let n = cut.partition.len();
            let mut sublogs = vec![Mlog::new(); n];
            for (t, &c) in log {
                let pieces = split_trace(cut.op, n, t, |&e| block[&table.head(e)]);
                for (k, ps) in pieces.into_iter().enumerate() {
                    for p in ps {
                        *sublogs[k].entry(p).or_default() += c;
                    }
                }
            }
            let children = sublogs.iter().map(|s| self.nested(s, ctx)).collect();
            return Tree::Op(cut.op, children);
        }
        self.flower(log, &dfg.nodes, ctx)
    }

    /// Level-1 graph; counts go through hash maps, which is much cheaper per
    /// event than ordered maps, and are ordered once at the end.
    fn dfg(&self, log: &Mlog) -> Dfg<Sym> {
        let table = self.table;
        let mut edges: FxHashMap<(Sym, Sym), u64> = FxHashMap::default();
        let mut starts: FxHashMap<Sym, u64> = FxHashMap::default();
        let mut ends: FxHashMap<Sym, u64> = FxHashMap::default();
        let mut nodes: FxHashSet<Sym> = FxHashSet::default();
        for (t, &c) in log {
            let (Some(&first), Some(&last)) = (t.first(), t.last()) else {
                continue;
            };
            *starts.entry(table.head(first)).or_default() += c;
            *ends.entry(table.head(last)).or_default() += c;
            let mut prev = table.head(first);
            nodes.insert(prev);
            for &e in &t[1..] {
                let h = table.head(e);
                nodes.insert(h);
                *edges.entry((prev, h)).or_default() += c;
                prev = h;
            }
        }
        Dfg {
            nodes: nodes.into_iter().collect(),
            edges: edges.into_iter().collect(),
            starts: starts.into_iter().collect(),
            ends: ends.into_iter().collect(),
            empty_traces: log.get(&Vec::new()).copied().unwrap_or(0),
        }
    }

    fn nested(&mut self, log: &Mlog, ctx: Ctx<'_>) -> Tree {
        self.nesting += 1;
        self.out.max_nesting = self.out.max_nesting.max(self.nesting);
        let tree = self.discover(log, ctx);
        self.nesting -= 1;
        tree
    }

    /// `sub:f` over the projected log: discovered now (naive) or deferred to
    /// the context extended by `f`.
    fn named(&mut self, f: Sym, projected: Mlog, ctx: Ctx<'_>) -> Tree {
        let name = self.table.act(f);
        match ctx {
            Ctx::Naive => {
                self.out.named_recursions += 1;
                let child = self.nested(&projected, Ctx::Naive);
                Tree::Named(name, Box::new(child))
            }
            Ctx::Rad(c) => {
                let mut next = c.to_vec();
                next.push(f);
                self.out.contributions.push((next, projected));
                Tree::Named(name, Box::new(Tree::Silent))
            }
        }
    }

    /// `loop(xor(branch per symbol, tau), tau)`; each branch covers the
    /// symbol's events as single-event traces.
    fn flower(&mut self, log: &Mlog, alphabet: &BTreeSet<Sym>, ctx: Ctx<'_>) -> Tree {
        let table = self.table;
        let mut branches = Vec::new();
        for &a in alphabet {
            let mut singles = Mlog::new();
            for (t, &c) in log {
                for &e in t.iter().filter(|&&e| table.head(e) == a) {
                    let single: Vec<Ev> = table.tail(e).into_iter().collect();
                    *singles.entry(single).or_default() += c;
                }
            }
            if let Ctx::Rad(c) = ctx {
                if let Some(pos) = c.iter().position(|&g| g == a) {
                    self.out.contributions.push((c[..=pos].to_vec(), singles));
                    branches.push(Tree::Recursion(table.act(a)));
                    continue;
                }
            }
            if singles.keys().all(Vec::is_empty) {
                branches.push(Tree::Activity(table.act(a)));
            } else {
                branches.push(self.named(a, singles, ctx));
            }
        }
        Tree::flower(branches)
    }
}

/// Counters collected by a recursion-aware run.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct RadStats {
    /// Fixpoint rounds.
    pub rounds: usize,
    /// Single-run discoveries over all rounds.
    pub runs: usize,
    /// Largest number of cut applications in any single run.
    pub max_cut_recursions: usize,
    /// Per context path, how often its sublog grew. Creating a sublog counts
    /// as growth; the input at the root does not.
    pub changes: BTreeMap<Vec<Activity>, usize>,
}

/// Fixpoint scheduling options.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RadOptions {
    /// Discover the dirty contexts of a round on the rayon pool.
    pub parallel: bool,
    /// Shuffle each round's schedule and merge order with this seed.
    pub shuffle_seed: Option<u64>,
    /// Keep a copy of every sublog after each round.
    pub record_rounds: bool,
}

pub(crate) struct Entry {
    pub log: Mlog,
    pub model: Option<Tree>,
    dirty: bool,
    pub changes: usize,
}

pub(crate) struct RadRun {
    pub tree: Tree,
    pub store: BTreeMap<Vec<Sym>, Entry>,
    pub stats: RadStats,
    pub rounds: Vec<BTreeMap<Vec<Sym>, Mlog>>,
}

pub(crate) fn rad(table: &Table, input: Mlog, paths: f64, options: RadOptions) -> RadRun {
    let mut store: BTreeMap<Vec<Sym>, Entry> = BTreeMap::new();
    store.insert(
        Vec::new(),
        Entry {
            log: input,
            model: None,
            dirty: true,
            changes: 0,
        },
    );
    let mut stats = RadStats::default();
    let mut rng = options.shuffle_seed.map(ChaCha8Rng::seed_from_u64);
    let mut rounds = Vec::new();
    loop {
        let mut dirty: Vec<Vec<Sym>> = store.iter().filter(|(_, e)| e.dirty).map(|(c, _)| c.clone()).collect();
        if dirty.is_empty() {
            break;
        }
        stats.rounds += 1;
        dirty.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        if let Some(rng) = rng.as_mut() {
            dirty.shuffle(rng);
        }
        let job = |ctx: &Vec<Sym>| {
            let mut run = Run::new(table, paths);
            let tree = run.discover(&store[ctx].log, Ctx::Rad(ctx));
            (ctx.clone(), tree, run.out)
        };
        let mut results: Vec<(Vec<Sym>, Tree, RunOut)> = if options.parallel {
            dirty.par_iter().map(job).collect()
        } else {
            dirty.iter().map(job).collect()
        };
        if let Some(rng) = rng.as_mut() {
            results.shuffle(rng);
        }
        let mut grown = BTreeSet::new();
        for (ctx, tree, out) in results {
            stats.runs += 1;
            stats.max_cut_recursions = stats.max_cut_recursions.max(out.cut_recursions);
            let entry = store.get_mut(&ctx).expect("scheduled contexts exist");
            entry.model = Some(tree);
            entry.dirty = false;
            for (target, log) in out.contributions {
                let e = store.entry(target.clone()).or_insert_with(|| Entry {
                    log: Mlog::new(),
                    model: None,
                    dirty: false,
                    changes: 0,
                });
                if max_union(&mut e.log, &log) {
                    grown.insert(target);
                }
            }
        }
        for ctx in grown {
            let e = store.get_mut(&ctx).expect("grown contexts exist");
            e.dirty = true;
            e.changes += 1;
        }
        if options.record_rounds {
            rounds.push(store.iter().map(|(c, e)| (c.clone(), e.log.clone())).collect());
        }
    }
    stats.changes = store
        .iter()
        .map(|(c, e)| (c.iter().map(|&s| table.act(s)).collect(), e.changes))
        .collect();
    let tree = reduce(&glue(table, &store, &[]));
    RadRun {
        tree,
        store,
        stats,
        rounds,
    }
}

/// Replaces every placeholder `sub:f` in `model(ctx)` by the glued model of
/// `ctx·f`.
fn glue(table: &Table, store: &BTreeMap<Vec<Sym>, Entry>, ctx: &[Sym]) -> Tree {
    fn go(t: &Tree, table: &Table, store: &BTreeMap<Vec<Sym>, Entry>, ctx: &[Sym]) -> Tree {
        match t {
            Tree::Named(f, _) => {
                let mut next = ctx.to_vec();
                next.push(table.sym(f));
                Tree::Named(f.clone(), Box::new(glue(table, store, &next)))
            }
            Tree::Op(op, cs) => Tree::Op(*op, cs.iter().map(|c| go(c, table, store, ctx)).collect()),
            other => other.clone(),
        }
    }
    let model = store[ctx].model.as_ref().expect("every context is discovered");
    go(model, table, store, ctx)
}
