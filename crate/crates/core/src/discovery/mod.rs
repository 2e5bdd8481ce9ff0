//! Process discovery on hierarchical logs.
//!
//! All three modes share one divide-and-conquer recursion: base cases, a test
//! for a uniform first-level activity `f`, cut detection on the first-level
//! directly-follows graph, and a flower model when no cut exists.
//!
//! - `naive` turns a uniform `f` into `sub:f` and recurses on the log
//!   projected one level down.
//! - `rad` defers that recursion. The projected log is merged into the
//!   sublog of the context path extended by `f`; when `f` already occurs on
//!   the context path the node becomes `rec:f` and the projected log is
//!   merged into the sublog of the path up to `f`. Sublogs are rediscovered
//!   until none of them grows, then the models are glued together.
//! - `flat` renames every event to its dotted path and runs `naive` on the
//!   resulting one-level log.

mod cut;
mod dfg;
mod engine;
mod split;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use cut::{find_cut, Cut};
pub use dfg::{build_dfg, filter_infrequent, Dfg};
pub use engine::{RadOptions, RadStats};
pub use split::{split_log, split_trace};

use crate::error::DiscoveryError;
use crate::log::{Activity, HierLog};
use crate::tree::{reduce, Tree};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Naive,
    #[default]
    Rad,
    Flat,
}

impl std::str::FromStr for Mode {
    type Err = DiscoveryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Mode::Naive),
            "rad" => Ok(Mode::Rad),
            "flat" => Ok(Mode::Flat),
            _ => Err(DiscoveryError::InvalidConfig(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryConfig {
    /// Share of directly-follows behavior to keep; 1.0 keeps everything.
    pub paths: f64,
    #[serde(default)]
    pub mode: Mode,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        DiscoveryConfig {
            paths: 1.0,
            mode: Mode::Rad,
        }
    }
}

impl DiscoveryConfig {
    pub fn new(mode: Mode, paths: f64) -> Self {
        DiscoveryConfig { paths, mode }
    }

    pub fn validate(&self) -> Result<(), DiscoveryError> {
        if (0.0..=1.0).contains(&self.paths) {
            Ok(())
        } else {
            Err(DiscoveryError::InvalidConfig(format!(
                "paths must lie in [0, 1], got {}",
                self.paths
            )))
        }
    }
}

/// Counters of a naive run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NaiveStats {
    pub calls: usize,
    pub cut_recursions: usize,
    pub named_recursions: usize,
    /// Deepest nesting of cut and named-subtree recursions.
    pub max_nesting: usize,
}

pub fn naive_discover(log: &HierLog, config: &DiscoveryConfig) -> Tree {
    naive_discover_traced(log, config).0
}

pub fn naive_discover_traced(log: &HierLog, config: &DiscoveryConfig) -> (Tree, NaiveStats) {
    let (table, mlog) = engine::intern_log(log, false);
    let mut run = engine::Run::new(&table, config.paths);
    let tree = reduce(&run.naive(&mlog));
    let stats = NaiveStats {
        calls: run.out.calls,
        cut_recursions: run.out.cut_recursions,
        named_recursions: run.out.named_recursions,
        max_nesting: run.out.max_nesting,
    };
    (tree, stats)
}

/// Discovery on [`HierLog::flatten`]; the model describes the flattened log.
pub fn flat_discover(log: &HierLog, config: &DiscoveryConfig) -> Tree {
    let (table, mlog) = engine::intern_log(log, true);
    reduce(&engine::Run::new(&table, config.paths).naive(&mlog))
}

pub fn rad_discover(log: &HierLog, config: &DiscoveryConfig) -> Tree {
    let (table, mlog) = engine::intern_log(log, false);
    engine::rad(&table, mlog, config.paths, RadOptions::default()).tree
}

/// Dispatches on `config.mode`.
pub fn discover(log: &HierLog, config: &DiscoveryConfig) -> Tree {
    match config.mode {
        Mode::Naive => naive_discover(log, config),
        Mode::Rad => rad_discover(log, config),
        Mode::Flat => flat_discover(log, config),
    }
}

/// Result of a recursion-aware run with its final sublogs.
#[derive(Clone, Debug)]
pub struct RadOutcome {
    pub tree: Tree,
    pub store: SublogStore,
    pub stats: RadStats,
    /// Sublogs after each round, when [`RadOptions::record_rounds`] is set.
    pub rounds: Vec<BTreeMap<Vec<Activity>, HierLog>>,
}

pub fn rad_discover_traced(log: &HierLog, config: &DiscoveryConfig, options: RadOptions) -> RadOutcome {
    let (table, mlog) = engine::intern_log(log, false);
    let run = engine::rad(&table, mlog, config.paths, options);
    let entries = run
        .store
        .iter()
        .map(|(ctx, e)| {
            let path: Vec<Activity> = ctx.iter().map(|&s| table.syms[s as usize].clone()).collect();
            let entry = SublogEntry {
                sublog: table.to_log(&e.log),
                model: e.model.clone(),
                changes: e.changes,
            };
            (path, entry)
        })
        .collect();
    let name =
        |ctx: &Vec<engine::Sym>| -> Vec<Activity> { ctx.iter().map(|&s| table.syms[s as usize].clone()).collect() };
    let rounds = run
        .rounds
        .iter()
        .map(|r| r.iter().map(|(c, l)| (name(c), table.to_log(l))).collect())
        .collect();
    RadOutcome {
        tree: run.tree,
        store: SublogStore { entries },
        stats: run.stats,
        rounds,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SublogEntry {
    /// Traces in sorted order, repeated by multiplicity.
    pub sublog: HierLog,
    /// The model of the last run, with unglued `sub:f` placeholders.
    pub model: Option<Tree>,
    pub changes: usize,
}

/// Final sublogs L(C) keyed by context path C.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SublogStore {
    pub entries: BTreeMap<Vec<Activity>, SublogEntry>,
}

impl SublogStore {
    pub fn get(&self, context: &[&str]) -> Option<&SublogEntry> {
        self.entries
            .iter()
            .find(|(k, _)| k.iter().map(Activity::as_str).eq(context.iter().copied()))
            .map(|(_, e)| e)
    }

    /// `[{"context": [...], "traces": [["f.a", ...], ...], "model": "..."}]`
    pub fn to_json(&self) -> serde_json::Value {
        let items: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|(ctx, e)| {
                let traces: Vec<Vec<String>> = e
                    .sublog
                    .traces
                    .iter()
                    .map(|t| t.events.iter().map(ToString::to_string).collect())
                    .collect();
                serde_json::json!({
                    "context": ctx.iter().map(Activity::as_str).collect::<Vec<_>>(),
                    "traces": traces,
                    "model": e.model.as_ref().map(Tree::to_notation),
                })
            })
            .collect();
        serde_json::Value::Array(items)
    }
}

/// The base cases alone: all traces ε gives `tau`; all traces the single
/// one-level event `a` gives `a`; a mix of both gives `xor(a, tau)`. Under
/// `paths < 1` an ε share below `1 - paths` is dropped first.
pub fn discover_base_case(log: &HierLog, paths: f64) -> Option<Tree> {
    let total = log.len();
    if total == 0 {
        return None;
    }
    let eps = log.traces.iter().filter(|t| t.is_empty()).count();
    let drop_eps = eps > 0 && paths < 1.0 && (eps as f64) < (1.0 - paths) * total as f64;
    if eps == total {
        return Some(Tree::Silent);
    }
    let mut single = None;
    for t in log.traces.iter().filter(|t| !t.is_empty()) {
        let [e] = t.events.as_slice() else { return None };
        if e.path.len() != 1 || single.is_some_and(|a: &Activity| *a != e.path[0]) {
            return None;
        }
        single = Some(&e.path[0]);
    }
    let leaf = Tree::Activity(single?.clone());
    Some(if eps == 0 || drop_eps {
        leaf
    } else {
        Tree::xor(vec![leaf, Tree::Silent])
    })
}
