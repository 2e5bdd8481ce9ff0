//! Directly-follows graphs over the first level of a hierarchical log.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::log::{Activity, HierLog};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dfg<N: Ord = Activity> {
    pub nodes: BTreeSet<N>,
    pub edges: BTreeMap<(N, N), u64>,
    pub starts: BTreeMap<N, u64>,
    pub ends: BTreeMap<N, u64>,
    /// Number of ε traces; they contribute no nodes.
    pub empty_traces: u64,
}

impl<N: Ord> Default for Dfg<N> {
    fn default() -> Self {
        Dfg {
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
            starts: BTreeMap::new(),
            ends: BTreeMap::new(),
            empty_traces: 0,
        }
    }
}

impl<N: Ord + Clone> Dfg<N> {
    /// Adds one trace, given as its symbol sequence, `count` times.
    pub fn add_trace(&mut self, symbols: &[N], count: u64) {
        let (Some(first), Some(last)) = (symbols.first(), symbols.last()) else {
            self.empty_traces += count;
            return;
        };
        *self.starts.entry(first.clone()).or_default() += count;
        *self.ends.entry(last.clone()).or_default() += count;
        for s in symbols {
            if !self.nodes.contains(s) {
                self.nodes.insert(s.clone());
            }
        }
        for w in symbols.windows(2) {
            *self.edges.entry((w[0].clone(), w[1].clone())).or_default() += count;
        }
    }

    pub fn has_edge(&self, a: &N, b: &N) -> bool {
        self.edges.contains_key(&(a.clone(), b.clone()))
    }
}

/// Graph of the level-1 activities of `log`.
pub fn build_dfg(log: &HierLog) -> Dfg {
    let mut dfg = Dfg::default();
    for trace in &log.traces {
        let symbols: Vec<Activity> = trace.events.iter().map(|e| e.path[0].clone()).collect();
        dfg.add_trace(&symbols, 1);
    }
    dfg
}

/// Keeps an outgoing edge `(a, b)` iff its count reaches `(1 - paths)` times
/// the largest outgoing count of `a`; starts and ends are filtered against
/// their own maxima. Nodes are never removed.
pub fn filter_infrequent<N: Ord + Clone>(dfg: &Dfg<N>, paths: f64) -> Dfg<N> {
    if paths >= 1.0 {
        return dfg.clone();
    }
    let keep = 1.0 - paths;
    let mut max_out: BTreeMap<&N, u64> = BTreeMap::new();
    for ((a, _), &c) in &dfg.edges {
        let m = max_out.entry(a).or_default();
        *m = (*m).max(c);
    }
    let edges = dfg
        .edges
        .iter()
        .filter(|((a, _), &c)| c as f64 >= keep * max_out[a] as f64)
        .map(|(k, &c)| (k.clone(), c))
        .collect();
    let filter_map = |m: &BTreeMap<N, u64>| {
        let max = m.values().copied().max().unwrap_or(0);
        m.iter()
            .filter(|(_, &c)| c as f64 >= keep * max as f64)
            .map(|(k, &c)| (k.clone(), c))
            .collect()
    };
    Dfg {
        nodes: dfg.nodes.clone(),
        edges,
        starts: filter_map(&dfg.starts),
        ends: filter_map(&dfg.ends),
        empty_traces: dfg.empty_traces,
    }
}
