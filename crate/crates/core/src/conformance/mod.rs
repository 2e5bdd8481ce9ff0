//! Fitness, precision and directly-follows completeness, plus the seeded
//! generators behind the property suites.

pub mod evidence;
mod generate;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

pub use evidence::{log_evidence, required_evidence, Evidence, LevelEvidence};
pub use generate::{gen_complete_log, gen_model, random_log, random_tree, sample_log, RandomTreeOptions};

use crate::error::ConformanceError;
use crate::log::{Activity, HierLog};
use crate::tree::{event_paths, language, Acceptor, LangBound, Tree};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitnessReport {
    pub trace_fitness: f64,
    pub accepted: usize,
    pub rejected: usize,
    /// One verdict per trace, in log order.
    #[serde(skip)]
    pub verdicts: Vec<bool>,
}

/// Share of traces in the language of `tree`. An empty log fits perfectly.
pub fn fitness(tree: &Tree, log: &HierLog) -> Result<FitnessReport, ConformanceError> {
    let acc = Acceptor::new(tree)?;
    let verdicts: Vec<bool> = log.traces.par_iter().map(|t| acc.accepts_trace(t)).collect();
    let accepted = verdicts.iter().filter(|&&v| v).count();
    let rejected = verdicts.len() - accepted;
    let trace_fitness = if verdicts.is_empty() {
        1.0
    } else {
        accepted as f64 / verdicts.len() as f64
    };
    Ok(FitnessReport {
        trace_fitness,
        accepted,
        rejected,
        verdicts,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrecisionReport {
    pub precision: f64,
    pub visited_states: usize,
    pub escaping_edges: usize,
    pub enabled_edges: usize,
}

/// Escaping-edges precision. The states are the distinct trace prefixes of
/// the log that the model can still extend; at each state the enabled edges
/// are the events (and trace end) the model allows next, and an edge escapes
/// when no log trace takes it from that state. Candidate events are the
/// model's event paths up to `bound.max_recursion_depth` nested calls.
pub fn precision_estimate(tree: &Tree, log: &HierLog, bound: LangBound) -> Result<PrecisionReport, ConformanceError> {
    let acc = Acceptor::new(tree)?;
    let candidates: Vec<Vec<Activity>> = event_paths(tree, bound.max_recursion_depth)?.into_iter().collect();

    // state -> continuations seen in the log (None = trace end)
    let mut taken: BTreeMap<Vec<Vec<Activity>>, BTreeSet<Option<Vec<Activity>>>> = BTreeMap::new();
    for t in &log.traces {
        let paths = t.paths();
        for i in 0..=paths.len() {
            if !acc.accepts_prefix(&paths[..i]) {
                break;
            }
            taken
                .entry(paths[..i].to_vec())
                .or_default()
                .insert(paths.get(i).cloned());
        }
    }

    let counts: Vec<(usize, usize)> = taken
        .par_iter()
        .map(|(state, seen)| {
            let mut next = state.clone();
            let mut enabled = 0;
            let mut escaping = 0;
            for c in &candidates {
                next.push(c.clone());
                if acc.accepts_prefix(&next) {
                    enabled += 1;
                    escaping += usize::from(!seen.contains(&Some(c.clone())));
                }
                next.pop();
            }
            if acc.accepts(state) {
                enabled += 1;
                escaping += usize::from(!seen.contains(&None));
            }
            (enabled, escaping)
        })
        .collect();
    let enabled_edges: usize = counts.iter().map(|c| c.0).sum();
    let escaping_edges: usize = counts.iter().map(|c| c.1).sum();
    let precision = if enabled_edges == 0 {
        1.0
    } else {
        1.0 - escaping_edges as f64 / enabled_edges as f64
    };
    Ok(PrecisionReport {
        precision,
        visited_states: taken.len(),
        escaping_edges,
        enabled_edges,
    })
}

/// Whether `log` shows every activity, start, end and directly-follows pair
/// that `language(tree, bound)` shows, at every hierarchy level.
pub fn is_df_complete(log: &HierLog, tree: &Tree, bound: LangBound) -> Result<bool, ConformanceError> {
    let lang = language(tree, bound)?;
    Ok(log_evidence(log).covers(&evidence::traces_evidence(&lang)))
}
