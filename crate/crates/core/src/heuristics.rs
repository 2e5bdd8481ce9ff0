//! Heuristics that lift a flat log into a hierarchical one.
//!
//! * Nested calls: start/complete pairs form intervals; containment gives the
//!   hierarchy. Only innermost intervals (calls without sub-calls) become
//!   events, with the enclosing calls as their path prefix.
//! * Structured names: split activity names on a separator.
//! * Attribute combination: prepend selected attribute values to the path.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::HeuristicError;
use crate::log::{keys, Activity, Event, HierLog, HierTrace};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicKind {
    #[default]
    None,
    NestedCalls,
    StructuredNames,
    AttributeCombination,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicConfig {
    pub kind: HeuristicKind,
    #[serde(default = "default_separator")]
    pub separator: String,
    #[serde(default)]
    pub attr_keys: Vec<String>,
}

fn default_separator() -> String {
    ".".to_string()
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            kind: HeuristicKind::None,
            separator: default_separator(),
            attr_keys: Vec::new(),
        }
    }
}

impl HeuristicConfig {
    pub fn of(kind: HeuristicKind) -> Self {
        HeuristicConfig {
            kind,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), HeuristicError> {
        match self.kind {
            HeuristicKind::StructuredNames if self.separator.is_empty() => {
                Err(HeuristicError::InvalidConfig("separator must not be empty".into()))
            }
            HeuristicKind::AttributeCombination if self.attr_keys.is_empty() => {
                Err(HeuristicError::InvalidConfig("attr_keys must not be empty".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn apply(&self, log: &HierLog) -> Result<HierLog, HeuristicError> {
        self.validate()?;
        match self.kind {
            HeuristicKind::None => Ok(log.clone()),
            HeuristicKind::NestedCalls => nested_calls(log),
            HeuristicKind::StructuredNames => structured_names(log, &self.separator),
            HeuristicKind::AttributeCombination => attribute_combination(log, &self.attr_keys),
        }
    }
}

/// Runs `f` over all traces in parallel; output order and the reported error
/// (the first failing trace) do not depend on scheduling.
fn per_trace<F>(log: &HierLog, f: F) -> Result<HierLog, HeuristicError>
where
    F: Fn(usize, &HierTrace) -> Result<HierTrace, HeuristicError> + Sync,
{
    let results: Vec<_> = log.traces.par_iter().enumerate().map(|(i, t)| f(i, t)).collect();
    results.into_iter().collect::<Result<Vec<_>, _>>().map(HierLog::new)
}

#[derive(Debug)]
struct Interval {
    label: Vec<Activity>,
    start: usize,
    parent: Option<usize>,
    has_children: bool,
    start_attrs: BTreeMap<String, String>,
    complete_ts: Option<String>,
}

pub fn nested_calls(log: &HierLog) -> Result<HierLog, HeuristicError> {
    per_trace(log, nested_calls_trace)
}

fn nested_calls_trace(ti: usize, trace: &HierTrace) -> Result<HierTrace, HeuristicError> {
    let mut intervals: Vec<Interval> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    for (pos, event) in trace.events.iter().enumerate() {
        let unbalanced = |reason: String| HeuristicError::UnbalancedLifecycle {
            trace: ti,
            position: pos,
            reason,
        };
        match event.attr(keys::LIFECYCLE) {
            None => {
                return Err(HeuristicError::MissingLifecycle {
                    trace: ti,
                    position: pos,
                })
            }
            Some("start") => {
                let parent = open.last().copied();
                if let Some(p) = parent {
                    intervals[p].has_children = true;
                }
                let mut attrs = event.attrs.clone();
                attrs.remove(keys::LIFECYCLE);
                if let Some(ts) = attrs.remove(keys::TIMESTAMP) {
                    attrs.insert(keys::START_TIMESTAMP.to_string(), ts);
                }
                intervals.push(Interval {
                    label: event.path.clone(),
                    start: pos,
                    parent,
                    has_children: false,
                    start_attrs: attrs,
                    complete_ts: None,
                });
                open.push(intervals.len() - 1);
            }
            Some("complete") => {
                let top = open
                    .pop()
                    .ok_or_else(|| unbalanced(format!("complete of {event} without start")))?;
                if intervals[top].label != event.path {
                    return Err(unbalanced(format!(
                        "complete of {event} while {} (started at {}) is innermost",
                        Event::new(intervals[top].label.clone()),
                        intervals[top].start
                    )));
                }
                intervals[top].complete_ts = event.attr(keys::TIMESTAMP).map(str::to_string);
            }
            Some(other) => {
                return Err(unbalanced(format!("unknown lifecycle value {other:?}")));
            }
        }
    }
    if let Some(&unclosed) = open.last() {
        return Err(HeuristicError::UnbalancedLifecycle {
            trace: ti,
            position: intervals[unclosed].start,
            reason: "start without complete at end of trace".into(),
        });
    }

    // intervals are already in start order
    let events = intervals
        .iter()
        .filter(|iv| !iv.has_children)
        .map(|iv| {
            let mut chain = vec![iv];
            let mut cur = iv.parent;
            while let Some(p) = cur {
                chain.push(&intervals[p]);
                cur = intervals[p].parent;
            }
            let path: Vec<Activity> = chain.iter().rev().flat_map(|c| c.label.iter().cloned()).collect();
            let mut attrs = iv.start_attrs.clone();
            if let Some(ts) = &iv.complete_ts {
                attrs.insert(keys::COMPLETE_TIMESTAMP.to_string(), ts.clone());
            }
            Event::with_attrs(path, attrs)
        })
        .collect();
    Ok(HierTrace::new(events))
}

pub fn structured_names(log: &HierLog, separator: &str) -> Result<HierLog, HeuristicError> {
    if separator.is_empty() {
        return Err(HeuristicError::InvalidConfig("separator must not be empty".into()));
    }
    per_trace(log, |ti, trace| {
        let mut events = Vec::with_capacity(trace.len());
        for (pos, event) in trace.events.iter().enumerate() {
            let mut path = Vec::new();
            for part in &event.path {
                for segment in part.as_str().split(separator) {
                    let activity = Activity::new(segment).map_err(|_| HeuristicError::EmptySegment {
                        trace: ti,
                        position: pos,
                        name: part.to_string(),
                    })?;
                    path.push(activity);
                }
            }
            events.push(Event::with_attrs(path, event.attrs.clone()));
        }
        Ok(HierTrace::new(events))
    })
}

pub fn attribute_combination(log: &HierLog, attr_keys: &[String]) -> Result<HierLog, HeuristicError> {
    per_trace(log, |ti, trace| {
        let mut events = Vec::with_capacity(trace.len());
        for (ei, event) in trace.events.iter().enumerate() {
            let mut path = Vec::with_capacity(attr_keys.len() + event.path.len());
            for key in attr_keys {
                let missing = || HeuristicError::MissingAttribute {
                    trace: ti,
                    event: ei,
                    key: key.clone(),
                };
                let value = event.attr(key).ok_or_else(missing)?;
                path.push(Activity::new(value).map_err(|_| missing())?);
            }
            path.extend(event.path.iter().cloned());
            events.push(Event::with_attrs(path, event.attrs.clone()));
        }
        Ok(HierTrace::new(events))
    })
}

/// One call in a reconstructed call forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CallNode {
    pub activity: Activity,
    pub children: Vec<CallNode>,
}

/// Rebuilds the call forest implied by a hierarchical trace: consecutive events
/// sharing a prefix are read as the same enclosing call.
pub fn call_forest(trace: &HierTrace) -> Vec<CallNode> {
    fn insert(forest: &mut Vec<CallNode>, path: &[Activity], fresh: bool) {
        let Some((head, rest)) = path.split_first() else {
            return;
        };
        let reuse = !fresh
            && !rest.is_empty()
            && forest
                .last()
                .is_some_and(|n| n.activity == *head && !n.children.is_empty());
        if !reuse {
            forest.push(CallNode {
                activity: head.clone(),
                children: Vec::new(),
            });
        }
        let node = forest.last_mut().expect("just ensured");
        insert(&mut node.children, rest, false);
    }
    let mut forest = Vec::new();
    for event in &trace.events {
        insert(&mut forest, &event.path, false);
    }
    forest
}
