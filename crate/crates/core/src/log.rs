//! Flat and hierarchical event logs.
//!
//! A flat log is simply a hierarchical log of depth one: every event carries a
//! path of exactly one activity. Paths are stored structurally, so an activity
//! name may itself contain `.` without being split.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::LogError;

/// Reserved label of the silent activity.
pub const SILENT_LABEL: &str = "τ";

/// Well-known attribute keys.
pub mod keys {
    pub const CONCEPT_NAME: &str = "concept:name";
    pub const LIFECYCLE: &str = "lifecycle:transition";
    pub const TIMESTAMP: &str = "time:timestamp";
    pub const START_TIMESTAMP: &str = "start:timestamp";
    pub const COMPLETE_TIMESTAMP: &str = "complete:timestamp";
}

/// A non-empty activity label. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Activity(Arc<str>);

impl Activity {
    pub fn new(name: impl AsRef<str>) -> Result<Self, LogError> {
        let name = name.as_ref();
        if name.is_empty() || name == SILENT_LABEL {
            return Err(LogError::InvalidActivity(name.to_string()));
        }
        Ok(Activity(Arc::from(name)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Activity {
    type Error = LogError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Activity::new(value)
    }
}

impl From<Activity> for String {
    fn from(value: Activity) -> Self {
        value.0.to_string()
    }
}

impl AsRef<str> for Activity {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One event: the activity executed at every hierarchy level, outermost first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub path: Vec<Activity>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attrs: BTreeMap<String, String>,
}

impl Event {
    /// Builds an attribute-free event. `path` must not be empty.
    pub fn new(path: Vec<Activity>) -> Self {
        assert!(!path.is_empty(), "event path must have at least one activity");
        Event {
            path,
            attrs: BTreeMap::new(),
        }
    }

    pub fn with_attrs(path: Vec<Activity>, attrs: BTreeMap<String, String>) -> Self {
        let mut event = Event::new(path);
        event.attrs = attrs;
        event
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.get(key).map(String::as_str)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.path.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// A sequence of events; the empty trace is legal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierTrace {
    pub events: Vec<Event>,
}

impl HierTrace {
    pub fn new(events: Vec<Event>) -> Self {
        HierTrace { events }
    }

    pub fn from_paths<I, P>(paths: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<Vec<Activity>>,
    {
        HierTrace {
            events: paths.into_iter().map(|p| Event::new(p.into())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// The event paths, dropping attributes.
    pub fn paths(&self) -> Vec<Vec<Activity>> {
        self.events.iter().map(|e| e.path.clone()).collect()
    }

    /// `f.t`: prefix every event with `f`.
    pub fn hier_concat(&self, f: &Activity) -> HierTrace {
        HierTrace {
            events: self
                .events
                .iter()
                .map(|e| {
                    let mut path = Vec::with_capacity(e.path.len() + 1);
                    path.push(f.clone());
                    path.extend(e.path.iter().cloned());
                    Event {
                        path,
                        attrs: e.attrs.clone(),
                    }
                })
                .collect(),
        }
    }

    /// `t⇂i`: drop the first `i` activities of every event; events that run
    /// out of activities disappear.
    pub fn project(&self, i: usize) -> HierTrace {
        HierTrace {
            events: self
                .events
                .iter()
                .filter(|e| e.path.len() > i)
                .map(|e| Event {
                    path: e.path[i..].to_vec(),
                    attrs: e.attrs.clone(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for HierTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (i, e) in self.events.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("⟩")
    }
}

/// A multiset of hierarchical traces, stored in input order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierLog {
    pub traces: Vec<HierTrace>,
}

impl HierLog {
    pub fn new(traces: Vec<HierTrace>) -> Self {
        HierLog { traces }
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// ‖L‖: the longest event path, 0 for a log without events.
    pub fn depth(&self) -> usize {
        self.events().map(Event::depth).max().unwrap_or(0)
    }

    /// Σ(L): every activity occurring at any level.
    pub fn alphabet(&self) -> BTreeSet<Activity> {
        self.events().flat_map(|e| e.path.iter().cloned()).collect()
    }

    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.traces.iter().flat_map(|t| t.events.iter())
    }

    pub fn hier_concat(&self, f: &Activity) -> HierLog {
        HierLog {
            traces: self.traces.iter().map(|t| t.hier_concat(f)).collect(),
        }
    }

    pub fn project(&self, i: usize) -> HierLog {
        HierLog {
            traces: self.traces.iter().map(|t| t.project(i)).collect(),
        }
    }

    /// The depth-1 log naming every event by its dotted path, as the flat
    /// baseline sees it. Attributes are kept.
    pub fn flatten(&self) -> HierLog {
        self.traces
            .iter()
            .map(|t| {
                HierTrace::new(
                    t.events
                        .iter()
                        .map(|e| Event::with_attrs(vec![flat_name(&e.path)], e.attrs.clone()))
                        .collect(),
                )
            })
            .collect()
    }

    /// Trace paths sorted, so two logs compare as multisets regardless of
    /// trace order or attributes.
    pub fn multiset(&self) -> Vec<Vec<Vec<Activity>>> {
        let mut all: Vec<_> = self.traces.iter().map(HierTrace::paths).collect();
        all.sort();
        all
    }

    pub fn multiset_eq(&self, other: &HierLog) -> bool {
        self.multiset() == other.multiset()
    }

    pub fn stats(&self) -> LogStats {
        log_stats(self)
    }
}

impl FromIterator<HierTrace> for HierLog {
    fn from_iter<I: IntoIterator<Item = HierTrace>>(iter: I) -> Self {
        HierLog {
            traces: iter.into_iter().collect(),
        }
    }
}

/// One activity named by the dotted path.
pub fn flat_name(path: &[Activity]) -> Activity {
    match path {
        [single] => single.clone(),
        _ => {
            let joined = path.iter().map(Activity::as_str).collect::<Vec<_>>().join(".");
            Activity::new(joined).expect("joined names are non-empty")
        }
    }
}

/// `f.L`
pub fn hier_concat(f: &Activity, log: &HierLog) -> HierLog {
    log.hier_concat(f)
}

/// `L⇂i`
pub fn project(log: &HierLog, i: usize) -> HierLog {
    log.project(i)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogStats {
    pub traces: usize,
    pub events: usize,
    pub depth: usize,
    pub alphabet: BTreeSet<Activity>,
    pub avg_trace_len: f64,
}

pub fn log_stats(log: &HierLog) -> LogStats {
    let events = log.events().count();
    LogStats {
        traces: log.len(),
        events,
        depth: log.depth(),
        alphabet: log.alphabet(),
        avg_trace_len: if log.is_empty() {
            0.0
        } else {
            events as f64 / log.len() as f64
        },
    }
}
