use thiserror::Error;

/// Errors raised while reading event logs.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("trace {trace}, event {event}: missing concept:name")]
    MissingConceptName { trace: usize, event: usize },
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("invalid activity name {0:?}")]
    InvalidActivity(String),
}

/// Errors raised by the hierarchy heuristics.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeuristicError {
    #[error("trace {trace}, position {position}: unbalanced lifecycle ({reason})")]
    UnbalancedLifecycle {
        trace: usize,
        position: usize,
        reason: String,
    },
    #[error("trace {trace}, position {position}: missing lifecycle:transition")]
    MissingLifecycle { trace: usize, position: usize },
    #[error("trace {trace}, position {position}: empty segment in {name:?}")]
    EmptySegment {
        trace: usize,
        position: usize,
        name: String,
    },
    #[error("trace {trace}, event {event}: missing attribute {key:?}")]
    MissingAttribute { trace: usize, event: usize, key: String },
    #[error("invalid heuristic configuration: {0}")]
    InvalidConfig(String),
}

/// Errors raised by process-tree operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("recursion leaf rec:{0} has no enclosing named subtree")]
    UnboundRecursion(String),
    #[error("invalid depth range: min {min} > max {max}")]
    InvalidRange { min: usize, max: usize },
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
}

/// Errors raised by the discovery engine's public log-splitting surface.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiscoveryError {
    #[error("activity {0:?} is not covered by the cut")]
    UncoveredActivity(String),
    #[error("directly-follows graph is empty")]
    EmptyGraph,
    #[error("invalid discovery configuration: {0}")]
    InvalidConfig(String),
}

/// Errors raised by the conformance toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConformanceError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("no directly-follows complete log within max trace length {cap}")]
    CompletenessUnreachable { cap: usize },
}

/// Errors raised by the exporters.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExportError {
    #[error("recursion leaf rec:{0} cannot be represented in a finite Petri net")]
    RecursionNotRepresentable(String),
    #[error("malformed PNML: {0}")]
    MalformedPnml(String),
    #[error("malformed model JSON: {0}")]
    MalformedJson(String),
}
