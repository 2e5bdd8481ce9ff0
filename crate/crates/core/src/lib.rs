//! Discovery of hierarchical process trees from hierarchical event logs.

pub mod conformance;
pub mod csvlog;
pub mod discovery;
pub mod error;
pub mod export;
pub mod heuristics;
pub mod log;
pub mod synthetic;
pub mod tree;
pub mod xes;

pub use error::{ConformanceError, DiscoveryError, ExportError, HeuristicError, LogError, TreeError};
pub use log::{Activity, Event, HierLog, HierTrace, LogStats};
pub use tree::{LangBound, NodeId, Operator, Tree};
