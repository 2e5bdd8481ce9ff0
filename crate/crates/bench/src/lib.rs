//! Shared inputs for the criterion benches.

use hptree::heuristics::nested_calls;
use hptree::synthetic::{depth_family, trace_length_family};
use hptree::HierLog;

pub const SEED: u64 = 42;

/// Depths timed by the depth-scaling group.
pub const DEPTHS: [usize; 4] = [1, 2, 4, 8];

/// Main-body repetitions timed by the trace-length group.
pub const ROUNDS: [usize; 4] = [1, 2, 4, 8];

pub fn deep_log(depth: usize, traces: usize) -> HierLog {
    depth_family(depth, traces, SEED)
}

pub fn long_log(rounds: usize, traces: usize) -> HierLog {
    trace_length_family(rounds, traces, SEED)
}

pub const RUNNING_EXAMPLE_XES: &[u8] = include_bytes!("../../core/tests/fixtures/running_example.xes");

/// The running example, lifted by nested calls.
pub fn running_example() -> HierLog {
    nested_calls(&hptree::xes::parse_xes(RUNNING_EXAMPLE_XES).expect("fixture parses")).expect("fixture is balanced")
}
