//! Splitting traces along a cut.

use std::collections::BTreeMap;

use super::cut::Cut;
use crate::error::DiscoveryError;
use crate::log::{Activity, HierLog, HierTrace};
use crate::tree::Operator;

/// Pieces of one trace per block. `block_of` maps an event to the block of
/// its level-1 symbol.
///
/// - xor: the events of the block holding most of the trace (ties to the
///   lower index) go to that block; other events are dropped.
/// - seq: the trace is cut into one segment per block, dropping the fewest
///   events that violate the block order.
/// - par: the projection onto every block.
/// - loop: maximal runs of body or redo events, with an empty body inserted
///   before, between and after redo runs as needed.
pub fn split_trace<T: Clone>(
    op: Operator,
    blocks: usize,
    trace: &[T],
    block_of: impl Fn(&T) -> usize,
) -> Vec<Vec<Vec<T>>> {
    let mut out: Vec<Vec<Vec<T>>> = vec![Vec::new(); blocks];
    let own: Vec<usize> = trace.iter().map(&block_of).collect();
    match op {
        Operator::Xor => {
            let mut counts = vec![0usize; blocks];
            for &b in &own {
                counts[b] += 1;
            }
            let best = (0..blocks).fold(0, |best, b| if counts[b] > counts[best] { b } else { best });
            out[best].push(select(trace, &own, |b| b == best));
        }
        Operator::Par => {
            for (k, slot) in out.iter_mut().enumerate() {
                slot.push(select(trace, &own, |b| b == k));
            }
        }
        Operator::Seq => {
            let assigned = monotone_assignment(&own, blocks);
            for (k, slot) in out.iter_mut().enumerate() {
                let seg = trace
                    .iter()
                    .zip(own.iter().zip(&assigned))
                    .filter(|(_, (&o, &a))| a == k && o == k)
                    .map(|(e, _)| e.clone())
                    .collect();
                slot.push(seg);
            }
        }
        Operator::Loop => {
            let mut runs: Vec<(usize, Vec<T>)> = Vec::new();
            for (e, &b) in trace.iter().zip(&own) {
                match runs.last_mut() {
                    Some((rb, run)) if *rb == b => run.push(e.clone()),
                    _ => runs.push((b, vec![e.clone()])),
                }
            }
            let mut expect_body = true;
            for (b, run) in runs {
                if (b == 0) != expect_body {
                    // a redo where a body is due, or vice versa (never two bodies in a row)
                    out[0].push(Vec::new());
                }
                expect_body = b != 0;
                out[b].push(run);
            }
            if expect_body {
                out[0].push(Vec::new());
            }
        }
    }
    out
}

fn select<T: Clone>(trace: &[T], own: &[usize], keep: impl Fn(usize) -> bool) -> Vec<T> {
    trace
        .iter()
        .zip(own)
        .filter(|(_, &b)| keep(b))
        .map(|(e, _)| e.clone())
        .collect()
}

/// Non-decreasing block assignment minimizing the number of events placed
/// outside their own block. Ties prefer assigning later blocks.
fn monotone_assignment(own: &[usize], blocks: usize) -> Vec<usize> {
    if own.windows(2).all(|w| w[0] <= w[1]) {
        return own.to_vec();
    }
    let n = own.len();
    // best[i][k]: least cost for the first i events with every block <= k
    let mut best = vec![vec![0u32; blocks]; n + 1];
    let mut cost = vec![vec![0u32; blocks]; n + 1];
    for i in 0..n {
        for k in 0..blocks {
            cost[i + 1][k] = best[i][k] + u32::from(own[i] != k);
            best[i + 1][k] = if k == 0 {
                cost[i + 1][0]
            } else {
                best[i + 1][k - 1].min(cost[i + 1][k])
            };
        }
    }
    let mut assigned = vec![0; n];
    let mut k = blocks - 1;
    for i in (1..=n).rev() {
        let target = best[i][k];
        let choice = (0..=k)
            .rev()
            .find(|&j| cost[i][j] == target)
            .expect("minimum is attained");
        assigned[i - 1] = choice;
        k = choice;
    }
    assigned
}

/// Splits every trace of `log` along `cut`, grouping by level-1 activity.
pub fn split_log(log: &HierLog, cut: &Cut) -> Result<Vec<HierLog>, DiscoveryError> {
    let index: BTreeMap<&Activity, usize> = cut
        .partition
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.iter().map(move |a| (a, i)))
        .collect();
    for e in log.events() {
        if !index.contains_key(&e.path[0]) {
            return Err(DiscoveryError::UncoveredActivity(e.path[0].to_string()));
        }
    }
    let mut out = vec![HierLog::default(); cut.partition.len()];
    for trace in &log.traces {
        let pieces = split_trace(cut.op, cut.partition.len(), &trace.events, |e| index[&e.path[0]]);
        for (k, ps) in pieces.into_iter().enumerate() {
            out[k].traces.extend(ps.into_iter().map(HierTrace::new));
        }
    }
    Ok(out)
}
