//! Cut detection on a directly-follows graph, tried in the order
//! xor, seq, par, loop.

use std::collections::BTreeSet;

use serde::Serialize;

use super::dfg::Dfg;
use crate::error::DiscoveryError;
use crate::tree::Operator;

/// A partition of the graph's nodes under an operator. `xor`/`par` blocks
/// are sorted by their least node, `seq` blocks are in execution order, and a
/// `loop` has its body first followed by the redo blocks sorted by least node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cut<N: Ord = crate::log::Activity> {
    pub op: Operator,
    pub partition: Vec<BTreeSet<N>>,
}

impl<N: Ord + Clone> Cut<N> {
    /// Index of the block containing `n`.
    pub fn block_of(&self, n: &N) -> Option<usize> {
        self.partition.iter().position(|b| b.contains(n))
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so that representatives are deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }

    /// Blocks as sorted index lists, ordered by least member.
    fn blocks(&mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            let r = self.find(i);
            by_root[r].push(i);
        }
        by_root.into_iter().filter(|b| !b.is_empty()).collect()
    }
}

/// Index view of a graph: node `i` is the `i`-th smallest node.
struct Graph {
    n: usize,
    succ: Vec<Vec<usize>>,
    adj: Vec<Vec<u64>>,
    start: Vec<bool>,
    end: Vec<bool>,
}

impl Graph {
    fn new<N: Ord + Clone>(dfg: &Dfg<N>) -> (Graph, Vec<N>) {
        let nodes: Vec<N> = dfg.nodes.iter().cloned().collect();
        let n = nodes.len();
        let idx = |x: &N| nodes.binary_search(x).expect("edge endpoints are nodes");
        let words = n.div_ceil(64);
        let mut g = Graph {
            n,
            succ: vec![Vec::new(); n],
            adj: vec![vec![0; words]; n],
            start: vec![false; n],
            end: vec![false; n],
        };
        for (a, b) in dfg.edges.keys() {
            let (i, j) = (idx(a), idx(b));
            g.succ[i].push(j);
            g.adj[i][j / 64] |= 1 << (j % 64);
        }
        for s in dfg.starts.keys() {
            g.start[idx(s)] = true;
        }
        for e in dfg.ends.keys() {
            g.end[idx(e)] = true;
        }
        (g, nodes)
    }

    fn edge(&self, a: usize, b: usize) -> bool {
        self.adj[a][b / 64] >> (b % 64) & 1 == 1
    }

    /// `reach[a]` has bit `b` set iff `b` is reachable from `a` by a
    /// non-empty path.
    fn closure(&self) -> Vec<Vec<u64>> {
        let words = self.n.div_ceil(64);
        let mut reach = vec![vec![0u64; words]; self.n];
        let mut stack = Vec::new();
        for (a, row) in reach.iter_mut().enumerate() {
            stack.extend(self.succ[a].iter().copied());
            while let Some(x) = stack.pop() {
                if row[x / 64] >> (x % 64) & 1 == 1 {
                    continue;
                }
                row[x / 64] |= 1 << (x % 64);
                stack.extend(self.succ[x].iter().copied());
            }
        }
        reach
    }
}

fn bit(rows: &[Vec<u64>], a: usize, b: usize) -> bool {
    rows[a][b / 64] >> (b % 64) & 1 == 1
}

/// The first cut found in the order xor, seq, par, loop.
pub fn find_cut<N: Ord + Clone>(dfg: &Dfg<N>) -> Result<Option<Cut<N>>, DiscoveryError> {
    if dfg.nodes.is_empty() {
        return Err(DiscoveryError::EmptyGraph);
    }
    let (g, nodes) = Graph::new(dfg);
    let found = xor_cut(&g)
        .map(|p| (Operator::Xor, p))
        .or_else(|| seq_cut(&g).map(|p| (Operator::Seq, p)))
        .or_else(|| par_cut(&g).map(|p| (Operator::Par, p)))
        .or_else(|| loop_cut(&g).map(|p| (Operator::Loop, p)));
    Ok(found.map(|(op, partition)| Cut {
        op,
        partition: partition
            .into_iter()
            .map(|b| b.into_iter().map(|i| nodes[i].clone()).collect())
            .collect(),
    }))
}

fn xor_cut(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let mut uf = UnionFind::new(g.n);
    for a in 0..g.n {
        for &b in &g.succ[a] {
            uf.union(a, b);
        }
    }
    let blocks = uf.blocks();
    (blocks.len() >= 2).then_some(blocks)
}

fn seq_cut(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let reach = g.closure();
    let mut uf = UnionFind::new(g.n);
    for a in 0..g.n {
        for b in a + 1..g.n {
            if bit(&reach, a, b) == bit(&reach, b, a) {
                uf.union(a, b);
            }
        }
    }
    let mut blocks = uf.blocks();
    if blocks.len() < 2 {
        return None;
    }
    // a block that reaches more blocks comes earlier
    let reaches = |x: &[usize], y: &[usize]| bit(&reach, x[0], y[0]);
    let mut keyed: Vec<(usize, Vec<usize>)> = blocks
        .iter()
        .map(|b| {
            (
                blocks.iter().filter(|o| o[0] != b[0] && reaches(b, o)).count(),
                b.clone(),
            )
        })
        .collect();
    keyed.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
    blocks = keyed.into_iter().map(|(_, b)| b).collect();
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            for &a in &blocks[i] {
                for &b in &blocks[j] {
                    if !bit(&reach, a, b) || bit(&reach, b, a) {
                        return None;
                    }
                }
            }
        }
    }
    Some(blocks)
}

fn par_cut(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let mut uf = UnionFind::new(g.n);
    for a in 0..g.n {
        for b in a + 1..g.n {
            if !(g.edge(a, b) && g.edge(b, a)) {
                uf.union(a, b);
            }
        }
    }
    let blocks = uf.blocks();
    if blocks.len() < 2 {
        return None;
    }
    let good = |b: &[usize]| b.iter().any(|&x| g.start[x]) && b.iter().any(|&x| g.end[x]);
    let first_good = blocks.iter().position(|b| good(b))?;
    let mut merged: Vec<Vec<usize>> = Vec::new();
    let mut spill = Vec::new();
    for (i, b) in blocks.into_iter().enumerate() {
        if i == first_good || !good(&b) {
            spill.extend(b);
        } else {
            merged.push(b);
        }
    }
    if merged.is_empty() {
        return None;
    }
    spill.sort_unstable();
    merged.push(spill);
    merged.sort();
    Some(merged)
}

fn loop_cut(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let in_body: Vec<bool> = (0..g.n).map(|i| g.start[i] || g.end[i]).collect();
    if in_body.iter().all(|&b| b) || !in_body.iter().any(|&b| b) {
        return None;
    }
    let mut uf = UnionFind::new(g.n);
    for a in 0..g.n {
        for &b in &g.succ[a] {
            if !in_body[a] && !in_body[b] {
                uf.union(a, b);
            }
        }
    }
    let starts: Vec<usize> = (0..g.n).filter(|&i| g.start[i]).collect();
    let ends: Vec<usize> = (0..g.n).filter(|&i| g.end[i]).collect();
    let mut body: Vec<usize> = (0..g.n).filter(|&i| in_body[i]).collect();
    let mut redos = Vec::new();
    for block in uf.blocks().into_iter().filter(|b| !in_body[b[0]]) {
        let member = |x: usize| block.binary_search(&x).is_ok();
        let mut ok = true;
        let mut entered = false;
        let mut exits = false;
        for &a in &body {
            for &b in &g.succ[a] {
                if member(b) {
                    entered = true;
                    ok &= g.end[a];
                }
            }
        }
        for &a in &block {
            for &b in &g.succ[a] {
                if in_body[b] {
                    exits = true;
                    ok &= g.start[b];
                }
            }
        }
        // every end reaches the redo's entry points, every exit point reaches every start
        for &b in &block {
            if ends.iter().any(|&e| g.edge(e, b)) {
                ok &= ends.iter().all(|&e| g.edge(e, b));
            }
        }
        for &a in &block {
            if starts.iter().any(|&s| g.edge(a, s)) {
                ok &= starts.iter().all(|&s| g.edge(a, s));
            }
        }
        if ok && entered && exits {
            redos.push(block);
        } else {
            body.extend(block);
        }
    }
    if redos.is_empty() {
        return None;
    }
    body.sort_unstable();
    let mut partition = vec![body];
    partition.extend(redos);
    Some(partition)
}
