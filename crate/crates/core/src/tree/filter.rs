//! Depth filtering. The depth of a node is the number of named subtrees
//! strictly above it, so the root's content is at depth 0.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{reduce, Tree};
use crate::error::TreeError;
use crate::log::Activity;

/// Upper depth limit; `Infinite` keeps every level.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Depth {
    Finite(usize),
    #[default]
    Infinite,
}

impl Depth {
    fn reached(self, d: usize) -> bool {
        matches!(self, Depth::Finite(m) if d >= m)
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(d) => write!(f, "{d}"),
            Depth::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Depth {
    type Err = std::num::ParseIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "infinite" | "∞" => Ok(Depth::Infinite),
            _ => s.parse().map(Depth::Finite),
        }
    }
}

/// Keeps the levels `min_depth..=max_depth`: leaves above `min_depth` become
/// `tau` and named subtrees above it are dissolved into their child; named
/// subtrees at `max_depth` collapse to an activity leaf of their name.
/// Recursion leaves whose target was dissolved become activity leaves.
pub fn depth_filter(tree: &Tree, min_depth: usize, max_depth: Depth) -> Result<Tree, TreeError> {
    if let Depth::Finite(max) = max_depth {
        if min_depth > max {
            return Err(TreeError::InvalidRange { min: min_depth, max });
        }
    }
    let mut scope = Vec::new();
    Ok(reduce(&filter(tree, 0, min_depth, max_depth, &mut scope)))
}

/// `scope` holds enclosing names, innermost last, with whether each was kept.
fn filter(t: &Tree, depth: usize, min: usize, max: Depth, scope: &mut Vec<(Activity, bool)>) -> Tree {
    match t {
        Tree::Silent => Tree::Silent,
        Tree::Activity(_) | Tree::Recursion(_) if depth < min => Tree::Silent,
        Tree::Activity(a) => Tree::Activity(a.clone()),
        Tree::Recursion(f) => match scope.iter().rev().find(|(g, _)| g == f) {
            Some((_, true)) => Tree::Recursion(f.clone()),
            _ => Tree::Activity(f.clone()),
        },
        Tree::Named(f, _) if max.reached(depth) => Tree::Activity(f.clone()),
        Tree::Named(f, c) => {
            let kept = depth >= min;
            scope.push((f.clone(), kept));
            let inner = filter(c, depth + 1, min, max, scope);
            scope.pop();
            if kept {
                Tree::Named(f.clone(), Box::new(inner))
            } else {
                inner
            }
        }
        Tree::Op(op, cs) => Tree::Op(*op, cs.iter().map(|c| filter(c, depth, min, max, scope)).collect()),
    }
}
