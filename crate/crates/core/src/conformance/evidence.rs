//! Directly-follows evidence per hierarchy context.
//!
//! A context is keyed by the innermost call name (`None` for the top level).
//! In the rediscoverable class every name labels exactly one named subtree and
//! every recursion leaf re-enters it, so the innermost name identifies the
//! submodel that produced a level.

use std::collections::{BTreeMap, BTreeSet};

use crate::log::{Activity, HierLog};
use crate::tree::{Operator, Tree};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LevelEvidence {
    pub symbols: BTreeSet<Activity>,
    pub starts: BTreeSet<Activity>,
    pub ends: BTreeSet<Activity>,
    pub pairs: BTreeSet<(Activity, Activity)>,
}

impl LevelEvidence {
    fn covers(&self, other: &LevelEvidence) -> bool {
        other.symbols.is_subset(&self.symbols)
            && other.starts.is_subset(&self.starts)
            && other.ends.is_subset(&self.ends)
            && other.pairs.is_subset(&self.pairs)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Evidence(pub BTreeMap<Option<Activity>, LevelEvidence>);

impl Evidence {
    /// Every context of `other` is present here with at least its evidence.
    pub fn covers(&self, other: &Evidence) -> bool {
        other.0.iter().all(|(k, need)| match self.0.get(k) {
            Some(have) => have.covers(need),
            None => need.symbols.is_empty(),
        })
    }

    /// First missing item, for diagnostics.
    pub fn first_gap(&self, other: &Evidence) -> Option<String> {
        for (k, need) in &other.0 {
            let have = self.0.get(k).cloned().unwrap_or_default();
            let ctx = k.as_ref().map_or("<top>", Activity::as_str);
            if let Some(a) = need.symbols.difference(&have.symbols).next() {
                return Some(format!("{ctx}: activity {a}"));
            }
            if let Some(a) = need.starts.difference(&have.starts).next() {
                return Some(format!("{ctx}: start {a}"));
            }
            if let Some(a) = need.ends.difference(&have.ends).next() {
                return Some(format!("{ctx}: end {a}"));
            }
            if let Some((a, b)) = need.pairs.difference(&have.pairs).next() {
                return Some(format!("{ctx}: pair ({a}, {b})"));
            }
        }
        None
    }
}

/// Evidence of a log. A call of `f` is a maximal run of consecutive events
/// whose head is `f`; its deeper events form one trace of the context `f`.
pub fn log_evidence(log: &HierLog) -> Evidence {
    let mut ev = Evidence::default();
    for t in &log.traces {
        let paths: Vec<&[Activity]> = t.events.iter().map(|e| e.path.as_slice()).collect();
        walk(&paths, None, &mut ev);
    }
    ev
}

/// Evidence of an explicit set of traces given as event paths.
pub fn traces_evidence<'a>(traces: impl IntoIterator<Item = &'a Vec<Vec<Activity>>>) -> Evidence {
    let mut ev = Evidence::default();
    for t in traces {
        let paths: Vec<&[Activity]> = t.iter().map(Vec::as_slice).collect();
        walk(&paths, None, &mut ev);
    }
    ev
}

fn walk(events: &[&[Activity]], ctx: Option<&Activity>, ev: &mut Evidence) {
    let level = ev.0.entry(ctx.cloned()).or_default();
    // consecutive events with one head are one call, so one symbol
    let mut heads: Vec<&Activity> = events.iter().map(|p| &p[0]).collect();
    heads.dedup();
    if let (Some(&s), Some(&e)) = (heads.first(), heads.last()) {
        level.starts.insert(s.clone());
        level.ends.insert(e.clone());
    }
    level.symbols.extend(heads.iter().map(|&h| h.clone()));
    level
        .pairs
        .extend(heads.windows(2).map(|w| (w[0].clone(), w[1].clone())));
    let mut i = 0;
    while i < events.len() {
        let h = &events[i][0];
        let mut j = i;
        while j < events.len() && events[j][0] == *h {
            j += 1;
        }
        let tails: Vec<&[Activity]> = events[i..j].iter().filter(|p| p.len() > 1).map(|p| &p[1..]).collect();
        // a run of bare events is a leaf, never an empty call
        if !tails.is_empty() {
            walk(&tails, Some(h), ev);
        }
        i = j;
    }
}

/// Evidence required by the full (unbounded) language of a tree in the
/// rediscoverable class, computed structurally.
pub fn required_evidence(tree: &Tree) -> Evidence {
    let mut ev = Evidence::default();
    let top = shape(tree, None, &mut ev);
    close(&mut ev, None, top);
    ev
}

struct Shape {
    first: BTreeSet<Activity>,
    last: BTreeSet<Activity>,
    symbols: BTreeSet<Activity>,
    nullable: bool,
}

fn close(ev: &mut Evidence, ctx: Option<&Activity>, s: Shape) {
    let level = ev.0.entry(ctx.cloned()).or_default();
    level.starts.extend(s.first);
    level.ends.extend(s.last);
    level.symbols.extend(s.symbols);
}

fn cross(ev: &mut Evidence, ctx: Option<&Activity>, a: &BTreeSet<Activity>, b: &BTreeSet<Activity>) {
    let pairs = &mut ev.0.entry(ctx.cloned()).or_default().pairs;
    for x in a {
        for y in b {
            pairs.insert((x.clone(), y.clone()));
        }
    }
}

fn shape(tree: &Tree, ctx: Option<&Activity>, ev: &mut Evidence) -> Shape {
    let single = |a: &Activity| Shape {
        first: BTreeSet::from([a.clone()]),
        last: BTreeSet::from([a.clone()]),
        symbols: BTreeSet::from([a.clone()]),
        nullable: false,
    };
    match tree {
        Tree::Silent => Shape {
            first: BTreeSet::new(),
            last: BTreeSet::new(),
            symbols: BTreeSet::new(),
            nullable: true,
        },
        Tree::Activity(a) | Tree::Recursion(a) => single(a),
        Tree::Named(f, body) => {
            let inner = shape(body, Some(f), ev);
            close(ev, Some(f), inner);
            single(f)
        }
        Tree::Op(op, cs) => {
            let parts: Vec<Shape> = cs.iter().map(|c| shape(c, ctx, ev)).collect();
            let symbols: BTreeSet<Activity> = parts.iter().flat_map(|p| p.symbols.iter().cloned()).collect();
            match op {
                Operator::Xor => Shape {
                    first: parts.iter().flat_map(|p| p.first.iter().cloned()).collect(),
                    last: parts.iter().flat_map(|p| p.last.iter().cloned()).collect(),
                    nullable: parts.iter().any(|p| p.nullable),
                    symbols,
                },
                Operator::Seq => {
                    let mut first = BTreeSet::new();
                    let mut last = BTreeSet::new();
                    let mut prefix_nullable = true;
                    for p in &parts {
                        if prefix_nullable {
                            first.extend(p.first.iter().cloned());
                        }
                        prefix_nullable &= p.nullable;
                    }
                    let mut suffix_nullable = true;
                    for p in parts.iter().rev() {
                        if suffix_nullable {
                            last.extend(p.last.iter().cloned());
                        }
                        suffix_nullable &= p.nullable;
                    }
                    for i in 0..parts.len() {
                        for j in i + 1..parts.len() {
                            cross(ev, ctx, &parts[i].last, &parts[j].first);
                            if !parts[j].nullable {
                                break;
                            }
                        }
                    }
                    Shape {
                        first,
                        last,
                        nullable: prefix_nullable,
                        symbols,
                    }
                }
                Operator::Par => {
                    for i in 0..parts.len() {
                        for j in 0..parts.len() {
                            if i != j {
                                cross(ev, ctx, &parts[i].symbols, &parts[j].symbols);
                            }
                        }
                    }
                    // inside each part the order is the part's own
                    Shape {
                        first: parts.iter().flat_map(|p| p.first.iter().cloned()).collect(),
                        last: parts.iter().flat_map(|p| p.last.iter().cloned()).collect(),
                        nullable: parts.iter().all(|p| p.nullable),
                        symbols,
                    }
                }
                Operator::Loop => {
                    let body = &parts[0];
                    for r in &parts[1..] {
                        cross(ev, ctx, &body.last, &r.first);
                        cross(ev, ctx, &r.last, &body.first);
                        if r.nullable {
                            cross(ev, ctx, &body.last, &body.first);
                        }
                    }
                    Shape {
                        first: body.first.clone(),
                        last: body.last.clone(),
                        nullable: body.nullable,
                        symbols,
                    }
                }
            }
        }
    }
}
