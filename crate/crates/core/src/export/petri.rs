//! Block-structured translation of recursion-free trees to workflow nets.
//!
//! Every activity leaf `a` becomes `a+start -> place -> a+end`, and a named
//! subtree `f` wraps its body between `f+start` and `f+end`. Transitions keep
//! their hierarchical path, so the firing language can be fused back into
//! hierarchical traces.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::ExportError;
use crate::log::Activity;
use crate::tree::{Language, Operator, PathTrace, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionKind {
    Silent,
    Start,
    End,
    CallStart,
    CallEnd,
}

impl TransitionKind {
    pub fn keyword(self) -> &'static str {
        match self {
            TransitionKind::Silent => "silent",
            TransitionKind::Start => "start",
            TransitionKind::End => "end",
            TransitionKind::CallStart => "callstart",
            TransitionKind::CallEnd => "callend",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "silent" => TransitionKind::Silent,
            "start" => TransitionKind::Start,
            "end" => TransitionKind::End,
            "callstart" => TransitionKind::CallStart,
            "callend" => TransitionKind::CallEnd,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub id: String,
    /// `None` for silent transitions.
    pub label: Option<String>,
    pub kind: TransitionKind,
    /// Hierarchical path of the activity or call; empty when silent.
    pub path: Vec<Activity>,
    /// Id of the `CallStart` transition of the innermost enclosing call; for
    /// a call end, the start it closes.
    pub call: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PetriNet {
    pub places: Vec<String>,
    pub transitions: Vec<Transition>,
    /// Arcs as (source id, target id); places and transitions alternate.
    pub arcs: Vec<(String, String)>,
    pub initial_marking: BTreeMap<String, u32>,
    pub final_marking: BTreeMap<String, u32>,
}

pub const SOURCE: &str = "source";
pub const SINK: &str = "sink";

struct Builder {
    net: PetriNet,
    ctx: Vec<Activity>,
    calls: Vec<String>,
}

impl Builder {
    fn place(&mut self) -> String {
        let id = format!("p{}", self.net.places.len());
        self.net.places.push(id.clone());
        id
    }

    fn transition(&mut self, kind: TransitionKind, name: Option<&Activity>) -> String {
        let id = format!("t{}", self.net.transitions.len());
        let (label, path) = match (kind, name) {
            (TransitionKind::Silent, _) | (_, None) => (None, Vec::new()),
            (k, Some(a)) => {
                let suffix = if matches!(k, TransitionKind::Start | TransitionKind::CallStart) {
                    "start"
                } else {
                    "end"
                };
                let mut path = self.ctx.clone();
                path.push(a.clone());
                (Some(format!("{a}+{suffix}")), path)
            }
        };
        self.net.transitions.push(Transition {
            id: id.clone(),
            label,
            kind,
            path,
            call: self.calls.last().cloned(),
        });
        id
    }

    fn arc(&mut self, from: &str, to: &str) {
        self.net.arcs.push((from.to_string(), to.to_string()));
    }

    fn link(&mut self, pre: &str, t: &str, post: &str) {
        self.arc(pre, t);
        self.arc(t, post);
    }

    fn build(&mut self, tree: &Tree, pre: &str, post: &str) -> Result<(), ExportError> {
        match tree {
            Tree::Silent => {
                let t = self.transition(TransitionKind::Silent, None);
                self.link(pre, &t, post);
            }
            Tree::Activity(a) => {
                let s = self.transition(TransitionKind::Start, Some(a));
                let mid = self.place();
                let e = self.transition(TransitionKind::End, Some(a));
                self.link(pre, &s, &mid);
                self.link(&mid, &e, post);
            }
            Tree::Recursion(f) => return Err(ExportError::RecursionNotRepresentable(f.to_string())),
            Tree::Named(f, body) => {
                let s = self.transition(TransitionKind::CallStart, Some(f));
                let (inner_pre, inner_post) = (self.place(), self.place());
                self.link(pre, &s, &inner_pre);
                self.ctx.push(f.clone());
                self.calls.push(s);
                self.build(body, &inner_pre, &inner_post)?;
                self.ctx.pop();
                let e = self.transition(TransitionKind::CallEnd, Some(f));
                self.calls.pop();
                self.link(&inner_post, &e, post);
            }
            Tree::Op(Operator::Seq, cs) => {
                let mut from = pre.to_string();
                for (i, c) in cs.iter().enumerate() {
                    let to = if i + 1 == cs.len() {
                        post.to_string()
                    } else {
                        self.place()
                    };
                    self.build(c, &from, &to)?;
                    from = to;
                }
            }
            // branches share the entry and exit place; every branch consumes
            // from `pre` before it touches a place of its own
            Tree::Op(Operator::Xor, cs) => {
                for c in cs {
                    self.build(c, pre, post)?;
                }
            }
            Tree::Op(Operator::Par, cs) => {
                let fork = self.transition(TransitionKind::Silent, None);
                let join = self.transition(TransitionKind::Silent, None);
                self.arc(pre, &fork);
                for c in cs {
                    let (a, b) = (self.place(), self.place());
                    self.arc(&fork, &a);
                    self.build(c, &a, &b)?;
                    self.arc(&b, &join);
                }
                self.arc(&join, post);
            }
            // silent entry and exit keep the redo arcs away from `pre`, which
            // an enclosing xor may share
            Tree::Op(Operator::Loop, cs) => {
                let (inp, out) = (self.place(), self.place());
                let enter = self.transition(TransitionKind::Silent, None);
                let exit = self.transition(TransitionKind::Silent, None);
                self.link(pre, &enter, &inp);
                self.build(&cs[0], &inp, &out)?;
                for r in &cs[1..] {
                    self.build(r, &out, &inp)?;
                }
                self.link(&out, &exit, post);
            }
        }
        Ok(())
    }
}

/// The workflow net of a recursion-free tree.
pub fn to_petri_net(tree: &Tree) -> Result<PetriNet, ExportError> {
    let mut b = Builder {
        net: PetriNet::default(),
        ctx: Vec::new(),
        calls: Vec::new(),
    };
    b.net.places.push(SOURCE.to_string());
    b.net.places.push(SINK.to_string());
    b.build(tree, SOURCE, SINK)?;
    b.net.initial_marking.insert(SOURCE.to_string(), 1);
    b.net.final_marking.insert(SINK.to_string(), 1);
    Ok(b.net)
}

impl PetriNet {
    pub fn labeled_transitions(&self) -> usize {
        self.transitions.iter().filter(|t| t.label.is_some()).count()
    }

    /// Workflow-net violations: a single source and sink place, bipartite
    /// arcs, and every node on a path from the source to the sink.
    pub fn workflow_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let places: BTreeSet<&str> = self.places.iter().map(String::as_str).collect();
        let trans: BTreeSet<&str> = self.transitions.iter().map(|t| t.id.as_str()).collect();
        for (a, b) in &self.arcs {
            let ok = (places.contains(a.as_str()) && trans.contains(b.as_str()))
                || (trans.contains(a.as_str()) && places.contains(b.as_str()));
            if !ok {
                out.push(format!("arc {a} -> {b} is not place/transition"));
            }
        }
        let has_in: BTreeSet<&str> = self.arcs.iter().map(|(_, b)| b.as_str()).collect();
        let has_out: BTreeSet<&str> = self.arcs.iter().map(|(a, _)| a.as_str()).collect();
        let sources: Vec<&str> = places.iter().copied().filter(|p| !has_in.contains(p)).collect();
        let sinks: Vec<&str> = places.iter().copied().filter(|p| !has_out.contains(p)).collect();
        if sources.len() != 1 {
            out.push(format!("expected one source place, found {sources:?}"));
        }
        if sinks.len() != 1 {
            out.push(format!("expected one sink place, found {sinks:?}"));
        }
        if let (Some(&s), Some(&e)) = (sources.first(), sinks.first()) {
            let fwd = self.reach(s, false);
            let bwd = self.reach(e, true);
            for n in places.iter().chain(trans.iter()) {
                if !fwd.contains(n) || !bwd.contains(n) {
                    out.push(format!("{n} is not on a source-sink path"));
                }
            }
        }
        out
    }

    pub fn is_workflow_net(&self) -> bool {
        self.workflow_violations().is_empty()
    }

    fn reach<'a>(&'a self, from: &'a str, backward: bool) -> BTreeSet<&'a str> {
        let mut seen = BTreeSet::from([from]);
        let mut queue = vec![from];
        while let Some(n) = queue.pop() {
            for (a, b) in &self.arcs {
                let (x, y) = if backward { (b, a) } else { (a, b) };
                if x == n && seen.insert(y.as_str()) {
                    queue.push(y.as_str());
                }
            }
        }
        seen
    }

    /// Hierarchical traces of the firing sequences from the initial to the
    /// final marking, with at most `max_events` fused events each.
    ///
    /// An activity start emits its path. A call end emits the call's own
    /// path only when no event was emitted inside that call.
    pub fn fused_language(&self, max_events: usize) -> Language {
        let pidx: BTreeMap<&str, usize> = self.places.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
        let tidx: BTreeMap<&str, usize> = self
            .transitions
            .iter()
            .enumerate()
            .map(|(i, t)| (t.id.as_str(), i))
            .collect();
        let n = self.transitions.len();
        let mut pre = vec![Vec::new(); n];
        let mut post = vec![Vec::new(); n];
        for (a, b) in &self.arcs {
            match (
                pidx.get(a.as_str()),
                tidx.get(b.as_str()),
                tidx.get(a.as_str()),
                pidx.get(b.as_str()),
            ) {
                (Some(&p), Some(&t), _, _) => pre[t].push(p),
                (_, _, Some(&t), Some(&p)) => post[t].push(p),
                _ => {}
            }
        }
        let owner: Vec<Option<usize>> = self
            .transitions
            .iter()
            .map(|t| t.call.as_deref().and_then(|c| tidx.get(c).copied()))
            .collect();
        let mut marking = vec![0u8; self.places.len()];
        for (p, &k) in &self.initial_marking {
            if let Some(&i) = pidx.get(p.as_str()) {
                marking[i] = k as u8;
            }
        }
        let mut goal = vec![0u8; self.places.len()];
        for (p, &k) in &self.final_marking {
            if let Some(&i) = pidx.get(p.as_str()) {
                goal[i] = k as u8;
            }
        }

        type State = (Vec<u8>, PathTrace, BTreeMap<usize, bool>);
        let start: State = (marking, Vec::new(), BTreeMap::new());
        let mut seen: HashSet<State> = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        let mut out = Language::new();
        while let Some((m, trace, open)) = queue.pop_front() {
            if m == goal {
                out.insert(trace.clone());
            }
            for t in 0..n {
                if !pre[t].iter().all(|&p| m[p] > 0) {
                    continue;
                }
                let mut m2 = m.clone();
                for &p in &pre[t] {
                    m2[p] -= 1;
                }
                for &p in &post[t] {
                    m2[p] = m2[p].saturating_add(1);
                }
                let mut trace2 = trace.clone();
                let mut open2 = open.clone();
                let tr = &self.transitions[t];
                let emitted = match tr.kind {
                    TransitionKind::Start => Some(tr.path.clone()),
                    TransitionKind::CallStart => {
                        open2.insert(t, false);
                        None
                    }
                    TransitionKind::CallEnd => {
                        let inner = owner[t].and_then(|s| open2.remove(&s)).unwrap_or(false);
                        (!inner).then(|| tr.path.clone())
                    }
                    TransitionKind::End | TransitionKind::Silent => None,
                };
                if let Some(p) = emitted {
                    if trace2.len() == max_events {
                        continue;
                    }
                    trace2.push(p);
                    // a call end reports to the call around its own start
                    let mut c = match tr.kind {
                        TransitionKind::CallEnd => owner[t].and_then(|s| owner[s]),
                        _ => owner[t],
                    };
                    while let Some(ci) = c {
                        if let Some(flag) = open2.get_mut(&ci) {
                            *flag = true;
                        }
                        c = owner[ci];
                    }
                }
                let next = (m2, trace2, open2);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        out
    }
}
