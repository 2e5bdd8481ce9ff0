//! JSON form of a tree: `{kind, activity?, name?, children?}` with kind one of
//! `tau`, `act`, `seq`, `xor`, `loop`, `par`, `sub`, `rec`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::ExportError;
use crate::log::Activity;
use crate::tree::{NodeId, Operator, Tree};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonNode {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children: Option<Vec<JsonNode>>,
    /// Node id (`r.0.1`), only when annotated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq: Option<u64>,
}

fn node(tree: &Tree, id: NodeId, freq: Option<&BTreeMap<NodeId, u64>>) -> JsonNode {
    let children = |cs: &[Tree]| Some(cs.iter().enumerate().map(|(i, c)| node(c, id.child(i), freq)).collect());
    let (kind, activity, name, kids) = match tree {
        Tree::Silent => ("tau", None, None, None),
        Tree::Activity(a) => ("act", Some(a.to_string()), None, None),
        Tree::Op(op, cs) => (op.keyword(), None, None, children(cs)),
        Tree::Named(f, c) => ("sub", None, Some(f.to_string()), children(std::slice::from_ref(c))),
        Tree::Recursion(f) => ("rec", None, Some(f.to_string()), None),
    };
    JsonNode {
        kind: kind.to_string(),
        activity,
        name,
        children: kids,
        id: freq.map(|_| id.to_string()),
        freq: freq.and_then(|m| m.get(&id).copied()),
    }
}

pub fn to_json_value(tree: &Tree) -> serde_json::Value {
    serde_json::to_value(node(tree, NodeId::root(), None)).expect("tree JSON is serializable")
}

pub fn to_json(tree: &Tree) -> String {
    serde_json::to_string(&node(tree, NodeId::root(), None)).expect("tree JSON is serializable")
}

/// JSON with every node's id and, where known, its frequency.
pub fn to_json_annotated(tree: &Tree, freq: &BTreeMap<NodeId, u64>) -> serde_json::Value {
    serde_json::to_value(node(tree, NodeId::root(), Some(freq))).expect("tree JSON is serializable")
}

fn bad(msg: impl Into<String>) -> ExportError {
    ExportError::MalformedJson(msg.into())
}

fn parse_node(n: &JsonNode) -> Result<Tree, ExportError> {
    let name = |field: &Option<String>, what: &str| -> Result<Activity, ExportError> {
        let s = field
            .as_deref()
            .ok_or_else(|| bad(format!("{} node without {what}", n.kind)))?;
        Activity::new(s).map_err(|e| bad(e.to_string()))
    };
    let kids = || -> Result<Vec<Tree>, ExportError> {
        n.children
            .as_deref()
            .unwrap_or_default()
            .iter()
            .map(parse_node)
            .collect()
    };
    let op = |op: Operator| -> Result<Tree, ExportError> {
        let cs = kids()?;
        if cs.len() < 2 {
            return Err(bad(format!("{} needs at least two children", n.kind)));
        }
        Ok(Tree::Op(op, cs))
    };
    match n.kind.as_str() {
        "tau" => Ok(Tree::Silent),
        "act" => Ok(Tree::Activity(name(&n.activity, "activity")?)),
        "seq" => op(Operator::Seq),
        "xor" => op(Operator::Xor),
        "par" => op(Operator::Par),
        "loop" => op(Operator::Loop),
        "sub" => {
            let mut cs = kids()?;
            if cs.len() != 1 {
                return Err(bad("sub needs exactly one child"));
            }
            Ok(Tree::Named(name(&n.name, "name")?, Box::new(cs.remove(0))))
        }
        "rec" => Ok(Tree::Recursion(name(&n.name, "name")?)),
        k => Err(bad(format!("unknown kind {k:?}"))),
    }
}

pub fn from_json_value(value: &serde_json::Value) -> Result<Tree, ExportError> {
    let n: JsonNode = serde_json::from_value(value.clone()).map_err(|e| bad(e.to_string()))?;
    parse_node(&n)
}

pub fn from_json(input: &str) -> Result<Tree, ExportError> {
    let n: JsonNode = serde_json::from_str(input).map_err(|e| bad(e.to_string()))?;
    parse_node(&n)
}
