//! Language-preserving simplification.

use super::{Operator, Tree};

/// Applies, innermost first and to a fixpoint:
/// singleton collapse of `seq`/`xor`/`par`, flattening of nested `seq` and
/// nested `par`, `tau` removal in `seq`/`par`, and `tau` removal in `xor` when
/// another remaining child still produces ε.
pub fn reduce(tree: &Tree) -> Tree {
    match tree {
        Tree::Op(op, cs) => {
            let cs: Vec<Tree> = cs.iter().map(reduce).collect();
            reduce_node(*op, cs)
        }
        Tree::Named(f, c) => Tree::Named(f.clone(), Box::new(reduce(c))),
        other => other.clone(),
    }
}

/// Children are already reduced.
fn reduce_node(op: Operator, cs: Vec<Tree>) -> Tree {
    let mut cs = cs;
    if matches!(op, Operator::Seq | Operator::Par) {
        let mut flat = Vec::with_capacity(cs.len());
        for c in cs {
            match c {
                Tree::Op(inner, gs) if inner == op => flat.extend(gs),
                Tree::Silent => {}
                other => flat.push(other),
            }
        }
        if flat.is_empty() {
            return Tree::Silent;
        }
        cs = flat;
    }
    if op == Operator::Xor {
        while let Some(i) = cs.iter().position(|c| *c == Tree::Silent) {
            let others_nullable = cs.iter().enumerate().any(|(j, c)| j != i && c.nullable());
            if !others_nullable {
                break;
            }
            cs.remove(i);
        }
    }
    if op != Operator::Loop && cs.len() == 1 {
        return cs.pop().expect("one child");
    }
    Tree::Op(op, cs)
}
