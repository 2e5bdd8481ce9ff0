//! Textual tree notation:
//!
//! ```text
//! tree := "tau" | op "(" tree ("," tree)* ")" | "sub:" name "(" tree ")"
//!       | "rec:" name | name
//! op   := "seq" | "xor" | "loop" | "par"
//! name := bare | '"' (escaped char)* '"'
//! ```
//!
//! Bare names use letters, digits and `_ . - $`; anything else (and the
//! keywords themselves) is written quoted with `\"` and `\\` escapes.

use std::fmt::Write;

use super::{Operator, Tree};
use crate::error::TreeError;
use crate::log::Activity;

const KEYWORDS: &[&str] = &["tau", "seq", "xor", "loop", "par", "sub", "rec"];

fn is_bare_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '-' | '$')
}

fn write_name(out: &mut String, name: &str) {
    if !name.is_empty() && name.chars().all(is_bare_char) && !KEYWORDS.contains(&name) {
        out.push_str(name);
        return;
    }
    out.push('"');
    for c in name.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
}

impl Tree {
    /// Prints the tree in its current child order. `Display` prints the
    /// canonical form instead.
    pub fn to_notation(&self) -> String {
        let mut out = String::new();
        write_tree(&mut out, self);
        out
    }
}

fn write_tree(out: &mut String, t: &Tree) {
    match t {
        Tree::Activity(a) => write_name(out, a.as_str()),
        Tree::Silent => out.push_str("tau"),
        Tree::Recursion(a) => {
            out.push_str("rec:");
            write_name(out, a.as_str());
        }
        Tree::Named(f, c) => {
            out.push_str("sub:");
            write_name(out, f.as_str());
            out.push('(');
            write_tree(out, c);
            out.push(')');
        }
        Tree::Op(op, cs) => {
            let _ = write!(out, "{}(", op.keyword());
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_tree(out, c);
            }
            out.push(')');
        }
    }
}

pub fn parse_tree(input: &str) -> Result<Tree, TreeError> {
    let mut p = Parser { src: input, pos: 0 };
    let tree = p.tree()?;
    p.skip_ws();
    if p.pos != input.len() {
        return Err(p.error("trailing input"));
    }
    Ok(tree)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> TreeError {
        TreeError::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TreeError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    /// Returns the name and whether it was quoted.
    fn name(&mut self) -> Result<(String, bool), TreeError> {
        self.skip_ws();
        if self.rest().starts_with('"') {
            self.pos += 1;
            let mut out = String::new();
            let mut chars = self.rest().char_indices();
            loop {
                match chars.next() {
                    None => return Err(self.error("unterminated quoted name")),
                    Some((i, '"')) => {
                        self.pos += i + 1;
                        return Ok((out, true));
                    }
                    Some((_, '\\')) => match chars.next() {
                        Some((_, c)) => out.push(c),
                        None => return Err(self.error("dangling escape")),
                    },
                    Some((_, c)) => out.push(c),
                }
            }
        }
        let len: usize = self
            .rest()
            .chars()
            .take_while(|&c| is_bare_char(c))
            .map(char::len_utf8)
            .sum();
        if len == 0 {
            return Err(self.error("expected a name"));
        }
        let name = self.rest()[..len].to_string();
        self.pos += len;
        Ok((name, false))
    }

    fn activity(&self, name: String) -> Result<Activity, TreeError> {
        Activity::new(&name).map_err(|_| self.error(&format!("invalid activity {name:?}")))
    }

    fn tree(&mut self) -> Result<Tree, TreeError> {
        let (word, quoted) = self.name()?;
        if quoted {
            return Ok(Tree::Activity(self.activity(word)?));
        }
        if (word == "sub" || word == "rec") && self.rest().starts_with(':') {
            self.pos += 1;
            let (name, _) = self.name()?;
            let name = self.activity(name)?;
            if word == "rec" {
                return Ok(Tree::Recursion(name));
            }
            self.expect('(')?;
            let child = self.tree()?;
            self.expect(')')?;
            return Ok(Tree::Named(name, Box::new(child)));
        }
        let op = match word.as_str() {
            "tau" => return Ok(Tree::Silent),
            "seq" => Operator::Seq,
            "xor" => Operator::Xor,
            "loop" => Operator::Loop,
            "par" => Operator::Par,
            "sub" | "rec" => return Err(self.error("expected ':' after sub/rec")),
            _ => return Ok(Tree::Activity(self.activity(word)?)),
        };
        self.expect('(')?;
        let mut children = vec![self.tree()?];
        while self.eat(',') {
            children.push(self.tree()?);
        }
        self.expect(')')?;
        if op == Operator::Loop && children.len() < 2 {
            return Err(self.error("loop needs a body and at least one redo branch"));
        }
        Ok(Tree::Op(op, children))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log::testutil::act;
    use proptest::prelude::*;

    #[test]
    fn parses_every_construct() {
        let t = parse_tree(
            r#"sub:"Main.main()"(seq("Main.input()", xor(a, rec:"Main.main()"), tau, loop(b, c), par(d, e)))"#,
        )
        .unwrap();
        let Tree::Named(name, body) = &t else { panic!() };
        assert_eq!(name.as_str(), "Main.main()");
        let Tree::Op(Operator::Seq, cs) = body.as_ref() else {
            panic!()
        };
        assert_eq!(cs.len(), 5);
        assert_eq!(cs[0], Tree::Activity(act("Main.input()")));
        assert_eq!(cs[2], Tree::Silent);
    }

    #[test]
    fn quoting_of_keywords_and_delimiters() {
        for name in ["seq", "tau", "a b", "x\"y", "back\\slash", "p.C.m()", "sub:x"] {
            let t = Tree::Activity(act(name));
            let printed = t.to_notation();
            assert!(printed.starts_with('"'), "{printed}");
            assert_eq!(parse_tree(&printed).unwrap(), t);
        }
        assert_eq!(Tree::Activity(act("Main.x")).to_notation(), "Main.x");
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "", "seq(", "seq()", "loop(a)", "a b", "sub:f", "\"open", "xor(a,)", "\"τ\"",
        ] {
            assert!(parse_tree(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn display_is_canonical() {
        let t = parse_tree("xor(c, seq(b, a), a)").unwrap();
        assert_eq!(t.to_string(), "xor(a, c, seq(b, a))");
        assert_eq!(parse_tree("par(b, a)").unwrap().to_string(), "par(a, b)");
    }

    fn arb_name() -> impl Strategy<Value = String> {
        prop_oneof!["[a-c]", "[a-z(). ]{1,6}", Just("seq".to_string())]
            .prop_filter("valid activity", |s| Activity::new(s).is_ok())
    }

    fn arb_tree() -> impl Strategy<Value = Tree> {
        let leaf = prop_oneof![
            arb_name().prop_map(|n| Tree::Activity(act(&n))),
            Just(Tree::Silent),
            arb_name().prop_map(|n| Tree::Recursion(act(&n))),
        ];
        leaf.prop_recursive(4, 24, 4, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..4).prop_map(Tree::seq),
                prop::collection::vec(inner.clone(), 1..4).prop_map(Tree::xor),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Tree::looped),
                prop::collection::vec(inner.clone(), 1..4).prop_map(Tree::par),
                (arb_name(), inner).prop_map(|(n, c)| Tree::named(&act(&n), c)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(tree in arb_tree()) {
            let printed = tree.to_notation();
            prop_assert_eq!(parse_tree(&printed).unwrap(), tree.clone());
            let canonical = tree.to_string();
            prop_assert_eq!(parse_tree(&canonical).unwrap().to_string(), canonical);
        }
    }
}
