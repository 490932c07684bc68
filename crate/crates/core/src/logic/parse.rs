//! S-expression sentences.
//!
//! ```text
//! sentence := "(" ("forall" | "exists") "(" var* ")" sentence ")" | formula
//! formula  := "(" "rel" symbol var* ")" | "(" "eq" var var ")"
//!           | "(" "not" formula ")" | "(" "and" formula* ")" | "(" "or" formula* ")"
//!           | "(" "implies" formula formula ")"
//! ```
//!
//! Quantifiers may only appear in the leading blocks. Axiom files hold one
//! sentence per line, optionally prefixed by a scheme tag `[a]`..`[d]`; blank
//! lines and `#` comments are skipped.

use std::collections::HashMap;

use super::sentence::{is_var, Formula, Quantifier, SchemeTag, Sentence};
use crate::error::{Error, Result};
use crate::structure::Vocabulary;

#[derive(Debug, Clone, PartialEq)]
enum Tree {
    Atom(String, usize, usize),
    List(Vec<Tree>, usize, usize),
}

impl Tree {
    fn pos(&self) -> (usize, usize) {
        match self {
            Tree::Atom(_, l, c) | Tree::List(_, l, c) => (*l, *c),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.pos();
        Error::parse(l, c, msg)
    }
}

fn read_trees(text: &str, line0: usize, col0: usize) -> Result<Vec<Tree>> {
    let mut stack: Vec<(Vec<Tree>, usize, usize)> = vec![(Vec::new(), line0, col0)];
    let mut line = line0;
    let mut col = col0;
    let mut atom: Option<(String, usize, usize)> = None;
    let flush = |atom: &mut Option<(String, usize, usize)>,
                 stack: &mut Vec<(Vec<Tree>, usize, usize)>| {
        if let Some((a, l, c)) = atom.take() {
            stack
                .last_mut()
                .expect("root frame")
                .0
                .push(Tree::Atom(a, l, c));
        }
    };
    for ch in text.chars() {
        match ch {
            '(' => {
                flush(&mut atom, &mut stack);
                stack.push((Vec::new(), line, col));
            }
            ')' => {
                flush(&mut atom, &mut stack);
                if stack.len() == 1 {
                    return Err(Error::parse(line, col, "unbalanced ')'"));
                }
                let (items, l, c) = stack.pop().expect("frame");
                stack
                    .last_mut()
                    .expect("root frame")
                    .0
                    .push(Tree::List(items, l, c));
            }
            c if c.is_whitespace() => flush(&mut atom, &mut stack),
            c => match &mut atom {
                Some((s, _, _)) => s.push(c),
                None => atom = Some((c.to_string(), line, col)),
            },
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    flush(&mut atom, &mut stack);
    if stack.len() > 1 {
        let (_, l, c) = stack.last().expect("frame");
        return Err(Error::parse(*l, *c, "unclosed '('"));
    }
    Ok(stack.pop().expect("root").0)
}

struct Builder<'v> {
    prefix: Vec<(Quantifier, String)>,
    vocab: Option<&'v Vocabulary>,
    arities: HashMap<String, usize>,
}

impl Builder<'_> {
    fn var(&self, t: &Tree) -> Result<usize> {
        match t {
            Tree::Atom(a, ..) => self
                .prefix
                .iter()
                .position(|(_, v)| v == a)
                .ok_or_else(|| Error::Unbound(a.clone())),
            Tree::List(..) => Err(t.err("expected a variable")),
        }
    }

    fn sentence(&mut self, t: &Tree, allow_quant: bool) -> Result<Formula> {
        let Tree::List(items, ..) = t else {
            return Err(t.err("expected a list"));
        };
        let Some(Tree::Atom(head, ..)) = items.first() else {
            return Err(t.err("expected a keyword"));
        };
        match head.as_str() {
            "forall" | "exists" => {
                if !allow_quant {
                    return Err(t.err("quantifier inside the matrix; only prenex form is accepted"));
                }
                let q = if head == "forall" {
                    Quantifier::Forall
                } else {
                    Quantifier::Exists
                };
                if items.len() != 3 {
                    return Err(t.err(format!("{head} takes a variable list and a body")));
                }
                let Tree::List(vars, ..) = &items[1] else {
                    return Err(items[1].err("expected a variable list"));
                };
                for v in vars {
                    let Tree::Atom(name, ..) = v else {
                        return Err(v.err("expected a variable"));
                    };
                    if !is_var(name) {
                        return Err(v.err(format!("bad variable name {name}")));
                    }
                    if self.prefix.iter().any(|(_, w)| w == name) {
                        return Err(v.err(format!("variable {name} bound twice")));
                    }
                    self.prefix.push((q, name.clone()));
                }
                self.sentence(&items[2], true)
            }
            _ => self.formula(t),
        }
    }

    fn formula(&mut self, t: &Tree) -> Result<Formula> {
        let Tree::List(items, ..) = t else {
            return Err(t.err("expected a formula"));
        };
        let Some(Tree::Atom(head, ..)) = items.first() else {
            return Err(t.err("expected a keyword"));
        };
        let args = &items[1..];
        match head.as_str() {
            "rel" => {
                let Some(Tree::Atom(sym, ..)) = args.first() else {
                    return Err(t.err("rel needs a symbol"));
                };
                let vars = args[1..]
                    .iter()
                    .map(|a| self.var(a))
                    .collect::<Result<Vec<_>>>()?;
                let expected = match self.vocab {
                    Some(v) => Some(
                        v.index_of(sym)
                            .map(|i| v.arity(i))
                            .ok_or_else(|| Error::UnknownSymbol(sym.clone()))?,
                    ),
                    None => self.arities.get(sym).copied(),
                };
                if let Some(e) = expected {
                    if e != vars.len() {
                        return Err(Error::ArityMismatch {
                            symbol: sym.clone(),
                            expected: e,
                            found: vars.len(),
                        });
                    }
                }
                if vars.is_empty() {
                    return Err(t.err("relation atoms need arguments"));
                }
                self.arities.insert(sym.clone(), vars.len());
                Ok(Formula::Rel(sym.clone(), vars))
            }
            "eq" => {
                if args.len() != 2 {
                    return Err(t.err("eq takes two variables"));
                }
                Ok(Formula::Eq(self.var(&args[0])?, self.var(&args[1])?))
            }
            "not" => {
                if args.len() != 1 {
                    return Err(t.err("not takes one formula"));
                }
                Ok(Formula::not(self.sub(&args[0])?))
            }
            "and" | "or" => {
                let fs = args
                    .iter()
                    .map(|a| self.sub(a))
                    .collect::<Result<Vec<_>>>()?;
                Ok(if head == "and" {
                    Formula::And(fs)
                } else {
                    Formula::Or(fs)
                })
            }
            "implies" => {
                if args.len() != 2 {
                    return Err(t.err("implies takes two formulas"));
                }
                Ok(Formula::implies(self.sub(&args[0])?, self.sub(&args[1])?))
            }
            other => Err(items[0].err(format!("unknown keyword {other}"))),
        }
    }

    fn sub(&mut self, t: &Tree) -> Result<Formula> {
        if let Tree::List(items, ..) = t {
            if let Some(Tree::Atom(h, ..)) = items.first() {
                if h == "forall" || h == "exists" {
                    return Err(t.err("quantifier inside the matrix; only prenex form is accepted"));
                }
            }
        }
        self.formula(t)
    }
}

fn parse_at(text: &str, vocab: Option<&Vocabulary>, line: usize, col: usize) -> Result<Sentence> {
    let trees = read_trees(text, line, col)?;
    let tree = match trees.as_slice() {
        [t] => t,
        [] => return Err(Error::parse(line, col, "empty input")),
        [_, t, ..] => return Err(t.err("trailing input after sentence")),
    };
    let mut b = Builder {
        prefix: Vec::new(),
        vocab,
        arities: HashMap::new(),
    };
    let matrix = b.sentence(tree, true)?;
    Sentence::new(b.prefix, matrix, SchemeTag::None)
}

/// Parse one sentence; relation arities must be used consistently.
pub fn parse_sentence(text: &str) -> Result<Sentence> {
    parse_at(text, None, 1, 1)
}

/// Parse one sentence, checking its symbols against a vocabulary.
pub fn parse_sentence_for(text: &str, vocab: &Vocabulary) -> Result<Sentence> {
    parse_at(text, Some(vocab), 1, 1)
}

/// Parse an axiom file.
pub fn parse_axiom_file(text: &str, vocab: Option<&Vocabulary>) -> Result<Vec<Sentence>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let mut col = body.len() - trimmed.len() + 1;
        let mut rest = trimmed;
        let mut tag = SchemeTag::None;
        if let Some(r) = rest.strip_prefix('[') {
            let mut chars = r.chars();
            let t = chars
                .next()
                .and_then(SchemeTag::from_letter)
                .ok_or_else(|| Error::parse(line, col, "expected scheme tag [a]..[d]"))?;
            let r = chars
                .as_str()
                .strip_prefix(']')
                .ok_or_else(|| Error::parse(line, col, "unterminated scheme tag"))?;
            tag = t;
            col += 3;
            rest = r;
        }
        out.push(parse_at(rest, vocab, line, col)?.with_tag(tag));
    }
    Ok(out)
}

pub fn emit_axiom_file(axioms: &[Sentence]) -> String {
    let mut out = String::new();
    for a in axioms {
        out.push_str(&a.to_line());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetry_round_trip() {
        let text = "(forall (x y) (implies (rel E x y) (rel E y x)))";
        let s = parse_sentence(text).unwrap();
        assert_eq!(s.quantifier_count(), 2);
        assert_eq!(s.to_sexpr(), text);
    }

    #[test]
    fn nonemptiness() {
        let s = parse_sentence("(exists (x) (eq x x))").unwrap();
        assert_eq!(s.matrix, Formula::Eq(0, 0));
    }

    #[test]
    fn unbound_variable() {
        let err = parse_sentence("(forall (x) (rel E x y))").unwrap_err();
        assert_eq!(err.to_string(), "unbound y");
    }

    #[test]
    fn arity_errors() {
        let v = Vocabulary::new([("E", 2)]).unwrap();
        assert!(matches!(
            parse_sentence_for("(forall (x) (rel E x))", &v),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            parse_sentence("(forall (x y) (or (rel E x) (rel E x y)))"),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn positions_and_prenex() {
        match parse_sentence("(forall (x) (and (exists (y) (eq x y))))") {
            Err(Error::Parse { pos, .. }) => assert_eq!((pos.line, pos.col), (1, 18)),
            other => panic!("{other:?}"),
        }
        assert!(parse_sentence("(forall (x) (eq x x)").is_err());
        assert!(parse_sentence("(frob)").is_err());
    }

    #[test]
    fn axiom_file_round_trip() {
        let text = "[a] (forall (x1) (not (rel E x1 x1)))\n[d] (forall (x1) (exists (x2) (and (not (eq x1 x2)) (rel E x1 x2))))\n(and)\n";
        let axioms = parse_axiom_file(text, None).unwrap();
        assert_eq!(axioms[0].tag, SchemeTag::A);
        assert_eq!(axioms[2].tag, SchemeTag::None);
        assert_eq!(emit_axiom_file(&axioms), text);
    }
}
