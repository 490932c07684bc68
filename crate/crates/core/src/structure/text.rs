//! Line-based structure files.
//!
//! ```text
//! # comment (anywhere after '#')
//! vocab <name>/<arity> ...          first directive, exactly once
//! partition <unary> <unary>          optional
//! sort <name> <unary|_> ...          optional, one per restricted symbol
//! diagonal <name> ...                optional
//! structure <id>
//! domain <elem> ...
//! rel <name> (<elem>,...,<elem>) ... may repeat; tuples accumulate
//! end
//! ```
//!
//! Tokens are separated by whitespace, so tuples contain no spaces. A file may
//! hold several `structure` blocks over the shared vocabulary. The emitter writes
//! the normalised form: annotations in vocabulary order, one `rel` line per
//! non-empty symbol, tuples in domain order, blocks separated by one blank line.
//! Parsing a normalised file and emitting it again reproduces it byte for byte.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use super::finite::{Structure, Tuple};
use super::vocab::{is_identifier, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureFile {
    pub vocab: Arc<Vocabulary>,
    pub structures: Vec<(String, Structure)>,
}

impl StructureFile {
    pub fn single(id: &str, s: Structure) -> Self {
        StructureFile {
            vocab: s.vocab().clone(),
            structures: vec![(id.to_string(), s)],
        }
    }

    /// The only structure of a one-structure file.
    pub fn into_single(self) -> Result<(String, Structure)> {
        if self.structures.len() != 1 {
            return Err(Error::Invalid(format!(
                "expected one structure, found {}",
                self.structures.len()
            )));
        }
        Ok(self.structures.into_iter().next().expect("one structure"))
    }
}

struct Tok<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

fn tokens(line: &str, lineno: usize) -> Vec<Tok<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok {
                    text: &body[s..i],
                    line: lineno,
                    col: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok {
            text: &body[s..],
            line: lineno,
            col: s + 1,
        });
    }
    out
}

fn perr(t: &Tok<'_>, msg: impl Into<String>) -> Error {
    Error::parse(t.line, t.col, msg)
}

struct Pending {
    id: String,
    domain: Vec<String>,
    rels: Vec<BTreeSet<Tuple>>,
    raw: Vec<(usize, usize, usize, Vec<String>)>,
}

pub fn parse_structures(text: &str) -> Result<StructureFile> {
    let mut vocab: Option<Vocabulary> = None;
    let mut frozen: Option<Arc<Vocabulary>> = None;
    let mut current: Option<Pending> = None;
    let mut structures = Vec::new();
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let toks = tokens(line, lineno);
        let Some(head) = toks.first() else { continue };
        let args = &toks[1..];
        match head.text {
            "vocab" => {
                if vocab.is_some() {
                    return Err(perr(head, "second vocab line"));
                }
                let mut v = Vocabulary::empty();
                for a in args {
                    let (name, arity) = a
                        .text
                        .split_once('/')
                        .ok_or_else(|| perr(a, "expected name/arity"))?;
                    let arity: usize = arity.parse().map_err(|_| perr(a, "bad arity"))?;
                    v.push(name, arity).map_err(|e| perr(a, e.to_string()))?;
                }
                vocab = Some(v);
            }
            "partition" | "sort" | "diagonal" => {
                if frozen.is_some() {
                    return Err(perr(head, "annotations must precede structures"));
                }
                let v = vocab
                    .as_mut()
                    .ok_or_else(|| perr(head, "missing vocab line"))?;
                let res = match head.text {
                    "partition" => {
                        if args.len() != 2 {
                            return Err(perr(head, "partition takes two symbols"));
                        }
                        v.set_partition(args[0].text, args[1].text)
                    }
                    "sort" => {
                        let (sym, pos) = args
                            .split_first()
                            .ok_or_else(|| perr(head, "sort needs a symbol"))?;
                        let pos: Vec<Option<&str>> = pos
                            .iter()
                            .map(|p| if p.text == "_" { None } else { Some(p.text) })
                            .collect();
                        v.set_sort(sym.text, &pos)
                    }
                    _ => args.iter().try_for_each(|a| v.set_diagonal(a.text)),
                };
                res.map_err(|e| perr(head, e.to_string()))?;
            }
            "structure" => {
                if current.is_some() {
                    return Err(perr(head, "structure block not closed"));
                }
                let v = match &frozen {
                    Some(v) => v.clone(),
                    None => {
                        let v = Arc::new(
                            vocab
                                .clone()
                                .ok_or_else(|| perr(head, "missing vocab line"))?,
                        );
                        frozen = Some(v.clone());
                        v
                    }
                };
                if args.len() != 1 || !is_identifier(args[0].text) {
                    return Err(perr(head, "structure takes one identifier"));
                }
                current = Some(Pending {
                    id: args[0].text.to_string(),
                    domain: Vec::new(),
                    rels: vec![BTreeSet::new(); v.len()],
                    raw: Vec::new(),
                });
            }
            "domain" => {
                let cur = current
                    .as_mut()
                    .ok_or_else(|| perr(head, "domain outside structure"))?;
                for a in args {
                    if !is_identifier(a.text) {
                        return Err(perr(a, "bad element name"));
                    }
                    if cur.domain.iter().any(|d| d == a.text) {
                        return Err(perr(a, format!("duplicate element {}", a.text)));
                    }
                    cur.domain.push(a.text.to_string());
                }
            }
            "rel" => {
                let cur = current
                    .as_mut()
                    .ok_or_else(|| perr(head, "rel outside structure"))?;
                let v = frozen.as_ref().expect("vocabulary frozen in structure");
                let (sym, tups) = args
                    .split_first()
                    .ok_or_else(|| perr(head, "rel needs a symbol"))?;
                let r = v
                    .index_of(sym.text)
                    .ok_or_else(|| perr(sym, format!("unknown symbol {}", sym.text)))?;
                for t in tups {
                    let inner = t
                        .text
                        .strip_prefix('(')
                        .and_then(|x| x.strip_suffix(')'))
                        .ok_or_else(|| perr(t, "expected (e,...)"))?;
                    let elems: Vec<String> = inner.split(',').map(str::to_string).collect();
                    if elems.len() != v.arity(r) {
                        return Err(perr(
                            t,
                            format!(
                                "arity mismatch: {} expects {} arguments, got {}",
                                sym.text,
                                v.arity(r),
                                elems.len()
                            ),
                        ));
                    }
                    cur.raw.push((r, t.line, t.col, elems));
                }
            }
            "end" => {
                let cur = current
                    .take()
                    .ok_or_else(|| perr(head, "end without structure"))?;
                let v = frozen.clone().expect("vocabulary frozen");
                structures.push((cur.id.clone(), finish(v, cur)?));
            }
            other => return Err(perr(head, format!("unknown directive {other}"))),
        }
    }
    if current.is_some() {
        return Err(Error::parse(last_line + 1, 1, "missing end"));
    }
    let vocab = match frozen {
        Some(v) => v,
        None => Arc::new(vocab.ok_or_else(|| Error::parse(1, 1, "missing vocab line"))?),
    };
    Ok(StructureFile { vocab, structures })
}

fn finish(v: Arc<Vocabulary>, mut p: Pending) -> Result<Structure> {
    for (r, line, col, elems) in std::mem::take(&mut p.raw) {
        let mut t = Vec::with_capacity(elems.len());
        for e in &elems {
            let i = p
                .domain
                .iter()
                .position(|d| d == e)
                .ok_or_else(|| Error::parse(line, col, format!("unknown element {e}")))?;
            t.push(i);
        }
        p.rels[r].insert(t);
    }
    Structure::from_parts(v, p.domain, p.rels)
}

pub fn parse_structure(text: &str) -> Result<Structure> {
    Ok(parse_structures(text)?.into_single()?.1)
}

pub fn emit_vocab(v: &Vocabulary) -> String {
    let mut out = String::from("vocab");
    for s in v.symbols() {
        let _ = write!(out, " {}/{}", s.name, s.arity);
    }
    out.push('\n');
    if let Some((a, b)) = v.partition() {
        let _ = writeln!(out, "partition {} {}", v.name(a), v.name(b));
    }
    for r in 0..v.len() {
        if let Some(pos) = v.sort(r) {
            out.push_str("sort ");
            out.push_str(v.name(r));
            for p in pos {
                out.push(' ');
                out.push_str(p.map_or("_", |u| v.name(u)));
            }
            out.push('\n');
        }
    }
    let diag: Vec<&str> = (0..v.len())
        .filter(|r| v.is_diagonal(*r))
        .map(|r| v.name(r))
        .collect();
    if !diag.is_empty() {
        let _ = writeln!(out, "diagonal {}", diag.join(" "));
    }
    out
}

fn emit_block(out: &mut String, id: &str, s: &Structure, comments: &[String]) {
    let _ = writeln!(out, "structure {id}");
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("domain");
    for n in s.names() {
        out.push(' ');
        out.push_str(n);
    }
    out.push('\n');
    for r in 0..s.vocab().len() {
        let rel = s.relation(r);
        if rel.is_empty() {
            continue;
        }
        out.push_str("rel ");
        out.push_str(s.vocab().name(r));
        for t in rel {
            out.push(' ');
            out.push_str(&s.fmt_tuple(t));
        }
        out.push('\n');
    }
    out.push_str("end\n");
}

pub fn emit_structures(file: &StructureFile) -> String {
    let mut out = emit_vocab(&file.vocab);
    for (i, (id, s)) in file.structures.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        emit_block(&mut out, id, s, &[]);
    }
    out
}

pub fn emit_structure(id: &str, s: &Structure) -> String {
    emit_structure_with_comments(id, s, &[])
}

/// As [`emit_structure`], with `#` comment lines after the `structure` line.
pub fn emit_structure_with_comments(id: &str, s: &Structure, comments: &[String]) -> String {
    let mut out = emit_vocab(s.vocab());
    emit_block(&mut out, id, s, comments);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EDGE: &str = "vocab E/2\nstructure g\ndomain a b\nrel E (a,b) (b,a)\nend\n";

    #[test]
    fn normalized_round_trip() {
        let f = parse_structures(EDGE).unwrap();
        assert_eq!(emit_structures(&f), EDGE);
        let annotated = "vocab P/1 Q/1 H/2\npartition P Q\nsort H Q Q\n\
                         structure x\ndomain p q\nrel P (p)\nrel Q (q)\nrel H (q,q)\nend\n\
                         \nstructure y\ndomain\nend\n";
        let f = parse_structures(annotated).unwrap();
        assert_eq!(f.structures.len(), 2);
        assert_eq!(emit_structures(&f), annotated);
    }

    #[test]
    fn comments_and_whitespace_are_ignored() {
        let messy = "# header\nvocab   E/2  # graph\nstructure g\n  domain a b\nrel E (b,a)\nrel E (a,b)\nend\n";
        let f = parse_structures(messy).unwrap();
        assert_eq!(emit_structures(&f), EDGE);
    }

    #[test]
    fn errors_carry_positions() {
        let err =
            parse_structures("vocab E/2\nstructure g\ndomain a\nrel E (a,b)\nend\n").unwrap_err();
        assert_eq!(err.to_string(), "parse error at 4:7: unknown element b");
        let err =
            parse_structures("vocab E/2\nstructure g\ndomain a\nrel E (a)\nend\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        assert!(parse_structures("vocab E/2\nstructure g\ndomain a\n").is_err());
        assert!(parse_structures("vocab E/x\n").is_err());
    }

    #[test]
    fn validation_errors_surface() {
        let bad =
            "vocab P/1 Q/1\npartition P Q\nstructure x\ndomain a\nrel P (a)\nrel Q (a)\nend\n";
        assert_eq!(
            parse_structures(bad).unwrap_err(),
            Error::PartitionViolation("a".into())
        );
    }
}
