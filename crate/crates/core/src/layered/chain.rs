//! Vocabulary chains and the layer file format.
//!
//! ```text
//! # comment (anywhere after '#')
//! layer <name>
//! add <name>/<arity> ...            symbols entering at this layer
//! diagonal <name> ...               optional; added symbols holding only on constant tuples
//! class <builtin|segmented-order|free>
//! forbid <e1,e2,...> <sym>(<e>,...) ...   only with `class free`; may repeat
//! end
//! ```
//!
//! Layers are numbered from 1 in file order. Each layer's vocabulary is the union
//! of the symbols added so far. `segmented-order` reads the first symbol as a
//! strict linear order and every later symbol as a diagonal initial segment, each
//! contained in the next. `free` admits every structure omitting the listed
//! configurations. A builtin class must match the layer vocabulary exactly.

use std::fmt::Write as _;
use std::sync::Arc;

use super::classes::SegmentedOrderClass;
use crate::error::{Error, Position, Result};
use crate::fraisse::{builtin_class, AgeClass, ForbiddenClass};
use crate::structure::{Structure, Vocabulary};

/// An increasing chain of vocabularies `L1 ⊂ L2 ⊂ ...` with arity bounds `l_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredVocabulary {
    layers: Vec<Arc<Vocabulary>>,
    bounds: Vec<usize>,
}

impl LayeredVocabulary {
    /// `added[i]` lists `(name, arity, diagonal)` for the symbols entering at layer `i + 1`.
    pub fn new(added: &[Vec<(String, usize, bool)>]) -> Result<Self> {
        if added.is_empty() {
            return Err(Error::Invalid(
                "a layered vocabulary needs at least one layer".into(),
            ));
        }
        let mut v = Vocabulary::empty();
        let mut layers = Vec::new();
        let mut bounds: Vec<usize> = Vec::new();
        let mut last_arity = 0;
        for (i, syms) in added.iter().enumerate() {
            if syms.is_empty() {
                return Err(Error::Invalid(format!("layer {} adds no symbols", i + 1)));
            }
            for (name, arity, diag) in syms {
                if *arity < last_arity {
                    return Err(Error::Invalid(format!(
                        "{name}/{arity} follows a symbol of arity {last_arity}; arities must not decrease along the chain"
                    )));
                }
                last_arity = *arity;
                v.push(name, *arity)?;
                if *diag {
                    v.set_diagonal(name)?;
                }
            }
            let l = v.max_arity();
            if let Some(prev) = bounds.last() {
                if l <= *prev {
                    return Err(Error::Invalid(format!(
                        "layer {} has arity bound {l}, not above the previous bound {prev}",
                        i + 1
                    )));
                }
            }
            bounds.push(l);
            layers.push(Arc::new(v.clone()));
        }
        Ok(LayeredVocabulary { layers, bounds })
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Vocabulary of layer `i` (from 1).
    pub fn layer(&self, i: usize) -> &Arc<Vocabulary> {
        &self.layers[i - 1]
    }

    /// Arity bound `l_i` (from 1).
    pub fn bound(&self, i: usize) -> usize {
        self.bounds[i - 1]
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    /// The layer at which a symbol enters.
    pub fn layer_of(&self, symbol: &str) -> Option<usize> {
        self.layers
            .iter()
            .position(|v| v.index_of(symbol).is_some())
            .map(|i| i + 1)
    }
}

/// How a layer's class is given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassDef {
    Builtin(String),
    SegmentedOrder,
    Free(Vec<ForbidDef>),
}

/// A forbidden configuration as written: domain names and atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbidDef {
    pub domain: Vec<String>,
    pub atoms: Vec<(String, Vec<String>)>,
    pub pos: Position,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerDef {
    pub name: String,
    pub added: Vec<(String, usize)>,
    pub diagonal: Vec<String>,
    pub class: ClassDef,
}

/// A parsed layer file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSpec {
    pub layers: Vec<LayerDef>,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos: Position { line, col },
        msg: msg.into(),
    }
}

fn words(line: &str) -> Vec<(usize, &str)> {
    let line = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_atom(text: &str, line: usize, col: usize) -> Result<(String, Vec<String>)> {
    let (name, rest) = text
        .split_once('(')
        .ok_or_else(|| perr(line, col, "expected name(args)"))?;
    let args = rest
        .strip_suffix(')')
        .ok_or_else(|| perr(line, col, "missing ')'"))?;
    if name.is_empty() {
        return Err(perr(line, col, "missing symbol name"));
    }
    let args: Vec<String> = args.split(',').map(|s| s.to_string()).collect();
    if args.iter().any(|a| a.is_empty()) {
        return Err(perr(line, col, "empty argument"));
    }
    Ok((name.to_string(), args))
}

impl LayerSpec {
    pub fn parse(text: &str) -> Result<Self> {
        struct Open {
            def: LayerDef,
            class: Option<(String, usize, usize)>,
            forbids: Vec<ForbidDef>,
        }
        let mut layers = Vec::new();
        let mut open: Option<Open> = None;
        let mut last = 0;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            last = ln;
            let w = words(raw);
            let Some(&(col, head)) = w.first() else {
                continue;
            };
            let args = &w[1..];
            match head {
                "layer" => {
                    if open.is_some() {
                        return Err(perr(ln, col, "layer inside a layer; missing end"));
                    }
                    let [(_, name)] = args else {
                        return Err(perr(ln, col, "expected: layer <name>"));
                    };
                    open = Some(Open {
                        def: LayerDef {
                            name: name.to_string(),
                            added: Vec::new(),
                            diagonal: Vec::new(),
                            class: ClassDef::SegmentedOrder,
                        },
                        class: None,
                        forbids: Vec::new(),
                    });
                }
                "add" | "diagonal" | "class" | "forbid" | "end" => {
                    let Some(o) = open.as_mut() else {
                        return Err(perr(ln, col, format!("{head} outside a layer")));
                    };
                    match head {
                        "add" => {
                            for (c, a) in args {
                                let (name, ar) = a
                                    .split_once('/')
                                    .ok_or_else(|| perr(ln, *c, "expected name/arity"))?;
                                let ar: usize =
                                    ar.parse().map_err(|_| perr(ln, *c, "bad arity"))?;
                                o.def.added.push((name.to_string(), ar));
                            }
                        }
                        "diagonal" => {
                            for (c, a) in args {
                                if !o.def.added.iter().any(|(n, _)| n == a) {
                                    return Err(perr(
                                        ln,
                                        *c,
                                        format!("{a} is not added at this layer"),
                                    ));
                                }
                                o.def.diagonal.push(a.to_string());
                            }
                        }
                        "class" => {
                            let [(c, name)] = args else {
                                return Err(perr(ln, col, "expected: class <name>"));
                            };
                            if o.class.is_some() {
                                return Err(perr(ln, col, "second class line"));
                            }
                            o.class = Some((name.to_string(), ln, *c));
                        }
                        "forbid" => {
                            let Some(&(c, dom)) = args.first() else {
                                return Err(perr(ln, col, "expected: forbid <elements> <atoms>"));
                            };
                            let domain: Vec<String> =
                                dom.split(',').map(|s| s.to_string()).collect();
                            if domain.iter().any(|d| d.is_empty()) {
                                return Err(perr(ln, c, "empty element name"));
                            }
                            let mut atoms = Vec::new();
                            for (c, a) in &args[1..] {
                                atoms.push(parse_atom(a, ln, *c)?);
                            }
                            o.forbids.push(ForbidDef {
                                domain,
                                atoms,
                                pos: Position { line: ln, col },
                            });
                        }
                        _ => {
                            let mut o = open.take().expect("open layer");
                            let Some((class, cl, cc)) = o.class.take() else {
                                return Err(perr(ln, col, "layer has no class line"));
                            };
                            o.def.class = match class.as_str() {
                                "segmented-order" => ClassDef::SegmentedOrder,
                                "free" => ClassDef::Free(std::mem::take(&mut o.forbids)),
                                other => ClassDef::Builtin(other.to_string()),
                            };
                            if let Some(f) = o.forbids.first() {
                                return Err(perr(
                                    f.pos.line,
                                    f.pos.col,
                                    "forbid lines need class free",
                                ));
                            }
                            if o.def.added.is_empty() {
                                return Err(perr(cl, cc, "layer adds no symbols"));
                            }
                            layers.push(o.def);
                        }
                    }
                }
                other => return Err(perr(ln, col, format!("unknown directive {other}"))),
            }
        }
        if open.is_some() {
            return Err(perr(last + 1, 1, "missing end"));
        }
        let spec = LayerSpec { layers };
        spec.vocabulary()?;
        Ok(spec)
    }

    /// Normalised layer file text; parsing it gives back `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, l) in self.layers.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "layer {}", l.name);
            let added: Vec<String> = l.added.iter().map(|(n, a)| format!("{n}/{a}")).collect();
            let _ = writeln!(out, "add {}", added.join(" "));
            if !l.diagonal.is_empty() {
                let _ = writeln!(out, "diagonal {}", l.diagonal.join(" "));
            }
            match &l.class {
                ClassDef::Builtin(b) => {
                    let _ = writeln!(out, "class {b}");
                }
                ClassDef::SegmentedOrder => out.push_str("class segmented-order\n"),
                ClassDef::Free(fs) => {
                    out.push_str("class free\n");
                    for f in fs {
                        let atoms: Vec<String> = f
                            .atoms
                            .iter()
                            .map(|(n, a)| format!("{n}({})", a.join(",")))
                            .collect();
                        let _ = writeln!(out, "forbid {} {}", f.domain.join(","), atoms.join(" "));
                    }
                }
            }
            out.push_str("end\n");
        }
        out
    }

    pub fn vocabulary(&self) -> Result<LayeredVocabulary> {
        let added: Vec<Vec<(String, usize, bool)>> = self
            .layers
            .iter()
            .map(|l| {
                l.added
                    .iter()
                    .map(|(n, a)| (n.clone(), *a, l.diagonal.contains(n)))
                    .collect()
            })
            .collect();
        LayeredVocabulary::new(&added)
    }

    /// The class of layer `i` (from 1), over the layer's cumulative vocabulary.
    pub fn class(&self, i: usize) -> Result<Box<dyn AgeClass>> {
        let lv = self.vocabulary()?;
        let vocab = lv.layer(i).clone();
        let def = &self.layers[i - 1];
        let name = format!("layer {} ({})", i, def.name);
        Ok(match &def.class {
            ClassDef::SegmentedOrder => Box::new(SegmentedOrderClass::new(&name, vocab)?),
            ClassDef::Builtin(b) => {
                let k = builtin_class(b)?;
                if k.vocabulary().symbols() != vocab.symbols() {
                    return Err(Error::VocabularyMismatch(format!(
                        "class {b} is not over the vocabulary of layer {i}"
                    )));
                }
                k
            }
            ClassDef::Free(fs) => {
                let mut forbidden = Vec::new();
                for f in fs {
                    let rels: Vec<(&str, Vec<Vec<&str>>)> = f
                        .atoms
                        .iter()
                        .map(|(n, a)| (n.as_str(), vec![a.iter().map(|s| s.as_str()).collect()]))
                        .collect();
                    let s = Structure::build(vocab.clone(), &f.domain, &rels)
                        .map_err(|e| perr(f.pos.line, f.pos.col, e.to_string()))?;
                    forbidden.push(s);
                }
                Box::new(ForbiddenClass::new(&name, vocab, None, forbidden)?)
            }
        })
    }
}

/// Layer file for a dense order with `n` constants `c1 < ... < cn`, each
/// represented by the initial segment `x <= c_j` as a diagonal relation `le_j` of
/// arity `j + 1`. Layer 1 holds the order and the first segment.
pub fn constants_example(n: usize) -> LayerSpec {
    let mut layers = Vec::new();
    for j in 1..=n.max(1) {
        let mut added = Vec::new();
        if j == 1 {
            added.push(("lt".to_string(), 2));
        }
        added.push((format!("le{j}"), j + 1));
        layers.push(LayerDef {
            name: format!("c{j}"),
            added,
            diagonal: vec![format!("le{j}")],
            class: ClassDef::SegmentedOrder,
        });
    }
    LayerSpec { layers }
}
