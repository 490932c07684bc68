use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use fraisse_core::axioms::{generate_axioms, verify_model_of, AxiomBudget};
use fraisse_core::encoder::{
    amalgamate_k, decode as decode_structure, encode as encode_structure, label_all, no_new_npairs,
    EncodedClass, Encoding, TargetLanguage,
};
use fraisse_core::fraisse::{
    amalgamate_or_search, build_generic_approx, builtin_class, check_class_properties,
    enumerate_age_upto, type_count as count_types, AgeClass, CheckOptions, GenericOptions, Scope,
};
use fraisse_core::gadget::{
    assemble_gadget_axioms, build_gadget_class, categoricity_verdict, EnumerationTable,
};
use fraisse_core::layered::{
    back_and_forth_over_p, build_layered_presentation, check_layer_agreement, constants_example,
    detect_stabilization, LayerOptions, LayerPresentation, LayerSpec,
};
use fraisse_core::logic::{
    emit_axiom_file, parse_axiom_file, parse_sentence, EvalOptions, Sentence,
};
use fraisse_core::report::{Summary, Verdict, Witness};
use fraisse_core::structure::{emit_structure, parse_structures, Morphism, StructureFile};
use fraisse_core::{Error, Result, Structure, Vocabulary};

use crate::output::{Outcome, TextReport};
use crate::{
    Amalgamate, Axioms, BnfOverP, BuildGeneric, CheckClass, ClassSize, Decode, Encode,
    GadgetAxioms, GadgetVerdict, LayerCheck, LayerSource, ScopeArg, Stabilize,
};

/// A class named on the command line.
pub(crate) enum Resolved {
    Plain(Box<dyn AgeClass>),
    Encoded(EncodedClass),
}

impl Resolved {
    pub(crate) fn class(&self) -> &dyn AgeClass {
        match self {
            Resolved::Plain(k) => k.as_ref(),
            Resolved::Encoded(k) => k,
        }
    }
}

pub(crate) fn resolve(name: &str) -> Result<Resolved> {
    match name.strip_prefix("encoded-") {
        Some(base) => Ok(Resolved::Encoded(EncodedClass::new(builtin_class(base)?)?)),
        None => Ok(Resolved::Plain(builtin_class(name)?)),
    }
}

pub(crate) fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn read_structures(path: &Path) -> Result<StructureFile> {
    parse_structures(&read(path)?)
}

fn read_single(path: &Path) -> Result<(String, Structure)> {
    read_structures(path)?.into_single()
}

pub(crate) fn enumerate_age(a: &ClassSize) -> Result<Outcome> {
    let k = resolve(&a.class)?;
    let levels = enumerate_age_upto(k.class(), a.n, a.cap)?;
    let counts: Vec<String> = levels.iter().map(|l| l.len().to_string()).collect();
    let mut body = String::new();
    for (i, l) in levels.iter().enumerate() {
        let _ = writeln!(body, "size {i}: {}", l.len());
    }
    if let Some(last) = levels.last() {
        for (i, s) in last.iter().enumerate() {
            body.push('\n');
            body.push_str(&emit_structure(&format!("m{i}"), s));
        }
    }
    let mut s = Summary::new();
    s.push("class", k.class().name())
        .push("n", a.n)
        .push("counts", counts.join(","));
    Ok(Outcome::new(TextReport::new(body, s, Verdict::Pass)))
}

pub(crate) fn type_count(a: &ClassSize) -> Result<Outcome> {
    let k = resolve(&a.class)?;
    let t = count_types(k.class(), a.n, a.cap)?;
    let mut s = Summary::new();
    s.push("class", k.class().name())
        .push("n", a.n)
        .push("types", t);
    Ok(Outcome::new(TextReport::new(
        format!("{t}\n"),
        s,
        Verdict::Pass,
    )))
}

pub(crate) fn check_class(a: &CheckClass) -> Result<Outcome> {
    let k = resolve(&a.class)?;
    let opts = CheckOptions {
        scope: match a.scope {
            ScopeArg::Factors => Scope::Factors,
            ScopeArg::OnePoint => Scope::OnePoint,
        },
        amalgam_cap: a.amalgam_cap,
        enumeration_cap: a.cap,
        samples: a.samples,
        seed: a.seed,
    };
    Ok(Outcome::new(check_class_properties(
        k.class(),
        a.bound,
        &opts,
    )?))
}

pub(crate) fn build_generic(a: &BuildGeneric) -> Result<Outcome> {
    let k = resolve(&a.class)?;
    let opts = GenericOptions {
        size_cap: a.size_cap,
        skip: a.skip.clone(),
        ..GenericOptions::default()
    };
    let g = build_generic_approx(k.class(), a.level, &opts)?;
    let text = emit_structure("generic", &g.structure);
    Ok(Outcome::new(g).with_file(a.emit.as_ref(), text))
}

fn parse_labels(text: &str, enc: &Encoding, s: &Structure) -> Result<Vec<(usize, Vec<usize>)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut words = line.split_whitespace();
        let Some(sym) = words.next() else { continue };
        let k = enc
            .l0()
            .index_of(sym)
            .ok_or_else(|| Error::UnknownSymbol(format!("{sym} (labels line {})", no + 1)))?;
        let tuple = words
            .map(|w| {
                s.elem(w)
                    .ok_or_else(|| Error::UnknownElement(w.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push((enc.index(k), tuple));
    }
    Ok(out)
}

pub(crate) fn encode(a: &Encode) -> Result<Outcome> {
    let (id, s) = read_single(&a.input)?;
    let enc = Encoding::new(s.vocab().clone())?;
    let labels = match &a.labels {
        Some(p) => parse_labels(&read(p)?, &enc, &s)?,
        None => label_all(&enc, &s),
    };
    let e = encode_structure(&enc, &s, &labels)?;
    let text = e.emit(&id);
    let mut sum = Summary::new();
    sum.push("p_size", s.size())
        .push("size", e.structure.size())
        .push("npairs", e.npairs.len())
        .push(
            "indices",
            enc.indices()
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
    let body = if a.emit.is_some() {
        format!(
            "encoded {} elements into {} with {} n-pairs\n",
            s.size(),
            e.structure.size(),
            e.npairs.len()
        )
    } else {
        text.clone()
    };
    Ok(Outcome::new(TextReport::new(body, sum, Verdict::Pass)).with_file(a.emit.as_ref(), text))
}

fn parse_vocab_list(text: &str) -> Result<Vocabulary> {
    let mut syms = Vec::new();
    for item in text.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (name, arity) = item
            .rsplit_once('/')
            .ok_or_else(|| Error::Invalid(format!("expected name/arity, got {item}")))?;
        let arity: usize = arity
            .parse()
            .map_err(|_| Error::Invalid(format!("bad arity in {item}")))?;
        syms.push((name.to_string(), arity));
    }
    Vocabulary::new(syms)
}

pub(crate) fn decode(a: &Decode) -> Result<Outcome> {
    let (id, s) = read_single(&a.input)?;
    let l0 = match &a.l0 {
        Some(list) => parse_vocab_list(list)?,
        None => s
            .vocab()
            .restrict(|sym| !TargetLanguage::SYMBOLS.contains(&(sym.name.as_str(), sym.arity))),
    };
    if l0.is_empty() {
        return Err(Error::Invalid(
            "no encoded vocabulary: the file has only the fixed symbols; pass --l0".into(),
        ));
    }
    let enc = Encoding::new(Arc::new(l0))?;
    let d = decode_structure(&enc, &s)?;
    let text = emit_structure(&id, &d);
    let mut sum = Summary::new();
    sum.push("size", s.size())
        .push("decoded_size", d.size())
        .push("tuples", d.tuple_count());
    let body = if a.emit.is_some() {
        format!("decoded {} elements into {}\n", s.size(), d.size())
    } else {
        text.clone()
    };
    Ok(Outcome::new(TextReport::new(body, sum, Verdict::Pass)).with_file(a.emit.as_ref(), text))
}

fn by_names(c: &Structure, d: &Structure, id: &str) -> Result<Morphism> {
    let map = c
        .elems()
        .map(|e| {
            d.elem(c.name(e))
                .ok_or_else(|| Error::UnknownElement(format!("{} (missing from {id})", c.name(e))))
        })
        .collect::<Result<Vec<_>>>()?;
    let f = Morphism::new(map);
    if !f.is_embedding(c, d) {
        return Err(Error::Invalid(format!(
            "c does not embed into {id} by element names"
        )));
    }
    Ok(f)
}

pub(crate) fn amalgamate(a: &Amalgamate) -> Result<Outcome> {
    let k = resolve(&a.class)?;
    let file = read_structures(&a.input)?;
    let get = |id: &str| {
        file.structures
            .iter()
            .find(|(x, _)| x == id)
            .map(|(_, s)| s.clone())
            .ok_or_else(|| Error::Invalid(format!("no structure {id} in the input")))
    };
    let (c, d1, d2) = (get("c")?, get("d1")?, get("d2")?);
    for (id, s) in [("c", &c), ("d1", &d1), ("d2", &d2)] {
        if let Some(why) = k.class().violation(s) {
            return Err(Error::Invalid(format!(
                "{id} is not in {}: {why}",
                k.class().name()
            )));
        }
    }
    let f1 = by_names(&c, &d1, "d1")?;
    let f2 = by_names(&c, &d2, "d2")?;
    let mut sum = Summary::new();
    sum.push("class", k.class().name())
        .push("strategy", k.class().strategy());
    let found = match &k {
        Resolved::Encoded(ek) => {
            let (am, case) = amalgamate_k(ek, &c, &d1, &f1, &d2, &f2)?;
            sum.push("case", format!("{case:?}"));
            match no_new_npairs(&am, &d1, &d2) {
                Ok(()) => Ok(am),
                Err(why) => Err(Witness::new(format!("amalgam gains an n-pair: {why}"))
                    .with("amalgam", &am.structure)),
            }
        }
        Resolved::Plain(pk) => {
            match amalgamate_or_search(pk.as_ref(), &c, &d1, &f1, &d2, &f2, a.cap)? {
                Some(am) => Ok(am),
                None => Err(Witness::new("no amalgam exists within the cap")
                    .with("c", &c)
                    .with("d1", &d1)
                    .with("d2", &d2)),
            }
        }
    };
    match found {
        Ok(am) => {
            let text = emit_structure("amalgam", &am.structure);
            sum.push("size", am.structure.size());
            let mut body = String::new();
            let _ = writeln!(
                body,
                "d1 -> {}",
                am.left
                    .map
                    .iter()
                    .map(|e| am.structure.name(*e))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            let _ = writeln!(
                body,
                "d2 -> {}",
                am.right
                    .map
                    .iter()
                    .map(|e| am.structure.name(*e))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            if a.emit.is_none() {
                body.push_str(&text);
            }
            Ok(Outcome::new(TextReport::new(body, sum, Verdict::Pass))
                .with_file(a.emit.as_ref(), text))
        }
        Err(w) => {
            let body = w.render();
            Ok(Outcome::new(TextReport::new(body, sum, Verdict::Fail(w))))
        }
    }
}

pub(crate) fn budget(q: usize, schemes: &str, max_arity: Option<usize>) -> Result<AxiomBudget> {
    let mut b = AxiomBudget::new(q).with_schemes(schemes)?;
    if let Some(l) = max_arity {
        b = b.with_max_arity(l)?;
    }
    Ok(b)
}

pub(crate) fn axioms(a: &Axioms) -> Result<Outcome> {
    let k = resolve(&a.class)?;
    let b = budget(a.budget, &a.schemes, a.max_arity)?;
    let list = generate_axioms(k.class(), &b)?;
    let text = emit_axiom_file(&list);
    if let Some(path) = &a.verify {
        let (_, s) = read_single(path)?;
        let opts = EvalOptions {
            max_quantifiers: a.budget.max(EvalOptions::default().max_quantifiers),
            ..EvalOptions::default()
        };
        let r = verify_model_of(&s, &list, &opts)?;
        return Ok(Outcome::new(r).with_file(a.emit.as_ref(), text));
    }
    let mut sum = Summary::new();
    sum.push("class", k.class().name())
        .push("budget", a.budget)
        .push("axioms", list.len());
    for letter in ['a', 'b', 'c', 'd'] {
        let n = list
            .iter()
            .filter(|s| s.tag.letter() == Some(letter))
            .count();
        sum.push(&format!("scheme_{letter}"), n);
    }
    let body = if a.emit.is_some() {
        String::new()
    } else {
        text.clone()
    };
    Ok(Outcome::new(TextReport::new(body, sum, Verdict::Pass)).with_file(a.emit.as_ref(), text))
}

pub(crate) fn presentation(src: &LayerSource) -> Result<LayerPresentation> {
    let spec = match &src.layers {
        Some(p) => LayerSpec::parse(&read(p)?)?,
        None => constants_example(src.constants),
    };
    let opts = LayerOptions {
        level: src.level,
        size_cap: src.size_cap,
        multiplicity: src.multiplicity,
        seed: src.seed,
        ..LayerOptions::default()
    };
    build_layered_presentation(&spec, &opts)
}

pub(crate) fn layer_check(a: &LayerCheck) -> Result<Outcome> {
    let p = presentation(&a.source)?;
    Ok(Outcome::new(check_layer_agreement(
        &p, a.lower, a.upper, a.bound, a.cap,
    )?))
}

fn sentence_of(a: &Stabilize) -> Result<Sentence> {
    match (&a.sentence, &a.sentence_file) {
        (Some(s), _) => parse_sentence(s),
        (None, Some(p)) => {
            let mut list = parse_axiom_file(&read(p)?, None)?;
            if list.len() != 1 {
                return Err(Error::Invalid(format!(
                    "expected one sentence, found {}",
                    list.len()
                )));
            }
            Ok(list.remove(0))
        }
        (None, None) => Err(Error::Invalid("give --sentence or --sentence-file".into())),
    }
}

pub(crate) fn stabilize(a: &Stabilize) -> Result<Outcome> {
    let phi = sentence_of(a)?;
    let p = presentation(&a.source)?;
    Ok(Outcome::new(detect_stabilization(&p, &phi, a.horizon)?))
}

pub(crate) fn bnf_over_p(a: &BnfOverP) -> Result<Outcome> {
    let (u1, u2) = match (&a.left, &a.right) {
        (Some(l), Some(r)) => (read_single(l)?.1, read_single(r)?.1),
        _ => {
            if a.seeds.len() != 2 {
                return Err(Error::Invalid(format!(
                    "expected two seeds, got {}",
                    a.seeds.len()
                )));
            }
            let build = |seed| {
                let src = LayerSource {
                    seed,
                    ..a.source.clone()
                };
                presentation(&src)
            };
            let (p1, p2) = (build(a.seeds[0])?, build(a.seeds[1])?);
            if a.layer == 0 || a.layer > p1.len() {
                return Err(Error::Invalid(format!(
                    "layer must lie in 1..={}",
                    p1.len()
                )));
            }
            (
                p1.layer(a.layer).approximant.structure.clone(),
                p2.layer(a.layer).approximant.structure.clone(),
            )
        }
    };
    let pairs = a
        .identify
        .iter()
        .map(|x| {
            x.split_once('=')
                .map(|(l, r)| (l.to_string(), r.to_string()))
                .ok_or_else(|| Error::Invalid(format!("expected a=b, got {x}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let ident = if pairs.is_empty() {
        None
    } else {
        Some(pairs.as_slice())
    };
    Ok(Outcome::new(back_and_forth_over_p(
        &u1, &u2, a.depth, ident,
    )?))
}

pub(crate) fn gadget_verdict(a: &GadgetVerdict) -> Result<Outcome> {
    let t = EnumerationTable::parse(&read(&a.table)?)?;
    Ok(Outcome::new(categoricity_verdict(
        &t, a.index, a.horizon, a.flag,
    )))
}

pub(crate) fn gadget_axioms(a: &GadgetAxioms) -> Result<Outcome> {
    let codes: BTreeSet<u64> = a.codes.iter().copied().collect();
    let g = build_gadget_class(&codes, a.layer)?;
    let b = budget(a.budget, &a.schemes, None)?;
    let ax = assemble_gadget_axioms(&g, &b, a.atom_cap)?;
    let name = g.class.name().to_string();
    let text = ax.emit(&name);
    let mut sum = Summary::new();
    sum.push("class", &name)
        .push("layer_bound", g.bound())
        .push("symbols", g.vocabulary().len())
        .push(
            "one_sorted",
            ax.of(fraisse_core::gadget::Origin::OneSorted).len(),
        )
        .push(
            "rewritten",
            ax.of(fraisse_core::gadget::Origin::Rewrite).len(),
        )
        .push("skipped", ax.skipped);
    let body = if a.emit.is_some() {
        String::new()
    } else {
        text.clone()
    };
    Ok(Outcome::new(TextReport::new(body, sum, Verdict::Pass)).with_file(a.emit.as_ref(), text))
}
