use std::collections::{BTreeSet, HashSet};

use crate::encoder::relativize;
use crate::error::{Error, Result};
use crate::fraisse::{canonical_extension, demands, enumerate_age_upto, types_of, AgeClass};
use crate::logic::{Formula, Quantifier, SchemeTag, Sentence};
use crate::structure::{canonical_form, one_point_extensions, CanonKey, Structure, TupleIter};

/// How far to generate: sentences with at most `max_quantifiers` variables,
/// diagrams over symbols of arity at most `max_arity`, and which schemes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomBudget {
    pub max_quantifiers: usize,
    pub max_arity: usize,
    pub schemes: BTreeSet<SchemeTag>,
    pub enumeration_cap: u64,
}

impl AxiomBudget {
    /// All four schemes, no arity cut.
    pub fn new(max_quantifiers: usize) -> Self {
        AxiomBudget {
            max_quantifiers,
            max_arity: usize::MAX,
            schemes: SchemeTag::ALL.into_iter().collect(),
            enumeration_cap: crate::structure::DEFAULT_CANDIDATE_CAP,
        }
    }

    pub fn with_schemes(mut self, letters: &str) -> Result<Self> {
        let mut set = BTreeSet::new();
        for c in letters.chars().filter(|c| *c != ',') {
            set.insert(
                SchemeTag::from_letter(c)
                    .ok_or_else(|| Error::Invalid(format!("unknown scheme {c}")))?,
            );
        }
        self.schemes = set;
        Ok(self)
    }

    pub fn with_max_arity(mut self, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::Invalid("arity cut must be at least 1".into()));
        }
        self.max_arity = l;
        Ok(self)
    }

    pub fn wants(&self, t: SchemeTag) -> bool {
        self.schemes.contains(&t)
    }
}

/// The literals describing `s` on variables `vars[e]`, over symbols of arity
/// at most `max_arity`, in symbol then tuple order. With `only` set, just the
/// literals mentioning that element.
pub(crate) fn diagram(
    s: &Structure,
    vars: &[usize],
    max_arity: usize,
    only: Option<usize>,
) -> Vec<Formula> {
    let v = s.vocab();
    let mut out = Vec::new();
    for r in 0..v.len() {
        let ar = v.arity(r);
        if ar > max_arity {
            continue;
        }
        for t in TupleIter::new(s.size(), ar) {
            if only.is_some_and(|x| !t.contains(&x)) {
                continue;
            }
            let atom = Formula::rel(v.name(r), t.iter().map(|e| vars[*e]).collect());
            out.push(if s.holds(r, &t) {
                atom
            } else {
                Formula::not(atom)
            });
        }
    }
    out
}

/// `forall x1..xk not(distinct and diagram)`.
pub fn forbid_sentence(b: &Structure, max_arity: usize) -> Sentence {
    let k = b.size();
    let vars: Vec<usize> = (0..k).collect();
    let mut parts = Formula::distinct(&vars);
    parts.extend(diagram(b, &vars, max_arity, None));
    Sentence::with_blocks(
        &[(Quantifier::Forall, k)],
        Formula::not(Formula::And(parts)),
        SchemeTag::A,
    )
}

/// `exists x1..xk (distinct and diagram)`.
pub fn exists_sentence(a: &Structure, max_arity: usize) -> Sentence {
    let k = a.size();
    let vars: Vec<usize> = (0..k).collect();
    let mut parts = Formula::distinct(&vars);
    parts.extend(diagram(a, &vars, max_arity, None));
    Sentence::with_blocks(
        &[(Quantifier::Exists, k)],
        Formula::And(parts),
        SchemeTag::C,
    )
}

/// `forall x1..xk exists y ((distinct and diag A) -> (y new and the atoms of y))`
/// for `b` extending `a` by its last element.
pub fn extension_sentence(a: &Structure, b: &Structure, max_arity: usize) -> Sentence {
    let k = a.size();
    let vars: Vec<usize> = (0..=k).collect();
    let mut hyp = Formula::distinct(&vars[..k]);
    hyp.extend(diagram(a, &vars[..k], max_arity, None));
    let mut concl: Vec<Formula> = (0..k).map(|i| Formula::not(Formula::Eq(i, k))).collect();
    concl.extend(diagram(b, &vars, max_arity, Some(k)));
    let matrix = if hyp.is_empty() {
        Formula::And(concl)
    } else {
        Formula::implies(Formula::And(hyp), Formula::And(concl))
    };
    let blocks: Vec<(Quantifier, usize)> = if k == 0 {
        vec![(Quantifier::Exists, 1)]
    } else {
        vec![(Quantifier::Forall, k), (Quantifier::Exists, 1)]
    };
    Sentence::with_blocks(&blocks, matrix, SchemeTag::D)
}

fn dedupe(v: Vec<Sentence>) -> Vec<Sentence> {
    let mut seen = HashSet::new();
    v.into_iter().filter(|s| seen.insert(s.to_line())).collect()
}

/// Minimal non-members of size at most `n` among structures the class's
/// conventions admit, in canonical order.
pub fn minimal_non_members(
    k: &(impl AgeClass + ?Sized),
    n: usize,
    cap: u64,
) -> Result<Vec<Structure>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let levels = enumerate_age_upto(k, n - 1, cap)?;
    let members: HashSet<CanonKey> = levels.iter().flatten().map(canonical_form).collect();
    let mut found: Vec<(CanonKey, Structure)> = Vec::new();
    let mut seen = HashSet::new();
    for level in &levels {
        for m in level {
            let cands = one_point_extensions(m, cap, |t| k.ambient(t) && !k.contains(t))?;
            for t in cands {
                let minimal = (0..t.size()).all(|x| {
                    let keep: Vec<usize> = (0..t.size()).filter(|y| *y != x).collect();
                    members.contains(&canonical_form(&t.induced(&keep)))
                });
                if !minimal {
                    continue;
                }
                let key = canonical_form(&t);
                if seen.insert(key.clone()) {
                    found.push((key, t));
                }
            }
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(found
        .into_iter()
        .map(|(_, s)| crate::structure::canonical_structure(&s).1)
        .collect())
}

/// Scheme (a): forbidden configurations. A class defined through a base class on
/// a unary symbol inherits the base's scheme (a), relativised.
pub fn scheme_a(k: &(impl AgeClass + ?Sized), budget: &AxiomBudget) -> Result<Vec<Sentence>> {
    if let Some((base, unary)) = k.base_class() {
        let inner = scheme_a(base, budget)?;
        return Ok(inner.iter().map(|s| relativize(s, unary)).collect());
    }
    if let Some(axioms) = k.universal_axioms(budget.max_quantifiers) {
        return Ok(dedupe(
            axioms
                .into_iter()
                .filter(|s| s.quantifier_count() <= budget.max_quantifiers)
                .map(|s| s.with_tag(SchemeTag::A))
                .collect(),
        ));
    }
    let forbidden = minimal_non_members(k, budget.max_quantifiers, budget.enumeration_cap)?;
    Ok(dedupe(
        forbidden
            .iter()
            .map(|b| forbid_sentence(b, budget.max_arity))
            .collect(),
    ))
}

pub fn scheme_b(k: &(impl AgeClass + ?Sized), budget: &AxiomBudget) -> Vec<Sentence> {
    dedupe(
        k.discipline_axioms(budget.max_quantifiers)
            .into_iter()
            .filter(|s| s.quantifier_count() <= budget.max_quantifiers)
            .map(|s| s.with_tag(SchemeTag::B))
            .collect(),
    )
}

pub fn scheme_c(k: &(impl AgeClass + ?Sized), budget: &AxiomBudget) -> Result<Vec<Sentence>> {
    let levels = enumerate_age_upto(k, budget.max_quantifiers, budget.enumeration_cap)?;
    Ok(dedupe(
        levels
            .iter()
            .skip(1)
            .flatten()
            .map(|a| exists_sentence(a, budget.max_arity))
            .collect(),
    ))
}

pub fn scheme_d(k: &(impl AgeClass + ?Sized), budget: &AxiomBudget) -> Result<Vec<Sentence>> {
    let ds = demands(k, budget.max_quantifiers, budget.enumeration_cap)?;
    Ok(dedupe(
        ds.iter()
            .map(|d| extension_sentence(&d.a, &d.b, budget.max_arity))
            .collect(),
    ))
}

/// The selected schemes, in the order a, b, c, d.
pub fn generate_axioms(
    k: &(impl AgeClass + ?Sized),
    budget: &AxiomBudget,
) -> Result<Vec<Sentence>> {
    let mut out = Vec::new();
    if budget.wants(SchemeTag::A) {
        out.extend(scheme_a(k, budget)?);
    }
    if budget.wants(SchemeTag::B) {
        out.extend(scheme_b(k, budget));
    }
    if budget.wants(SchemeTag::C) {
        out.extend(scheme_c(k, budget)?);
    }
    if budget.wants(SchemeTag::D) {
        out.extend(scheme_d(k, budget)?);
    }
    Ok(out)
}

/// Largest arity of a symbol holding somewhere in a member of size at most `n`.
pub fn arity_cut(k: &(impl AgeClass + ?Sized), n: usize, cap: u64) -> Result<usize> {
    let levels = enumerate_age_upto(k, n, cap)?;
    let v = k.vocabulary();
    let mut l = 0;
    for m in levels.iter().flatten() {
        for r in 0..v.len() {
            if !m.relation(r).is_empty() {
                l = l.max(v.arity(r));
            }
        }
    }
    Ok(l)
}

/// Read a member back from its scheme (c) sentence.
pub fn structure_of_exists(
    s: &Sentence,
    vocab: &std::sync::Arc<crate::structure::Vocabulary>,
) -> Result<Structure> {
    if s.prefix.iter().any(|(q, _)| *q != Quantifier::Exists) {
        return Err(Error::Invalid("not an existential sentence".into()));
    }
    let k = s.quantifier_count();
    let Formula::And(parts) = &s.matrix else {
        return Err(Error::Invalid("matrix is not a conjunction".into()));
    };
    let mut rels = vec![BTreeSet::new(); vocab.len()];
    for p in parts {
        if let Formula::Rel(name, args) = p {
            let r = vocab
                .index_of(name)
                .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            rels[r].insert(args.clone());
        }
    }
    let names = (0..k).map(|i| format!("e{i}")).collect();
    Structure::from_parts(vocab.clone(), names, rels)
}

/// Recompute scheme (d) from scheme (a) and (c) sentences and the type counts
/// alone: the members are read off (c), checked against (a) and the counts,
/// and every one-point extension between them yields a sentence.
pub fn rederive_scheme_d(
    vocab: &std::sync::Arc<crate::structure::Vocabulary>,
    a_axioms: &[Sentence],
    c_axioms: &[Sentence],
    type_counts: &[u64],
    budget: &AxiomBudget,
) -> Result<Vec<Sentence>> {
    let n = budget.max_quantifiers;
    let mut levels: Vec<Vec<Structure>> = vec![Vec::new(); n + 1];
    levels[0].push(Structure::empty(vocab.clone()));
    for s in c_axioms {
        let m = structure_of_exists(s, vocab)?;
        for ax in a_axioms {
            if !crate::logic::evaluate(&m, ax)? {
                return Err(Error::Invalid(format!(
                    "member read from {} violates {}",
                    s.to_line(),
                    ax.to_line()
                )));
            }
        }
        let size = m.size();
        if size <= n {
            levels[size].push(m);
        }
    }
    let recovered = crate::fraisse::EnumeratedClass::new(
        "recovered",
        vocab.clone(),
        &levels.iter().flatten().cloned().collect::<Vec<_>>(),
    )?;
    for (i, want) in type_counts.iter().enumerate() {
        if i > n {
            break;
        }
        let got = types_of(&recovered, i, budget.enumeration_cap)?.len() as u64;
        if got != *want {
            return Err(Error::Invalid(format!(
                "recovered members realise {got} types of length {i}, expected {want}"
            )));
        }
    }
    let mut found: Vec<(CanonKey, CanonKey, Vec<u8>, Sentence)> = Vec::new();
    let mut seen = HashSet::new();
    for size in 0..n {
        for a in &levels[size] {
            let a_key = canonical_form(a);
            for b in &levels[size + 1] {
                let b_key = canonical_form(b);
                for x in 0..b.size() {
                    let keep: Vec<usize> = (0..b.size()).filter(|y| *y != x).collect();
                    let rest = b.induced(&keep);
                    let Some(g) = crate::structure::find_embedding(a, &rest)? else {
                        continue;
                    };
                    if g.map.len() != a.size() || canonical_form(&rest) != a_key {
                        continue;
                    }
                    let mut order: Vec<usize> = g.map.iter().map(|e| keep[*e]).collect();
                    order.push(x);
                    let ext = b.reorder(&order);
                    let (marker, ext) = canonical_extension(a, &ext);
                    if seen.insert((a_key.clone(), b_key.clone(), marker.clone())) {
                        let s = extension_sentence(a, &ext, budget.max_arity);
                        found.push((b_key.clone(), a_key.clone(), marker, s));
                    }
                }
            }
        }
    }
    found.sort_by(|x, y| (&x.0, &x.1, &x.2).cmp(&(&y.0, &y.1, &y.2)));
    Ok(dedupe(found.into_iter().map(|t| t.3).collect()))
}
