use std::collections::BTreeSet;
use std::fmt;

use super::language::{Encoding, LIndex};
use super::npair::{scan_npairs, NPair};
use crate::error::{Error, Result};
use crate::fraisse::AgeClass;
use crate::structure::{emit_structure_with_comments, Elem, Structure, Tuple};

/// An L ∪ L0 structure (the U-form) with the n-pairs it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedStructure {
    pub structure: Structure,
    pub npairs: Vec<NPair>,
}

impl EncodedStructure {
    /// The L-reduct (the N-form).
    pub fn reduct(&self, enc: &Encoding) -> Result<Structure> {
        self.structure.reduct(enc.target().clone())
    }

    /// Structure file text with the n-pair registry as comments.
    pub fn emit(&self, id: &str) -> String {
        let comments: Vec<String> = self
            .npairs
            .iter()
            .map(|p| p.describe(&self.structure))
            .collect();
        emit_structure_with_comments(id, &self.structure, &comments)
    }
}

/// Build the U-form of `a`: P-part `a`, one fresh n-cycle per labelled tuple.
pub fn encode(
    enc: &Encoding,
    a: &Structure,
    labeled: &[(usize, Tuple)],
) -> Result<EncodedStructure> {
    if a.vocab().symbols() != enc.l0().symbols() {
        return Err(Error::VocabularyMismatch(
            "structure is not over the encoded vocabulary".into(),
        ));
    }
    let v = enc.combined().clone();
    let li = LIndex::of(&v)?;
    let off = TargetLanguageOffset::of(enc)?;
    let mut rels: Vec<BTreeSet<Tuple>> = vec![BTreeSet::new(); v.len()];
    for e in a.elems() {
        rels[li.p].insert(vec![e]);
    }
    for k in 0..enc.l0().len() {
        rels[off.l0[k]] = a.relation(k).clone();
    }
    let mut out = Structure::from_parts(v.clone(), a.names().to_vec(), rels)?;
    let mut npairs = Vec::new();
    for (pair_no, (n, tuple)) in labeled.iter().enumerate() {
        let n = *n;
        let k = enc
            .symbol_for(n)
            .ok_or_else(|| Error::Invalid(format!("no relation has index {n}")))?;
        let m = enc.l0().arity(k);
        if tuple.len() != m {
            return Err(Error::ArityMismatch {
                symbol: enc.l0().name(k).to_string(),
                expected: m,
                found: tuple.len(),
            });
        }
        if let Some(e) = tuple.iter().find(|e| **e >= a.size()) {
            return Err(Error::UnknownElement(format!("#{e}")));
        }
        if !a.holds(k, tuple) {
            return Err(Error::Invalid(format!(
                "{}{} does not hold, so labelling it would break condition (iii)",
                enc.l0().name(k),
                a.fmt_tuple(tuple)
            )));
        }
        let cycle: Vec<Elem> = (0..n)
            .map(|j| out.add_fresh(&format!("c{pair_no}_{j}")))
            .collect();
        for &c in &cycle {
            out.insert(li.q, vec![c]);
        }
        for j in 0..n {
            out.insert(li.h, vec![cycle[j], cycle[(j + 1) % n]]);
        }
        out.insert(li.lam, vec![cycle[0]]);
        out.insert(li.rho, vec![cycle[m - 1]]);
        let label = |j: usize| tuple[j.min(m - 1)];
        for j in 0..n {
            for l in 0..n {
                out.insert(li.s, vec![label(j), cycle[j], label(l), cycle[l]]);
            }
        }
        npairs.push(NPair {
            n,
            m,
            labels: tuple.clone(),
            cycle,
        });
    }
    out.validate()?;
    Ok(EncodedStructure {
        structure: out,
        npairs,
    })
}

/// Label every relation instance of `a`.
pub fn label_all(enc: &Encoding, a: &Structure) -> Vec<(usize, Tuple)> {
    let mut out = Vec::new();
    for k in 0..a.vocab().len() {
        for t in a.relation(k) {
            out.push((enc.index(k), t.clone()));
        }
    }
    out
}

struct TargetLanguageOffset {
    l0: Vec<usize>,
}

impl TargetLanguageOffset {
    fn of(enc: &Encoding) -> Result<Self> {
        let v = enc.combined();
        let l0 = enc
            .l0()
            .symbols()
            .iter()
            .map(|s| {
                v.index_of(&s.name)
                    .ok_or_else(|| Error::UnknownSymbol(s.name.clone()))
            })
            .collect::<Result<_>>()?;
        Ok(TargetLanguageOffset { l0 })
    }
}

/// Read the L0 structure off an L-structure (or the L-part of an L ∪ L0
/// structure): the P-part, with `R_n(a)` iff some n-pair labels `a`.
pub fn decode(enc: &Encoding, n: &Structure) -> Result<Structure> {
    let li = LIndex::of(n.vocab())?;
    let p: Vec<Elem> = n.elems().filter(|e| n.holds(li.p, &[*e])).collect();
    let mut pos = vec![usize::MAX; n.size()];
    for (i, e) in p.iter().enumerate() {
        pos[*e] = i;
    }
    let mut rels: Vec<BTreeSet<Tuple>> = vec![BTreeSet::new(); enc.l0().len()];
    for pair in scan_npairs(n)? {
        if let Some(k) = enc.symbol_for(pair.n) {
            if enc.l0().arity(k) == pair.m {
                rels[k].insert(pair.labels.iter().map(|e| pos[*e]).collect());
            }
        }
    }
    let names = p.iter().map(|e| n.name(*e).to_string()).collect();
    Structure::from_parts(enc.l0().clone(), names, rels)
}

/// The P-part of an L ∪ L0 structure as an L0 structure.
pub fn p_part(enc: &Encoding, d: &Structure) -> Result<Structure> {
    let li = LIndex::of(d.vocab())?;
    let p: Vec<Elem> = d.elems().filter(|e| d.holds(li.p, &[*e])).collect();
    d.induced(&p).reduct(enc.l0().clone())
}

/// Which defining clause of the class a structure breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Clause {
    /// Partition and sort discipline of L.
    Sorts,
    /// L0 relations live on P.
    I,
    /// The P-part is in the base class.
    II,
    /// Every n-pair labels an `R_n` tuple.
    III,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Sorts => "sorts",
            Clause::I => "(i)",
            Clause::II => "(ii)",
            Clause::III => "(iii)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Membership {
    pub violations: Vec<(Clause, String)>,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn cites(&self, c: Clause) -> bool {
        self.violations.iter().any(|(x, _)| *x == c)
    }
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("member");
        }
        for (i, (c, why)) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{c}: {why}")?;
        }
        Ok(())
    }
}

/// Membership in the class of L ∪ L0 structures satisfying (i)-(iii) over `k0`.
pub fn k_membership(enc: &Encoding, d: &Structure, k0: &dyn AgeClass) -> Membership {
    let mut out = Membership::default();
    if d.vocab().symbols() != enc.combined().symbols() {
        out.violations
            .push((Clause::Sorts, "not over the combined vocabulary".into()));
        return out;
    }
    let li = LIndex::of(d.vocab()).expect("combined vocabulary has L");
    let in_p = |e: Elem| d.holds(li.p, &[e]);
    for e in d.elems() {
        if in_p(e) == d.holds(li.q, &[e]) {
            out.violations.push((
                Clause::Sorts,
                format!("{} is not in exactly one of P, Q", d.name(e)),
            ));
        }
    }
    for (r, pos) in [
        (li.lam, 0),
        (li.rho, 0),
        (li.h, 0),
        (li.h, 1),
        (li.s, 1),
        (li.s, 3),
    ] {
        if let Some(t) = d.relation(r).iter().find(|t| in_p(t[pos])) {
            out.violations.push((
                Clause::Sorts,
                format!(
                    "{}{} has a P-element where Q is required",
                    d.vocab().name(r),
                    d.fmt_tuple(t)
                ),
            ));
        }
    }
    for pos in [0, 2] {
        if let Some(t) = d.relation(li.s).iter().find(|t| !in_p(t[pos])) {
            out.violations.push((
                Clause::Sorts,
                format!("S{} has a Q-element where P is required", d.fmt_tuple(t)),
            ));
        }
    }
    for s in enc.l0().symbols() {
        let r = d
            .vocab()
            .index_of(&s.name)
            .expect("combined vocabulary has L0");
        if let Some(t) = d.relation(r).iter().find(|t| !t.iter().all(|e| in_p(*e))) {
            out.violations
                .push((Clause::I, format!("{}{} leaves P", s.name, d.fmt_tuple(t))));
        }
    }
    if !out.violations.is_empty() {
        return out;
    }
    match p_part(enc, d) {
        Ok(pp) => {
            if let Some(why) = k0.violation(&pp) {
                out.violations.push((Clause::II, why));
            }
        }
        Err(e) => out.violations.push((Clause::II, e.to_string())),
    }
    match scan_npairs(d) {
        Ok(pairs) => {
            for pair in pairs {
                let ok = enc.symbol_for(pair.n).is_some_and(|k| {
                    enc.l0().arity(k) == pair.m
                        && d.holds(
                            d.vocab().index_of(enc.l0().name(k)).expect("L0 symbol"),
                            &pair.labels,
                        )
                });
                if !ok {
                    let rel = match enc.symbol_for(pair.n) {
                        Some(k) => enc.l0().name(k).to_string(),
                        None => format!("R{}", pair.n),
                    };
                    out.violations.push((
                        Clause::III,
                        format!(
                            "{} but {}{} fails",
                            pair.describe(d),
                            rel,
                            d.fmt_tuple(&pair.labels)
                        ),
                    ));
                }
            }
        }
        Err(e) => out.violations.push((Clause::III, e.to_string())),
    }
    out
}
