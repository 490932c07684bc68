use std::collections::BTreeSet;
use std::sync::Arc;

use super::codec::{k_membership, p_part};
use super::language::{Encoding, LIndex};
use super::npair::{scan_npairs, NPair};
use crate::error::{Error, Result};
use crate::fraisse::{search_amalgam, AgeClass, Amalgam};
use crate::logic::{Formula, Quantifier, SchemeTag, Sentence};
use crate::structure::{Elem, Morphism, Structure, Tuple, Vocabulary};

/// The class of finite L ∪ L0 structures satisfying (i)-(iii) over a base class.
pub struct EncodedClass {
    name: String,
    base: Box<dyn AgeClass>,
    enc: Encoding,
}

impl EncodedClass {
    pub fn new(base: Box<dyn AgeClass>) -> Result<Self> {
        let enc = Encoding::new(base.vocabulary().clone())?;
        Ok(EncodedClass {
            name: format!("encoded-{}", base.name()),
            base,
            enc,
        })
    }

    pub fn encoding(&self) -> &Encoding {
        &self.enc
    }

    pub fn base(&self) -> &dyn AgeClass {
        self.base.as_ref()
    }
}

/// Which of the one-point situations an amalgamation problem is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmalgamCase {
    /// Both new points in P: amalgamate the P-parts in the base class.
    BothP,
    /// Both new points in Q: free amalgam.
    BothQ,
    /// One new point in each sort: free amalgam.
    Mixed,
    /// Not a one-point problem: P-parts via the base class, the rest free.
    General,
}

fn sorted_p(li: &LIndex, s: &Structure) -> (Vec<Elem>, Vec<usize>) {
    let p: Vec<Elem> = s.elems().filter(|e| s.holds(li.p, &[*e])).collect();
    let mut pos = vec![usize::MAX; s.size()];
    for (i, e) in p.iter().enumerate() {
        pos[*e] = i;
    }
    (p, pos)
}

/// Amalgamate in the encoded class: the P-parts with the base class's strategy
/// (falling back to search), everything else freely, with no new relation
/// instances outside P. Errors if the base class has no amalgam or the result
/// gains an n-pair.
pub fn amalgamate_k(
    class: &EncodedClass,
    c: &Structure,
    d1: &Structure,
    f1: &Morphism,
    d2: &Structure,
    f2: &Morphism,
) -> Result<(Amalgam, AmalgamCase)> {
    let enc = &class.enc;
    let v = enc.combined().clone();
    let li = LIndex::of(&v)?;
    let new1: Vec<Elem> = d1.elems().filter(|e| !f1.map.contains(e)).collect();
    let new2: Vec<Elem> = d2.elems().filter(|e| !f2.map.contains(e)).collect();
    let case = match (new1.as_slice(), new2.as_slice()) {
        ([x], [y]) => match (d1.holds(li.p, &[*x]), d2.holds(li.p, &[*y])) {
            (true, true) => AmalgamCase::BothP,
            (false, false) => AmalgamCase::BothQ,
            _ => AmalgamCase::Mixed,
        },
        _ => AmalgamCase::General,
    };

    let (pc, _) = sorted_p(&li, c);
    let (pd1, pos1) = sorted_p(&li, d1);
    let (pd2, pos2) = sorted_p(&li, d2);
    let (cp, c1p, c2p) = (p_part(enc, c)?, p_part(enc, d1)?, p_part(enc, d2)?);
    let g1 = Morphism::new(pc.iter().map(|x| pos1[f1.apply(*x)]).collect());
    let g2 = Morphism::new(pc.iter().map(|x| pos2[f2.apply(*x)]).collect());
    let proposed = match class.base.amalgamate(&cp, &c1p, &g1, &c2p, &g2) {
        Ok(a) => a,
        Err(Error::Strategy(_)) => None,
        Err(e) => return Err(e),
    };
    let pe = match proposed.filter(|a| {
        class.base.contains(&a.structure) && a.is_valid(&c1p, &c2p) && a.commutes(&g1, &g2)
    }) {
        Some(a) => a,
        None => search_amalgam(class.base.as_ref(), &c1p, &g1, &c2p, &g2, 1 << 20)?.ok_or_else(
            || Error::Strategy("the P-parts have no amalgam in the base class".into()),
        )?,
    };

    let mut names: Vec<String> = d1.names().to_vec();
    let mut pe_to_e: Vec<Option<Elem>> = vec![None; pe.structure.size()];
    for (i, x) in pd1.iter().enumerate() {
        pe_to_e[pe.left.apply(i)] = Some(*x);
    }
    let mut right = vec![usize::MAX; d2.size()];
    for (i, x) in f2.map.iter().enumerate() {
        right[*x] = f1.apply(i);
    }
    let fresh = |names: &mut Vec<String>, stem: &str| {
        let mut name = stem.to_string();
        while names.contains(&name) {
            name.push('\'');
        }
        names.push(name);
        names.len() - 1
    };
    for y in d2.elems() {
        if right[y] != usize::MAX {
            continue;
        }
        if d2.holds(li.p, &[y]) {
            let z = pe.right.apply(pos2[y]);
            right[y] = match pe_to_e[z] {
                Some(x) => x,
                None => {
                    let e = fresh(&mut names, d2.name(y));
                    pe_to_e[z] = Some(e);
                    e
                }
            };
        } else {
            right[y] = fresh(&mut names, d2.name(y));
        }
    }
    for (i, x) in pd2.iter().enumerate() {
        let z = pe.right.apply(i);
        if pe_to_e[z].is_none() {
            pe_to_e[z] = Some(right[*x]);
        }
    }

    let l0: BTreeSet<usize> = enc
        .l0()
        .symbols()
        .iter()
        .map(|s| {
            v.index_of(&s.name)
                .expect("L0 symbol in combined vocabulary")
        })
        .collect();
    let mut rels: Vec<BTreeSet<Tuple>> = vec![BTreeSet::new(); v.len()];
    for r in 0..v.len() {
        if l0.contains(&r) {
            continue;
        }
        rels[r].extend(d1.relation(r).iter().cloned());
        rels[r].extend(
            d2.relation(r)
                .iter()
                .map(|t| t.iter().map(|e| right[*e]).collect()),
        );
    }
    for (k, s) in enc.l0().symbols().iter().enumerate() {
        let r = v.index_of(&s.name).expect("L0 symbol");
        let pk = pe.structure.vocab().index_of(&s.name).unwrap_or(k);
        for t in pe.structure.relation(pk) {
            let mapped: Option<Tuple> = t.iter().map(|z| pe_to_e[*z]).collect();
            rels[r].insert(mapped.ok_or_else(|| {
                Error::Strategy("base amalgam has elements outside both factors".into())
            })?);
        }
    }
    let structure = Structure::from_parts(v, names, rels)?;
    let amalgam = Amalgam {
        structure,
        left: Morphism::identity(d1.size()),
        right: Morphism::new(right),
    };
    if let Err(why) = no_new_npairs(&amalgam, d1, d2) {
        return Err(Error::Strategy(why));
    }
    Ok((amalgam, case))
}

/// The n-pairs of the amalgam are exactly the images of the factors' n-pairs.
pub fn no_new_npairs(
    a: &Amalgam,
    d1: &Structure,
    d2: &Structure,
) -> std::result::Result<(), String> {
    let found = scan_npairs(&a.structure).map_err(|e| e.to_string())?;
    let mut expected: BTreeSet<NPair> = BTreeSet::new();
    for p in scan_npairs(d1).map_err(|e| e.to_string())? {
        expected.insert(p.map(&a.left));
    }
    for p in scan_npairs(d2).map_err(|e| e.to_string())? {
        expected.insert(p.map(&a.right));
    }
    let found: BTreeSet<NPair> = found.into_iter().collect();
    if let Some(p) = found.difference(&expected).next() {
        return Err(format!(
            "new n-pair in the amalgam: {}",
            p.describe(&a.structure)
        ));
    }
    if let Some(p) = expected.difference(&found).next() {
        return Err(format!(
            "n-pair lost in the amalgam: {}",
            p.describe(&a.structure)
        ));
    }
    Ok(())
}

/// The conjunction saying `(x_0..x_{m-1}, x_m..x_{m+n-1})` is an n-pair of arity m.
pub fn npair_formula(m: usize, n: usize) -> Formula {
    let a = |i: usize| i;
    let c = |j: usize| m + j;
    let mut parts = Vec::new();
    for i in 0..m {
        parts.push(Formula::rel("P", vec![a(i)]));
    }
    for j in 0..n {
        parts.push(Formula::rel("Q", vec![c(j)]));
    }
    let cs: Vec<usize> = (0..n).map(c).collect();
    parts.extend(Formula::distinct(&cs));
    for i in 0..n {
        for j in 0..n {
            let h = Formula::rel("H", vec![c(i), c(j)]);
            parts.push(if j == (i + 1) % n { h } else { Formula::not(h) });
        }
    }
    for j in 0..n {
        let lam = Formula::rel("lam", vec![c(j)]);
        parts.push(if j == 0 { lam } else { Formula::not(lam) });
        let rho = Formula::rel("rho", vec![c(j)]);
        parts.push(if j == m - 1 { rho } else { Formula::not(rho) });
    }
    let label = |j: usize| a(j.min(m - 1));
    for i in 0..m {
        for k in 0..m {
            for j in 0..n {
                for l in 0..n {
                    let s = Formula::rel("S", vec![a(i), c(j), a(k), c(l)]);
                    let mut cond = Vec::new();
                    if a(i) != label(j) {
                        cond.push(Formula::Eq(a(i), label(j)));
                    }
                    if a(k) != label(l) {
                        cond.push(Formula::Eq(a(k), label(l)));
                    }
                    if cond.is_empty() {
                        parts.push(s);
                    } else {
                        let cond = Formula::And(cond);
                        parts.push(Formula::implies(s.clone(), cond.clone()));
                        parts.push(Formula::implies(cond, s));
                    }
                }
            }
        }
    }
    Formula::And(parts)
}

/// Universal sentences, one per (n, m) with `m + n <= max_q`, saying each n-pair
/// of arity m labels an `R_n` tuple (or that none exist when no symbol fits).
pub fn labelling_axioms(enc: &Encoding, max_q: usize) -> Vec<Sentence> {
    let mut out = Vec::new();
    for n in 1..max_q {
        for m in 1..=n.min(max_q - n) {
            let conclusion = match enc.symbol_for(n) {
                Some(k) if enc.l0().arity(k) == m => {
                    Formula::rel(enc.l0().name(k), (0..m).collect())
                }
                _ => Formula::falsity(),
            };
            let matrix = Formula::implies(npair_formula(m, n), conclusion);
            out.push(Sentence::with_blocks(
                &[(Quantifier::Forall, m + n)],
                matrix,
                SchemeTag::B,
            ));
        }
    }
    out
}

/// Sort discipline of L ∪ L0 as universal sentences.
pub fn sort_axioms(enc: &Encoding, max_q: usize) -> Vec<Sentence> {
    let all =
        |k: usize, f: Formula| Sentence::with_blocks(&[(Quantifier::Forall, k)], f, SchemeTag::B);
    let p = |i| Formula::rel("P", vec![i]);
    let q = |i| Formula::rel("Q", vec![i]);
    let mut out = vec![
        all(1, Formula::Or(vec![p(0), q(0)])),
        all(1, Formula::not(Formula::And(vec![p(0), q(0)]))),
        all(1, Formula::implies(Formula::rel("lam", vec![0]), q(0))),
        all(1, Formula::implies(Formula::rel("rho", vec![0]), q(0))),
    ];
    if max_q >= 2 {
        out.push(all(
            2,
            Formula::implies(
                Formula::rel("H", vec![0, 1]),
                Formula::And(vec![q(0), q(1)]),
            ),
        ));
    }
    if max_q >= 4 {
        out.push(all(
            4,
            Formula::implies(
                Formula::rel("S", vec![0, 1, 2, 3]),
                Formula::And(vec![p(0), q(1), p(2), q(3)]),
            ),
        ));
    }
    for s in enc.l0().symbols() {
        if s.arity <= max_q {
            out.push(all(
                s.arity,
                Formula::implies(
                    Formula::rel(&s.name, (0..s.arity).collect()),
                    Formula::And((0..s.arity).map(p).collect()),
                ),
            ));
        }
    }
    out
}

/// Relativise a sentence to the elements satisfying `unary`.
pub fn relativize(s: &Sentence, unary: &str) -> Sentence {
    let guard: Vec<Formula> = (0..s.quantifier_count())
        .map(|i| Formula::rel(unary, vec![i]))
        .collect();
    let matrix = if guard.is_empty() {
        s.matrix.clone()
    } else if s.prefix.iter().all(|(q, _)| *q == Quantifier::Forall) {
        Formula::implies(Formula::And(guard), s.matrix.clone())
    } else {
        // Mixed prefixes: guard universals by implication, existentials by conjunction.
        let uni: Vec<Formula> = s
            .prefix
            .iter()
            .enumerate()
            .filter(|(_, (q, _))| *q == Quantifier::Forall)
            .map(|(i, _)| Formula::rel(unary, vec![i]))
            .collect();
        let ex: Vec<Formula> = s
            .prefix
            .iter()
            .enumerate()
            .filter(|(_, (q, _))| *q == Quantifier::Exists)
            .map(|(i, _)| Formula::rel(unary, vec![i]))
            .collect();
        let mut body = ex;
        body.push(s.matrix.clone());
        Formula::implies(Formula::And(uni), Formula::And(body))
    };
    Sentence::new(s.prefix.clone(), matrix, s.tag).expect("relativised sentence is well formed")
}

impl AgeClass for EncodedClass {
    fn name(&self) -> &str {
        &self.name
    }

    fn vocabulary(&self) -> &Arc<Vocabulary> {
        self.enc.combined()
    }

    fn contains(&self, s: &Structure) -> bool {
        k_membership(&self.enc, s, self.base.as_ref()).is_member()
    }

    fn ambient(&self, s: &Structure) -> bool {
        let m = k_membership(&self.enc, s, self.base.as_ref());
        if m.violations
            .iter()
            .any(|(c, _)| matches!(c, super::codec::Clause::Sorts | super::codec::Clause::I))
        {
            return false;
        }
        p_part(&self.enc, s).is_ok_and(|pp| self.base.ambient(&pp))
    }

    fn violation(&self, s: &Structure) -> Option<String> {
        let m = k_membership(&self.enc, s, self.base.as_ref());
        (!m.is_member()).then(|| m.to_string())
    }

    fn strategy(&self) -> &str {
        "three-case"
    }

    fn amalgamate(
        &self,
        c: &Structure,
        d1: &Structure,
        f1: &Morphism,
        d2: &Structure,
        f2: &Morphism,
    ) -> Result<Option<Amalgam>> {
        let (a, _) = amalgamate_k(self, c, d1, f1, d2, f2)?;
        if self.contains(&a.structure) {
            Ok(Some(a))
        } else {
            Err(Error::Strategy(format!(
                "amalgam is not a member: {}",
                self.violation(&a.structure).unwrap_or_default()
            )))
        }
    }

    fn audit_amalgam(
        &self,
        a: &Amalgam,
        _c: &Structure,
        d1: &Structure,
        d2: &Structure,
    ) -> std::result::Result<(), String> {
        no_new_npairs(a, d1, d2)
    }

    fn universal_axioms(&self, _max_q: usize) -> Option<Vec<Sentence>> {
        None
    }

    fn base_class(&self) -> Option<(&dyn AgeClass, &str)> {
        Some((self.base.as_ref(), "P"))
    }

    fn discipline_axioms(&self, max_q: usize) -> Vec<Sentence> {
        let mut out = sort_axioms(&self.enc, max_q);
        out.extend(
            self.base
                .discipline_axioms(max_q)
                .iter()
                .map(|s| relativize(s, "P").with_tag(SchemeTag::B)),
        );
        out.extend(labelling_axioms(&self.enc, max_q));
        out
    }
}
