use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::logic::Sentence;
use crate::structure::{
    candidate_tuples, one_point_extensions, unary_choices, Elem, Morphism, Structure, Tuple,
    TupleIter, Vocabulary,
};

/// A class of finite structures closed under induced substructure and isomorphism.
///
/// Only `name`, `vocabulary` and `contains` are required. Generation, amalgamation
/// and axioms have generic defaults that classes with structure override.
pub trait AgeClass {
    fn name(&self) -> &str;

    fn vocabulary(&self) -> &Arc<Vocabulary>;

    fn contains(&self, s: &Structure) -> bool;

    /// Conventions of the presentation every candidate is assumed to obey (for
    /// graphs: symmetric and loop-free). Members always satisfy it; forbidden
    /// configurations are only sought among structures that do.
    fn ambient(&self, _s: &Structure) -> bool {
        true
    }

    /// A reason `s` is not a member, if it is not.
    fn violation(&self, s: &Structure) -> Option<String> {
        if self.contains(s) {
            None
        } else {
            Some(format!("not a member of {}", self.name()))
        }
    }

    /// All members extending `s` by one element (appended last), `s` being an
    /// induced substructure on the first elements.
    fn extensions(&self, s: &Structure, cap: u64) -> Result<Vec<Structure>> {
        one_point_extensions(s, cap, |t| self.contains(t))
    }

    /// A uniformly drawn candidate one-point extension that is a member, if one is
    /// found within a few draws.
    fn random_extension(&self, s: &Structure, rng: &mut dyn rand::RngCore) -> Option<Structure> {
        random_member_extension(self, s, rng)
    }

    /// Upper bound on the number of members of size `n`, when known.
    fn member_bound(&self, _n: usize) -> Option<u64> {
        None
    }

    /// Name of the amalgamation procedure.
    fn strategy(&self) -> &str {
        "free"
    }

    /// Atoms forced on a free amalgam (e.g. transitivity). Default: none.
    fn close(&self, _s: &mut Structure) {}

    /// Amalgamate `d1` and `d2` over `c` along `f1: c -> d1`, `f2: c -> d2`.
    /// `Ok(None)` means the strategy produced no member; callers may fall back
    /// to exhaustive search.
    fn amalgamate(
        &self,
        c: &Structure,
        d1: &Structure,
        f1: &Morphism,
        d2: &Structure,
        f2: &Morphism,
    ) -> Result<Option<Amalgam>> {
        let mut a = free_amalgam(c, d1, f1, d2, f2);
        self.close(&mut a.structure);
        if self.contains(&a.structure) && a.is_valid(d1, d2) {
            Ok(Some(a))
        } else {
            Ok(None)
        }
    }

    /// Extra checks on an amalgam produced for this class. Errors describe the defect.
    fn audit_amalgam(
        &self,
        _a: &Amalgam,
        _c: &Structure,
        _d1: &Structure,
        _d2: &Structure,
    ) -> std::result::Result<(), String> {
        Ok(())
    }

    /// Universal sentences with at most `max_q` quantifiers that axiomatise the
    /// class's forbidden configurations, for classes too large to enumerate.
    fn universal_axioms(&self, _max_q: usize) -> Option<Vec<Sentence>> {
        None
    }

    /// A class that the restriction of every member to a unary symbol belongs to,
    /// when membership is defined that way.
    fn base_class(&self) -> Option<(&dyn AgeClass, &str)> {
        None
    }

    /// Universal sentences stating the ambient conventions and labelling constraints.
    fn discipline_axioms(&self, _max_q: usize) -> Vec<Sentence> {
        Vec::new()
    }
}

/// An amalgam `E` with embeddings `left: D1 -> E` and `right: D2 -> E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amalgam {
    pub structure: Structure,
    pub left: Morphism,
    pub right: Morphism,
}

impl Amalgam {
    /// Both maps are embeddings.
    pub fn is_valid(&self, d1: &Structure, d2: &Structure) -> bool {
        self.left.is_embedding(d1, &self.structure) && self.right.is_embedding(d2, &self.structure)
    }

    /// Both maps are embeddings and agree on `c`.
    pub fn commutes(&self, f1: &Morphism, f2: &Morphism) -> bool {
        f1.compose(&self.left) == f2.compose(&self.right)
    }
}

/// Disjoint union of `d1` and `d2` glued along the images of `c`. Elements of `d1`
/// come first in their order, then the new elements of `d2` in theirs.
pub fn free_amalgam(
    c: &Structure,
    d1: &Structure,
    f1: &Morphism,
    d2: &Structure,
    f2: &Morphism,
) -> Amalgam {
    let _ = c;
    let mut e = d1.clone();
    let mut right = vec![usize::MAX; d2.size()];
    for (ci, img) in f2.map.iter().enumerate() {
        right[*img] = f1.map[ci];
    }
    for (x, slot) in right.iter_mut().enumerate() {
        if *slot == usize::MAX {
            *slot = e.add_fresh(d2.name(x));
        }
    }
    for r in 0..d2.vocab().len() {
        for t in d2.relation(r) {
            e.insert(r, t.iter().map(|x| right[*x]).collect());
        }
    }
    Amalgam {
        structure: e,
        left: Morphism::identity(d1.size()),
        right: Morphism::new(right),
    }
}

/// Exhaustive amalgam search within `g1(D1) ∪ g2(D2)`: every way of identifying new
/// points of `d2` with new points of `d1` and every choice of mixed tuples. For a
/// hereditary class this finds an amalgam whenever one exists at all.
pub fn search_amalgam(
    class: &(impl AgeClass + ?Sized),
    d1: &Structure,
    f1: &Morphism,
    d2: &Structure,
    f2: &Morphism,
    cap: u64,
) -> Result<Option<Amalgam>> {
    let in_c1: Vec<bool> = (0..d1.size()).map(|x| f1.map.contains(&x)).collect();
    let new1: Vec<Elem> = (0..d1.size()).filter(|x| !in_c1[*x]).collect();
    let mut base_right = vec![usize::MAX; d2.size()];
    for (ci, img) in f2.map.iter().enumerate() {
        base_right[*img] = f1.map[ci];
    }
    let new2: Vec<Elem> = (0..d2.size())
        .filter(|x| base_right[*x] == usize::MAX)
        .collect();
    let mut budget = cap;
    let mut ident: Vec<Option<Elem>> = vec![None; new2.len()];
    // Identification patterns ordered by number of identified points, most first.
    let mut patterns = Vec::new();
    collect_identifications(&new1, 0, &mut ident, &mut Vec::new(), &mut patterns);
    patterns.sort_by_key(|p: &Vec<Option<Elem>>| std::cmp::Reverse(p.iter().flatten().count()));
    for pat in patterns {
        let mut e = d1.clone();
        let mut right = base_right.clone();
        for (k, x) in new2.iter().enumerate() {
            right[*x] = match pat[k] {
                Some(y) => y,
                None => e.add_fresh(d2.name(*x)),
            };
        }
        let mut conflict = false;
        for r in 0..d2.vocab().len() {
            for t in d2.relation(r) {
                let img: Tuple = t.iter().map(|x| right[*x]).collect();
                if img.iter().all(|y| *y < d1.size()) && !d1.holds(r, &img) {
                    conflict = true;
                }
                e.insert(r, img);
            }
        }
        if conflict {
            continue;
        }
        let mut only1 = vec![false; e.size()];
        let mut only2 = vec![false; e.size()];
        for x in &new1 {
            only1[*x] = !pat.contains(&Some(*x));
        }
        for (k, x) in new2.iter().enumerate() {
            if pat[k].is_none() {
                only2[right[*x]] = true;
            }
        }
        let mut mixed: Vec<(usize, Tuple)> = Vec::new();
        let v = e.vocab().clone();
        for r in 0..v.len() {
            for t in TupleIter::new(e.size(), v.arity(r)) {
                if t.iter().any(|y| only1[*y])
                    && t.iter().any(|y| only2[*y])
                    && sorts_allow(&e, r, &t)
                {
                    mixed.push((r, t));
                }
            }
        }
        if mixed.len() > 40 {
            return Err(Error::cap("mixed tuples in amalgam search", 40));
        }
        let count = 1u64 << mixed.len();
        if count > budget {
            return Err(Error::cap("amalgam candidates", cap));
        }
        budget -= count;
        for mask in 0..count {
            let mut cand = e.clone();
            for (i, (r, t)) in mixed.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    cand.insert(*r, t.clone());
                }
            }
            if !class.contains(&cand) {
                continue;
            }
            let a = Amalgam {
                structure: cand,
                left: Morphism::identity(d1.size()),
                right: Morphism::new(right.clone()),
            };
            if a.is_valid(d1, d2) {
                return Ok(Some(a));
            }
        }
    }
    Ok(None)
}

fn sorts_allow(e: &Structure, r: usize, t: &[Elem]) -> bool {
    let v = e.vocab();
    if v.is_diagonal(r) && t.iter().any(|x| *x != t[0]) {
        return false;
    }
    match v.sort(r) {
        None => true,
        Some(pos) => pos
            .iter()
            .zip(t)
            .all(|(req, x)| req.is_none_or(|u| e.holds(u, &[*x]))),
    }
}

fn collect_identifications(
    new1: &[Elem],
    k: usize,
    cur: &mut Vec<Option<Elem>>,
    used: &mut Vec<Elem>,
    out: &mut Vec<Vec<Option<Elem>>>,
) {
    if k == cur.len() {
        out.push(cur.clone());
        return;
    }
    cur[k] = None;
    collect_identifications(new1, k + 1, cur, used, out);
    for y in new1 {
        if used.contains(y) {
            continue;
        }
        cur[k] = Some(*y);
        used.push(*y);
        collect_identifications(new1, k + 1, cur, used, out);
        used.pop();
    }
    cur[k] = None;
}

/// Strategy first, exhaustive search as fallback. Any result is checked to be a
/// commuting amalgam in the class.
pub fn amalgamate_or_search(
    class: &(impl AgeClass + ?Sized),
    c: &Structure,
    d1: &Structure,
    f1: &Morphism,
    d2: &Structure,
    f2: &Morphism,
    cap: u64,
) -> Result<Option<Amalgam>> {
    if let Some(a) = class.amalgamate(c, d1, f1, d2, f2)? {
        if class.contains(&a.structure) && a.is_valid(d1, d2) && a.commutes(f1, f2) {
            return Ok(Some(a));
        }
    }
    search_amalgam(class, d1, f1, d2, f2, cap)
}

pub(crate) fn random_member_extension(
    class: &(impl AgeClass + ?Sized),
    s: &Structure,
    rng: &mut dyn rand::RngCore,
) -> Option<Structure> {
    let choices = unary_choices(s.vocab());
    for _ in 0..256 {
        let unary = &choices[rng.gen_range(0..choices.len())];
        let mut t = s.clone();
        let new = t.add_fresh(&format!("e{}", s.size()));
        for (u, on) in unary.iter().enumerate() {
            if *on {
                t.insert(u, vec![new]);
            }
        }
        let cands = candidate_tuples(&t, new, unary).ok()?;
        for (r, tup) in cands {
            if rng.gen_bool(0.5) {
                t.insert(r, tup);
            }
        }
        if class.contains(&t) {
            return Some(t);
        }
    }
    None
}
