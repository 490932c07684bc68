use std::collections::BTreeMap;
use std::sync::Arc;

use super::canon::{canonical_structure, CanonKey};
use super::finite::{Elem, Structure, Tuple, TupleIter};
use super::vocab::Vocabulary;
use crate::error::{Error, Result};

/// Default bound on the number of candidate structures examined by one enumeration.
pub const DEFAULT_CANDIDATE_CAP: u64 = 5_000_000;

/// Largest number of free candidate tuples a single one-point step may branch over.
const MAX_FREE_TUPLES: usize = 30;

/// The tuples that may newly hold once element `new` is added, given which unary
/// symbols hold of it. Respects sort and diagonal annotations.
pub(crate) fn candidate_tuples(
    s: &Structure,
    new: Elem,
    unary_of_new: &[bool],
) -> Result<Vec<(usize, Tuple)>> {
    let v = s.vocab();
    let n = s.size();
    let holds_unary = |u: usize, e: Elem| -> bool {
        if e == new {
            unary_of_new[u]
        } else {
            s.holds(u, &[e])
        }
    };
    let mut out = Vec::new();
    for r in 0..v.len() {
        let ar = v.arity(r);
        if ar == 1 {
            continue;
        }
        if v.is_diagonal(r) {
            let t = vec![new; ar];
            if sort_ok(v, r, &t, &holds_unary) {
                out.push((r, t));
            }
            continue;
        }
        let total = (n as u64).checked_pow(ar as u32).unwrap_or(u64::MAX);
        if total > 1 << 24 {
            return Err(Error::cap("tuples per symbol", 1 << 24));
        }
        for t in TupleIter::new(n, ar) {
            if t.contains(&new) && sort_ok(v, r, &t, &holds_unary) {
                out.push((r, t));
            }
        }
    }
    Ok(out)
}

fn sort_ok(v: &Vocabulary, r: usize, t: &[Elem], holds: &impl Fn(usize, Elem) -> bool) -> bool {
    match v.sort(r) {
        None => true,
        Some(pos) => pos
            .iter()
            .zip(t)
            .all(|(req, e)| req.is_none_or(|u| holds(u, *e))),
    }
}

/// Unary assignments for a new element that respect the partition and unary sorts.
pub(crate) fn unary_choices(v: &Vocabulary) -> Vec<Vec<bool>> {
    let unary: Vec<usize> = (0..v.len()).filter(|r| v.arity(*r) == 1).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << unary.len()) {
        let mut on = vec![false; v.len()];
        for (i, u) in unary.iter().enumerate() {
            on[*u] = mask >> i & 1 == 1;
        }
        if let Some((a, b)) = v.partition() {
            if on[a] == on[b] {
                continue;
            }
        }
        let ok = unary.iter().all(|u| {
            !on[*u]
                || v.sort(*u)
                    .is_none_or(|pos| pos[0].is_none_or(|req| on[req]))
        });
        if ok {
            out.push(on);
        }
    }
    out
}

/// Every structure obtained from `s` by adding one element and
/// any annotation-respecting set of tuples involving it. `keep` filters results.
pub fn one_point_extensions(
    s: &Structure,
    cap: u64,
    keep: impl FnMut(&Structure) -> bool,
) -> Result<Vec<Structure>> {
    let mut budget = cap;
    extensions_within(s, &mut budget, cap, keep)
}

fn extensions_within(
    s: &Structure,
    budget: &mut u64,
    cap: u64,
    mut keep: impl FnMut(&Structure) -> bool,
) -> Result<Vec<Structure>> {
    let v = s.vocab().clone();
    let mut out = Vec::new();
    for unary in unary_choices(&v) {
        let mut base = s.clone();
        let new = base.add_fresh(&format!("e{}", s.size()));
        for (u, on) in unary.iter().enumerate() {
            if *on {
                base.insert(u, vec![new]);
            }
        }
        let cands = candidate_tuples(&base, new, &unary)?;
        if cands.len() > MAX_FREE_TUPLES {
            return Err(Error::cap(
                "one-point candidate tuples",
                MAX_FREE_TUPLES as u64,
            ));
        }
        let count = 1u64 << cands.len();
        if count > *budget {
            return Err(Error::cap("enumeration candidates", cap));
        }
        *budget -= count;
        for mask in 0..count {
            let mut t = base.clone();
            for (i, (r, tup)) in cands.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    t.insert(*r, tup.clone());
                }
            }
            if keep(&t) {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// One structure per isomorphism class of the given size, in canonical key order.
/// Representatives are canonically ordered with names `e0, e1, ...`.
pub fn enumerate_structures(
    vocab: &Arc<Vocabulary>,
    size: usize,
    cap: u64,
) -> Result<Vec<Structure>> {
    enumerate_hereditary(vocab, size, cap, |_| true)
}

/// Isomorphism classes of size `size` all of whose initial segments satisfy `member`.
/// For a hereditary property this is exactly the members of that size.
pub fn enumerate_hereditary(
    vocab: &Arc<Vocabulary>,
    size: usize,
    cap: u64,
    mut member: impl FnMut(&Structure) -> bool,
) -> Result<Vec<Structure>> {
    let empty = Structure::empty(vocab.clone());
    let mut level: BTreeMap<CanonKey, Structure> = BTreeMap::new();
    if member(&empty) {
        let (k, c) = canonical_structure(&empty);
        level.insert(k, c);
    }
    let mut budget = cap;
    for _ in 0..size {
        let mut next = BTreeMap::new();
        for s in level.values() {
            let exts = extensions_within(s, &mut budget, cap, &mut member)?;
            for t in exts {
                let (k, c) = canonical_structure(&t);
                next.entry(k).or_insert(c);
            }
        }
        level = next;
    }
    Ok(level.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_counts() {
        let v = Arc::new(Vocabulary::new([("E", 2)]).unwrap());
        let sym_irr = |s: &Structure| {
            s.relation(0)
                .iter()
                .all(|t| t[0] != t[1] && s.holds(0, &[t[1], t[0]]))
        };
        let counts: Vec<usize> = (0..=4)
            .map(|n| {
                enumerate_hereditary(&v, n, DEFAULT_CANDIDATE_CAP, sym_irr)
                    .unwrap()
                    .len()
            })
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 11]);
    }

    #[test]
    fn pure_sets_have_one_class() {
        let v = Arc::new(Vocabulary::empty());
        for n in 0..6 {
            assert_eq!(enumerate_structures(&v, n, 1000).unwrap().len(), 1);
        }
    }

    #[test]
    fn respects_partition_and_sorts() {
        let v = Arc::new(
            Vocabulary::new([("P", 1), ("Q", 1), ("H", 2)])
                .unwrap()
                .with_partition("P", "Q")
                .unwrap()
                .with_sort("H", &[Some("Q"), Some("Q")])
                .unwrap(),
        );
        for s in enumerate_structures(&v, 2, 10_000).unwrap() {
            s.validate().unwrap();
        }
        // one element: P, Q, Q with loop
        assert_eq!(enumerate_structures(&v, 1, 100).unwrap().len(), 3);
    }

    #[test]
    fn cap_is_reported() {
        let v = Arc::new(Vocabulary::new([("E", 2)]).unwrap());
        assert!(matches!(
            enumerate_structures(&v, 3, 4),
            Err(Error::ResourceCap { .. })
        ));
    }
}
