use std::ops::ControlFlow;

use super::finite::{Elem, Structure, Tuple};
use crate::error::{Error, Result};

/// A map from the domain of a source structure into a target structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Morphism {
    pub map: Vec<Elem>,
}

impl Morphism {
    pub fn new(map: Vec<Elem>) -> Self {
        Morphism { map }
    }

    pub fn identity(n: usize) -> Self {
        Morphism {
            map: (0..n).collect(),
        }
    }

    pub fn apply(&self, e: Elem) -> Elem {
        self.map[e]
    }

    pub fn apply_tuple(&self, t: &[Elem]) -> Tuple {
        t.iter().map(|e| self.map[*e]).collect()
    }

    pub fn compose(&self, after: &Morphism) -> Morphism {
        Morphism {
            map: self.map.iter().map(|e| after.map[*e]).collect(),
        }
    }

    /// Whether this map is an embedding of `a` into `b`: injective, preserving and
    /// reflecting every relation.
    pub fn is_embedding(&self, a: &Structure, b: &Structure) -> bool {
        if self.map.len() != a.size() || self.map.iter().any(|e| *e >= b.size()) {
            return false;
        }
        let mut seen = vec![false; b.size()];
        for e in &self.map {
            if std::mem::replace(&mut seen[*e], true) {
                return false;
            }
        }
        if a.vocab().symbols() != b.vocab().symbols() {
            return false;
        }
        let mut inv = vec![usize::MAX; b.size()];
        for (i, e) in self.map.iter().enumerate() {
            inv[*e] = i;
        }
        for r in 0..a.vocab().len() {
            if a.relation(r)
                .iter()
                .any(|t| !b.holds(r, &self.apply_tuple(t)))
            {
                return false;
            }
            for t in b.relation(r) {
                if t.iter().all(|e| inv[*e] != usize::MAX) {
                    let pre: Tuple = t.iter().map(|e| inv[*e]).collect();
                    if !a.holds(r, &pre) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn same_vocab(a: &Structure, b: &Structure) -> Result<()> {
    if a.vocab().symbols() != b.vocab().symbols() {
        return Err(Error::VocabularyMismatch(
            "structures are over different vocabularies".into(),
        ));
    }
    Ok(())
}

/// All embeddings of `a` into `b`, in lexicographic order of images. With
/// `iso_only` only bijective ones are returned.
pub fn enumerate_embeddings(a: &Structure, b: &Structure, iso_only: bool) -> Result<Vec<Morphism>> {
    same_vocab(a, b)?;
    if iso_only && a.size() != b.size() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    Matcher::new(a, b).for_each(&[], |m| {
        out.push(Morphism::new(m.to_vec()));
        ControlFlow::Continue(())
    });
    out.sort();
    Ok(out)
}

/// Number of embeddings of `a` into `b`.
pub fn count_embeddings(a: &Structure, b: &Structure) -> Result<usize> {
    same_vocab(a, b)?;
    let mut n = 0;
    Matcher::new(a, b).for_each(&[], |_| {
        n += 1;
        ControlFlow::Continue(())
    });
    Ok(n)
}

/// Some embedding of `a` into `b`, if one exists.
pub fn find_embedding(a: &Structure, b: &Structure) -> Result<Option<Morphism>> {
    same_vocab(a, b)?;
    Ok(Matcher::new(a, b).first(&[]))
}

/// Extend a partial assignment (`fixed[i] = Some(j)` sends `i` to `j`) to an embedding.
pub fn extend_embedding(
    a: &Structure,
    b: &Structure,
    fixed: &[Option<Elem>],
) -> Result<Option<Morphism>> {
    same_vocab(a, b)?;
    Ok(Matcher::new(a, b).first(fixed))
}

pub fn are_isomorphic(a: &Structure, b: &Structure) -> bool {
    a.size() == b.size()
        && a.vocab().symbols() == b.vocab().symbols()
        && a.tuple_count() == b.tuple_count()
        && Matcher::new(a, b).first(&[]).is_some()
}

/// Backtracking embedding search with incidence lists. Built once per pair of
/// structures and reusable across partial assignments.
pub struct Matcher<'a> {
    a: &'a Structure,
    b: &'a Structure,
    a_inc: Vec<Vec<(usize, &'a Tuple)>>,
    b_inc: Vec<Vec<(usize, &'a Tuple)>>,
}

impl<'a> Matcher<'a> {
    pub fn new(a: &'a Structure, b: &'a Structure) -> Self {
        Matcher {
            a,
            b,
            a_inc: a.incidence(),
            b_inc: b.incidence(),
        }
    }

    pub fn first(&self, fixed: &[Option<Elem>]) -> Option<Morphism> {
        let mut found = None;
        self.for_each(fixed, |m| {
            found = Some(Morphism::new(m.to_vec()));
            ControlFlow::Break(())
        });
        found
    }

    /// Visit every embedding agreeing with `fixed` (missing entries are free).
    pub fn for_each<F>(&self, fixed: &[Option<Elem>], mut f: F)
    where
        F: FnMut(&[Elem]) -> ControlFlow<()>,
    {
        let n = self.a.size();
        if n > self.b.size() {
            return;
        }
        let mut map = vec![usize::MAX; n];
        let mut inv = vec![usize::MAX; self.b.size()];
        let mut order: Vec<Elem> = Vec::with_capacity(n);
        for (i, t) in fixed.iter().enumerate() {
            if t.is_some() && i < n {
                order.push(i);
            }
        }
        // Remaining elements: prefer ones incident to already ordered elements.
        let mut placed = vec![false; n];
        for e in &order {
            placed[*e] = true;
        }
        while order.len() < n {
            let mut best = None;
            let mut best_score = 0usize;
            for e in 0..n {
                if placed[e] {
                    continue;
                }
                let score = self.a_inc[e]
                    .iter()
                    .filter(|(_, t)| t.iter().any(|x| placed[*x]))
                    .count();
                if best.is_none() || score > best_score {
                    best = Some(e);
                    best_score = score;
                }
            }
            let e = best.expect("unplaced element");
            placed[e] = true;
            order.push(e);
        }
        let mut targets: Vec<Vec<Elem>> = Vec::with_capacity(n);
        for e in &order {
            match fixed.get(*e).copied().flatten() {
                Some(t) if t < self.b.size() => targets.push(vec![t]),
                Some(_) => return,
                None => targets.push((0..self.b.size()).collect()),
            }
        }
        let _ = self.search(0, &order, &targets, &mut map, &mut inv, &mut f);
    }

    fn search<F>(
        &self,
        depth: usize,
        order: &[Elem],
        targets: &[Vec<Elem>],
        map: &mut [Elem],
        inv: &mut [Elem],
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[Elem]) -> ControlFlow<()>,
    {
        if depth == order.len() {
            return f(map);
        }
        let x = order[depth];
        for &y in &targets[depth] {
            if inv[y] != usize::MAX {
                continue;
            }
            map[x] = y;
            inv[y] = x;
            if self.consistent(x, y, map, inv) {
                self.search(depth + 1, order, targets, map, inv, f)?;
            }
            map[x] = usize::MAX;
            inv[y] = usize::MAX;
        }
        ControlFlow::Continue(())
    }

    fn consistent(&self, x: Elem, y: Elem, map: &[Elem], inv: &[Elem]) -> bool {
        let mut buf = Vec::new();
        for (r, t) in &self.a_inc[x] {
            if t.iter().all(|e| map[*e] != usize::MAX) {
                buf.clear();
                buf.extend(t.iter().map(|e| map[*e]));
                if !self.b.holds(*r, &buf) {
                    return false;
                }
            }
        }
        for (r, t) in &self.b_inc[y] {
            if t.iter().all(|e| inv[*e] != usize::MAX) {
                buf.clear();
                buf.extend(t.iter().map(|e| inv[*e]));
                if !self.a.holds(*r, &buf) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Vocabulary;
    use std::sync::Arc;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Structure {
        let v = Arc::new(Vocabulary::new([("E", 2)]).unwrap());
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut s = Structure::build(v, &names, &[]).unwrap();
        for (a, b) in edges {
            s.insert(0, vec![*a, *b]);
            s.insert(0, vec![*b, *a]);
        }
        s
    }

    #[test]
    fn vertex_and_edge_into_triangle() {
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(
            enumerate_embeddings(&graph(1, &[]), &tri, false)
                .unwrap()
                .len(),
            3
        );
        let edge = enumerate_embeddings(&graph(2, &[(0, 1)]), &tri, false).unwrap();
        assert_eq!(edge.len(), 6);
        assert!(edge.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn triangle_not_iso_to_path() {
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let path = graph(3, &[(0, 1), (1, 2)]);
        assert!(enumerate_embeddings(&tri, &path, true).unwrap().is_empty());
        assert!(!are_isomorphic(&tri, &path));
        assert_eq!(enumerate_embeddings(&path, &path, true).unwrap().len(), 2);
    }

    #[test]
    fn embeddings_reflect_non_edges() {
        let empty2 = graph(2, &[]);
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(enumerate_embeddings(&empty2, &tri, false)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn partial_assignment_is_respected() {
        let path = graph(3, &[(0, 1), (1, 2)]);
        let edge = graph(2, &[(0, 1)]);
        let m = extend_embedding(&edge, &path, &[Some(1), None])
            .unwrap()
            .unwrap();
        assert_eq!(m.map[0], 1);
        assert!(m.is_embedding(&edge, &path));
        assert!(extend_embedding(&edge, &path, &[Some(0), Some(2)])
            .unwrap()
            .is_none());
    }

    #[test]
    fn vocabulary_mismatch_is_an_error() {
        let v = Arc::new(Vocabulary::new([("R", 2)]).unwrap());
        let other = Structure::build(v, &["a"], &[]).unwrap();
        assert!(matches!(
            enumerate_embeddings(&graph(1, &[]), &other, false),
            Err(Error::VocabularyMismatch(_))
        ));
    }
}
