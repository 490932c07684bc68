use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use super::vocab::{is_identifier, Vocabulary};
use crate::error::{Error, Result};

/// Index of an element in a structure's domain.
pub type Elem = usize;
/// A tuple of element indices.
pub type Tuple = Vec<Elem>;

/// A finite relational structure. Elements are indices `0..size`, each carrying an
/// opaque name; the domain order is the declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    vocab: Arc<Vocabulary>,
    names: Vec<String>,
    rels: Vec<BTreeSet<Tuple>>,
}

impl Structure {
    pub fn empty(vocab: Arc<Vocabulary>) -> Self {
        let rels = vec![BTreeSet::new(); vocab.len()];
        Structure {
            vocab,
            names: Vec::new(),
            rels,
        }
    }

    /// Build and validate a structure from element names and per-symbol tuples.
    pub fn build<S: AsRef<str>>(
        vocab: Arc<Vocabulary>,
        domain: &[S],
        tuples: &[(&str, Vec<Vec<&str>>)],
    ) -> Result<Self> {
        let mut s = Structure::empty(vocab);
        for name in domain {
            s.add_named(name.as_ref())?;
        }
        let index: HashMap<&str, Elem> = s
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        for (sym, list) in tuples {
            let r = s
                .vocab
                .index_of(sym)
                .ok_or_else(|| Error::UnknownSymbol(sym.to_string()))?;
            for t in list {
                let mut tuple = Vec::with_capacity(t.len());
                for e in t {
                    tuple.push(
                        *index
                            .get(e)
                            .ok_or_else(|| Error::UnknownElement(e.to_string()))?,
                    );
                }
                s.check_arity(r, &tuple)?;
                s.rels[r].insert(tuple);
            }
        }
        s.validate()?;
        Ok(s)
    }

    /// Assemble from parts and validate.
    pub fn from_parts(
        vocab: Arc<Vocabulary>,
        names: Vec<String>,
        rels: Vec<BTreeSet<Tuple>>,
    ) -> Result<Self> {
        let s = Structure::from_parts_unchecked(vocab, names, rels);
        s.validate()?;
        Ok(s)
    }

    pub(crate) fn from_parts_unchecked(
        vocab: Arc<Vocabulary>,
        names: Vec<String>,
        rels: Vec<BTreeSet<Tuple>>,
    ) -> Self {
        debug_assert_eq!(vocab.len(), rels.len());
        Structure { vocab, names, rels }
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e]
    }

    pub fn elem(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name)
    }

    pub fn elems(&self) -> std::ops::Range<Elem> {
        0..self.names.len()
    }

    pub fn relation(&self, symbol: usize) -> &BTreeSet<Tuple> {
        &self.rels[symbol]
    }

    pub fn relations(&self) -> &[BTreeSet<Tuple>] {
        &self.rels
    }

    pub fn holds(&self, symbol: usize, tuple: &[Elem]) -> bool {
        self.rels[symbol].contains(tuple)
    }

    /// Whether the named unary symbol holds of `e`; false if the symbol is absent.
    pub fn has(&self, unary: &str, e: Elem) -> bool {
        self.vocab
            .index_of(unary)
            .is_some_and(|u| self.rels[u].contains(&[e][..]))
    }

    pub fn tuple_count(&self) -> usize {
        self.rels.iter().map(BTreeSet::len).sum()
    }

    pub(crate) fn add_named(&mut self, name: &str) -> Result<Elem> {
        if !is_identifier(name) {
            return Err(Error::Invalid(format!("bad element name {name:?}")));
        }
        if self.names.iter().any(|n| n == name) {
            return Err(Error::DuplicateElement(name.to_string()));
        }
        self.names.push(name.to_string());
        Ok(self.names.len() - 1)
    }

    /// Add an element whose name is `stem` or `stem` followed by primes, whichever is free.
    pub(crate) fn add_fresh(&mut self, stem: &str) -> Elem {
        let mut name = stem.to_string();
        while self.names.contains(&name) {
            name.push('\'');
        }
        self.names.push(name);
        self.names.len() - 1
    }

    pub(crate) fn insert(&mut self, symbol: usize, tuple: Tuple) -> bool {
        debug_assert_eq!(tuple.len(), self.vocab.arity(symbol));
        self.rels[symbol].insert(tuple)
    }

    fn check_arity(&self, r: usize, t: &[Elem]) -> Result<()> {
        let expected = self.vocab.arity(r);
        if t.len() != expected {
            return Err(Error::ArityMismatch {
                symbol: self.vocab.name(r).to_string(),
                expected,
                found: t.len(),
            });
        }
        Ok(())
    }

    pub fn fmt_tuple(&self, t: &[Elem]) -> String {
        let mut s = String::from("(");
        for (i, e) in t.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", self.names[*e]);
        }
        s.push(')');
        s
    }

    /// Check arities, element bounds and the vocabulary's annotations.
    pub fn validate(&self) -> Result<()> {
        let n = self.size();
        for (r, rel) in self.rels.iter().enumerate() {
            for t in rel {
                self.check_arity(r, t)?;
                if let Some(e) = t.iter().find(|e| **e >= n) {
                    return Err(Error::UnknownElement(format!("#{e}")));
                }
            }
        }
        if let Some((a, b)) = self.vocab.partition() {
            for e in self.elems() {
                let in_a = self.rels[a].contains(&[e][..]);
                let in_b = self.rels[b].contains(&[e][..]);
                if in_a == in_b {
                    return Err(Error::PartitionViolation(self.names[e].clone()));
                }
            }
        }
        for (r, rel) in self.rels.iter().enumerate() {
            if let Some(sort) = self.vocab.sort(r) {
                for t in rel {
                    for (pos, req) in sort.iter().enumerate() {
                        if let Some(u) = req {
                            if !self.rels[*u].contains(&[t[pos]][..]) {
                                return Err(Error::SortViolation {
                                    symbol: self.vocab.name(r).to_string(),
                                    tuple: self.fmt_tuple(t),
                                    position: pos + 1,
                                    required: self.vocab.name(*u).to_string(),
                                });
                            }
                        }
                    }
                }
            }
            if self.vocab.is_diagonal(r) {
                if let Some(t) = rel.iter().find(|t| t.iter().any(|e| *e != t[0])) {
                    return Err(Error::DiagonalViolation {
                        symbol: self.vocab.name(r).to_string(),
                        tuple: self.fmt_tuple(t),
                    });
                }
            }
        }
        Ok(())
    }

    /// The substructure induced on `subset` (indices, kept in domain order).
    pub fn induced(&self, subset: &[Elem]) -> Structure {
        let mut keep: Vec<Elem> = subset.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut map = vec![usize::MAX; self.size()];
        for (i, e) in keep.iter().enumerate() {
            map[*e] = i;
        }
        let rels = self
            .rels
            .iter()
            .map(|rel| {
                rel.iter()
                    .filter(|t| t.iter().all(|e| map[*e] != usize::MAX))
                    .map(|t| t.iter().map(|e| map[*e]).collect())
                    .collect()
            })
            .collect();
        let names = keep.iter().map(|e| self.names[*e].clone()).collect();
        Structure::from_parts_unchecked(self.vocab.clone(), names, rels)
    }

    /// Induced substructure by element names.
    pub fn induced_substructure<S: AsRef<str>>(&self, subset: &[S]) -> Result<Structure> {
        let mut idx = Vec::with_capacity(subset.len());
        for n in subset {
            idx.push(
                self.elem(n.as_ref())
                    .ok_or_else(|| Error::UnknownElement(n.as_ref().to_string()))?,
            );
        }
        Ok(self.induced(&idx))
    }

    /// Rename-free reindexing: element `order[i]` of `self` becomes element `i`.
    pub fn reorder(&self, order: &[Elem]) -> Structure {
        debug_assert_eq!(order.len(), self.size());
        let mut inv = vec![0; self.size()];
        for (i, e) in order.iter().enumerate() {
            inv[*e] = i;
        }
        let rels = self
            .rels
            .iter()
            .map(|rel| {
                rel.iter()
                    .map(|t| t.iter().map(|e| inv[*e]).collect())
                    .collect()
            })
            .collect();
        let names = order.iter().map(|e| self.names[*e].clone()).collect();
        Structure::from_parts_unchecked(self.vocab.clone(), names, rels)
    }

    pub fn with_names(&self, names: Vec<String>) -> Result<Structure> {
        if names.len() != self.size() {
            return Err(Error::Invalid("name count differs from domain size".into()));
        }
        let mut s = Structure::empty(self.vocab.clone());
        for n in &names {
            s.add_named(n)?;
        }
        s.rels = self.rels.clone();
        Ok(s)
    }

    /// Names `e0, e1, ...` in domain order.
    pub fn with_default_names(&self) -> Structure {
        let mut s = self.clone();
        s.names = (0..self.size()).map(|i| format!("e{i}")).collect();
        s
    }

    /// Reduct to `vocab`: keeps the relations of symbols that `vocab` names.
    pub fn reduct(&self, vocab: Arc<Vocabulary>) -> Result<Structure> {
        let mut rels = Vec::with_capacity(vocab.len());
        for s in vocab.symbols() {
            let i = self
                .vocab
                .index_of(&s.name)
                .filter(|i| self.vocab.arity(*i) == s.arity)
                .ok_or_else(|| {
                    Error::VocabularyMismatch(format!("{}/{} not in source", s.name, s.arity))
                })?;
            rels.push(self.rels[i].clone());
        }
        Ok(Structure::from_parts_unchecked(
            vocab,
            self.names.clone(),
            rels,
        ))
    }

    /// Expansion to a larger vocabulary: symbols missing from `self` get empty relations.
    pub fn expand(&self, vocab: Arc<Vocabulary>) -> Result<Structure> {
        let mut rels = Vec::with_capacity(vocab.len());
        for s in vocab.symbols() {
            match self.vocab.index_of(&s.name) {
                Some(i) if self.vocab.arity(i) == s.arity => rels.push(self.rels[i].clone()),
                Some(_) => return Err(Error::VocabularyMismatch(format!("arity of {}", s.name))),
                None => rels.push(BTreeSet::new()),
            }
        }
        for s in self.vocab.symbols() {
            if vocab.index_of(&s.name).is_none() {
                return Err(Error::VocabularyMismatch(format!("{} dropped", s.name)));
            }
        }
        let out = Structure::from_parts_unchecked(vocab, self.names.clone(), rels);
        out.validate()?;
        Ok(out)
    }

    /// Elements satisfying a unary symbol, in domain order.
    pub fn extension_of(&self, unary: &str) -> Vec<Elem> {
        match self.vocab.index_of(unary) {
            Some(u) => self.relation(u).iter().map(|t| t[0]).collect(),
            None => Vec::new(),
        }
    }

    /// Per element, the (symbol, tuple) pairs it occurs in.
    pub fn incidence(&self) -> Vec<Vec<(usize, &Tuple)>> {
        let mut inc: Vec<Vec<(usize, &Tuple)>> = vec![Vec::new(); self.size()];
        for (r, rel) in self.rels.iter().enumerate() {
            for t in rel {
                let mut seen: Vec<Elem> = Vec::with_capacity(t.len());
                for e in t {
                    if !seen.contains(e) {
                        seen.push(*e);
                        inc[*e].push((r, t));
                    }
                }
            }
        }
        inc
    }
}

/// All tuples of a given length over `0..n`, in lexicographic order.
pub struct TupleIter {
    n: usize,
    next: Option<Tuple>,
}

impl TupleIter {
    pub fn new(n: usize, len: usize) -> Self {
        let next = if n == 0 && len > 0 {
            None
        } else {
            Some(vec![0; len])
        };
        TupleIter { n, next }
    }
}

impl Iterator for TupleIter {
    type Item = Tuple;

    fn next(&mut self) -> Option<Tuple> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut i = succ.len();
        while i > 0 {
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.n {
                self.next = Some(succ);
                return Some(cur);
            }
            succ[i] = 0;
        }
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_vocab() -> Arc<Vocabulary> {
        Arc::new(Vocabulary::new([("E", 2)]).unwrap())
    }

    fn triangle() -> Structure {
        Structure::build(
            graph_vocab(),
            &["a", "b", "c"],
            &[(
                "E",
                vec![
                    vec!["a", "b"],
                    vec!["b", "a"],
                    vec!["b", "c"],
                    vec!["c", "b"],
                    vec!["a", "c"],
                    vec!["c", "a"],
                ],
            )],
        )
        .unwrap()
    }

    #[test]
    fn smallest_symmetric_example() {
        let s = Structure::build(
            graph_vocab(),
            &["a", "b"],
            &[("E", vec![vec!["a", "b"], vec!["b", "a"]])],
        )
        .unwrap();
        assert_eq!(s.size(), 2);
        assert!(s.holds(0, &[0, 1]) && s.holds(0, &[1, 0]));
    }

    #[test]
    fn unknown_element_is_named() {
        let err = Structure::build(graph_vocab(), &["a"], &[("E", vec![vec!["a", "b"]])]);
        assert_eq!(err, Err(Error::UnknownElement("b".into())));
        assert_eq!(err.unwrap_err().to_string(), "unknown element b");
    }

    #[test]
    fn arity_mismatch_names_symbol() {
        let err = Structure::build(graph_vocab(), &["a"], &[("E", vec![vec!["a"]])]).unwrap_err();
        assert!(matches!(err, Error::ArityMismatch { ref symbol, .. } if symbol == "E"));
    }

    #[test]
    fn partition_violation() {
        let v = Arc::new(
            Vocabulary::new([("P", 1), ("Q", 1)])
                .unwrap()
                .with_partition("P", "Q")
                .unwrap(),
        );
        let err = Structure::build(
            v.clone(),
            &["x"],
            &[("P", vec![vec!["x"]]), ("Q", vec![vec!["x"]])],
        )
        .unwrap_err();
        assert_eq!(err, Error::PartitionViolation("x".into()));
        assert!(err.to_string().contains("partition violation"));
        // Neither side also violates the cover condition.
        assert!(Structure::build(v, &["x"], &[]).is_err());
    }

    #[test]
    fn induced_restrictions() {
        let t = triangle();
        let edge = t.induced_substructure(&["a", "b"]).unwrap();
        assert_eq!(edge.size(), 2);
        assert_eq!(edge.relation(0).len(), 2);
        let empty = t.induced_substructure::<&str>(&[]).unwrap();
        assert!(empty.is_empty() && empty.tuple_count() == 0);
        assert_eq!(t.induced_substructure(&["a", "b", "c"]).unwrap(), t);
        assert!(matches!(
            t.induced_substructure(&["z"]),
            Err(Error::UnknownElement(_))
        ));
    }

    #[test]
    fn empty_relations_are_distinct_from_absent_symbols() {
        let v = Arc::new(Vocabulary::new([("E", 2), ("R", 3)]).unwrap());
        let s = Structure::build(v, &["a"], &[]).unwrap();
        assert!(s.relation(1).is_empty());
        let small = Arc::new(Vocabulary::new([("E", 2)]).unwrap());
        assert_ne!(s.vocab().as_ref(), small.as_ref());
        assert!(s.reduct(small).is_ok());
    }

    #[test]
    fn tuple_iter_counts() {
        assert_eq!(TupleIter::new(3, 2).count(), 9);
        assert_eq!(TupleIter::new(0, 2).count(), 0);
        assert_eq!(TupleIter::new(0, 0).count(), 1);
        assert_eq!(TupleIter::new(2, 3).last(), Some(vec![1, 1, 1]));
    }

    #[test]
    fn repeated_coordinates_are_allowed() {
        let v = Arc::new(Vocabulary::new([("R", 3)]).unwrap());
        let s = Structure::build(v, &["a", "b"], &[("R", vec![vec!["a", "a", "b"]])]).unwrap();
        assert!(s.holds(0, &[0, 0, 1]));
    }
}
