use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fraisse::{free_amalgam, is_linear_order, AgeClass, Amalgam};
use crate::logic::{Formula, Quantifier, SchemeTag, Sentence};
use crate::structure::{Elem, Morphism, Structure, Vocabulary};

/// Finite linear orders (first symbol) with nested initial segments: every later
/// symbol is diagonal, its support is downward closed, and each support is
/// contained in the next one.
#[derive(Debug, Clone)]
pub struct SegmentedOrderClass {
    name: String,
    vocab: Arc<Vocabulary>,
}

impl SegmentedOrderClass {
    pub fn new(name: &str, vocab: Arc<Vocabulary>) -> Result<Self> {
        if vocab.is_empty() || vocab.arity(0) != 2 || vocab.is_diagonal(0) {
            return Err(Error::Invalid(
                "a segmented order needs a binary order symbol first".into(),
            ));
        }
        for r in 1..vocab.len() {
            if !vocab.is_diagonal(r) {
                return Err(Error::Invalid(format!(
                    "segment symbol {} must be diagonal",
                    vocab.name(r)
                )));
            }
        }
        if vocab.partition().is_some() {
            return Err(Error::Invalid("segmented orders take no partition".into()));
        }
        Ok(SegmentedOrderClass {
            name: name.to_string(),
            vocab,
        })
    }

    fn segments(&self) -> usize {
        self.vocab.len() - 1
    }

    fn in_segment(s: &Structure, seg: usize, x: Elem) -> bool {
        let r = seg + 1;
        s.holds(r, &vec![x; s.vocab().arity(r)])
    }

    /// Index of the first segment containing `x`, or the segment count.
    fn level(&self, s: &Structure, x: Elem) -> usize {
        (0..self.segments())
            .find(|j| Self::in_segment(s, *j, x))
            .unwrap_or(self.segments())
    }

    fn put(&self, s: &mut Structure, x: Elem, level: usize) {
        for j in level..self.segments() {
            let r = j + 1;
            s.insert(r, vec![x; self.vocab.arity(r)]);
        }
    }

    fn sorted(s: &Structure) -> Vec<Elem> {
        let mut v: Vec<(usize, Elem)> = s
            .elems()
            .map(|x| (s.elems().filter(|y| s.holds(0, &[*y, x])).count(), x))
            .collect();
        v.sort_unstable();
        v.into_iter().map(|(_, x)| x).collect()
    }
}

impl AgeClass for SegmentedOrderClass {
    fn name(&self) -> &str {
        &self.name
    }

    fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    fn ambient(&self, s: &Structure) -> bool {
        s.validate().is_ok()
    }

    fn contains(&self, s: &Structure) -> bool {
        if s.vocab().symbols() != self.vocab.symbols() || s.validate().is_err() {
            return false;
        }
        if !is_linear_order(s, 0) {
            return false;
        }
        for j in 0..self.segments() {
            for x in s.elems() {
                if !Self::in_segment(s, j, x) {
                    continue;
                }
                if j + 1 < self.segments() && !Self::in_segment(s, j + 1, x) {
                    return false;
                }
                for y in s.elems() {
                    if s.holds(0, &[y, x]) && !Self::in_segment(s, j, y) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn violation(&self, s: &Structure) -> Option<String> {
        if self.contains(s) {
            return None;
        }
        if !is_linear_order(s, 0) {
            return Some(format!(
                "{} is not a strict linear order",
                self.vocab.name(0)
            ));
        }
        Some("segments are not nested initial segments".into())
    }

    fn extensions(&self, s: &Structure, _cap: u64) -> Result<Vec<Structure>> {
        let order = Self::sorted(s);
        let levels: Vec<usize> = order.iter().map(|x| self.level(s, *x)).collect();
        let n = s.size();
        let mut out = Vec::new();
        for gap in 0..=n {
            let lo = if gap == 0 { 0 } else { levels[gap - 1] };
            let hi = if gap == n {
                self.segments()
            } else {
                levels[gap]
            };
            for lev in lo..=hi {
                let mut t = s.clone();
                let new = t.add_fresh(&format!("e{n}"));
                for (i, x) in order.iter().enumerate() {
                    if i < gap {
                        t.insert(0, vec![*x, new]);
                    } else {
                        t.insert(0, vec![new, *x]);
                    }
                }
                self.put(&mut t, new, lev);
                out.push(t);
            }
        }
        Ok(out)
    }

    fn member_bound(&self, n: usize) -> Option<u64> {
        let k = self.segments() as u64;
        let mut b: u64 = 1;
        for i in 1..=k {
            b = b * (n as u64 + i) / i;
        }
        Some(b)
    }

    fn strategy(&self) -> &str {
        "segment-merge"
    }

    fn amalgamate(
        &self,
        c: &Structure,
        d1: &Structure,
        f1: &Morphism,
        d2: &Structure,
        f2: &Morphism,
    ) -> Result<Option<Amalgam>> {
        let mut a = free_amalgam(c, d1, f1, d2, f2);
        let c_order: Vec<Elem> = Self::sorted(c).into_iter().map(|x| f1.map[x]).collect();
        let e = &a.structure;
        let in_d1 = |x: Elem| x < d1.size();
        let gap = |x: Elem| c_order.iter().filter(|cx| e.holds(0, &[**cx, x])).count();
        let rank1 = |x: Elem| d1.elems().filter(|y| d1.holds(0, &[*y, x])).count();
        let right_inv = |x: Elem| {
            a.right
                .map
                .iter()
                .position(|y| *y == x)
                .expect("new point of d2")
        };
        let rank2 = |x: Elem| {
            let y = right_inv(x);
            d2.elems().filter(|z| d2.holds(0, &[*z, y])).count()
        };
        let mut keyed: Vec<((usize, usize, usize, usize, usize), Elem)> = e
            .elems()
            .map(|x| {
                if let Some(k) = c_order.iter().position(|cx| *cx == x) {
                    ((k, 1, 0, 0, 0), x)
                } else if in_d1(x) {
                    ((gap(x), 0, self.level(e, x), 0, rank1(x)), x)
                } else {
                    ((gap(x), 0, self.level(e, x), 1, rank2(x)), x)
                }
            })
            .collect();
        keyed.sort_unstable();
        let order: Vec<Elem> = keyed.into_iter().map(|(_, x)| x).collect();
        let mut rels = a.structure.relations().to_vec();
        rels[0].clear();
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                rels[0].insert(vec![order[i], order[j]]);
            }
        }
        a.structure = Structure::from_parts_unchecked(
            a.structure.vocab().clone(),
            a.structure.names().to_vec(),
            rels,
        );
        Ok((self.contains(&a.structure) && a.is_valid(d1, d2)).then_some(a))
    }

    fn discipline_axioms(&self, max_q: usize) -> Vec<Sentence> {
        let mut out = Vec::new();
        for r in 1..self.vocab.len() {
            let ar = self.vocab.arity(r);
            if ar > max_q {
                continue;
            }
            let eqs: Vec<Formula> = (1..ar).map(|i| Formula::Eq(0, i)).collect();
            out.push(Sentence::with_blocks(
                &[(Quantifier::Forall, ar)],
                Formula::implies(
                    Formula::rel(self.vocab.name(r), (0..ar).collect()),
                    Formula::And(eqs),
                ),
                SchemeTag::B,
            ));
        }
        out
    }
}

/// Members of `inner` with at most `q` elements in the unary symbol `unary`.
pub struct SortBounded<'a> {
    inner: &'a dyn AgeClass,
    name: String,
    unary: usize,
    q: usize,
}

impl<'a> SortBounded<'a> {
    pub fn new(inner: &'a dyn AgeClass, unary: &str, q: usize) -> Result<Self> {
        let u = inner
            .vocabulary()
            .index_of(unary)
            .ok_or_else(|| Error::UnknownSymbol(unary.to_string()))?;
        Ok(SortBounded {
            inner,
            name: format!("{} with at most {q} {unary}-elements", inner.name()),
            unary: u,
            q,
        })
    }

    fn within(&self, s: &Structure) -> bool {
        s.relation(self.unary).len() <= self.q
    }
}

impl AgeClass for SortBounded<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn vocabulary(&self) -> &Arc<Vocabulary> {
        self.inner.vocabulary()
    }

    fn ambient(&self, s: &Structure) -> bool {
        self.inner.ambient(s)
    }

    fn contains(&self, s: &Structure) -> bool {
        self.within(s) && self.inner.contains(s)
    }

    fn extensions(&self, s: &Structure, cap: u64) -> Result<Vec<Structure>> {
        Ok(self
            .inner
            .extensions(s, cap)?
            .into_iter()
            .filter(|t| self.within(t))
            .collect())
    }

    fn strategy(&self) -> &str {
        self.inner.strategy()
    }
}
