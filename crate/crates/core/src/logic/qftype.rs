use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::structure::{Elem, Structure, Tuple, TupleIter, Vocabulary};

/// The quantifier-free type of a tuple: its equality pattern and the atoms it
/// satisfies, stated over equality blocks numbered by first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QfType {
    /// `blocks[i]` is the block of position `i`.
    pub blocks: Vec<usize>,
    /// For each symbol (vocabulary order): name and the satisfied block tuples.
    pub atoms: Vec<(String, BTreeSet<Tuple>)>,
}

impl QfType {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.iter().max().map_or(0, |m| m + 1)
    }

    /// The structure on the blocks, elements named `b0, b1, ...`.
    pub fn realize(&self, vocab: Arc<Vocabulary>) -> Result<Structure> {
        if vocab.len() != self.atoms.len()
            || vocab
                .symbols()
                .iter()
                .zip(&self.atoms)
                .any(|(s, (n, _))| s.name != *n)
        {
            return Err(Error::VocabularyMismatch(
                "type over another vocabulary".into(),
            ));
        }
        let names = (0..self.block_count()).map(|i| format!("b{i}")).collect();
        let rels = self.atoms.iter().map(|(_, a)| a.clone()).collect();
        Structure::from_parts(vocab, names, rels)
    }
}

impl fmt::Display for QfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pattern {:?}", self.blocks)?;
        for (n, a) in &self.atoms {
            for t in a {
                write!(f, " {n}{t:?}")?;
            }
        }
        Ok(())
    }
}

/// The complete atomic diagram of `tuple` in `s`.
pub fn qf_type(s: &Structure, tuple: &[Elem]) -> Result<QfType> {
    if let Some(e) = tuple.iter().find(|e| **e >= s.size()) {
        return Err(Error::UnknownElement(format!("#{e}")));
    }
    let mut distinct: Vec<Elem> = Vec::new();
    let blocks = tuple
        .iter()
        .map(|e| match distinct.iter().position(|d| d == e) {
            Some(i) => i,
            None => {
                distinct.push(*e);
                distinct.len() - 1
            }
        })
        .collect();
    let v = s.vocab();
    let k = distinct.len();
    let mut atoms = Vec::with_capacity(v.len());
    for r in 0..v.len() {
        let ar = v.arity(r);
        let mut set = BTreeSet::new();
        let exhaustive = (k as u64).saturating_pow(ar as u32);
        if exhaustive <= s.relation(r).len() as u64 {
            for bt in TupleIter::new(k, ar) {
                let t: Tuple = bt.iter().map(|b| distinct[*b]).collect();
                if s.holds(r, &t) {
                    set.insert(bt);
                }
            }
        } else {
            for t in s.relation(r) {
                let bt: Option<Tuple> = t
                    .iter()
                    .map(|e| distinct.iter().position(|d| d == e))
                    .collect();
                if let Some(bt) = bt {
                    set.insert(bt);
                }
            }
        }
        atoms.push((v.name(r).to_string(), set));
    }
    Ok(QfType { blocks, atoms })
}

/// Same as [`qf_type`] with element names.
pub fn qf_type_named<S: AsRef<str>>(s: &Structure, tuple: &[S]) -> Result<QfType> {
    let idx = tuple
        .iter()
        .map(|n| {
            s.elem(n.as_ref())
                .ok_or_else(|| Error::UnknownElement(n.as_ref().to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    qf_type(s, &idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_positions_share_a_block() {
        let s = Structure::build(Arc::new(Vocabulary::empty()), &["a", "b"], &[]).unwrap();
        let t = qf_type_named(&s, &["a", "a"]).unwrap();
        assert_eq!(t.blocks, vec![0, 0]);
        assert_eq!(qf_type(&s, &[]).unwrap().blocks, Vec::<usize>::new());
    }

    #[test]
    fn triangle_pair() {
        let v = Arc::new(Vocabulary::new([("E", 2)]).unwrap());
        let e = |a: &'static str, b: &'static str| vec![a, b];
        let tri = Structure::build(
            v,
            &["a", "b", "c"],
            &[(
                "E",
                vec![
                    e("a", "b"),
                    e("b", "a"),
                    e("b", "c"),
                    e("c", "b"),
                    e("a", "c"),
                    e("c", "a"),
                ],
            )],
        )
        .unwrap();
        let t = qf_type_named(&tri, &["a", "b"]).unwrap();
        assert_eq!(t.blocks, vec![0, 1]);
        let expected: BTreeSet<Tuple> = [vec![0, 1], vec![1, 0]].into_iter().collect();
        assert_eq!(t.atoms[0].1, expected);
        assert_eq!(t, qf_type_named(&tri, &["c", "a"]).unwrap());
        assert!(qf_type(&tri, &[7]).is_err());
    }
}
