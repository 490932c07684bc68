use std::collections::BTreeSet;
use std::sync::Arc;

use super::class::{AgeClass, Amalgam};
use crate::error::{Error, Result};
use crate::logic::Sentence;
use crate::structure::{canonical_form, find_embedding, CanonKey, Morphism, Structure, Vocabulary};

/// A finite class given by an explicit list of members, closed under isomorphism.
#[derive(Debug, Clone)]
pub struct EnumeratedClass {
    name: String,
    vocab: Arc<Vocabulary>,
    keys: BTreeSet<CanonKey>,
}

impl EnumeratedClass {
    pub fn new(name: &str, vocab: Arc<Vocabulary>, members: &[Structure]) -> Result<Self> {
        let mut keys = BTreeSet::new();
        for m in members {
            if m.vocab().symbols() != vocab.symbols() {
                return Err(Error::VocabularyMismatch(format!(
                    "member of {name} over another vocabulary"
                )));
            }
            keys.insert(canonical_form(m));
        }
        Ok(EnumeratedClass {
            name: name.to_string(),
            vocab,
            keys,
        })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

impl AgeClass for EnumeratedClass {
    fn name(&self) -> &str {
        &self.name
    }

    fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    fn contains(&self, s: &Structure) -> bool {
        self.keys.contains(&canonical_form(s))
    }
}

/// A class with one isomorphism type removed. Used for fault injection; the result
/// is usually no longer hereditary.
pub struct ExcludeMember<'a> {
    inner: &'a dyn AgeClass,
    name: String,
    excluded: CanonKey,
}

impl<'a> ExcludeMember<'a> {
    pub fn new(inner: &'a dyn AgeClass, excluded: &Structure) -> Self {
        ExcludeMember {
            inner,
            name: format!("{} minus one member", inner.name()),
            excluded: canonical_form(excluded),
        }
    }
}

impl AgeClass for ExcludeMember<'_> {
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
        self.inner.contains(s) && canonical_form(s) != self.excluded
    }

    fn extensions(&self, s: &Structure, cap: u64) -> Result<Vec<Structure>> {
        Ok(self
            .inner
            .extensions(s, cap)?
            .into_iter()
            .filter(|t| canonical_form(t) != self.excluded)
            .collect())
    }

    fn strategy(&self) -> &str {
        self.inner.strategy()
    }

    fn close(&self, s: &mut Structure) {
        self.inner.close(s)
    }

    fn amalgamate(
        &self,
        c: &Structure,
        d1: &Structure,
        f1: &Morphism,
        d2: &Structure,
        f2: &Morphism,
    ) -> Result<Option<Amalgam>> {
        Ok(self
            .inner
            .amalgamate(c, d1, f1, d2, f2)?
            .filter(|a| self.contains(&a.structure)))
    }

    fn discipline_axioms(&self, max_q: usize) -> Vec<Sentence> {
        self.inner.discipline_axioms(max_q)
    }
}

/// Structures of a base class omitting every listed configuration as an induced
/// substructure. Without a base class every structure over the vocabulary is admitted.
pub struct ForbiddenClass {
    name: String,
    vocab: Arc<Vocabulary>,
    base: Option<Box<dyn AgeClass>>,
    forbidden: Vec<Structure>,
}

impl ForbiddenClass {
    pub fn new(
        name: &str,
        vocab: Arc<Vocabulary>,
        base: Option<Box<dyn AgeClass>>,
        forbidden: Vec<Structure>,
    ) -> Result<Self> {
        if let Some(b) = &base {
            if b.vocabulary().symbols() != vocab.symbols() {
                return Err(Error::VocabularyMismatch("base class vocabulary".into()));
            }
        }
        for f in &forbidden {
            if f.vocab().symbols() != vocab.symbols() {
                return Err(Error::VocabularyMismatch(
                    "forbidden configuration over another vocabulary".into(),
                ));
            }
        }
        Ok(ForbiddenClass {
            name: name.to_string(),
            vocab,
            base,
            forbidden,
        })
    }

    pub fn forbidden(&self) -> &[Structure] {
        &self.forbidden
    }
}

impl AgeClass for ForbiddenClass {
    fn name(&self) -> &str {
        &self.name
    }

    fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    fn ambient(&self, s: &Structure) -> bool {
        self.base.as_ref().is_none_or(|b| b.ambient(s))
    }

    fn contains(&self, s: &Structure) -> bool {
        let s = match s.vocab().symbols() == self.vocab.symbols() {
            true => s,
            false => return false,
        };
        if let Some(b) = &self.base {
            if !b.contains(s) {
                return false;
            }
        }
        s.validate().is_ok()
            && self
                .forbidden
                .iter()
                .all(|f| matches!(find_embedding(f, s), Ok(None)))
    }

    fn violation(&self, s: &Structure) -> Option<String> {
        if let Some(b) = &self.base {
            if let Some(v) = b.violation(s) {
                return Some(v);
            }
        }
        for (i, f) in self.forbidden.iter().enumerate() {
            if let Ok(Some(m)) = find_embedding(f, s) {
                let names: Vec<&str> = m.map.iter().map(|e| s.name(*e)).collect();
                return Some(format!(
                    "forbidden configuration {} embeds at {}",
                    i + 1,
                    names.join(",")
                ));
            }
        }
        None
    }

    fn extensions(&self, s: &Structure, cap: u64) -> Result<Vec<Structure>> {
        match &self.base {
            Some(b) => Ok(b
                .extensions(s, cap)?
                .into_iter()
                .filter(|t| self.contains(t))
                .collect()),
            None => crate::structure::one_point_extensions(s, cap, |t| self.contains(t)),
        }
    }

    fn strategy(&self) -> &str {
        self.base.as_ref().map_or("free", |b| b.strategy())
    }

    fn close(&self, s: &mut Structure) {
        if let Some(b) = &self.base {
            b.close(s)
        }
    }

    fn amalgamate(
        &self,
        c: &Structure,
        d1: &Structure,
        f1: &Morphism,
        d2: &Structure,
        f2: &Morphism,
    ) -> Result<Option<Amalgam>> {
        let a = match &self.base {
            Some(b) => b.amalgamate(c, d1, f1, d2, f2)?,
            None => {
                let mut a = super::class::free_amalgam(c, d1, f1, d2, f2);
                self.close(&mut a.structure);
                Some(a)
            }
        };
        Ok(a.filter(|a| self.contains(&a.structure)))
    }

    fn discipline_axioms(&self, max_q: usize) -> Vec<Sentence> {
        self.base
            .as_ref()
            .map_or_else(Vec::new, |b| b.discipline_axioms(max_q))
    }
}
