use crate::error::{Error, Result};

/// A relation symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered relational vocabulary with optional sort-discipline annotations.
///
/// Annotations are constraints on structures, not extra symbols:
/// * a partition names two unary symbols whose extensions split the domain;
/// * a sort restriction requires position `i` of a symbol to satisfy a unary symbol;
/// * a diagonal symbol only holds on constant tuples `(x, .., x)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Vocabulary {
    symbols: Vec<Symbol>,
    partition: Option<(usize, usize)>,
    sorts: Vec<Option<Vec<Option<usize>>>>,
    diagonal: Vec<bool>,
}

impl Vocabulary {
    pub fn new<S: AsRef<str>>(symbols: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut v = Vocabulary::default();
        for (name, arity) in symbols {
            v.push(name.as_ref(), arity)?;
        }
        Ok(v)
    }

    /// The vocabulary of pure sets.
    pub fn empty() -> Self {
        Vocabulary::default()
    }

    pub fn push(&mut self, name: &str, arity: usize) -> Result<usize> {
        if arity == 0 {
            return Err(Error::ZeroArity(name.to_string()));
        }
        if !is_identifier(name) {
            return Err(Error::Annotation(format!("bad symbol name {name:?}")));
        }
        if self.index_of(name).is_some() {
            return Err(Error::DuplicateSymbol(name.to_string()));
        }
        self.symbols.push(Symbol {
            name: name.to_string(),
            arity,
        });
        self.sorts.push(None);
        self.diagonal.push(false);
        Ok(self.symbols.len() - 1)
    }

    pub fn with_partition(mut self, first: &str, second: &str) -> Result<Self> {
        self.set_partition(first, second)?;
        Ok(self)
    }

    pub fn set_partition(&mut self, first: &str, second: &str) -> Result<()> {
        if self.partition.is_some() {
            return Err(Error::Annotation("at most one partition".into()));
        }
        let a = self.unary(first)?;
        let b = self.unary(second)?;
        if a == b {
            return Err(Error::Annotation(
                "partition needs two distinct symbols".into(),
            ));
        }
        self.partition = Some((a, b));
        Ok(())
    }

    /// Restrict the positions of `symbol`; `None` leaves a position free.
    pub fn with_sort(mut self, symbol: &str, positions: &[Option<&str>]) -> Result<Self> {
        self.set_sort(symbol, positions)?;
        Ok(self)
    }

    pub fn set_sort(&mut self, symbol: &str, positions: &[Option<&str>]) -> Result<()> {
        let s = self
            .index_of(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
        if positions.len() != self.symbols[s].arity {
            return Err(Error::ArityMismatch {
                symbol: symbol.to_string(),
                expected: self.symbols[s].arity,
                found: positions.len(),
            });
        }
        let mut resolved = Vec::with_capacity(positions.len());
        for p in positions {
            resolved.push(match p {
                Some(u) => Some(self.unary(u)?),
                None => None,
            });
        }
        self.sorts[s] = Some(resolved);
        Ok(())
    }

    pub fn with_diagonal(mut self, symbol: &str) -> Result<Self> {
        self.set_diagonal(symbol)?;
        Ok(self)
    }

    pub fn set_diagonal(&mut self, symbol: &str) -> Result<()> {
        let s = self
            .index_of(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
        self.diagonal[s] = true;
        Ok(())
    }

    fn unary(&self, name: &str) -> Result<usize> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        if self.symbols[i].arity != 1 {
            return Err(Error::Annotation(format!("{name} is not unary")));
        }
        Ok(i)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> &Symbol {
        &self.symbols[i]
    }

    pub fn arity(&self, i: usize) -> usize {
        self.symbols[i].arity
    }

    pub fn name(&self, i: usize) -> &str {
        &self.symbols[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn partition(&self) -> Option<(usize, usize)> {
        self.partition
    }

    pub fn sort(&self, symbol: usize) -> Option<&[Option<usize>]> {
        self.sorts[symbol].as_deref()
    }

    pub fn is_diagonal(&self, symbol: usize) -> bool {
        self.diagonal[symbol]
    }

    pub fn has_annotations(&self) -> bool {
        self.partition.is_some()
            || self.sorts.iter().any(Option::is_some)
            || self.diagonal.iter().any(|d| *d)
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    /// Symbols of `self` in order, followed by the symbols of `other` not already
    /// present (matched by name, arities must agree). Annotations of both carry over.
    pub fn union(&self, other: &Vocabulary) -> Result<Vocabulary> {
        let mut v = self.clone();
        for s in &other.symbols {
            match v.index_of(&s.name) {
                Some(i) if v.symbols[i].arity == s.arity => {}
                Some(_) => {
                    return Err(Error::VocabularyMismatch(format!(
                        "symbol {} with two arities",
                        s.name
                    )))
                }
                None => {
                    v.push(&s.name, s.arity)?;
                }
            }
        }
        if let Some((a, b)) = other.partition {
            let (a, b) = (other.name(a).to_string(), other.name(b).to_string());
            match v.partition {
                Some((x, y)) if v.name(x) == a && v.name(y) == b => {}
                Some(_) => return Err(Error::Annotation("conflicting partitions".into())),
                None => v.set_partition(&a, &b)?,
            }
        }
        for (i, s) in other.symbols.iter().enumerate() {
            if let Some(pos) = &other.sorts[i] {
                let names: Vec<Option<&str>> =
                    pos.iter().map(|p| p.map(|u| other.name(u))).collect();
                v.set_sort(&s.name, &names)?;
            }
            if other.diagonal[i] {
                v.set_diagonal(&s.name)?;
            }
        }
        Ok(v)
    }

    /// The sub-vocabulary keeping the symbols accepted by `keep`, in order.
    /// Annotations that mention a dropped unary symbol are dropped with it.
    pub fn restrict(&self, keep: impl Fn(&Symbol) -> bool) -> Vocabulary {
        let mut v = Vocabulary::default();
        for s in &self.symbols {
            if keep(s) {
                v.push(&s.name, s.arity)
                    .expect("sub-vocabulary of a valid vocabulary");
            }
        }
        if let Some((a, b)) = self.partition {
            let _ = v.set_partition(self.name(a), self.name(b));
        }
        for (i, s) in self.symbols.iter().enumerate() {
            if v.index_of(&s.name).is_none() {
                continue;
            }
            if let Some(pos) = &self.sorts[i] {
                let names: Vec<Option<&str>> =
                    pos.iter().map(|p| p.map(|u| self.name(u))).collect();
                if names.iter().flatten().all(|u| v.index_of(u).is_some()) {
                    let _ = v.set_sort(&s.name, &names);
                }
            }
            if self.diagonal[i] {
                let _ = v.set_diagonal(&s.name);
            }
        }
        v
    }

    /// Whether `self` is `other` restricted to a prefix-compatible subset of symbols,
    /// i.e. every symbol of `self` occurs in `other` with the same arity.
    pub fn is_subvocabulary_of(&self, other: &Vocabulary) -> bool {
        self.symbols.iter().all(|s| {
            other
                .index_of(&s.name)
                .is_some_and(|i| other.arity(i) == s.arity)
        })
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | '#' | '/' | '[' | ']'))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_zero_arity() {
        assert_eq!(
            Vocabulary::new([("E", 2), ("E", 2)]),
            Err(Error::DuplicateSymbol("E".into()))
        );
        assert_eq!(
            Vocabulary::new([("c", 0)]),
            Err(Error::ZeroArity("c".into()))
        );
    }

    #[test]
    fn partition_needs_two_unary_symbols() {
        let v = Vocabulary::new([("P", 1), ("Q", 1), ("H", 2)]).unwrap();
        assert!(v.clone().with_partition("P", "H").is_err());
        assert!(v.clone().with_partition("P", "P").is_err());
        let v = v.with_partition("P", "Q").unwrap();
        assert!(v.clone().with_partition("P", "Q").is_err());
    }

    #[test]
    fn union_keeps_annotations() {
        let a = Vocabulary::new([("P", 1), ("Q", 1), ("H", 2)])
            .unwrap()
            .with_partition("P", "Q")
            .unwrap()
            .with_sort("H", &[Some("Q"), Some("Q")])
            .unwrap();
        let b = Vocabulary::new([("E", 2)]).unwrap();
        let u = a.union(&b).unwrap();
        assert_eq!(u.len(), 4);
        assert!(u.partition().is_some());
        assert!(u.sort(2).is_some());
        let r = u.restrict(|s| s.name != "Q");
        assert!(r.partition().is_none());
        assert!(r.sort(r.index_of("H").unwrap()).is_none());
    }
}
