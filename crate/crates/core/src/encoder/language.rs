use std::sync::Arc;

use crate::error::{Error, Result};
use crate::structure::Vocabulary;

/// The fixed target vocabulary `P/1 Q/1 lam/1 rho/1 H/2 S/4`.
pub struct TargetLanguage;

impl TargetLanguage {
    pub const SYMBOLS: [(&'static str, usize); 6] = [
        ("P", 1),
        ("Q", 1),
        ("lam", 1),
        ("rho", 1),
        ("H", 2),
        ("S", 4),
    ];

    pub fn vocabulary() -> Arc<Vocabulary> {
        Arc::new(Self::build())
    }

    fn build() -> Vocabulary {
        let q = Some("Q");
        let p = Some("P");
        Vocabulary::new(Self::SYMBOLS)
            .and_then(|v| v.with_partition("P", "Q"))
            .and_then(|v| v.with_sort("lam", &[q]))
            .and_then(|v| v.with_sort("rho", &[q]))
            .and_then(|v| v.with_sort("H", &[q, q]))
            .and_then(|v| v.with_sort("S", &[p, q, p, q]))
            .expect("target vocabulary is well formed")
    }
}

/// Positions of the target symbols inside some vocabulary containing them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LIndex {
    pub p: usize,
    pub q: usize,
    pub lam: usize,
    pub rho: usize,
    pub h: usize,
    pub s: usize,
}

impl LIndex {
    pub fn of(v: &Vocabulary) -> Result<LIndex> {
        let find = |name: &str, arity: usize| {
            v.index_of(name)
                .filter(|i| v.arity(*i) == arity)
                .ok_or_else(|| Error::VocabularyMismatch(format!("missing {name}/{arity}")))
        };
        Ok(LIndex {
            p: find("P", 1)?,
            q: find("Q", 1)?,
            lam: find("lam", 1)?,
            rho: find("rho", 1)?,
            h: find("H", 2)?,
            s: find("S", 4)?,
        })
    }
}

/// An L0 vocabulary with its relation indices: symbol `k` stands for `R_{n_k}`
/// where `n_k = max(arity_k, n_{k-1} + 1)`. Indices no symbol receives denote
/// empty relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    l0: Arc<Vocabulary>,
    indices: Vec<usize>,
    combined: Arc<Vocabulary>,
    target: Arc<Vocabulary>,
}

impl Encoding {
    pub fn new(l0: Arc<Vocabulary>) -> Result<Encoding> {
        if l0.partition().is_some() || (0..l0.len()).any(|i| l0.sort(i).is_some()) {
            return Err(Error::Annotation(
                "the encoded vocabulary may carry diagonal annotations only".into(),
            ));
        }
        for (name, _) in TargetLanguage::SYMBOLS {
            if l0.index_of(name).is_some() {
                return Err(Error::VocabularyMismatch(format!(
                    "{name} is reserved for the target language"
                )));
            }
        }
        let mut indices = Vec::with_capacity(l0.len());
        let mut prev = 0;
        for s in l0.symbols() {
            let n = s.arity.max(prev + 1);
            indices.push(n);
            prev = n;
        }
        let target = TargetLanguage::vocabulary();
        let mut combined = target.union(&l0)?;
        for s in l0.symbols() {
            let pos = vec![Some("P"); s.arity];
            combined.set_sort(&s.name, &pos)?;
        }
        Ok(Encoding {
            l0,
            indices,
            combined: Arc::new(combined),
            target,
        })
    }

    pub fn l0(&self) -> &Arc<Vocabulary> {
        &self.l0
    }

    /// L plus L0, with every L0 position sorted to P.
    pub fn combined(&self) -> &Arc<Vocabulary> {
        &self.combined
    }

    pub fn target(&self) -> &Arc<Vocabulary> {
        &self.target
    }

    /// The index `n` of L0 symbol `k`.
    pub fn index(&self, k: usize) -> usize {
        self.indices[k]
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// The L0 symbol standing for `R_n`, if any.
    pub fn symbol_for(&self, n: usize) -> Option<usize> {
        self.indices.iter().position(|i| *i == n)
    }

    /// The index of the L0 symbol called `name`.
    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.l0
            .index_of(name)
            .map(|k| self.indices[k])
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn max_index(&self) -> usize {
        self.indices.last().copied().unwrap_or(0)
    }
}
