use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;

use super::arith::{code_pair, decode_pair, ArityFunction};
use super::theory::GadgetTheory;
use crate::error::{Error, Result};
use crate::fraisse::{AgeClass, ForbiddenClass};
use crate::report::{verdict_line, Report, Summary, Verdict, Witness};
use crate::structure::{Structure, Vocabulary};

/// A finite prefix of an enumeration of triples `<e, n, x>`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnumerationTable {
    pub triples: Vec<(u64, u64, u64)>,
}

impl EnumerationTable {
    pub fn new(triples: Vec<(u64, u64, u64)>) -> Self {
        EnumerationTable { triples }
    }

    /// One `e n x` triple per line; blank lines and `#` comments are skipped and
    /// positions count triples only.
    pub fn parse(text: &str) -> Result<Self> {
        let mut triples = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("");
            if body.trim().is_empty() {
                continue;
            }
            let mut nums = Vec::new();
            let mut col = 1;
            for (start, word) in words(body) {
                col = start + 1;
                nums.push(word.parse::<u64>().map_err(|_| {
                    Error::parse(
                        i + 1,
                        col,
                        format!("expected a natural number, found {word:?}"),
                    )
                })?);
            }
            if nums.len() != 3 {
                return Err(Error::parse(
                    i + 1,
                    col,
                    format!("expected 3 numbers, found {}", nums.len()),
                ));
            }
            triples.push((nums[0], nums[1], nums[2]));
        }
        Ok(EnumerationTable { triples })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (e, n, x) in &self.triples {
            let _ = writeln!(out, "{e} {n} {x}");
        }
        out
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn prefix(&self, k: usize) -> EnumerationTable {
        EnumerationTable::new(self.triples[..k.min(self.len())].to_vec())
    }

    /// Distinct `x` with `<e, n, x>` listed.
    pub fn shadow(&self, e: u64, n: u64) -> usize {
        self.triples
            .iter()
            .filter(|t| t.0 == e && t.1 == n)
            .map(|t| t.2)
            .collect::<HashSet<_>>()
            .len()
    }

    /// `shadow(e, n)` of every prefix, lengths `0..=len`.
    pub fn shadow_profile(&self, e: u64, n: u64) -> Vec<usize> {
        let mut seen = HashSet::new();
        let mut out = vec![0];
        for t in &self.triples {
            if t.0 == e && t.1 == n {
                seen.insert(t.2);
            }
            out.push(seen.len());
        }
        out
    }
}

fn words(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.char_indices()
        .filter(move |(i, c)| {
            !c.is_whitespace() && (*i == 0 || s[..*i].ends_with(char::is_whitespace))
        })
        .map(move |(i, _)| {
            let end = s[i..].find(char::is_whitespace).map_or(s.len(), |k| i + k);
            (i, &s[i..end])
        })
}

/// `D^s_e`: codes `<n, k>` at most `l_s` where position `k` is the first
/// occurrence of `<e, n, x>` for some `x`.
pub fn compute_d(t: &EnumerationTable, e: u64, s: u64) -> BTreeSet<u64> {
    let bound = ArityFunction::new().layer_bound(s);
    compute_d_below(t, e, &bound)
}

fn compute_d_below(t: &EnumerationTable, e: u64, bound: &BigUint) -> BTreeSet<u64> {
    let mut seen = HashSet::new();
    let mut out = BTreeSet::new();
    for (k, triple) in t.triples.iter().enumerate() {
        if !seen.insert(*triple) || triple.0 != e {
            continue;
        }
        let code = code_pair(triple.1, k as u64);
        if BigUint::from(code) <= *bound {
            out.insert(code);
        }
    }
    out
}

/// Number of complete Boolean combinations of the live predicates on sort `n`.
pub fn count_sort_types(g: &GadgetTheory, n: usize) -> Result<u64> {
    if n >= g.sorts() {
        return Err(Error::Invalid(format!(
            "sort {n} is not present in layer {} (sorts 0..{})",
            g.layer(),
            g.sorts()
        )));
    }
    let d = live_on_sort(g, n).len();
    if d >= 64 {
        return Err(Error::cap("predicates on one sort", 63));
    }
    Ok(1 << d)
}

pub(crate) fn live_on_sort(g: &GadgetTheory, n: usize) -> Vec<u64> {
    g.predicates()
        .iter()
        .filter(|p| p.live && p.sort == n)
        .map(|p| p.code)
        .collect()
}

/// Sort `n` of `g` as a one-sorted class: a unary `S` holding everywhere and one
/// free unary symbol per live predicate on the sort.
pub fn sort_rendering(g: &GadgetTheory, n: usize) -> Result<ForbiddenClass> {
    let codes = live_on_sort(g, n);
    let mut symbols = vec![("S".to_string(), 1)];
    symbols.extend(codes.iter().map(|c| (format!("P{c}"), 1)));
    let vocab = Arc::new(Vocabulary::new(symbols)?);
    let mut forbidden = Vec::new();
    for mask in 0u64..1 << codes.len() {
        let mut s = Structure::empty(vocab.clone());
        let x = s.add_fresh("x");
        for i in 0..codes.len() {
            if mask >> i & 1 == 1 {
                s.insert(i + 1, vec![x]);
            }
        }
        forbidden.push(s);
    }
    ForbiddenClass::new(
        &format!("sort {n} of {}", g.class.name()),
        vocab,
        None,
        forbidden,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortShadow {
    pub sort: u64,
    /// Distinct `x` listed for the sort.
    pub shadow: usize,
    /// Codes of `D^s_e` on the sort.
    pub predicates: usize,
    pub flagged: bool,
}

impl SortShadow {
    /// `2^predicates`, when it fits.
    pub fn types(&self) -> Option<u64> {
        (self.predicates < 64).then(|| 1u64 << self.predicates)
    }
}

/// Per-sort shadows at a finite horizon. A verdict about the table prefix only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoricityReport {
    pub e: u64,
    pub horizon: u64,
    pub flag: usize,
    pub table_len: usize,
    pub d: BTreeSet<u64>,
    pub sorts: Vec<SortShadow>,
    pub verdict: Verdict,
}

impl CategoricityReport {
    pub fn categorical_at_horizon(&self) -> bool {
        self.verdict.is_pass()
    }
}

/// For each sort `n <= s`: distinct `x` with `<e, n, x>` in the table and the
/// predicates of `D^s_e` on it. Categorical at the horizon iff every shadow is
/// below `flag`.
pub fn categoricity_verdict(
    t: &EnumerationTable,
    e: u64,
    s: u64,
    flag: usize,
) -> CategoricityReport {
    let d = compute_d(t, e, s);
    let sorts: Vec<SortShadow> = (0..=s)
        .map(|n| {
            let shadow = t.shadow(e, n);
            SortShadow {
                sort: n,
                shadow,
                predicates: d.iter().filter(|c| decode_pair(**c).0 == n).count(),
                flagged: shadow >= flag,
            }
        })
        .collect();
    let verdict = match sorts.iter().find(|x| x.flagged) {
        None => Verdict::Pass,
        Some(x) => Verdict::Fail(Witness::new(format!(
            "sort {} lists {} distinct elements for index {e}, at least the growth flag {flag}: evidence against categoricity at horizon {s}",
            x.sort, x.shadow
        ))),
    };
    CategoricityReport {
        e,
        horizon: s,
        flag,
        table_len: t.len(),
        d,
        sorts,
        verdict,
    }
}

impl Report for CategoricityReport {
    fn summary(&self) -> Summary {
        let mut s = Summary::new();
        let join = |f: &dyn Fn(&SortShadow) -> String| {
            self.sorts.iter().map(f).collect::<Vec<_>>().join(",")
        };
        s.push("index", self.e)
            .push("horizon", self.horizon)
            .push("table_length", self.table_len)
            .push("growth_flag", self.flag)
            .push("d_size", self.d.len())
            .push("shadows", join(&|x| x.shadow.to_string()))
            .push("predicates", join(&|x| x.predicates.to_string()))
            .push("categorical_at_horizon", self.categorical_at_horizon())
            .push("verdict", self.verdict.word());
        s
    }

    fn body(&self) -> String {
        let mut out = format!(
            "index {} at horizon {} over {} table entries (growth flag {})\n",
            self.e, self.horizon, self.table_len, self.flag
        );
        let codes: Vec<String> = self.d.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "D = {{{}}}", codes.join(","));
        for x in &self.sorts {
            let types = x
                .types()
                .map_or(format!("2^{}", x.predicates), |t| t.to_string());
            let _ = writeln!(
                out,
                "sort {}: shadow {}, predicates {}, types {}{}",
                x.sort,
                x.shadow,
                x.predicates,
                types,
                if x.flagged { " (flagged)" } else { "" }
            );
        }
        let _ = writeln!(
            out,
            "horizon-relative: {} at horizon {}",
            if self.categorical_at_horizon() {
                "omega-categorical"
            } else {
                "not omega-categorical"
            },
            self.horizon
        );
        verdict_line(&mut out, "categoricity", &self.verdict);
        out
    }

    fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}
