use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::Result;
use crate::logic::{counterexample_with, EvalOptions, SchemeTag, Sentence};
use crate::report::{Report, Summary, Verdict, Witness};
use crate::structure::Structure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomOutcome {
    Holds,
    /// Fails; the values of the leading universal block that refute it.
    Fails(Vec<String>),
    /// Not evaluated (too many quantifiers or a vocabulary mismatch).
    Skipped(String),
}

#[derive(Debug, Clone)]
pub struct ModelReport {
    pub structure: Structure,
    pub results: Vec<(Sentence, AxiomOutcome)>,
}

impl ModelReport {
    pub fn failures(&self) -> impl Iterator<Item = &(Sentence, AxiomOutcome)> {
        self.results
            .iter()
            .filter(|(_, o)| matches!(o, AxiomOutcome::Fails(_)))
    }

    pub fn first_failure(&self) -> Option<&Sentence> {
        self.failures().next().map(|(s, _)| s)
    }

    /// (held, failed, skipped) per scheme letter.
    pub fn counts(&self) -> BTreeMap<char, (usize, usize, usize)> {
        let mut out = BTreeMap::new();
        for (s, o) in &self.results {
            let e = out
                .entry(s.tag.letter().unwrap_or('-'))
                .or_insert((0, 0, 0));
            match o {
                AxiomOutcome::Holds => e.0 += 1,
                AxiomOutcome::Fails(_) => e.1 += 1,
                AxiomOutcome::Skipped(_) => e.2 += 1,
            }
        }
        out
    }

    pub fn verdict(&self) -> Verdict {
        if let Some((s, AxiomOutcome::Fails(vals))) = self.failures().next() {
            let at = if vals.is_empty() {
                String::new()
            } else {
                format!(" at ({})", vals.join(","))
            };
            return Verdict::Fail(
                Witness::new(format!("{}{at}", s.to_line())).with("model", &self.structure),
            );
        }
        if let Some((s, AxiomOutcome::Skipped(why))) = self
            .results
            .iter()
            .find(|(_, o)| matches!(o, AxiomOutcome::Skipped(_)))
        {
            return Verdict::Inconclusive(format!("{}: {why}", s.to_line()));
        }
        Verdict::Pass
    }
}

impl Report for ModelReport {
    fn summary(&self) -> Summary {
        let mut s = Summary::new();
        s.push("size", self.structure.size())
            .push("axioms", self.results.len());
        for (tag, (h, f, k)) in self.counts() {
            s.push(
                &format!("scheme_{tag}"),
                format!("{h} held, {f} failed, {k} skipped"),
            );
        }
        s.push("failed", self.failures().count());
        if let Some(f) = self.first_failure() {
            s.push("first_failure", f.to_line());
        }
        s.push("verdict", self.verdict().word());
        s
    }

    fn body(&self) -> String {
        let mut out = String::new();
        for (s, o) in &self.results {
            match o {
                AxiomOutcome::Holds => {
                    let _ = writeln!(out, "holds  {}", s.to_line());
                }
                AxiomOutcome::Fails(vals) => {
                    let _ = writeln!(out, "FAILS  {} at ({})", s.to_line(), vals.join(","));
                }
                AxiomOutcome::Skipped(why) => {
                    let _ = writeln!(out, "skip   {} ({why})", s.to_line());
                }
            }
        }
        out
    }

    fn passed(&self) -> bool {
        self.verdict().is_pass()
    }
}

/// Evaluate every axiom in `s`.
pub fn verify_model_of(
    s: &Structure,
    axioms: &[Sentence],
    opts: &EvalOptions,
) -> Result<ModelReport> {
    let mut results = Vec::with_capacity(axioms.len());
    for ax in axioms {
        let outcome = match counterexample_with(s, ax, opts) {
            Ok(None) => AxiomOutcome::Holds,
            Ok(Some(vals)) => {
                AxiomOutcome::Fails(vals.iter().map(|e| s.name(*e).to_string()).collect())
            }
            Err(e) => AxiomOutcome::Skipped(e.to_string()),
        };
        results.push((ax.clone(), outcome));
    }
    Ok(ModelReport {
        structure: s.clone(),
        results,
    })
}

/// Only the sentences of the given scheme.
pub fn of_scheme(axioms: &[Sentence], tag: SchemeTag) -> Vec<Sentence> {
    axioms.iter().filter(|s| s.tag == tag).cloned().collect()
}
