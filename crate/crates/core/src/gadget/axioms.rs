use std::fmt::Write as _;

use super::theory::GadgetTheory;
use crate::axioms::{generate_axioms, AxiomBudget};
use crate::encoder::{npair_formula, relativize, Encoding};
use crate::error::Result;
use crate::logic::{Formula, Quantifier, Sentence};

/// Default limit on atoms per emitted sentence.
pub const DEFAULT_ATOM_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Origin {
    /// An axiom of the class in its one-sorted vocabulary.
    OneSorted,
    /// Its rewrite in `L`: relativised to `P`, each `L0` atom replaced by an n-pair.
    Rewrite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetAxiom {
    pub origin: Origin,
    pub sentence: Sentence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetAxioms {
    pub axioms: Vec<GadgetAxiom>,
    /// Sentences left out for exceeding the atom cap.
    pub skipped: usize,
    pub atom_cap: usize,
}

impl GadgetAxioms {
    pub fn of(&self, origin: Origin) -> Vec<&Sentence> {
        self.axioms
            .iter()
            .filter(|a| a.origin == origin)
            .map(|a| &a.sentence)
            .collect()
    }

    /// An axiom file with the two origins under comment headings.
    pub fn emit(&self, class: &str) -> String {
        let mut out = String::new();
        for (origin, title) in [
            (Origin::OneSorted, "one-sorted"),
            (Origin::Rewrite, "rewritten into L"),
        ] {
            let list = self.of(origin);
            let _ = writeln!(out, "# {title} axioms of {class}: {}", list.len());
            for s in list {
                out.push_str(&s.to_line());
                out.push('\n');
            }
        }
        let _ = writeln!(
            out,
            "# skipped over {} atoms: {}",
            self.atom_cap, self.skipped
        );
        out
    }
}

pub fn atom_count(f: &Formula) -> usize {
    let mut n = 0;
    f.for_each_atom(&mut |a| {
        if matches!(a, Formula::Rel(..)) {
            n += 1;
        }
    });
    n
}

fn npair_atoms(m: usize, n: usize) -> usize {
    m + n + n * (n - 1) / 2 + n * n + 2 * n + 3 * m * m * n * n
}

/// Scheme (a)-(d) axioms of the class within `budget`, each followed by its
/// rewrite in `L`. Sentences with more than `atom_cap` atoms are counted, not kept.
pub fn assemble_gadget_axioms(
    g: &GadgetTheory,
    budget: &AxiomBudget,
    atom_cap: usize,
) -> Result<GadgetAxioms> {
    let mut out = GadgetAxioms {
        axioms: Vec::new(),
        skipped: 0,
        atom_cap,
    };
    if budget.max_quantifiers == 0 {
        return Ok(out);
    }
    let enc = Encoding::new(g.vocabulary().clone())?;
    let mut rewrites = Vec::new();
    for s in generate_axioms(&g.class, budget)? {
        if atom_count(&s.matrix) > atom_cap {
            out.skipped += 1;
            continue;
        }
        out.axioms.push(GadgetAxiom {
            origin: Origin::OneSorted,
            sentence: s.clone(),
        });
        if rewrite_size(&s, &enc) > atom_cap {
            out.skipped += 1;
            continue;
        }
        rewrites.push(GadgetAxiom {
            origin: Origin::Rewrite,
            sentence: l_rewrite(&s, &enc)?,
        });
    }
    out.axioms.extend(rewrites);
    Ok(out)
}

fn rewrite_size(s: &Sentence, enc: &Encoding) -> usize {
    let mut n = s.quantifier_count();
    s.matrix.for_each_atom(&mut |a| {
        n += match a {
            Formula::Rel(name, args) => match enc.l0().index_of(name) {
                Some(k) => npair_atoms(args.len(), enc.index(k)),
                None => 1,
            },
            _ => 0,
        };
    });
    n
}

/// Relativise to `P` and replace each atom `R(x)` of `L0` (index `n`) by "some
/// `c_0..c_{n-1}` make `(x, c)` an n-pair", the new quantifiers pulled to the
/// end of the prefix: existential where the atom occurs positively, universal
/// where negatively.
pub fn l_rewrite(s: &Sentence, enc: &Encoding) -> Result<Sentence> {
    let rel = relativize(s, "P");
    let mut blocks: Vec<(Quantifier, usize)> = Vec::new();
    let mut next = rel.quantifier_count();
    let matrix = replace(&rel.matrix, true, enc, &mut next, &mut blocks);
    let mut prefix = rel.prefix.clone();
    let mut k = 0;
    for (q, n) in blocks {
        for _ in 0..n {
            let name = loop {
                k += 1;
                let c = format!("c{k}");
                if !prefix.iter().any(|(_, v)| *v == c) {
                    break c;
                }
            };
            prefix.push((q, name));
        }
    }
    Sentence::new(prefix, matrix, s.tag)
}

fn replace(
    f: &Formula,
    positive: bool,
    enc: &Encoding,
    next: &mut usize,
    blocks: &mut Vec<(Quantifier, usize)>,
) -> Formula {
    match f {
        Formula::Rel(name, args) => match enc.l0().index_of(name) {
            Some(k) => {
                let m = args.len();
                let n = enc.index(k);
                let base = *next;
                *next += n;
                blocks.push((
                    if positive {
                        Quantifier::Exists
                    } else {
                        Quantifier::Forall
                    },
                    n,
                ));
                npair_formula(m, n).rename(&|v| if v < m { args[v] } else { base + v - m })
            }
            None => f.clone(),
        },
        Formula::Eq(..) => f.clone(),
        Formula::Not(g) => Formula::not(replace(g, !positive, enc, next, blocks)),
        Formula::And(fs) => Formula::And(
            fs.iter()
                .map(|g| replace(g, positive, enc, next, blocks))
                .collect(),
        ),
        Formula::Or(fs) => Formula::Or(
            fs.iter()
                .map(|g| replace(g, positive, enc, next, blocks))
                .collect(),
        ),
        Formula::Implies(a, b) => Formula::implies(
            replace(a, !positive, enc, next, blocks),
            replace(b, positive, enc, next, blocks),
        ),
    }
}
