use std::fmt;

use crate::error::{Error, Result};
use crate::structure::{is_identifier, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }

    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }
}

/// Which axiom scheme produced a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeTag {
    /// Universal sentences forbidding non-members.
    A,
    /// Universal sort discipline and labelling constraints.
    B,
    /// Existential sentences realising members.
    C,
    /// One-point extension sentences.
    D,
    None,
}

impl SchemeTag {
    pub fn letter(self) -> Option<char> {
        match self {
            SchemeTag::A => Some('a'),
            SchemeTag::B => Some('b'),
            SchemeTag::C => Some('c'),
            SchemeTag::D => Some('d'),
            SchemeTag::None => None,
        }
    }

    pub fn from_letter(c: char) -> Option<SchemeTag> {
        match c {
            'a' => Some(SchemeTag::A),
            'b' => Some(SchemeTag::B),
            'c' => Some(SchemeTag::C),
            'd' => Some(SchemeTag::D),
            _ => None,
        }
    }

    pub const ALL: [SchemeTag; 4] = [SchemeTag::A, SchemeTag::B, SchemeTag::C, SchemeTag::D];
}

/// Quantifier-free formula. Variables are indices into the owning sentence's prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Rel(String, Vec<usize>),
    Eq(usize, usize),
    Not(Box<Formula>),
    /// Empty conjunction is true.
    And(Vec<Formula>),
    /// Empty disjunction is false.
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn truth() -> Formula {
        Formula::And(Vec::new())
    }

    pub fn falsity() -> Formula {
        Formula::Or(Vec::new())
    }

    pub fn rel(name: &str, args: Vec<usize>) -> Formula {
        Formula::Rel(name.to_string(), args)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Pairwise distinctness of the given variables.
    pub fn distinct(vars: &[usize]) -> Vec<Formula> {
        let mut out = Vec::new();
        for (i, x) in vars.iter().enumerate() {
            for y in &vars[i + 1..] {
                out.push(Formula::not(Formula::Eq(*x, *y)));
            }
        }
        out
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Formula::Rel(_, a) => a.iter().copied().max(),
            Formula::Eq(x, y) => Some(*x.max(y)),
            Formula::Not(f) => f.max_var(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().filter_map(Formula::max_var).max(),
            Formula::Implies(a, b) => a.max_var().max(b.max_var()),
        }
    }

    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        match self {
            Formula::Rel(..) | Formula::Eq(..) => f(self),
            Formula::Not(g) => g.for_each_atom(f),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.for_each_atom(f)),
            Formula::Implies(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
        }
    }

    pub fn rename(&self, m: &impl Fn(usize) -> usize) -> Formula {
        match self {
            Formula::Rel(n, a) => Formula::Rel(n.clone(), a.iter().map(|x| m(*x)).collect()),
            Formula::Eq(x, y) => Formula::Eq(m(*x), m(*y)),
            Formula::Not(g) => Formula::not(g.rename(m)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.rename(m)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.rename(m)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.rename(m), b.rename(m)),
        }
    }

    fn write(&self, names: &[String], out: &mut String) {
        match self {
            Formula::Rel(n, args) => {
                out.push_str("(rel ");
                out.push_str(n);
                for a in args {
                    out.push(' ');
                    out.push_str(&names[*a]);
                }
                out.push(')');
            }
            Formula::Eq(x, y) => {
                out.push_str("(eq ");
                out.push_str(&names[*x]);
                out.push(' ');
                out.push_str(&names[*y]);
                out.push(')');
            }
            Formula::Not(g) => {
                out.push_str("(not ");
                g.write(names, out);
                out.push(')');
            }
            Formula::And(fs) | Formula::Or(fs) => {
                out.push_str(if matches!(self, Formula::And(_)) {
                    "(and"
                } else {
                    "(or"
                });
                for g in fs {
                    out.push(' ');
                    g.write(names, out);
                }
                out.push(')');
            }
            Formula::Implies(a, b) => {
                out.push_str("(implies ");
                a.write(names, out);
                out.push(' ');
                b.write(names, out);
                out.push(')');
            }
        }
    }
}

/// A prenex sentence: a quantifier prefix over a quantifier-free matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    pub prefix: Vec<(Quantifier, String)>,
    pub matrix: Formula,
    pub tag: SchemeTag,
}

impl Sentence {
    /// Build and check well-formedness: distinct variables, all matrix variables bound.
    pub fn new(prefix: Vec<(Quantifier, String)>, matrix: Formula, tag: SchemeTag) -> Result<Self> {
        for (i, (_, v)) in prefix.iter().enumerate() {
            if !is_var(v) {
                return Err(Error::Invalid(format!("bad variable name {v:?}")));
            }
            if prefix[..i].iter().any(|(_, w)| w == v) {
                return Err(Error::Invalid(format!("variable {v} bound twice")));
            }
        }
        if let Some(m) = matrix.max_var() {
            if m >= prefix.len() {
                return Err(Error::Unbound(format!("variable #{m}")));
            }
        }
        Ok(Sentence {
            prefix,
            matrix,
            tag,
        })
    }

    /// A sentence over variables `x1..xk` with the given quantifier blocks.
    pub fn with_blocks(blocks: &[(Quantifier, usize)], matrix: Formula, tag: SchemeTag) -> Self {
        let mut prefix = Vec::new();
        for (q, k) in blocks {
            for _ in 0..*k {
                let name = format!("x{}", prefix.len() + 1);
                prefix.push((*q, name));
            }
        }
        Sentence::new(prefix, matrix, tag).expect("generated sentence is well formed")
    }

    pub fn quantifier_count(&self) -> usize {
        self.prefix.len()
    }

    pub fn var_names(&self) -> Vec<String> {
        self.prefix.iter().map(|(_, v)| v.clone()).collect()
    }

    pub fn with_tag(mut self, tag: SchemeTag) -> Self {
        self.tag = tag;
        self
    }

    /// Whether every relation atom names a symbol of `v` with matching arity.
    pub fn check_vocabulary(&self, v: &Vocabulary) -> Result<()> {
        let mut err = None;
        self.matrix.for_each_atom(&mut |a| {
            if let Formula::Rel(n, args) = a {
                if err.is_some() {
                    return;
                }
                match v.index_of(n) {
                    None => err = Some(Error::UnknownSymbol(n.clone())),
                    Some(i) if v.arity(i) != args.len() => {
                        err = Some(Error::ArityMismatch {
                            symbol: n.clone(),
                            expected: v.arity(i),
                            found: args.len(),
                        })
                    }
                    _ => {}
                }
            }
        });
        err.map_or(Ok(()), Err)
    }

    /// Relation symbols used, with arities, in first-occurrence order.
    pub fn symbols(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        self.matrix.for_each_atom(&mut |a| {
            if let Formula::Rel(n, args) = a {
                if !out.iter().any(|(m, _)| m == n) {
                    out.push((n.clone(), args.len()));
                }
            }
        });
        out
    }

    /// The S-expression text, without tag.
    pub fn to_sexpr(&self) -> String {
        let names = self.var_names();
        let mut out = String::new();
        let mut closes = 0;
        let mut i = 0;
        while i < self.prefix.len() {
            let q = self.prefix[i].0;
            let mut j = i;
            while j < self.prefix.len() && self.prefix[j].0 == q {
                j += 1;
            }
            out.push('(');
            out.push_str(q.keyword());
            out.push_str(" (");
            out.push_str(&names[i..j].join(" "));
            out.push_str(") ");
            closes += 1;
            i = j;
        }
        self.matrix.write(&names, &mut out);
        for _ in 0..closes {
            out.push(')');
        }
        out
    }

    /// The axiom-file line: `[t] sexpr` for tagged sentences, bare otherwise.
    pub fn to_line(&self) -> String {
        match self.tag.letter() {
            Some(c) => format!("[{c}] {}", self.to_sexpr()),
            None => self.to_sexpr(),
        }
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

pub(crate) fn is_var(s: &str) -> bool {
    is_identifier(s) && !s.contains(['(', ')']) && !KEYWORDS.contains(&s)
}

pub(crate) const KEYWORDS: [&str; 8] = [
    "forall", "exists", "and", "or", "not", "implies", "eq", "rel",
];
