use super::sentence::{Formula, Quantifier, Sentence};
use crate::error::{Error, Result};
use crate::structure::{Elem, Structure};

/// Limits and conventions for evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Largest prefix length accepted.
    pub max_quantifiers: usize,
    /// Read symbols missing from the structure's vocabulary as empty relations
    /// instead of reporting a mismatch.
    pub absent_as_empty: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            max_quantifiers: 8,
            absent_as_empty: false,
        }
    }
}

enum Compiled {
    Rel(Option<usize>, Vec<usize>),
    Eq(usize, usize),
    Not(Box<Compiled>),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
}

fn compile(f: &Formula, s: &Structure, opts: &EvalOptions) -> Result<Compiled> {
    Ok(match f {
        Formula::Rel(name, args) => {
            let v = s.vocab();
            let idx = match v.index_of(name) {
                Some(i) if v.arity(i) == args.len() => Some(i),
                Some(i) => {
                    return Err(Error::ArityMismatch {
                        symbol: name.clone(),
                        expected: v.arity(i),
                        found: args.len(),
                    })
                }
                None if opts.absent_as_empty => None,
                None => return Err(Error::VocabularyMismatch(format!("no symbol {name}"))),
            };
            Compiled::Rel(idx, args.clone())
        }
        Formula::Eq(x, y) => Compiled::Eq(*x, *y),
        Formula::Not(g) => Compiled::Not(Box::new(compile(g, s, opts)?)),
        Formula::And(fs) => Compiled::And(
            fs.iter()
                .map(|g| compile(g, s, opts))
                .collect::<Result<_>>()?,
        ),
        Formula::Or(fs) => Compiled::Or(
            fs.iter()
                .map(|g| compile(g, s, opts))
                .collect::<Result<_>>()?,
        ),
        Formula::Implies(a, b) => Compiled::Implies(
            Box::new(compile(a, s, opts)?),
            Box::new(compile(b, s, opts)?),
        ),
    })
}

impl Compiled {
    fn eval(&self, s: &Structure, env: &[Elem], buf: &mut Vec<Elem>) -> bool {
        match self {
            Compiled::Rel(None, _) => false,
            Compiled::Rel(Some(r), args) => {
                buf.clear();
                buf.extend(args.iter().map(|a| env[*a]));
                s.holds(*r, buf)
            }
            Compiled::Eq(x, y) => env[*x] == env[*y],
            Compiled::Not(g) => !g.eval(s, env, buf),
            Compiled::And(fs) => fs.iter().all(|g| g.eval(s, env, buf)),
            Compiled::Or(fs) => fs.iter().any(|g| g.eval(s, env, buf)),
            Compiled::Implies(a, b) => !a.eval(s, env, buf) || b.eval(s, env, buf),
        }
    }
}

pub fn evaluate(s: &Structure, phi: &Sentence) -> Result<bool> {
    evaluate_with(s, phi, &EvalOptions::default())
}

/// Exact truth value by exhaustive expansion of the prefix over the domain.
pub fn evaluate_with(s: &Structure, phi: &Sentence, opts: &EvalOptions) -> Result<bool> {
    Ok(counterexample_with(s, phi, opts)?.is_none())
}

/// `None` if `phi` holds. Otherwise the values of the leading universal block
/// under which the rest of the sentence fails (empty if the prefix starts with
/// an existential).
pub fn counterexample_with(
    s: &Structure,
    phi: &Sentence,
    opts: &EvalOptions,
) -> Result<Option<Vec<Elem>>> {
    if phi.prefix.len() > opts.max_quantifiers {
        return Err(Error::cap("quantifier depth", opts.max_quantifiers as u64));
    }
    let m = compile(&phi.matrix, s, opts)?;
    let quants: Vec<Quantifier> = phi.prefix.iter().map(|(q, _)| *q).collect();
    let lead = quants
        .iter()
        .take_while(|q| **q == Quantifier::Forall)
        .count();
    let mut env = vec![0; quants.len()];
    let mut buf = Vec::new();
    if lead == 0 {
        return Ok(if sat(s, &m, &quants, 0, &mut env, &mut buf) {
            None
        } else {
            Some(Vec::new())
        });
    }
    let mut witness = None;
    find_failure(s, &m, &quants, 0, lead, &mut env, &mut buf, &mut witness);
    Ok(witness)
}

fn sat(
    s: &Structure,
    m: &Compiled,
    q: &[Quantifier],
    i: usize,
    env: &mut [Elem],
    buf: &mut Vec<Elem>,
) -> bool {
    if i == q.len() {
        return m.eval(s, env, buf);
    }
    let n = s.size();
    match q[i] {
        Quantifier::Forall => (0..n).all(|e| {
            env[i] = e;
            sat(s, m, q, i + 1, env, buf)
        }),
        Quantifier::Exists => (0..n).any(|e| {
            env[i] = e;
            sat(s, m, q, i + 1, env, buf)
        }),
    }
}

#[allow(clippy::too_many_arguments)]
fn find_failure(
    s: &Structure,
    m: &Compiled,
    q: &[Quantifier],
    i: usize,
    lead: usize,
    env: &mut [Elem],
    buf: &mut Vec<Elem>,
    out: &mut Option<Vec<Elem>>,
) {
    if i == lead {
        if !sat(s, m, q, i, env, buf) {
            *out = Some(env[..lead].to_vec());
        }
        return;
    }
    for e in 0..s.size() {
        env[i] = e;
        find_failure(s, m, q, i + 1, lead, env, buf, out);
        if out.is_some() {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_sentence;
    use crate::structure::Vocabulary;
    use std::sync::Arc;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Structure {
        let v = Arc::new(Vocabulary::new([("E", 2)]).unwrap());
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut s = Structure::build(v, &names, &[]).unwrap();
        for (a, b) in edges {
            s.insert(0, vec![*a, *b]);
            s.insert(0, vec![*b, *a]);
        }
        s
    }

    #[test]
    fn symmetry_on_triangle() {
        let phi = parse_sentence("(forall (x y) (implies (rel E x y) (rel E y x)))").unwrap();
        assert!(evaluate(&graph(3, &[(0, 1), (1, 2), (0, 2)]), &phi).unwrap());
    }

    #[test]
    fn isolated_vertex_has_no_neighbour() {
        let phi =
            parse_sentence("(forall (x) (exists (y) (and (rel E x y) (not (eq x y)))))").unwrap();
        let g = graph(3, &[(0, 1)]);
        assert!(!evaluate(&g, &phi).unwrap());
        let w = counterexample_with(&g, &phi, &EvalOptions::default()).unwrap();
        assert_eq!(w, Some(vec![2]));
    }

    #[test]
    fn empty_domain_conventions() {
        let empty = graph(0, &[]);
        let all = parse_sentence("(forall (x) (rel E x x))").unwrap();
        let some = parse_sentence("(exists (x) (eq x x))").unwrap();
        assert!(evaluate(&empty, &all).unwrap());
        assert!(!evaluate(&empty, &some).unwrap());
    }

    #[test]
    fn caps_and_mismatches() {
        let phi = parse_sentence("(forall (a b c) (rel R a b c))").unwrap();
        let g = graph(2, &[]);
        assert!(matches!(
            evaluate(&g, &phi),
            Err(Error::VocabularyMismatch(_))
        ));
        let lax = EvalOptions {
            absent_as_empty: true,
            ..Default::default()
        };
        assert!(!evaluate_with(&g, &phi, &lax).unwrap());
        let tight = EvalOptions {
            max_quantifiers: 2,
            ..Default::default()
        };
        assert!(matches!(
            evaluate_with(&g, &phi, &tight),
            Err(Error::ResourceCap { .. })
        ));
    }
}
