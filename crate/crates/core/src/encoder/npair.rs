use std::collections::BTreeSet;
use std::fmt;

use super::language::LIndex;
use crate::error::Result;
use crate::structure::{Elem, Morphism, Structure};

/// A labelled tuple `a_0..a_{m-1}` (repeats allowed) attached to an H-cycle
/// `c_0..c_{n-1}` of Q-elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NPair {
    pub n: usize,
    pub m: usize,
    pub labels: Vec<Elem>,
    pub cycle: Vec<Elem>,
}

impl NPair {
    /// The label at cycle position `j`: positions past the arity repeat the last label.
    pub fn label_at(&self, j: usize) -> Elem {
        self.labels[j.min(self.m - 1)]
    }

    pub fn map(&self, f: &Morphism) -> NPair {
        NPair {
            n: self.n,
            m: self.m,
            labels: f.apply_tuple(&self.labels),
            cycle: f.apply_tuple(&self.cycle),
        }
    }

    pub fn describe(&self, s: &Structure) -> String {
        format!(
            "{}-pair of arity {} labelling {} on cycle {}",
            self.n,
            self.m,
            s.fmt_tuple(&self.labels),
            s.fmt_tuple(&self.cycle)
        )
    }
}

impl fmt::Display for NPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-pair/{} labels {:?} cycle {:?}",
            self.n, self.m, self.labels, self.cycle
        )
    }
}

/// A failed clause of the n-pair definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: u8,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition ({}): {}", self.condition, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NPairCheck {
    pub violations: Vec<Violation>,
}

impl NPairCheck {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn fail(&mut self, condition: u8, detail: String) {
        self.violations.push(Violation { condition, detail });
    }

    /// The first violated condition, if any.
    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// Check whether `(a, c)` is an `n`-pair of arity `a.len()` in `s`.
///
/// (1) `1 <= m <= n`, labels in P, cycle in Q;
/// (2) the cycle is injective and `H(c_i, c_j)` iff `j = i+1 mod n`;
/// (3) `lam(c_i)` iff `i = 0`, `rho(c_i)` iff `i = m-1`;
/// (4) for labels `x, y` and positions `j, l < n`, `S(x, c_j, y, c_l)` iff
///     `x` is the label at `j` and `y` the label at `l`.
pub fn validate_npair(s: &Structure, a: &[Elem], c: &[Elem], n: usize) -> Result<NPairCheck> {
    let li = LIndex::of(s.vocab())?;
    let mut out = NPairCheck::default();
    let m = a.len();
    if c.len() != n {
        out.fail(1, format!("cycle has {} elements, expected {n}", c.len()));
        return Ok(out);
    }
    if m == 0 || m > n {
        out.fail(1, format!("arity {m} outside 1..={n}"));
        return Ok(out);
    }
    if let Some(e) = a.iter().chain(c).find(|e| **e >= s.size()) {
        out.fail(1, format!("element #{e} outside the domain"));
        return Ok(out);
    }
    for x in a {
        if !s.holds(li.p, &[*x]) {
            out.fail(1, format!("label {} is not in P", s.name(*x)));
        }
    }
    for x in c {
        if !s.holds(li.q, &[*x]) {
            out.fail(1, format!("cycle element {} is not in Q", s.name(*x)));
        }
    }
    for i in 0..n {
        if c[..i].contains(&c[i]) {
            out.fail(2, format!("cycle element {} repeats", s.name(c[i])));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let want = j == (i + 1) % n;
            if s.holds(li.h, &[c[i], c[j]]) != want {
                out.fail(
                    2,
                    format!(
                        "H({},{}) should {}hold",
                        s.name(c[i]),
                        s.name(c[j]),
                        if want { "" } else { "not " }
                    ),
                );
            }
        }
    }
    for (i, x) in c.iter().enumerate() {
        if s.holds(li.lam, &[*x]) != (i == 0) {
            out.fail(3, format!("lam({}) at position {i}", s.name(*x)));
        }
        if s.holds(li.rho, &[*x]) != (i == m - 1) {
            out.fail(3, format!("rho({}) at position {i}", s.name(*x)));
        }
    }
    let label = |j: usize| a[j.min(m - 1)];
    let labels: BTreeSet<Elem> = a.iter().copied().collect();
    for j in 0..n {
        for l in 0..n {
            for x in &labels {
                for y in &labels {
                    let want = *x == label(j) && *y == label(l);
                    if s.holds(li.s, &[*x, c[j], *y, c[l]]) != want {
                        out.fail(
                            4,
                            format!(
                                "S({},{},{},{}) should {}hold",
                                s.name(*x),
                                s.name(c[j]),
                                s.name(*y),
                                s.name(c[l]),
                                if want { "" } else { "not " }
                            ),
                        );
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Every n-pair of `s`, sorted.
pub fn scan_npairs(s: &Structure) -> Result<Vec<NPair>> {
    let li = LIndex::of(s.vocab())?;
    let q: Vec<Elem> = s.elems().filter(|e| s.holds(li.q, &[*e])).collect();
    let mut succ: Vec<Vec<Elem>> = vec![Vec::new(); s.size()];
    for t in s.relation(li.h) {
        succ[t[0]].push(t[1]);
    }
    let mut out = BTreeSet::new();
    for &c0 in &q {
        if !s.holds(li.lam, &[c0]) {
            continue;
        }
        let mut path = vec![c0];
        cycles(s, &li, &succ, &mut path, &mut |cycle| {
            candidates(s, &li, cycle, &mut out);
        });
    }
    Ok(out.into_iter().collect())
}

/// Chordless simple H-cycles through `path[0]` with lam only at the start and
/// at most one rho.
fn cycles(
    s: &Structure,
    li: &LIndex,
    succ: &[Vec<Elem>],
    path: &mut Vec<Elem>,
    found: &mut impl FnMut(&[Elem]),
) {
    let last = *path.last().expect("nonempty path");
    let start = path[0];
    if succ[last].contains(&start) && closes(s, li, path) {
        found(path);
    }
    for &next in &succ[last] {
        if path.contains(&next) || !s.holds(li.q, &[next]) || s.holds(li.lam, &[next]) {
            continue;
        }
        if s.holds(li.h, &[next, next]) {
            continue;
        }
        let rhos = path.iter().filter(|x| s.holds(li.rho, &[**x])).count();
        if rhos > 0 && s.holds(li.rho, &[next]) {
            continue;
        }
        // No chords from earlier path elements to `next`, and none back except to
        // the start (which must wait until the cycle closes).
        let k = path.len();
        let chord = path[..k - 1].iter().any(|x| s.holds(li.h, &[*x, next]))
            || path[1..].iter().any(|x| s.holds(li.h, &[next, *x]));
        if chord {
            continue;
        }
        path.push(next);
        cycles(s, li, succ, path, found);
        path.pop();
    }
}

/// Whether closing `path` into a cycle meets conditions (2) and the rho part of (3).
fn closes(s: &Structure, li: &LIndex, path: &[Elem]) -> bool {
    let n = path.len();
    for i in 0..n {
        for j in 0..n {
            if s.holds(li.h, &[path[i], path[j]]) != (j == (i + 1) % n) {
                return false;
            }
        }
    }
    path.iter().filter(|x| s.holds(li.rho, &[**x])).count() == 1
}

fn candidates(s: &Structure, li: &LIndex, cycle: &[Elem], out: &mut BTreeSet<NPair>) {
    let n = cycle.len();
    let Some(m) = cycle
        .iter()
        .position(|x| s.holds(li.rho, &[*x]))
        .map(|i| i + 1)
    else {
        return;
    };
    let options: Vec<Vec<Elem>> = (0..m)
        .map(|j| {
            s.relation(li.s)
                .iter()
                .filter(|t| t[1] == cycle[j] && t[3] == cycle[j] && t[0] == t[2])
                .map(|t| t[0])
                .collect()
        })
        .collect();
    if options.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0; m];
    loop {
        let labels: Vec<Elem> = (0..m).map(|j| options[j][idx[j]]).collect();
        if let Ok(check) = validate_npair(s, &labels, cycle, n) {
            if check.is_valid() {
                out.insert(NPair {
                    n,
                    m,
                    labels,
                    cycle: cycle.to_vec(),
                });
            }
        }
        let mut j = 0;
        loop {
            if j == m {
                return;
            }
            idx[j] += 1;
            if idx[j] < options[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}
