use std::sync::Arc;

use super::class::{free_amalgam, AgeClass, Amalgam};
use crate::error::{Error, Result};
use crate::logic::{Formula, Quantifier, SchemeTag, Sentence};
use crate::structure::{Elem, Morphism, Structure, Vocabulary};

fn graph_vocab() -> Arc<Vocabulary> {
    Arc::new(Vocabulary::new([("E", 2)]).expect("graph vocabulary"))
}

fn is_graph(s: &Structure) -> bool {
    s.relation(0)
        .iter()
        .all(|t| t[0] != t[1] && s.holds(0, &[t[1], t[0]]))
}

fn graph_laws(max_q: usize) -> Vec<Sentence> {
    let mut out = Vec::new();
    if max_q >= 1 {
        out.push(Sentence::with_blocks(
            &[(Quantifier::Forall, 1)],
            Formula::not(Formula::rel("E", vec![0, 0])),
            SchemeTag::B,
        ));
    }
    if max_q >= 2 {
        out.push(Sentence::with_blocks(
            &[(Quantifier::Forall, 2)],
            Formula::implies(Formula::rel("E", vec![0, 1]), Formula::rel("E", vec![1, 0])),
            SchemeTag::B,
        ));
    }
    out
}

/// Which graphs a graph-based class admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFamily {
    All,
    TriangleFree,
    CompleteOrEmpty,
}

/// Simple undirected graphs (symmetric, loop-free `E/2`), optionally restricted.
#[derive(Debug, Clone)]
pub struct GraphClass {
    family: GraphFamily,
    name: String,
    vocab: Arc<Vocabulary>,
}

impl GraphClass {
    pub fn new(family: GraphFamily) -> Self {
        let name = match family {
            GraphFamily::All => "graphs",
            GraphFamily::TriangleFree => "triangle-free",
            GraphFamily::CompleteOrEmpty => "complete-or-empty",
        };
        GraphClass {
            family,
            name: name.to_string(),
            vocab: graph_vocab(),
        }
    }
}

impl AgeClass for GraphClass {
    fn name(&self) -> &str {
        &self.name
    }

    fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    fn ambient(&self, s: &Structure) -> bool {
        is_graph(s)
    }

    fn contains(&self, s: &Structure) -> bool {
        if !is_graph(s) {
            return false;
        }
        match self.family {
            GraphFamily::All => true,
            GraphFamily::TriangleFree => !s
                .relation(0)
                .iter()
                .any(|t| (0..s.size()).any(|z| s.holds(0, &[t[1], z]) && s.holds(0, &[z, t[0]]))),
            GraphFamily::CompleteOrEmpty => {
                let n = s.size();
                let e = s.relation(0).len();
                e == 0 || e == n * (n - 1)
            }
        }
    }

    fn violation(&self, s: &Structure) -> Option<String> {
        if !is_graph(s) {
            return Some("E is not symmetric and loop-free".into());
        }
        if self.contains(s) {
            return None;
        }
        Some(match self.family {
            GraphFamily::TriangleFree => "contains a triangle".into(),
            _ => "neither complete nor edgeless".into(),
        })
    }

    fn extensions(&self, s: &Structure, _cap: u64) -> Result<Vec<Structure>> {
        let n = s.size();
        if n > 24 {
            return Err(Error::cap("graph extension neighbourhoods", 24));
        }
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << n) {
            let mut t = s.clone();
            let new = t.add_fresh(&format!("e{n}"));
            for x in 0..n {
                if mask >> x & 1 == 1 {
                    t.insert(0, vec![x, new]);
                    t.insert(0, vec![new, x]);
                }
            }
            if self.contains(&t) {
                out.push(t);
            }
        }
        Ok(out)
    }

    fn member_bound(&self, n: usize) -> Option<u64> {
        let pairs = (n * n.saturating_sub(1) / 2) as u32;
        2u64.checked_pow(pairs)
    }

    fn discipline_axioms(&self, max_q: usize) -> Vec<Sentence> {
        graph_laws(max_q)
    }
}

/// Pure sets: the empty vocabulary.
#[derive(Debug, Clone)]
pub struct SetClass {
    vocab: Arc<Vocabulary>,
}

impl SetClass {
    pub fn new() -> Self {
        SetClass {
            vocab: Arc::new(Vocabulary::empty()),
        }
    }
}

impl Default for SetClass {
    fn default() -> Self {
        SetClass::new()
    }
}

impl AgeClass for SetClass {
    fn name(&self) -> &str {
        "sets"
    }

    fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    fn contains(&self, _s: &Structure) -> bool {
        true
    }

    fn member_bound(&self, _n: usize) -> Option<u64> {
        Some(1)
    }
}

/// Whether `lt` (symbol 0) is a strict linear order.
pub(crate) fn is_linear_order(s: &Structure, lt: usize) -> bool {
    let n = s.size();
    for x in 0..n {
        if s.holds(lt, &[x, x]) {
            return false;
        }
        for y in 0..n {
            if x != y && s.holds(lt, &[x, y]) == s.holds(lt, &[y, x]) {
                return false;
            }
        }
    }
    s.relation(lt)
        .iter()
        .all(|t| (0..n).all(|z| !s.holds(lt, &[t[1], z]) || s.holds(lt, &[t[0], z])))
}

/// Merge two linear orders over a common part. Points of `d1` and new points of `d2`
/// falling in the same gap are placed with the `d1` points first.
pub(crate) fn order_amalgam(
    lt: usize,
    c: &Structure,
    d1: &Structure,
    f1: &Morphism,
    d2: &Structure,
    f2: &Morphism,
) -> Amalgam {
    let mut a = free_amalgam(c, d1, f1, d2, f2);
    let e = &mut a.structure;
    let n1 = d1.size();
    // For a new point of d2, the number of common points below it; likewise for d1.
    let below2 = |y: Elem| f2.map.iter().filter(|cy| d2.holds(lt, &[**cy, y])).count();
    let below1 = |x: Elem| f1.map.iter().filter(|cx| d1.holds(lt, &[**cx, x])).count();
    let new2: Vec<(Elem, Elem)> = (0..d2.size())
        .filter(|y| !f2.map.contains(y))
        .map(|y| (y, a.right.map[y]))
        .collect();
    for x in 0..n1 {
        if f1.map.contains(&x) {
            continue;
        }
        for (y, ey) in &new2 {
            // gap index: d1 point x sits above `below1(x)` common points
            if below1(x) <= below2(*y) {
                e.insert(lt, vec![x, *ey]);
            } else {
                e.insert(lt, vec![*ey, x]);
            }
        }
    }
    a
}

/// Strict linear orders `lt/2`.
#[derive(Debug, Clone)]
pub struct OrderClass {
    vocab: Arc<Vocabulary>,
}

impl OrderClass {
    pub fn new() -> Self {
        OrderClass {
            vocab: Arc::new(Vocabulary::new([("lt", 2)]).expect("order vocabulary")),
        }
    }
}

impl Default for OrderClass {
    fn default() -> Self {
        OrderClass::new()
    }
}

impl AgeClass for OrderClass {
    fn name(&self) -> &str {
        "orders"
    }

    fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    fn contains(&self, s: &Structure) -> bool {
        is_linear_order(s, 0)
    }

    fn extensions(&self, s: &Structure, _cap: u64) -> Result<Vec<Structure>> {
        let n = s.size();
        let mut rank: Vec<(usize, Elem)> = (0..n)
            .map(|x| ((0..n).filter(|y| s.holds(0, &[*y, x])).count(), x))
            .collect();
        rank.sort_unstable();
        let mut out = Vec::new();
        for gap in 0..=n {
            let mut t = s.clone();
            let new = t.add_fresh(&format!("e{n}"));
            for (i, (_, x)) in rank.iter().enumerate() {
                if i < gap {
                    t.insert(0, vec![*x, new]);
                } else {
                    t.insert(0, vec![new, *x]);
                }
            }
            out.push(t);
        }
        Ok(out)
    }

    fn member_bound(&self, _n: usize) -> Option<u64> {
        Some(1)
    }

    fn strategy(&self) -> &str {
        "order-merge"
    }

    fn amalgamate(
        &self,
        c: &Structure,
        d1: &Structure,
        f1: &Morphism,
        d2: &Structure,
        f2: &Morphism,
    ) -> Result<Option<Amalgam>> {
        let a = order_amalgam(0, c, d1, f1, d2, f2);
        Ok(self.contains(&a.structure).then_some(a))
    }
}

/// Equivalence relations `E/2`.
#[derive(Debug, Clone)]
pub struct EquivalenceClass {
    vocab: Arc<Vocabulary>,
}

impl EquivalenceClass {
    pub fn new() -> Self {
        EquivalenceClass {
            vocab: graph_vocab(),
        }
    }
}

impl Default for EquivalenceClass {
    fn default() -> Self {
        EquivalenceClass::new()
    }
}

/// Close binary relation `r` under transitivity.
pub(crate) fn transitive_closure(s: &mut Structure, r: usize) {
    let n = s.size();
    let mut m = vec![vec![false; n]; n];
    for t in s.relation(r) {
        m[t[0]][t[1]] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    for (i, row) in m.iter().enumerate() {
        for (j, on) in row.iter().enumerate() {
            if *on {
                s.insert(r, vec![i, j]);
            }
        }
    }
}

impl AgeClass for EquivalenceClass {
    fn name(&self) -> &str {
        "equivalence"
    }

    fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    fn contains(&self, s: &Structure) -> bool {
        let n = s.size();
        (0..n).all(|x| s.holds(0, &[x, x]))
            && s.relation(0).iter().all(|t| {
                s.holds(0, &[t[1], t[0]])
                    && (0..n).all(|z| !s.holds(0, &[t[1], z]) || s.holds(0, &[t[0], z]))
            })
    }

    fn extensions(&self, s: &Structure, _cap: u64) -> Result<Vec<Structure>> {
        let n = s.size();
        let mut reps: Vec<Elem> = Vec::new();
        for x in 0..n {
            if !reps.iter().any(|r| s.holds(0, &[*r, x])) {
                reps.push(x);
            }
        }
        let mut out = Vec::new();
        for join in std::iter::once(None).chain(reps.iter().map(Some)) {
            let mut t = s.clone();
            let new = t.add_fresh(&format!("e{n}"));
            t.insert(0, vec![new, new]);
            if let Some(r) = join {
                for x in 0..n {
                    if s.holds(0, &[*r, x]) {
                        t.insert(0, vec![x, new]);
                        t.insert(0, vec![new, x]);
                    }
                }
            }
            out.push(t);
        }
        Ok(out)
    }

    fn strategy(&self) -> &str {
        "free+transitive-closure"
    }

    fn close(&self, s: &mut Structure) {
        transitive_closure(s, 0);
    }
}

/// Builtin class names accepted by [`builtin_class`].
pub const BUILTIN_CLASSES: [&str; 6] = [
    "graphs",
    "sets",
    "orders",
    "complete-or-empty",
    "triangle-free",
    "equivalence",
];

pub fn builtin_class(name: &str) -> Result<Box<dyn AgeClass>> {
    Ok(match name {
        "graphs" => Box::new(GraphClass::new(GraphFamily::All)),
        "sets" => Box::new(SetClass::new()),
        "orders" | "linear-orders" => Box::new(OrderClass::new()),
        "complete-or-empty" => Box::new(GraphClass::new(GraphFamily::CompleteOrEmpty)),
        "triangle-free" => Box::new(GraphClass::new(GraphFamily::TriangleFree)),
        "equivalence" => Box::new(EquivalenceClass::new()),
        other => {
            return Err(Error::Invalid(format!(
                "unknown class {other}; expected one of {}",
                BUILTIN_CLASSES.join(", ")
            )))
        }
    })
}
