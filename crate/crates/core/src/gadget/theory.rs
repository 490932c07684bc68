use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use rand::Rng;

use super::arith::{decode_pair, small, ArityFunction};
use crate::error::{Error, Result};
use crate::fraisse::{free_amalgam, AgeClass, Amalgam};
use crate::logic::{Formula, Quantifier, SchemeTag, Sentence};
use crate::structure::{
    Elem, Morphism, Structure, Tuple, TupleIter, Vocabulary, DEFAULT_CANDIDATE_CAP,
};

/// Largest layer arity bound a gadget vocabulary is built for.
pub const MAX_LAYER_ARITY: u64 = 256;

/// `E_n`: an equivalence relation on `p_n`-tuples, arity `2 p_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqSymbol {
    pub sort: usize,
    pub width: usize,
    pub symbol: usize,
}

/// `P*_i` for `i` coding `<n, j>`: `a(i)` blocks of `p_n` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredSymbol {
    pub code: u64,
    pub sort: usize,
    pub blocks: usize,
    pub width: usize,
    pub symbol: usize,
    /// Position of `E_sort` in the equivalence list.
    pub eq: usize,
    pub live: bool,
}

#[derive(Debug)]
struct Layout {
    layer: u64,
    bound: usize,
    codes: BTreeSet<u64>,
    vocab: Arc<Vocabulary>,
    eqs: Vec<EqSymbol>,
    preds: Vec<PredSymbol>,
    pads: Vec<usize>,
}

/// The class `K_{m,D}` in the one-sorted vocabulary of layer `m`.
#[derive(Debug, Clone)]
pub struct GadgetClass {
    name: String,
    layout: Arc<Layout>,
}

/// Layer `m` of the gadget with predicate codes `D`.
#[derive(Debug, Clone)]
pub struct GadgetTheory {
    pub class: GadgetClass,
}

impl GadgetTheory {
    pub fn layer(&self) -> u64 {
        self.class.layout.layer
    }

    /// `l_m`.
    pub fn bound(&self) -> usize {
        self.class.layout.bound
    }

    pub fn codes(&self) -> &BTreeSet<u64> {
        &self.class.layout.codes
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.class.layout.vocab
    }

    pub fn eq_symbols(&self) -> &[EqSymbol] {
        &self.class.layout.eqs
    }

    pub fn predicates(&self) -> &[PredSymbol] {
        &self.class.layout.preds
    }

    /// Symbols holding nowhere, one for each arity nothing else occupies.
    pub fn pads(&self) -> &[usize] {
        &self.class.layout.pads
    }

    /// Codes of `D` with a predicate symbol in this layer.
    pub fn live_codes(&self) -> Vec<u64> {
        self.predicates()
            .iter()
            .filter(|p| p.live)
            .map(|p| p.code)
            .collect()
    }

    /// Codes of `D` at most `l_m` whose predicate arity exceeds `l_m`.
    pub fn dormant_codes(&self) -> Vec<u64> {
        let live = self.live_codes();
        self.codes()
            .iter()
            .copied()
            .filter(|c| !live.contains(c))
            .collect()
    }

    /// Sorts present: `n` with `2 p_n <= l_m`.
    pub fn sorts(&self) -> usize {
        self.eq_symbols().len()
    }
}

pub fn build_gadget_class(codes: &BTreeSet<u64>, m: u64) -> Result<GadgetTheory> {
    let mut f = ArityFunction::new();
    let l = f.layer_bound(m);
    let bound = small(&l)
        .filter(|b| *b <= MAX_LAYER_ARITY)
        .ok_or_else(|| Error::cap(format!("arity bound l_{m} = {l}"), MAX_LAYER_ARITY))?
        as usize;
    if let Some(c) = codes.iter().find(|c| **c > bound as u64) {
        return Err(Error::Invalid(format!(
            "code {c} exceeds the layer bound l_{m} = {bound}"
        )));
    }
    // (arity, kind, name, payload)
    let mut entries: Vec<(usize, usize, String)> = Vec::new();
    let mut eq_sorts = Vec::new();
    let mut n = 0;
    while 2 * f.prime(n) as usize <= bound {
        entries.push((2 * f.prime(n) as usize, 0, format!("E{n}")));
        eq_sorts.push(n);
        n += 1;
    }
    let mut pred_info = Vec::new();
    for i in 0..=m {
        let (sort, _) = decode_pair(i);
        let p = f.prime(sort as usize) as usize;
        let blocks = small(&f.a(i)).unwrap_or(u64::MAX) as usize;
        if blocks.saturating_mul(p) > bound {
            continue;
        }
        entries.push((blocks * p, 1, format!("Pstar{i}")));
        pred_info.push((i, sort as usize, blocks, p));
    }
    for k in 1..=bound {
        if !entries.iter().any(|e| e.0 == k) {
            entries.push((k, 2, format!("Z{k}")));
        }
    }
    entries.sort();
    let vocab = Arc::new(Vocabulary::new(
        entries.iter().map(|(a, _, n)| (n.as_str(), *a)),
    )?);
    let eqs: Vec<EqSymbol> = eq_sorts
        .iter()
        .map(|n| EqSymbol {
            sort: *n,
            width: f.prime(*n) as usize,
            symbol: vocab.index_of(&format!("E{n}")).expect("listed"),
        })
        .collect();
    let preds = pred_info
        .into_iter()
        .map(|(i, sort, blocks, width)| PredSymbol {
            code: i,
            sort,
            blocks,
            width,
            symbol: vocab.index_of(&format!("Pstar{i}")).expect("listed"),
            eq: sort,
            live: codes.contains(&i),
        })
        .collect();
    let pads = entries
        .iter()
        .filter(|e| e.1 == 2)
        .map(|e| vocab.index_of(&e.2).expect("listed"))
        .collect();
    let list: Vec<String> = codes.iter().map(|c| c.to_string()).collect();
    let layout = Layout {
        layer: m,
        bound,
        codes: codes.clone(),
        vocab,
        eqs,
        preds,
        pads,
    };
    Ok(GadgetTheory {
        class: GadgetClass {
            name: format!("K_{m},{{{}}}", list.join(",")),
            layout: Arc::new(layout),
        },
    })
}

/// A member described by its classes: for each `E_n`, the class of every
/// non-repeating `p_n`-subset, and for each predicate the classes it marks.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Shape {
    size: usize,
    classes: Vec<BTreeMap<Vec<Elem>, usize>>,
    counts: Vec<usize>,
    marked: Vec<BTreeSet<usize>>,
}

fn repeats(t: &[Elem]) -> bool {
    (0..t.len()).any(|i| t[i + 1..].contains(&t[i]))
}

fn sorted(t: &[Elem]) -> Vec<Elem> {
    let mut v = t.to_vec();
    v.sort_unstable();
    v
}

fn concat(parts: &[&[Elem]]) -> Tuple {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<Elem>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn fresh_name(names: &[String], stem: &str) -> String {
    let mut name = stem.to_string();
    while names.contains(&name) {
        name.push('\'');
    }
    name
}

impl Layout {
    /// Tuples of each `E`-class; the repeated-coordinate class comes last.
    fn groups(&self, shape: &Shape, e: usize) -> Vec<Vec<Tuple>> {
        let mut groups = vec![Vec::new(); shape.counts[e] + 1];
        for t in TupleIter::new(shape.size, self.eqs[e].width) {
            if repeats(&t) {
                groups[shape.counts[e]].push(t);
            } else {
                groups[shape.classes[e][&sorted(&t)]].push(t);
            }
        }
        groups
    }

    fn materialize(&self, shape: &Shape, names: Vec<String>) -> Structure {
        let mut rels = vec![BTreeSet::new(); self.vocab.len()];
        let groups: Vec<Vec<Vec<Tuple>>> =
            (0..self.eqs.len()).map(|e| self.groups(shape, e)).collect();
        for (e, eq) in self.eqs.iter().enumerate() {
            for g in &groups[e] {
                for a in g {
                    for b in g {
                        rels[eq.symbol].insert(concat(&[a, b]));
                    }
                }
            }
        }
        for (k, p) in self.preds.iter().enumerate() {
            for c in &shape.marked[k] {
                let ts = &groups[p.eq][*c];
                for pick in TupleIter::new(ts.len(), p.blocks) {
                    let parts: Vec<&[Elem]> = pick.iter().map(|i| ts[*i].as_slice()).collect();
                    rels[p.symbol].insert(concat(&parts));
                }
            }
        }
        Structure::from_parts_unchecked(self.vocab.clone(), names, rels)
    }

    fn shape_of(&self, s: &Structure) -> std::result::Result<Shape, String> {
        if s.vocab().symbols() != self.vocab.symbols() {
            return Err("vocabulary mismatch".into());
        }
        let n = s.size();
        let mut classes = Vec::new();
        let mut counts = Vec::new();
        for eq in &self.eqs {
            let mut map = BTreeMap::new();
            let mut reps: Vec<Vec<Elem>> = Vec::new();
            for sub in subsets(n, eq.width) {
                let c = reps
                    .iter()
                    .position(|r| s.holds(eq.symbol, &concat(&[r, &sub])))
                    .unwrap_or_else(|| {
                        reps.push(sub.clone());
                        reps.len() - 1
                    });
                map.insert(sub, c);
            }
            classes.push(map);
            counts.push(reps.len());
        }
        let mut marked = Vec::new();
        for p in &self.preds {
            let mut set = BTreeSet::new();
            if !p.live {
                if !s.relation(p.symbol).is_empty() {
                    return Err(format!(
                        "{} must be empty: {} is not in D",
                        self.vocab.name(p.symbol),
                        p.code
                    ));
                }
            } else {
                for (sub, c) in &classes[p.eq] {
                    if set.contains(c) {
                        continue;
                    }
                    let parts: Vec<&[Elem]> = vec![sub.as_slice(); p.blocks];
                    if s.holds(p.symbol, &concat(&parts)) {
                        set.insert(*c);
                    }
                }
            }
            marked.push(set);
        }
        for r in &self.pads {
            if !s.relation(*r).is_empty() {
                return Err(format!("{} must be empty", self.vocab.name(*r)));
            }
        }
        let shape = Shape {
            size: n,
            classes,
            counts,
            marked,
        };
        let m = self.materialize(&shape, s.names().to_vec());
        for r in 0..self.vocab.len() {
            if m.relation(r) != s.relation(r) {
                return Err(self.diagnose(s, r));
            }
        }
        Ok(shape)
    }

    fn diagnose(&self, s: &Structure, r: usize) -> String {
        let name = self.vocab.name(r);
        if let Some(eq) = self.eqs.iter().find(|e| e.symbol == r) {
            let p = eq.width;
            let all: Vec<Tuple> = TupleIter::new(s.size(), p).collect();
            let e = |a: &[Elem], b: &[Elem]| s.holds(r, &concat(&[a, b]));
            for a in &all {
                for b in &all {
                    match (repeats(a), repeats(b)) {
                        (true, true) if !e(a, b) => {
                            return format!(
                                "repeated-coordinate tuples of {name} do not form one class"
                            )
                        }
                        (true, false) | (false, true) if e(a, b) => {
                            return format!(
                                "the repeated-coordinate class of {name} is not isolated"
                            )
                        }
                        (false, false) if e(a, b) != e(&sorted(a), &sorted(b)) => {
                            return format!(
                                "{name} depends on coordinate order at {}",
                                s.fmt_tuple(&concat(&[a, b]))
                            )
                        }
                        _ => {}
                    }
                }
            }
            let subs = subsets(s.size(), p);
            for a in &subs {
                if !e(a, a) {
                    return format!("{name} is not reflexive at {}", s.fmt_tuple(a));
                }
                for b in &subs {
                    if e(a, b) && !e(b, a) {
                        return format!(
                            "{name} is not symmetric at {}",
                            s.fmt_tuple(&concat(&[a, b]))
                        );
                    }
                    for c in &subs {
                        if e(a, b) && e(b, c) && !e(a, c) {
                            return format!(
                                "{name} is not transitive on {p}-tuple classes: {} {} {}",
                                s.fmt_tuple(a),
                                s.fmt_tuple(b),
                                s.fmt_tuple(c)
                            );
                        }
                    }
                }
            }
            return format!("{name} is not an equivalence of the required form");
        }
        if let Some(pred) = self.preds.iter().find(|p| p.symbol == r) {
            let eq = &self.eqs[pred.eq];
            let ename = self.vocab.name(eq.symbol);
            for t in s.relation(r) {
                let first = &t[..pred.width];
                let off = repeats(first)
                    || t.chunks(pred.width)
                        .any(|b| !s.holds(eq.symbol, &concat(&[first, b])));
                if off {
                    return format!(
                        "{name}{} lies off the diagonal of a non-repeated {ename}-class",
                        s.fmt_tuple(t)
                    );
                }
            }
            return format!("{name} is not {ename}-invariant");
        }
        format!("{name} must be empty")
    }
}

impl GadgetClass {
    fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Every member extending `s` by one element, from its shape.
    fn grow(&self, s: &Structure, shape: &Shape, cap: u64) -> Result<Vec<Structure>> {
        let lay = self.layout();
        let n = shape.size;
        let mut per_eq: Vec<(Vec<Vec<Elem>>, Vec<Vec<usize>>)> = Vec::new();
        let mut total: u64 = 1;
        for (e, eq) in lay.eqs.iter().enumerate() {
            let new: Vec<Vec<Elem>> = subsets(n, eq.width - 1)
                .into_iter()
                .map(|mut v| {
                    v.push(n);
                    v
                })
                .collect();
            let mut options = Vec::new();
            assign(
                shape.counts[e],
                new.len(),
                &mut Vec::new(),
                &mut options,
                cap,
            )?;
            total = total.saturating_mul(options.len() as u64);
            if total > cap {
                return Err(Error::cap("gadget extensions", cap));
            }
            per_eq.push((new, options));
        }
        let mut names = s.names().to_vec();
        names.push(fresh_name(&names, &format!("e{n}")));
        let mut out = Vec::new();
        let mut choice = vec![0usize; lay.eqs.len()];
        loop {
            let mut base = shape.clone();
            base.size = n + 1;
            for (e, (new, options)) in per_eq.iter().enumerate() {
                let opt = &options[choice[e]];
                for (sub, c) in new.iter().zip(opt) {
                    base.classes[e].insert(sub.clone(), *c);
                }
                base.counts[e] = opt
                    .iter()
                    .map(|c| c + 1)
                    .max()
                    .unwrap_or(0)
                    .max(shape.counts[e]);
            }
            let fresh: Vec<Vec<usize>> = lay
                .preds
                .iter()
                .map(|p| {
                    if p.live {
                        (shape.counts[p.eq]..base.counts[p.eq]).collect()
                    } else {
                        Vec::new()
                    }
                })
                .collect();
            let bits: usize = fresh.iter().map(Vec::len).sum();
            if bits >= 32 || out.len() as u64 + (1u64 << bits) > cap {
                return Err(Error::cap("gadget extensions", cap));
            }
            for mask in 0u64..1 << bits {
                let mut t = base.clone();
                let mut bit = 0;
                for (k, list) in fresh.iter().enumerate() {
                    for c in list {
                        if mask >> bit & 1 == 1 {
                            t.marked[k].insert(*c);
                        }
                        bit += 1;
                    }
                }
                out.push(lay.materialize(&t, names.clone()));
            }
            let mut i = 0;
            while i < choice.len() {
                choice[i] += 1;
                if choice[i] < per_eq[i].1.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                break;
            }
        }
        Ok(out)
    }
}

/// Restricted-growth assignments of `k` new subsets to the `old` existing
/// classes or to new classes numbered from `old`.
fn assign(
    old: usize,
    k: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    cap: u64,
) -> Result<()> {
    if cur.len() == k {
        if out.len() as u64 >= cap {
            return Err(Error::cap("gadget extensions", cap));
        }
        out.push(cur.clone());
        return Ok(());
    }
    let next = cur.iter().map(|c| c + 1).max().unwrap_or(0).max(old);
    for c in 0..=next {
        cur.push(c);
        assign(old, k, cur, out, cap)?;
        cur.pop();
    }
    Ok(())
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl AgeClass for GadgetClass {
    fn name(&self) -> &str {
        &self.name
    }

    fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.layout.vocab
    }

    fn contains(&self, s: &Structure) -> bool {
        self.layout().shape_of(s).is_ok()
    }

    fn violation(&self, s: &Structure) -> Option<String> {
        self.layout().shape_of(s).err()
    }

    fn extensions(&self, s: &Structure, cap: u64) -> Result<Vec<Structure>> {
        let shape = self.layout().shape_of(s).map_err(Error::Invalid)?;
        self.grow(s, &shape, cap)
    }

    fn random_extension(&self, s: &Structure, rng: &mut dyn rand::RngCore) -> Option<Structure> {
        let mut exts = self.extensions(s, DEFAULT_CANDIDATE_CAP).ok()?;
        if exts.is_empty() {
            return None;
        }
        let i = rng.gen_range(0..exts.len());
        Some(exts.swap_remove(i))
    }

    fn strategy(&self) -> &str {
        "free-closure"
    }

    fn amalgamate(
        &self,
        c: &Structure,
        d1: &Structure,
        f1: &Morphism,
        d2: &Structure,
        f2: &Morphism,
    ) -> Result<Option<Amalgam>> {
        let lay = self.layout();
        let (Ok(s1), Ok(s2)) = (lay.shape_of(d1), lay.shape_of(d2)) else {
            return Ok(None);
        };
        let mut a = free_amalgam(c, d1, f1, d2, f2);
        let size = a.structure.size();
        let right = a.right.map.clone();
        let mut shape = Shape {
            size,
            classes: Vec::new(),
            counts: Vec::new(),
            marked: vec![BTreeSet::new(); lay.preds.len()],
        };
        let mut origin: Vec<HashMap<usize, (Option<usize>, Option<usize>)>> = Vec::new();
        for (e, eq) in lay.eqs.iter().enumerate() {
            let all = subsets(size, eq.width);
            let index: HashMap<&Vec<Elem>, usize> =
                all.iter().enumerate().map(|(i, v)| (v, i)).collect();
            let mut uf = UnionFind((0..all.len()).collect());
            let mut first1: HashMap<usize, usize> = HashMap::new();
            let mut first2: HashMap<usize, usize> = HashMap::new();
            let mut from: Vec<(Option<usize>, Option<usize>)> = vec![(None, None); all.len()];
            for (sub, cl) in &s1.classes[e] {
                let i = index[sub];
                from[i].0 = Some(*cl);
                let f = *first1.entry(*cl).or_insert(i);
                uf.union(f, i);
            }
            for (sub, cl) in &s2.classes[e] {
                let img = sorted(&sub.iter().map(|x| right[*x]).collect::<Vec<_>>());
                let i = index[&img];
                from[i].1 = Some(*cl);
                let f = *first2.entry(*cl).or_insert(i);
                uf.union(f, i);
            }
            let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
            let mut map = BTreeMap::new();
            let mut orig: HashMap<usize, (Option<usize>, Option<usize>)> = HashMap::new();
            for (i, sub) in all.iter().enumerate() {
                let root = uf.find(i);
                let next = ids.len();
                let id = *ids.entry(root).or_insert(next);
                map.insert(sub.clone(), id);
                let o = orig.entry(id).or_insert((None, None));
                o.0 = o.0.or(from[i].0);
                o.1 = o.1.or(from[i].1);
            }
            shape.counts.push(ids.len());
            shape.classes.push(map);
            origin.push(orig);
        }
        for (k, p) in lay.preds.iter().enumerate() {
            for (id, (o1, o2)) in &origin[p.eq] {
                let on1 = o1.is_some_and(|c| s1.marked[k].contains(&c));
                let on2 = o2.is_some_and(|c| s2.marked[k].contains(&c));
                if on1 || on2 {
                    shape.marked[k].insert(*id);
                }
            }
        }
        a.structure = lay.materialize(&shape, a.structure.names().to_vec());
        Ok((self.contains(&a.structure) && a.is_valid(d1, d2)).then_some(a))
    }

    fn universal_axioms(&self, max_q: usize) -> Option<Vec<Sentence>> {
        let lay = self.layout();
        let mut out = Vec::new();
        let all = |k: usize, f: Formula| {
            Sentence::with_blocks(&[(Quantifier::Forall, k)], f, SchemeTag::A)
        };
        let block = |start: usize, w: usize| -> Vec<usize> { (start..start + w).collect() };
        let rep = |v: &[usize]| {
            let mut eqs = Vec::new();
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    eqs.push(Formula::Eq(v[i], v[j]));
                }
            }
            Formula::Or(eqs)
        };
        for eq in &lay.eqs {
            let p = eq.width;
            let name = lay.vocab.name(eq.symbol);
            let e = |a: &[usize], b: &[usize]| Formula::rel(name, concat(&[a, b]));
            let (x, y, z) = (block(0, p), block(p, p), block(2 * p, p));
            let mut laws = vec![
                (p, e(&x, &x)),
                (2 * p, Formula::implies(e(&x, &y), e(&y, &x))),
            ];
            let mut swapped = x.clone();
            swapped.swap(0, 1);
            laws.push((2 * p, Formula::implies(e(&x, &y), e(&swapped, &y))));
            if p > 2 {
                let mut rotated = x.clone();
                rotated.rotate_left(1);
                laws.push((2 * p, Formula::implies(e(&x, &y), e(&rotated, &y))));
            }
            laws.push((
                3 * p,
                Formula::implies(Formula::And(vec![e(&x, &y), e(&y, &z)]), e(&x, &z)),
            ));
            // Tuples repeating their first coordinate, over p - 1 variables each side.
            let u: Vec<usize> = std::iter::once(0).chain(0..p - 1).collect();
            let v: Vec<usize> = std::iter::once(p - 1).chain(p - 1..2 * p - 2).collect();
            laws.push((2 * p - 2, e(&u, &v)));
            laws.push((
                2 * p,
                Formula::implies(Formula::And(vec![e(&x, &y), rep(&x)]), rep(&y)),
            ));
            for (q, f) in laws {
                if q <= max_q {
                    out.push(all(q, f));
                }
            }
        }
        for pred in &lay.preds {
            let name = lay.vocab.name(pred.symbol);
            let w = pred.width;
            let ar = w * pred.blocks;
            if !pred.live {
                if ar <= max_q {
                    out.push(all(ar, Formula::not(Formula::rel(name, (0..ar).collect()))));
                }
                continue;
            }
            let ename = lay.vocab.name(lay.eqs[pred.eq].symbol);
            let e = |a: &[usize], b: &[usize]| Formula::rel(ename, concat(&[a, b]));
            let x: Vec<usize> = (0..ar).collect();
            let first = block(0, w);
            if ar <= max_q {
                let mut concl: Vec<Formula> = (1..pred.blocks)
                    .map(|b| e(&first, &block(b * w, w)))
                    .collect();
                concl.push(Formula::not(rep(&first)));
                out.push(all(
                    ar,
                    Formula::implies(Formula::rel(name, x.clone()), Formula::And(concl)),
                ));
            }
            if ar + w <= max_q {
                let y = block(ar, w);
                let diag: Vec<usize> = (0..pred.blocks).flat_map(|_| y.iter().copied()).collect();
                out.push(all(
                    ar + w,
                    Formula::implies(
                        Formula::And(vec![Formula::rel(name, x.clone()), e(&first, &y)]),
                        Formula::rel(name, diag.clone()),
                    ),
                ));
                let mut hyp = vec![Formula::rel(name, diag)];
                hyp.extend((0..pred.blocks).map(|b| e(&y, &block(b * w, w))));
                out.push(all(
                    ar + w,
                    Formula::implies(Formula::And(hyp), Formula::rel(name, x)),
                ));
            }
        }
        for r in &lay.pads {
            let ar = lay.vocab.arity(*r);
            if ar <= max_q {
                out.push(all(
                    ar,
                    Formula::not(Formula::rel(lay.vocab.name(*r), (0..ar).collect())),
                ));
            }
        }
        Some(out)
    }
}
