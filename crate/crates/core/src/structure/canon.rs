//! Canonical labelling by individualisation and refinement.
//!
//! The key of a structure `S` over vocabulary `V` is the text
//! `sig;n=<size>;` followed by one `name[...]` block per symbol listing the
//! relabelled tuples, where `sig` is the space-separated list of `name/arity`.
//! The empty structure over the graph vocabulary therefore has key
//! `E/2;n=0;E[]`, and the empty structure over the empty vocabulary has key `;n=0;`.

use std::fmt;
use std::fmt::Write as _;

use super::finite::{Elem, Structure, Tuple};

/// Canonical isomorphism-class key. Equal keys iff isomorphic over the same vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonKey(String);

impl CanonKey {
    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn canonical_form(s: &Structure) -> CanonKey {
    canonical_labeling(s).0
}

/// The canonical key together with the canonical order: `order[i]` is the element
/// placed at position `i`.
pub fn canonical_labeling(s: &Structure) -> (CanonKey, Vec<Elem>) {
    let n = s.size();
    let (code, label) = if n == 0 {
        (Vec::new(), Vec::new())
    } else {
        let mut search = Search::new(s);
        let colors = search.refine(vec![0; n]);
        search.visit(colors, &mut Vec::new());
        search.best.expect("at least one leaf")
    };
    let mut order = vec![0; n];
    for (e, l) in label.iter().enumerate() {
        order[*l as usize] = e;
    }
    (render(s, &code), order)
}

/// The canonical representative: reordered canonically, names `e0, e1, ...`.
pub fn canonical_structure(s: &Structure) -> (CanonKey, Structure) {
    let (key, order) = canonical_labeling(s);
    (key, s.reorder(&order).with_default_names())
}

fn render(s: &Structure, code: &[u32]) -> CanonKey {
    let v = s.vocab();
    let mut out = String::new();
    for (i, sym) in v.symbols().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{}/{}", sym.name, sym.arity);
    }
    let _ = write!(out, ";n={};", s.size());
    let mut pos = 0;
    for r in 0..v.len() {
        let ar = v.arity(r);
        let count = if code.is_empty() {
            0
        } else {
            code[pos] as usize
        };
        if !code.is_empty() {
            pos += 1;
        }
        out.push_str(v.name(r));
        out.push('[');
        for k in 0..count {
            if k > 0 {
                out.push(' ');
            }
            for j in 0..ar {
                if j > 0 {
                    out.push('.');
                }
                let _ = write!(out, "{}", code[pos + j]);
            }
            pos += ar;
        }
        out.push(']');
    }
    CanonKey(out)
}

enum Step {
    Continue,
    /// Unwind to the node whose path has this length.
    Abort(usize),
}

struct Search<'a> {
    s: &'a Structure,
    inc: Vec<Vec<(usize, &'a Tuple)>>,
    first: Option<(Vec<u32>, Vec<u32>, Vec<Elem>)>,
    best: Option<(Vec<u32>, Vec<u32>)>,
    autos: Vec<Vec<Elem>>,
}

impl<'a> Search<'a> {
    fn new(s: &'a Structure) -> Self {
        Search {
            s,
            inc: s.incidence(),
            first: None,
            best: None,
            autos: Vec::new(),
        }
    }

    /// Equitable-style refinement: split cells by the multiset of coloured
    /// incidence patterns until stable. Colours stay ranked so the ordered
    /// partition depends only on the isomorphism type.
    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let n = colors.len();
        let mut classes = count_classes(&colors);
        loop {
            let mut sigs: Vec<(Vec<u64>, Elem)> = Vec::with_capacity(n);
            for e in 0..n {
                let mut pats: Vec<Vec<u64>> = self.inc[e]
                    .iter()
                    .map(|(r, t)| {
                        let mut p = Vec::with_capacity(t.len() * 2 + 1);
                        p.push(*r as u64);
                        for (i, x) in t.iter().enumerate() {
                            let firstpos = t.iter().position(|y| y == x).unwrap_or(i);
                            let me = u64::from(*x == e);
                            p.push(((colors[*x] as u64) << 1) | me);
                            p.push(firstpos as u64);
                        }
                        p
                    })
                    .collect();
                pats.sort_unstable();
                let mut sig = vec![colors[e] as u64];
                for p in pats {
                    sig.push(p.len() as u64);
                    sig.extend(p);
                }
                sigs.push((sig, e));
            }
            sigs.sort_unstable();
            let mut next = vec![0u32; n];
            let mut rank = 0u32;
            for i in 0..n {
                if i > 0 && sigs[i].0 != sigs[i - 1].0 {
                    rank += 1;
                }
                next[sigs[i].1] = rank;
            }
            let c = rank as usize + 1;
            colors = next;
            if c == classes {
                return colors;
            }
            classes = c;
        }
    }

    fn individualize(&self, colors: &[u32], v: Elem) -> Vec<u32> {
        let c = colors[v];
        let keyed: Vec<u32> = colors
            .iter()
            .enumerate()
            .map(|(e, k)| k * 2 + u32::from(*k == c && e != v))
            .collect();
        self.refine(rerank(&keyed))
    }

    fn visit(&mut self, colors: Vec<u32>, path: &mut Vec<Elem>) -> Step {
        let n = colors.len();
        let classes = count_classes(&colors);
        if classes == n {
            return self.leaf(colors, path);
        }
        let mut counts = vec![0usize; classes];
        for c in &colors {
            counts[*c as usize] += 1;
        }
        let target = counts.iter().position(|k| *k > 1).expect("non-discrete") as u32;
        let cell: Vec<Elem> = (0..n).filter(|e| colors[*e] == target).collect();
        let mut explored: Vec<Elem> = Vec::new();
        for v in cell {
            if !explored.is_empty() && self.in_orbit(path, &explored, v) {
                continue;
            }
            path.push(v);
            let next = self.individualize(&colors, v);
            let step = self.visit(next, path);
            path.pop();
            explored.push(v);
            if let Step::Abort(d) = step {
                if d < path.len() {
                    return Step::Abort(d);
                }
            }
        }
        Step::Continue
    }

    fn in_orbit(&self, path: &[Elem], explored: &[Elem], v: Elem) -> bool {
        let n = self.s.size();
        let mut parent: Vec<Elem> = (0..n).collect();
        fn find(p: &mut [Elem], mut x: Elem) -> Elem {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut any = false;
        for g in &self.autos {
            if path.iter().all(|p| g[*p] == *p) {
                any = true;
                for (x, y) in g.iter().enumerate() {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, *y));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        if !any {
            return false;
        }
        let root = find(&mut parent, v);
        explored.iter().any(|e| find(&mut parent, *e) == root)
    }

    fn leaf(&mut self, label: Vec<u32>, path: &[Elem]) -> Step {
        let code = self.leaf_code(&label);
        let Some((fcode, flabel, fpath)) = &self.first else {
            self.first = Some((code.clone(), label.clone(), path.to_vec()));
            self.best = Some((code, label));
            return Step::Continue;
        };
        if code == *fcode {
            let g = automorphism(flabel, &label);
            let common = fpath.iter().zip(path).take_while(|(a, b)| a == b).count();
            self.autos.push(g);
            return Step::Abort(common);
        }
        let (bcode, blabel) = self.best.as_ref().expect("best set with first");
        match code.cmp(bcode) {
            std::cmp::Ordering::Less => self.best = Some((code, label)),
            std::cmp::Ordering::Equal => {
                let g = automorphism(blabel, &label);
                self.autos.push(g);
            }
            std::cmp::Ordering::Greater => {}
        }
        Step::Continue
    }

    fn leaf_code(&self, label: &[u32]) -> Vec<u32> {
        let mut code = Vec::new();
        for rel in self.s.relations() {
            let mut ts: Vec<Vec<u32>> = rel
                .iter()
                .map(|t| t.iter().map(|e| label[*e]).collect())
                .collect();
            ts.sort_unstable();
            code.push(ts.len() as u32);
            for t in ts {
                code.extend(t);
            }
        }
        code
    }
}

/// The permutation sending the element labelled `l` under `from` to the element
/// labelled `l` under `to`.
fn automorphism(from: &[u32], to: &[u32]) -> Vec<Elem> {
    let mut by_label = vec![0; to.len()];
    for (e, l) in to.iter().enumerate() {
        by_label[*l as usize] = e;
    }
    from.iter().map(|l| by_label[*l as usize]).collect()
}

fn count_classes(colors: &[u32]) -> usize {
    colors.iter().max().map_or(0, |m| *m as usize + 1)
}

fn rerank(keys: &[u32]) -> Vec<u32> {
    let mut sorted: Vec<u32> = keys.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("present") as u32)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
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
    fn relabelled_paths_agree() {
        let p1 = graph(3, &[(0, 1), (1, 2)]);
        let p2 = graph(3, &[(2, 0), (0, 1)]);
        assert_eq!(canonical_form(&p1), canonical_form(&p2));
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_ne!(canonical_form(&p1), canonical_form(&tri));
    }

    #[test]
    fn empty_structure_key_is_documented() {
        assert_eq!(canonical_form(&graph(0, &[])).as_str(), "E/2;n=0;E[]");
        let s = Structure::empty(Arc::new(Vocabulary::empty()));
        assert_eq!(canonical_form(&s).as_str(), ";n=0;");
    }

    #[test]
    fn large_symmetric_structures_are_fast() {
        let s = graph(12, &[]);
        let k = canonical_form(&s);
        assert!(k.as_str().ends_with("E[]"));
        let mut edges = Vec::new();
        for i in 0..12 {
            for j in i + 1..12 {
                edges.push((i, j));
            }
        }
        let complete = graph(12, &edges);
        let _ = canonical_form(&complete);
    }

    #[test]
    fn canonical_structure_is_isomorphic() {
        let p = graph(4, &[(3, 1), (1, 0), (0, 2)]);
        let (k, c) = canonical_structure(&p);
        assert_eq!(canonical_form(&c), k);
        assert!(crate::structure::are_isomorphic(&p, &c));
    }
}
