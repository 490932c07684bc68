use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::report::{verdict_line, Report, Summary, Verdict, Witness};
use crate::structure::{Elem, Matcher, Morphism, Structure};

const SIDE: [&str; 2] = ["U'", "U''"];

#[derive(Debug, Clone)]
pub struct BackForthReport {
    pub depth: usize,
    pub p_size: usize,
    pub q_sizes: (usize, usize),
    pub components: (usize, usize),
    /// Whether the two structures are isomorphic over the identified P-parts.
    pub isomorphic: bool,
    /// Element pairs: the P identification, then either a full isomorphism or
    /// the pairs of one winning play.
    pub matching: Vec<(String, String)>,
    /// Moves of a winning play for the challenger, when the game is lost.
    pub trace: Vec<String>,
    pub verdict: Verdict,
}

impl Report for BackForthReport {
    fn summary(&self) -> Summary {
        let mut s = Summary::new();
        s.push("depth", self.depth)
            .push("p_size", self.p_size)
            .push("q_sizes", format!("{},{}", self.q_sizes.0, self.q_sizes.1))
            .push(
                "components",
                format!("{},{}", self.components.0, self.components.1),
            )
            .push("isomorphic", self.isomorphic)
            .push("matched", self.matching.len())
            .push("verdict", self.verdict.word());
        s
    }

    fn body(&self) -> String {
        let mut out = format!(
            "back-and-forth over P to depth {}: P has {} elements, Q-parts {} and {}\n",
            self.depth, self.p_size, self.q_sizes.0, self.q_sizes.1
        );
        for t in &self.trace {
            let _ = writeln!(out, "{t}");
        }
        for (a, b) in &self.matching {
            let _ = writeln!(out, "{a} -> {b}");
        }
        verdict_line(&mut out, "game", &self.verdict);
        out
    }

    fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

type Sig = Vec<(usize, Vec<Option<Elem>>)>;

struct Side<'a> {
    s: &'a Structure,
    inc: Vec<Vec<(usize, &'a crate::structure::Tuple)>>,
    is_p: Vec<bool>,
    q: Vec<Elem>,
    comp_of: Vec<usize>,
    comps: Vec<Vec<Elem>>,
    key: Vec<(usize, usize)>,
    sig: Vec<Sig>,
    by_sig: HashMap<Sig, Vec<Elem>>,
}

struct Game<'a> {
    sides: [Side<'a>; 2],
    map: [Vec<Option<Elem>>; 2],
    touched: [Vec<usize>; 2],
}

struct Step {
    side: usize,
    x: Elem,
    answer: Option<Elem>,
}

fn components(s: &Structure, is_p: &[bool]) -> (Vec<usize>, Vec<Vec<Elem>>) {
    let n = s.size();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for rel in s.relations() {
        for t in rel {
            let mut first = None;
            for e in t {
                if is_p[*e] {
                    continue;
                }
                match first {
                    None => first = Some(*e),
                    Some(f) => {
                        let (a, b) = (find(&mut parent, f), find(&mut parent, *e));
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut comp_of = vec![usize::MAX; n];
    let mut comps: Vec<Vec<Elem>> = Vec::new();
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    for e in 0..n {
        if is_p[e] {
            continue;
        }
        let r = find(&mut parent, e);
        let c = *index.entry(r).or_insert_with(|| {
            comps.push(Vec::new());
            comps.len() - 1
        });
        comps[c].push(e);
        comp_of[e] = c;
    }
    (comp_of, comps)
}

impl<'a> Side<'a> {
    fn new(s: &'a Structure, p: usize) -> Self {
        let is_p: Vec<bool> = s.elems().map(|e| s.holds(p, &[e])).collect();
        let q: Vec<Elem> = s.elems().filter(|e| !is_p[*e]).collect();
        let (comp_of, comps) = components(s, &is_p);
        Side {
            s,
            inc: s.incidence(),
            is_p,
            q,
            comp_of,
            comps,
            key: vec![(usize::MAX, usize::MAX); s.size()],
            sig: vec![Vec::new(); s.size()],
            by_sig: HashMap::new(),
        }
    }

    fn touched_p(&self, c: usize) -> Vec<Elem> {
        let mut out: Vec<Elem> = self.comps[c]
            .iter()
            .flat_map(|e| self.inc[*e].iter())
            .flat_map(|(_, t)| t.iter().copied())
            .filter(|x| self.is_p[*x])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Play the depth-`depth` back-and-forth game between two U-forms with their
/// P-parts identified (by the given name pairs, or by a computed isomorphism).
/// The challenger picks Q-elements on either side; the P-part stays fixed.
pub fn back_and_forth_over_p(
    u1: &Structure,
    u2: &Structure,
    depth: usize,
    identification: Option<&[(String, String)]>,
) -> Result<BackForthReport> {
    if u1.vocab().symbols() != u2.vocab().symbols() {
        return Err(Error::VocabularyMismatch(
            "the two structures differ in vocabulary".into(),
        ));
    }
    let p = u1
        .vocab()
        .index_of("P")
        .filter(|i| u1.vocab().arity(*i) == 1)
        .ok_or_else(|| Error::VocabularyMismatch("missing P/1".into()))?;
    let mut a = Side::new(u1, p);
    let mut b = Side::new(u2, p);
    let p1: Vec<Elem> = u1.elems().filter(|e| a.is_p[*e]).collect();
    let p2: Vec<Elem> = u2.elems().filter(|e| b.is_p[*e]).collect();
    let not_iso = || Error::Invalid("the P-parts are not isomorphic".into());
    if p1.len() != p2.len() {
        return Err(not_iso());
    }
    let a1 = u1.induced(&p1);
    let a2 = u2.induced(&p2);
    let iso: Vec<Elem> = match identification {
        Some(pairs) => {
            let mut m = vec![usize::MAX; p1.len()];
            for (x, y) in pairs {
                let ex = u1.elem(x).ok_or_else(|| Error::UnknownElement(x.clone()))?;
                let ey = u2.elem(y).ok_or_else(|| Error::UnknownElement(y.clone()))?;
                let (Ok(i), Ok(j)) = (p1.binary_search(&ex), p2.binary_search(&ey)) else {
                    return Err(Error::Invalid(format!(
                        "{x} -> {y} is not between P-elements"
                    )));
                };
                m[i] = j;
            }
            if m.contains(&usize::MAX) {
                return Err(Error::Invalid("the identification does not cover P".into()));
            }
            if !Morphism::new(m.clone()).is_embedding(&a1, &a2) {
                return Err(not_iso());
            }
            m
        }
        None => Matcher::new(&a1, &a2).first(&[]).ok_or_else(not_iso)?.map,
    };
    let mut map = [vec![None; u1.size()], vec![None; u2.size()]];
    for (i, j) in iso.iter().enumerate() {
        map[0][p1[i]] = Some(p2[*j]);
        map[1][p2[*j]] = Some(p1[i]);
    }
    // P elements are written in U' coordinates on both sides.
    let to_common = |side: usize, e: Elem| {
        if side == 0 {
            e
        } else {
            map[1][e].expect("P element")
        }
    };
    for (side, st) in [&mut a, &mut b].into_iter().enumerate() {
        for &x in &st.q {
            let mut sig: Sig = st.inc[x]
                .iter()
                .filter(|(_, t)| t.iter().all(|e| *e == x || st.is_p[*e]))
                .map(|(r, t)| {
                    (
                        *r,
                        t.iter()
                            .map(|e| {
                                if *e == x {
                                    None
                                } else {
                                    Some(to_common(side, *e))
                                }
                            })
                            .collect(),
                    )
                })
                .collect();
            sig.sort();
            st.by_sig.entry(sig.clone()).or_default().push(x);
            st.sig[x] = sig;
        }
    }
    // Classes of components up to isomorphism over P.
    let mut reps: Vec<(usize, usize)> = Vec::new();
    let mut sides = [a, b];
    let mut comp_iso: [Vec<Vec<usize>>; 2] = [Vec::new(), Vec::new()];
    let mut comp_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    let translate = |from: usize, to: usize, e: Elem| -> Elem {
        match (from, to) {
            (0, 1) => map[0][e].expect("P element"),
            (1, 0) => map[1][e].expect("P element"),
            _ => e,
        }
    };
    let mut buckets: HashMap<(usize, Vec<Elem>), Vec<usize>> = HashMap::new();
    for side in 0..2 {
        for c in 0..sides[side].comps.len() {
            let st = &sides[side];
            let tp: Vec<Elem> = st.touched_p(c);
            let mut common: Vec<Elem> = tp.iter().map(|e| to_common(side, *e)).collect();
            common.sort_unstable();
            let mut dom = tp.clone();
            dom.extend(st.comps[c].iter().copied());
            dom.sort_unstable();
            let sub = st.s.induced(&dom);
            let bucket = buckets.entry((st.comps[c].len(), common)).or_default();
            let mut found = None;
            for &r in bucket.iter() {
                let (rs, rc) = reps[r];
                let rst = &sides[rs];
                let mut rdom = rst.touched_p(rc);
                rdom.extend(rst.comps[rc].iter().copied());
                rdom.sort_unstable();
                if rdom.len() != dom.len() {
                    continue;
                }
                let rsub = rst.s.induced(&rdom);
                let fixed: Vec<Option<Elem>> = dom
                    .iter()
                    .map(|e| {
                        st.is_p[*e].then(|| {
                            let t = translate(side, rs, *e);
                            rdom.binary_search(&t).unwrap_or(usize::MAX)
                        })
                    })
                    .collect();
                if fixed.contains(&Some(usize::MAX)) {
                    continue;
                }
                if let Some(m) = Matcher::new(&sub, &rsub).first(&fixed) {
                    let pos: Vec<usize> = st.comps[c]
                        .iter()
                        .map(|e| {
                            let img = rdom[m.map[dom.binary_search(e).expect("in domain")]];
                            rst.comps[rc]
                                .iter()
                                .position(|x| *x == img)
                                .expect("in component")
                        })
                        .collect();
                    found = Some((r, pos));
                    break;
                }
            }
            let (class, pos) = match found {
                Some(f) => f,
                None => {
                    reps.push((side, c));
                    bucket.push(reps.len() - 1);
                    (reps.len() - 1, (0..sides[side].comps[c].len()).collect())
                }
            };
            comp_class[side].push(class);
            comp_iso[side].push(pos);
        }
    }
    for side in 0..2 {
        for c in 0..sides[side].comps.len() {
            for (i, e) in sides[side].comps[c].clone().into_iter().enumerate() {
                sides[side].key[e] = (comp_class[side][c], comp_iso[side][c][i]);
            }
        }
    }
    let counts = |side: usize| {
        let mut m: BTreeMap<usize, usize> = BTreeMap::new();
        for c in &comp_class[side] {
            *m.entry(*c).or_default() += 1;
        }
        m
    };
    let isomorphic = counts(0) == counts(1);
    let mut matching: Vec<(String, String)> = p1
        .iter()
        .enumerate()
        .map(|(i, e)| (u1.name(*e).to_string(), u2.name(p2[iso[i]]).to_string()))
        .collect();
    let q_sizes = (sides[0].q.len(), sides[1].q.len());
    let ncomp = (sides[0].comps.len(), sides[1].comps.len());
    let touched = [vec![0; ncomp.0], vec![0; ncomp.1]];
    let mut game = Game {
        sides,
        map,
        touched,
    };
    let mut trace = Vec::new();
    let verdict = match game.challenger_wins(depth) {
        None => {
            if isomorphic {
                matching.extend(game.full_isomorphism());
            } else {
                matching.extend(game.canonical_play(depth));
            }
            Verdict::Pass
        }
        Some(steps) => {
            let mut last = String::new();
            for (round, st) in steps.iter().enumerate() {
                let s = &game.sides[st.side];
                let other = &game.sides[1 - st.side];
                let line = match st.answer {
                    Some(y) => format!(
                        "round {}: challenger picks {} in {}, answered by {} in {}",
                        round + 1,
                        s.s.name(st.x),
                        SIDE[st.side],
                        other.s.name(y),
                        SIDE[1 - st.side]
                    ),
                    None => {
                        last = format!(
                            "{} in {} has no counterpart in {}",
                            s.s.name(st.x),
                            SIDE[st.side],
                            SIDE[1 - st.side]
                        );
                        format!(
                            "round {}: challenger picks {} in {}, no answer in {}",
                            round + 1,
                            s.s.name(st.x),
                            SIDE[st.side],
                            SIDE[1 - st.side]
                        )
                    }
                };
                trace.push(line);
            }
            Verdict::Fail(Witness::new(last))
        }
    };
    Ok(BackForthReport {
        depth,
        p_size: p1.len(),
        q_sizes,
        components: ncomp,
        isomorphic,
        matching,
        trace,
        verdict,
    })
}

impl Game<'_> {
    fn consistent(&self, side: usize, x: Elem, y: Elem) -> bool {
        let (s, t) = (&self.sides[side], &self.sides[1 - side]);
        if s.sig[x] != t.sig[y] {
            return false;
        }
        let fwd = &self.map[side];
        let bwd = &self.map[1 - side];
        let img = |e: Elem, m: &Vec<Option<Elem>>, from: Elem, to: Elem| {
            if e == from {
                Some(to)
            } else {
                m[e]
            }
        };
        for (r, tup) in &s.inc[x] {
            let im: Option<Vec<Elem>> = tup.iter().map(|e| img(*e, fwd, x, y)).collect();
            if let Some(im) = im {
                if !t.s.holds(*r, &im) {
                    return false;
                }
            }
        }
        for (r, tup) in &t.inc[y] {
            let im: Option<Vec<Elem>> = tup.iter().map(|e| img(*e, bwd, y, x)).collect();
            if let Some(im) = im {
                if !s.s.holds(*r, &im) {
                    return false;
                }
            }
        }
        true
    }

    /// Unmapped Q-elements, one per position class among untouched components.
    fn free_choices(&self, side: usize, pool: &[Elem]) -> Vec<Elem> {
        let st = &self.sides[side];
        let mut seen = std::collections::HashSet::new();
        pool.iter()
            .copied()
            .filter(|e| self.map[side][*e].is_none())
            .filter(|e| self.touched[side][st.comp_of[*e]] > 0 || seen.insert(st.key[*e]))
            .collect()
    }

    fn push(&mut self, side: usize, x: Elem, y: Elem) {
        self.map[side][x] = Some(y);
        self.map[1 - side][y] = Some(x);
        let cx = self.sides[side].comp_of[x];
        let cy = self.sides[1 - side].comp_of[y];
        self.touched[side][cx] += 1;
        self.touched[1 - side][cy] += 1;
    }

    fn pop(&mut self, side: usize, x: Elem, y: Elem) {
        self.map[side][x] = None;
        self.map[1 - side][y] = None;
        let cx = self.sides[side].comp_of[x];
        let cy = self.sides[1 - side].comp_of[y];
        self.touched[side][cx] -= 1;
        self.touched[1 - side][cy] -= 1;
    }

    fn answers(&self, side: usize, x: Elem) -> Vec<Elem> {
        let t = &self.sides[1 - side];
        let pool = t
            .by_sig
            .get(&self.sides[side].sig[x])
            .cloned()
            .unwrap_or_default();
        self.free_choices(1 - side, &pool)
            .into_iter()
            .filter(|y| self.consistent(side, x, *y))
            .collect()
    }

    fn challenger_wins(&mut self, left: usize) -> Option<Vec<Step>> {
        if left == 0 {
            return None;
        }
        for side in 0..2 {
            let q = self.sides[side].q.clone();
            for x in self.free_choices(side, &q) {
                if let Err(steps) = self.respond(side, x, left) {
                    return Some(steps);
                }
            }
        }
        None
    }

    fn respond(
        &mut self,
        side: usize,
        x: Elem,
        left: usize,
    ) -> std::result::Result<Elem, Vec<Step>> {
        let mut lost: Option<(Elem, Vec<Step>)> = None;
        for y in self.answers(side, x) {
            self.push(side, x, y);
            let r = self.challenger_wins(left - 1);
            self.pop(side, x, y);
            match r {
                None => return Ok(y),
                Some(t) => {
                    if lost.is_none() {
                        lost = Some((y, t));
                    }
                }
            }
        }
        let mut steps = Vec::new();
        match lost {
            None => steps.push(Step {
                side,
                x,
                answer: None,
            }),
            Some((y, rest)) => {
                steps.push(Step {
                    side,
                    x,
                    answer: Some(y),
                });
                steps.extend(rest);
            }
        }
        Err(steps)
    }

    /// Pairs of one play won by the answering side: the challenger alternates
    /// sides and picks the first unmatched Q-element.
    fn canonical_play(&mut self, depth: usize) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for round in 0..depth {
            let mut side = round % 2;
            let mut pick = self.sides[side]
                .q
                .iter()
                .copied()
                .find(|e| self.map[side][*e].is_none());
            if pick.is_none() {
                side = 1 - side;
                pick = self.sides[side]
                    .q
                    .iter()
                    .copied()
                    .find(|e| self.map[side][*e].is_none());
            }
            let Some(x) = pick else { break };
            let Ok(y) = self.respond(side, x, depth - round) else {
                break;
            };
            self.push(side, x, y);
            let (a, b) = if side == 0 { (x, y) } else { (y, x) };
            out.push((
                self.sides[0].s.name(a).to_string(),
                self.sides[1].s.name(b).to_string(),
            ));
        }
        out
    }

    /// Pair components class by class and map positions through the class representative.
    fn full_isomorphism(&self) -> Vec<(String, String)> {
        let mut pool: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let (a, b) = (&self.sides[0], &self.sides[1]);
        for c in 0..b.comps.len() {
            pool.entry(b.key[b.comps[c][0]].0).or_default().push(c);
        }
        for v in pool.values_mut() {
            v.reverse();
        }
        let mut out = Vec::new();
        for c in 0..a.comps.len() {
            let class = a.key[a.comps[c][0]].0;
            let d = pool
                .get_mut(&class)
                .and_then(|v| v.pop())
                .expect("isomorphic");
            for &x in &a.comps[c] {
                let pos = a.key[x].1;
                let y = *b.comps[d]
                    .iter()
                    .find(|y| b.key[**y].1 == pos)
                    .expect("same position");
                out.push((a.s.name(x).to_string(), b.s.name(y).to_string()));
            }
        }
        out
    }
}
