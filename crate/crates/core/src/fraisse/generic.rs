use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::ops::ControlFlow;

use super::check::enumerate_age_upto;
use super::class::{search_amalgam, AgeClass};
use crate::error::{Error, Result};
use crate::logic::{qf_type, QfType};
use crate::report::{Report, Summary, Verdict, Witness};
use crate::structure::{
    canonical_form, CanonKey, Elem, Matcher, Morphism, Structure, Tuple, TupleIter,
    DEFAULT_CANDIDATE_CAP,
};

/// A one-point extension demand: every copy of `a` must extend to a copy of `b`,
/// where `a` is `b` minus its last element.
#[derive(Debug, Clone)]
pub struct Demand {
    pub a: Structure,
    pub b: Structure,
    pub a_key: CanonKey,
    pub b_key: CanonKey,
    /// Description of the new point over `a`, up to automorphisms of `a`.
    pub marker: Vec<u8>,
}

impl Demand {
    pub fn describe(&self) -> String {
        format!("extend {} to {}", self.a_key, self.b_key)
    }
}

/// All one-point demands with `|B| <= level`, ordered by (key of B, key of A, marker).
pub fn demands(k: &(impl AgeClass + ?Sized), level: usize, cap: u64) -> Result<Vec<Demand>> {
    if level == 0 {
        return Ok(Vec::new());
    }
    let levels = enumerate_age_upto(k, level - 1, cap)?;
    let mut out = Vec::new();
    let mut seen: HashSet<(CanonKey, CanonKey, Vec<u8>)> = HashSet::new();
    for level in &levels {
        for a in level {
            let a_key = canonical_form(a);
            for b in k.extensions(a, cap)? {
                let b_key = canonical_form(&b);
                let (marker, b) = canonical_extension(a, &b);
                if seen.insert((a_key.clone(), b_key.clone(), marker.clone())) {
                    out.push(Demand {
                        a: a.clone(),
                        b,
                        a_key: a_key.clone(),
                        b_key,
                        marker,
                    });
                }
            }
        }
    }
    out.sort_by(|x, y| (&x.b_key, &x.a_key, &x.marker).cmp(&(&y.b_key, &y.a_key, &y.marker)));
    Ok(out)
}

/// `b` with the new point's atoms moved by the automorphism of `a` that makes
/// them least, and that least description. Extensions related by an automorphism
/// of `a` pose the same demand and get the same result.
pub fn canonical_extension(a: &Structure, b: &Structure) -> (Vec<u8>, Structure) {
    let n = a.size();
    let mut autos: Vec<Vec<Elem>> = Vec::new();
    Matcher::new(a, a).for_each(&[], |m| {
        autos.push(m.to_vec());
        ControlFlow::Continue(())
    });
    let mut best: Option<(Vec<u8>, Vec<(usize, Tuple)>)> = None;
    for g in autos {
        let mut map: Vec<Elem> = g;
        map.push(n);
        let mut atoms: Vec<(usize, Tuple)> = Vec::new();
        for r in 0..b.vocab().len() {
            for t in b.relation(r) {
                if t.contains(&n) {
                    atoms.push((r, t.iter().map(|x| map[*x]).collect()));
                }
            }
        }
        atoms.sort();
        let mut bytes = Vec::new();
        for (r, t) in &atoms {
            bytes.extend((*r as u32).to_be_bytes());
            for x in t {
                bytes.extend((*x as u32).to_be_bytes());
            }
            bytes.push(255);
        }
        if best.as_ref().is_none_or(|(b, _)| bytes < *b) {
            best = Some((bytes, atoms));
        }
    }
    let (bytes, atoms) = best.expect("the identity is an automorphism");
    let mut rels: Vec<BTreeSet<Tuple>> = a.relations().to_vec();
    for (r, t) in atoms {
        rels[r].insert(t);
    }
    let mut names = a.names().to_vec();
    names.push(b.name(n).to_string());
    (
        bytes,
        Structure::from_parts_unchecked(b.vocab().clone(), names, rels),
    )
}

/// Whether the copy of `d.a` given by `f` extends to a copy of `d.b` in `m`.
fn satisfied(d: &Demand, m: &Structure, f: &[Elem]) -> bool {
    let mut fixed: Vec<Option<Elem>> = f.iter().map(|x| Some(*x)).collect();
    fixed.push(None);
    Matcher::new(&d.b, m).first(&fixed).is_some()
}

#[derive(Debug, Clone)]
pub struct GenericOptions {
    pub size_cap: usize,
    pub enumeration_cap: u64,
    pub amalgam_cap: u64,
    /// Demand indices (in demand order) that are never acted on.
    pub skip: Vec<usize>,
    /// Start from this member instead of the empty structure.
    pub seed_structure: Option<Structure>,
}

impl Default for GenericOptions {
    fn default() -> Self {
        GenericOptions {
            size_cap: 64,
            enumeration_cap: DEFAULT_CANDIDATE_CAP,
            amalgam_cap: 1 << 20,
            skip: Vec::new(),
            seed_structure: None,
        }
    }
}

/// A finite member with the level-k extension property, or the best partial
/// attempt with its unmet demands.
#[derive(Debug, Clone)]
pub struct GenericApproximation {
    pub class: String,
    pub structure: Structure,
    pub level: usize,
    /// One entry per added element: the demand index and its description.
    pub log: Vec<(usize, String)>,
    pub unsaturated: bool,
    pub unmet: Vec<String>,
}

impl Report for GenericApproximation {
    fn summary(&self) -> Summary {
        let mut s = Summary::new();
        s.push("class", &self.class)
            .push("level", self.level)
            .push("size", self.structure.size())
            .push("steps", self.log.len())
            .push("saturated", !self.unsaturated)
            .push("unmet", self.unmet.len())
            .push("verdict", if self.unsaturated { "fail" } else { "pass" });
        s
    }

    fn body(&self) -> String {
        let mut out = format!(
            "level-{} approximation of {} with {} elements{}\n",
            self.level,
            self.class,
            self.structure.size(),
            if self.unsaturated {
                " (unsaturated)"
            } else {
                ""
            }
        );
        for (i, (d, what)) in self.log.iter().enumerate() {
            let _ = writeln!(out, "step {}: demand {d}: {what}", i + 1);
        }
        for u in &self.unmet {
            let _ = writeln!(out, "unmet: {u}");
        }
        out
    }

    fn passed(&self) -> bool {
        !self.unsaturated
    }
}

/// Close under one-point demands in canonical order, adding witnesses with the
/// class's amalgamation strategy, then re-check exhaustively.
pub fn build_generic_approx(
    k: &(impl AgeClass + ?Sized),
    level: usize,
    opts: &GenericOptions,
) -> Result<GenericApproximation> {
    let ds = demands(k, level, opts.enumeration_cap)?;
    let mut m = match &opts.seed_structure {
        Some(s) => {
            if !k.contains(s) {
                return Err(Error::Invalid("seed structure is not a member".into()));
            }
            s.clone()
        }
        None => Structure::empty(k.vocabulary().clone()),
    }
    .with_default_names();
    let mut log = Vec::new();
    let mut capped = false;
    loop {
        let mut changed = false;
        for (di, d) in ds.iter().enumerate() {
            if opts.skip.contains(&di) {
                continue;
            }
            let mut embs: Vec<Vec<Elem>> = Vec::new();
            Matcher::new(&d.a, &m).for_each(&[], |f| {
                embs.push(f.to_vec());
                ControlFlow::Continue(())
            });
            embs.sort();
            for f in embs {
                if satisfied(d, &m, &f) {
                    continue;
                }
                if m.size() >= opts.size_cap {
                    capped = true;
                    continue;
                }
                let f1 = Morphism::new(f.clone());
                let f2 = Morphism::identity(d.a.size());
                let proposed = match k.amalgamate(&d.a, &m, &f1, &d.b, &f2) {
                    Ok(a) => a,
                    Err(Error::Strategy(_)) => None,
                    Err(e) => return Err(e),
                };
                let am = match proposed.filter(|a| {
                    k.contains(&a.structure) && a.is_valid(&m, &d.b) && a.commutes(&f1, &f2)
                }) {
                    Some(a) => a,
                    None => search_amalgam(k, &m, &f1, &d.b, &f2, opts.amalgam_cap)?.ok_or_else(
                        || Error::Strategy(format!("no amalgam for {}", d.describe())),
                    )?,
                };
                let next = if am.left == Morphism::identity(m.size()) {
                    am.structure
                } else {
                    let mut order = am.left.map.clone();
                    order.extend((0..am.structure.size()).filter(|x| !am.left.map.contains(x)));
                    am.structure.reorder(&order)
                }
                .with_default_names();
                let names: Vec<&str> = f.iter().map(|x| m.name(*x)).collect();
                log.push((
                    di,
                    format!(
                        "{} over ({}) -> size {}",
                        d.describe(),
                        names.join(","),
                        next.size()
                    ),
                ));
                m = next;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let unmet = unmet_demands(&ds, &m, &opts.skip, 32);
    let unsaturated = capped || !unmet.is_empty();
    Ok(GenericApproximation {
        class: k.name().to_string(),
        structure: m,
        level,
        log,
        unsaturated,
        unmet,
    })
}

/// Unmet demands among `ds` (skipping none of `ignored` unless listed), at most `limit`.
fn unmet_demands(ds: &[Demand], m: &Structure, _ignored: &[usize], limit: usize) -> Vec<String> {
    let mut out = Vec::new();
    for d in ds {
        Matcher::new(&d.a, m).for_each(&[], |f| {
            if !satisfied(d, m, f) {
                let names: Vec<&str> = f.iter().map(|x| m.name(*x)).collect();
                out.push(format!("{} over ({})", d.describe(), names.join(",")));
            }
            if out.len() >= limit {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if out.len() >= limit {
            break;
        }
    }
    out
}

/// Exhaustive check of the level-k extension property of `m` relative to `k`.
pub fn has_extension_property(
    k: &(impl AgeClass + ?Sized),
    m: &Structure,
    level: usize,
    cap: u64,
) -> Result<Vec<String>> {
    let ds = demands(k, level, cap)?;
    Ok(unmet_demands(&ds, m, &[], usize::MAX))
}

#[derive(Debug, Clone)]
pub struct HomogeneityReport {
    pub class: String,
    pub size: usize,
    pub s: usize,
    pub partial_isos: u64,
    pub verdict: Verdict,
}

impl Report for HomogeneityReport {
    fn summary(&self) -> Summary {
        let mut s = Summary::new();
        s.push("class", &self.class)
            .push("size", self.size)
            .push("s", self.s)
            .push("partial_isomorphisms", self.partial_isos)
            .push("verdict", self.verdict.word());
        s
    }

    fn body(&self) -> String {
        let mut out = format!(
            "one-point back-and-forth for partial isomorphisms of size < {} in a structure of size {}\n",
            self.s, self.size
        );
        crate::report::verdict_line(&mut out, "homogeneity", &self.verdict);
        out
    }

    fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

/// Every partial isomorphism between substructures of size `< s` extends by one
/// point in either direction, and every tuple of length `< s` realises every
/// one-point extension its substructure has in the class.
pub fn check_homogeneity_level(
    k: &(impl AgeClass + ?Sized),
    u: &Structure,
    s: usize,
    cap: u64,
) -> Result<HomogeneityReport> {
    let n = u.size();
    let mut checked = 0u64;
    let mut verdict = Verdict::Pass;
    let fail = |msg: String| Verdict::Fail(Witness::new(msg).with("U", u));
    'outer: for len in 0..s {
        let tuples: Vec<Vec<Elem>> = TupleIter::new(n, len).filter(|t| distinct(t)).collect();
        if len as u64 > 0 && tuples.len() as u64 > cap {
            return Err(Error::cap("tuples in homogeneity check", cap));
        }
        // Richness: every one-point extension type in the class is realised.
        for t in tuples.iter().filter(|t| t.windows(2).all(|w| w[0] < w[1])) {
            let sub = u.induced(t);
            for b in k.extensions(&sub, cap)? {
                let mut fixed: Vec<Option<Elem>> = t.iter().map(|x| Some(*x)).collect();
                fixed.push(None);
                if Matcher::new(&b, u).first(&fixed).is_none() {
                    verdict = fail(format!(
                        "({}) lacks a one-point extension realised in the class: {}",
                        names(u, t),
                        canonical_form(&b)
                    ));
                    break 'outer;
                }
            }
        }
        // Back and forth.
        let types: Vec<QfType> = tuples
            .iter()
            .map(|t| qf_type(u, t))
            .collect::<Result<_>>()?;
        for (i, a) in tuples.iter().enumerate() {
            for (j, b) in tuples.iter().enumerate() {
                if types[i] != types[j] {
                    continue;
                }
                checked += 1;
                for c in 0..n {
                    if a.contains(&c) {
                        continue;
                    }
                    let mut ac = a.clone();
                    ac.push(c);
                    let want = qf_type(u, &ac)?;
                    let ok = (0..n).filter(|d| !b.contains(d)).any(|d| {
                        let mut bd = b.clone();
                        bd.push(d);
                        qf_type(u, &bd).map(|t| t == want).unwrap_or(false)
                    });
                    if !ok {
                        verdict = fail(format!(
                            "({}) -> ({}) does not extend to {}",
                            names(u, a),
                            names(u, b),
                            u.name(c)
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(HomogeneityReport {
        class: k.name().to_string(),
        size: n,
        s,
        partial_isos: checked,
        verdict,
    })
}

fn distinct(t: &[Elem]) -> bool {
    t.iter().enumerate().all(|(i, x)| !t[..i].contains(x))
}

fn names(u: &Structure, t: &[Elem]) -> String {
    t.iter().map(|x| u.name(*x)).collect::<Vec<_>>().join(",")
}
