use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::class::{search_amalgam, AgeClass, Amalgam};
use crate::error::{Error, Result};
use crate::report::{verdict_line, Report, Summary, Verdict, Witness};
use crate::structure::{
    canonical_structure, enumerate_embeddings, CanonKey, Morphism, Structure, DEFAULT_CANDIDATE_CAP,
};

/// Members of size exactly `n`, one per isomorphism class, in canonical key order.
pub fn enumerate_age(k: &(impl AgeClass + ?Sized), n: usize, cap: u64) -> Result<Vec<Structure>> {
    Ok(enumerate_age_upto(k, n, cap)?.pop().unwrap_or_default())
}

/// Members of every size `0..=n`; entry `i` lists size `i`.
pub fn enumerate_age_upto(
    k: &(impl AgeClass + ?Sized),
    n: usize,
    cap: u64,
) -> Result<Vec<Vec<Structure>>> {
    let empty = Structure::empty(k.vocabulary().clone());
    let mut levels = Vec::with_capacity(n + 1);
    let mut level: Vec<Structure> = if k.contains(&empty) {
        vec![empty]
    } else {
        Vec::new()
    };
    let mut seen: u64 = 0;
    for size in 0..=n {
        if size > 0 {
            let mut next: BTreeMap<CanonKey, Structure> = BTreeMap::new();
            for s in &level {
                for t in k.extensions(s, cap)? {
                    seen += 1;
                    if seen > cap {
                        return Err(Error::cap("age enumeration candidates", cap));
                    }
                    let (key, c) = canonical_structure(&t);
                    next.entry(key).or_insert(c);
                }
            }
            level = next.into_values().collect();
        }
        if let Some(b) = k.member_bound(size) {
            if level.len() as u64 > b {
                return Err(Error::Invalid(format!(
                    "{} has {} members of size {size}, above its declared bound {b}",
                    k.name(),
                    level.len()
                )));
            }
        }
        levels.push(level.clone());
    }
    Ok(levels)
}

/// Which amalgamation problems a property check covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Every `C`, `D1`, `D2` of size at most the bound and every pair of embeddings.
    Factors,
    /// One-point problems (`|D_i| = |C| + 1`) whose free amalgam has size at most
    /// the bound; joint embedding for pairs of total size at most the bound.
    OnePoint,
}

impl Scope {
    pub fn name(self) -> &'static str {
        match self {
            Scope::Factors => "factors",
            Scope::OnePoint => "one-point",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub scope: Scope,
    /// Candidate cap for exhaustive amalgam search.
    pub amalgam_cap: u64,
    /// Candidate cap for age enumeration.
    pub enumeration_cap: u64,
    /// Extra random one-point problems over members of size `bound - 1`.
    pub samples: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            scope: Scope::Factors,
            amalgam_cap: 1 << 20,
            enumeration_cap: DEFAULT_CANDIDATE_CAP,
            samples: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassReport {
    pub class: String,
    pub bound: usize,
    pub scope: Scope,
    pub strategy: String,
    pub hp: Verdict,
    pub jep: Verdict,
    pub ap: Verdict,
    pub members: Vec<usize>,
    pub problems: u64,
    pub by_strategy: u64,
    pub by_search: u64,
    pub sampled: u64,
}

impl Report for ClassReport {
    fn summary(&self) -> Summary {
        let mut s = Summary::new();
        s.push("class", &self.class)
            .push("bound", self.bound)
            .push("scope", self.scope.name())
            .push("strategy", &self.strategy)
            .push(
                "members",
                self.members
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            )
            .push("hp", self.hp.word())
            .push("jep", self.jep.word())
            .push("ap", self.ap.word())
            .push("problems", self.problems)
            .push("amalgams_by_strategy", self.by_strategy)
            .push("amalgams_by_search", self.by_search)
            .push("sampled", self.sampled)
            .push("verdict", self.overall().word());
        s
    }

    fn body(&self) -> String {
        let mut out = format!(
            "class {} at bound {} ({} scope, strategy {})\n",
            self.class,
            self.bound,
            self.scope.name(),
            self.strategy
        );
        verdict_line(&mut out, "HP", &self.hp);
        verdict_line(&mut out, "JEP", &self.jep);
        verdict_line(&mut out, "AP", &self.ap);
        let _ = writeln!(out, "amalgamation problems checked: {}", self.problems);
        out
    }

    fn passed(&self) -> bool {
        self.overall().is_pass()
    }
}

impl ClassReport {
    pub fn overall(&self) -> Verdict {
        self.hp.clone().and(self.jep.clone()).and(self.ap.clone())
    }
}

struct Tally {
    problems: u64,
    by_strategy: u64,
    by_search: u64,
}

/// Solve one problem; `Ok(Err(w))` is a failure witness.
#[allow(clippy::too_many_arguments)]
fn solve(
    k: &(impl AgeClass + ?Sized),
    c: &Structure,
    d1: &Structure,
    f1: &Morphism,
    d2: &Structure,
    f2: &Morphism,
    cap: u64,
    tally: &mut Tally,
) -> Result<std::result::Result<Amalgam, Witness>> {
    tally.problems += 1;
    let witness = |why: &str| {
        if c.size() == 0 {
            return Witness::new(format!("{why}; no joint embedding"))
                .with("D1", d1)
                .with("D2", d2);
        }
        Witness::new(format!(
            "{why}; C -> D1 by {:?}, C -> D2 by {:?}",
            f1.map, f2.map
        ))
        .with("C", c)
        .with("D1", d1)
        .with("D2", d2)
    };
    let proposed = match k.amalgamate(c, d1, f1, d2, f2) {
        Ok(a) => a,
        Err(Error::Strategy(_)) => None,
        Err(e) => return Err(e),
    };
    let by_strategy =
        proposed.filter(|a| k.contains(&a.structure) && a.is_valid(d1, d2) && a.commutes(f1, f2));
    let found = match by_strategy {
        Some(a) => {
            tally.by_strategy += 1;
            Some(a)
        }
        None => {
            let a = search_amalgam(k, d1, f1, d2, f2, cap)?;
            if a.is_some() {
                tally.by_search += 1;
            }
            a
        }
    };
    match found {
        None => Ok(Err(witness("no amalgam exists"))),
        Some(a) => match k.audit_amalgam(&a, c, d1, d2) {
            Ok(()) => Ok(Ok(a)),
            Err(why) => Ok(Err(
                witness(&format!("amalgam audit failed: {why}")).with("E", &a.structure)
            )),
        },
    }
}

fn guard(
    r: Result<std::result::Result<Amalgam, Witness>>,
) -> std::result::Result<Option<Witness>, Verdict> {
    match r {
        Ok(Ok(_)) => Ok(None),
        Ok(Err(w)) => Ok(Some(w)),
        Err(Error::ResourceCap { what, limit }) => {
            Err(Verdict::Inconclusive(format!("{what} exceeded {limit}")))
        }
        Err(e) => Err(Verdict::Inconclusive(e.to_string())),
    }
}

/// Hereditary, joint embedding and amalgamation properties up to `bound`.
pub fn check_class_properties(
    k: &(impl AgeClass + ?Sized),
    bound: usize,
    opts: &CheckOptions,
) -> Result<ClassReport> {
    // One-point problems never need members of the full bound size as inputs.
    let depth = match opts.scope {
        Scope::OnePoint => bound.saturating_sub(1),
        Scope::Factors => bound,
    };
    let levels = enumerate_age_upto(k, depth, opts.enumeration_cap)?;
    let mut tally = Tally {
        problems: 0,
        by_strategy: 0,
        by_search: 0,
    };
    let hp = check_hp(k, &levels);
    let empty = Structure::empty(k.vocabulary().clone());
    let none = Morphism::new(Vec::new());

    let mut jep = Verdict::Pass;
    'jep: for sa in 1..=bound {
        for sb in sa..=bound {
            if opts.scope == Scope::OnePoint && sa + sb > bound {
                continue;
            }
            for (i, a) in levels[sa].iter().enumerate() {
                let start = if sa == sb { i } else { 0 };
                for b in &levels[sb][start..] {
                    match guard(solve(
                        k,
                        &empty,
                        a,
                        &none,
                        b,
                        &none,
                        opts.amalgam_cap,
                        &mut tally,
                    )) {
                        Ok(None) => {}
                        Ok(Some(mut w)) => {
                            w.description = format!("no joint embedding: {}", w.description);
                            jep = Verdict::Fail(w);
                            break 'jep;
                        }
                        Err(v) => {
                            jep = v;
                            break 'jep;
                        }
                    }
                }
            }
        }
    }

    let mut ap = Verdict::Pass;
    let mut sampled = 0;
    match opts.scope {
        Scope::OnePoint => {
            'ap: for cs in 0..bound.saturating_sub(1) {
                for c in &levels[cs] {
                    let exts = k.extensions(c, opts.enumeration_cap)?;
                    let incl = Morphism::identity(cs);
                    for (i, d1) in exts.iter().enumerate() {
                        for d2 in &exts[i..] {
                            match guard(solve(
                                k,
                                c,
                                d1,
                                &incl,
                                d2,
                                &incl,
                                opts.amalgam_cap,
                                &mut tally,
                            )) {
                                Ok(None) => {}
                                Ok(Some(w)) => {
                                    ap = Verdict::Fail(w);
                                    break 'ap;
                                }
                                Err(v) => {
                                    ap = v;
                                    break 'ap;
                                }
                            }
                        }
                    }
                }
            }
            if ap.is_pass() && opts.samples > 0 && bound >= 1 {
                let pool = &levels[bound - 1];
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                for _ in 0..opts.samples {
                    if pool.is_empty() {
                        break;
                    }
                    let c = &pool[rng.gen_range(0..pool.len())];
                    let (Some(d1), Some(d2)) = (
                        k.random_extension(c, &mut rng),
                        k.random_extension(c, &mut rng),
                    ) else {
                        continue;
                    };
                    sampled += 1;
                    let incl = Morphism::identity(c.size());
                    match guard(solve(
                        k,
                        c,
                        &d1,
                        &incl,
                        &d2,
                        &incl,
                        opts.amalgam_cap,
                        &mut tally,
                    )) {
                        Ok(None) => {}
                        Ok(Some(w)) => {
                            ap = Verdict::Fail(w);
                            break;
                        }
                        Err(v) => {
                            ap = v;
                            break;
                        }
                    }
                }
            }
        }
        Scope::Factors => {
            'apf: for cs in 0..=bound {
                for c in &levels[cs] {
                    let ds: Vec<&Structure> = levels.iter().skip(cs + 1).flatten().collect();
                    let embs = ds
                        .iter()
                        .map(|d| enumerate_embeddings(c, d, false))
                        .collect::<Result<Vec<_>>>()?;
                    for i in 0..ds.len() {
                        for j in i..ds.len() {
                            // Composing f1 with automorphisms of D1 gives equivalent
                            // problems, so f1 ranges over orbit representatives.
                            let reps = orbit_representatives(ds[i], &embs[i])?;
                            for f1 in &reps {
                                for f2 in &embs[j] {
                                    match guard(solve(
                                        k,
                                        c,
                                        ds[i],
                                        f1,
                                        ds[j],
                                        f2,
                                        opts.amalgam_cap,
                                        &mut tally,
                                    )) {
                                        Ok(None) => {}
                                        Ok(Some(w)) => {
                                            ap = Verdict::Fail(w);
                                            break 'apf;
                                        }
                                        Err(v) => {
                                            ap = v;
                                            break 'apf;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(ClassReport {
        class: k.name().to_string(),
        bound,
        scope: opts.scope,
        strategy: k.strategy().to_string(),
        hp,
        jep,
        ap,
        members: levels.iter().map(Vec::len).collect(),
        problems: tally.problems,
        by_strategy: tally.by_strategy,
        by_search: tally.by_search,
        sampled,
    })
}

/// Embeddings `C -> D` up to composition with automorphisms of `D`.
fn orbit_representatives(d: &Structure, embs: &[Morphism]) -> Result<Vec<Morphism>> {
    if embs.len() <= 1 {
        return Ok(embs.to_vec());
    }
    let autos = enumerate_embeddings(d, d, true)?;
    let mut reps: Vec<Morphism> = Vec::new();
    let mut covered = std::collections::BTreeSet::new();
    for f in embs {
        if covered.contains(f) {
            continue;
        }
        for g in &autos {
            covered.insert(f.compose(g));
        }
        reps.push(f.clone());
    }
    Ok(reps)
}

fn check_hp(k: &(impl AgeClass + ?Sized), levels: &[Vec<Structure>]) -> Verdict {
    for level in levels {
        for m in level {
            for x in 0..m.size() {
                let keep: Vec<usize> = (0..m.size()).filter(|y| *y != x).collect();
                let sub = m.induced(&keep);
                if !k.contains(&sub) {
                    return Verdict::Fail(
                        Witness::new(format!("removing {} leaves a non-member", m.name(x)))
                            .with("member", m)
                            .with("substructure", &sub),
                    );
                }
            }
        }
    }
    Verdict::Pass
}
