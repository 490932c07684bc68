//! End-to-end acceptance suite: one pass/fail line per criterion.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use fraisse_core::axioms::{generate_axioms, verify_model_of, AxiomBudget};
use fraisse_core::encoder::{decode, encode, EncodedClass, Encoding};
use fraisse_core::fraisse::{
    build_generic_approx, builtin_class, check_class_properties, enumerate_age_upto, type_count,
    AgeClass, CheckOptions, ExcludeMember, GenericOptions, Scope,
};
use fraisse_core::gadget::{
    build_gadget_class, categoricity_verdict, compute_d, count_sort_types, decode_pair,
    layer_bound, sort_rendering, ArityFunction, EnumerationTable,
};
use fraisse_core::layered::{
    back_and_forth_over_p, build_layered_presentation, check_layer_agreement,
    compare_layer_classes, constants_example, LayerOptions, LayerPresentation, SortBounded,
};
use fraisse_core::logic::EvalOptions;
use fraisse_core::report::{Format, Report};
use fraisse_core::structure::{canonical_form, Tuple, TupleIter};
use fraisse_core::{Structure, Vocabulary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: u64 = 1 << 22;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1. Round trip.

fn instances(v: &Vocabulary, n: usize) -> Vec<(usize, Tuple)> {
    (0..v.len())
        .flat_map(|k| TupleIter::new(n, v.arity(k)).map(move |t| (k, t)))
        .collect()
}

fn with_relations(v: &Arc<Vocabulary>, n: usize, t: &[(usize, Tuple)]) -> Structure {
    let names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let mut rels = vec![BTreeSet::new(); v.len()];
    for (k, tuple) in t {
        rels[*k].insert(tuple.clone());
    }
    Structure::from_parts(v.clone(), names, rels).unwrap()
}

/// Encode `a` labelling exactly `t`; the decoded relations must be `t`.
fn round_trip(enc: &Encoding, a: &Structure, t: &[(usize, Tuple)]) -> Result<(), String> {
    let labels: Vec<(usize, Tuple)> = t.iter().map(|(k, x)| (enc.index(*k), x.clone())).collect();
    let u = encode(enc, a, &labels).map_err(|e| e.to_string())?;
    let back =
        decode(enc, &u.reduct(enc).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let want = with_relations(enc.l0(), a.size(), t);
    ensure(back == want, || {
        format!("labels {t:?} over {} elements decode differently", a.size())
    })
}

fn criterion_1() -> Outcome {
    let v = Arc::new(Vocabulary::new([("R1", 1), ("R2", 2), ("R3", 3)]).unwrap());
    let enc = Encoding::new(v.clone()).unwrap();
    let mut checked = 0u64;
    // Every label set over at most two elements, on the structure carrying
    // exactly the labels and on the full structure.
    for n in 0..=2 {
        let inst = instances(&v, n);
        let full = with_relations(&v, n, &inst);
        for mask in 0u64..1 << inst.len() {
            let t: Vec<_> = (0..inst.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| inst[i].clone())
                .collect();
            round_trip(&enc, &with_relations(&v, n, &t), &t)?;
            round_trip(&enc, &full, &t)?;
            checked += 2;
        }
    }
    // Every label set of bounded size over three and four elements.
    for (n, max) in [(3usize, 3usize), (4, 2)] {
        let inst = instances(&v, n);
        let full = with_relations(&v, n, &inst);
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
        while let Some((start, chosen)) = stack.pop() {
            let t: Vec<_> = chosen.iter().map(|i| inst[*i].clone()).collect();
            round_trip(&enc, &full, &t)?;
            checked += 1;
            if chosen.len() < max {
                for i in start..inst.len() {
                    let mut next = chosen.clone();
                    next.push(i);
                    stack.push((i + 1, next));
                }
            }
        }
    }
    // Random label sets of any size over three and four elements.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2000 {
        let n = rng.gen_range(3..=4);
        let inst = instances(&v, n);
        let t: Vec<_> = inst.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        round_trip(&enc, &with_relations(&v, n, &t), &t)?;
        checked += 1;
    }
    Ok(format!("{checked} round trips"))
}

// 2. Encoded graphs.

fn criterion_2() -> Outcome {
    let k = EncodedClass::new(builtin_class("graphs").unwrap()).unwrap();
    let opts = CheckOptions {
        scope: Scope::OnePoint,
        samples: 40,
        seed: 11,
        ..CheckOptions::default()
    };
    let r = check_class_properties(&k, 4, &opts).map_err(|e| e.to_string())?;
    ensure(r.passed(), || r.render(Format::Full))?;
    ensure(r.by_search == 0, || {
        format!("{} problems needed search", r.by_search)
    })?;
    Ok(format!(
        "{} problems, {} by the three-case strategy, {} sampled",
        r.problems, r.by_strategy, r.sampled
    ))
}

// 3. Extension axioms on the generic graph.

fn criterion_3() -> Outcome {
    let k = builtin_class("graphs").unwrap();
    let budget = AxiomBudget::new(2).with_schemes("cd").unwrap();
    let ax = generate_axioms(k.as_ref(), &budget).map_err(|e| e.to_string())?;
    ensure(!ax.is_empty(), || "no axioms".into())?;
    let g = build_generic_approx(k.as_ref(), 2, &GenericOptions::default())
        .map_err(|e| e.to_string())?;
    let m =
        verify_model_of(&g.structure, &ax, &EvalOptions::default()).map_err(|e| e.to_string())?;
    ensure(m.passed(), || m.render(Format::Full))?;
    for skip in 0..16 {
        let opts = GenericOptions {
            skip: vec![skip],
            ..GenericOptions::default()
        };
        let broken = build_generic_approx(k.as_ref(), 2, &opts).map_err(|e| e.to_string())?;
        if !broken.unsaturated {
            continue;
        }
        let r = verify_model_of(&broken.structure, &ax, &EvalOptions::default())
            .map_err(|e| e.to_string())?;
        let failing = r
            .first_failure()
            .ok_or_else(|| format!("skipping demand {skip} breaks no axiom"))?;
        let w = r.verdict();
        let w = w.witness().ok_or("failure without witness")?;
        ensure(w.description.contains(&failing.to_line()), || {
            w.description.clone()
        })?;
        return Ok(format!(
            "{} axioms hold; without demand {skip}: {}",
            ax.len(),
            failing.to_line()
        ));
    }
    Err("no removable demand".into())
}

// 4. Type counts.

/// Equality patterns of an n-tuple, listed as restricted growth strings.
fn patterns(n: usize) -> u64 {
    fn rec(left: usize, blocks: usize) -> u64 {
        if left == 0 {
            return 1;
        }
        (0..=blocks).map(|b| rec(left - 1, blocks.max(b + 1))).sum()
    }
    rec(n, 0)
}

fn criterion_4() -> Outcome {
    let sets = builtin_class("sets").unwrap();
    let mut seen = Vec::new();
    for n in 1..=4 {
        let t = type_count(sets.as_ref(), n, CAP).map_err(|e| e.to_string())?;
        let want = patterns(n);
        ensure(t == want, || {
            format!("sets: {n}-types {t}, patterns {want}")
        })?;
        seen.push(t);
    }
    ensure(seen == [1, 2, 5, 15], || format!("{seen:?}"))?;
    let graphs = builtin_class("graphs").unwrap();
    let g2 = type_count(graphs.as_ref(), 2, CAP).map_err(|e| e.to_string())?;
    ensure(g2 == 3, || format!("graphs: 2-types {g2}"))?;
    for name in ["sets", "graphs", "orders", "equivalence"] {
        let k = builtin_class(name).unwrap();
        let counts: Vec<u64> = (1..=4)
            .map(|n| type_count(k.as_ref(), n, CAP))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        ensure(counts.windows(2).all(|w| w[0] <= w[1]), || {
            format!("{name}: {counts:?}")
        })?;
    }
    Ok(format!("sets {seen:?}, graphs(2) = {g2}"))
}

// 5. Layer agreement.

fn constants(seed: u64) -> Result<LayerPresentation, String> {
    build_layered_presentation(
        &constants_example(3),
        &LayerOptions {
            seed,
            ..LayerOptions::default()
        },
    )
    .map_err(|e| e.to_string())
}

fn criterion_5() -> Outcome {
    let p = constants(0)?;
    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
        let r = check_layer_agreement(&p, i, j, 3, CAP).map_err(|e| e.to_string())?;
        ensure(r.passed(), || {
            format!("layers {i} {j}: {}", r.render(Format::Full))
        })?;
    }
    let lower = &p.layer(1).encoded;
    let upper = &p.layer(2).encoded;
    let q = p.vocab.bound(1);
    let bounded = SortBounded::new(upper, "Q", q).map_err(|e| e.to_string())?;
    let mut preimages: std::collections::BTreeMap<_, Vec<Structure>> = Default::default();
    for level in enumerate_age_upto(&bounded, 3, CAP).map_err(|e| e.to_string())? {
        for s in level {
            let r = s
                .reduct(lower.vocabulary().clone())
                .map_err(|e| e.to_string())?;
            preimages.entry(canonical_form(&r)).or_default().push(s);
        }
    }
    let victim = preimages
        .values()
        .find(|v| v.len() == 1 && v[0].size() == 3)
        .map(|v| v[0].clone())
        .ok_or("no member to delete")?;
    let broken = ExcludeMember::new(upper, &victim);
    let r = compare_layer_classes(lower, &broken, q, 3, CAP).map_err(|e| e.to_string())?;
    let w = r.verdict.witness().ok_or("deleted member went unnoticed")?;
    ensure(!w.structures.is_empty(), || {
        "witness without structures".into()
    })?;
    Ok(format!(
        "3 layer pairs agree; deletion caught: {}",
        w.description
    ))
}

// 6. Back-and-forth over P.

fn criterion_6() -> Outcome {
    let (p1, p2) = (constants(1)?, constants(2)?);
    let mut sizes = Vec::new();
    for i in 1..=p1.len() {
        let u1 = &p1.layer(i).approximant.structure;
        let u2 = &p2.layer(i).approximant.structure;
        ensure(p1.options.level == 4, || "not level 4".into())?;
        ensure(u1 != u2, || format!("layer {i}: builds coincide"))?;
        let r = back_and_forth_over_p(u1, u2, 2, None).map_err(|e| e.to_string())?;
        ensure(r.passed(), || {
            format!("layer {i}: {}", r.render(Format::Full))
        })?;
        sizes.push(u1.size());
    }
    Ok(format!("depth 2 on layers of sizes {sizes:?}"))
}

// 7. Gadget.

fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

fn pair(i: u64, j: u64) -> u64 {
    (i + j) * (i + j + 1) / 2 + j
}

/// Codes `<n, k>` for first occurrences of `(e, n, x)` at position `k`, cut at `l_s`.
fn d_oracle(t: &EnumerationTable, e: u64, s: u64) -> BTreeSet<u64> {
    let bound = layer_bound(s);
    let mut seen = HashSet::new();
    let mut out = BTreeSet::new();
    for (k, &(te, n, x)) in t.triples.iter().enumerate() {
        if seen.insert((te, n, x)) && te == e {
            let c = pair(n, k as u64);
            if bound >= c.into() {
                out.insert(c);
            }
        }
    }
    out
}

fn recount(t: &EnumerationTable, e: u64, n: u64) -> usize {
    t.triples
        .iter()
        .filter(|x| x.0 == e && x.1 == n)
        .map(|x| x.2)
        .collect::<BTreeSet<_>>()
        .len()
}

fn criterion_7() -> Outcome {
    let mut f = ArityFunction::new();
    let primes: Vec<u64> = (2..).filter(|n| is_prime(*n)).take(64).collect();
    let (mut pa, mut pp) = (f.a(0), f.a(0) * primes[0]);
    ensure(f.prime_of(0) == primes[0], || "p_0".into())?;
    for x in 1..=1000u64 {
        let p = primes[decode_pair(x).0 as usize];
        ensure(f.prime_of(x) == p, || format!("prime of {x}"))?;
        let a = f.a(x);
        let prod = &a * p;
        ensure(a > pa && prod > pp, || format!("not increasing at {x}"))?;
        let lower = &a - 1u32;
        ensure(lower <= pa || &lower * p <= pp, || {
            format!("a({x}) is not least")
        })?;
        pa = a;
        pp = prod;
    }

    let sort0: Vec<u64> = (0..).filter(|c| decode_pair(*c).0 == 0).take(3).collect();
    for d in 0..=3usize {
        let codes: BTreeSet<u64> = sort0[..d].iter().copied().collect();
        let m = codes.iter().max().copied().unwrap_or(0);
        let g = build_gadget_class(&codes, m).map_err(|e| e.to_string())?;
        let counted = count_sort_types(&g, 0).map_err(|e| e.to_string())?;
        let rendered = type_count(&sort_rendering(&g, 0).map_err(|e| e.to_string())?, 1, CAP)
            .map_err(|e| e.to_string())?;
        ensure(counted == 1 << d && rendered == counted, || {
            format!("d = {d}: counted {counted}, rendered {rendered}")
        })?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let len = rng.gen_range(0..40);
        let t = EnumerationTable::new(
            (0..len)
                .map(|_| {
                    (
                        rng.gen_range(0..3),
                        rng.gen_range(0..4),
                        rng.gen_range(0..5),
                    )
                })
                .collect(),
        );
        for s in 0..5u64 {
            let lower = compute_d(&t, 0, s);
            ensure(lower == d_oracle(&t, 0, s), || {
                format!("D at horizon {s} of {:?}", t.triples)
            })?;
            let bound = layer_bound(s);
            for gap in 1..4 {
                let cut: BTreeSet<u64> = compute_d(&t, 0, s + gap)
                    .into_iter()
                    .filter(|c| bound >= (*c).into())
                    .collect();
                ensure(cut == lower, || {
                    format!("D incoherent between {s} and {}", s + gap)
                })?;
            }
        }
        let r = categoricity_verdict(&t, 0, 2, 8);
        for sh in &r.sorts {
            ensure(sh.shadow == recount(&t, 0, sh.sort), || {
                format!("shadow of sort {}", sh.sort)
            })?;
            let profile = t.shadow_profile(0, sh.sort);
            ensure(profile.windows(2).all(|w| w[0] <= w[1]), || {
                "shadow shrinks".into()
            })?;
            for k in 0..=t.len() {
                let rk = categoricity_verdict(&t.prefix(k), 0, 2, 8);
                ensure(rk.sorts[sh.sort as usize].shadow == profile[k], || {
                    "prefix shadow".into()
                })?;
            }
        }
    }
    Ok("arity function to 1000, 2^d for d <= 3, 100 random tables".into())
}

// 8. Determinism.

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = fraisse_cli::run(
        std::iter::once("fraisse").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, out)
}

fn criterion_8() -> Outcome {
    for demo in ["rado", "dlo", "constants", "gadget"] {
        let (c1, o1) = run_cli(&["demo", demo]);
        let (c2, o2) = run_cli(&["demo", demo]);
        ensure(c1 == 0 && c2 == 0, || {
            format!("demo {demo} exits {c1} and {c2}")
        })?;
        ensure(o1 == o2, || format!("demo {demo} differs between runs"))?;
    }
    Ok("4 demos byte-identical".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("round-trip encoding", criterion_1),
        ("encoded graphs amalgamate with no new n-pairs", criterion_2),
        ("extension axioms of the level-2 generic graph", criterion_3),
        ("type counts", criterion_4),
        ("layer agreement and fault injection", criterion_5),
        ("back-and-forth over P", criterion_6),
        ("prime-indexed gadget", criterion_7),
        ("demo determinism", criterion_8),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: pass ({name}; {detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL ({name}; {why}; {secs:.1}s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
