use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigUint;
use proptest::prelude::*;

use fraisse_core::axioms::AxiomBudget;
use fraisse_core::encoder::{encode, Encoding};
use fraisse_core::fraisse::{
    check_class_properties, enumerate_age_upto, type_count, AgeClass, CheckOptions,
};
use fraisse_core::gadget::{
    arity_a, assemble_gadget_axioms, build_gadget_class, categoricity_verdict, code_pair,
    compute_d, count_sort_types, decode_pair, l_rewrite, layer_bound, sort_rendering,
    ArityFunction, EnumerationTable, GadgetTheory, Origin, DEFAULT_ATOM_CAP,
};
use fraisse_core::logic::{evaluate, parse_sentence, SchemeTag};
use fraisse_core::{Error, Structure};

const CAP: u64 = 1 << 20;

fn codes(c: &[u64]) -> BTreeSet<u64> {
    c.iter().copied().collect()
}

#[test]
fn pairing_examples() {
    assert_eq!(code_pair(0, 0), 0);
    assert_eq!(code_pair(1, 0), 1);
    assert_eq!(code_pair(0, 1), 2);
    assert_eq!(decode_pair(code_pair(7, 5)), (7, 5));
    let mut seen = HashSet::new();
    for m in 0..10_000 {
        let (i, j) = decode_pair(m);
        assert!(seen.insert((i, j)));
        assert_eq!(code_pair(i, j), m);
    }
}

#[test]
fn arity_function_constraints() {
    assert_eq!(arity_a(0), BigUint::from(3u32));
    assert_eq!(arity_a(1), BigUint::from(4u32));
    assert_eq!(arity_a(2), BigUint::from(7u32));
    let mut f = ArityFunction::new();
    let mut prev: Option<(BigUint, BigUint)> = None;
    for x in 0..=1000u64 {
        let a = f.a(x);
        assert!(a >= BigUint::from(3u32));
        let prod = &a * f.prime_of(x);
        if let Some((pa, pp)) = &prev {
            assert!(a > *pa, "a not increasing at {x}");
            assert!(prod > *pp, "product not increasing at {x}");
            // Minimality: neither constraint holds one lower.
            let lower = &a - 1u32;
            assert!(
                lower <= *pa || &lower * f.prime_of(x) <= *pp,
                "a({x}) not least"
            );
        }
        prev = Some((a, prod));
    }
    assert_eq!(layer_bound(0), BigUint::from(6u32));
}

#[test]
fn layer_zero_vocabulary() {
    let g = build_gadget_class(&codes(&[]), 0).unwrap();
    assert_eq!(g.bound(), 6);
    let v = g.vocabulary();
    let e0 = v.index_of("E0").unwrap();
    assert_eq!(v.arity(e0), 4);
    assert_eq!(v.arity(v.index_of("E1").unwrap()), 6);
    assert_eq!(v.arity(v.index_of("Pstar0").unwrap()), 6);
    assert!(g.live_codes().is_empty());
    for k in 1..=6 {
        assert!(v.symbols().iter().any(|s| s.arity == k), "arity {k}");
    }
    assert_eq!(g.pads().len(), 4);
    let err = build_gadget_class(&codes(&[7]), 0).unwrap_err();
    assert!(err.to_string().contains("exceeds the layer bound"));
    let g5 = build_gadget_class(&codes(&[0, 2, 5, 9]), 5).unwrap();
    assert_eq!(g5.live_codes(), vec![0, 2, 5]);
    assert_eq!(g5.dormant_codes(), vec![9]);
}

/// Four points with `E0` relating exactly the repeated pairs and the given
/// unordered pairs among themselves.
fn pairs_structure(g: &GadgetTheory, related: &[((usize, usize), (usize, usize))]) -> Structure {
    let names = ["a", "b", "c", "d"];
    let mut e0 = Vec::new();
    for x in 0..4 {
        for y in 0..4 {
            for u in 0..4 {
                for v in 0..4 {
                    let rep1 = x == y;
                    let rep2 = u == v;
                    let p = (x.min(y), x.max(y));
                    let q = (u.min(v), u.max(v));
                    let same = (rep1 && rep2)
                        || (!rep1
                            && !rep2
                            && (p == q
                                || related
                                    .iter()
                                    .any(|(a, b)| (*a == p && *b == q) || (*a == q && *b == p))));
                    if same {
                        e0.push(vec![names[x], names[y], names[u], names[v]]);
                    }
                }
            }
        }
    }
    Structure::build(g.vocabulary().clone(), &names, &[("E0", e0)]).unwrap()
}

#[test]
fn membership_checks() {
    let g = build_gadget_class(&codes(&[0]), 0).unwrap();
    let k = &g.class;
    let empty = Structure::empty(g.vocabulary().clone());
    assert!(k.contains(&empty));
    // E1 on three points: the one non-repeated class, and the repeated class.
    let base = enumerate_age_upto(k, 3, CAP).unwrap();
    assert!(base[3].iter().all(|s| k.contains(s)));

    let ok = pairs_structure(&g, &[((0, 1), (2, 3))]);
    let with_e1 = complete_e1(&g, ok);
    assert!(k.contains(&with_e1), "{:?}", k.violation(&with_e1));
    let bad = pairs_structure(&g, &[((0, 1), (0, 2)), ((0, 2), (0, 3))]);
    let bad = complete_e1(&g, bad);
    let why = k.violation(&bad).unwrap();
    assert!(why.contains("not transitive"), "{why}");

    // Pstar0 on the class of {a,b} only at (a,b,a,b,a,b): not invariant.
    let mut s = with_e1.clone();
    let p = g.vocabulary().index_of("Pstar0").unwrap();
    let a = s.elem("a").unwrap();
    let b = s.elem("b").unwrap();
    let mut rels = s.relations().to_vec();
    rels[p].insert(vec![a, b, a, b, a, b]);
    s = Structure::from_parts(s.vocab().clone(), s.names().to_vec(), rels).unwrap();
    let why = k.violation(&s).unwrap();
    assert!(why.contains("invariant"), "{why}");

    let dead = build_gadget_class(&codes(&[]), 0).unwrap();
    assert!(dead.class.violation(&s).unwrap().contains("must be empty"));
}

/// Add the `E1` relation a member needs: all 3-subsets in one class each.
fn complete_e1(g: &GadgetTheory, s: Structure) -> Structure {
    let e1 = g.vocabulary().index_of("E1").unwrap();
    let n = s.size();
    let mut rels = s.relations().to_vec();
    let rep = |t: &[usize]| t[0] == t[1] || t[0] == t[2] || t[1] == t[2];
    let all: Vec<Vec<usize>> = (0..n * n * n)
        .map(|i| vec![i / (n * n), i / n % n, i % n])
        .collect();
    for x in &all {
        for y in &all {
            let same = match (rep(x), rep(y)) {
                (true, true) => true,
                (false, false) => {
                    let mut a = x.clone();
                    let mut b = y.clone();
                    a.sort();
                    b.sort();
                    a == b
                }
                _ => false,
            };
            if same {
                rels[e1].insert(x.iter().chain(y).copied().collect());
            }
        }
    }
    Structure::from_parts(s.vocab().clone(), s.names().to_vec(), rels).unwrap()
}

#[test]
fn age_counts_at_layer_zero() {
    // Two points: the single pair class, marked or not by Pstar0.
    let g = build_gadget_class(&codes(&[0]), 0).unwrap();
    let levels = enumerate_age_upto(&g.class, 3, CAP).unwrap();
    let counts: Vec<usize> = levels.iter().map(Vec::len).collect();
    // Three points: the three pairs split into classes, each class marked or
    // not, up to permuting the points. Three singleton classes give 4 mark
    // counts, a class of two plus one gives 2 * 2, a single class gives 2.
    let oracle3 = 4 + 2 * 2 + 2;
    assert_eq!(counts, vec![1, 1, 2, oracle3]);
    let plain = build_gadget_class(&codes(&[]), 0).unwrap();
    let counts: Vec<usize> = enumerate_age_upto(&plain.class, 3, CAP)
        .unwrap()
        .iter()
        .map(Vec::len)
        .collect();
    assert_eq!(counts, vec![1, 1, 1, 3]);
}

#[test]
fn class_properties_at_bound_three() {
    for d in [codes(&[]), codes(&[0])] {
        let g = build_gadget_class(&d, 0).unwrap();
        let r = check_class_properties(&g.class, 3, &CheckOptions::default()).unwrap();
        assert!(
            r.overall().is_pass(),
            "{d:?}: {:?} {:?} {:?}",
            r.hp,
            r.jep,
            r.ap
        );
        assert_eq!(r.by_search, 0);
    }
}

#[test]
fn sort_type_counts() {
    let g = build_gadget_class(&codes(&[0, 2, 5]), 5).unwrap();
    assert_eq!(count_sort_types(&g, 0).unwrap(), 8);
    assert_eq!(count_sort_types(&g, 1).unwrap(), 1);
    assert!(count_sort_types(&g, g.sorts()).is_err());
    for (d, m) in [
        (codes(&[]), 0),
        (codes(&[0]), 0),
        (codes(&[0, 2]), 2),
        (codes(&[0, 2, 5]), 5),
        (codes(&[1, 4]), 4),
    ] {
        let g = build_gadget_class(&d, m).unwrap();
        for n in 0..g.sorts().min(3) {
            let rendering = sort_rendering(&g, n).unwrap();
            assert_eq!(
                type_count(&rendering, 1, CAP).unwrap(),
                count_sort_types(&g, n).unwrap(),
                "D={d:?} m={m} sort {n}"
            );
        }
    }
}

#[test]
fn d_sets() {
    let empty = EnumerationTable::default();
    assert!(compute_d(&empty, 0, 0).is_empty());
    let one = EnumerationTable::new(vec![(0, 0, 0)]);
    assert_eq!(compute_d(&one, 0, 0), codes(&[0]));
    let dup = EnumerationTable::new(vec![(0, 1, 5), (1, 0, 0), (0, 0, 2), (0, 1, 5)]);
    // Position 0 gives <1,0> = 1, position 2 gives <0,2> = 5.
    assert_eq!(compute_d(&dup, 0, 0), codes(&[1, 5]));
    assert_eq!(compute_d(&dup, 1, 0), codes(&[2]));
    let text = "# e n x\n0 1 5\n1 0 0\n\n0 0 2\n0 1 5\n";
    assert_eq!(EnumerationTable::parse(text).unwrap(), dup);
    assert_eq!(EnumerationTable::parse(&dup.to_text()).unwrap(), dup);
    let err = EnumerationTable::parse("0 1\n").unwrap_err();
    assert!(matches!(err, Error::Parse { pos, .. } if pos.line == 1));
    let err = EnumerationTable::parse("0 0 0\n0 x 1\n").unwrap_err();
    assert!(matches!(err, Error::Parse { pos, .. } if pos.line == 2 && pos.col == 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn d_sets_are_coherent(
        triples in prop::collection::vec((0u64..3, 0u64..4, 0u64..5), 0..40),
        s in 0u64..6,
        gap in 1u64..6,
    ) {
        let t = EnumerationTable::new(triples);
        let lower = compute_d(&t, 0, s);
        let upper = compute_d(&t, 0, s + gap);
        let ls = layer_bound(s);
        let cut: BTreeSet<u64> = upper.into_iter().filter(|c| BigUint::from(*c) <= ls).collect();
        prop_assert_eq!(cut, lower);
    }

    #[test]
    fn shadows_grow_with_the_prefix(triples in prop::collection::vec((0u64..2, 0u64..3, 0u64..6), 0..30)) {
        let t = EnumerationTable::new(triples);
        for n in 0..3 {
            let profile = t.shadow_profile(0, n);
            prop_assert!(profile.windows(2).all(|w| w[0] <= w[1]));
            for k in 0..=t.len() {
                let r = categoricity_verdict(&t.prefix(k), 0, 2, 8);
                prop_assert_eq!(r.sorts[n as usize].shadow, profile[k]);
            }
        }
    }

    #[test]
    fn pairing_round_trips(i in 0u64..1_000_000, j in 0u64..1_000_000) {
        prop_assert_eq!(decode_pair(code_pair(i, j)), (i, j));
    }
}

fn recount(t: &EnumerationTable, e: u64, n: u64) -> usize {
    let mut xs: Vec<u64> = t
        .triples
        .iter()
        .filter(|x| x.0 == e && x.1 == n)
        .map(|x| x.2)
        .collect();
    xs.sort();
    xs.dedup();
    xs.len()
}

#[test]
fn categoricity_reports() {
    let quiet = EnumerationTable::new(vec![(1, 0, 0), (1, 1, 3)]);
    let r = categoricity_verdict(&quiet, 0, 3, 8);
    assert!(r.categorical_at_horizon());
    assert!(r
        .sorts
        .iter()
        .all(|x| x.shadow == 0 && x.types() == Some(1)));

    let growing = EnumerationTable::new((0..12).map(|x| (0, 0, x)).collect());
    for k in 1..=growing.len() {
        let p = growing.prefix(k);
        assert_eq!(p.shadow(0, 0), k);
    }
    let r = categoricity_verdict(&growing, 0, 2, 8);
    assert!(!r.categorical_at_horizon());
    assert!(r.sorts[0].flagged);
    assert!(r.verdict.witness().unwrap().description.contains("sort 0"));

    let mixed = EnumerationTable::new(vec![
        (0, 0, 1),
        (0, 1, 2),
        (2, 0, 1),
        (0, 0, 1),
        (0, 1, 3),
        (0, 2, 0),
        (0, 1, 4),
        (0, 1, 2),
    ]);
    let r = categoricity_verdict(&mixed, 0, 2, 3);
    let flags: BTreeMap<u64, bool> = r.sorts.iter().map(|x| (x.sort, x.flagged)).collect();
    for n in 0..=2 {
        assert_eq!(r.sorts[n as usize].shadow, recount(&mixed, 0, n));
        assert_eq!(flags[&n], recount(&mixed, 0, n) >= 3);
    }
    assert!(!r.categorical_at_horizon());
}

#[test]
fn gadget_axiom_fragments() {
    let g = build_gadget_class(&codes(&[]), 0).unwrap();
    let none = assemble_gadget_axioms(&g, &AxiomBudget::new(0), DEFAULT_ATOM_CAP).unwrap();
    assert!(none.axioms.is_empty());

    let tiny = AxiomBudget::new(2).with_schemes("a").unwrap();
    let ax = assemble_gadget_axioms(&g, &tiny, DEFAULT_ATOM_CAP).unwrap();
    let lines: Vec<String> = ax
        .of(Origin::OneSorted)
        .iter()
        .map(|s| s.to_line())
        .collect();
    assert_eq!(
        lines,
        vec![
            "[a] (forall (x1 x2) (rel E0 x1 x2 x1 x2))",
            "[a] (forall (x1 x2) (rel E0 x1 x1 x2 x2))",
            "[a] (forall (x1) (not (rel Z1 x1)))",
            "[a] (forall (x1 x2) (not (rel Z2 x1 x2)))",
        ]
    );
    assert_eq!(ax.of(Origin::Rewrite).len(), 4);
    assert_eq!(ax.skipped, 0);

    let wider = assemble_gadget_axioms(&g, &AxiomBudget::new(2), DEFAULT_ATOM_CAP).unwrap();
    let one = wider.of(Origin::OneSorted);
    assert!(one.iter().any(|s| s.tag == SchemeTag::C));
    assert!(one.iter().any(|s| s.tag == SchemeTag::D));
    let model = enumerate_age_upto(&g.class, 3, CAP).unwrap()[3][0].clone();
    for s in one.iter().filter(|s| s.tag == SchemeTag::A) {
        assert!(evaluate(&model, s).unwrap(), "{}", s.to_line());
    }
}

#[test]
fn rewrite_of_a_unary_atom() {
    let v = std::sync::Arc::new(fraisse_core::Vocabulary::new([("R1", 1)]).unwrap());
    let enc = Encoding::new(v.clone()).unwrap();
    let s = parse_sentence("(exists (x) (rel R1 x))").unwrap();
    let r = l_rewrite(&s, &enc).unwrap();
    assert_eq!(r.quantifier_count(), 2);
    assert!(r
        .prefix
        .iter()
        .all(|(q, _)| *q == fraisse_core::logic::Quantifier::Exists));
    let a = Structure::build(v, &["a"], &[("R1", vec![vec!["a"]])]).unwrap();
    let labelled = encode(&enc, &a, &[(1, vec![0])]).unwrap();
    let bare = encode(&enc, &a, &[]).unwrap();
    assert!(evaluate(&labelled.structure, &r).unwrap());
    assert!(!evaluate(&bare.structure, &r).unwrap());
    let neg = parse_sentence("(forall (x) (not (rel R1 x)))").unwrap();
    let rn = l_rewrite(&neg, &enc).unwrap();
    assert!(!evaluate(&labelled.structure, &rn).unwrap());
    assert!(evaluate(&bare.structure, &rn).unwrap());
}
