use std::sync::Arc;

use fraisse_core::axioms::*;
use fraisse_core::encoder::EncodedClass;
use fraisse_core::fraisse::*;
use fraisse_core::logic::*;
use fraisse_core::report::Report;
use fraisse_core::structure::*;

fn graph(n: usize, edges: &[(usize, usize)]) -> Structure {
    let v = GraphClass::new(GraphFamily::All).vocabulary().clone();
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let names: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut tuples = Vec::new();
    for (a, b) in edges {
        tuples.push(vec![names[*a], names[*b]]);
        tuples.push(vec![names[*b], names[*a]]);
    }
    Structure::build(v, &names, &[("E", tuples)]).unwrap()
}

fn holds_all(s: &Structure, axioms: &[Sentence]) -> bool {
    axioms.iter().all(|a| evaluate(s, a).unwrap())
}

#[test]
fn triangle_is_the_only_forbidden_configuration() {
    let k = GraphClass::new(GraphFamily::TriangleFree);
    let a = scheme_a(&k, &AxiomBudget::new(3)).unwrap();
    assert_eq!(a.len(), 1);
    let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
    assert!(!evaluate(&tri, &a[0]).unwrap());
    assert!(evaluate(&graph(3, &[(0, 1), (1, 2)]), &a[0]).unwrap());
    assert_eq!(a[0].quantifier_count(), 3);
    assert!(
        a[0].to_line().starts_with("[a] (forall (x1 x2 x3)"),
        "{}",
        a[0].to_line()
    );
}

#[test]
fn all_graphs_forbid_nothing() {
    let k = GraphClass::new(GraphFamily::All);
    for n in 0..=4 {
        assert!(scheme_a(&k, &AxiomBudget::new(n)).unwrap().is_empty());
    }
}

#[test]
fn graph_extension_axioms_at_two() {
    let k = GraphClass::new(GraphFamily::All);
    let d = scheme_d(&k, &AxiomBudget::new(2)).unwrap();
    let edge = graph(2, &[(0, 1)]);
    let pair = graph(2, &[]);
    assert!(d.iter().any(|s| !evaluate(&edge, s).unwrap()));
    assert!(d.iter().any(|s| !evaluate(&pair, s).unwrap()));
    let neighbour =
        parse_sentence("(forall (x) (exists (y) (and (not (eq x y)) (rel E x y))))").unwrap();
    let stranger =
        parse_sentence("(forall (x) (exists (y) (and (not (eq x y)) (not (rel E x y)))))").unwrap();
    let approx = build_generic_approx(&k, 2, &GenericOptions::default()).unwrap();
    for s in d.iter().chain([&neighbour, &stranger]) {
        assert!(evaluate(&approx.structure, s).unwrap(), "{}", s.to_line());
    }
    // The two reference sentences follow from scheme (d) on every graph of size <= 4.
    for n in 1..=4 {
        for g in enumerate_structures(k.vocabulary(), n, 1 << 20).unwrap() {
            if !k.contains(&g) || !holds_all(&g, &d) {
                continue;
            }
            assert!(evaluate(&g, &neighbour).unwrap() && evaluate(&g, &stranger).unwrap());
        }
    }
    let r = verify_model_of(&edge, &[stranger], &EvalOptions::default()).unwrap();
    assert!(!r.passed());
    assert!(verify_model_of(&edge, &[], &EvalOptions::default())
        .unwrap()
        .passed());
}

fn classes() -> Vec<(Box<dyn AgeClass>, usize)> {
    vec![
        (Box::new(GraphClass::new(GraphFamily::All)), 4),
        (Box::new(GraphClass::new(GraphFamily::TriangleFree)), 4),
        (builtin_class("orders").unwrap(), 3),
        (builtin_class("equivalence").unwrap(), 3),
        (builtin_class("sets").unwrap(), 3),
        (
            Box::new(EncodedClass::new(Box::new(GraphClass::new(GraphFamily::All))).unwrap()),
            2,
        ),
    ]
}

#[test]
fn members_satisfy_universal_schemes() {
    for (k, n) in classes() {
        let budget = AxiomBudget::new(n).with_schemes("ab").unwrap();
        let ax = generate_axioms(k.as_ref(), &budget).unwrap();
        for level in enumerate_age_upto(k.as_ref(), n, 1 << 22).unwrap() {
            for m in level {
                for s in &ax {
                    assert!(evaluate(&m, s).unwrap(), "{}: {}", k.name(), s.to_line());
                }
            }
        }
    }
}

#[test]
fn universal_schemes_are_adequate() {
    for (k, n) in classes() {
        let budget = AxiomBudget::new(n).with_schemes("ab").unwrap();
        let ax = generate_axioms(k.as_ref(), &budget).unwrap();
        for size in 0..=n {
            for s in enumerate_structures(k.vocabulary(), size, 1 << 22).unwrap() {
                if holds_all(&s, &ax) {
                    assert!(k.contains(&s), "{}: {}", k.name(), emit_structure("s", &s));
                }
            }
        }
    }
}

#[test]
fn extension_scheme_is_recomputable() {
    for (k, n) in classes() {
        let n = n.min(3);
        let budget = AxiomBudget::new(n);
        let a = scheme_a(k.as_ref(), &budget).unwrap();
        let c = scheme_c(k.as_ref(), &budget).unwrap();
        let d = scheme_d(k.as_ref(), &budget).unwrap();
        let counts: Vec<u64> = (0..=n)
            .map(|i| type_count(k.as_ref(), i, 1 << 22).unwrap())
            .collect();
        let again = rederive_scheme_d(k.vocabulary(), &a, &c, &counts, &budget).unwrap();
        let lines = |v: &[Sentence]| v.iter().map(|s| s.to_line()).collect::<Vec<_>>();
        assert_eq!(lines(&again), lines(&d), "{}", k.name());
    }
}

#[test]
fn generation_is_deterministic_and_parses_back() {
    let k = GraphClass::new(GraphFamily::TriangleFree);
    let budget = AxiomBudget::new(3);
    let one = generate_axioms(&k, &budget).unwrap();
    let two = generate_axioms(&k, &budget).unwrap();
    let text = emit_axiom_file(&one);
    assert_eq!(text, emit_axiom_file(&two));
    let back = parse_axiom_file(&text, Some(k.vocabulary())).unwrap();
    assert_eq!(emit_axiom_file(&back), text);
    let mut lines: Vec<String> = one.iter().map(|s| s.to_line()).collect();
    let before = lines.len();
    lines.sort();
    lines.dedup();
    assert_eq!(lines.len(), before);
}

#[test]
fn arity_cut_tracks_members() {
    let v = Arc::new(Vocabulary::new([("U", 1), ("R", 3)]).unwrap());
    let loop_at = |marked: bool| {
        let u = if marked { vec![vec!["a"]] } else { vec![] };
        Structure::build(
            v.clone(),
            &["a"],
            &[("U", u), ("R", vec![vec!["a", "a", "a"]])],
        )
        .unwrap()
    };
    let k = ForbiddenClass::new(
        "r-free",
        v.clone(),
        None,
        vec![loop_at(false), loop_at(true)],
    )
    .unwrap();
    assert_eq!(arity_cut(&k, 1, 1 << 20).unwrap(), 1);
    assert_eq!(arity_cut(&k, 2, 1 << 20).unwrap(), 3);
    let g = GraphClass::new(GraphFamily::All);
    assert_eq!(arity_cut(&g, 1, 1 << 20).unwrap(), 0);
    assert_eq!(arity_cut(&g, 2, 1 << 20).unwrap(), 2);
}
