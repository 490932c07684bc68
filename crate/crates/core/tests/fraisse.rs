use fraisse_core::fraisse::*;
use fraisse_core::report::{Report, Verdict};
use fraisse_core::structure::*;

fn graph(n: usize, edges: &[(usize, usize)]) -> Structure {
    let k = GraphClass::new(GraphFamily::All);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let names: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut tuples = Vec::new();
    for (a, b) in edges {
        tuples.push(vec![names[*a], names[*b]]);
        tuples.push(vec![names[*b], names[*a]]);
    }
    Structure::build(k.vocabulary().clone(), &names, &[("E", tuples)]).unwrap()
}

#[test]
fn graph_age_counts() {
    let k = GraphClass::new(GraphFamily::All);
    let levels = enumerate_age_upto(&k, 4, DEFAULT_CANDIDATE_CAP).unwrap();
    let counts: Vec<usize> = levels.iter().map(|l| l.len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 4, 11]);
    let tf = GraphClass::new(GraphFamily::TriangleFree);
    let levels = enumerate_age_upto(&tf, 4, DEFAULT_CANDIDATE_CAP).unwrap();
    let counts: Vec<usize> = levels.iter().map(|l| l.len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 3, 7]);
}

#[test]
fn graphs_amalgamate_at_four() {
    let k = GraphClass::new(GraphFamily::All);
    for scope in [Scope::OnePoint, Scope::Factors] {
        let opts = CheckOptions {
            scope,
            samples: 20,
            seed: 7,
            ..CheckOptions::default()
        };
        let r = check_class_properties(&k, 4, &opts).unwrap();
        assert!(
            r.passed(),
            "{}",
            r.render(fraisse_core::report::Format::Full)
        );
    }
}

#[test]
fn complete_or_empty_fails_jep() {
    let k = GraphClass::new(GraphFamily::CompleteOrEmpty);
    let r = check_class_properties(&k, 2, &CheckOptions::default()).unwrap();
    assert!(r.hp.is_pass());
    let w = r.jep.witness().expect("jep fails");
    assert_eq!(w.structures.len(), 2);
    let mut sizes: Vec<(usize, usize)> = w
        .structures
        .iter()
        .map(|(_, s)| (s.size(), s.tuple_count()))
        .collect();
    sizes.sort();
    assert_eq!(sizes, vec![(2, 0), (2, 2)]);
}

#[test]
fn orders_and_equivalences_pass() {
    for name in ["orders", "equivalence", "sets", "triangle-free"] {
        let k = builtin_class(name).unwrap();
        let r = check_class_properties(k.as_ref(), 3, &CheckOptions::default()).unwrap();
        assert!(
            r.passed(),
            "{name}: {}",
            r.render(fraisse_core::report::Format::Full)
        );
    }
}

#[test]
fn type_counts() {
    let sets = builtin_class("sets").unwrap();
    let bell: Vec<u64> = (1..=4)
        .map(|n| type_count(sets.as_ref(), n, 1 << 20).unwrap())
        .collect();
    assert_eq!(bell, vec![1, 2, 5, 15]);
    let g = GraphClass::new(GraphFamily::All);
    assert_eq!(type_count(&g, 2, 1 << 20).unwrap(), 3);
}

#[test]
fn level_two_generic_graph() {
    let k = GraphClass::new(GraphFamily::All);
    let g = build_generic_approx(&k, 2, &GenericOptions::default()).unwrap();
    assert!(!g.unsaturated, "{:?}", g.unmet);
    assert!(has_extension_property(&k, &g.structure, 2, 1 << 20)
        .unwrap()
        .is_empty());
    assert_eq!(g.structure.size(), 4);
    assert_eq!(g.structure.tuple_count(), 4);
}

#[test]
fn orders_stay_unsaturated() {
    let k = builtin_class("orders").unwrap();
    let opts = GenericOptions {
        size_cap: 10,
        ..GenericOptions::default()
    };
    let g = build_generic_approx(k.as_ref(), 2, &opts).unwrap();
    assert!(g.unsaturated);
    assert!(!g.unmet.is_empty());
}

#[test]
fn homogeneity_levels() {
    let k = GraphClass::new(GraphFamily::All);
    let edge = graph(2, &[(0, 1)]);
    let r = check_homogeneity_level(&k, &edge, 2, 1 << 20).unwrap();
    assert!(matches!(r.verdict, Verdict::Fail(_)));
    let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    assert!(check_homogeneity_level(&k, &c4, 1, 1 << 20)
        .unwrap()
        .passed());
    let p3 = graph(3, &[(0, 1), (1, 2)]);
    assert!(!check_homogeneity_level(&k, &p3, 2, 1 << 20)
        .unwrap()
        .passed());
}
