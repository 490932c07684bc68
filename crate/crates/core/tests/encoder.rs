use std::collections::BTreeSet;
use std::sync::Arc;

use fraisse_core::encoder::*;
use fraisse_core::fraisse::*;
use fraisse_core::report::{Format, Report};
use fraisse_core::structure::*;
use proptest::prelude::*;

fn l0() -> Arc<Vocabulary> {
    Arc::new(Vocabulary::new([("R1", 1), ("R2", 2), ("R3", 3)]).unwrap())
}

/// Every instance over a domain of size `n`, as (symbol, tuple).
fn all_instances(v: &Vocabulary, n: usize) -> Vec<(usize, Tuple)> {
    let mut out = Vec::new();
    for k in 0..v.len() {
        for t in TupleIter::new(n, v.arity(k)) {
            out.push((k, t));
        }
    }
    out
}

fn structure_with(v: &Arc<Vocabulary>, n: usize, t: &[(usize, Tuple)]) -> Structure {
    let names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let mut rels = vec![BTreeSet::new(); v.len()];
    for (k, tuple) in t {
        rels[*k].insert(tuple.clone());
    }
    Structure::from_parts(v.clone(), names, rels).unwrap()
}

fn round_trip(enc: &Encoding, n: usize, t: &[(usize, Tuple)]) {
    let a = structure_with(enc.l0(), n, t);
    let labeled: Vec<(usize, Tuple)> = t
        .iter()
        .map(|(k, tu)| (enc.index(*k), tu.clone()))
        .collect();
    let u = encode(enc, &a, &labeled).unwrap();
    let back = decode(enc, &u.reduct(enc).unwrap()).unwrap();
    assert_eq!(back, a, "round trip of {t:?} over {n} elements");
}

#[test]
fn round_trip_small_domains_exhaustive() {
    let enc = Encoding::new(l0()).unwrap();
    for n in 0..=2 {
        let inst = all_instances(enc.l0(), n);
        for mask in 0u64..(1 << inst.len()) {
            let t: Vec<_> = (0..inst.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| inst[i].clone())
                .collect();
            round_trip(&enc, n, &t);
        }
    }
}

#[test]
fn round_trip_bounded_label_sets() {
    let enc = Encoding::new(l0()).unwrap();
    for (n, max) in [(3, 3), (4, 2)] {
        let inst = all_instances(enc.l0(), n);
        let mut count = 0;
        let mut chosen = Vec::new();
        fn rec(
            enc: &Encoding,
            n: usize,
            inst: &[(usize, Tuple)],
            start: usize,
            max: usize,
            chosen: &mut Vec<(usize, Tuple)>,
            count: &mut usize,
        ) {
            round_trip(enc, n, chosen);
            *count += 1;
            if chosen.len() == max {
                return;
            }
            for i in start..inst.len() {
                chosen.push(inst[i].clone());
                rec(enc, n, inst, i + 1, max, chosen, count);
                chosen.pop();
            }
        }
        rec(&enc, n, &inst, 0, max, &mut chosen, &mut count);
        assert!(count > 1000);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn round_trip_random(n in 1usize..=4, bits in proptest::collection::vec(any::<bool>(), 84)) {
        let enc = Encoding::new(l0()).unwrap();
        let inst = all_instances(enc.l0(), n);
        let t: Vec<_> = inst.iter().zip(bits).filter(|(_, b)| *b).map(|(x, _)| x.clone()).collect();
        round_trip(&enc, n, &t);
    }

    #[test]
    fn encode_output_is_member(n in 1usize..=3, bits in proptest::collection::vec(any::<bool>(), 14)) {
        let v = Arc::new(Vocabulary::new([("E", 2)]).unwrap());
        let enc = Encoding::new(v.clone()).unwrap();
        let mut edges = Vec::new();
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if bits[k] {
                    edges.push((0, vec![i, j]));
                    edges.push((0, vec![j, i]));
                }
                k += 1;
            }
        }
        let a = structure_with(&v, n, &edges);
        let labeled: Vec<_> = edges.iter().enumerate().filter(|(i, _)| bits[6 + i % 8]).map(|(_, (_, t))| (2, t.clone())).collect();
        let u = encode(&enc, &a, &labeled).unwrap();
        let g = GraphClass::new(GraphFamily::All);
        prop_assert!(k_membership(&enc, &u.structure, &g).is_member());
        prop_assert_eq!(scan_npairs(&u.structure).unwrap(), {
            let mut p = u.npairs.clone();
            p.sort();
            p
        });
    }
}

fn target_structure(names: &[&str], rels: &[(&str, Vec<Vec<&str>>)]) -> Structure {
    Structure::build(TargetLanguage::vocabulary(), names, rels).unwrap()
}

#[test]
fn one_one_pair_validates() {
    let s = target_structure(
        &["a", "c0"],
        &[
            ("P", vec![vec!["a"]]),
            ("Q", vec![vec!["c0"]]),
            ("lam", vec![vec!["c0"]]),
            ("rho", vec![vec!["c0"]]),
            ("H", vec![vec!["c0", "c0"]]),
            ("S", vec![vec!["a", "c0", "a", "c0"]]),
        ],
    );
    assert!(validate_npair(&s, &[0], &[1], 1).unwrap().is_valid());
    assert_eq!(scan_npairs(&s).unwrap().len(), 1);
}

#[test]
fn broken_pairs_cite_conditions() {
    let enc = Encoding::new(l0()).unwrap();
    let a = structure_with(enc.l0(), 1, &[(1, vec![0, 0])]);
    let u = encode(&enc, &a, &[(2, vec![0, 0])])
        .unwrap()
        .reduct(&enc)
        .unwrap();
    let p = &scan_npairs(&u).unwrap()[0];
    let mut rels: Vec<(String, Vec<Vec<String>>)> = Vec::new();
    for r in 0..u.vocab().len() {
        let tuples = u
            .relation(r)
            .iter()
            .filter(|t| !(r == 4 && t[0] == p.cycle[1] && t[1] == p.cycle[0]))
            .map(|t| t.iter().map(|e| u.name(*e).to_string()).collect())
            .collect();
        rels.push((u.vocab().name(r).to_string(), tuples));
    }
    let names: Vec<&str> = u.names().iter().map(|s| s.as_str()).collect();
    let rels2: Vec<(&str, Vec<Vec<&str>>)> = rels
        .iter()
        .map(|(n, ts)| {
            (
                n.as_str(),
                ts.iter()
                    .map(|t| t.iter().map(|s| s.as_str()).collect())
                    .collect(),
            )
        })
        .collect();
    let broken = target_structure(&names, &rels2);
    let check = validate_npair(&broken, &p.labels, &p.cycle, 2).unwrap();
    assert_eq!(check.first().unwrap().condition, 2);
    assert!(decode(&enc, &broken).unwrap().relation(1).is_empty());

    let mut rels3 = rels2.clone();
    for (n, ts) in rels3.iter_mut() {
        if *n == "H" {
            ts.push(vec![u.name(p.cycle[1]), u.name(p.cycle[0])]);
        }
        if *n == "lam" {
            ts.push(vec![u.name(p.cycle[1])]);
        }
    }
    let two_lams = target_structure(&names, &rels3);
    let check = validate_npair(&two_lams, &p.labels, &p.cycle, 2).unwrap();
    assert_eq!(check.first().unwrap().condition, 3);
    assert!(decode(&enc, &two_lams).unwrap().relation(1).is_empty());
}

#[test]
fn encode_examples() {
    let enc = Encoding::new(l0()).unwrap();
    let a = structure_with(enc.l0(), 1, &[(0, vec![0])]);
    let u = encode(&enc, &a, &[(1, vec![0])]).unwrap().structure;
    assert_eq!(u.size(), 2);
    let q = u.vocab().index_of("Q").unwrap();
    let h = u.vocab().index_of("H").unwrap();
    let c = u.relation(q).iter().next().unwrap()[0];
    assert!(u.holds(h, &[c, c]));
    assert!(u.has("lam", c) && u.has("rho", c));

    let bare = encode(&enc, &a, &[]).unwrap().structure;
    assert!(bare.extension_of("Q").is_empty());
    assert_eq!(
        decode(&enc, &bare.reduct(enc.target().clone()).unwrap())
            .unwrap()
            .tuple_count(),
        0
    );

    let v = Arc::new(Vocabulary::new([("U", 1), ("W", 1), ("R", 2)]).unwrap());
    let enc3 = Encoding::new(v.clone()).unwrap();
    assert_eq!(enc3.indices(), &[1, 2, 3]);
    let a = structure_with(&v, 2, &[(2, vec![0, 1])]);
    let u = encode(&enc3, &a, &[(3, vec![0, 1])]).unwrap();
    let pair = &u.npairs[0];
    assert_eq!((pair.n, pair.m), (3, 2));
    let s = &u.structure;
    assert!(s.has("lam", pair.cycle[0]) && s.has("rho", pair.cycle[1]));
    assert!(!s.has("rho", pair.cycle[2]));
    assert!(encode(&enc3, &a, &[(3, vec![1, 0])]).is_err());
}

#[test]
fn membership_clauses() {
    let v = Arc::new(Vocabulary::new([("E", 2)]).unwrap());
    let enc = Encoding::new(v.clone()).unwrap();
    let g = GraphClass::new(GraphFamily::All);
    let tf = GraphClass::new(GraphFamily::TriangleFree);
    let edge = structure_with(&v, 2, &[(0, vec![0, 1]), (0, vec![1, 0])]);
    let u = encode(&enc, &edge, &[(2, vec![0, 1])]).unwrap().structure;
    assert!(k_membership(&enc, &u, &g).is_member());
    // The same cycles over a P-part without the edge break (iii).
    let e = u.vocab().index_of("E").unwrap();
    let mut rels = u.relations().to_vec();
    rels[e].clear();
    let bad = Structure::from_parts(u.vocab().clone(), u.names().to_vec(), rels).unwrap();
    let m = k_membership(&enc, &bad, &g);
    assert!(m.cites(Clause::III), "{m}");
    let tri = structure_with(
        &v,
        3,
        &[
            (0, vec![0, 1]),
            (0, vec![1, 0]),
            (0, vec![1, 2]),
            (0, vec![2, 1]),
            (0, vec![0, 2]),
            (0, vec![2, 0]),
        ],
    );
    let u = encode(&enc, &tri, &[]).unwrap().structure;
    assert!(k_membership(&enc, &u, &tf).cites(Clause::II));
}

fn encoded_graph_class() -> EncodedClass {
    EncodedClass::new(Box::new(GraphClass::new(GraphFamily::All))).unwrap()
}

#[test]
fn three_cases() {
    let k = encoded_graph_class();
    let enc = k.encoding().clone();
    let v = enc.l0().clone();
    let edge = structure_with(&v, 2, &[(0, vec![0, 1]), (0, vec![1, 0])]);
    let c = encode(&enc, &edge, &[]).unwrap().structure;
    let n = c.size();
    let incl = Morphism::identity(n);
    let exts = k.extensions(&c, 1 << 22).unwrap();
    let sort_of = |d: &Structure| d.has("P", n);
    let p_ext: Vec<&Structure> = exts.iter().filter(|d| sort_of(d)).collect();
    let q_ext: Vec<&Structure> = exts.iter().filter(|d| !sort_of(d)).collect();
    assert!(!p_ext.is_empty() && !q_ext.is_empty());
    for (d1, d2, want) in [
        (p_ext[0], p_ext[p_ext.len() - 1], AmalgamCase::BothP),
        (q_ext[0], q_ext[q_ext.len() - 1], AmalgamCase::BothQ),
        (p_ext[0], q_ext[0], AmalgamCase::Mixed),
    ] {
        let (a, case) = amalgamate_k(&k, &c, d1, &incl, d2, &incl).unwrap();
        assert_eq!(case, want);
        assert!(k.contains(&a.structure));
        assert!(a.is_valid(d1, d2));
        assert!(no_new_npairs(&a, d1, d2).is_ok());
    }
}

#[test]
fn encoded_class_amalgamates() {
    let k = encoded_graph_class();
    let opts = CheckOptions {
        scope: Scope::OnePoint,
        samples: 40,
        seed: 11,
        ..CheckOptions::default()
    };
    let r = check_class_properties(&k, 4, &opts).unwrap();
    assert!(r.passed(), "{}", r.render(Format::Full));
    assert_eq!(r.by_search, 0);
}

#[test]
fn dense_reduct_of_pure_set() {
    let v = Arc::new(Vocabulary::empty());
    let enc = Encoding::new(v.clone()).unwrap();
    let a = structure_with(&v, 2, &[]);
    let u = encode(&enc, &a, &[]).unwrap().structure;
    let r = check_dense_reduct(&enc, &u, 2, None, 1 << 20).unwrap();
    assert!(r.passed());
    assert!(r.pairs >= 4);
}
