//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use fraisse_core::{Structure, Vocabulary};

/// The cycle on `n` vertices as a symmetric graph.
pub fn cycle(n: usize) -> Structure {
    let v = Arc::new(Vocabulary::new([("E", 2)]).expect("graph vocabulary"));
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        edges.push(vec![names[i].as_str(), names[j].as_str()]);
        edges.push(vec![names[j].as_str(), names[i].as_str()]);
    }
    Structure::build(v, &names, &[("E", edges)]).expect("valid cycle")
}
