use std::collections::BTreeSet;
use std::fmt::Write as _;

use fraisse_core::axioms::{generate_axioms, verify_model_of, AxiomBudget};
use fraisse_core::fraisse::{
    build_generic_approx, builtin_class, check_class_properties, has_extension_property,
    type_count, AgeClass, CheckOptions, GenericOptions,
};
use fraisse_core::gadget::{
    build_gadget_class, categoricity_verdict, compute_d, count_sort_types, layer_bound,
    sort_rendering, ArityFunction, EnumerationTable,
};
use fraisse_core::layered::{
    back_and_forth_over_p, build_layered_presentation, check_layer_agreement, constants_example,
    LayerOptions,
};
use fraisse_core::logic::EvalOptions;
use fraisse_core::report::{Report, Summary, Verdict, Witness};
use fraisse_core::Result;

use crate::output::{Outcome, TextReport};
use crate::DemoName;

const CAP: u64 = 1 << 22;

struct Run {
    body: String,
    checks: Vec<(String, bool)>,
}

impl Run {
    fn new(title: &str) -> Self {
        Run {
            body: format!("demo {title}\n"),
            checks: Vec::new(),
        }
    }

    fn section(&mut self, title: &str) {
        let _ = write!(self.body, "\n== {title}\n");
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.body.push_str(text.as_ref());
        self.body.push('\n');
    }

    fn check(&mut self, name: &str, ok: bool) {
        let _ = writeln!(
            self.body,
            "check {name}: {}",
            if ok { "pass" } else { "fail" }
        );
        self.checks.push((name.to_string(), ok));
    }

    fn finish(self, demo: &str) -> Outcome {
        let mut s = Summary::new();
        s.push("demo", demo);
        for (name, ok) in &self.checks {
            s.push(&format!("check_{name}"), if *ok { "pass" } else { "fail" });
        }
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| n.as_str())
            .collect();
        let verdict = if failed.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail(Witness::new(format!(
                "failed checks: {}",
                failed.join(", ")
            )))
        };
        Outcome::new(TextReport::new(self.body, s, verdict))
    }
}

pub(crate) fn run(name: DemoName) -> Result<Outcome> {
    match name {
        DemoName::Rado => rado(),
        DemoName::Dlo => dlo(),
        DemoName::Constants => constants(),
        DemoName::Gadget => gadget(),
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Stirling numbers of the second kind, row `n`.
fn stirling_row(n: u64) -> Vec<u64> {
    let mut row = vec![1u64];
    for i in 1..=n {
        let mut next = vec![0u64; i as usize + 1];
        for k in 1..=i as usize {
            let stay = if k < row.len() { k as u64 * row[k] } else { 0 };
            next[k] = row[k - 1] + stay;
        }
        row = next;
    }
    row
}

/// Graph n-types: a partition of the variables, then any graph on the blocks.
fn graph_types(n: u64) -> u64 {
    stirling_row(n)
        .iter()
        .enumerate()
        .map(|(k, s)| s * (1u64 << binomial(k as u64, 2)))
        .sum()
}

/// Ordered set partitions.
fn fubini(n: u64) -> u64 {
    let mut a = vec![1u64];
    for m in 1..=n {
        a.push((1..=m).map(|k| binomial(m, k) * a[(m - k) as usize]).sum());
    }
    a[n as usize]
}

fn rado() -> Result<Outcome> {
    let mut r = Run::new("rado");
    let k = builtin_class("graphs")?;

    r.section("class check");
    let rep = check_class_properties(k.as_ref(), 3, &CheckOptions::default())?;
    r.line(format!(
        "{} amalgamation problems up to 3 elements, {} by strategy",
        rep.problems, rep.by_strategy
    ));
    r.check("class", rep.passed());

    r.section("generic approximation");
    let g = build_generic_approx(k.as_ref(), 2, &GenericOptions::default())?;
    r.line(format!(
        "level 2: {} elements in {} steps",
        g.structure.size(),
        g.log.len()
    ));
    r.check("generic", g.passed());
    let unmet = has_extension_property(k.as_ref(), &g.structure, 2, CAP)?;
    r.check("extension_property", unmet.is_empty());

    r.section("axioms");
    let budget = AxiomBudget::new(2).with_schemes("cd")?;
    let ax = generate_axioms(k.as_ref(), &budget)?;
    let m = verify_model_of(&g.structure, &ax, &EvalOptions::default())?;
    r.line(format!(
        "{} extension and existence axioms with at most 2 quantifiers",
        ax.len()
    ));
    r.check("axioms", m.passed() && !ax.is_empty());

    r.section("type counts");
    let mut ok = true;
    for n in 1..=3 {
        let t = type_count(k.as_ref(), n, CAP)?;
        let want = graph_types(n as u64);
        r.line(format!("{n}-types: {t} (expected {want})"));
        ok &= t == want;
    }
    r.check("type_counts", ok);
    Ok(r.finish("rado"))
}

fn dlo() -> Result<Outcome> {
    let mut r = Run::new("dlo");
    let k = builtin_class("orders")?;

    r.section("class check");
    let rep = check_class_properties(k.as_ref(), 3, &CheckOptions::default())?;
    r.line(format!(
        "{} amalgamation problems up to 3 elements",
        rep.problems
    ));
    r.check("class", rep.passed());

    r.section("type counts");
    let mut ok = true;
    for n in 1..=3 {
        let t = type_count(k.as_ref(), n, CAP)?;
        let want = fubini(n as u64);
        r.line(format!("{n}-types: {t} (expected {want})"));
        ok &= t == want;
    }
    r.check("type_counts", ok);

    r.section("generic approximation");
    let opts = GenericOptions {
        size_cap: 12,
        ..GenericOptions::default()
    };
    let g = build_generic_approx(k.as_ref(), 3, &opts)?;
    r.line(format!(
        "level 3 within 12 elements: {} elements, {} unmet demands",
        g.structure.size(),
        g.unmet.len()
    ));
    r.line("a finite linear order has endpoints, so some demand stays open");
    r.check("unsaturated", g.unsaturated && !g.unmet.is_empty());
    Ok(r.finish("dlo"))
}

fn constants() -> Result<Outcome> {
    let mut r = Run::new("constants");
    let spec = constants_example(3);
    let build = |seed| {
        build_layered_presentation(
            &spec,
            &LayerOptions {
                seed,
                ..LayerOptions::default()
            },
        )
    };
    let p = build(0)?;

    r.section("presentation");
    r.line(p.body().trim_end());

    r.section("agreement");
    let mut ok = true;
    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
        let a = check_layer_agreement(&p, i, j, 3, CAP)?;
        r.line(format!(
            "layers {i} and {j}: {} members, {} reducts, {}",
            a.members_i,
            a.reducts_j,
            a.verdict.word()
        ));
        ok &= a.passed();
    }
    r.check("agreement", ok);

    r.section("back-and-forth");
    let (p1, p2) = (build(1)?, build(2)?);
    let mut ok = true;
    for i in 1..=p1.len() {
        let u1 = &p1.layer(i).approximant.structure;
        let u2 = &p2.layer(i).approximant.structure;
        let b = back_and_forth_over_p(u1, u2, 2, None)?;
        r.line(format!(
            "layer {i}: sizes {} and {}, depth 2 {}",
            u1.size(),
            u2.size(),
            b.verdict.word()
        ));
        ok &= b.passed();
    }
    r.check("back_and_forth", ok);
    Ok(r.finish("constants"))
}

fn gadget() -> Result<Outcome> {
    let mut r = Run::new("gadget");

    r.section("arity function");
    let mut f = ArityFunction::new();
    let mut row = Vec::new();
    for x in 0..8 {
        row.push(format!("a({x})={}", f.a(x)));
    }
    r.line(row.join(" "));
    let mut ok = true;
    let (mut pa, mut pp) = (f.a(0), f.a(0) * f.prime_of(0));
    for x in 1..=200 {
        let a = f.a(x);
        let prod = &a * f.prime_of(x);
        let lower = &a - 1u32;
        ok &= a > pa && prod > pp && (lower <= pa || &lower * f.prime_of(x) <= pp);
        pa = a;
        pp = prod;
    }
    r.check("arity_invariants", ok);

    r.section("layer zero");
    let g = build_gadget_class(&BTreeSet::from([0]), 0)?;
    let rep = check_class_properties(&g.class, 3, &CheckOptions::default())?;
    r.line(format!(
        "{}: bound {}, {} symbols, {} problems",
        g.class.name(),
        g.bound(),
        g.vocabulary().len(),
        rep.problems
    ));
    r.check("layer_zero_class", rep.passed());

    r.section("categoricity");
    let table = EnumerationTable::new(
        (0..10)
            .map(|x| (0, 0, x))
            .chain([(1, 1, 0), (1, 0, 2)])
            .collect(),
    );
    let quiet = categoricity_verdict(&table, 1, 2, 8);
    let loud = categoricity_verdict(&table, 0, 2, 8);
    r.line(format!("index 1: {}", quiet.verdict.word()));
    r.line(format!("index 0: {}", loud.verdict.word()));
    r.check(
        "verdicts",
        quiet.categorical_at_horizon() && !loud.categorical_at_horizon(),
    );

    let mut ok = true;
    for s in 0..4u64 {
        let lower = compute_d(&table, 0, s);
        let bound = layer_bound(s);
        let cut: BTreeSet<u64> = compute_d(&table, 0, s + 2)
            .into_iter()
            .filter(|c| bound >= (*c).into())
            .collect();
        ok &= cut == lower;
    }
    r.check("d_coherence", ok);

    r.section("sort types");
    let g = build_gadget_class(&BTreeSet::from([0, 2]), 2)?;
    let mut ok = true;
    for n in 0..g.sorts().min(3) {
        let counted = count_sort_types(&g, n)?;
        let rendered = type_count(&sort_rendering(&g, n)?, 1, CAP)?;
        r.line(format!("sort {n}: {counted} types, rendering {rendered}"));
        ok &= counted == rendered;
    }
    r.check("sort_types", ok);
    Ok(r.finish("gadget"))
}
