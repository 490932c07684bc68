use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::chain::{LayerSpec, LayeredVocabulary};
use super::classes::SortBounded;
use crate::axioms::exists_sentence;
use crate::encoder::{encode, label_all, EncodedClass, EncodedStructure};
use crate::error::{Error, Result};
use crate::fraisse::{
    build_generic_approx, check_class_properties, enumerate_age_upto, AgeClass, CheckOptions,
    ClassReport, GenericApproximation, GenericOptions,
};
use crate::logic::{evaluate_with, EvalOptions, Sentence};
use crate::report::{verdict_line, Report, Summary, Verdict, Witness};
use crate::structure::{canonical_structure, CanonKey, Structure};

#[derive(Debug, Clone)]
pub struct LayerOptions {
    /// Bound for the per-layer class checks.
    pub check_bound: usize,
    /// Level of the P-part approximations.
    pub level: usize,
    /// Size cap of the P-part approximations.
    pub size_cap: usize,
    /// Number of n-pairs labelling each relation instance.
    pub multiplicity: usize,
    /// Seed for the order in which labels are laid out.
    pub seed: u64,
    pub check: CheckOptions,
}

impl Default for LayerOptions {
    fn default() -> Self {
        LayerOptions {
            check_bound: 3,
            level: 4,
            size_cap: 6,
            multiplicity: 4,
            seed: 0,
            check: CheckOptions::default(),
        }
    }
}

/// One layer: the class of its P-parts, the encoded class, and the approximant.
pub struct Layer {
    pub index: usize,
    pub name: String,
    pub class: Box<dyn AgeClass>,
    pub encoded: EncodedClass,
    pub check: ClassReport,
    pub approximation: GenericApproximation,
    pub approximant: EncodedStructure,
}

pub struct LayerPresentation {
    pub spec: LayerSpec,
    pub vocab: LayeredVocabulary,
    pub layers: Vec<Layer>,
    pub options: LayerOptions,
}

impl LayerPresentation {
    /// Layer `i` (from 1).
    pub fn layer(&self, i: usize) -> &Layer {
        &self.layers[i - 1]
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }
}

impl Report for LayerPresentation {
    fn summary(&self) -> Summary {
        let mut s = Summary::new();
        let join =
            |f: &dyn Fn(&Layer) -> String| self.layers.iter().map(f).collect::<Vec<_>>().join(",");
        s.push("layers", self.layers.len())
            .push(
                "arity_bounds",
                self.vocab
                    .bounds()
                    .iter()
                    .map(|b| b.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            )
            .push("level", self.options.level)
            .push("multiplicity", self.options.multiplicity)
            .push(
                "p_sizes",
                join(&|l| l.approximation.structure.size().to_string()),
            )
            .push(
                "u_sizes",
                join(&|l| l.approximant.structure.size().to_string()),
            )
            .push(
                "saturated",
                join(&|l| (!l.approximation.unsaturated).to_string()),
            )
            .push("verdict", "pass");
        s
    }

    fn body(&self) -> String {
        let mut out = String::new();
        for l in &self.layers {
            let _ = writeln!(
                out,
                "layer {} ({}): arity bound {}, class {}",
                l.index,
                l.name,
                self.vocab.bound(l.index),
                l.class.name()
            );
            verdict_line(&mut out, "  class check", &l.check.overall());
            let _ = writeln!(
                out,
                "  P-part: {} elements at level {}{}",
                l.approximation.structure.size(),
                l.approximation.level,
                if l.approximation.unsaturated {
                    " (unsaturated)"
                } else {
                    ""
                }
            );
            let _ = writeln!(
                out,
                "  approximant: {} elements, {} n-pairs",
                l.approximant.structure.size(),
                l.approximant.npairs.len()
            );
        }
        out
    }

    fn passed(&self) -> bool {
        true
    }
}

/// Check every layer class, build the encoded classes and the approximants.
/// A layer failing its class check refuses the construction.
pub fn build_layered_presentation(
    spec: &LayerSpec,
    opts: &LayerOptions,
) -> Result<LayerPresentation> {
    let vocab = spec.vocabulary()?;
    let mut layers = Vec::new();
    for i in 1..=vocab.len() {
        let class = spec.class(i)?;
        let check = check_class_properties(class.as_ref(), opts.check_bound, &opts.check)?;
        if let Verdict::Fail(w) = check.overall() {
            return Err(Error::Property(format!(
                "layer {i} fails its class check: {}",
                w.render().trim_end()
            )));
        }
        let encoded = EncodedClass::new(spec.class(i)?)?;
        let approximation = build_generic_approx(
            class.as_ref(),
            opts.level,
            &GenericOptions {
                size_cap: opts.size_cap,
                ..GenericOptions::default()
            },
        )?;
        let approximant = encode_approximant(
            &encoded,
            &approximation.structure,
            opts.multiplicity,
            opts.seed.wrapping_add(i as u64),
        )?;
        layers.push(Layer {
            index: i,
            name: spec.layers[i - 1].name.clone(),
            class,
            encoded,
            check,
            approximation,
            approximant,
        });
    }
    Ok(LayerPresentation {
        spec: spec.clone(),
        vocab,
        layers,
        options: opts.clone(),
    })
}

/// Encode `a` with every relation instance labelled `multiplicity` times, the
/// labels laid out in a seeded random order.
pub fn encode_approximant(
    k: &EncodedClass,
    a: &Structure,
    multiplicity: usize,
    seed: u64,
) -> Result<EncodedStructure> {
    let enc = k.encoding();
    let base = label_all(enc, a);
    let mut labels = Vec::with_capacity(base.len() * multiplicity);
    for _ in 0..multiplicity {
        labels.extend(base.iter().cloned());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    labels.shuffle(&mut rng);
    encode(enc, a, &labels)
}

#[derive(Debug, Clone)]
pub struct AgreementReport {
    pub i: usize,
    pub j: usize,
    pub bound: usize,
    pub q_bound: usize,
    pub members_i: usize,
    pub reducts_j: usize,
    pub axioms_i: usize,
    pub axioms_j: usize,
    pub verdict: Verdict,
}

impl Report for AgreementReport {
    fn summary(&self) -> Summary {
        let mut s = Summary::new();
        s.push("lower", self.i)
            .push("upper", self.j)
            .push("bound", self.bound)
            .push("q_bound", self.q_bound)
            .push("members_lower", self.members_i)
            .push("reducts_upper", self.reducts_j)
            .push("axioms_lower", self.axioms_i)
            .push("axioms_upper", self.axioms_j)
            .push("verdict", self.verdict.word());
        s
    }

    fn body(&self) -> String {
        let mut out = format!(
            "layers {} and {} on structures of size <= {} with at most {} Q-elements\n",
            self.i, self.j, self.bound, self.q_bound
        );
        let _ = writeln!(
            out,
            "{} members below, {} reducts from above",
            self.members_i, self.reducts_j
        );
        verdict_line(&mut out, "agreement", &self.verdict);
        out
    }

    fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

/// Compare layer `i` with the reducts of layer `j` (both from 1, `i <= j`).
pub fn check_layer_agreement(
    p: &LayerPresentation,
    i: usize,
    j: usize,
    bound: usize,
    cap: u64,
) -> Result<AgreementReport> {
    if i == 0 || j > p.len() || i > j {
        return Err(Error::Invalid(format!(
            "layers must satisfy 1 <= i <= j <= {}, got {i} and {j}",
            p.len()
        )));
    }
    let q = p.vocab.bound(i);
    if i == j {
        return Ok(AgreementReport {
            i,
            j,
            bound,
            q_bound: q,
            members_i: 0,
            reducts_j: 0,
            axioms_i: 0,
            axioms_j: 0,
            verdict: Verdict::Pass,
        });
    }
    let mut r = compare_layer_classes(&p.layer(i).encoded, &p.layer(j).encoded, q, bound, cap)?;
    r.i = i;
    r.j = j;
    Ok(r)
}

/// Members of `lower` against the `lower`-reducts of members of `upper`, both
/// restricted to at most `q` Q-elements and size `bound`; then the scheme (c)
/// lists of the two restricted classes.
pub fn compare_layer_classes(
    lower: &dyn AgeClass,
    upper: &dyn AgeClass,
    q: usize,
    bound: usize,
    cap: u64,
) -> Result<AgreementReport> {
    let lo = SortBounded::new(lower, "Q", q)?;
    let hi = SortBounded::new(upper, "Q", q)?;
    let target = lower.vocabulary().clone();
    let mut below: BTreeMap<CanonKey, Structure> = BTreeMap::new();
    for level in enumerate_age_upto(&lo, bound, cap)? {
        for s in level {
            let (key, c) = canonical_structure(&s);
            below.entry(key).or_insert(c);
        }
    }
    let mut above: BTreeMap<CanonKey, Structure> = BTreeMap::new();
    let mut upper_witness: BTreeMap<CanonKey, Structure> = BTreeMap::new();
    for level in enumerate_age_upto(&hi, bound, cap)? {
        for s in level {
            let (key, r) = canonical_structure(&s.reduct(target.clone())?);
            upper_witness.entry(key.clone()).or_insert(s);
            above.entry(key).or_insert(r);
        }
    }
    let mut verdict = Verdict::Pass;
    if let Some((_, s)) = below.iter().find(|(k, _)| !above.contains_key(*k)) {
        verdict = Verdict::Fail(
            Witness::new(format!(
                "member of {} is not the reduct of any member of {}",
                lower.name(),
                upper.name()
            ))
            .with("A", s),
        );
    } else if let Some((k, s)) = above.iter().find(|(k, _)| !below.contains_key(*k)) {
        verdict = Verdict::Fail(
            Witness::new(format!(
                "reduct of a member of {} is not in {}",
                upper.name(),
                lower.name()
            ))
            .with("A", s)
            .with("B", &upper_witness[k]),
        );
    }
    let lines = |m: &BTreeMap<CanonKey, Structure>| {
        let mut v: Vec<String> = m
            .values()
            .map(|s| exists_sentence(s, usize::MAX).to_line())
            .collect();
        v.sort();
        v
    };
    let (ax_lo, ax_hi) = (lines(&below), lines(&above));
    if verdict.is_pass() && ax_lo != ax_hi {
        verdict = Verdict::Fail(Witness::new("existential axiom lists differ"));
    }
    Ok(AgreementReport {
        i: 0,
        j: 0,
        bound,
        q_bound: q,
        members_i: below.len(),
        reducts_j: above.len(),
        axioms_i: ax_lo.len(),
        axioms_j: ax_hi.len(),
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stabilization {
    Index(usize),
    Unstable { horizon: usize },
}

#[derive(Debug, Clone)]
pub struct StabilizationReport {
    pub sentence: String,
    pub horizon: usize,
    /// Truth of the sentence in approximants `1..=horizon`.
    pub truth: Vec<bool>,
    pub result: Stabilization,
}

impl Report for StabilizationReport {
    fn summary(&self) -> Summary {
        let mut s = Summary::new();
        s.push("horizon", self.horizon).push(
            "truth",
            self.truth
                .iter()
                .map(|t| if *t { "1" } else { "0" })
                .collect::<String>(),
        );
        match self.result {
            Stabilization::Index(i) => s.push("index", i).push("verdict", "pass"),
            Stabilization::Unstable { .. } => s.push("index", "unstable").push("verdict", "fail"),
        };
        s
    }

    fn body(&self) -> String {
        let mut out = format!("sentence {}\n", self.sentence);
        for (i, t) in self.truth.iter().enumerate() {
            let _ = writeln!(
                out,
                "layer {}: {}",
                i + 1,
                if *t { "holds" } else { "fails" }
            );
        }
        match self.result {
            Stabilization::Index(i) => {
                let _ = writeln!(out, "holds from layer {i} up to {}", self.horizon);
            }
            Stabilization::Unstable { horizon } => {
                let _ = writeln!(out, "unstable at horizon {horizon}");
            }
        }
        out
    }

    fn passed(&self) -> bool {
        matches!(self.result, Stabilization::Index(_))
    }
}

/// The smallest `i` in `1..=horizon` with `phi` true in every approximant from
/// `i` to `horizon`. Symbols absent from early layers read as empty.
pub fn detect_stabilization(
    p: &LayerPresentation,
    phi: &Sentence,
    horizon: usize,
) -> Result<StabilizationReport> {
    if horizon > p.len() {
        return Err(Error::Invalid(format!(
            "horizon {horizon} exceeds the {} layers of the presentation",
            p.len()
        )));
    }
    let opts = EvalOptions {
        absent_as_empty: true,
        ..EvalOptions::default()
    };
    let mut truth = Vec::with_capacity(horizon);
    for j in 1..=horizon {
        truth.push(evaluate_with(
            &p.layer(j).approximant.structure,
            phi,
            &opts,
        )?);
    }
    let result = if horizon == 0 {
        Stabilization::Index(0)
    } else {
        let tail = truth.iter().rev().take_while(|t| **t).count();
        if tail == 0 {
            Stabilization::Unstable { horizon }
        } else {
            Stabilization::Index(horizon - tail + 1)
        }
    };
    Ok(StabilizationReport {
        sentence: phi.to_line(),
        horizon,
        truth,
        result,
    })
}
