use std::fmt::Write as _;

use super::codec::p_part;
use super::language::{Encoding, LIndex};
use crate::error::{Error, Result};
use crate::logic::qf_type;
use crate::report::{verdict_line, Report, Summary, Verdict, Witness};
use crate::structure::{Elem, Structure, TupleIter};

#[derive(Debug, Clone)]
pub struct DenseReductReport {
    pub depth: usize,
    pub pairs: u64,
    pub skipped: u64,
    pub saturation_note: Option<String>,
    pub verdict: Verdict,
}

impl Report for DenseReductReport {
    fn summary(&self) -> Summary {
        let mut s = Summary::new();
        s.push("depth", self.depth)
            .push("pairs_checked", self.pairs)
            .push("pairs_skipped", self.skipped)
            .push("verdict", self.verdict.word());
        s
    }

    fn body(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "P-tuples of length < {} with equal L0 types: {} conjugable pairs checked, {} skipped",
            self.depth, self.pairs, self.skipped
        );
        if let Some(note) = &self.saturation_note {
            let _ = writeln!(out, "note: {note}");
        }
        verdict_line(&mut out, "dense reduct", &self.verdict);
        out
    }

    fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

/// For P-tuples `a`, `b` of length `< depth` with the same L0 type, the map
/// `a -> b` is a partial isomorphism of `u` that extends by any one point.
/// `saturation` is the extension level `u` is known to have, if any.
pub fn check_dense_reduct(
    enc: &Encoding,
    u: &Structure,
    depth: usize,
    saturation: Option<usize>,
    cap: u64,
) -> Result<DenseReductReport> {
    let li = LIndex::of(u.vocab())?;
    let pp = p_part(enc, u)?;
    let p: Vec<Elem> = u.elems().filter(|e| u.holds(li.p, &[*e])).collect();
    let mut pairs = 0u64;
    let mut skipped = 0u64;
    let mut verdict = Verdict::Pass;
    'outer: for len in 0..depth {
        let tuples: Vec<Vec<Elem>> = TupleIter::new(p.len(), len).collect();
        if (tuples.len() as u64).saturating_mul(tuples.len() as u64) > cap {
            return Err(Error::cap("tuple pairs in dense reduct check", cap));
        }
        let l0_types = tuples
            .iter()
            .map(|t| qf_type(&pp, t))
            .collect::<Result<Vec<_>>>()?;
        let full: Vec<Vec<Elem>> = tuples
            .iter()
            .map(|t| t.iter().map(|i| p[*i]).collect())
            .collect();
        let u_types = full
            .iter()
            .map(|t| qf_type(u, t))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..tuples.len() {
            for j in 0..tuples.len() {
                if l0_types[i] != l0_types[j] {
                    skipped += 1;
                    continue;
                }
                pairs += 1;
                let (a, b) = (&full[i], &full[j]);
                if u_types[i] != u_types[j] {
                    verdict = Verdict::Fail(
                        Witness::new(format!(
                            "{} -> {} is not a partial isomorphism",
                            u.fmt_tuple(a),
                            u.fmt_tuple(b)
                        ))
                        .with("U", u),
                    );
                    break 'outer;
                }
                for c in u.elems() {
                    let mut ac = a.clone();
                    ac.push(c);
                    let want = qf_type(u, &ac)?;
                    let ok = u.elems().any(|d| {
                        let mut bd = b.clone();
                        bd.push(d);
                        qf_type(u, &bd).is_ok_and(|t| t == want)
                    });
                    if !ok {
                        verdict = Verdict::Fail(
                            Witness::new(format!(
                                "{} -> {} does not extend to {}",
                                u.fmt_tuple(a),
                                u.fmt_tuple(b),
                                u.name(c)
                            ))
                            .with("U", u),
                        );
                        break 'outer;
                    }
                }
            }
        }
    }
    let saturation_note = match (saturation, &verdict) {
        (Some(level), Verdict::Fail(_)) if level <= depth => Some(format!(
            "the structure is only saturated to level {level}, below the depth {depth}"
        )),
        (None, Verdict::Fail(_)) => Some("the structure is not known to be saturated".into()),
        _ => None,
    };
    Ok(DenseReductReport {
        depth,
        pairs,
        skipped,
        saturation_note,
        verdict,
    })
}
