use std::collections::HashSet;

use super::check::enumerate_age_upto;
use super::class::AgeClass;
use crate::error::Result;
use crate::logic::{qf_type, QfType};
use crate::structure::TupleIter;

/// Number of complete quantifier-free n-types realised in members of the class:
/// the distinct types of n-tuples that enumerate a member of size at most n.
pub fn type_count(k: &(impl AgeClass + ?Sized), n: usize, cap: u64) -> Result<u64> {
    Ok(types_of(k, n, cap)?.len() as u64)
}

pub fn types_of(k: &(impl AgeClass + ?Sized), n: usize, cap: u64) -> Result<HashSet<QfType>> {
    let levels = enumerate_age_upto(k, n, cap)?;
    let mut seen = HashSet::new();
    for (size, level) in levels.iter().enumerate() {
        for m in level {
            for t in TupleIter::new(size, n) {
                if covers(&t, size) {
                    seen.insert(qf_type(m, &t)?);
                }
            }
        }
    }
    Ok(seen)
}

fn covers(t: &[usize], size: usize) -> bool {
    let mut hit = vec![false; size];
    for x in t {
        hit[*x] = true;
    }
    hit.iter().all(|h| *h)
}
