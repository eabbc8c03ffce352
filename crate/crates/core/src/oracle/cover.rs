//! Smallest subsets of a feasible set that are β-approximate at every probe.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::oracle::brute::{dot, enumerate_feasible};
use crate::oracle::sampling::Probe;
use crate::oracle::verify::probe_weight;
use crate::rational::Q;

/// Largest feasible set searched exhaustively.
pub const MAX_COVER_SOLUTIONS: usize = 12;

/// A smallest set of feasible solutions (indices into
/// [`enumerate_feasible`] order) containing a β-approximate solution at every
/// probe. Among sets of that size, the first in bitmask order is returned.
/// This is a lower bound on the size of any β-approximation set.
pub fn minimum_cover(instance: &ProblemInstance, beta: &Q, probes: &[Probe]) -> Result<Vec<usize>> {
    let all = enumerate_feasible(instance)?;
    let n = all.len();
    if n > MAX_COVER_SOLUTIONS {
        return Err(Error::TooLarge(format!(
            "minimum cover needs at most {MAX_COVER_SOLUTIONS} feasible solutions, got {n}"
        )));
    }
    let mut needs: BTreeSet<u32> = BTreeSet::new();
    for p in probes {
        let w = probe_weight(instance, p)?;
        let values: Vec<Q> = all.iter().map(|x| dot(&x.f, &w)).collect();
        let best = values.iter().fold(&values[0], |b, v| if instance.better(v, b) { v } else { b });
        let mask = values
            .iter()
            .enumerate()
            .filter(|(_, v)| instance.within(v, best, beta))
            .fold(0u32, |m, (i, _)| m | 1 << i);
        needs.insert(mask);
    }
    for size in 0..=n as u32 {
        for set in 0u32..1 << n {
            if set.count_ones() == size && needs.iter().all(|m| m & set != 0) {
                return Ok((0..n).filter(|i| set >> i & 1 == 1).collect());
            }
        }
    }
    unreachable!("the full feasible set covers every probe")
}

pub fn minimum_cover_size(instance: &ProblemInstance, beta: &Q, probes: &[Probe]) -> Result<usize> {
    minimum_cover(instance, beta, probes).map(|c| c.len())
}
