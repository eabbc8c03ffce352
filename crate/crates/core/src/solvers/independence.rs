//! Maximum-weight independent sets by the greedy algorithm, with exact rank
//! quotients for small ground sets.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Encoding, ProblemInstance, SolutionRecord};
use crate::rational::{serde_q, Q};
use crate::solvers::linear::Scalarization;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementCost {
    pub a: u64,
    pub b: Vec<u64>,
}

/// The independent sets of the ground set `{0, …, n−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Family {
    /// All subsets of size at most `rank`.
    UniformMatroid { rank: usize },
    /// Edge sets in which vertex `v` has degree at most `capacities[v]`
    /// (1 when omitted). Element `e` is `edges[e]`.
    Matching {
        vertices: usize,
        edges: Vec<(usize, usize)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        capacities: Option<Vec<usize>>,
    },
    /// An explicit downward-closed list of independent sets.
    Explicit { independent_sets: Vec<Vec<usize>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IndependenceSpec")]
pub struct IndependenceSystem {
    pub elements: Vec<ElementCost>,
    pub family: Family,
    /// Approximation guarantee of greedy on this family (rank-quotient bound).
    #[serde(with = "serde_q")]
    pub declared_alpha: Q,
    #[serde(skip)]
    explicit_sets: HashSet<u64>,
}

#[derive(Deserialize)]
struct IndependenceSpec {
    elements: Vec<ElementCost>,
    family: Family,
    #[serde(default, with = "crate::rational::serde_q_opt")]
    declared_alpha: Option<Q>,
}

impl TryFrom<IndependenceSpec> for IndependenceSystem {
    type Error = Error;

    fn try_from(s: IndependenceSpec) -> Result<Self> {
        IndependenceSystem::new(s.elements, s.family, s.declared_alpha)
    }
}

/// Ground sets beyond this size are rejected by the exact rank quotient.
pub const RANK_QUOTIENT_LIMIT: usize = 20;

impl IndependenceSystem {
    pub fn new(elements: Vec<ElementCost>, family: Family, declared_alpha: Option<Q>) -> Result<Self> {
        let mut sys = IndependenceSystem { elements, family, declared_alpha: Q::one(), explicit_sets: HashSet::new() };
        sys.index_family()?;
        sys.declared_alpha = match declared_alpha {
            Some(a) => a,
            None => match &sys.family {
                Family::UniformMatroid { .. } => Q::one(),
                Family::Matching { .. } => Q::from_integer(BigInt::from(2)),
                Family::Explicit { .. } => rank_quotient_exact(&sys)?,
            },
        };
        Ok(sys)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Builds the lookup for explicit families and checks the family against
    /// the ground set, including downward closure.
    fn index_family(&mut self) -> Result<()> {
        let n = self.elements.len();
        match &self.family {
            Family::UniformMatroid { .. } => {}
            Family::Matching { vertices, edges, capacities } => {
                if edges.len() != n {
                    return Err(Error::Schema(format!("{} edges for {n} elements", edges.len())));
                }
                if edges.iter().any(|(u, v)| u >= vertices || v >= vertices) {
                    return Err(Error::Schema("matching edge endpoint out of range".into()));
                }
                if capacities.as_ref().is_some_and(|c| c.len() != *vertices) {
                    return Err(Error::Schema("one capacity per vertex expected".into()));
                }
            }
            Family::Explicit { independent_sets } => {
                if n > 64 {
                    return Err(Error::TooLarge("explicit families support at most 64 elements".into()));
                }
                let mut masks = HashSet::new();
                for set in independent_sets {
                    if set.iter().any(|e| *e >= n) {
                        return Err(Error::Schema("independent set element out of range".into()));
                    }
                    masks.insert(set.iter().fold(0u64, |m, e| m | 1 << e));
                }
                masks.insert(0);
                for m in &masks {
                    let mut rest = *m;
                    while rest != 0 {
                        let bit = rest & rest.wrapping_neg();
                        if !masks.contains(&(m & !bit)) {
                            return Err(Error::InvalidArgument(
                                "explicit family is not closed under taking subsets".into(),
                            ));
                        }
                        rest &= rest - 1;
                    }
                }
                self.explicit_sets = masks;
            }
        }
        Ok(())
    }

    pub(crate) fn validate(&self, k: usize) -> Result<()> {
        for (e, el) in self.elements.iter().enumerate() {
            if el.b.len() != k {
                return Err(Error::Schema(format!("element {e} has {} parametric costs, expected {k}", el.b.len())));
            }
        }
        if self.declared_alpha < Q::one() {
            return Err(Error::InvalidArgument("declared alpha must be at least 1".into()));
        }
        Ok(())
    }

    /// Membership test for a set of distinct, in-range elements.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        match &self.family {
            Family::UniformMatroid { rank } => set.len() <= *rank,
            Family::Matching { vertices, edges, capacities } => {
                let mut degree = vec![0usize; *vertices];
                for e in set {
                    let (u, v) = edges[*e];
                    degree[u] += 1;
                    degree[v] += 1;
                }
                degree
                    .iter()
                    .enumerate()
                    .all(|(v, d)| *d <= capacities.as_ref().map_or(1, |c| c[v]))
            }
            Family::Explicit { .. } => {
                self.explicit_sets.contains(&set.iter().fold(0u64, |m, e| m | 1 << e))
            }
        }
    }

    pub fn check_independent(&self, set: &[usize]) -> Result<()> {
        if set.windows(2).any(|w| w[0] >= w[1]) || set.last().is_some_and(|e| *e >= self.len()) {
            return Err(Error::Schema("element set must be sorted, distinct and in range".into()));
        }
        if !self.is_independent(set) {
            return Err(Error::InvalidArgument("element set is not independent".into()));
        }
        Ok(())
    }
}

/// Greedy: scan elements by profit, highest first (ties by index), keeping
/// each element with positive profit that preserves independence.
pub fn greedy(instance: &ProblemInstance, sys: &IndependenceSystem, sig: &Scalarization) -> SolutionRecord {
    let rows = instance.scaled_rows().expect("independence instances carry cost rows");
    let mut order: Vec<usize> = (0..sys.len()).filter(|e| sig.is_positive(&rows.rows[*e])).collect();
    order.sort_by(|x, y| sig.compare(&rows.rows[*y], &rows.rows[*x]).then(x.cmp(y)));
    let mut chosen: Vec<usize> = Vec::new();
    for e in order {
        chosen.push(e);
        chosen.sort_unstable();
        if !sys.is_independent(&chosen) {
            chosen.retain(|x| *x != e);
        }
    }
    let f = rows.sum_rational(chosen.iter().copied(), instance.k() + 1);
    SolutionRecord { encoding: Encoding::Elements { elements: chosen }, f }
}

fn members(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|i| mask >> i & 1 == 1).collect()
}

/// Exact rank quotient `max_F r(F)/l(F)` over subsets `F` with `l(F) ≠ 0`,
/// where `r` and `l` are the largest and smallest sizes of a maximal
/// independent subset of `F`. Returns 1 when no such `F` exists.
pub fn rank_quotient_exact(sys: &IndependenceSystem) -> Result<Q> {
    let n = sys.len();
    if n > RANK_QUOTIENT_LIMIT {
        return Err(Error::TooLarge(format!("rank quotient needs n <= {RANK_QUOTIENT_LIMIT}, got {n}")));
    }
    let full = (1usize << n) - 1;
    let indep: Vec<bool> = (0..=full).map(|m| sys.is_independent(&members(m))).collect();

    let mut upper = vec![0u32; full + 1];
    for m in 1..=full {
        upper[m] = if indep[m] { m.count_ones() } else { 0 };
        let mut rest = m;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            upper[m] = upper[m].max(upper[m & !bit]);
            rest &= rest - 1;
        }
    }

    // B is maximal in F iff B ⊆ F and F avoids every element extending B.
    let mut lower = vec![u32::MAX; full + 1];
    for b in 0..=full {
        if !indep[b] {
            continue;
        }
        let extend = (0..n).filter(|e| b >> e & 1 == 0 && indep[b | 1 << e]).fold(0, |acc, e| acc | 1 << e);
        let free = full & !extend & !b;
        let size = b.count_ones();
        let mut sub = free;
        loop {
            let f = b | sub;
            lower[f] = lower[f].min(size);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
    }

    let mut best = Q::one();
    for f in 1..=full {
        if lower[f] != 0 && lower[f] != u32::MAX {
            let ratio = Q::new(upper[f].into(), lower[f].into());
            if ratio > best {
                best = ratio;
            }
        }
    }
    Ok(best)
}
