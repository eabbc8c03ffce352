//! Ground truth by full enumeration of the feasible set.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Encoding, ParameterVector, Payload, ProblemInstance, Sense, SolutionRecord};
use crate::rational::{to_f64, Q};
use crate::solvers::linear::{self, Coeffs};
use crate::solvers::offset_weight;

pub const MAX_CUT_VERTICES: usize = 10;
pub const MAX_KNAPSACK_ITEMS: usize = 15;
pub const MAX_INDEPENDENCE_ELEMENTS: usize = 15;

/// Every feasible solution of the instance with its objective vector, in a
/// fixed order (explicit index, or subset bitmask order).
pub fn enumerate_feasible(instance: &ProblemInstance) -> Result<Vec<SolutionRecord>> {
    match instance.payload() {
        Payload::Explicit(list) => Ok(list
            .solutions
            .iter()
            .enumerate()
            .map(|(index, s)| SolutionRecord { encoding: Encoding::Index { index }, f: s.f.clone() })
            .collect()),
        _ => {
            let rows = instance.scaled_rows().expect("structured payload");
            Ok(enumerate_structured(instance)?
                .into_iter()
                .map(|(encoding, c)| SolutionRecord { encoding, f: to_rational(&c, &rows.scale) })
                .collect())
        }
    }
}

fn to_rational(c: &[i128], scale: &BigInt) -> Vec<Q> {
    c.iter().map(|v| Q::new(BigInt::from(*v), scale.clone())).collect()
}

fn subset(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

fn enumerate_structured(instance: &ProblemInstance) -> Result<Vec<(Encoding, Coeffs)>> {
    let rows = instance.scaled_rows().expect("structured payload");
    let width = instance.k() + 1;
    let sum = |members: &[usize]| {
        let mut acc = linear::zeros(width);
        for e in members {
            linear::add_assign(&mut acc, &rows.rows[*e]);
        }
        acc
    };
    let too_large = |what: &str, n: usize, cap: usize| {
        Err(Error::TooLarge(format!("brute force handles at most {cap} {what}, got {n}")))
    };
    let mut out = Vec::new();
    match instance.payload() {
        Payload::Mincut(g) => {
            if g.vertices > MAX_CUT_VERTICES {
                return too_large("vertices", g.vertices, MAX_CUT_VERTICES);
            }
            let free: Vec<usize> = (0..g.vertices).filter(|v| *v != g.source && *v != g.sink).collect();
            for mask in 0..1u32 << free.len() {
                let mut side: Vec<usize> = subset(mask, free.len()).into_iter().map(|i| free[i]).collect();
                side.push(g.source);
                side.sort_unstable();
                let arcs = g.cut_arcs(&side)?;
                out.push((Encoding::Cut { source_side: side }, sum(&arcs)));
            }
        }
        Payload::Knapsack(d) => {
            let n = d.items.len();
            if n > MAX_KNAPSACK_ITEMS {
                return too_large("items", n, MAX_KNAPSACK_ITEMS);
            }
            for mask in 0..1u32 << n {
                let items = subset(mask, n);
                let weight = items.iter().fold(0u64, |acc, e| acc.saturating_add(d.items[*e].w));
                if weight <= d.capacity {
                    let c = sum(&items);
                    out.push((Encoding::Items { items }, c));
                }
            }
        }
        Payload::Independence(s) => {
            let n = s.len();
            if n > MAX_INDEPENDENCE_ELEMENTS {
                return too_large("elements", n, MAX_INDEPENDENCE_ELEMENTS);
            }
            for mask in 0..1u32 << n {
                let elements = subset(mask, n);
                if s.is_independent(&elements) {
                    let c = sum(&elements);
                    out.push((Encoding::Elements { elements }, c));
                }
            }
        }
        Payload::Explicit(_) => unreachable!(),
    }
    Ok(out)
}

/// Drops duplicates and solutions dominated componentwise (weakly worse in
/// every component), keeping the first of each group. Weights are
/// nonnegative, so the optimum over the survivors equals the optimum over
/// all solutions.
fn pareto<T: Clone + Eq + std::hash::Hash + Ord>(items: Vec<(Encoding, Vec<T>)>, sense: Sense) -> Vec<(Encoding, Vec<T>)> {
    let mut seen = HashSet::new();
    let unique: Vec<_> = items.into_iter().filter(|(_, f)| seen.insert(f.clone())).collect();
    let dominates = |a: &[T], b: &[T]| match sense {
        Sense::Minimize => a.iter().zip(b).all(|(x, y)| x <= y),
        Sense::Maximize => a.iter().zip(b).all(|(x, y)| x >= y),
    };
    unique
        .iter()
        .enumerate()
        .filter(|(i, (_, f))| !unique.iter().enumerate().any(|(j, (_, g))| j != *i && dominates(g, f)))
        .map(|(_, x)| x.clone())
        .collect()
}

/// `Σ_i f_i·w_i`, skipping zero components.
pub(crate) fn dot(f: &[Q], w: &[Q]) -> Q {
    f.iter().zip(w).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum()
}

/// A fixed list of objective vectors with a float shadow, used to find the
/// best value under many weights quickly but exactly.
#[derive(Clone, Debug)]
pub struct Evaluator {
    exact: Vec<Vec<Q>>,
    approx: Vec<Vec<f64>>,
    sense: Sense,
}

impl Evaluator {
    pub fn new(vectors: Vec<Vec<Q>>, sense: Sense) -> Self {
        let approx = vectors.iter().map(|f| f.iter().map(approx).collect()).collect();
        Evaluator { exact: vectors, approx, sense }
    }

    pub fn len(&self) -> usize {
        self.exact.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exact.is_empty()
    }

    pub fn vector(&self, i: usize) -> &[Q] {
        &self.exact[i]
    }

    /// Index and exact value of the best vector under `w` (lowest index on
    /// ties). Candidates are shortlisted in floating point and decided in
    /// exact arithmetic.
    pub fn best(&self, w: &[Q]) -> (usize, Q) {
        assert!(!self.exact.is_empty(), "evaluator over an empty set");
        let wf: Vec<f64> = w.iter().map(approx).collect();
        let vals: Vec<f64> = self.approx.iter().map(|f| f.iter().zip(&wf).map(|(a, b)| a * b).sum()).collect();
        let finite = vals.iter().all(|v| v.is_finite());
        let target = match self.sense {
            Sense::Minimize => vals.iter().cloned().fold(f64::INFINITY, f64::min),
            Sense::Maximize => vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        };
        let tol = 1e-9 * target.abs().max(f64::MIN_POSITIVE);
        let mut best: Option<(usize, Q)> = None;
        for (i, v) in vals.iter().enumerate() {
            if finite && (v - target).abs() > tol {
                continue;
            }
            let exact = dot(&self.exact[i], w);
            let improves = match &best {
                None => true,
                Some((_, b)) => match self.sense {
                    Sense::Minimize => exact < *b,
                    Sense::Maximize => exact > *b,
                },
            };
            if improves {
                best = Some((i, exact));
            }
        }
        best.expect("at least one candidate")
    }
}

fn approx(v: &Q) -> f64 {
    to_f64(v).unwrap_or(f64::INFINITY)
}

/// Brute-force oracle: the Pareto-reduced feasible set of an enumerable
/// instance.
#[derive(Clone, Debug)]
pub struct BruteForce {
    records: Vec<SolutionRecord>,
    eval: Evaluator,
    feasible: usize,
}

impl BruteForce {
    pub fn new(instance: &ProblemInstance) -> Result<Self> {
        let sense = instance.sense();
        let (reduced, feasible) = match instance.payload() {
            Payload::Explicit(_) => {
                let all: Vec<(Encoding, Vec<Q>)> =
                    enumerate_feasible(instance)?.into_iter().map(|r| (r.encoding, r.f)).collect();
                let n = all.len();
                (pareto(all, sense), n)
            }
            _ => {
                let rows = instance.scaled_rows().expect("structured payload");
                let all: Vec<(Encoding, Vec<i128>)> =
                    enumerate_structured(instance)?.into_iter().map(|(e, c)| (e, c.to_vec())).collect();
                let n = all.len();
                let reduced = pareto(all, sense).into_iter().map(|(e, c)| (e, to_rational(&c, &rows.scale)));
                (reduced.collect(), n)
            }
        };
        if reduced.is_empty() {
            return Err(Error::DegenerateInstance("no feasible solution".into()));
        }
        let records: Vec<SolutionRecord> =
            reduced.into_iter().map(|(encoding, f)| SolutionRecord { encoding, f }).collect();
        let eval = Evaluator::new(records.iter().map(|r| r.f.clone()).collect(), sense);
        Ok(BruteForce { records, eval, feasible })
    }

    /// Number of feasible solutions before reduction.
    pub fn feasible_count(&self) -> usize {
        self.feasible
    }

    /// Solutions that can be optimal for some nonnegative weight.
    pub fn candidates(&self) -> &[SolutionRecord] {
        &self.records
    }

    /// Optimum under an augmented weight `w` on `(F_0, …, F_K)`.
    pub fn optimum_weight(&self, w: &[Q]) -> (&SolutionRecord, Q) {
        let (i, v) = self.eval.best(w);
        (&self.records[i], v)
    }

    /// `f*(λ)` with an optimizer.
    pub fn optimum(&self, instance: &ProblemInstance, lambda: &ParameterVector) -> Result<(&SolutionRecord, Q)> {
        instance.check_domain(lambda)?;
        Ok(self.optimum_weight(&offset_weight(instance, lambda)))
    }
}

/// Exact optimizer and optimal value at `λ` by enumeration.
pub fn brute_force_optimum(instance: &ProblemInstance, lambda: &ParameterVector) -> Result<(SolutionRecord, Q)> {
    let bf = BruteForce::new(instance)?;
    let (x, v) = bf.optimum(instance, lambda)?;
    Ok((x.clone(), v))
}
