//! Problem instances, parameter vectors and solution records.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, lcm_denominators, serde_q_vec, Q};
use crate::solvers::explicit::ExplicitList;
use crate::solvers::independence::IndependenceSystem;
use crate::solvers::knapsack::KnapsackData;
use crate::solvers::linear::ScaledRows;
use crate::solvers::mincut::CutGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    #[serde(alias = "min")]
    Minimize,
    #[serde(alias = "max")]
    Maximize,
}

/// A point `λ` of the parameter space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(#[serde(with = "serde_q_vec")] pub Vec<Q>);

impl ParameterVector {
    pub fn new(coords: Vec<Q>) -> Self {
        ParameterVector(coords)
    }

    pub fn zeros(k: usize) -> Self {
        ParameterVector(vec![Q::zero(); k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[Q] {
        &self.0
    }
}

impl fmt::Display for ParameterVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_q).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Problem-specific description of a feasible solution.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Encoding {
    /// Position in an explicit solution list.
    Index { index: usize },
    /// Source side of an s-t cut, sorted.
    Cut { source_side: Vec<usize> },
    /// Packed knapsack items, sorted.
    Items { items: Vec<usize> },
    /// Independent set of ground elements, sorted.
    Elements { elements: Vec<usize> },
}

impl Encoding {
    /// Short stable token, e.g. `items:0,2`.
    pub fn id(&self) -> String {
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        match self {
            Encoding::Index { index } => format!("x:{index}"),
            Encoding::Cut { source_side } => format!("cut:{}", join(source_side)),
            Encoding::Items { items } => format!("items:{}", join(items)),
            Encoding::Elements { elements } => format!("elements:{}", join(elements)),
        }
    }
}

/// A feasible solution with its augmented objective vector
/// `F = (f(x, λ^min), b_1(x), …, b_K(x))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub encoding: Encoding,
    #[serde(rename = "F", with = "serde_q_vec")]
    pub f: Vec<Q>,
}

impl SolutionRecord {
    pub fn id(&self) -> String {
        self.encoding.id()
    }

    /// The constant term `a(x) = F_0 − Σ_k λ^min_k F_k`.
    pub fn constant_term(&self, lambda_min: &ParameterVector) -> Q {
        let shift: Q = lambda_min.0.iter().zip(&self.f[1..]).map(|(l, f)| l * f).sum();
        &self.f[0] - shift
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
pub enum Payload {
    Explicit(ExplicitList),
    Mincut(CutGraph),
    Knapsack(KnapsackData),
    Independence(IndependenceSystem),
}

impl Payload {
    pub fn name(&self) -> &'static str {
        match self {
            Payload::Explicit(_) => "explicit",
            Payload::Mincut(_) => "mincut",
            Payload::Knapsack(_) => "knapsack",
            Payload::Independence(_) => "independence",
        }
    }

    /// Per-element `(a_e, b_{1,e}, …, b_{K,e})` for structured payloads.
    pub fn cost_rows(&self) -> Option<Vec<Vec<u64>>> {
        let rows = match self {
            Payload::Explicit(_) => return None,
            Payload::Mincut(g) => g.arcs.iter().map(|r| row(r.a, &r.b)).collect(),
            Payload::Knapsack(d) => d.items.iter().map(|r| row(r.a, &r.b)).collect(),
            Payload::Independence(s) => s.elements.iter().map(|r| row(r.a, &r.b)).collect(),
        };
        Some(rows)
    }

    /// The sense of structured problems: cuts minimize, the others maximize.
    pub fn natural_sense(&self) -> Option<Sense> {
        match self {
            Payload::Explicit(_) => None,
            Payload::Mincut(_) => Some(Sense::Minimize),
            Payload::Knapsack(_) | Payload::Independence(_) => Some(Sense::Maximize),
        }
    }
}

fn row(a: u64, b: &[u64]) -> Vec<u64> {
    std::iter::once(a).chain(b.iter().copied()).collect()
}

/// `λ^min_k = max{ −a_e / (K·b_{k,e}) : b_{k,e} ≠ 0 }`, or 0 when every
/// `b_{k,e}` vanishes.
pub fn compute_lambda_min(rows: &[Vec<u64>], k: usize) -> ParameterVector {
    let coords = (1..=k)
        .map(|j| {
            rows.iter()
                .filter(|r| r[j] != 0)
                .map(|r| -Q::new((r[0] as i64).into(), ((k as u64 * r[j]) as i64).into()))
                .max()
                .unwrap_or_else(Q::zero)
        })
        .collect();
    ParameterVector(coords)
}

/// `Σ_i w_i F_i`.
pub fn augmented_evaluate(f: &[Q], w: &[Q]) -> Result<Q> {
    if f.len() != w.len() {
        return Err(Error::InvalidArgument(format!(
            "weight has {} components, objective vector has {}",
            w.len(),
            f.len()
        )));
    }
    if let Some(index) = w.iter().position(|x| x.is_negative()) {
        return Err(Error::NegativeWeight { index });
    }
    Ok(f.iter().zip(w).map(|(a, b)| a * b).sum())
}

/// A linear K-parametric problem with its domain `Λ` and objective bounds.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    sense: Sense,
    k: usize,
    lambda_min: ParameterVector,
    lb: Q,
    ub: Q,
    alpha: Q,
    payload: Payload,
    rows: Option<ScaledRows>,
}

impl ProblemInstance {
    /// Builds an instance, computing `λ^min` when not supplied and deriving
    /// `LB`/`UB`. The sense must match the payload for structured problems.
    pub fn new(sense: Sense, k: usize, payload: Payload, lambda_min: Option<ParameterVector>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        if let Some(natural) = payload.natural_sense() {
            if natural != sense {
                return Err(Error::InvalidArgument(format!(
                    "{} problems are {:?}, not {:?}",
                    payload.name(),
                    natural,
                    sense
                )));
            }
        }
        match &payload {
            Payload::Explicit(list) => list.validate(k)?,
            Payload::Mincut(g) => g.validate(k)?,
            Payload::Knapsack(d) => d.validate(k)?,
            Payload::Independence(s) => s.validate(k)?,
        }
        let cost_rows = payload.cost_rows();
        let lambda_min = match (lambda_min, &cost_rows) {
            (Some(l), _) => {
                if l.len() != k {
                    return Err(Error::InvalidArgument(format!(
                        "lambda_min has {} coordinates, expected {k}",
                        l.len()
                    )));
                }
                l
            }
            (None, Some(rows)) => compute_lambda_min(rows, k),
            (None, None) => ParameterVector::zeros(k),
        };
        let alpha = match &payload {
            Payload::Independence(s) => s.declared_alpha.clone(),
            _ => Q::one(),
        };
        if alpha < Q::one() {
            return Err(Error::InvalidArgument("alpha must be at least 1".into()));
        }

        let (lb, ub, rows) = match (&payload, cost_rows) {
            (Payload::Explicit(list), _) => {
                let (lb, ub) = list.bounds()?;
                (lb, ub, None)
            }
            (_, Some(raw)) => {
                let shifted = shift_rows(&raw, &lambda_min)?;
                let (lb, ub) = structured_bounds(&shifted, &lambda_min, k)?;
                (lb, ub, Some(ScaledRows::from_rows(&shifted)))
            }
            (_, None) => unreachable!("structured payloads always have cost rows"),
        };

        Ok(ProblemInstance { sense, k, lambda_min, lb, ub, alpha, payload, rows })
    }

    pub fn explicit(sense: Sense, list: ExplicitList) -> Result<Self> {
        let k = list.k().ok_or_else(|| Error::InvalidArgument("explicit list is empty".into()))?;
        Self::new(sense, k, Payload::Explicit(list), None)
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda_min(&self) -> &ParameterVector {
        &self.lambda_min
    }

    pub fn lb(&self) -> &Q {
        &self.lb
    }

    pub fn ub(&self) -> &Q {
        &self.ub
    }

    pub fn alpha(&self) -> &Q {
        &self.alpha
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    /// Shifted, commonly scaled cost rows of a structured payload.
    pub fn scaled_rows(&self) -> Option<&ScaledRows> {
        self.rows.as_ref()
    }

    /// Rejects `λ ∉ Λ`.
    pub fn check_domain(&self, lambda: &ParameterVector) -> Result<()> {
        if lambda.len() != self.k {
            return Err(Error::InvalidArgument(format!(
                "parameter vector has {} coordinates, expected {}",
                lambda.len(),
                self.k
            )));
        }
        for (index, (l, m)) in lambda.0.iter().zip(&self.lambda_min.0).enumerate() {
            if l < m {
                return Err(Error::DomainViolation { index, value: fmt_q(l), min: fmt_q(m) });
            }
        }
        Ok(())
    }

    /// `f(x, λ) = F_0(x) + Σ_k (λ_k − λ^min_k) F_k(x)`.
    pub fn evaluate(&self, x: &SolutionRecord, lambda: &ParameterVector) -> Result<Q> {
        self.check_domain(lambda)?;
        Ok(self.evaluate_unchecked(&x.f, lambda))
    }

    pub(crate) fn evaluate_unchecked(&self, f: &[Q], lambda: &ParameterVector) -> Q {
        let mut v = f[0].clone();
        for ((l, m), fk) in lambda.0.iter().zip(&self.lambda_min.0).zip(&f[1..]) {
            if !fk.is_zero() {
                v += (l - m) * fk;
            }
        }
        v
    }

    /// Recomputes the objective vector of an encoded solution, checking
    /// feasibility.
    pub fn record(&self, encoding: Encoding) -> Result<SolutionRecord> {
        let members = |v: &[usize]| v.to_vec();
        let f = match (&self.payload, &encoding) {
            (Payload::Explicit(list), Encoding::Index { index }) => list.f_vector(*index)?,
            (Payload::Mincut(g), Encoding::Cut { source_side }) => {
                let arcs = g.cut_arcs(source_side)?;
                self.sum_rows(arcs)
            }
            (Payload::Knapsack(d), Encoding::Items { items }) => {
                d.check_feasible(items)?;
                self.sum_rows(members(items))
            }
            (Payload::Independence(s), Encoding::Elements { elements }) => {
                s.check_independent(elements)?;
                self.sum_rows(members(elements))
            }
            (p, e) => {
                return Err(Error::Schema(format!(
                    "solution encoding {} does not fit a {} instance",
                    e.id(),
                    p.name()
                )))
            }
        };
        Ok(SolutionRecord { encoding, f })
    }

    fn sum_rows(&self, members: Vec<usize>) -> Vec<Q> {
        let rows = self.rows.as_ref().expect("structured payload");
        rows.sum_rational(members, self.k + 1)
    }

    /// `true` when `candidate` is a β-approximation of `best` under the
    /// instance's sense (`v ≤ β·best` or `v ≥ best/β`).
    pub fn within(&self, candidate: &Q, best: &Q, beta: &Q) -> bool {
        match self.sense {
            Sense::Minimize => *candidate <= beta * best,
            Sense::Maximize => beta * candidate >= *best,
        }
    }

    /// `true` when `a` is strictly preferable to `b`.
    pub fn better(&self, a: &Q, b: &Q) -> bool {
        match self.sense {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }
}

fn shift_rows(raw: &[Vec<u64>], lambda_min: &ParameterVector) -> Result<Vec<Vec<Q>>> {
    raw.iter()
        .enumerate()
        .map(|(e, r)| {
            let mut a = Q::from_integer(r[0].into());
            for (l, b) in lambda_min.0.iter().zip(&r[1..]) {
                a += l * Q::from_integer((*b).into());
            }
            if a.is_negative() {
                return Err(Error::InvalidArgument(format!(
                    "lambda_min makes the cost of element {e} negative ({})",
                    fmt_q(&a)
                )));
            }
            let mut out = vec![a];
            out.extend(r[1..].iter().map(|b| Q::from_integer((*b).into())));
            Ok(out)
        })
        .collect()
}

/// `UB` is the largest of the K+1 column sums of the shifted cost rows.
/// `LB` is `1/D` with `D` the common denominator of `λ^min`: every nonzero
/// objective component is a positive multiple of `1/D`.
fn structured_bounds(shifted: &[Vec<Q>], lambda_min: &ParameterVector, k: usize) -> Result<(Q, Q)> {
    let ub = (0..=k)
        .map(|j| shifted.iter().map(|r| r[j].clone()).sum::<Q>())
        .max()
        .unwrap_or_else(Q::zero);
    if ub.is_zero() {
        return Err(Error::DegenerateInstance("every cost component is zero".into()));
    }
    let lb = Q::from_integer(lcm_denominators(&lambda_min.0)).recip();
    Ok((lb, ub))
}
