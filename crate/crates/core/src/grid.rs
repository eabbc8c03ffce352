//! The logarithmic parameter grid and snapping of compact-box parameter
//! vectors onto its cells.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ParameterVector;
use crate::rational::{factorial, floor_log, fmt_q, ln_q, pow_q, serde_q, Q};

pub const DEFAULT_GRID_CAP: u64 = 100_000_000;

/// Exponent estimates closer than this to an integer are treated as ties
/// and widened.
const TIE_TOLERANCE: f64 = 1e-9;

/// Exponent vector `(i_1, …, i_K)` of a grid point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridIndex(pub Vec<i64>);

#[derive(Serialize, Deserialize)]
struct GridSpecData {
    #[serde(with = "serde_q")]
    eps: Q,
    #[serde(with = "serde_q")]
    base: Q,
    lb: i64,
    ub: i64,
    lambda_min: ParameterVector,
    #[serde(rename = "K")]
    k: usize,
    #[serde(with = "serde_q")]
    c: Q,
}

/// Grid `{λ^min + base^i : lb ≤ i_k ≤ ub}` with `base = 1 + ε/2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GridSpecData", into = "GridSpecData")]
pub struct GridSpec {
    eps: Q,
    base: Q,
    lb: i64,
    ub: i64,
    lambda_min: ParameterVector,
    k: usize,
    c: Q,
    powers: Vec<Q>,
}

impl TryFrom<GridSpecData> for GridSpec {
    type Error = Error;

    fn try_from(d: GridSpecData) -> Result<Self> {
        let spec = GridSpec::new(d.eps, d.c, d.lambda_min, u64::MAX)?;
        if spec.k != d.k || spec.lb != d.lb || spec.ub != d.ub || spec.base != d.base {
            return Err(Error::Schema("grid metadata is inconsistent with eps, c and K".into()));
        }
        Ok(spec)
    }
}

impl From<GridSpec> for GridSpecData {
    fn from(s: GridSpec) -> Self {
        GridSpecData { eps: s.eps, base: s.base, lb: s.lb, ub: s.ub, lambda_min: s.lambda_min, k: s.k, c: s.c }
    }
}

pub fn check_eps(eps: &Q) -> Result<()> {
    if !eps.is_positive() || *eps >= Q::one() {
        return Err(Error::EpsilonOutOfRange(fmt_q(eps)));
    }
    Ok(())
}

fn near_integer(t: f64) -> bool {
    t.is_finite() && (t - t.round()).abs() < TIE_TOLERANCE
}

/// `lb = ⌊log_base(c^K/(K+1)!)⌋`, `ub = ⌈log_base((K+1)!/c^K)⌉`, each
/// widened by one when its logarithm is within `1e-9` of an integer.
pub fn grid_bounds(c: &Q, k: usize, eps: &Q) -> Result<(i64, i64)> {
    check_eps(eps)?;
    if !c.is_positive() || *c >= Q::one() {
        return Err(Error::InvalidArgument(format!("c must lie in (0, 1), got {}", fmt_q(c))));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    let base = Q::one() + eps / Q::from_integer(BigInt::from(2));
    let small = pow_q(c, k as i64) / Q::from_integer(factorial(k + 1));
    let large = small.recip();
    let ln_base = ln_q(&base);

    let mut lb = floor_log(&small, &base);
    if near_integer(ln_q(&small) / ln_base) {
        lb -= 1;
    }
    let f = floor_log(&large, &base);
    let mut ub = if pow_q(&base, f) == large { f } else { f + 1 };
    if near_integer(ln_q(&large) / ln_base) {
        ub += 1;
    }
    Ok((lb, ub))
}

impl GridSpec {
    /// Builds the grid for accuracy `eps` and threshold `c`, refusing grids
    /// with more than `cap` points.
    pub fn new(eps: Q, c: Q, lambda_min: ParameterVector, cap: u64) -> Result<Self> {
        let k = lambda_min.len();
        let (lb, ub) = grid_bounds(&c, k, &eps)?;
        let side = (ub - lb + 1) as u64;
        let size = BigInt::from(side).pow(k as u32);
        if size > BigInt::from(cap) {
            return Err(Error::GridTooLarge { size: size.to_string(), cap });
        }
        let base = Q::one() + &eps / Q::from_integer(BigInt::from(2));
        let mut powers = Vec::with_capacity(side as usize);
        let mut p = pow_q(&base, lb);
        for _ in lb..=ub {
            powers.push(p.clone());
            p *= &base;
        }
        Ok(GridSpec { eps, base, lb, ub, lambda_min, k, c, powers })
    }

    pub fn eps(&self) -> &Q {
        &self.eps
    }

    pub fn base(&self) -> &Q {
        &self.base
    }

    pub fn lb(&self) -> i64 {
        self.lb
    }

    pub fn ub(&self) -> i64 {
        self.ub
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn c(&self) -> &Q {
        &self.c
    }

    pub fn lambda_min(&self) -> &ParameterVector {
        &self.lambda_min
    }

    /// Points per axis, `ub − lb + 1`.
    pub fn side(&self) -> usize {
        (self.ub - self.lb + 1) as usize
    }

    /// `(ub − lb + 1)^K`.
    pub fn size(&self) -> usize {
        self.side().pow(self.k as u32)
    }

    /// `base^i` for `lb ≤ i ≤ ub`.
    pub fn power(&self, i: i64) -> &Q {
        &self.powers[(i - self.lb) as usize]
    }

    /// Lower and upper end of the compact box `[c^K/(K+1)!, (K+1)!/c^K]`
    /// that every lifted offset falls into.
    pub fn compact_box(&self) -> (Q, Q) {
        let small = pow_q(&self.c, self.k as i64) / Q::from_integer(factorial(self.k + 1));
        let large = small.recip();
        (small, large)
    }

    /// Grid index of the `n`-th point in lexicographic order (first
    /// coordinate most significant).
    pub fn index_at(&self, mut n: usize) -> GridIndex {
        let side = self.side();
        let mut exps = vec![0i64; self.k];
        for slot in exps.iter_mut().rev() {
            *slot = self.lb + (n % side) as i64;
            n /= side;
        }
        GridIndex(exps)
    }

    pub fn linear_index(&self, index: &GridIndex) -> Result<usize> {
        if index.0.len() != self.k || index.0.iter().any(|i| *i < self.lb || *i > self.ub) {
            return Err(Error::InvalidArgument(format!("grid index {:?} is outside the grid", index.0)));
        }
        let side = self.side();
        Ok(index.0.iter().fold(0usize, |acc, i| acc * side + (i - self.lb) as usize))
    }

    pub fn point(&self, index: &GridIndex) -> ParameterVector {
        ParameterVector(index.0.iter().zip(&self.lambda_min.0).map(|(i, m)| m + self.power(*i)).collect())
    }

    /// Lazily yields every grid point in lexicographic order.
    pub fn enumerate(&self) -> impl Iterator<Item = (GridIndex, ParameterVector)> + '_ {
        (0..self.size()).map(move |n| {
            let idx = self.index_at(n);
            let p = self.point(&idx);
            (idx, p)
        })
    }

    /// Largest exponent `m` with `base^m ≤ offset`, restricted to the grid.
    pub fn snap_offset(&self, offset: &Q) -> Result<i64> {
        let above = self.powers.partition_point(|p| p <= offset);
        if above == 0 {
            return Err(Error::Internal(format!("offset {} lies below the grid", fmt_q(offset))));
        }
        let m = self.lb + above as i64 - 1;
        if m == self.ub && *offset > self.power(self.ub) * &self.base {
            return Err(Error::Internal(format!("offset {} lies above the grid", fmt_q(offset))));
        }
        Ok(m)
    }

    /// Grid cell of a compact-box parameter vector: `base^{m_k} ≤ λ_k − λ^min_k ≤ base^{m_k+1}`.
    pub fn snap(&self, lambda: &ParameterVector) -> Result<GridIndex> {
        if lambda.len() != self.k {
            return Err(Error::InvalidArgument("parameter vector has the wrong length".into()));
        }
        lambda
            .0
            .iter()
            .zip(&self.lambda_min.0)
            .map(|(l, m)| self.snap_offset(&(l - m)))
            .collect::<Result<Vec<_>>>()
            .map(GridIndex)
    }
}
