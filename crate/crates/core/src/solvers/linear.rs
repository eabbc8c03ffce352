//! Exact arithmetic on linear forms `Σ_i coeff_i · w_i`.
//!
//! The structured solvers never materialize `a_r + Σ λ_k b_{k,r}` as a
//! rational. Every arc capacity, item profit, flow and DP value is kept as an
//! integer coefficient vector over the augmented objective `(F_0, …, F_K)`,
//! scaled by a common denominator. Comparisons under a concrete weight are
//! answered by a float dot product when the result is far from a tie and by
//! an exact big-integer dot product otherwise, so every decision is exact.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use smallvec::SmallVec;

use crate::rational::{lcm_denominators, to_f64, Q};

pub type Coeffs = SmallVec<[i128; 4]>;

/// Relative slack on the float path; far above the accumulated f64 error of
/// a (K+1)-term dot product.
const FILTER_TOLERANCE: f64 = 1e-9;

pub fn zeros(len: usize) -> Coeffs {
    SmallVec::from_elem(0, len)
}

pub fn add(a: &[i128], b: &[i128]) -> Coeffs {
    a.iter().zip(b).map(|(x, y)| x.checked_add(*y).expect("coefficient overflow")).collect()
}

pub fn sub(a: &[i128], b: &[i128]) -> Coeffs {
    a.iter().zip(b).map(|(x, y)| x.checked_sub(*y).expect("coefficient overflow")).collect()
}

pub fn add_assign(a: &mut [i128], b: &[i128]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x = x.checked_add(*y).expect("coefficient overflow");
    }
}

pub fn sub_assign(a: &mut [i128], b: &[i128]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x = x.checked_sub(*y).expect("coefficient overflow");
    }
}

/// Per-element cost rows `(a'_e, b_{1,e}, …, b_{K,e})` multiplied by a
/// common positive integer `scale`, where `a'_e = a_e + Σ_k λ^min_k b_{k,e}`.
#[derive(Clone, Debug)]
pub struct ScaledRows {
    pub scale: BigInt,
    pub rows: Vec<Coeffs>,
}

impl ScaledRows {
    pub fn from_rows(rows: &[Vec<Q>]) -> Self {
        let scale = lcm_denominators(rows.iter().flatten());
        let rows = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        let scaled = v * Q::from_integer(scale.clone());
                        i128::try_from(scaled.to_integer()).expect("cost coefficient exceeds i128")
                    })
                    .collect()
            })
            .collect();
        ScaledRows { scale, rows }
    }

    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// Sum of the selected rows as an unscaled rational vector.
    pub fn sum_rational(&self, members: impl IntoIterator<Item = usize>, width: usize) -> Vec<Q> {
        let mut acc = zeros(width);
        for e in members {
            add_assign(&mut acc, &self.rows[e]);
        }
        let scale = Q::from_integer(self.scale.clone());
        acc.iter().map(|c| Q::from_integer(BigInt::from(*c)) / &scale).collect()
    }
}

/// A fixed nonnegative weight `w` on the augmented objective, prepared for
/// repeated exact sign tests of linear forms.
#[derive(Clone, Debug)]
pub struct Scalarization {
    exact: Vec<Q>,
    /// `exact` over a common denominator, built on first use.
    numerators: OnceLock<Vec<BigInt>>,
    approx: Vec<f64>,
    filtered: bool,
}

impl Scalarization {
    pub fn new(weight: &[Q]) -> Self {
        let approx: Option<Vec<f64>> = weight
            .iter()
            .map(|w| match to_f64(w) {
                // underflow would silently drop a nonzero weight
                Some(f) if f == 0.0 && !w.is_zero() => None,
                Some(f) if f != 0.0 && !f.is_normal() => None,
                other => other,
            })
            .collect();
        let filtered = approx.is_some();
        Scalarization {
            exact: weight.to_vec(),
            numerators: OnceLock::new(),
            approx: approx.unwrap_or_else(|| vec![0.0; weight.len()]),
            filtered,
        }
    }

    fn numerators(&self) -> &[BigInt] {
        // w_i times the product of all denominators: no gcd on the hot path
        self.numerators.get_or_init(|| {
            (0..self.exact.len())
                .map(|i| {
                    self.exact
                        .iter()
                        .enumerate()
                        .fold(self.exact[i].numer().clone(), |acc, (j, w)| if i == j { acc } else { acc * w.denom() })
                })
                .collect()
        })
    }

    /// Weight `(1, λ_1 − λ^min_1, …, λ_K − λ^min_K)`.
    pub fn from_offsets(lambda: &[Q], lambda_min: &[Q]) -> Self {
        let mut w = Vec::with_capacity(lambda.len() + 1);
        w.push(Q::from_integer(1.into()));
        w.extend(lambda.iter().zip(lambda_min).map(|(l, m)| l - m));
        Self::new(&w)
    }

    pub fn weight(&self) -> &[Q] {
        &self.exact
    }

    /// Float estimate of the form's value (used only for ranking hints).
    pub fn approx_value(&self, coeffs: &[i128]) -> f64 {
        coeffs.iter().zip(&self.approx).map(|(c, w)| *c as f64 * w).sum()
    }

    /// Exact sign of `Σ coeffs_i · w_i`.
    pub fn sign(&self, coeffs: &[i128]) -> Ordering {
        if self.filtered {
            let mut dot = 0.0f64;
            let mut mag = 0.0f64;
            for (c, w) in coeffs.iter().zip(&self.approx) {
                let t = *c as f64 * w;
                dot += t;
                mag += t.abs();
            }
            if mag == 0.0 && coeffs.iter().zip(&self.exact).all(|(c, w)| *c == 0 || w.is_zero()) {
                return Ordering::Equal;
            }
            if mag.is_finite() && dot.abs() > FILTER_TOLERANCE * mag {
                return dot.partial_cmp(&0.0).unwrap();
            }
        }
        let exact = self.scaled_value(coeffs);
        if exact.is_positive() {
            Ordering::Greater
        } else if exact.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    /// Float value and magnitude `(Σ c_i w_i, Σ |c_i w_i|)` for incremental
    /// filtering with [`Scalarization::decide`].
    pub fn approx_parts(&self, coeffs: &[i128]) -> (f64, f64) {
        coeffs.iter().zip(&self.approx).fold((0.0, 0.0), |(v, m), (c, w)| {
            let t = *c as f64 * w;
            (v + t, m + t.abs())
        })
    }

    /// Sign of a float difference whose terms have total magnitude `mag`,
    /// or `None` when only the exact path can tell.
    pub fn decide(&self, diff: f64, mag: f64) -> Option<Ordering> {
        if self.filtered && mag.is_finite() && diff.abs() > FILTER_TOLERANCE * mag {
            diff.partial_cmp(&0.0)
        } else {
            None
        }
    }

    /// Exact sign of `a + b − c`.
    pub fn sign_sum(&self, a: &[i128], b: &[i128], c: &[i128]) -> Ordering {
        let d: Coeffs = a.iter().zip(b).zip(c).map(|((x, y), z)| x + y - z).collect();
        self.sign(&d)
    }

    pub fn compare(&self, a: &[i128], b: &[i128]) -> Ordering {
        self.sign(&sub(a, b))
    }

    pub fn is_positive(&self, coeffs: &[i128]) -> bool {
        self.sign(coeffs) == Ordering::Greater
    }

    /// `Σ coeffs_i · w_i` times the common denominator of the weight: an
    /// integer with the same sign and order as the value.
    pub fn scaled_value(&self, coeffs: &[i128]) -> BigInt {
        coeffs.iter().zip(self.numerators()).map(|(c, n)| BigInt::from(*c) * n).sum()
    }

    /// Exact value of a scaled form.
    pub fn value(&self, coeffs: &[i128], scale: &BigInt) -> Q {
        let sum: Q = coeffs
            .iter()
            .zip(&self.exact)
            .map(|(c, w)| Q::from_integer(BigInt::from(*c)) * w)
            .sum();
        sum / Q::from_integer(scale.clone())
    }
}
