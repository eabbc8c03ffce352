//! Weight-space geometry: the threshold `c`, the sets `P_<(I)` and `P_=(I)`,
//! the cone `W^cone`, lifting into it, and the maps between parameter
//! vectors and weights.

use std::ops::Deref;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ParameterVector;
use crate::rational::{serde_q_vec, Q};

/// A nonnegative weight `w ∈ ℝ^{K+1}` on the augmented objective.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(#[serde(with = "serde_q_vec")] pub Vec<Q>);

impl Weight {
    pub fn new(comps: Vec<Q>) -> Result<Self> {
        check_nonnegative(&comps)?;
        Ok(Weight(comps))
    }
}

impl Deref for Weight {
    type Target = [Q];

    fn deref(&self) -> &[Q] {
        &self.0
    }
}

fn check_nonnegative(w: &[Q]) -> Result<()> {
    match w.iter().position(Signed::is_negative) {
        Some(index) => Err(Error::NegativeWeight { index }),
        None => Ok(()),
    }
}

fn check_nonzero(w: &[Q]) -> Result<()> {
    check_nonnegative(w)?;
    if w.iter().all(Zero::is_zero) {
        return Err(Error::InvalidArgument("weight must not be the zero vector".into()));
    }
    Ok(())
}

/// `c = ε'·LB / (β·UB)`.
pub fn threshold_c(eps_prime: &Q, beta: &Q, lb: &Q, ub: &Q) -> Result<Q> {
    if !eps_prime.is_positive() || *eps_prime >= Q::one() {
        return Err(Error::InvalidArgument(format!("eps' must lie in (0, 1), got {eps_prime}")));
    }
    if *beta < Q::one() {
        return Err(Error::InvalidArgument(format!("beta must be at least 1, got {beta}")));
    }
    if !lb.is_positive() || lb > ub {
        return Err(Error::InvalidArgument("bounds must satisfy 0 < LB <= UB".into()));
    }
    Ok(eps_prime * lb / (beta * ub))
}

fn check_index_set(w: &[Q], set: &[usize]) -> Result<()> {
    let n = w.len();
    let mut seen = vec![false; n];
    for &i in set {
        if i >= n || seen[i] {
            return Err(Error::InvalidArgument(format!("index set {set:?} is invalid for {n} components")));
        }
        seen[i] = true;
    }
    if set.is_empty() || set.len() == n {
        return Err(Error::InvalidArgument("index set must be nonempty and proper".into()));
    }
    Ok(())
}

/// `(Σ_{i∈I} w_i, min_{j∉I} w_j)`.
fn split(w: &[Q], set: &[usize]) -> (Q, Q) {
    let mut inside = vec![false; w.len()];
    for &i in set {
        inside[i] = true;
    }
    let sum = set.iter().map(|i| &w[*i]).sum();
    let min = (0..w.len()).filter(|j| !inside[*j]).map(|j| &w[j]).min().cloned().expect("proper index set");
    (sum, min)
}

/// `Σ_{i∈I} w_i < c · min_{j∉I} w_j`.
pub fn in_p_less(w: &[Q], set: &[usize], c: &Q) -> Result<bool> {
    check_index_set(w, set)?;
    let (sum, min) = split(w, set);
    Ok(sum < c * min)
}

/// `Σ_{i∈I} w_i = c · min_{j∉I} w_j`.
pub fn in_p_equal(w: &[Q], set: &[usize], c: &Q) -> Result<bool> {
    check_index_set(w, set)?;
    let (sum, min) = split(w, set);
    Ok(sum == c * min)
}

/// Indices sorted by component, ties by index.
pub fn sorted_order(w: &[Q]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|a, b| w[*a].cmp(&w[*b]));
    order
}

/// Smallest `k < K` such that the first `k+1` indices of `order` form a set
/// `I` with `w ∈ P_<(I)`.
fn first_violated_prefix(w: &[Q], order: &[usize], c: &Q) -> Option<usize> {
    let mut sum = Q::zero();
    for k in 0..order.len() - 1 {
        sum += &w[order[k]];
        if sum < c * &w[order[k + 1]] {
            return Some(k);
        }
    }
    None
}

/// Membership in `W^cone`, checking only the prefixes of the sorted order.
pub fn in_cone(w: &[Q], c: &Q) -> bool {
    w.len() < 2 || first_violated_prefix(w, &sorted_order(w), c).is_none()
}

/// Membership in `W^cone` by checking every nonempty proper index set.
pub fn in_cone_exhaustive(w: &[Q], c: &Q) -> bool {
    let n = w.len();
    (1..(1usize << n) - 1).all(|mask| {
        let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        !in_p_less(w, &set, c).unwrap()
    })
}

/// `proj^I(w)`: `w` with the components in `I` set to zero.
pub fn project(w: &[Q], set: &[usize]) -> Weight {
    let mut out = w.to_vec();
    for &i in set {
        out[i] = Q::zero();
    }
    Weight(out)
}

/// One lifting step for `w ∈ P_<(I)`. Returns `w̄ ∈ P_=(I)` and `μ` with
/// `w = μ·w̄ + (1−μ)·proj^I(w̄)`.
pub fn lift_once(w: &[Q], set: &[usize], c: &Q) -> Result<(Weight, Q)> {
    check_nonnegative(w)?;
    if !in_p_less(w, set, c)? {
        return Err(Error::InvalidArgument("weight is not in P_<(I)".into()));
    }
    let (sum, min) = split(w, set);
    let target = c * min;
    let mut out = w.to_vec();
    if sum.is_zero() {
        let share = &target / Q::from_integer(set.len().into());
        for &i in set {
            out[i] = share.clone();
        }
    } else {
        for &i in set {
            out[i] = &w[i] / &sum * &target;
        }
    }
    Ok((Weight(out), sum / target))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftStep {
    /// Prefix length minus one in the sorted order (`k^ℓ`).
    pub k: usize,
    /// Original indices of the lifted prefix.
    pub index_set: Vec<usize>,
    pub lifted: Weight,
    #[serde(with = "crate::rational::serde_q")]
    pub mu: Q,
}

/// Record of the lifting loop from `input` to a weight in `W^cone`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftCertificate {
    pub input: Weight,
    #[serde(with = "crate::rational::serde_q")]
    pub c: Q,
    /// Stable ascending order of `input`, kept throughout the loop.
    pub order: Vec<usize>,
    pub steps: Vec<LiftStep>,
    pub final_weight: Weight,
    /// Convex coefficients: entry `0` belongs to `final_weight`, entry
    /// `ℓ+1` to `proj^{I_ℓ}(final_weight)`.
    #[serde(with = "serde_q_vec")]
    pub hull_coefficients: Vec<Q>,
}

/// Lifts `w` into `W^cone` in at most `K` steps, always lifting the smallest
/// violated prefix of the sorted order.
pub fn lift_to_cone(w: &[Q], c: &Q) -> Result<LiftCertificate> {
    check_nonzero(w)?;
    if !c.is_positive() || *c >= Q::one() {
        return Err(Error::InvalidArgument("c must lie in (0, 1)".into()));
    }
    let order = sorted_order(w);
    let mut current = w.to_vec();
    let mut steps = Vec::new();
    let mut theta = vec![Q::one()];
    while let Some(k) = first_violated_prefix(&current, &order, c) {
        let set: Vec<usize> = order[..=k].to_vec();
        let (lifted, mu) = lift_once(&current, &set, c)?;
        for t in theta.iter_mut() {
            *t *= &mu;
        }
        theta.push(Q::one() - &mu);
        current = lifted.0.clone();
        steps.push(LiftStep { k, index_set: set, lifted, mu });
        if steps.len() > w.len() {
            return Err(Error::Internal("lifting did not terminate".into()));
        }
    }
    Ok(LiftCertificate {
        input: Weight(w.to_vec()),
        c: c.clone(),
        order,
        steps,
        final_weight: Weight(current),
        hull_coefficients: theta,
    })
}

impl LiftCertificate {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `Σ θ_ℓ · v_ℓ` over the hull vectors.
    pub fn reconstruct(&self) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.input.len()];
        let vectors = std::iter::once(self.final_weight.clone())
            .chain(self.steps.iter().map(|s| project(&self.final_weight, &s.index_set)));
        for (theta, v) in self.hull_coefficients.iter().zip(vectors) {
            for (o, x) in out.iter_mut().zip(v.iter()) {
                *o += theta * x;
            }
        }
        out
    }

    /// Re-verifies every property of the lifting sequence `w^0, …, w^L`:
    /// componentwise monotonicity (a), positive sorted components (b),
    /// untouched prefixes outside `[k^ℓ, k^max]` (c), equality memberships
    /// of all earlier prefixes (d), the convex representation (e), and
    /// final membership in the cone with `L ≤ K`.
    pub fn check(&self) -> std::result::Result<(), String> {
        let k_total = self.input.len() - 1;
        let c = &self.c;
        let order = &self.order;
        let sorted = |w: &[Q]| -> Vec<Q> { order.iter().map(|i| w[*i].clone()).collect() };
        let prefix_less = |w: &[Q], k: usize| -> bool {
            let s = sorted(w);
            s[..=k].iter().sum::<Q>() < c * &s[k + 1]
        };
        let prefix_equal = |w: &[Q], k: usize| -> bool {
            let s = sorted(w);
            s[..=k].iter().sum::<Q>() == c * &s[k + 1]
        };
        if self.steps.len() > k_total {
            return Err(format!("{} lifting steps for K = {k_total}", self.steps.len()));
        }
        let k_max = (0..k_total).rev().find(|k| prefix_less(&self.input, *k));
        let mut prev: &[Q] = &self.input;
        for (l, step) in self.steps.iter().enumerate() {
            let cur: &[Q] = &step.lifted;
            if l > 0 && step.k <= self.steps[l - 1].k {
                return Err(format!("step {l}: prefix indices are not increasing"));
            }
            let (sp, sc) = (sorted(prev), sorted(cur));
            for i in 0..=k_total {
                let ok = if i <= step.k { sc[i] >= sp[i] } else { sc[i] == sp[i] };
                if !ok {
                    return Err(format!("step {l}: component {i} violates monotonicity"));
                }
            }
            if !sc[0].is_positive() || sc.windows(2).any(|p| p[0] > p[1]) {
                return Err(format!("step {l}: lifted weight is not positive and sorted"));
            }
            let k_max = k_max.ok_or("lifting steps on a weight already in the cone")?;
            for k in (0..step.k).chain(k_max + 1..k_total) {
                if prefix_less(prev, k) {
                    return Err(format!("step {l}: prefix {k} of the previous weight is violated"));
                }
            }
            for earlier in &self.steps[..=l] {
                if !prefix_equal(cur, earlier.k) {
                    return Err(format!("step {l}: not on the equality boundary of prefix {}", earlier.k));
                }
            }
            prev = cur;
        }
        if prev != &self.final_weight[..] {
            return Err("final weight differs from the last lifted weight".into());
        }
        if !in_cone(&self.final_weight, c) {
            return Err("final weight is not in the cone".into());
        }
        if self.hull_coefficients.iter().any(|t| t.is_negative() || *t > Q::one())
            || self.hull_coefficients.iter().sum::<Q>() != Q::one()
        {
            return Err("hull coefficients are not convex".into());
        }
        if self.reconstruct() != self.input.0 {
            return Err("convex reconstruction does not reproduce the input".into());
        }
        Ok(())
    }
}

/// `w / Σ_i w_i`.
pub fn normalize_to_simplex(w: &[Q]) -> Result<Weight> {
    check_nonzero(w)?;
    let total: Q = w.iter().sum();
    Ok(Weight(w.iter().map(|x| x / &total).collect()))
}

/// Normalized weight proportional to `(1, λ_1 − λ^min_1, …, λ_K − λ^min_K)`.
pub fn lambda_to_weight(lambda: &ParameterVector, lambda_min: &ParameterVector) -> Result<Weight> {
    let mut w = vec![Q::one()];
    for (index, (l, m)) in lambda.0.iter().zip(&lambda_min.0).enumerate() {
        if l < m {
            return Err(Error::DomainViolation {
                index,
                value: crate::rational::fmt_q(l),
                min: crate::rational::fmt_q(m),
            });
        }
        w.push(l - m);
    }
    normalize_to_simplex(&w)
}

/// `φ(w) = (w_1/w_0 + λ^min_1, …, w_K/w_0 + λ^min_K)`.
pub fn phi(w: &[Q], lambda_min: &ParameterVector) -> Result<ParameterVector> {
    if !w[0].is_positive() {
        return Err(Error::InvalidArgument("phi needs a positive first weight component".into()));
    }
    Ok(ParameterVector(w[1..].iter().zip(&lambda_min.0).map(|(x, m)| x / &w[0] + m).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{factorial, pow_q, q, ratio};
    use proptest::prelude::*;

    fn v(xs: &[(i64, i64)]) -> Vec<Q> {
        xs.iter().map(|(n, d)| ratio(*n, *d)).collect()
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_c(&ratio(1, 4), &ratio(5, 4), &q(1), &q(1)).unwrap(), ratio(1, 5));
        assert_eq!(threshold_c(&ratio(1, 2), &q(1), &q(1), &q(2)).unwrap(), ratio(1, 4));
        assert_eq!(threshold_c(&ratio(1, 2), &q(2), &q(1), &q(1)).unwrap(), ratio(1, 4));
        assert!(threshold_c(&q(1), &q(1), &q(1), &q(1)).is_err());
        assert!(threshold_c(&ratio(1, 2), &ratio(1, 2), &q(1), &q(1)).is_err());
    }

    #[test]
    fn p_less_examples() {
        let c = ratio(1, 4);
        assert!(in_p_less(&v(&[(1, 100), (1, 2), (1, 1)]), &[0], &c).unwrap());
        let boundary = v(&[(1, 8), (1, 2), (1, 1)]);
        assert!(!in_p_less(&boundary, &[0], &c).unwrap());
        assert!(in_p_equal(&boundary, &[0], &c).unwrap());
        assert!(in_p_less(&v(&[(0, 1), (0, 1), (1, 1)]), &[0, 1], &c).unwrap());
        assert!(in_p_less(&boundary, &[], &c).is_err());
        assert!(in_p_less(&boundary, &[0, 1, 2], &c).is_err());
    }

    #[test]
    fn cone_examples() {
        let c = ratio(1, 4);
        assert!(in_cone(&[q(1), q(1), q(1)], &c));
        assert!(!in_cone(&[q(0), q(1), q(1)], &c));
        assert!(!in_cone(&v(&[(1, 1), (1, 100), (1, 1)]), &c));
        assert!(!in_cone_exhaustive(&v(&[(1, 1), (1, 100), (1, 1)]), &c));
    }

    #[test]
    fn lift_once_examples() {
        let c = ratio(1, 4);
        let (w, mu) = lift_once(&v(&[(0, 1), (0, 1), (1, 1)]), &[0, 1], &c).unwrap();
        assert_eq!(w.0, v(&[(1, 8), (1, 8), (1, 1)]));
        assert_eq!(mu, q(0));
        let input = v(&[(1, 100), (3, 100), (1, 1)]);
        let (w, mu) = lift_once(&input, &[0, 1], &c).unwrap();
        assert_eq!(w.0, v(&[(1, 16), (3, 16), (1, 1)]));
        assert_eq!(mu, ratio(4, 25));
        let p = project(&w, &[0, 1]);
        let back: Vec<Q> = w.iter().zip(p.iter()).map(|(a, b)| &mu * a + (q(1) - &mu) * b).collect();
        assert_eq!(back, input);
        // boundary weights are not in P_<(I) and are rejected
        assert!(lift_once(&v(&[(1, 8), (1, 2), (1, 1)]), &[0], &c).is_err());
    }

    #[test]
    fn lift_to_cone_examples() {
        let cert = lift_to_cone(&[q(1), q(1), q(1)], &ratio(1, 2)).unwrap();
        assert!(cert.is_empty());
        assert_eq!(cert.final_weight.0, vec![q(1), q(1), q(1)]);

        let cert = lift_to_cone(&v(&[(1, 100), (4, 100), (1, 1)]), &ratio(1, 2)).unwrap();
        assert_eq!(cert.steps.iter().map(|s| s.k).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(cert.steps[0].lifted.0, v(&[(2, 100), (4, 100), (1, 1)]));
        assert_eq!(cert.final_weight.0, v(&[(1, 6), (1, 3), (1, 1)]));
        assert_eq!(cert.steps[0].mu, ratio(1, 2));
        assert_eq!(cert.steps[1].mu, ratio(12, 100));
        cert.check().unwrap();

        let cert = lift_to_cone(&v(&[(0, 1), (0, 1), (1, 1)]), &ratio(1, 4)).unwrap();
        assert_eq!(cert.len(), 1);
        assert_eq!(cert.final_weight.0, v(&[(1, 8), (1, 8), (1, 1)]));
        cert.check().unwrap();

        assert!(lift_to_cone(&[q(0), q(0)], &ratio(1, 4)).is_err());
    }

    #[test]
    fn simplex_and_parameter_maps() {
        assert_eq!(normalize_to_simplex(&[q(1), q(2), q(3)]).unwrap().0, v(&[(1, 6), (2, 6), (3, 6)]));
        assert_eq!(normalize_to_simplex(&v(&[(1, 5), (0, 1), (0, 1)])).unwrap().0, v(&[(1, 1), (0, 1), (0, 1)]));
        assert_eq!(normalize_to_simplex(&[q(4), q(4)]).unwrap().0, v(&[(1, 2), (1, 2)]));
        assert!(normalize_to_simplex(&[q(0), q(0)]).is_err());

        let zero = ParameterVector(vec![q(0), q(0)]);
        assert_eq!(lambda_to_weight(&zero, &zero).unwrap().0, v(&[(1, 1), (0, 1), (0, 1)]));
        assert_eq!(lambda_to_weight(&ParameterVector(vec![q(2), q(3)]), &zero).unwrap().0, v(&[(1, 6), (2, 6), (3, 6)]));
        assert_eq!(
            lambda_to_weight(&ParameterVector(vec![q(1)]), &ParameterVector(vec![q(0)])).unwrap().0,
            v(&[(1, 2), (1, 2)])
        );

        assert_eq!(phi(&v(&[(1, 2), (1, 4), (1, 4)]), &zero).unwrap().0, v(&[(1, 2), (1, 2)]));
        let shifted = ParameterVector(vec![q(-1), q(2)]);
        assert_eq!(phi(&v(&[(1, 5), (2, 5), (2, 5)]), &shifted).unwrap().0, vec![q(1), q(4)]);
        assert_eq!(phi(&[q(1), q(0)], &ParameterVector(vec![q(0)])).unwrap().0, vec![q(0)]);
        assert!(phi(&[q(0), q(1)], &ParameterVector(vec![q(0)])).is_err());
    }

    fn weight_strategy(max_len: usize) -> impl Strategy<Value = Vec<Q>> {
        prop::collection::vec(
            prop_oneof![Just((0i64, 1i64)), (0i64..10_000, 1i64..10_000), (1i64..100, 1_000_000i64..1_000_001)],
            2..=max_len,
        )
        .prop_filter("nonzero", |w| w.iter().any(|(n, _)| *n != 0))
        .prop_map(|w| w.into_iter().map(|(n, d)| ratio(n, d)).collect())
    }

    fn c_strategy() -> impl Strategy<Value = Q> {
        (1i64..1000, 1001i64..100_000).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #[test]
        fn prefix_cone_test_matches_exhaustive(w in weight_strategy(5), c in c_strategy()) {
            prop_assert_eq!(in_cone(&w, &c), in_cone_exhaustive(&w, &c));
        }

        #[test]
        fn lift_certificate_holds(w in weight_strategy(6), c in c_strategy()) {
            let cert = lift_to_cone(&w, &c).unwrap();
            prop_assert!(cert.check().is_ok(), "{:?}", cert.check());
            let k = w.len() - 1;
            let bound = pow_q(&c, k as i64) / Q::from_integer(factorial(k + 1));
            let normalized = normalize_to_simplex(&cert.final_weight).unwrap();
            prop_assert!(normalized.iter().all(|x| *x >= bound));
        }

        #[test]
        fn scaling_preserves_comparisons(
            f1 in prop::collection::vec(0i64..50, 3),
            f2 in prop::collection::vec(0i64..50, 3),
            w in weight_strategy(3).prop_filter("len", |w| w.len() == 3),
            t in (1i64..100, 1i64..100),
            beta in (1i64..4, 1i64..3),
        ) {
            let t = ratio(t.0, t.1);
            let beta = ratio(beta.0 + beta.1, beta.1);
            let dot = |f: &[i64], w: &[Q]| f.iter().zip(w).map(|(a, b)| q(*a) * b).sum::<Q>();
            let tw: Vec<Q> = w.iter().map(|x| x * &t).collect();
            prop_assert_eq!(dot(&f1, &w) <= &beta * dot(&f2, &w), dot(&f1, &tw) <= &beta * dot(&f2, &tw));
        }

        #[test]
        fn raising_inside_set_keeps_weight_outside_p_less(
            w in weight_strategy(4),
            raise in prop::collection::vec(0i64..100, 4),
            mask in 1usize..15,
            c in c_strategy(),
        ) {
            let n = w.len();
            let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            prop_assume!(!set.is_empty() && set.len() < n);
            prop_assume!(!in_p_less(&w, &set, &c).unwrap());
            let mut raised = w.clone();
            for &i in &set {
                raised[i] += ratio(raise[i], 7);
            }
            prop_assert!(!in_p_less(&raised, &set, &c).unwrap());
        }

        #[test]
        fn phi_inverts_lambda_to_weight(
            offs in prop::collection::vec((0i64..1000, 1i64..50), 1..4),
            mins in prop::collection::vec(-20i64..20, 3),
        ) {
            let lambda_min = ParameterVector(mins[..offs.len()].iter().map(|m| q(*m)).collect());
            let lambda = ParameterVector(
                offs.iter().zip(&lambda_min.0).map(|((n, d), m)| ratio(*n, *d) + m).collect(),
            );
            let w = lambda_to_weight(&lambda, &lambda_min).unwrap();
            prop_assert_eq!(phi(&w, &lambda_min).unwrap(), lambda);
        }
    }
}
