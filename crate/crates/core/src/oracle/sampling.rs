//! Deterministic parameter and weight samples for verification.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::{GridIndex, GridSpec};
use crate::model::{ParameterVector, ProblemInstance};
use crate::rational::{from_f64, ln_q, Q};
use crate::weights::Weight;

/// How a sample was produced; reports break results down by strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    LambdaMin,
    FarField,
    GridPoint,
    CellInterior,
    Boundary,
    CompactBox,
    Simplex,
    Witness,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::LambdaMin => "lambda_min",
            Strategy::FarField => "far_field",
            Strategy::GridPoint => "grid_point",
            Strategy::CellInterior => "cell_interior",
            Strategy::Boundary => "boundary",
            Strategy::CompactBox => "compact_box",
            Strategy::Simplex => "simplex",
            Strategy::Witness => "witness",
        }
    }
}

/// A point at which a solution set is checked: a parameter vector, or a raw
/// weight on the augmented objective `(F_0, …, F_K)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    Lambda(ParameterVector),
    Weight(Weight),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub strategy: Strategy,
    pub probe: Probe,
}

/// Resolution of random rationals in `(0, 1)`.
const RESOLUTION: u64 = 1 << 20;

fn unit(rng: &mut ChaCha8Rng) -> Q {
    Q::new(BigInt::from(rng.gen_range(1..RESOLUTION)), BigInt::from(RESOLUTION))
}

fn pow10(j: u32) -> Q {
    Q::from_integer(BigInt::from(10).pow(j))
}

/// Offsets `λ^min + 10^j·e_k` for `j ∈ {3, 6, 9}`, and `λ^min + 10^6` in every
/// coordinate.
fn far_field(lambda_min: &ParameterVector) -> Vec<ParameterVector> {
    let k = lambda_min.len();
    let mut out = Vec::new();
    for j in [3, 6, 9] {
        for axis in 0..k {
            let mut p = lambda_min.clone();
            p.0[axis] += pow10(j);
            out.push(p);
        }
    }
    if k > 1 {
        out.push(ParameterVector(lambda_min.0.iter().map(|m| m + pow10(6)).collect()));
    }
    out
}

fn random_index(spec: &GridSpec, rng: &mut ChaCha8Rng) -> GridIndex {
    GridIndex((0..spec.k()).map(|_| rng.gen_range(spec.lb()..=spec.ub())).collect())
}

fn cell_interior(spec: &GridSpec, rng: &mut ChaCha8Rng) -> ParameterVector {
    let idx = random_index(spec, rng);
    let growth = spec.base() - Q::one();
    ParameterVector(
        idx.0
            .iter()
            .zip(&spec.lambda_min().0)
            .map(|(i, m)| m + spec.power(*i) * (Q::one() + unit(rng) * &growth))
            .collect(),
    )
}

/// Log-uniform offset in `[lo, hi]`, as the exact value of a float.
fn log_uniform(lo: &Q, hi: &Q, rng: &mut ChaCha8Rng) -> Q {
    let (a, b) = (ln_q(lo), ln_q(hi));
    let v = from_f64((a + rng.gen::<f64>() * (b - a)).exp());
    v.clamp(lo.clone(), hi.clone())
}

fn compact_point(spec: &GridSpec, rng: &mut ChaCha8Rng) -> ParameterVector {
    let (lo, hi) = spec.compact_box();
    ParameterVector(spec.lambda_min().0.iter().map(|m| m + log_uniform(&lo, &hi, rng)).collect())
}

/// Compact-box point with a random nonempty set of coordinates pinned to
/// `λ^min` (the boundary of `Λ`).
fn boundary_point(spec: &GridSpec, rng: &mut ChaCha8Rng) -> ParameterVector {
    let mut p = compact_point(spec, rng);
    let k = spec.k();
    let pinned = rng.gen_range(1..(1u32 << k));
    for axis in 0..k {
        if pinned >> axis & 1 == 1 {
            p.0[axis] = spec.lambda_min().0[axis].clone();
        }
    }
    p
}

/// `n` parameter vectors, deterministic in `seed`: `λ^min` first, then the
/// far field, then grid points (all of them when they fit, else a random
/// selection), cell interiors, boundary points and log-uniform points of the
/// compact box.
pub fn sample_tagged(spec: &GridSpec, n: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda_min = spec.lambda_min();
    let mut out: Vec<Sample> = Vec::with_capacity(n);
    let push = |out: &mut Vec<Sample>, strategy, p: ParameterVector| {
        if out.len() < n {
            out.push(Sample { strategy, probe: Probe::Lambda(p) });
        }
    };
    push(&mut out, Strategy::LambdaMin, lambda_min.clone());
    for p in far_field(lambda_min) {
        push(&mut out, Strategy::FarField, p);
    }
    let rest = n.saturating_sub(out.len());
    let grid_share = rest.div_ceil(4);
    if spec.size() <= grid_share {
        for (_, p) in spec.enumerate() {
            push(&mut out, Strategy::GridPoint, p);
        }
    } else {
        for _ in 0..grid_share {
            let p = spec.point(&random_index(spec, &mut rng));
            push(&mut out, Strategy::GridPoint, p);
        }
    }
    for _ in 0..rest.div_ceil(4) {
        let p = cell_interior(spec, &mut rng);
        push(&mut out, Strategy::CellInterior, p);
    }
    for _ in 0..rest / 8 {
        let p = boundary_point(spec, &mut rng);
        push(&mut out, Strategy::Boundary, p);
    }
    while out.len() < n {
        let p = compact_point(spec, &mut rng);
        push(&mut out, Strategy::CompactBox, p);
    }
    out
}

/// Parameter vectors only; see [`sample_tagged`].
pub fn sample_parameters(spec: &GridSpec, n: usize, seed: u64) -> Vec<ParameterVector> {
    sample_tagged(spec, n, seed)
        .into_iter()
        .map(|s| match s.probe {
            Probe::Lambda(p) => p,
            Probe::Weight(_) => unreachable!(),
        })
        .collect()
}

/// Grid for sampling an instance that has no approximation set at hand.
pub fn sampling_grid(instance: &ProblemInstance, eps: &Q) -> crate::Result<GridSpec> {
    let eps_prime = eps / Q::from_integer(2.into());
    let beta = (Q::one() + &eps_prime) * instance.alpha();
    let c = crate::weights::threshold_c(&eps_prime, &beta, instance.lb(), instance.ub())?;
    GridSpec::new(eps.clone(), c, instance.lambda_min().clone(), u64::MAX)
}

/// A random point of the unit simplex in `R^dim` with rational coordinates
/// (differences of sorted uniform cut points).
pub fn random_simplex_point(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Q> {
    let mut cuts: Vec<u64> = (0..dim - 1).map(|_| rng.gen_range(0..=RESOLUTION)).collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut w = Vec::with_capacity(dim);
    for c in cuts.into_iter().chain([RESOLUTION]) {
        w.push(Q::new(BigInt::from(c - prev), BigInt::from(RESOLUTION)));
        prev = c;
    }
    w
}

/// `n` weights of the unit simplex: its vertices and barycenter first, then
/// random points.
pub fn sample_simplex(dim: usize, n: usize, seed: u64) -> Vec<Vec<Q>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for i in 0..dim {
        let mut e = vec![Q::zero(); dim];
        e[i] = Q::one();
        out.push(e);
    }
    out.push(vec![Q::new(BigInt::one(), BigInt::from(dim)); dim]);
    out.truncate(n);
    while out.len() < n {
        out.push(random_simplex_point(dim, &mut rng));
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, ratio};

    fn spec(k: usize, c: Q) -> GridSpec {
        GridSpec::new(ratio(1, 2), c, ParameterVector::zeros(k), u64::MAX).unwrap()
    }

    #[test]
    fn first_sample_is_lambda_min() {
        let s = spec(2, ratio(1, 4));
        assert_eq!(sample_parameters(&s, 1, 7), vec![ParameterVector::zeros(2)]);
    }

    #[test]
    fn small_grids_are_sampled_completely() {
        let s = GridSpec::new(ratio(99, 100), ratio(999, 1000), ParameterVector(vec![q(2)]), u64::MAX).unwrap();
        assert_eq!((s.lb(), s.ub()), (-2, 2));
        let pts = sample_parameters(&s, 40, 0);
        for (_, p) in s.enumerate() {
            assert!(pts.contains(&p));
        }
        assert!(pts.contains(&ParameterVector(vec![q(3)])));
    }

    #[test]
    fn deterministic_and_in_domain() {
        let s = spec(2, ratio(1, 10));
        let a = sample_tagged(&s, 300, 11);
        assert_eq!(a, sample_tagged(&s, 300, 11));
        assert_ne!(a, sample_tagged(&s, 300, 12));
        assert_eq!(a.len(), 300);
        for x in &a {
            let Probe::Lambda(p) = &x.probe else { panic!() };
            assert!(p.0.iter().all(|v| *v >= Q::zero()));
        }
        for st in [Strategy::FarField, Strategy::GridPoint, Strategy::CellInterior, Strategy::Boundary, Strategy::CompactBox] {
            assert!(a.iter().any(|x| x.strategy == st), "{st:?} missing");
        }
    }

    #[test]
    fn simplex_points_sum_to_one() {
        for w in sample_simplex(4, 50, 3) {
            assert_eq!(w.iter().sum::<Q>(), q(1));
            assert!(w.iter().all(|v| *v >= Q::zero()));
        }
    }
}
