//! The grid approach: one oracle call per grid point, and the query path
//! that maps any parameter vector to the solution stored for its grid cell.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{check_eps, GridIndex, GridSpec, DEFAULT_GRID_CAP};
use crate::model::{Encoding, ParameterVector, ProblemInstance, Sense, SolutionRecord};
use crate::rational::{fmt_q, serde_q, sqrt_floor, Q};
use crate::weights::{lambda_to_weight, lift_to_cone, normalize_to_simplex, phi, threshold_c, LiftCertificate};

/// A solver for the non-parametric problem at a fixed parameter vector.
pub trait Oracle: Sync {
    /// `α` such that every returned solution is `α`-approximate.
    fn guarantee(&self) -> Q;

    fn solve(&self, lambda: &ParameterVector) -> Result<SolutionRecord>;

    /// Solves at a grid point. Oracles that can use the offsets
    /// `base^i_k` directly may override this to skip building `λ`.
    fn solve_at(&self, spec: &GridSpec, index: &GridIndex) -> Result<SolutionRecord> {
        self.solve(&spec.point(index))
    }

    /// Whether `solve` may be called from several threads at once.
    fn concurrent_safe(&self) -> bool {
        true
    }
}

/// Solvers indexed by an accuracy `δ`, each `(1+δ)`-approximate.
pub trait OracleFamily: Sync {
    fn solve_with(&self, delta: &Q, lambda: &ParameterVector) -> Result<SolutionRecord>;

    /// Grid-point variant of `solve_with`, see [`Oracle::solve_at`].
    fn solve_with_at(&self, delta: &Q, spec: &GridSpec, index: &GridIndex) -> Result<SolutionRecord> {
        self.solve_with(delta, &spec.point(index))
    }

    fn concurrent_safe(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug)]
pub struct EngineOptions {
    pub threads: usize,
    pub grid_cap: u64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { threads: 1, grid_cap: DEFAULT_GRID_CAP }
    }
}

/// Grid points handed to the oracle per batch before deduplication.
const BATCH: usize = 4096;

/// Digits of the rational lower bound on `√(1+ε)` used for the family split.
const SQRT_DIGITS: u32 = 12;

/// Output of the grid approach: one stored solution per grid point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproximationSet {
    eps: Q,
    alpha: Q,
    requested_eps: Option<Q>,
    sense: Sense,
    spec: GridSpec,
    solutions: Vec<SolutionRecord>,
    assignment: Vec<u32>,
    oracle_calls: u64,
}

#[derive(Serialize, Deserialize)]
struct ApproximationSetData {
    #[serde(with = "serde_q")]
    eps: Q,
    #[serde(with = "serde_q")]
    alpha: Q,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::rational::serde_q_opt")]
    requested_eps: Option<Q>,
    #[serde(with = "serde_q")]
    guarantee: Q,
    sense: Sense,
    grid: GridSpec,
    oracle_calls: u64,
    solutions: Vec<StoredSolution>,
    assignment: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct StoredSolution {
    id: String,
    #[serde(flatten)]
    record: SolutionRecord,
}

impl Serialize for ApproximationSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ApproximationSetData {
            eps: self.eps.clone(),
            alpha: self.alpha.clone(),
            requested_eps: self.requested_eps.clone(),
            guarantee: self.guarantee(),
            sense: self.sense,
            grid: self.spec.clone(),
            oracle_calls: self.oracle_calls,
            solutions: self
                .solutions
                .iter()
                .map(|r| StoredSolution { id: r.id(), record: r.clone() })
                .collect(),
            assignment: self.assignment.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ApproximationSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let data = ApproximationSetData::deserialize(d)?;
        if data.assignment.len() != data.grid.size() {
            return Err(D::Error::custom(format!(
                "assignment has {} entries for a grid of {} points",
                data.assignment.len(),
                data.grid.size()
            )));
        }
        if data.assignment.iter().any(|a| *a as usize >= data.solutions.len()) {
            return Err(D::Error::custom("assignment refers to a missing solution"));
        }
        let set = ApproximationSet {
            eps: data.eps,
            alpha: data.alpha,
            requested_eps: data.requested_eps,
            sense: data.sense,
            spec: data.grid,
            solutions: data.solutions.into_iter().map(|s| s.record).collect(),
            assignment: data.assignment,
            oracle_calls: data.oracle_calls,
        };
        if set.guarantee() != data.guarantee {
            return Err(D::Error::custom("stored guarantee differs from (1+eps)*alpha"));
        }
        Ok(set)
    }
}

/// Intermediate values of a query, for inspection and testing.
#[derive(Clone, Debug)]
pub struct QueryTrace {
    pub weight: Vec<Q>,
    pub certificate: LiftCertificate,
    pub compact: ParameterVector,
    pub index: GridIndex,
    pub solution: usize,
}

impl ApproximationSet {
    pub fn eps(&self) -> &Q {
        &self.eps
    }

    pub fn alpha(&self) -> &Q {
        &self.alpha
    }

    /// The accuracy asked for by an oracle-family run.
    pub fn requested_eps(&self) -> Option<&Q> {
        self.requested_eps.as_ref()
    }

    pub fn c(&self) -> &Q {
        self.spec.c()
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn oracle_calls(&self) -> u64 {
        self.oracle_calls
    }

    /// Distinct solutions, in order of first appearance on the grid.
    pub fn solutions(&self) -> &[SolutionRecord] {
        &self.solutions
    }

    /// `(1+ε)·α`.
    pub fn guarantee(&self) -> Q {
        (Q::one() + &self.eps) * &self.alpha
    }

    pub fn entry(&self, index: &GridIndex) -> Result<&SolutionRecord> {
        let n = self.spec.linear_index(index)?;
        Ok(&self.solutions[self.assignment[n] as usize])
    }

    /// Grid points with their stored solutions, in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (GridIndex, &SolutionRecord)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .map(move |(n, a)| (self.spec.index_at(n), &self.solutions[*a as usize]))
    }

    /// Keeps only the solutions for which `keep` holds, reassigning grid
    /// points whose solution is dropped to the first kept one. Used to build
    /// deliberately weakened sets.
    pub fn restrict(&self, keep: impl Fn(&SolutionRecord) -> bool) -> Result<ApproximationSet> {
        let kept: Vec<usize> = (0..self.solutions.len()).filter(|i| keep(&self.solutions[*i])).collect();
        let Some(&fallback) = kept.first() else {
            return Err(Error::InvalidArgument("restriction removes every solution".into()));
        };
        let remap: HashMap<usize, u32> = kept.iter().enumerate().map(|(new, old)| (*old, new as u32)).collect();
        let fallback = remap[&fallback];
        Ok(ApproximationSet {
            solutions: kept.iter().map(|i| self.solutions[*i].clone()).collect(),
            assignment: self
                .assignment
                .iter()
                .map(|a| remap.get(&(*a as usize)).copied().unwrap_or(fallback))
                .collect(),
            ..self.clone()
        })
    }

    fn check_instance(&self, instance: &ProblemInstance) -> Result<()> {
        if instance.k() != self.spec.k() || instance.lambda_min() != self.spec.lambda_min() {
            return Err(Error::InvalidArgument("approximation set was built for a different instance".into()));
        }
        if instance.sense() != self.sense {
            return Err(Error::InvalidArgument("approximation set was built for the opposite sense".into()));
        }
        Ok(())
    }

    /// Full query pipeline: normalize, lift into the cone, map back to the
    /// compact parameter box and snap to the grid.
    pub fn locate(&self, instance: &ProblemInstance, lambda: &ParameterVector) -> Result<QueryTrace> {
        self.check_instance(instance)?;
        instance.check_domain(lambda)?;
        let lambda_min = self.spec.lambda_min();
        let weight = lambda_to_weight(lambda, lambda_min)?.0;
        let certificate = lift_to_cone(&weight, self.spec.c())?;
        let lifted = normalize_to_simplex(&certificate.final_weight)?;
        let compact = phi(&lifted, lambda_min)?;
        let index = self.spec.snap(&compact)?;
        let solution = self.assignment[self.spec.linear_index(&index)?] as usize;
        Ok(QueryTrace { weight, certificate, compact, index, solution })
    }

    /// The stored solution for `λ`; it is `(1+ε)·α`-approximate at `λ`.
    pub fn query(&self, instance: &ProblemInstance, lambda: &ParameterVector) -> Result<&SolutionRecord> {
        let trace = self.locate(instance, lambda)?;
        Ok(&self.solutions[trace.solution])
    }
}

/// Runs the grid approach with a fixed-guarantee oracle.
pub fn approximate(
    instance: &ProblemInstance,
    eps: &Q,
    oracle: &dyn Oracle,
    options: &EngineOptions,
) -> Result<ApproximationSet> {
    check_eps(eps)?;
    let alpha = oracle.guarantee();
    if alpha < Q::one() {
        return Err(Error::InvalidArgument("oracle guarantee must be at least 1".into()));
    }
    let eps_prime = eps / Q::from_integer(BigInt::from(2));
    let beta = (Q::one() + &eps_prime) * &alpha;
    let c = threshold_c(&eps_prime, &beta, instance.lb(), instance.ub())?;
    let spec = GridSpec::new(eps.clone(), c, instance.lambda_min().clone(), options.grid_cap)?;

    let size = spec.size();
    let mut solutions: Vec<SolutionRecord> = Vec::new();
    let mut seen: HashMap<Encoding, u32> = HashMap::new();
    let mut assignment = Vec::with_capacity(size);
    let parallel = options.threads > 1 && oracle.concurrent_safe();
    let pool = if parallel {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(options.threads)
                .build()
                .map_err(|e| Error::Internal(e.to_string()))?,
        )
    } else {
        None
    };
    let call = |n: usize| -> Result<SolutionRecord> {
        let index = spec.index_at(n);
        oracle
            .solve_at(&spec, &index)
            .map_err(|e| Error::OracleFailure { lambda: spec.point(&index).to_string(), message: e.to_string() })
    };
    let mut start = 0;
    while start < size {
        let end = (start + BATCH).min(size);
        let batch: Vec<SolutionRecord> = match &pool {
            Some(pool) => pool.install(|| (start..end).into_par_iter().map(call).collect::<Result<_>>())?,
            None => (start..end).map(call).collect::<Result<_>>()?,
        };
        for record in batch {
            let next = solutions.len() as u32;
            let slot = match seen.get(&record.encoding) {
                Some(slot) => *slot,
                None => {
                    let fresh = instance.record(record.encoding.clone())?;
                    if fresh.f != record.f {
                        return Err(Error::OracleFailure {
                            lambda: String::new(),
                            message: format!("objective vector of {} is inconsistent with the instance", record.id()),
                        });
                    }
                    seen.insert(record.encoding.clone(), next);
                    solutions.push(record);
                    next
                }
            };
            assignment.push(slot);
        }
        start = end;
    }

    Ok(ApproximationSet {
        eps: eps.clone(),
        alpha,
        requested_eps: None,
        sense: instance.sense(),
        spec,
        solutions,
        assignment,
        oracle_calls: size as u64,
    })
}

struct FamilyAt<'a> {
    family: &'a dyn OracleFamily,
    delta: Q,
}

impl Oracle for FamilyAt<'_> {
    fn guarantee(&self) -> Q {
        Q::one() + &self.delta
    }

    fn solve(&self, lambda: &ParameterVector) -> Result<SolutionRecord> {
        self.family.solve_with(&self.delta, lambda)
    }

    fn solve_at(&self, spec: &GridSpec, index: &GridIndex) -> Result<SolutionRecord> {
        self.family.solve_with_at(&self.delta, spec, index)
    }

    fn concurrent_safe(&self) -> bool {
        self.family.concurrent_safe()
    }
}

/// `δ ≤ √(1+ε) − 1`, exact whenever `1+ε` is a rational square.
pub fn family_delta(eps: &Q) -> Result<Q> {
    check_eps(eps)?;
    let delta = sqrt_floor(&(Q::one() + eps), SQRT_DIGITS) - Q::one();
    if !delta.is_positive() {
        return Err(Error::EpsilonOutOfRange(fmt_q(eps)));
    }
    Ok(delta)
}

/// Runs the grid approach with a `(1+δ)`-approximate family member at
/// `δ = √(1+ε) − 1`, so the overall guarantee is `(1+δ)² ≤ 1+ε`.
pub fn approximate_with_family(
    instance: &ProblemInstance,
    eps: &Q,
    family: &dyn OracleFamily,
    options: &EngineOptions,
) -> Result<ApproximationSet> {
    let delta = family_delta(eps)?;
    let oracle = FamilyAt { family, delta: delta.clone() };
    let mut set = approximate(instance, &delta, &oracle, options)?;
    set.requested_eps = Some(eps.clone());
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Payload;
    use crate::rational::{q, ratio};
    use crate::solvers::explicit::ExplicitList;
    use crate::solvers::knapsack::{Item, KnapsackData};
    use crate::solvers::{BuiltinOracle, KnapsackFptas};

    fn knapsack_toy() -> ProblemInstance {
        let data = KnapsackData {
            items: vec![Item { a: 3, b: vec![1], w: 2 }, Item { a: 2, b: vec![4], w: 2 }],
            capacity: 2,
        };
        ProblemInstance::new(Sense::Maximize, 1, Payload::Knapsack(data), Some(ParameterVector(vec![q(0)]))).unwrap()
    }

    #[test]
    fn single_solution_everywhere() {
        let inst =
            ProblemInstance::explicit(Sense::Minimize, ExplicitList::from_vectors(vec![vec![q(2), q(3)]])).unwrap();
        let set = approximate(&inst, &ratio(1, 2), &BuiltinOracle::new(&inst), &EngineOptions::default()).unwrap();
        assert_eq!(set.solutions().len(), 1);
        assert_eq!(set.oracle_calls(), set.spec().size() as u64);
        for l in [q(0), q(7), q(1_000_000)] {
            assert_eq!(set.query(&inst, &ParameterVector(vec![l])).unwrap().encoding, Encoding::Index { index: 0 });
        }
    }

    #[test]
    fn knapsack_toy_guarantee() {
        let inst = knapsack_toy();
        let set = approximate(&inst, &ratio(1, 2), &BuiltinOracle::new(&inst), &EngineOptions::default()).unwrap();
        assert_eq!(set.guarantee(), ratio(3, 2));
        assert_eq!(set.solutions().len(), 2);
        for n in 0..200 {
            let lambda = ParameterVector(vec![ratio(n * n, 37)]);
            let x = set.query(&inst, &lambda).unwrap();
            let got = inst.evaluate(x, &lambda).unwrap();
            let best = [vec![0usize], vec![1]]
                .into_iter()
                .map(|items| inst.evaluate(&inst.record(Encoding::Items { items }).unwrap(), &lambda).unwrap())
                .max()
                .unwrap();
            assert!(inst.within(&got, &best, &set.guarantee()));
        }
        assert!(matches!(
            set.query(&inst, &ParameterVector(vec![q(-1)])),
            Err(Error::DomainViolation { .. })
        ));
    }

    #[test]
    fn threads_do_not_change_the_result() {
        let inst = knapsack_toy();
        let one = approximate(&inst, &ratio(1, 4), &BuiltinOracle::new(&inst), &EngineOptions::default()).unwrap();
        let four = approximate(
            &inst,
            &ratio(1, 4),
            &BuiltinOracle::new(&inst),
            &EngineOptions { threads: 4, ..EngineOptions::default() },
        )
        .unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn family_split() {
        assert_eq!(family_delta(&ratio(21, 100)).unwrap(), ratio(1, 10));
        let inst = knapsack_toy();
        let fptas = KnapsackFptas::new(&inst).unwrap();
        let set = approximate_with_family(&inst, &ratio(21, 100), &fptas, &EngineOptions::default()).unwrap();
        assert_eq!(set.guarantee(), ratio(121, 100));
        assert_eq!(set.requested_eps(), Some(&ratio(21, 100)));
        let d = family_delta(&ratio(1, 2)).unwrap();
        assert!((Q::one() + &d) * (Q::one() + &d) <= ratio(3, 2));
    }

    #[test]
    fn eps_out_of_range() {
        let inst = knapsack_toy();
        for eps in [q(0), ratio(3, 2), q(1)] {
            assert!(matches!(
                approximate(&inst, &eps, &BuiltinOracle::new(&inst), &EngineOptions::default()),
                Err(Error::EpsilonOutOfRange(_))
            ));
        }
    }

    #[test]
    fn serde_round_trip() {
        let inst = knapsack_toy();
        let set = approximate(&inst, &ratio(1, 2), &BuiltinOracle::new(&inst), &EngineOptions::default()).unwrap();
        let text = serde_json::to_string(&set).unwrap();
        let back: ApproximationSet = serde_json::from_str(&text).unwrap();
        assert_eq!(set, back);
    }
}
