//! Non-parametric solvers used as oracles by the grid engine.

pub mod explicit;
pub mod independence;
pub mod knapsack;
pub mod linear;
pub mod mincut;

use crate::engine::{Oracle, OracleFamily};
use crate::error::{Error, Result};
use crate::grid::{GridIndex, GridSpec};
use crate::model::{ParameterVector, Payload, ProblemInstance, SolutionRecord};
use crate::rational::Q;
use linear::Scalarization;

/// Best solution under an arbitrary nonnegative weight on `(F_0, …, F_K)`,
/// using the built-in solver of the instance's payload.
pub fn solve_weight(instance: &ProblemInstance, w: &[Q]) -> SolutionRecord {
    match instance.payload() {
        Payload::Explicit(list) => explicit::solve(instance, list, w),
        payload => {
            let sig = Scalarization::new(w);
            match payload {
                Payload::Mincut(g) => mincut::solve(instance, g, &sig),
                Payload::Knapsack(d) => knapsack::solve_exact(instance, d, &sig),
                Payload::Independence(s) => independence::greedy(instance, s, &sig),
                Payload::Explicit(_) => unreachable!(),
            }
        }
    }
}

/// Weight `(1, λ − λ^min)` under which the augmented objective equals `f(·, λ)`.
pub fn offset_weight(instance: &ProblemInstance, lambda: &ParameterVector) -> Vec<Q> {
    let mut w = Vec::with_capacity(instance.k() + 1);
    w.push(Q::from_integer(1.into()));
    w.extend(lambda.0.iter().zip(&instance.lambda_min().0).map(|(l, m)| l - m));
    w
}

/// Offset weight `(1, base^{i_1}, …, base^{i_K})` of a grid point, read off
/// the cached powers. `None` when the grid belongs to another domain.
fn grid_weight(instance: &ProblemInstance, spec: &GridSpec, index: &GridIndex) -> Option<Vec<Q>> {
    if spec.lambda_min() != instance.lambda_min() || index.0.len() != instance.k() {
        return None;
    }
    let mut w = Vec::with_capacity(index.0.len() + 1);
    w.push(Q::from_integer(1.into()));
    w.extend(index.0.iter().map(|i| spec.power(*i).clone()));
    Some(w)
}

/// The instance's own solver: exact for explicit lists, cuts and knapsack,
/// greedy with the declared guarantee for independence systems.
pub struct BuiltinOracle<'a> {
    instance: &'a ProblemInstance,
}

impl<'a> BuiltinOracle<'a> {
    pub fn new(instance: &'a ProblemInstance) -> Self {
        BuiltinOracle { instance }
    }
}

impl Oracle for BuiltinOracle<'_> {
    fn guarantee(&self) -> Q {
        self.instance.alpha().clone()
    }

    fn solve(&self, lambda: &ParameterVector) -> Result<SolutionRecord> {
        self.instance.check_domain(lambda)?;
        Ok(solve_weight(self.instance, &offset_weight(self.instance, lambda)))
    }

    fn solve_at(&self, spec: &GridSpec, index: &GridIndex) -> Result<SolutionRecord> {
        match grid_weight(self.instance, spec, index) {
            Some(w) => Ok(solve_weight(self.instance, &w)),
            None => self.solve(&spec.point(index)),
        }
    }
}

/// Knapsack profit-scaling FPTAS as an accuracy-indexed oracle family.
pub struct KnapsackFptas<'a> {
    instance: &'a ProblemInstance,
}

impl<'a> KnapsackFptas<'a> {
    pub fn new(instance: &'a ProblemInstance) -> Result<Self> {
        match instance.payload() {
            Payload::Knapsack(_) => Ok(KnapsackFptas { instance }),
            other => Err(Error::InvalidArgument(format!("the FPTAS needs a knapsack instance, got {}", other.name()))),
        }
    }
}

impl OracleFamily for KnapsackFptas<'_> {
    fn solve_with(&self, delta: &Q, lambda: &ParameterVector) -> Result<SolutionRecord> {
        self.instance.check_domain(lambda)?;
        let Payload::Knapsack(data) = self.instance.payload() else { unreachable!() };
        let sig = Scalarization::new(&offset_weight(self.instance, lambda));
        knapsack::solve_fptas(self.instance, data, &sig, delta)
    }

    fn solve_with_at(&self, delta: &Q, spec: &GridSpec, index: &GridIndex) -> Result<SolutionRecord> {
        let Some(w) = grid_weight(self.instance, spec, index) else {
            return self.solve_with(delta, &spec.point(index));
        };
        let Payload::Knapsack(data) = self.instance.payload() else { unreachable!() };
        knapsack::solve_fptas(self.instance, data, &Scalarization::new(&w), delta)
    }
}
