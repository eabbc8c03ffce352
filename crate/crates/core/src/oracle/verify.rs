//! Checks that a solution set is β-approximate at every sampled probe.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::ApproximationSet;
use crate::error::{Error, Result};
use crate::model::{ParameterVector, ProblemInstance, Sense, SolutionRecord};
use crate::oracle::brute::{dot, BruteForce, Evaluator};
use crate::oracle::sampling::{Probe, Sample, Strategy};
use crate::rational::{fmt_q, parse_q, serde_q, Q};
use crate::solvers::offset_weight;
use crate::weights::Weight;

/// Approximation ratio of a set at one probe, `≥ 1`. `Infinite` marks a
/// zero optimum that the set misses.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ratio {
    Finite(Q),
    Infinite,
}

impl Ratio {
    pub fn one() -> Self {
        Ratio::Finite(Q::from_integer(1.into()))
    }

    pub fn within(&self, beta: &Q) -> bool {
        matches!(self, Ratio::Finite(r) if r <= beta)
    }

    /// Ratio of a set value against the optimum: `set/opt` when
    /// minimizing, `opt/set` when maximizing; two zeros give 1.
    pub fn of(sense: Sense, set_value: &Q, optimum: &Q) -> Ratio {
        let (num, den) = match sense {
            Sense::Minimize => (set_value, optimum),
            Sense::Maximize => (optimum, set_value),
        };
        if den.is_zero() {
            if num.is_zero() {
                Ratio::one()
            } else {
                Ratio::Infinite
            }
        } else {
            Ratio::Finite(num / den)
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Finite(r) => f.write_str(&fmt_q(r)),
            Ratio::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            return Ok(Ratio::Infinite);
        }
        parse_q(&s).map(Ratio::Finite).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub strategy: Strategy,
    pub samples: u64,
    pub failures: u64,
    pub worst_ratio: Ratio,
}

/// Outcome of a sampled verification. The property is certified at the
/// listed probes only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub mode: String,
    #[serde(with = "serde_q")]
    pub beta: Q,
    pub samples_tested: u64,
    pub failures: u64,
    pub worst_ratio: Ratio,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_lambda: Option<ParameterVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_weight: Option<Weight>,
    pub passed: bool,
    pub strategies: Vec<StrategyReport>,
}

impl VerificationReport {
    fn build(mode: &str, beta: &Q, samples: &[Sample], ratios: Vec<Ratio>) -> Self {
        let mut worst: Option<(usize, &Ratio)> = None;
        let mut per: BTreeMap<Strategy, StrategyReport> = BTreeMap::new();
        let mut failures = 0;
        for (i, (s, r)) in samples.iter().zip(&ratios).enumerate() {
            let failed = !r.within(beta);
            failures += failed as u64;
            if worst.is_none_or(|(_, w)| r > w) {
                worst = Some((i, r));
            }
            let entry = per.entry(s.strategy).or_insert_with(|| StrategyReport {
                strategy: s.strategy,
                samples: 0,
                failures: 0,
                worst_ratio: Ratio::one(),
            });
            entry.samples += 1;
            entry.failures += failed as u64;
            if *r > entry.worst_ratio {
                entry.worst_ratio = r.clone();
            }
        }
        let (worst_ratio, worst_lambda, worst_weight) = match worst {
            None => (Ratio::one(), None, None),
            Some((i, r)) => match &samples[i].probe {
                Probe::Lambda(l) => (r.clone(), Some(l.clone()), None),
                Probe::Weight(w) => (r.clone(), None, Some(w.clone())),
            },
        };
        VerificationReport {
            mode: mode.into(),
            beta: beta.clone(),
            samples_tested: samples.len() as u64,
            failures,
            passed: worst_ratio.within(beta),
            worst_ratio,
            worst_lambda,
            worst_weight,
            strategies: per.into_values().collect(),
        }
    }
}

/// Augmented weight of a probe: `(1, λ − λ^min)` for parameter vectors.
pub fn probe_weight(instance: &ProblemInstance, probe: &Probe) -> Result<Vec<Q>> {
    match probe {
        Probe::Lambda(l) => {
            instance.check_domain(l)?;
            Ok(offset_weight(instance, l))
        }
        Probe::Weight(w) => {
            if w.len() != instance.k() + 1 {
                return Err(Error::InvalidArgument(format!(
                    "weight has {} components, expected {}",
                    w.len(),
                    instance.k() + 1
                )));
            }
            Ok(w.0.clone())
        }
    }
}

fn run(
    instance: &ProblemInstance,
    samples: &[Sample],
    set_value: impl Fn(&Probe, &[Q]) -> Result<Q> + Sync,
) -> Result<Vec<Ratio>> {
    let brute = BruteForce::new(instance)?;
    samples
        .par_iter()
        .map(|s| {
            let w = probe_weight(instance, &s.probe)?;
            let (_, opt) = brute.optimum_weight(&w);
            let v = set_value(&s.probe, &w)?;
            Ok(Ratio::of(instance.sense(), &v, &opt))
        })
        .collect()
}

/// Definition-level check: at each probe the best member of `set` is within
/// `β` of the brute-force optimum.
pub fn verify_set(
    instance: &ProblemInstance,
    set: &[SolutionRecord],
    beta: &Q,
    samples: &[Sample],
) -> Result<VerificationReport> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("cannot verify an empty solution set".into()));
    }
    let eval = Evaluator::new(set.iter().map(|r| r.f.clone()).collect(), instance.sense());
    let ratios = run(instance, samples, |_, w| Ok(eval.best(w).1))?;
    Ok(VerificationReport::build("set", beta, samples, ratios))
}

/// Stronger check: at each parameter vector the solution returned by the
/// set's query is within `β` of the optimum.
pub fn verify_queries(
    instance: &ProblemInstance,
    set: &ApproximationSet,
    beta: &Q,
    samples: &[Sample],
) -> Result<VerificationReport> {
    let ratios = run(instance, samples, |probe, w| match probe {
        Probe::Lambda(l) => Ok(dot(&set.query(instance, l)?.f, w)),
        Probe::Weight(_) => Err(Error::InvalidArgument("queries take parameter vectors, not weights".into())),
    })?;
    Ok(VerificationReport::build("query", beta, samples, ratios))
}

/// Wraps raw weights as probes with the given strategy tag.
pub fn weight_samples(weights: impl IntoIterator<Item = Vec<Q>>, strategy: Strategy) -> Vec<Sample> {
    weights.into_iter().map(|w| Sample { strategy, probe: Probe::Weight(Weight(w)) }).collect()
}

/// Wraps parameter vectors as probes with the given strategy tag.
pub fn lambda_samples(points: impl IntoIterator<Item = ParameterVector>, strategy: Strategy) -> Vec<Sample> {
    points.into_iter().map(|p| Sample { strategy, probe: Probe::Lambda(p) }).collect()
}
