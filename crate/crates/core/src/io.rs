//! JSON instance files and run reports.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::ApproximationSet;
use crate::error::{Error, Result};
use crate::model::{ParameterVector, Payload, ProblemInstance, Sense};
use crate::oracle::VerificationReport;
use crate::rational::{serde_q, serde_q_opt, Q};
use crate::solvers::independence::IndependenceSystem;

/// On-disk instance: `problem` selects the payload, whose fields sit at the
/// top level next to `K`, `sense`, `lambda_min` and `alpha`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sense: Option<Sense>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<ParameterVector>,
    /// Guarantee of the greedy oracle on an independence system.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_q_opt")]
    pub alpha: Option<Q>,
    #[serde(flatten)]
    pub payload: Payload,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<ProblemInstance> {
        let sense = match (self.sense, self.payload.natural_sense()) {
            (Some(s), _) => s,
            (None, Some(s)) => s,
            (None, None) => return Err(Error::Schema("explicit instances need a sense".into())),
        };
        let payload = match (self.alpha, self.payload) {
            (None, p) => p,
            (Some(alpha), Payload::Independence(s)) => {
                Payload::Independence(IndependenceSystem::new(s.elements, s.family, Some(alpha))?)
            }
            (Some(_), p) => {
                return Err(Error::Schema(format!("alpha is only accepted for independence systems, not {}", p.name())))
            }
        };
        ProblemInstance::new(sense, self.k, payload, self.lambda_min)
    }

    pub fn from_instance(instance: &ProblemInstance) -> Self {
        InstanceFile {
            k: instance.k(),
            sense: Some(instance.sense()),
            lambda_min: Some(instance.lambda_min().clone()),
            alpha: None,
            payload: instance.payload().clone(),
        }
    }
}

pub fn parse_instance(text: &str) -> Result<ProblemInstance> {
    serde_json::from_str::<InstanceFile>(text)?.into_instance()
}

pub fn load_instance(path: &Path) -> Result<ProblemInstance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn load_set(path: &Path) -> Result<ApproximationSet> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Summary of an `approximate` or `verify` run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub problem: String,
    #[serde(rename = "K")]
    pub k: usize,
    pub lambda_min: ParameterVector,
    #[serde(rename = "LB", with = "serde_q")]
    pub lb: Q,
    #[serde(rename = "UB", with = "serde_q")]
    pub ub: Q,
    #[serde(with = "serde_q")]
    pub epsilon: Q,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_q_opt")]
    pub requested_epsilon: Option<Q>,
    #[serde(with = "serde_q")]
    pub alpha: Q,
    #[serde(with = "serde_q")]
    pub guarantee: Q,
    #[serde(with = "serde_q")]
    pub c: Q,
    pub lb_exponent: i64,
    pub ub_exponent: i64,
    pub grid_size: u64,
    pub oracle_calls: u64,
    pub distinct_solution_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
}

impl RunReport {
    pub fn new(instance: &ProblemInstance, set: &ApproximationSet, wall_time_ms: Option<u64>) -> Self {
        let spec = set.spec();
        RunReport {
            problem: instance.payload().name().into(),
            k: instance.k(),
            lambda_min: instance.lambda_min().clone(),
            lb: instance.lb().clone(),
            ub: instance.ub().clone(),
            epsilon: set.eps().clone(),
            requested_epsilon: set.requested_eps().cloned(),
            alpha: set.alpha().clone(),
            guarantee: set.guarantee(),
            c: set.c().clone(),
            lb_exponent: spec.lb(),
            ub_exponent: spec.ub(),
            grid_size: spec.size() as u64,
            oracle_calls: set.oracle_calls(),
            distinct_solution_count: set.solutions().len(),
            wall_time_ms,
            verification: None,
        }
    }
}
