//! Enumerated solution sets given directly by their objective vectors.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Encoding, ProblemInstance, Sense, SolutionRecord};
use crate::rational::{serde_q_vec, Q};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitSolution {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(rename = "F", with = "serde_q_vec")]
    pub f: Vec<Q>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExplicitList {
    pub solutions: Vec<ExplicitSolution>,
}

impl ExplicitList {
    pub fn from_vectors(vectors: Vec<Vec<Q>>) -> Self {
        ExplicitList {
            solutions: vectors.into_iter().map(|f| ExplicitSolution { label: None, f }).collect(),
        }
    }

    pub fn k(&self) -> Option<usize> {
        self.solutions.first().map(|s| s.f.len().saturating_sub(1))
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub(crate) fn validate(&self, k: usize) -> Result<()> {
        if self.solutions.is_empty() {
            return Err(Error::InvalidArgument("explicit list is empty".into()));
        }
        for (i, s) in self.solutions.iter().enumerate() {
            if s.f.len() != k + 1 {
                return Err(Error::Schema(format!(
                    "solution {i} has {} objective components, expected {}",
                    s.f.len(),
                    k + 1
                )));
            }
            if s.f.iter().any(Signed::is_negative) {
                return Err(Error::InvalidArgument(format!("solution {i} has a negative objective component")));
            }
        }
        Ok(())
    }

    /// Smallest nonzero and largest objective component over the list.
    pub(crate) fn bounds(&self) -> Result<(Q, Q)> {
        let all = self.solutions.iter().flat_map(|s| s.f.iter());
        let ub = all.clone().max().cloned().unwrap_or_else(Q::zero);
        let lb = all.filter(|v| !v.is_zero()).min().cloned();
        match lb {
            Some(lb) => Ok((lb, ub)),
            None => Err(Error::DegenerateInstance("every objective component is zero".into())),
        }
    }

    pub(crate) fn f_vector(&self, index: usize) -> Result<Vec<Q>> {
        self.solutions
            .get(index)
            .map(|s| s.f.clone())
            .ok_or_else(|| Error::Schema(format!("solution index {index} out of range")))
    }
}

/// Index of the best solution under the weight `w` (ties to the lowest index).
pub fn best_index(list: &ExplicitList, sense: Sense, w: &[Q]) -> usize {
    let mut best = 0;
    let mut best_val: Option<Q> = None;
    for (i, s) in list.solutions.iter().enumerate() {
        let v: Q = s.f.iter().zip(w).filter(|(f, _)| !f.is_zero()).map(|(f, x)| f * x).sum();
        let improves = match &best_val {
            None => true,
            Some(b) => match sense {
                Sense::Minimize => v < *b,
                Sense::Maximize => v > *b,
            },
        };
        if improves {
            best = i;
            best_val = Some(v);
        }
    }
    best
}

pub fn solve(instance: &ProblemInstance, list: &ExplicitList, w: &[Q]) -> SolutionRecord {
    let index = best_index(list, instance.sense(), w);
    SolutionRecord { encoding: Encoding::Index { index }, f: list.solutions[index].f.clone() }
}
