//! Approximation sets for linear multi-parametric optimization problems.
//!
//! Given an exact or `α`-approximate solver for the ordinary problem at a
//! fixed parameter vector, [`engine::approximate`] calls it on a logarithmic
//! grid of parameter vectors and returns a finite solution set that contains
//! a `(1+ε)·α`-approximate solution for every parameter vector. All
//! objective values and weights are exact rationals.

pub mod engine;
pub mod error;
pub mod grid;
pub mod io;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod solvers;
pub mod weights;

pub use engine::{approximate, approximate_with_family, ApproximationSet, EngineOptions, Oracle, OracleFamily};
pub use error::{Error, Result};
pub use grid::{GridIndex, GridSpec};
pub use model::{Encoding, ParameterVector, Payload, ProblemInstance, Sense, SolutionRecord};
pub use rational::Q;
pub use weights::{LiftCertificate, Weight};
