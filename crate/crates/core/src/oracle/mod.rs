//! Ground truth and checks: brute-force optima, parameter sampling, sampled
//! verification of approximation sets, minimum covers and hard instances.

pub mod brute;
pub mod cover;
pub mod gadgets;
pub mod sampling;
pub mod verify;

pub use brute::{brute_force_optimum, enumerate_feasible, BruteForce};
pub use cover::{minimum_cover, minimum_cover_size};
pub use sampling::{sample_parameters, sample_simplex, sample_tagged, Probe, Sample, Strategy};
pub use verify::{verify_queries, verify_set, Ratio, VerificationReport};
