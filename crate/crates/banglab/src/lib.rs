//! Simulation lab for comparing quasistatic and bang-bang optimization
//! algorithms on Hamming-symmetric cost landscapes.
//!
//! Four algorithm families are covered:
//!
//! - SA: Metropolis-Hastings simulated annealing under a temperature schedule
//! - BBSA: bang-bang simulated annealing (alternating diffusion / descent)
//! - QAO: quantum adiabatic optimization under a control path `u(s)`
//! - QAOA: alternating phase / mixer rotations with angle schedules
//!
//! All dynamics run in reduced permutation-symmetric bases (exact by
//! symmetry), with full `2^n` brute-force oracles available for `n <= 12`.

pub mod classical;
pub mod control;
pub mod error;
pub mod harness;
pub mod landscape;
pub mod linalg;
pub mod oracle;
pub mod quantum;

pub use error::{Error, Result};
