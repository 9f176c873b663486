//! Quantum-regression workbench.
//!
//! Dense statevector simulation of small parametrized circuits with data
//! re-uploading, full-batch Adam training with exact adjoint gradients, a
//! genetic search over integer-encoded circuit architectures, twelve
//! regression complexity measures, classical reference models, and a
//! meta-learning layer that predicts the best quantum architecture from a
//! dataset's complexity profile.
//!
//! Data-parallel loops (per-sample evaluation, population fitness, subset
//! search, forest fitting) run on rayon when the `parallel` feature is on
//! (the default) and sequentially otherwise. Results are identical either way:
//! every reduction is performed in index order after the parallel phase.

pub mod baselines;
pub mod benchmarks;
pub mod circuit;
pub mod complexity;
mod error;
pub mod ga;
pub mod metalearn;
pub mod par;
pub mod rng;
pub mod runner;
pub mod sim;
pub mod train;

pub use error::{Error, Result};
