//! Population-counting Bell inequalities in the three-axis (Wigner) form.
//!
//! Anticorrelated spin pairs measured by two observers along three axes fall
//! into eight populations. This crate computes exact outcome probabilities
//! from population counts, checks the resulting inequality, implements the
//! multiplicity/entropy algebra that leads to it, samples from infinite and
//! finite reservoirs, and provides a quantum singlet baseline that violates
//! the inequality.
//!
//! Modules:
//!
//! - [`model`]: the population table, outcome-to-population mapping, exact
//!   probabilities and the count-level inequality check.
//! - [`reservoir`]: seeded sampling with and without replacement.
//! - [`entropy`]: Boltzmann/Gibbs entropy, multiplicity products and the
//!   multiplicity and entropy forms of the inequality.
//! - [`quantum`]: singlet-state predictions and sampler.
//! - [`report`]: experiment configuration, dispatch and JSON/CSV emission
//!   behind the `bellstat` binary.
//!
//! With the default `parallel` feature the Monte Carlo loops run on rayon.
//! Every stochastic result is keyed on fixed sub-streams of the seed, so the
//! output does not depend on the number of worker threads or on whether the
//! feature is enabled.

pub mod entropy;
pub mod error;
pub mod exec;
pub mod model;
pub mod quantum;
pub mod report;
pub mod reservoir;
pub mod rng;

pub use error::{Error, Result};
pub use exec::Exec;
