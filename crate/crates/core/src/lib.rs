//! Numerical toolkit for log-concave distributions.
//!
//! The crate classifies discrete and continuous laws into the usual
//! log-concavity classes (log-concave, ultra log-concave of order `n` or
//! infinite order, log-concave relative to a reference), certifies convex
//! order through the stop-loss transform, and evaluates the concentration,
//! moment, and Rényi entropy bounds that follow from majorization by a
//! log-affine law. Every bound is paired with an independent oracle
//! (exact sums, convolutions, or seeded Monte Carlo) in [`oracle`].
//!
//! Modules:
//!
//! - [`dist`]: discrete and continuous distributions, tails, MGFs, rate functions
//! - [`classify`]: class membership verdicts with log-space margins
//! - [`majorize`]: crossing counts, log-affine majorants, pushforwards, convex order
//! - [`chernoff`]: Legendre transforms and closed-form tail bounds
//! - [`moments`]: factorial moments, Keilson-type checks, moment comparisons
//! - [`entropy`]: Rényi entropies and maximum-entropy checks
//! - [`oracle`]: convolutions, Monte Carlo tails, seeded generators
//! - [`report`]: seeded property suites behind the `lcx report` command

pub mod chernoff;
pub mod classify;
pub mod dist;
pub mod entropy;
mod error;
pub mod format;
pub mod io;
pub mod majorize;
pub mod moments;
pub mod oracle;
pub mod quad;
pub mod report;
pub mod tol;

pub use dist::{ContinuousDist, DiscreteDist, DiscreteFamily, Dist, Interval, RateFunction, Side};
pub use error::{Error, Result};
