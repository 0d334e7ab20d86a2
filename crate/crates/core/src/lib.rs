//! Inhomogeneous random K-out graphs.
//!
//! Each of `n` nodes is independently assigned a type; a node of type `t`
//! selects `K_t` distinct other nodes uniformly at random, and two nodes are
//! adjacent when at least one selected the other. This crate generates such
//! graphs from explicit seeds, measures their connectivity (components,
//! minimum degree, k-vertex-connectivity), evaluates the closed-form edge,
//! threshold and cut probabilities of the model, provides brute-force oracles
//! for small instances, and runs reproducible Monte Carlo sweeps.
//!
//! All logarithms are natural logarithms.

pub mod connectivity;
pub mod error;
pub mod graph;
pub mod montecarlo;
pub mod oracle;
pub mod scalar;
pub mod theory;

pub use error::{Error, Result};
pub use graph::{generate, Graph, GraphParams, KOutGraph, Seed};

/// Exact rational scalar used by the enumeration oracle and the exact
/// evaluations of product-form probabilities.
pub type Exact = num_rational::BigRational;

/// Threshold query over `f64`.
pub type ThresholdQuery = theory::ThresholdQuery<f64>;
/// Theory report over `f64`.
pub type TheoryReport = theory::TheoryReport<f64>;
/// Giant-component bound report over `f64`.
pub type BoundReport = theory::BoundReport<f64>;
