//! Simulation and validation of Hermite processes through the local time of
//! intersecting stationary stable regenerative sets.
//!
//! Regenerative sets are sampled as the uncovered part of a Poisson family of
//! random open intervals ([`covering`]). Their intersections carry an
//! approximate local time ([`local_time`]), which drives the atom-discretized
//! multiple Wiener-Itô integral in [`hermite_paths`]. Two further routes, one
//! through Hermite polynomials of a stationary Gaussian field
//! ([`gaussian_field`]) and one through the classical moving-average kernel,
//! produce independent samples of the same law for cross-checking.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod covering;
pub mod ensemble;
pub mod error;
pub mod gaussian_field;
pub mod hermite_paths;
pub mod interval_set;
pub mod local_time;
pub mod quadrature;
pub mod rng;
pub mod specfun;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
