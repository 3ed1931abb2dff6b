// Negated comparisons like `!(v > 0.0)` keep NaN on the error path of the
// validation checks; rewriting them as `v <= 0.0` would let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Malicious-URL classification from lexical features.
//!
//! The pipeline cleans a URL corpus, extracts five lexical features per
//! URL, transforms them through a self-organizing map refined by radial
//! particle movement, and classifies the reduced representation with a
//! Gaussian radial basis function network whose parameters are tuned by
//! gradient descent and then tabu search. Evaluation produces confusion
//! matrices and the standard derived metrics per split.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod features;
pub mod metrics;
pub mod pipeline;
pub mod rbfn;
pub mod som_rmo;
pub mod tabu;
