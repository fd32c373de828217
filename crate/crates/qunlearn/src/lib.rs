//! Variational quantum classifier with distribution-guided class unlearning.
//!
//! The crate trains a six-qubit classifier on an exact statevector simulator,
//! removes a chosen class from a trained model by optimizing a constrained
//! objective, and scores the result against a model retrained from scratch
//! without that class. See the `examples/` directory for end-to-end runs.

pub mod checkpoint;
pub mod circuit;
pub mod config;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod pipeline;
pub mod rng;
pub mod statevector;
pub mod training;
pub mod unlearning;

pub use error::{Error, Result};
