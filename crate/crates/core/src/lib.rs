//! Quadratic neural networks read as compositions of generalized fuzzy-logic
//! gates.
//!
//! A quadratic neuron computes `(w_r·x + b_r)(w_g·x + b_g) + w_b·(x⊙x) + c`.
//! Its pure quadratic part is a symmetric form `xᵀJx`, and the inertia of
//! `J` (counts of positive, negative and zero eigenvalues) names the gate
//! type the neuron implements. Tallying gate types per layer fingerprints a
//! trained minimum; [`spectral`] turns such fingerprints into entropy and
//! generalization statistics, and [`experiments`] drives the seeded surveys.

pub mod datasets;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod quadcore;
pub mod spectral;
pub mod tensor;
pub mod trainer;

pub use error::{Error, Result};
pub use tensor::Tensor;
