//! Unambiguous discrimination of linearly independent pure states: reciprocal
//! states, zero-error measurement synthesis, optimal conditional
//! probabilities, seeded simulation, and the same machinery applied to
//! single-copy entanglement concentration.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::approx_constant))]
pub mod concentration;
pub mod ensemble;
pub mod error;
pub mod measurement;
pub mod numcore;
pub mod optimizer;
pub mod par;
pub mod random;
pub mod simulator;

pub use error::{Error, Result};
pub use numcore::{ComplexMatrix, C64};
pub use par::Execution;
