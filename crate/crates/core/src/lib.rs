//! Memory-bounded streaming testbed.
//!
//! One-pass algorithms run under an enforced bit budget on approximate-null-vector,
//! linear-separator and linear-regression instances. The crate provides the
//! hard-instance generators, the reductions between the three problems, the
//! random-projection separator, and exact numerical certificates for the
//! geometric facts behind the quadratic memory lower bounds.

// `!(x > 0.0)` is how parameter checks reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod config;
pub mod error;
pub mod fmt;
pub mod instances;
pub mod linalg;
pub mod marginal;
pub mod reductions;
pub mod streaming;
pub mod verification;

pub use error::{Error, Result};
