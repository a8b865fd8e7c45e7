//! Computation models: one-pass algorithms under an enforced bit budget,
//! one-way protocols, random arrival order and the one-pass to protocol
//! simulation.
//!
//! Only the configuration carried between samples counts against the budget.
//! Scratch memory inside a single `update` call is free, as in the model where
//! each `fᵢ` is an arbitrary function.

mod bits;
mod protocol;
mod randomness;
mod runner;

pub use bits::{BitReader, BitState, BitWriter};
pub use protocol::{one_pass_to_protocol, run_protocol, BitString, Protocol, ProtocolTranscript, SimulatedProtocol};
pub use randomness::{derive_seed, mix, SharedRandomness};
pub use runner::{advance, run_one_pass, run_one_pass_with_state, shuffle, OnePassAlgorithm};
