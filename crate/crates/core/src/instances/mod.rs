//! Generators and evaluators for the three problem families: approximate null
//! vectors (ANV), linear separation (LSP) and linear regression (LR).
//!
//! Conditioned instances are drawn by exact rejection sampling. Given its
//! kernel, the conditional law of the vectors carries a determinant weight, so
//! constructing them directly inside `w*⊥` would be biased.

mod anv;
mod file;
mod lr;
mod lsp;

pub use anv::{anv_loss, gen_anv_conditioned, gen_anv_gaussian, try_conditioned_draw, AnvInstance, AnvVariant};
pub use file::Instance;
pub use lr::{gen_lr_from_anv, insertion_position, lr_loss, Equation, LrInstance};
pub use lsp::{
    classification_error, gen_lsp_from_anv, gen_lsp_hard, gen_lsp_margin, margin_of, sample_dv, shifted_pair,
    LabeledPoint, LspDataset,
};
