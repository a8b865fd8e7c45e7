//! Numerical certificates for the geometric facts behind the lower bounds.
//!
//! Statements quantified over every unit vector are certified through exact
//! eigenvalue reductions (projector sums, reduced pencils), never by sampling
//! directions. Trials use seeds derived from the run seed and the trial index,
//! so every report is reproducible byte for byte.

mod certificates;
mod packing;
mod random_matrix;
mod report;
mod sphere;

pub use certificates::{certify_comorth, certify_no_joint_sol, certify_sandwich, sandwich_bounds, sandwich_extremes};
pub use packing::{greedy_packing, MAX_PACKING_DIM};
pub use random_matrix::singular_value_experiment;
pub use report::{LemmaReport, TrialRecord, TrialStatus};
pub use sphere::{ks_distance, ks_from_cdf_values, sphere_concentration_test, sphere_marginal_tests, MarginalThresholds};
