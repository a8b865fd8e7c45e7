//! Concrete one-pass algorithms: trivial baselines, full-storage offline
//! solvers, and the random-projection separator.

mod baselines;
mod offline;
mod perceptron;
mod projection;
mod registry;

pub use baselines::{RandomUnitPredictor, ZeroPredictor};
pub use offline::{OfflineKernelSolver, OfflineLstsqSolver};
pub use perceptron::{perceptron, perceptron_fit, PerceptronFit};
pub use projection::{ProjectionConfig, ProjectionSeparator, Quantization, SeparatorFit};
pub use registry::{
    declared_bits, evaluate, run_registered, simulate_registered, AlgorithmName, ArrivalOrder, RunReport,
    RunSettings, SimulationCheck,
};
