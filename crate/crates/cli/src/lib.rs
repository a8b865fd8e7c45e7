//! Front end of the `nullstream` binary.
//!
//! Exit codes: 0 success, 1 a certificate failed its acceptance rule,
//! 2 invalid input, 3 conditioning too rare to generate, 4 budget violation,
//! 5 algorithm failure.

use std::fmt;
use std::io::Write;

use clap::{Parser, Subcommand};
use nullstream::Error;

mod experiment;
mod gen;
mod run;
mod spec;
mod verify;

pub use experiment::{ExperimentArgs, ExperimentSpec, BudgetSpec, CSV_COLUMNS};
pub use gen::GenArgs;
pub use run::RunArgs;
pub use spec::InstanceSpec;
pub use verify::{LemmaId, VerifyArgs};

#[derive(Debug, Parser)]
#[command(name = "nullstream", version, about = "Memory-bounded streaming testbed")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Run a registered algorithm on an instance under a bit budget.
    Run(RunArgs),
    /// Numerically certify a geometric lemma.
    Verify(VerifyArgs),
    /// Run a parameter sweep described by a JSON spec, appending to a CSV.
    Experiment(ExperimentArgs),
}

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Usage(String),
    CertificateFailed(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::CertificateFailed(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Core(e) => match e {
                Error::AcceptanceTooRare { .. } => 3,
                Error::BudgetViolation { .. } => 4,
                Error::NotSeparableInProjection { .. }
                | Error::DegenerateOutput { .. }
                | Error::RankDeficient { .. }
                | Error::DegenerateInput
                | Error::OverlapDetected { .. }
                | Error::MalformedState(_) => 5,
                _ => 2,
            },
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Usage(m) => f.write_str(m),
            Failure::CertificateFailed(m) => write!(f, "certificate failed: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

/// Runs one command, writing its primary output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Gen(a) => gen::cmd_gen(&a, out),
        Command::Run(a) => run::cmd_run(&a, out),
        Command::Verify(a) => verify::cmd_verify(&a, out),
        Command::Experiment(a) => experiment::cmd_experiment(&a, out),
    }
}

/// Rejects flags that do not apply to the chosen variant.
pub(crate) fn reject_unused(context: &str, given: &[(&str, bool)], allowed: &[&str]) -> CliResult<()> {
    let bad: Vec<&str> = given
        .iter()
        .filter(|(name, set)| *set && !allowed.contains(name))
        .map(|(name, _)| *name)
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{context} does not take {}", bad.join(", "))))
    }
}
