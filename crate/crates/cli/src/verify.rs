use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use nullstream::verification::*;

use crate::{reject_unused, CliResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LemmaId {
    NoJointSol,
    Sandwich,
    Comorth,
    SingularValues,
    SphereMarginal,
    SphereConcentration,
    Packing,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub lemma: LemmaId,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub c_emp: Option<f64>,
    /// Row count of the Gaussian matrix (singular-values).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub cf: Option<f64>,
    #[arg(long)]
    pub c_std: Option<f64>,
    #[arg(long)]
    pub min_pass: Option<f64>,
    #[arg(long)]
    pub ks_exact: Option<f64>,
    #[arg(long)]
    pub ks_normal: Option<f64>,
    /// Subspace dimension (packing).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Candidate budget (packing).
    #[arg(long)]
    pub budget: Option<usize>,
    /// Per-trial CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl VerifyArgs {
    fn check_flags(&self) -> CliResult<()> {
        let given = [
            ("--t", self.t.is_some()),
            ("--delta", self.delta.is_some()),
            ("--c-emp", self.c_emp.is_some()),
            ("--n", self.n.is_some()),
            ("--samples", self.samples.is_some()),
            ("--cf", self.cf.is_some()),
            ("--c-std", self.c_std.is_some()),
            ("--min-pass", self.min_pass.is_some()),
            ("--ks-exact", self.ks_exact.is_some()),
            ("--ks-normal", self.ks_normal.is_some()),
            ("--k", self.k.is_some()),
            ("--radius", self.radius.is_some()),
            ("--budget", self.budget.is_some()),
            ("--trials", self.trials.is_some()),
        ];
        let allowed: &[&str] = match self.lemma {
            LemmaId::NoJointSol => &["--trials", "--delta", "--c-emp"],
            LemmaId::Sandwich => &["--trials", "--t", "--min-pass"],
            LemmaId::Comorth => &["--trials"],
            LemmaId::SingularValues => &["--trials", "--n", "--t"],
            LemmaId::SphereMarginal => &["--samples", "--cf", "--ks-exact", "--ks-normal"],
            LemmaId::SphereConcentration => &["--samples", "--c-std"],
            LemmaId::Packing => &["--k", "--radius", "--budget"],
        };
        let name = self.lemma.to_possible_value().expect("no skipped variants");
        reject_unused(&format!("verify {}", name.get_name()), &given, allowed)
    }

    pub fn report(&self) -> CliResult<LemmaReport> {
        self.check_flags()?;
        let seed = self.seed;
        let r = match self.lemma {
            LemmaId::NoJointSol => certify_no_joint_sol(
                self.d.unwrap_or(64),
                self.delta.unwrap_or(0.5),
                self.c_emp.unwrap_or(0.05),
                self.trials.unwrap_or(50),
                seed,
            )?,
            LemmaId::Sandwich => certify_sandwich(
                self.d.unwrap_or(128),
                self.t.unwrap_or(0.2),
                self.trials.unwrap_or(100),
                seed,
                self.min_pass.unwrap_or(0.95),
            )?,
            LemmaId::Comorth => certify_comorth(self.d.unwrap_or(32), self.trials.unwrap_or(100), seed)?,
            LemmaId::SingularValues => {
                let d = self.d.unwrap_or(256);
                singular_value_experiment(self.n.unwrap_or(d), d, self.t.unwrap_or(3.0), self.trials.unwrap_or(1000), seed)?
            }
            LemmaId::SphereMarginal => {
                let base = MarginalThresholds::default();
                sphere_marginal_tests(
                    self.d.unwrap_or(64),
                    self.samples.unwrap_or(100_000),
                    self.cf.unwrap_or(0.2),
                    seed,
                    MarginalThresholds {
                        ks_exact: self.ks_exact.unwrap_or(base.ks_exact),
                        ks_normal: self.ks_normal.unwrap_or(base.ks_normal),
                    },
                )?
            }
            LemmaId::SphereConcentration => {
                sphere_concentration_test(self.d.unwrap_or(64), self.samples.unwrap_or(10_000), seed, self.c_std.unwrap_or(3.0))?
            }
            LemmaId::Packing => {
                let d = self.d.unwrap_or(8);
                let radius = self.radius.unwrap_or(0.5 * (d as f64).sqrt() * 0.3);
                greedy_packing(self.k.unwrap_or(d / 2), d, radius, self.budget.unwrap_or(2000), seed)?.1
            }
        };
        Ok(r)
    }
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let r = args.report()?;
    writeln!(out, "{}", r.to_json()?)?;
    if let Some(path) = &args.csv {
        std::fs::write(path, r.to_csv())?;
    }
    if r.verdict {
        Ok(())
    } else {
        Err(Failure::CertificateFailed(format!("{}: {}", r.lemma_id, r.criterion)))
    }
}
