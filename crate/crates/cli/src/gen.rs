use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use nalgebra::DVector;
use nullstream::config::ProblemConstants;
use nullstream::fmt;
use nullstream::instances::{anv_loss, classification_error, lr_loss, margin_of, Instance};

use crate::spec::InstanceSpec;
use crate::{reject_unused, CliResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    AnvGaussian,
    AnvConditioned,
    LspFromAnv,
    LspHard,
    LspMargin,
    Lr,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub problem: Problem,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of draws per distribution (lsp-hard) or points (lsp-margin).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub cf: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    /// Shift scale of the hard separator distributions.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub max_attempts: Option<usize>,
    /// Instance file to write; the JSON goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl GenArgs {
    pub fn spec(&self) -> CliResult<InstanceSpec> {
        let k = ProblemConstants::default();
        let given = [
            ("--m", self.m.is_some()),
            ("--cf", self.cf.is_some()),
            ("--c1", self.c1.is_some()),
            ("--c", self.c.is_some()),
            ("--gamma", self.gamma.is_some()),
            ("--max-attempts", self.max_attempts.is_some()),
        ];
        let name = format!("gen {}", self.problem.to_possible_value().expect("no skipped variants").get_name());
        let need_m = || self.m.ok_or_else(|| Failure::Usage(format!("{name} needs --m")));
        let c_f = self.cf.unwrap_or(k.c_f);
        let spec = match self.problem {
            Problem::AnvGaussian => {
                reject_unused(&name, &given, &[])?;
                InstanceSpec::AnvGaussian
            }
            Problem::AnvConditioned => {
                reject_unused(&name, &given, &["--cf", "--max-attempts"])?;
                InstanceSpec::AnvConditioned { c_f }
            }
            Problem::LspFromAnv => {
                reject_unused(&name, &given, &["--cf", "--c1", "--max-attempts"])?;
                InstanceSpec::LspFromAnv {
                    c_f,
                    c1: self.c1.unwrap_or(k.c1),
                }
            }
            Problem::LspHard => {
                reject_unused(&name, &given, &["--m", "--cf", "--c", "--max-attempts"])?;
                InstanceSpec::LspHard {
                    m: need_m()?,
                    c_f,
                    c: self.c.unwrap_or(k.c),
                }
            }
            Problem::LspMargin => {
                reject_unused(&name, &given, &["--m", "--gamma"])?;
                InstanceSpec::LspMargin {
                    m: need_m()?,
                    gamma: self.gamma.ok_or_else(|| Failure::Usage(format!("{name} needs --gamma")))?,
                }
            }
            Problem::Lr => {
                reject_unused(&name, &given, &["--cf", "--max-attempts"])?;
                InstanceSpec::Lr { c_f }
            }
        };
        Ok(spec)
    }
}

/// Witness checks printed next to a generated instance.
pub fn diagnostics(inst: &Instance) -> CliResult<BTreeMap<String, f64>> {
    let mut m = BTreeMap::new();
    match inst {
        Instance::Anv(a) => {
            let w = a.witness();
            m.insert("witness_e1".into(), w[0]);
            m.insert("witness_anv_loss".into(), anv_loss(a, w)?);
            let worst = a.vectors().iter().map(|v| v.dot(w).abs()).fold(0.0, f64::max);
            m.insert("max_abs_inner_product".into(), worst);
        }
        Instance::Lsp(l) => {
            m.insert("margin".into(), l.margin());
            m.insert("witness_margin".into(), margin_of(l.witness(), l)?);
            m.insert("witness_error".into(), classification_error(l.witness(), l)?);
        }
        Instance::Lr(r) => {
            m.insert("residual".into(), (r.a() * r.witness() - r.b()).norm());
            m.insert("witness_norm".into(), r.witness().norm());
            m.insert("witness_lr_loss".into(), lr_loss(r, r.witness())?);
            m.insert("zero_lr_loss".into(), lr_loss(r, &DVector::zeros(r.dim()))?);
            if let Some(i) = r.inserted_at() {
                m.insert("inserted_at".into(), i as f64);
            }
        }
    }
    Ok(m)
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = args.spec()?;
    let inst = spec.generate(args.d, args.seed, args.max_attempts)?;
    let diag = diagnostics(&inst)?;
    match &args.out {
        Some(path) => {
            inst.save(path)?;
            writeln!(out, "{}", fmt::to_json(&diag)?)?;
        }
        None => {
            writeln!(out, "{}", inst.to_json()?)?;
            eprintln!("{}", fmt::to_json(&diag)?);
        }
    }
    Ok(())
}
