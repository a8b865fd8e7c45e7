use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::baselines::{RandomUnitPredictor, ZeroPredictor};
use super::offline::{OfflineKernelSolver, OfflineLstsqSolver};
use super::projection::{ProjectionConfig, ProjectionSeparator};
use crate::config::ProblemConstants;
use crate::instances::{anv_loss, classification_error, lr_loss, margin_of, Instance};
use crate::reductions::{anv_via_lr, anv_via_lsp, ReductionConfig};
use crate::streaming::{derive_seed, one_pass_to_protocol, run_one_pass_with_state, shuffle, OnePassAlgorithm};
use crate::{Error, Result};

/// Algorithms addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmName {
    Zero,
    RandomUnit,
    OfflineKernel,
    OfflineLstsq,
    ProjSeparator,
}

impl AlgorithmName {
    pub const ALL: [AlgorithmName; 5] = [
        AlgorithmName::Zero,
        AlgorithmName::RandomUnit,
        AlgorithmName::OfflineKernel,
        AlgorithmName::OfflineLstsq,
        AlgorithmName::ProjSeparator,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmName::Zero => "zero",
            AlgorithmName::RandomUnit => "random-unit",
            AlgorithmName::OfflineKernel => "offline-kernel",
            AlgorithmName::OfflineLstsq => "offline-lstsq",
            AlgorithmName::ProjSeparator => "proj-separator",
        }
    }

    /// Whether the algorithm can run on instances of `kind` (an instance file `type`).
    ///
    /// On ANV instances `offline-lstsq` runs through the regression reduction and
    /// `proj-separator` through the separator reduction.
    pub fn supports(&self, kind: &str) -> bool {
        let anv = kind.starts_with("anv");
        match self {
            AlgorithmName::Zero => kind == "lsp" || kind == "lr",
            AlgorithmName::RandomUnit => true,
            AlgorithmName::OfflineKernel => anv,
            AlgorithmName::OfflineLstsq => anv || kind == "lr",
            AlgorithmName::ProjSeparator => anv || kind == "lsp",
        }
    }
}

impl fmt::Display for AlgorithmName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmName::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrivalOrder {
    Fixed,
    Shuffled,
}

impl FromStr for ArrivalOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(ArrivalOrder::Fixed),
            "shuffled" => Ok(ArrivalOrder::Shuffled),
            _ => Err(Error::InvalidParameter(format!("unknown order `{s}` (fixed | shuffled)"))),
        }
    }
}

impl fmt::Display for ArrivalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArrivalOrder::Fixed => "fixed",
            ArrivalOrder::Shuffled => "shuffled",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub budget_bits: usize,
    pub seed: u64,
    pub order: ArrivalOrder,
    pub constants: ProblemConstants,
    pub projection: ProjectionConfig,
}

impl RunSettings {
    pub fn new(budget_bits: usize, seed: u64) -> Self {
        RunSettings {
            budget_bits,
            seed,
            order: ArrivalOrder::Fixed,
            constants: ProblemConstants::default(),
            projection: ProjectionConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: AlgorithmName,
    pub instance: String,
    pub d: usize,
    pub samples: usize,
    pub budget_bits: usize,
    /// Bits the algorithm's layout occupies, when it has a fixed formula.
    pub declared_bits: Option<usize>,
    pub seed: u64,
    pub order: ArrivalOrder,
    pub metrics: BTreeMap<String, f64>,
    pub output: Vec<f64>,
}

const ALG_SEED_LABEL: u64 = 0x0041_4c47;

/// Work to perform once an algorithm and its sample stream are fixed.
trait Job {
    type Out;
    fn run<A>(self, alg: A, samples: Vec<A::Sample>) -> Result<Self::Out>
    where
        A: OnePassAlgorithm<Output = DVector<f64>>,
        A::Sample: Clone;
}

fn arrange<T>(samples: Vec<T>, s: &RunSettings) -> Vec<T> {
    match s.order {
        ArrivalOrder::Fixed => samples,
        ArrivalOrder::Shuffled => shuffle(samples, s.seed),
    }
}

fn dispatch<J: Job>(name: AlgorithmName, inst: &Instance, s: &RunSettings, job: J) -> Result<J::Out> {
    if !name.supports(inst.kind()) {
        return Err(Error::IncompatibleInstance {
            algorithm: name.to_string(),
            instance: inst.kind().to_string(),
        });
    }
    let d = inst.dim();
    let alg_seed = derive_seed(s.seed, ALG_SEED_LABEL);
    let red = |c_f: Option<f64>| ReductionConfig {
        c_f: c_f.unwrap_or(s.constants.c_f),
        ..ReductionConfig::from(&s.constants)
    };
    match inst {
        Instance::Anv(a) => {
            let samples = arrange(a.vectors().to_vec(), s);
            match name {
                AlgorithmName::RandomUnit => job.run(RandomUnitPredictor::new(d, alg_seed), samples),
                AlgorithmName::OfflineKernel => job.run(OfflineKernelSolver::new(d), samples),
                AlgorithmName::OfflineLstsq => job.run(anv_via_lr(OfflineLstsqSolver::new(d), d, red(a.c_f())), samples),
                AlgorithmName::ProjSeparator => {
                    let sep = ProjectionSeparator::new(d, s.projection, alg_seed)?;
                    job.run(anv_via_lsp(sep, red(a.c_f())), samples)
                }
                AlgorithmName::Zero => unreachable!("checked by supports"),
            }
        }
        Instance::Lsp(l) => {
            let samples = arrange(l.points().to_vec(), s);
            match name {
                AlgorithmName::Zero => job.run(ZeroPredictor::new(d), samples),
                AlgorithmName::RandomUnit => job.run(RandomUnitPredictor::new(d, alg_seed), samples),
                AlgorithmName::ProjSeparator => job.run(ProjectionSeparator::new(d, s.projection, alg_seed)?, samples),
                _ => unreachable!("checked by supports"),
            }
        }
        Instance::Lr(r) => {
            let samples = arrange(r.equations(), s);
            match name {
                AlgorithmName::Zero => job.run(ZeroPredictor::new(d), samples),
                AlgorithmName::RandomUnit => job.run(RandomUnitPredictor::new(d, alg_seed), samples),
                AlgorithmName::OfflineLstsq => job.run(OfflineLstsqSolver::new(d), samples),
                _ => unreachable!("checked by supports"),
            }
        }
    }
}

/// Bits of the layout for algorithms with a closed-form footprint on this instance.
pub fn declared_bits(name: AlgorithmName, inst: &Instance, s: &RunSettings) -> Result<Option<usize>> {
    let d = inst.dim();
    Ok(match (name, inst) {
        (AlgorithmName::Zero | AlgorithmName::RandomUnit, _) => Some(0),
        (AlgorithmName::OfflineKernel, Instance::Anv(a)) => Some(OfflineKernelSolver::new(d).required_bits(a.vectors().len())),
        (AlgorithmName::OfflineLstsq, _) => Some(OfflineLstsqSolver::new(d).required_bits()),
        (AlgorithmName::ProjSeparator, _) => {
            let sep = ProjectionSeparator::new(d, s.projection, 0)?;
            Some(sep.declared_bits())
        }
        _ => None,
    })
}

/// Quality metrics of an output on an instance.
pub fn evaluate(inst: &Instance, w: &DVector<f64>) -> Result<BTreeMap<String, f64>> {
    let mut m = BTreeMap::new();
    m.insert("output_norm".to_string(), w.norm());
    match inst {
        Instance::Anv(a) => {
            m.insert("anv_loss".into(), anv_loss(a, w)?);
            m.insert("witness_alignment".into(), a.witness().dot(w).abs());
        }
        Instance::Lsp(l) => {
            m.insert("classification_error".into(), classification_error(w, l)?);
            if w.norm() > 0.0 {
                m.insert("margin".into(), margin_of(&(w / w.norm()), l)?);
            }
        }
        Instance::Lr(r) => {
            m.insert("lr_loss".into(), lr_loss(r, w)?);
        }
    }
    Ok(m)
}

struct Runner {
    budget_bits: usize,
    seed: u64,
}

impl Job for Runner {
    type Out = (DVector<f64>, usize);

    fn run<A>(self, alg: A, samples: Vec<A::Sample>) -> Result<Self::Out>
    where
        A: OnePassAlgorithm<Output = DVector<f64>>,
        A::Sample: Clone,
    {
        let (w, _) = run_one_pass_with_state(&alg, &samples, self.budget_bits, self.seed)?;
        Ok((w, samples.len()))
    }
}

/// Runs a registered algorithm on an instance under the settings' budget.
pub fn run_registered(name: AlgorithmName, inst: &Instance, s: &RunSettings) -> Result<RunReport> {
    let (w, samples) = dispatch(
        name,
        inst,
        s,
        Runner {
            budget_bits: s.budget_bits,
            seed: s.seed,
        },
    )?;
    Ok(RunReport {
        algorithm: name,
        instance: inst.kind().to_string(),
        d: inst.dim(),
        samples,
        budget_bits: s.budget_bits,
        declared_bits: declared_bits(name, inst, s)?,
        seed: s.seed,
        order: s.order,
        metrics: evaluate(inst, &w)?,
        output: w.as_slice().to_vec(),
    })
}

/// Result of comparing a one-pass run with its protocol simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationCheck {
    pub identical: bool,
    pub message_bits: usize,
    pub budget_bits: usize,
    pub split_index: usize,
}

struct Simulator {
    budget_bits: usize,
    seed: u64,
    split: usize,
}

impl Job for Simulator {
    type Out = SimulationCheck;

    fn run<A>(self, alg: A, samples: Vec<A::Sample>) -> Result<SimulationCheck>
    where
        A: OnePassAlgorithm<Output = DVector<f64>>,
        A::Sample: Clone,
    {
        let split = self.split.min(samples.len());
        let (direct, _) = run_one_pass_with_state(&alg, &samples, self.budget_bits, self.seed)?;
        let t = one_pass_to_protocol(alg, split).run_on_stream(&samples, self.budget_bits, self.seed)?;
        let bits = |v: &DVector<f64>| v.iter().map(|x| x.to_bits()).collect::<Vec<u64>>();
        Ok(SimulationCheck {
            identical: bits(&direct) == bits(&t.output),
            message_bits: t.message.len_bits,
            budget_bits: self.budget_bits,
            split_index: split,
        })
    }
}

/// Runs a registered algorithm both directly and as a two-party protocol split at `split`.
pub fn simulate_registered(
    name: AlgorithmName,
    inst: &Instance,
    s: &RunSettings,
    split: usize,
) -> Result<SimulationCheck> {
    dispatch(
        name,
        inst,
        s,
        Simulator {
            budget_bits: s.budget_bits,
            seed: s.seed,
            split,
        },
    )
}
