use nullstream::config::{ProblemConstants, DEFAULT_MAX_ATTEMPTS};
use nullstream::instances::*;
use nullstream::streaming::derive_seed;
use nullstream::Result;
use serde::{Deserialize, Serialize};

fn default_c_f() -> f64 {
    ProblemConstants::default().c_f
}

fn default_c1() -> f64 {
    ProblemConstants::default().c1
}

fn default_c() -> f64 {
    ProblemConstants::default().c
}

/// A generator family with its parameters; `d` and the seed are supplied separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    AnvGaussian,
    AnvConditioned {
        #[serde(default = "default_c_f")]
        c_f: f64,
    },
    /// Shifted pairs of a conditioned ANV instance, shift `√c₁`.
    LspFromAnv {
        #[serde(default = "default_c_f")]
        c_f: f64,
        #[serde(default = "default_c1")]
        c1: f64,
    },
    LspHard {
        m: usize,
        #[serde(default = "default_c_f")]
        c_f: f64,
        #[serde(default = "default_c")]
        c: f64,
    },
    LspMargin {
        m: usize,
        gamma: f64,
    },
    /// Regression instance of a conditioned ANV instance.
    Lr {
        #[serde(default = "default_c_f")]
        c_f: f64,
    },
}

const LR_INSERT_LABEL: u64 = 0x4c52;

impl InstanceSpec {
    pub fn name(&self) -> &'static str {
        match self {
            InstanceSpec::AnvGaussian => "anv-gaussian",
            InstanceSpec::AnvConditioned { .. } => "anv-conditioned",
            InstanceSpec::LspFromAnv { .. } => "lsp-from-anv",
            InstanceSpec::LspHard { .. } => "lsp-hard",
            InstanceSpec::LspMargin { .. } => "lsp-margin",
            InstanceSpec::Lr { .. } => "lr",
        }
    }

    /// The `type` tag of the generated file.
    pub fn file_kind(&self) -> &'static str {
        match self {
            InstanceSpec::AnvGaussian => "anv-gaussian",
            InstanceSpec::AnvConditioned { .. } => "anv-conditioned",
            InstanceSpec::LspFromAnv { .. } | InstanceSpec::LspHard { .. } | InstanceSpec::LspMargin { .. } => "lsp",
            InstanceSpec::Lr { .. } => "lr",
        }
    }

    pub fn generate(&self, d: usize, seed: u64, max_attempts: Option<usize>) -> Result<Instance> {
        let attempts = max_attempts.unwrap_or(DEFAULT_MAX_ATTEMPTS);
        Ok(match *self {
            InstanceSpec::AnvGaussian => gen_anv_gaussian(d, seed)?.into(),
            InstanceSpec::AnvConditioned { c_f } => gen_anv_conditioned(d, c_f, seed, attempts)?.into(),
            InstanceSpec::LspFromAnv { c_f, c1 } => {
                let anv = gen_anv_conditioned(d, c_f, seed, attempts)?;
                let k = ProblemConstants { c1, c_f, ..Default::default() };
                k.validate()?;
                gen_lsp_from_anv(&anv, k.c4())?.into()
            }
            InstanceSpec::LspHard { m, c_f, c } => gen_lsp_hard(d, m, c_f, c, seed, attempts)?.0.into(),
            InstanceSpec::LspMargin { m, gamma } => gen_lsp_margin(d, m, gamma, seed)?.into(),
            InstanceSpec::Lr { c_f } => {
                let anv = gen_anv_conditioned(d, c_f, seed, attempts)?;
                gen_lr_from_anv(&anv, derive_seed(seed, LR_INSERT_LABEL))?.into()
            }
        })
    }
}
