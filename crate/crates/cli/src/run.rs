use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use nullstream::algorithms::{run_registered, AlgorithmName, ArrivalOrder, ProjectionConfig, Quantization, RunReport, RunSettings};
use nullstream::config::ProblemConstants;
use nullstream::fmt::{self, f64_17};
use nullstream::instances::Instance;

use crate::{CliResult, Failure};

/// Projection-separator knobs shared by `run`.
#[derive(Debug, Args, Clone, Default)]
pub struct ProjectionArgs {
    #[arg(long)]
    pub dprime: Option<usize>,
    #[arg(long)]
    pub subsample: Option<usize>,
    /// Bits per stored coordinate (fixed-point).
    #[arg(long, conflicts_with = "raw")]
    pub quant_bits: Option<u32>,
    #[arg(long, conflicts_with = "raw")]
    pub quant_range: Option<f64>,
    /// Store projected coordinates as raw 64-bit floats.
    #[arg(long)]
    pub raw: bool,
    #[arg(long)]
    pub max_passes: Option<usize>,
}

impl ProjectionArgs {
    pub fn config(&self) -> ProjectionConfig {
        let base = ProjectionConfig::default();
        let quantization = if self.raw {
            Quantization::Raw
        } else {
            let (bits0, range0) = match base.quantization {
                Quantization::Fixed { bits, range } => (bits, range),
                Quantization::Raw => (16, 4.0),
            };
            Quantization::Fixed {
                bits: self.quant_bits.unwrap_or(bits0),
                range: self.quant_range.unwrap_or(range0),
            }
        };
        ProjectionConfig {
            dprime: self.dprime.unwrap_or(base.dprime),
            subsample: self.subsample.unwrap_or(base.subsample),
            quantization,
            max_passes: self.max_passes.unwrap_or(base.max_passes),
        }
    }

    fn any(&self) -> bool {
        self.dprime.is_some()
            || self.subsample.is_some()
            || self.quant_bits.is_some()
            || self.quant_range.is_some()
            || self.raw
            || self.max_passes.is_some()
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long = "alg")]
    pub algorithm: String,
    /// Memory budget in bits.
    #[arg(long = "budget")]
    pub budget_bits: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "fixed")]
    pub order: String,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub cf: Option<f64>,
    #[command(flatten)]
    pub projection: ProjectionArgs,
    /// Also write the report as a one-row CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl RunArgs {
    pub fn settings(&self) -> CliResult<(AlgorithmName, RunSettings)> {
        let name: AlgorithmName = self.algorithm.parse()?;
        let order: ArrivalOrder = self.order.parse()?;
        if self.projection.any() && name != AlgorithmName::ProjSeparator {
            return Err(Failure::Usage(format!("projection flags only apply to proj-separator, not {name}")));
        }
        let mut constants = ProblemConstants::default();
        if let Some(c1) = self.c1 {
            constants.c1 = c1;
        }
        if let Some(cf) = self.cf {
            constants.c_f = cf;
        }
        constants.validate()?;
        let mut s = RunSettings::new(self.budget_bits, self.seed);
        s.order = order;
        s.constants = constants;
        s.projection = self.projection.config();
        Ok((name, s))
    }
}

pub const REPORT_COLUMNS: [&str; 8] =
    ["algorithm", "instance", "d", "samples", "budget_bits", "declared_bits", "seed", "order"];

/// One-row CSV: the fixed columns followed by the metrics in name order.
pub fn report_csv(r: &RunReport) -> CliResult<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header: Vec<String> = REPORT_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(r.metrics.keys().cloned());
    let mut row = vec![
        r.algorithm.to_string(),
        r.instance.clone(),
        r.d.to_string(),
        r.samples.to_string(),
        r.budget_bits.to_string(),
        r.declared_bits.map(|b| b.to_string()).unwrap_or_default(),
        r.seed.to_string(),
        r.order.to_string(),
    ];
    row.extend(r.metrics.values().map(|v| f64_17(*v)));
    let io = |e: csv::Error| Failure::Usage(e.to_string());
    w.write_record(&header).map_err(io)?;
    w.write_record(&row).map_err(io)?;
    let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> CliResult<()> {
    let (name, settings) = args.settings()?;
    let inst = Instance::load(&args.instance)?;
    let report = run_registered(name, &inst, &settings)?;
    writeln!(out, "{}", fmt::to_json(&report)?)?;
    if let Some(path) = &args.csv {
        std::fs::write(path, report_csv(&report)?)?;
    }
    Ok(())
}
