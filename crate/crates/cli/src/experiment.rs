//! Resumable parameter sweeps.
//!
//! A spec expands to cells `(d, algorithm, budget, projection)`; each cell runs
//! `trials` times. Every `(cell, trial)` produces one CSV row whose `key`
//! column identifies it, so a rerun appends only the rows that are missing.

use std::collections::HashSet;
use std::fs::OpenOptions;
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use nullstream::algorithms::{declared_bits, run_registered, AlgorithmName, ArrivalOrder, ProjectionConfig, Quantization, RunSettings};
use nullstream::config::ProblemConstants;
use nullstream::fmt::{f64_17, to_json};
use nullstream::instances::Instance;
use nullstream::streaming::derive_seed;
use nullstream::Error;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spec::InstanceSpec;
use crate::{CliResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Declared {
    Declared,
}

/// A budget in bits, or `"declared"` for the algorithm's own footprint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BudgetSpec {
    Bits(usize),
    #[serde(with = "declared_tag")]
    Declared,
}

mod declared_tag {
    use super::Declared;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("declared")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        Declared::deserialize(d).map(|_| ())
    }
}

impl std::fmt::Display for BudgetSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BudgetSpec::Bits(b) => write!(f, "{b}"),
            BudgetSpec::Declared => f.write_str("declared"),
        }
    }
}

fn fixed_order() -> ArrivalOrder {
    ArrivalOrder::Fixed
}

fn default_projections() -> Vec<ProjectionConfig> {
    vec![ProjectionConfig::default()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub seed: u64,
    pub trials: usize,
    pub instance: InstanceSpec,
    pub dims: Vec<usize>,
    pub algorithms: Vec<AlgorithmName>,
    pub budgets: Vec<BudgetSpec>,
    #[serde(default = "fixed_order")]
    pub order: ArrivalOrder,
    #[serde(default)]
    pub constants: ProblemConstants,
    /// Configurations swept for `proj-separator`; other algorithms ignore them.
    #[serde(default = "default_projections")]
    pub projections: Vec<ProjectionConfig>,
    #[serde(default)]
    pub max_attempts: Option<usize>,
}

#[derive(Debug, Clone)]
struct Cell {
    d: usize,
    algorithm: AlgorithmName,
    budget: BudgetSpec,
    projection: Option<(usize, ProjectionConfig)>,
}

impl Cell {
    fn key(&self, trial: usize) -> String {
        let proj = self.projection.map_or("-".to_string(), |(i, _)| i.to_string());
        format!("d={};alg={};budget={};proj={proj};trial={trial}", self.d, self.algorithm, self.budget)
    }
}

const INSTANCE_LABEL: u64 = 0x494e_5354;
const RUN_LABEL: u64 = 0x0052_554e;

/// Seed of the instance for `(d, trial)`; shared by every algorithm and budget.
pub fn instance_seed(spec_seed: u64, d: usize, trial: usize) -> u64 {
    derive_seed(derive_seed(derive_seed(spec_seed, INSTANCE_LABEL), d as u64), trial as u64)
}

/// Run seed paired with an instance seed.
pub fn run_seed(instance_seed: u64) -> u64 {
    derive_seed(instance_seed, RUN_LABEL)
}

/// Column order of sweep CSVs.
pub const CSV_COLUMNS: [&str; 21] = [
    "key",
    "d",
    "algorithm",
    "budget",
    "budget_bits",
    "dprime",
    "subsample",
    "quantization",
    "trial",
    "instance_seed",
    "run_seed",
    "status",
    "declared_bits",
    "samples",
    "output_norm",
    "anv_loss",
    "witness_alignment",
    "classification_error",
    "margin",
    "lr_loss",
    "error",
];

const METRIC_COLUMNS: [&str; 6] =
    ["output_norm", "anv_loss", "witness_alignment", "classification_error", "margin", "lr_loss"];

impl ExperimentSpec {
    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(Failure::Usage(format!("invalid experiment spec: {m}")));
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if self.dims.is_empty() || self.algorithms.is_empty() || self.budgets.is_empty() || self.projections.is_empty() {
            return bad("dims, algorithms, budgets and projections must be nonempty".into());
        }
        self.constants.validate()?;
        for a in &self.algorithms {
            if !a.supports(self.instance.file_kind()) {
                return bad(format!("{a} cannot run on {} instances", self.instance.name()));
            }
        }
        Ok(())
    }

    fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &d in &self.dims {
            for &algorithm in &self.algorithms {
                for &budget in &self.budgets {
                    if algorithm == AlgorithmName::ProjSeparator {
                        for (i, p) in self.projections.iter().enumerate() {
                            cells.push(Cell { d, algorithm, budget, projection: Some((i, *p)) });
                        }
                    } else {
                        cells.push(Cell { d, algorithm, budget, projection: None });
                    }
                }
            }
        }
        cells
    }

    fn row(&self, cell: &Cell, trial: usize) -> Vec<String> {
        let iseed = instance_seed(self.seed, cell.d, trial);
        let rseed = run_seed(iseed);
        let mut s = RunSettings::new(0, rseed);
        s.order = self.order;
        s.constants = self.constants;
        if let Some((_, p)) = cell.projection {
            s.projection = p;
        }
        let (dprime, subsample, quant) = match cell.projection {
            Some((_, p)) => (
                p.dprime.to_string(),
                p.subsample.to_string(),
                match p.quantization {
                    Quantization::Fixed { bits, range } => format!("fixed:{bits}:{}", f64_17(range)),
                    Quantization::Raw => "raw".into(),
                },
            ),
            None => Default::default(),
        };
        let mut row: Vec<String> = vec![
            cell.key(trial),
            cell.d.to_string(),
            cell.algorithm.to_string(),
            cell.budget.to_string(),
            String::new(),
            dprime,
            subsample,
            quant,
            trial.to_string(),
            iseed.to_string(),
            rseed.to_string(),
        ];
        let outcome = (|| -> nullstream::Result<(usize, Option<usize>, nullstream::algorithms::RunReport)> {
            let inst: Instance = self.instance.generate(cell.d, iseed, self.max_attempts)?;
            let declared = declared_bits(cell.algorithm, &inst, &s)?;
            s.budget_bits = match cell.budget {
                BudgetSpec::Bits(b) => b,
                BudgetSpec::Declared => declared
                    .ok_or_else(|| Error::InvalidParameter(format!("{} has no declared footprint", cell.algorithm)))?
                    .max(1),
            };
            let report = run_registered(cell.algorithm, &inst, &s)?;
            Ok((s.budget_bits, declared, report))
        })();
        match outcome {
            Ok((bits, declared, report)) => {
                row[4] = bits.to_string();
                row.push("ok".into());
                row.push(declared.map(|b| b.to_string()).unwrap_or_default());
                row.push(report.samples.to_string());
                for m in METRIC_COLUMNS {
                    row.push(report.metrics.get(m).map(|v| f64_17(*v)).unwrap_or_default());
                }
                row.push(String::new());
            }
            Err(e) => {
                if let BudgetSpec::Bits(b) = cell.budget {
                    row[4] = b.to_string();
                }
                row.push(status_of(&e).into());
                row.extend(std::iter::repeat_n(String::new(), 2 + METRIC_COLUMNS.len()));
                row.push(e.to_string());
            }
        }
        row
    }
}

fn status_of(e: &Error) -> &'static str {
    match e {
        Error::BudgetViolation { .. } => "budget-violation",
        Error::AcceptanceTooRare { .. } => "acceptance-too-rare",
        Error::NotSeparableInProjection { .. } => "not-separable",
        Error::DegenerateOutput { .. } => "degenerate-output",
        _ => "error",
    }
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment spec.
    pub spec: PathBuf,
    /// Output CSV (defaults to the spec path with a `.csv` extension).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Worker count from `NULLSTREAM_THREADS`, when set.
pub fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var("NULLSTREAM_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!("NULLSTREAM_THREADS must be a positive integer, got `{v}`"))),
        },
    }
}

/// Keys already present in `path`, after dropping a torn trailing line.
fn completed_keys(path: &Path) -> CliResult<HashSet<String>> {
    let mut keys = HashSet::new();
    if !path.exists() {
        return Ok(keys);
    }
    let mut file = OpenOptions::new().read(true).write(true).open(path)?;
    let mut text = String::new();
    file.read_to_string(&mut text)?;
    if text.is_empty() {
        return Ok(keys);
    }
    if !text.ends_with('\n') {
        let keep = text.rfind('\n').map_or(0, |i| i + 1);
        file.set_len(keep as u64)?;
        file.seek(SeekFrom::End(0))?;
        text.truncate(keep);
        if text.is_empty() {
            return Ok(keys);
        }
    }
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(Failure::Usage(format!("{} has foreign columns; refusing to append", path.display())));
    }
    for rec in rdr.records() {
        keys.insert(rec.map_err(csv_err)?[0].to_string());
    }
    Ok(keys)
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Usage(format!("csv: {e}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub rows_written: usize,
    pub rows_skipped: usize,
}

/// Runs every missing `(cell, trial)` of `spec`, appending rows to `out` cell by cell.
pub fn run_sweep(spec: &ExperimentSpec, out: &Path) -> CliResult<SweepSummary> {
    spec.validate()?;
    let done = completed_keys(out)?;
    let fresh = done.is_empty() && std::fs::metadata(out).map_or(true, |m| m.len() == 0);
    let file = OpenOptions::new().create(true).append(true).open(out)?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
    if fresh {
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        w.flush()?;
    }
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = thread_cap()? {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| Failure::Usage(e.to_string()))?
    };
    let mut summary = SweepSummary { rows_written: 0, rows_skipped: 0 };
    for cell in spec.cells() {
        let pending: Vec<usize> = (0..spec.trials).filter(|t| !done.contains(&cell.key(*t))).collect();
        summary.rows_skipped += spec.trials - pending.len();
        let rows: Vec<Vec<String>> = pool.install(|| pending.par_iter().map(|&t| spec.row(&cell, t)).collect());
        for r in &rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
        summary.rows_written += rows.len();
    }
    Ok(summary)
}

pub fn cmd_experiment(args: &ExperimentArgs, out: &mut dyn Write) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.spec)?;
    let spec: ExperimentSpec =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid experiment spec: {e}")))?;
    let path = args.out.clone().unwrap_or_else(|| args.spec.with_extension("csv"));
    let summary = run_sweep(&spec, &path)?;
    writeln!(out, "{}", to_json(&summary)?)?;
    Ok(())
}
