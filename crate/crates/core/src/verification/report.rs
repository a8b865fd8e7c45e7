use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::fmt::{f64_17, to_json};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialStatus {
    Pass,
    Fail,
    /// The trial's hypothesis did not hold, so nothing was certified.
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub status: TrialStatus,
    pub values: BTreeMap<String, f64>,
}

/// Outcome of one numerical certification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma_id: String,
    pub d: usize,
    pub trials: usize,
    /// Passing fraction of the non-skipped trials (0 when all were skipped).
    pub pass_fraction: f64,
    pub statistics: BTreeMap<String, f64>,
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
    /// Whether the lemma's acceptance rule held on this run.
    pub verdict: bool,
    pub criterion: String,
    pub records: Vec<TrialRecord>,
}

impl LemmaReport {
    pub(crate) fn new(lemma_id: &str, d: usize, seed: u64, params: &[(&str, f64)], records: Vec<TrialRecord>) -> Self {
        let evaluated = records.iter().filter(|r| r.status != TrialStatus::Skip).count();
        let passed = records.iter().filter(|r| r.status == TrialStatus::Pass).count();
        let mut statistics = BTreeMap::new();
        statistics.insert("evaluated".to_string(), evaluated as f64);
        statistics.insert("skipped".to_string(), (records.len() - evaluated) as f64);
        LemmaReport {
            lemma_id: lemma_id.to_string(),
            d,
            trials: records.len(),
            pass_fraction: if evaluated == 0 { 0.0 } else { passed as f64 / evaluated as f64 },
            statistics,
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            seed,
            verdict: false,
            criterion: String::new(),
            records,
        }
    }

    pub(crate) fn stat(&mut self, name: &str, value: f64) {
        self.statistics.insert(name.to_string(), value);
    }

    pub(crate) fn decide(&mut self, verdict: bool, criterion: impl Into<String>) {
        self.verdict = verdict;
        self.criterion = criterion.into();
    }

    /// Smallest / largest value of a per-trial column over non-skipped trials.
    pub fn column_extremes(&self, column: &str) -> Option<(f64, f64)> {
        self.records
            .iter()
            .filter(|r| r.status != TrialStatus::Skip)
            .filter_map(|r| r.values.get(column).copied())
            .fold(None, |acc, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    /// One row per trial: `lemma_id,trial,seed,status,<value columns in name order>`.
    pub fn to_csv(&self) -> String {
        let columns: BTreeSet<&str> = self
            .records
            .iter()
            .flat_map(|r| r.values.keys().map(String::as_str))
            .collect();
        let mut out = String::from("lemma_id,trial,seed,status");
        for c in &columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for r in &self.records {
            let status = match r.status {
                TrialStatus::Pass => "pass",
                TrialStatus::Fail => "fail",
                TrialStatus::Skip => "skip",
            };
            let _ = write!(out, "{},{},{},{}", self.lemma_id, r.trial, r.seed, status);
            for c in &columns {
                out.push(',');
                if let Some(v) = r.values.get(*c) {
                    out.push_str(&f64_17(*v));
                }
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn record(trial: usize, seed: u64, status: TrialStatus, values: &[(&str, f64)]) -> TrialRecord {
    TrialRecord {
        trial,
        seed,
        status,
        values: values.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
    }
}

pub(crate) fn status(pass: bool) -> TrialStatus {
    if pass {
        TrialStatus::Pass
    } else {
        TrialStatus::Fail
    }
}
