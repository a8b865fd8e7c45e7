use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::anv::{AnvInstance, AnvVariant};
use super::lr::LrInstance;
use super::lsp::{LabeledPoint, LspDataset};
use crate::{fmt, Error, Result};

/// Any generated instance, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Anv(AnvInstance),
    Lsp(LspDataset),
    Lr(LrInstance),
}

impl Instance {
    /// The `type` tag used in instance files.
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Anv(a) => match a.variant() {
                AnvVariant::GaussianRaw => "anv-gaussian",
                AnvVariant::SphereConditioned { .. } => "anv-conditioned",
            },
            Instance::Lsp(_) => "lsp",
            Instance::Lr(_) => "lr",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Instance::Anv(a) => a.dim(),
            Instance::Lsp(l) => l.dim(),
            Instance::Lr(r) => r.dim(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        fmt::to_json(&InstanceFile::from(self))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(s)?;
        file.try_into()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fmt::write_json(path, &InstanceFile::from(self))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl From<AnvInstance> for Instance {
    fn from(a: AnvInstance) -> Self {
        Instance::Anv(a)
    }
}

impl From<LspDataset> for Instance {
    fn from(l: LspDataset) -> Self {
        Instance::Lsp(l)
    }
}

impl From<LrInstance> for Instance {
    fn from(r: LrInstance) -> Self {
        Instance::Lr(r)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    #[serde(rename = "type")]
    kind: String,
    d: usize,
    params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vectors: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<Vec<f64>>,
    witness: Vec<f64>,
    seed: Option<u64>,
}

fn rows_of<'a>(it: impl Iterator<Item = &'a DVector<f64>>) -> Vec<Vec<f64>> {
    it.map(|v| v.as_slice().to_vec()).collect()
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        let mut f = InstanceFile {
            kind: inst.kind().to_string(),
            d: inst.dim(),
            params: BTreeMap::new(),
            vectors: None,
            points: None,
            labels: None,
            a: None,
            b: None,
            witness: Vec::new(),
            seed: None,
        };
        match inst {
            Instance::Anv(a) => {
                if let Some(c_f) = a.c_f() {
                    f.params.insert("c_f".into(), c_f);
                }
                f.vectors = Some(rows_of(a.vectors().iter()));
                f.witness = a.witness().as_slice().to_vec();
                f.seed = a.seed();
            }
            Instance::Lsp(l) => {
                f.params = l.params().clone();
                f.params.insert("margin".into(), l.margin());
                f.points = Some(rows_of(l.points().iter().map(|p| &p.x)));
                f.labels = Some(l.points().iter().map(|p| p.y).collect());
                f.witness = l.witness().as_slice().to_vec();
                f.seed = l.seed();
            }
            Instance::Lr(r) => {
                f.params = r.params().clone();
                f.a = Some(r.a().row_iter().map(|row| row.iter().copied().collect()).collect());
                f.b = Some(r.b().as_slice().to_vec());
                f.witness = r.witness().as_slice().to_vec();
                f.seed = r.seed();
            }
        }
        f
    }
}

fn missing(field: &str, kind: &str) -> Error {
    Error::Format(format!("`{kind}` instance needs field `{field}`"))
}

fn vectors_of(rows: Vec<Vec<f64>>, d: usize) -> Result<Vec<DVector<f64>>> {
    rows.into_iter()
        .map(|r| {
            if r.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: r.len() });
            }
            Ok(DVector::from_vec(r))
        })
        .collect()
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(mut f: InstanceFile) -> Result<Self> {
        let d = f.d;
        if f.witness.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: f.witness.len(),
            });
        }
        let witness = DVector::from_vec(std::mem::take(&mut f.witness));
        let unexpected = |present: bool, field: &str| -> Result<()> {
            if present {
                Err(Error::Format(format!("`{}` instance has unexpected field `{field}`", f.kind)))
            } else {
                Ok(())
            }
        };
        match f.kind.as_str() {
            "anv-gaussian" | "anv-conditioned" => {
                unexpected(f.points.is_some(), "points")?;
                unexpected(f.a.is_some(), "a")?;
                let variant = if f.kind == "anv-gaussian" {
                    AnvVariant::GaussianRaw
                } else {
                    let c_f = *f.params.get("c_f").ok_or_else(|| missing("params.c_f", &f.kind))?;
                    AnvVariant::SphereConditioned { c_f }
                };
                let vectors = vectors_of(f.vectors.take().ok_or_else(|| missing("vectors", &f.kind))?, d)?;
                Ok(Instance::Anv(AnvInstance::new(variant, vectors, witness, f.seed)?))
            }
            "lsp" => {
                unexpected(f.vectors.is_some(), "vectors")?;
                unexpected(f.a.is_some(), "a")?;
                let xs = vectors_of(f.points.take().ok_or_else(|| missing("points", "lsp"))?, d)?;
                let ys = f.labels.take().ok_or_else(|| missing("labels", "lsp"))?;
                if xs.len() != ys.len() {
                    return Err(Error::DimensionMismatch {
                        expected: xs.len(),
                        found: ys.len(),
                    });
                }
                let points = xs
                    .into_iter()
                    .zip(ys)
                    .map(|(x, y)| LabeledPoint::new(x, y))
                    .collect::<Result<Vec<_>>>()?;
                let margin = f.params.remove("margin").ok_or_else(|| missing("params.margin", "lsp"))?;
                Ok(Instance::Lsp(LspDataset::new(points, witness, margin, f.params, f.seed)?))
            }
            "lr" => {
                unexpected(f.vectors.is_some(), "vectors")?;
                unexpected(f.points.is_some(), "points")?;
                let rows = vectors_of(f.a.take().ok_or_else(|| missing("a", "lr"))?, d)?;
                let b = DVector::from_vec(f.b.take().ok_or_else(|| missing("b", "lr"))?);
                let mut a = DMatrix::zeros(rows.len(), d);
                for (i, r) in rows.iter().enumerate() {
                    a.set_row(i, &r.transpose());
                }
                Ok(Instance::Lr(LrInstance::new(a, b, witness, f.params, f.seed)?))
            }
            other => Err(Error::Format(format!("unknown instance type `{other}`"))),
        }
    }
}
