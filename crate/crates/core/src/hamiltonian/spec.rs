use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::fourier::FourierSeries;
use super::model::{HamiltonianModel, MetricModel, Potential};
use super::HamiltonianError;
use crate::torus::{MetricField, PotentialGrid};

/// JSON description of a built-in model, e.g.
/// `{"kind":"mechanical","metric":"metric.json","potential":"v.json"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Mechanical {
        #[serde(default)]
        dimension: Option<usize>,
        metric: MetricSpec,
        #[serde(default)]
        potential: PotentialSpec,
    },
    Mane {
        /// Components of `X`; the standard example when absent.
        #[serde(default)]
        field: Option<Vec<FourierSeries<f64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Inline(InlineMetric),
    /// Path to a metric field file.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InlineMetric {
    Flat,
    Constant(Vec<Vec<f64>>),
    /// Log-scale factors `sᵢ` with `gᵢᵢ = exp(2sᵢ)`.
    Diagonal(Vec<FourierSeries<f64>>),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    #[default]
    Zero,
    File(PathBuf),
    Fourier(FourierSeries<f64>),
}

impl ModelSpec {
    /// Builds the model; relative paths resolve against `base_dir`.
    pub fn build(&self, base_dir: &Path) -> Result<HamiltonianModel<f64>, HamiltonianError> {
        match self {
            ModelSpec::Mechanical {
                dimension,
                metric,
                potential,
            } => {
                let metric = match metric {
                    MetricSpec::File(p) => MetricModel::Grid(MetricField::load(base_dir.join(p))?),
                    MetricSpec::Inline(InlineMetric::Flat) => {
                        MetricModel::flat(dimension.ok_or_else(|| {
                            HamiltonianError::Spec("flat metric needs \"dimension\"".into())
                        })?)
                    }
                    MetricSpec::Inline(InlineMetric::Constant(g)) => {
                        MetricModel::constant(g.clone())?
                    }
                    MetricSpec::Inline(InlineMetric::Diagonal(s)) => {
                        MetricModel::Diagonal(s.clone())
                    }
                };
                if let Some(d) = dimension {
                    if *d != metric.dim() {
                        return Err(HamiltonianError::DimensionMismatch {
                            expected: *d,
                            got: metric.dim(),
                        });
                    }
                }
                let potential = match potential {
                    PotentialSpec::Zero => Potential::zero(),
                    PotentialSpec::File(p) => {
                        let g = PotentialGrid::load(base_dir.join(p))?;
                        if g.n != metric.dim() {
                            return Err(HamiltonianError::DimensionMismatch {
                                expected: metric.dim(),
                                got: g.n,
                            });
                        }
                        Potential::Grid(g)
                    }
                    PotentialSpec::Fourier(f) => Potential::Fourier(f.clone()),
                };
                Ok(HamiltonianModel::mechanical(metric, potential))
            }
            ModelSpec::Mane { field: None } => Ok(HamiltonianModel::mane_example()),
            ModelSpec::Mane { field: Some(f) } => Ok(HamiltonianModel::mane(f.clone())),
        }
    }
}
