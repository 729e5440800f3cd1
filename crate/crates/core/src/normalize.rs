//! Per-feature normalization fitted on training rows only.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMethod {
    /// `(x - mean) / population std`
    #[default]
    Zscore,
    /// `(x - min) / (max - min)`
    Minmax,
}

impl fmt::Display for NormMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormMethod::Zscore => "zscore",
            NormMethod::Minmax => "minmax",
        })
    }
}

impl FromStr for NormMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zscore" => Ok(NormMethod::Zscore),
            "minmax" => Ok(NormMethod::Minmax),
            other => Err(Error::Config(format!("unknown normalization `{other}`"))),
        }
    }
}

/// Per-feature location and scale. Every scale is positive; features with
/// no spread in the training rows get scale 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub method: NormMethod,
    pub location: Vec<f64>,
    pub scale: Vec<f64>,
}

impl NormStats {
    /// Location 0, scale 1.
    pub fn identity(dim: usize, method: NormMethod) -> Self {
        Self {
            method,
            location: vec![0.0; dim],
            scale: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.location.len()
    }

    /// Checks the invariants; used after deserializing.
    pub fn validate(&self) -> Result<()> {
        if self.location.len() != self.scale.len() {
            return Err(Error::shape(format!(
                "normalization has {} locations but {} scales",
                self.location.len(),
                self.scale.len()
            )));
        }
        if let Some(i) = self.location.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("location {i} is not finite")));
        }
        if let Some(i) = self.scale.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::domain(format!("scale {i} is not a positive number")));
        }
        Ok(())
    }

    pub fn fit<R: AsRef<[f64]>>(rows: &[R], method: NormMethod) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::domain(format!(
                "normalization needs at least 2 rows, got {}",
                rows.len()
            )));
        }
        let dim = rows[0].as_ref().len();
        if let Some(bad) = rows.iter().find(|r| r.as_ref().len() != dim) {
            return Err(Error::shape(format!(
                "row of length {} among rows of length {dim}",
                bad.as_ref().len()
            )));
        }
        let n = rows.len() as f64;
        let column = |j: usize| rows.iter().map(move |r| r.as_ref()[j]);

        let (location, scale): (Vec<f64>, Vec<f64>) = (0..dim)
            .map(|j| {
                let lo = column(j).fold(f64::INFINITY, f64::min);
                let hi = column(j).fold(f64::NEG_INFINITY, f64::max);
                if lo == hi {
                    // exactly constant: a rounded mean could leave a spurious
                    // tiny spread
                    return (lo, 1.0);
                }
                let (loc, spread) = match method {
                    NormMethod::Zscore => {
                        let mean = column(j).sum::<f64>() / n;
                        let var = column(j).map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                        (mean, var.sqrt())
                    }
                    NormMethod::Minmax => (lo, hi - lo),
                };
                let scale = if spread > 0.0 && spread.is_finite() { spread } else { 1.0 };
                (loc, scale)
            })
            .unzip();
        let stats = Self {
            method,
            location,
            scale,
        };
        stats.validate()?;
        Ok(stats)
    }

    /// `out[i] = (v[i] - location[i]) / scale[i]`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::ModelMismatch(format!(
                "vector has {} features, normalization expects {}",
                v.len(),
                self.dim()
            )));
        }
        v.iter()
            .zip(self.location.iter().zip(&self.scale))
            .enumerate()
            .map(|(i, (x, (loc, scale)))| {
                let out = (x - loc) / scale;
                if out.is_finite() {
                    Ok(out)
                } else {
                    Err(Error::domain(format!("normalized feature {i} is not finite")))
                }
            })
            .collect()
    }

    pub fn apply_features(&self, v: &FeatureVector) -> Result<FeatureVector> {
        FeatureVector::from_slice(&self.apply(v.as_slice())?)
    }
}
