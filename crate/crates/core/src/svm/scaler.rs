use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-feature z-scoring fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub means: Vec<f64>,
    /// Population standard deviations.
    pub stds: Vec<f64>,
    /// Features with zero variance in the fit data; they always map to 0.
    pub constant: Vec<bool>,
}

impl Scaler {
    pub fn fit<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "standardization needs at least 2 rows, got {}",
                rows.len()
            )));
        }
        let dim = rows[0].as_ref().len();
        if dim == 0 {
            return Err(Error::InvalidInput("standardization of zero-width rows".into()));
        }
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: r.len(),
                });
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite feature value".into()));
            }
        }
        let n = rows.len() as f64;
        let mut means = vec![0.0; dim];
        for r in rows {
            for (m, v) in means.iter_mut().zip(r.as_ref()) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut stds = vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in stds.iter_mut().zip(r.as_ref()).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        stds.iter_mut().for_each(|s| *s = (*s / n).sqrt());
        let constant = stds
            .iter()
            .zip(&means)
            .map(|(&s, &m)| s == 0.0 || s <= 1e-12 * m.abs())
            .collect();
        Ok(Scaler { means, stds, constant })
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn has_constant(&self) -> bool {
        self.constant.iter().any(|&c| c)
    }

    pub fn apply(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: row.len(),
            });
        }
        Ok(row
            .iter()
            .enumerate()
            .map(|(j, v)| {
                if self.constant[j] {
                    0.0
                } else {
                    (v - self.means[j]) / self.stds[j]
                }
            })
            .collect())
    }

    pub fn apply_rows<R: AsRef<[f64]>>(&self, rows: &[R]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.apply(r.as_ref())).collect()
    }
}
