//! Binary kernel SVM trained by SMO on standardized features.
//!
//! Labels are `+1` / `-1`; in the seizure problems the seizure class is `+1`.
//! A decision value of exactly 0 is classified as `+1`.

mod kernel;
mod scaler;
mod smo;

use serde::{Deserialize, Serialize};

pub use kernel::{KernelSpec, KERNEL_KINDS};
pub use scaler::Scaler;
pub use smo::SmoParams;

use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainDiagnostics {
    pub iterations: usize,
    pub converged: bool,
    /// Maximal KKT violation at exit.
    pub kkt_gap: f64,
    pub training_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub format_version: u32,
    pub kernel: KernelSpec,
    pub c: f64,
    pub scaler: Scaler,
    /// Support vectors in standardized coordinates.
    pub support_vectors: Vec<Vec<f64>>,
    pub alphas: Vec<f64>,
    pub labels: Vec<i8>,
    pub bias: f64,
    pub diagnostics: TrainDiagnostics,
}

fn check_training_set(rows: &[Vec<f64>], labels: &[i8]) -> Result<()> {
    if rows.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    if rows.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "training needs at least 2 rows, got {}",
            rows.len()
        )));
    }
    if let Some(l) = labels.iter().find(|&&l| l != 1 && l != -1) {
        return Err(Error::InvalidInput(format!("labels must be +1 or -1, got {l}")));
    }
    if !labels.contains(&1) || !labels.contains(&-1) {
        return Err(Error::InvalidInput("training set contains a single class".into()));
    }
    Ok(())
}

/// Sorted by (row, label) so the optimizer's tie-breaking cannot depend on
/// the order rows were supplied in.
fn canonical_order(rows: &[Vec<f64>], labels: &[i8]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..rows.len()).collect();
    idx.sort_by(|&a, &b| {
        rows[a]
            .iter()
            .zip(&rows[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(labels[a].cmp(&labels[b]))
    });
    idx
}

/// Scaler fitted in canonical row order, so its rounding is order-free too.
fn canonical_scaler(rows: &[Vec<f64>], labels: &[i8]) -> Result<Scaler> {
    let sorted: Vec<&[f64]> = canonical_order(rows, labels)
        .iter()
        .map(|&i| rows[i].as_slice())
        .collect();
    Scaler::fit(&sorted)
}

impl SvmModel {
    /// Fits the scaler on `rows`, then trains.
    pub fn fit(rows: &[Vec<f64>], labels: &[i8], kernel: KernelSpec, params: &SmoParams) -> Result<Self> {
        check_training_set(rows, labels)?;
        let scaler = canonical_scaler(rows, labels)?;
        Self::fit_with_scaler(scaler, rows, labels, kernel, params)
    }

    /// Trains with an already fitted scaler; `rows` are raw features.
    pub fn fit_with_scaler(
        scaler: Scaler,
        rows: &[Vec<f64>],
        labels: &[i8],
        kernel: KernelSpec,
        params: &SmoParams,
    ) -> Result<Self> {
        Ok(Self::train(scaler, rows, labels, kernel, params, false)?.0)
    }

    /// Like [`SvmModel::fit`], also returning the dual objective after every
    /// optimizer step.
    pub fn fit_traced(
        rows: &[Vec<f64>],
        labels: &[i8],
        kernel: KernelSpec,
        params: &SmoParams,
    ) -> Result<(Self, Vec<f64>)> {
        check_training_set(rows, labels)?;
        let scaler = canonical_scaler(rows, labels)?;
        let (model, trace) = Self::train(scaler, rows, labels, kernel, params, true)?;
        Ok((model, trace.unwrap_or_default()))
    }

    fn train(
        scaler: Scaler,
        rows: &[Vec<f64>],
        labels: &[i8],
        kernel: KernelSpec,
        params: &SmoParams,
        trace: bool,
    ) -> Result<(Self, Option<Vec<f64>>)> {
        check_training_set(rows, labels)?;
        kernel.validate()?;
        params.validate()?;
        let order = canonical_order(rows, labels);
        let scaled = order
            .iter()
            .map(|&i| scaler.apply(&rows[i]))
            .collect::<Result<Vec<_>>>()?;
        let y: Vec<f64> = order.iter().map(|&i| f64::from(labels[i])).collect();

        let gram = smo::gram(&kernel, &scaled);
        if gram.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("kernel {kernel} produced non-finite values")));
        }
        let sol = smo::solve(&gram, &y, params, trace);
        if !sol.converged {
            log::warn!(
                "SMO stopped at the iteration cap ({} iterations, KKT gap {:.3e} > {:.1e}); using best-effort model",
                sol.iterations,
                sol.gap,
                params.tol
            );
        }

        let mut support_vectors = Vec::new();
        let mut alphas = Vec::new();
        let mut sv_labels = Vec::new();
        for (t, &a) in sol.alpha.iter().enumerate() {
            if a > 0.0 {
                support_vectors.push(scaled[t].clone());
                alphas.push(a);
                sv_labels.push(y[t] as i8);
            }
        }
        let model = SvmModel {
            format_version: MODEL_FORMAT_VERSION,
            kernel,
            c: params.c,
            scaler,
            support_vectors,
            alphas,
            labels: sv_labels,
            bias: -sol.rho,
            diagnostics: TrainDiagnostics {
                iterations: sol.iterations,
                converged: sol.converged,
                kkt_gap: sol.gap,
                training_rows: rows.len(),
            },
        };
        Ok((model, sol.trace))
    }

    pub fn converged(&self) -> bool {
        self.diagnostics.converged
    }

    pub fn dim(&self) -> usize {
        self.scaler.dim()
    }

    /// Decision value for a row already in standardized coordinates.
    pub fn decision_value_scaled(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: z.len(),
            });
        }
        let sum: f64 = self
            .support_vectors
            .iter()
            .zip(&self.alphas)
            .zip(&self.labels)
            .map(|((sv, a), &l)| a * f64::from(l) * self.kernel.eval_unchecked(sv, z))
            .sum();
        Ok(sum + self.bias)
    }

    /// `Σ α_i y_i K(x_i, x) + b` on a raw feature row.
    pub fn decision_value(&self, row: &[f64]) -> Result<f64> {
        self.decision_value_scaled(&self.scaler.apply(row)?)
    }

    pub fn predict(&self, row: &[f64]) -> Result<i8> {
        Ok(if self.decision_value(row)? >= 0.0 { 1 } else { -1 })
    }

    pub fn predict_rows(&self, rows: &[Vec<f64>]) -> Result<Vec<i8>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    /// Primal weights `w = Σ α_i y_i x_i` in standardized coordinates; only
    /// for the linear kernel.
    pub fn linear_weights(&self) -> Option<Vec<f64>> {
        if self.kernel != KernelSpec::Linear {
            return None;
        }
        let mut w = vec![0.0; self.dim()];
        for ((sv, a), &l) in self.support_vectors.iter().zip(&self.alphas).zip(&self.labels) {
            for (wj, x) in w.iter_mut().zip(sv) {
                *wj += a * f64::from(l) * x;
            }
        }
        Some(w)
    }

    /// `Σ α_i y_i` over the support vectors.
    pub fn dual_balance(&self) -> f64 {
        self.alphas
            .iter()
            .zip(&self.labels)
            .map(|(a, &l)| a * f64::from(l))
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("format_version").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(MODEL_FORMAT_VERSION) => {}
            Some(v) => {
                return Err(Error::InvalidInput(format!(
                    "unsupported model format version {v} (expected {MODEL_FORMAT_VERSION})"
                )))
            }
            None => return Err(Error::InvalidInput("model document has no format_version".into())),
        }
        let model: SvmModel = serde_json::from_value(value)?;
        model.kernel.validate()?;
        Ok(model)
    }
}
