//! Trend removal and successive differencing.
//!
//! `detrend` implements the trend-stationary path (subtract a least-squares
//! mean or line), `difference` the difference-stationary path `(1 - L)^D`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetrendMode {
    Mean,
    Linear,
}

/// Fitted deterministic trend `intercept + slope * t`, `t` being the sample
/// index starting at 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetrendModel {
    pub mode: DetrendMode,
    pub intercept: f64,
    pub slope: f64,
}

impl DetrendModel {
    pub fn trend_at(&self, t: usize) -> f64 {
        self.intercept + self.slope * t as f64
    }
}

/// Least-squares trend of a series.
pub fn fit_trend(values: &[f64], mode: DetrendMode) -> Result<DetrendModel> {
    let n = values.len();
    let required = match mode {
        DetrendMode::Mean => 1,
        DetrendMode::Linear => 2,
    };
    if n < required {
        return Err(Error::TooShort {
            required: required - 1,
            actual: n,
        });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    match mode {
        DetrendMode::Mean => Ok(DetrendModel {
            mode,
            intercept: mean,
            slope: 0.0,
        }),
        DetrendMode::Linear => {
            // centered index keeps the normal equations well conditioned
            let t_mean = (n - 1) as f64 / 2.0;
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for (i, &v) in values.iter().enumerate() {
                let dt = i as f64 - t_mean;
                sxy += dt * (v - mean);
                sxx += dt * dt;
            }
            let slope = sxy / sxx;
            Ok(DetrendModel {
                mode,
                intercept: mean - slope * t_mean,
                slope,
            })
        }
    }
}

/// Removes the fitted trend; the residual keeps the input's length.
pub fn detrend_series(values: &[f64], mode: DetrendMode) -> Result<(Vec<f64>, DetrendModel)> {
    let model = fit_trend(values, mode)?;
    let residual = values.iter().enumerate().map(|(t, &v)| v - model.trend_at(t)).collect();
    Ok((residual, model))
}

pub fn detrend(signal: &Signal, mode: DetrendMode) -> Result<(Signal, DetrendModel)> {
    let (residual, model) = detrend_series(signal.samples(), mode)?;
    Ok((signal.with_samples(residual)?, model))
}

/// `order`-th successive difference by repeated first differences.
///
/// Output index `i` corresponds to input time `i + order`.
pub fn difference_series(values: &[f64], order: usize) -> Result<Vec<f64>> {
    if values.len() <= order {
        return Err(Error::TooShort {
            required: order,
            actual: values.len(),
        });
    }
    let mut out = values.to_vec();
    for _ in 0..order {
        for i in 0..out.len() - 1 {
            out[i] = out[i + 1] - out[i];
        }
        out.pop();
    }
    Ok(out)
}

pub fn difference(signal: &Signal, order: usize) -> Result<Signal> {
    signal.with_samples(difference_series(signal.samples(), order)?)
}
