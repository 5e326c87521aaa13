//! StationPlot point clouds.
//!
//! The order-`n` planar StationPlot pairs the `n`-th and `(n+1)`-th
//! successive differences of a signal; the spatial one adds the `(n+2)`-th.
//! Difference series have different lengths, so every coordinate of a point
//! is taken at the same (latest) sample time `t`: the order-`k` series
//! starts at time `k`, and the point at time `t` exists for
//! `t >= n + dimension - 1`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Point3};
use crate::ingest::Signal;
use crate::timeseries::{detrend_series, difference_series, DetrendMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    pub fn get(self) -> usize {
        match self {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }
}

impl TryFrom<u8> for Dimension {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            other => Err(format!("dimension must be 2 or 3, got {other}")),
        }
    }
}

impl From<Dimension> for u8 {
    fn from(d: Dimension) -> u8 {
        d.get() as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub base_order: usize,
    pub dimension: Dimension,
    /// Trend removed before differencing; `None` leaves the signal as is.
    #[serde(default)]
    pub detrend: Option<DetrendMode>,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            base_order: 1,
            dimension: Dimension::Two,
            detrend: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Points {
    Planar(Vec<Point2>),
    Spatial(Vec<Point3>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub order: usize,
    pub source_id: String,
    points: Points,
}

impl PointCloud {
    pub fn planar(order: usize, source_id: impl Into<String>, points: Vec<Point2>) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("point cloud has non-finite coordinates".into()));
        }
        Ok(PointCloud {
            order,
            source_id: source_id.into(),
            points: Points::Planar(points),
        })
    }

    pub fn spatial(order: usize, source_id: impl Into<String>, points: Vec<Point3>) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("point cloud has non-finite coordinates".into()));
        }
        Ok(PointCloud {
            order,
            source_id: source_id.into(),
            points: Points::Spatial(points),
        })
    }

    pub fn dimension(&self) -> Dimension {
        match self.points {
            Points::Planar(_) => Dimension::Two,
            Points::Spatial(_) => Dimension::Three,
        }
    }

    pub fn points(&self) -> &Points {
        &self.points
    }

    pub fn len(&self) -> usize {
        match &self.points {
            Points::Planar(p) => p.len(),
            Points::Spatial(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_planar(&self) -> Option<&[Point2]> {
        match &self.points {
            Points::Planar(p) => Some(p),
            Points::Spatial(_) => None,
        }
    }

    pub fn as_spatial(&self) -> Option<&[Point3]> {
        match &self.points {
            Points::Spatial(p) => Some(p),
            Points::Planar(_) => None,
        }
    }

    /// The `(X1, X2)` coordinates of every point.
    pub fn xy(&self) -> Vec<Point2> {
        match &self.points {
            Points::Planar(p) => p.clone(),
            Points::Spatial(p) => p.iter().map(|q| q.xy()).collect(),
        }
    }

    /// CSV with a `x,y[,z]` header and 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.points {
            Points::Planar(pts) => {
                out.push_str("x,y\n");
                for p in pts {
                    writeln!(out, "{:.16e},{:.16e}", p.x, p.y).unwrap();
                }
            }
            Points::Spatial(pts) => {
                out.push_str("x,y,z\n");
                for p in pts {
                    writeln!(out, "{:.16e},{:.16e},{:.16e}", p.x, p.y, p.z).unwrap();
                }
            }
        }
        out
    }
}

/// Difference series of orders `base..base + count`, each trimmed so that
/// index `i` refers to sample time `i + base + count - 1`.
fn aligned_differences(signal: &Signal, config: &EmbeddingConfig, count: usize) -> Result<Vec<Vec<f64>>> {
    let n = config.base_order;
    let highest = n + count - 1;
    if signal.len() <= highest {
        return Err(Error::TooShort {
            required: highest,
            actual: signal.len(),
        });
    }
    let base: Vec<f64> = match config.detrend {
        Some(mode) => detrend_series(signal.samples(), mode)?.0,
        None => signal.samples().to_vec(),
    };
    let mut series = Vec::with_capacity(count);
    let mut current = difference_series(&base, n)?;
    for k in 0..count {
        // drop leading samples so every series starts at time `highest`
        series.push(current[highest - (n + k)..].to_vec());
        if k + 1 < count {
            current = difference_series(&current, 1)?;
        }
    }
    Ok(series)
}

/// Planar StationPlot: `(Δⁿx(t), Δⁿ⁺¹x(t))` for `t = n+1 .. N-1`.
pub fn stationplot2d(signal: &Signal, config: &EmbeddingConfig) -> Result<PointCloud> {
    let s = aligned_differences(signal, config, 2)?;
    let points = s[0].iter().zip(&s[1]).map(|(&x, &y)| Point2::new(x, y)).collect();
    PointCloud::planar(config.base_order, signal.source_id(), points)
}

/// Spatial StationPlot: `(Δⁿx(t), Δⁿ⁺¹x(t), Δⁿ⁺²x(t))` for `t = n+2 .. N-1`.
pub fn stationplot3d(signal: &Signal, config: &EmbeddingConfig) -> Result<PointCloud> {
    let s = aligned_differences(signal, config, 3)?;
    let points = (0..s[0].len())
        .map(|i| Point3::new(s[0][i], s[1][i], s[2][i]))
        .collect();
    PointCloud::spatial(config.base_order, signal.source_id(), points)
}

/// Dispatches on `config.dimension`.
pub fn embed(signal: &Signal, config: &EmbeddingConfig) -> Result<PointCloud> {
    match config.dimension {
        Dimension::Two => stationplot2d(signal, config),
        Dimension::Three => stationplot3d(signal, config),
    }
}
