use serde::{Deserialize, Serialize};

use super::{quickhull2d, quickhull3d, ConvexHull2D, ConvexHull3D, Point2};
use crate::embedding::PointCloud;
use crate::error::{Error, Result};

pub const FEATURE_NAMES_2D: [&str; 4] = ["area", "perimeter", "circularity", "aspect_ratio"];
pub const FEATURE_NAMES_3D: [&str; 6] = [
    "area",
    "perimeter",
    "circularity",
    "aspect_ratio",
    "volume",
    "surface_area",
];

/// Convex hull geometry descriptors of one StationPlot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChgFeatureVector {
    pub area: f64,
    pub perimeter: f64,
    pub circularity: f64,
    pub aspect_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface_area: Option<f64>,
}

impl ChgFeatureVector {
    /// Values in [`FEATURE_NAMES_2D`] / [`FEATURE_NAMES_3D`] order.
    pub fn values(&self) -> Vec<f64> {
        let mut v = vec![self.area, self.perimeter, self.circularity, self.aspect_ratio];
        v.extend(self.volume);
        v.extend(self.surface_area);
        v
    }

    pub fn names(&self) -> &'static [&'static str] {
        if self.volume.is_some() {
            &FEATURE_NAMES_3D
        } else {
            &FEATURE_NAMES_2D
        }
    }
}

pub fn hull_area(hull: &ConvexHull2D) -> f64 {
    hull.area()
}

pub fn hull_perimeter(hull: &ConvexHull2D) -> f64 {
    hull.perimeter()
}

pub fn hull_volume(hull: &ConvexHull3D) -> f64 {
    hull.volume()
}

pub fn hull_surface_area(hull: &ConvexHull3D) -> f64 {
    hull.surface_area()
}

/// `4π·area / perimeter²`; 1 for a disc and smaller for any other shape.
pub fn circularity(area: f64, perimeter: f64) -> Result<f64> {
    if !(perimeter > 0.0) {
        return Err(Error::DegenerateGeometry(format!(
            "circularity needs a positive perimeter, got {perimeter}"
        )));
    }
    Ok(4.0 * std::f64::consts::PI * area / (perimeter * perimeter))
}

/// Ratio of principal axis lengths of a planar point mass.
///
/// `degenerate` is set (and `value` is infinite) when the minor-axis
/// variance vanishes relative to the major one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AspectRatio {
    pub value: f64,
    pub major_variance: f64,
    pub minor_variance: f64,
    pub degenerate: bool,
}

/// `sqrt(λ1 / λ2)` of the covariance of all points.
pub fn aspect_ratio(points: &[Point2]) -> Result<AspectRatio> {
    if points.len() < 2 {
        return Err(Error::DegenerateGeometry(
            "aspect ratio needs at least two points".into(),
        ));
    }
    let n = points.len() as f64;
    let mean = points.iter().fold(Point2::default(), |acc, &p| acc + p) * (1.0 / n);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &p in points {
        let d = p - mean;
        sxx += d.x * d.x;
        syy += d.y * d.y;
        sxy += d.x * d.y;
    }
    let (sxx, syy, sxy) = (sxx / n, syy / n, sxy / n);
    let half_trace = 0.5 * (sxx + syy);
    let radius = (0.5 * (sxx - syy)).hypot(sxy);
    let major = half_trace + radius;
    if major <= 0.0 {
        return Err(Error::DegenerateGeometry("all points coincide".into()));
    }
    // det / λ1 avoids cancellation in `half_trace - radius`
    let minor = ((sxx * syy - sxy * sxy) / major).max(0.0);
    let degenerate = minor <= 1e-12 * major;
    Ok(AspectRatio {
        value: if degenerate {
            f64::INFINITY
        } else {
            (major / minor).sqrt()
        },
        major_variance: major,
        minor_variance: minor,
        degenerate,
    })
}

/// Builds the hull(s) of a cloud and measures every descriptor.
///
/// Planar descriptors of a spatial cloud are taken from its `(X1, X2)`
/// projection; volume and surface area come from the spatial hull.
pub fn chg_features(cloud: &PointCloud) -> Result<ChgFeatureVector> {
    let planar = cloud.xy();
    let hull = quickhull2d(&planar)?;
    let area = hull.area();
    let perimeter = hull.perimeter();
    let ar = aspect_ratio(&planar)?;
    if ar.degenerate {
        return Err(Error::DegenerateGeometry(
            "point cloud has no spread along its minor axis".into(),
        ));
    }
    let (volume, surface_area) = match cloud.as_spatial() {
        Some(points) => {
            let h3 = quickhull3d(points)?;
            (Some(h3.volume()), Some(h3.surface_area()))
        }
        None => (None, None),
    };
    Ok(ChgFeatureVector {
        area,
        perimeter,
        circularity: circularity(area, perimeter)?,
        aspect_ratio: ar.value,
        volume,
        surface_area,
    })
}
