//! Convex hulls of StationPlot clouds and the descriptors measured on them.

mod features;
mod hull2d;
mod hull3d;
mod point;

use crate::error::{Error, Result};

pub use features::{
    aspect_ratio, chg_features, circularity, hull_area, hull_perimeter, hull_surface_area, hull_volume, AspectRatio,
    ChgFeatureVector, FEATURE_NAMES_2D, FEATURE_NAMES_3D,
};
pub use hull2d::{quickhull2d, ConvexHull2D};
pub use hull3d::{quickhull3d, ConvexHull3D};
pub use point::{bbox_diagonal2, bbox_diagonal3, orient2d, Point2, Point3};

/// Relative tolerance for orientation and membership predicates, scaled by
/// the bounding-box diagonal of the input.
pub const REL_EPS: f64 = 1e-9;

/// A hull of either dimension, for dimension-agnostic membership queries.
#[derive(Debug, Clone, PartialEq)]
pub enum Hull {
    Planar(ConvexHull2D),
    Spatial(ConvexHull3D),
}

impl Hull {
    pub fn contains(&self, point: &[f64]) -> Result<bool> {
        match (self, point) {
            (Hull::Planar(h), &[x, y]) => Ok(h.contains(Point2::new(x, y))),
            (Hull::Spatial(h), &[x, y, z]) => Ok(h.contains(Point3::new(x, y, z))),
            (hull, p) => Err(Error::DimensionMismatch {
                expected: match hull {
                    Hull::Planar(_) => 2,
                    Hull::Spatial(_) => 3,
                },
                actual: p.len(),
            }),
        }
    }
}
