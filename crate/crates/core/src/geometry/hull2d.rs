use serde::{Deserialize, Serialize};

use super::point::{bbox_diagonal2, orient2d, Point2};
use super::REL_EPS;
use crate::error::{Error, Result};

/// Strict convex hull of a planar point set.
///
/// Vertices run counter-clockwise starting at the lexicographically smallest
/// vertex; points lying on an edge (within tolerance) are not vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexHull2D {
    vertices: Vec<Point2>,
    indices: Vec<usize>,
    source_count: usize,
    tolerance: f64,
}

impl ConvexHull2D {
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// Positions of the vertices in the input slice.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn source_count(&self) -> usize {
        self.source_count
    }

    /// Absolute distance tolerance, `1e-9` times the input bounding-box diagonal.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.cross(b)).sum::<f64>().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Inside or on the boundary, within the hull tolerance.
    pub fn contains(&self, p: Point2) -> bool {
        self.edges()
            .all(|(a, b)| orient2d(a, b, p) >= -self.tolerance * (b - a).norm())
    }

    /// Signed distance of `p` to the supporting line of each edge; positive inside.
    pub fn edge_distances(&self, p: Point2) -> impl Iterator<Item = f64> + '_ {
        self.edges().map(move |(a, b)| orient2d(a, b, p) / (b - a).norm())
    }
}

/// Quickhull in the plane.
pub fn quickhull2d(points: &[Point2]) -> Result<ConvexHull2D> {
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidInput(format!("point {i} is not finite")));
    }
    if points.len() < 3 {
        return Err(Error::DegenerateGeometry(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    let diag = bbox_diagonal2(points);
    if diag == 0.0 {
        return Err(Error::DegenerateGeometry("all points coincide".into()));
    }
    let eps = REL_EPS * diag;

    let by_lex = |&i: &usize, &j: &usize| points[i].lex_cmp(&points[j]).then(i.cmp(&j));
    let lo = (0..points.len()).min_by(by_lex).expect("non-empty");
    let hi = (0..points.len()).max_by(by_lex).expect("non-empty");

    // distance to the right of the directed line a -> b
    let right_of = |a: usize, b: usize, p: usize| {
        let (pa, pb) = (points[a], points[b]);
        -orient2d(pa, pb, points[p]) / (pb - pa).norm()
    };
    let outside = |a: usize, b: usize, set: &[usize]| -> Vec<usize> {
        set.iter().copied().filter(|&p| right_of(a, b, p) > eps).collect()
    };

    let all: Vec<usize> = (0..points.len()).collect();
    let lower = outside(lo, hi, &all);
    let upper = outside(hi, lo, &all);
    if lower.is_empty() && upper.is_empty() {
        return Err(Error::DegenerateGeometry("all points are collinear".into()));
    }

    let mut ring = chain(lo, hi, lower, &right_of, &outside, points);
    ring.pop();
    ring.extend(chain(hi, lo, upper, &right_of, &outside, points));
    ring.pop();

    prune_flat_vertices(&mut ring, points, eps);
    if ring.len() < 3 {
        return Err(Error::DegenerateGeometry("hull collapsed to a segment".into()));
    }

    Ok(ConvexHull2D {
        vertices: ring.iter().map(|&i| points[i]).collect(),
        indices: ring,
        source_count: points.len(),
        tolerance: eps,
    })
}

/// Vertices from `a` to `b` inclusive along the hull, expanding outward sets
/// with an explicit stack so deep recursions cannot overflow.
fn chain(
    a: usize,
    b: usize,
    set: Vec<usize>,
    right_of: &impl Fn(usize, usize, usize) -> f64,
    outside: &impl Fn(usize, usize, &[usize]) -> Vec<usize>,
    points: &[Point2],
) -> Vec<usize> {
    let mut out = vec![a];
    let mut stack = vec![(a, b, set)];
    while let Some((a, b, set)) = stack.pop() {
        if set.is_empty() {
            out.push(b);
            continue;
        }
        let far = set
            .iter()
            .copied()
            .max_by(|&p, &q| {
                right_of(a, b, p)
                    .total_cmp(&right_of(a, b, q))
                    .then_with(|| points[q].lex_cmp(&points[p]))
            })
            .expect("non-empty");
        let left = outside(a, far, &set);
        let right = outside(far, b, &set);
        stack.push((far, b, right));
        stack.push((a, far, left));
    }
    out
}

fn prune_flat_vertices(ring: &mut Vec<usize>, points: &[Point2], eps: f64) {
    loop {
        let n = ring.len();
        if n < 3 {
            return;
        }
        let flat = (0..n).find(|&i| {
            let (p, c, q) = (
                points[ring[(i + n - 1) % n]],
                points[ring[i]],
                points[ring[(i + 1) % n]],
            );
            let base = (q - p).norm();
            base == 0.0 || orient2d(p, c, q) <= eps * base
        });
        match flat {
            // the first vertex is the lexicographic minimum and always extreme
            Some(i) if i != 0 => {
                ring.remove(i);
            }
            _ => return,
        }
    }
}
