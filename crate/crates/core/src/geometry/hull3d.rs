use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::point::{bbox_diagonal3, Point3};
use super::REL_EPS;
use crate::error::{Error, Result};

/// Triangulated convex hull in space. Facets are counter-clockwise when seen
/// from outside, so `(b - a) x (c - a)` points outward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexHull3D {
    vertices: Vec<Point3>,
    indices: Vec<usize>,
    facets: Vec<[usize; 3]>,
    source_count: usize,
    tolerance: f64,
}

impl ConvexHull3D {
    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    /// Positions of the vertices in the input slice, ascending.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Triangles as indices into [`vertices`](Self::vertices).
    pub fn facets(&self) -> &[[usize; 3]] {
        &self.facets
    }

    pub fn source_count(&self) -> usize {
        self.source_count
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn facet_points(&self, f: usize) -> [Point3; 3] {
        let [a, b, c] = self.facets[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Outward unit normal of a facet.
    pub fn facet_normal(&self, f: usize) -> Point3 {
        let [a, b, c] = self.facet_points(f);
        let n = (b - a).cross(c - a);
        n * (1.0 / n.norm())
    }

    /// Number of distinct undirected edges of the triangulation.
    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .facets
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    /// `V - E + F`; equals 2 for a closed hull.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.facets.len() as i64
    }

    /// Sum of signed tetrahedra spanned by each facet and a fixed apex (the
    /// first vertex, which keeps the sum translation invariant).
    pub fn volume(&self) -> f64 {
        let apex = self.vertices[0];
        let six_v: f64 = (0..self.facets.len())
            .map(|f| {
                let [a, b, c] = self.facet_points(f);
                (a - apex).dot((b - apex).cross(c - apex))
            })
            .sum();
        six_v.abs() / 6.0
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.facets.len())
            .map(|f| {
                let [a, b, c] = self.facet_points(f);
                0.5 * (b - a).cross(c - a).norm()
            })
            .sum()
    }

    /// Inside or on the boundary, within the hull tolerance.
    pub fn contains(&self, p: Point3) -> bool {
        (0..self.facets.len()).all(|f| {
            let a = self.vertices[self.facets[f][0]];
            self.facet_normal(f).dot(p - a) <= self.tolerance
        })
    }
}

struct Face {
    v: [usize; 3],
    normal: Point3,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Face {
    fn new(v: [usize; 3], points: &[Point3]) -> Face {
        let (a, b, c) = (points[v[0]], points[v[1]], points[v[2]]);
        let n = (b - a).cross(c - a);
        let normal = n * (1.0 / n.norm());
        Face {
            v,
            normal,
            offset: normal.dot(a),
            outside: Vec::new(),
            alive: true,
        }
    }

    fn distance(&self, p: Point3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    fn edges(&self) -> [(usize, usize); 3] {
        let [a, b, c] = self.v;
        [(a, b), (b, c), (c, a)]
    }
}

/// Quickhull in space.
pub fn quickhull3d(points: &[Point3]) -> Result<ConvexHull3D> {
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidInput(format!("point {i} is not finite")));
    }
    if points.len() < 4 {
        return Err(Error::DegenerateGeometry(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }
    let diag = bbox_diagonal3(points);
    if diag == 0.0 {
        return Err(Error::DegenerateGeometry("all points coincide".into()));
    }
    let eps = REL_EPS * diag;
    let simplex = initial_simplex(points, eps)?;

    let mut faces: Vec<Face> = Vec::new();
    let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
    let centroid = simplex.iter().fold(Point3::default(), |acc, &i| acc + points[i]) * 0.25;
    for skip in 0..4 {
        let mut v = [0usize; 3];
        let mut k = 0;
        for (j, &idx) in simplex.iter().enumerate() {
            if j != skip {
                v[k] = idx;
                k += 1;
            }
        }
        let mut face = Face::new(v, points);
        if face.distance(centroid) > 0.0 {
            v.swap(1, 2);
            face = Face::new(v, points);
        }
        add_face(face, &mut faces, &mut edge_owner)?;
    }

    let in_simplex = |i: usize| simplex.contains(&i);
    for i in (0..points.len()).filter(|&i| !in_simplex(i)) {
        if let Some(face) = faces.iter_mut().find(|f| f.distance(points[i]) > eps) {
            face.outside.push(i);
        }
    }

    let mut pending: Vec<usize> = (0..faces.len()).collect();
    while let Some(fid) = pending.pop() {
        if !faces[fid].alive || faces[fid].outside.is_empty() {
            continue;
        }
        let eye = *faces[fid]
            .outside
            .iter()
            .max_by(|&&p, &&q| {
                faces[fid]
                    .distance(points[p])
                    .total_cmp(&faces[fid].distance(points[q]))
                    .then(q.cmp(&p))
            })
            .expect("non-empty");
        let eye_pt = points[eye];

        // connected region of faces that see the eye point
        let mut visible = vec![fid];
        let mut seen = vec![fid];
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut cursor = 0;
        while cursor < visible.len() {
            let f = visible[cursor];
            cursor += 1;
            for (a, b) in faces[f].edges() {
                let nb = *edge_owner
                    .get(&(b, a))
                    .ok_or_else(|| Error::Numeric("hull surface is not closed".into()))?;
                if seen.contains(&nb) {
                    if !visible.contains(&nb) {
                        horizon.push((a, b));
                    }
                    continue;
                }
                seen.push(nb);
                if faces[nb].distance(eye_pt) > eps {
                    visible.push(nb);
                } else {
                    horizon.push((a, b));
                }
            }
        }

        let mut orphans = Vec::new();
        for &f in &visible {
            faces[f].alive = false;
            orphans.append(&mut faces[f].outside);
            for e in faces[f].edges() {
                edge_owner.remove(&e);
            }
        }

        let first_new = faces.len();
        for &(a, b) in &horizon {
            let id = add_face(Face::new([a, b, eye], points), &mut faces, &mut edge_owner)?;
            pending.push(id);
        }
        for p in orphans.into_iter().filter(|&p| p != eye) {
            if let Some(face) = faces[first_new..].iter_mut().find(|f| f.distance(points[p]) > eps) {
                face.outside.push(p);
            }
        }
    }

    let live: Vec<&Face> = faces.iter().filter(|f| f.alive).collect();
    let mut indices: Vec<usize> = live.iter().flat_map(|f| f.v).collect();
    indices.sort_unstable();
    indices.dedup();
    let remap: HashMap<usize, usize> = indices.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let facets = live
        .iter()
        .map(|f| [remap[&f.v[0]], remap[&f.v[1]], remap[&f.v[2]]])
        .collect();

    Ok(ConvexHull3D {
        vertices: indices.iter().map(|&i| points[i]).collect(),
        indices,
        facets,
        source_count: points.len(),
        tolerance: eps,
    })
}

fn add_face(face: Face, faces: &mut Vec<Face>, edge_owner: &mut HashMap<(usize, usize), usize>) -> Result<usize> {
    let id = faces.len();
    for e in face.edges() {
        if edge_owner.insert(e, id).is_some() {
            return Err(Error::Numeric(format!("non-manifold edge {e:?} while building hull")));
        }
    }
    faces.push(face);
    Ok(id)
}

fn initial_simplex(points: &[Point3], eps: f64) -> Result<[usize; 4]> {
    let mut extremes = Vec::with_capacity(6);
    for axis in 0..3 {
        let coord = |i: usize| match axis {
            0 => points[i].x,
            1 => points[i].y,
            _ => points[i].z,
        };
        let lo = (0..points.len())
            .min_by(|&a, &b| coord(a).total_cmp(&coord(b)))
            .unwrap();
        let hi = (0..points.len())
            .max_by(|&a, &b| coord(a).total_cmp(&coord(b)))
            .unwrap();
        extremes.push(lo);
        extremes.push(hi);
    }
    let mut best = (0.0, 0, 0);
    for (k, &i) in extremes.iter().enumerate() {
        for &j in &extremes[k + 1..] {
            let d = (points[i] - points[j]).norm();
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    let (span, i0, i1) = best;
    if span <= eps {
        return Err(Error::DegenerateGeometry("all points coincide".into()));
    }

    let axis = points[i1] - points[i0];
    let line_dist = |i: usize| (points[i] - points[i0]).cross(axis).norm() / axis.norm();
    let i2 = (0..points.len())
        .max_by(|&a, &b| line_dist(a).total_cmp(&line_dist(b)))
        .unwrap();
    if line_dist(i2) <= eps {
        return Err(Error::DegenerateGeometry("all points are collinear".into()));
    }

    let n = axis.cross(points[i2] - points[i0]);
    let n = n * (1.0 / n.norm());
    let plane_dist = |i: usize| n.dot(points[i] - points[i0]).abs();
    let i3 = (0..points.len())
        .max_by(|&a, &b| plane_dist(a).total_cmp(&plane_dist(b)))
        .unwrap();
    if plane_dist(i3) <= eps {
        return Err(Error::DegenerateGeometry("all points are coplanar".into()));
    }
    Ok([i0, i1, i2, i3])
}
