use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, normalized, sub};

/// A convex polytope of affine dimension `d ≤ 2` in `Rⁿ`, stored by its
/// extreme points. Segments keep their two endpoints, polygons keep their
/// vertices in counter-clockwise order with respect to `basis`.
#[derive(Clone, Debug, Serialize)]
pub struct ConvexPolytope {
    ambient: usize,
    vertices: Vec<Vec<f64>>,
    /// Orthonormal basis of the affine hull's direction space.
    basis: Vec<Vec<f64>>,
}

impl ConvexPolytope {
    /// Convex hull of `points`. Duplicate and non-extreme points are
    /// dropped, so every stored vertex is extreme.
    pub fn hull(points: &[Vec<f64>]) -> Result<Self> {
        let ambient = points.first().map_or(0, Vec::len);
        if ambient == 0 {
            return Err(Error::InvalidField("empty point set".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != ambient) {
            return Err(Error::dims(format!("{ambient}"), format!("{}", p.len())));
        }
        let origin = &points[0];
        let scale = points
            .iter()
            .map(|p| norm(&sub(p, origin)))
            .fold(0.0, f64::max);
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for p in points {
            let mut r = sub(p, origin);
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&r, b);
                    axpy(&mut r, -c, b);
                }
            }
            if norm(&r) > tol {
                basis.push(normalized(&r).expect("nonzero"));
            }
        }
        let vertices = match basis.len() {
            0 => vec![origin.clone()],
            1 => {
                let t: Vec<f64> = points.iter().map(|p| dot(&sub(p, origin), &basis[0])).collect();
                let (imin, imax) = argminmax(&t);
                vec![points[imin].clone(), points[imax].clone()]
            }
            2 => {
                let proj: Vec<[f64; 2]> = points
                    .iter()
                    .map(|p| {
                        let r = sub(p, origin);
                        [dot(&r, &basis[0]), dot(&r, &basis[1])]
                    })
                    .collect();
                hull_2d(&proj, tol)
                    .into_iter()
                    .map(|i| points[i].clone())
                    .collect()
            }
            d => return Err(Error::UnsupportedDimension(d)),
        };
        Ok(ConvexPolytope {
            ambient,
            vertices,
            basis,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn affine_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// `d`-dimensional Hausdorff measure of the polytope in its own
    /// dimension `d` (1 for a point).
    pub fn measure(&self) -> f64 {
        match self.affine_dim() {
            0 => 1.0,
            1 => norm(&sub(&self.vertices[1], &self.vertices[0])),
            _ => {
                let pts = self.plane_coords();
                let mut twice = 0.0;
                for i in 0..pts.len() {
                    let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
                    twice += a[0] * b[1] - a[1] * b[0];
                }
                0.5 * twice.abs()
            }
        }
    }

    /// Hausdorff measure of dimension `dim`: zero when the polytope is
    /// lower dimensional.
    pub fn measure_in(&self, dim: usize) -> f64 {
        if self.affine_dim() == dim {
            self.measure()
        } else {
            0.0
        }
    }

    pub fn centroid(&self) -> Vec<f64> {
        let k = self.vertices.len() as f64;
        (0..self.ambient)
            .map(|i| self.vertices.iter().map(|v| v[i]).sum::<f64>() / k)
            .collect()
    }

    fn plane_coords(&self) -> Vec<[f64; 2]> {
        let o = &self.vertices[0];
        self.vertices
            .iter()
            .map(|p| {
                let r = sub(p, o);
                [dot(&r, &self.basis[0]), dot(&r, &self.basis[1])]
            })
            .collect()
    }
}

fn argminmax(t: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, &x) in t.iter().enumerate() {
        if x < t[lo] {
            lo = i;
        }
        if x > t[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

/// Andrew's monotone chain; returns indices of strictly extreme points in
/// counter-clockwise order.
fn hull_2d(p: &[[f64; 2]], tol: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| p[a][0].total_cmp(&p[b][0]).then(p[a][1].total_cmp(&p[b][1])));
    idx.dedup_by(|a, b| (p[*a][0] - p[*b][0]).abs() <= tol && (p[*a][1] - p[*b][1]).abs() <= tol);
    if idx.len() < 3 {
        return idx;
    }
    let cross = |o: usize, a: usize, b: usize| {
        (p[a][0] - p[o][0]) * (p[b][1] - p[o][1]) - (p[a][1] - p[o][1]) * (p[b][0] - p[o][0])
    };
    let area_tol = tol * tol;
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], i) <= area_tol {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], i) <= area_tol {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
