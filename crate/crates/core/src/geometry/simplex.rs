use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sub, Matrix};

/// Relative degeneracy threshold on `|det| / scaleⁿ`.
const DEGENERACY_REL: f64 = 1e-14;

/// An `n`-simplex in `Rⁿ` given by its `n+1` vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Simplex {
    vertices: Vec<Vec<f64>>,
}

impl Simplex {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let n = vertices.len().saturating_sub(1);
        if n == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        if let Some(v) = vertices.iter().find(|v| v.len() != n) {
            return Err(Error::dims(format!("{n}-dimensional vertices"), format!("{}", v.len())));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let s = Simplex { vertices };
        let det = s.edge_matrix().determinant().abs();
        if det.is_nan() || det <= DEGENERACY_REL * s.diameter().powi(n as i32) {
            return Err(Error::DegenerateCell(det));
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i]
    }

    /// Columns `v_i − v_0`.
    pub fn edge_matrix(&self) -> Matrix {
        let v0 = &self.vertices[0];
        let cols: Vec<Vec<f64>> = self.vertices[1..].iter().map(|v| sub(v, v0)).collect();
        Matrix::from_columns(&cols).expect("n columns of length n")
    }

    pub fn volume(&self) -> f64 {
        let n = self.dim();
        self.edge_matrix().determinant().abs() / factorial(n)
    }

    /// Longest edge.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                d = d.max(norm(&sub(&self.vertices[i], &self.vertices[j])));
            }
        }
        d
    }

    pub fn centroid(&self) -> Vec<f64> {
        let k = self.vertices.len() as f64;
        (0..self.dim())
            .map(|i| self.vertices.iter().map(|v| v[i]).sum::<f64>() / k)
            .collect()
    }

    /// Barycentric coordinates `(λ_0, …, λ_n)` of `x`.
    pub fn barycentric(&self, x: &[f64]) -> Vec<f64> {
        let rhs = sub(x, &self.vertices[0]);
        let tail = self
            .edge_matrix()
            .solve(&rhs)
            .expect("nondegenerate simplex");
        let mut out = Vec::with_capacity(self.vertices.len());
        out.push(1.0 - tail.iter().sum::<f64>());
        out.extend(tail);
        out
    }

    /// Whether every barycentric coordinate is at least `-tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.barycentric(x).iter().all(|&l| l >= -tol)
    }

    /// `(min, max)` of `d·v` over the vertices.
    pub fn support(&self, d: &[f64]) -> (f64, f64) {
        self.vertices
            .iter()
            .map(|v| dot(d, v))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)))
    }

    /// Vertex lists of the `n+1` facets; facet `i` omits vertex `i`.
    pub fn facets(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.vertices.len())
            .map(|skip| {
                self.vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect()
    }

    /// Maps a point of the unit cube `[0,1)ⁿ` to the simplex so that uniform
    /// input gives uniform output (sorted-coordinate spacings).
    pub fn point_from_unit(&self, u: &[f64]) -> Vec<f64> {
        let mut s = u.to_vec();
        s.sort_by(f64::total_cmp);
        let n = self.dim();
        let mut weights = Vec::with_capacity(n + 1);
        let mut prev = 0.0;
        for &x in &s {
            weights.push(x - prev);
            prev = x;
        }
        weights.push(1.0 - prev);
        let mut p = vec![0.0; n];
        for (w, v) in weights.iter().zip(&self.vertices) {
            for i in 0..n {
                p[i] += w * v[i];
            }
        }
        p
    }
}

impl TryFrom<Vec<Vec<f64>>> for Simplex {
    type Error = Error;
    fn try_from(v: Vec<Vec<f64>>) -> Result<Self> {
        Simplex::new(v)
    }
}

impl From<Simplex> for Vec<Vec<f64>> {
    fn from(s: Simplex) -> Self {
        s.vertices
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_and_barycentric() {
        let t = Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(t.volume(), 0.5);
        let b = t.barycentric(&[0.25, 0.25]);
        assert!((b[0] - 0.5).abs() < 1e-15 && (b[1] - 0.25).abs() < 1e-15);
        assert!(t.contains(&[0.5, 0.5], 1e-12));
        assert!(!t.contains(&[0.6, 0.6], 1e-12));
        assert_eq!(t.facets().len(), 3);
    }

    #[test]
    fn degenerate_is_rejected() {
        let e = Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]);
        assert!(matches!(e, Err(Error::DegenerateCell(_))));
        assert!(Simplex::new(vec![vec![0.0, 0.0], vec![1.0]]).is_err());
    }

    #[test]
    fn unit_map_stays_inside() {
        let t = Simplex::new(vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![1.0, 1.0, 1.0],
        ])
        .unwrap();
        for i in 0..200 {
            let u = crate::sampling::halton(i, 3);
            assert!(t.contains(&t.point_from_unit(&u), 1e-12));
        }
    }
}
