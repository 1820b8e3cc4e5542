use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, sub, Matrix};

use super::mesh::Triangulation;

/// `x ↦ A x + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(rename = "A")]
    pub a: Matrix,
    pub b: Vec<f64>,
}

impl AffineMap {
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::dims(format!("offset of length {}", a.rows()), format!("{}", b.len())));
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(AffineMap { a, b })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.a.mul_vec(x);
        for (yi, bi) in y.iter_mut().zip(&self.b) {
            *yi += bi;
        }
        y
    }
}

/// A triangulation with one affine map per cell.
#[derive(Clone, Debug, Serialize)]
pub struct PiecewiseAffineField {
    pub mesh: Triangulation,
    pub m: usize,
    pub cells: Vec<AffineMap>,
    pub continuous: bool,
}

/// Tolerance for the shared-vertex agreement of continuous fields.
const CONTINUITY_TOL: f64 = 1e-10;

impl PiecewiseAffineField {
    /// Validates dimensions and, when `continuous` is set, agreement on
    /// shared vertices within `1e-10 · (1 + max |value|)`.
    pub fn new(mesh: Triangulation, cells: Vec<AffineMap>, continuous: bool) -> Result<Self> {
        if cells.len() != mesh.len() {
            return Err(Error::dims(format!("{} cell maps", mesh.len()), format!("{}", cells.len())));
        }
        let n = mesh.dim();
        let m = cells[0].a.rows();
        for c in &cells {
            if c.a.cols() != n || c.a.rows() != m {
                return Err(Error::dims(
                    format!("{m}x{n} cell matrices"),
                    format!("{}x{}", c.a.rows(), c.a.cols()),
                ));
            }
        }
        let field = PiecewiseAffineField {
            mesh,
            m,
            cells,
            continuous,
        };
        if continuous {
            let (defect, scale) = field.continuity_defect();
            if defect > CONTINUITY_TOL * (1.0 + scale) {
                return Err(Error::InvalidField(format!(
                    "field flagged continuous but cells disagree by {defect:e} on shared vertices"
                )));
            }
        }
        Ok(field)
    }

    pub fn n(&self) -> usize {
        self.mesh.dim()
    }

    /// Largest disagreement between cells at a shared vertex, and the
    /// largest value magnitude seen.
    pub fn continuity_defect(&self) -> (f64, f64) {
        let mut first: Vec<Option<Vec<f64>>> = vec![None; self.mesh.vertices.len()];
        let mut defect: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (cell, map) in self.mesh.cells.iter().zip(&self.cells) {
            for &v in cell {
                let y = map.apply(&self.mesh.vertices[v]);
                scale = scale.max(norm(&y));
                match &first[v] {
                    Some(y0) => defect = defect.max(norm(&sub(&y, y0))),
                    None => first[v] = Some(y),
                }
            }
        }
        (defect, scale)
    }

    /// Evaluates the map of the first cell containing `x`.
    pub fn eval(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.mesh.locate(x, 1e-12).map(|i| self.cells[i].apply(x))
    }
}

/// Lagrange interpolation: on each cell, the affine map that matches `f` at
/// the cell's vertices.
pub fn interpolate(
    f: impl Fn(&[f64]) -> Vec<f64>,
    mesh: &Triangulation,
) -> Result<PiecewiseAffineField> {
    let values: Vec<Vec<f64>> = mesh.vertices.iter().map(|v| f(v)).collect();
    let m = values.first().map_or(0, Vec::len);
    if m == 0 {
        return Err(Error::InvalidField("field has no components".into()));
    }
    if values.iter().any(|y| y.len() != m) {
        return Err(Error::InvalidField("field output length varies".into()));
    }
    if values.iter().flatten().any(|y| !y.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = mesh.dim();
    let mut cells = Vec::with_capacity(mesh.len());
    for (ci, cell) in mesh.cells.iter().enumerate() {
        let simplex = mesh.cell(ci);
        let et = simplex.edge_matrix().transpose();
        let y0 = &values[cell[0]];
        let mut a = Matrix::zeros(m, n);
        for r in 0..m {
            let rhs: Vec<f64> = cell[1..].iter().map(|&v| values[v][r] - y0[r]).collect();
            let row = et
                .solve(&rhs)
                .ok_or_else(|| Error::DegenerateCell(et.determinant().abs()))?;
            for (c, x) in row.into_iter().enumerate() {
                a[(r, c)] = x;
            }
        }
        let ax0 = a.mul_vec(simplex.vertex(0));
        let b = y0.iter().zip(&ax0).map(|(y, ax)| y - ax).collect();
        cells.push(AffineMap { a, b });
    }
    PiecewiseAffineField::new(mesh.clone(), cells, true)
}
