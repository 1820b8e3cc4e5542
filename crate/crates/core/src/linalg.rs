//! Small dense matrices and the spectral machinery the norms are built on.
//!
//! Everything here targets matrices of dimension at most ~10. Symmetric
//! eigenproblems use cyclic Jacobi rotations, singular value decompositions
//! use one-sided (Hestenes) Jacobi, so results are deterministic and accurate
//! to a few ulps relative to the Frobenius norm of the input.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues with `|λ| <= SNAP_REL * (1 + |A|_F)` are treated as zero
/// before any sign-based case analysis.
pub const SNAP_REL: f64 = 1e-12;

/// Off-diagonal mass, relative to |A|_F, at which Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-16;
const MAX_SWEEPS: usize = 100;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `y += s * x`
pub fn axpy(y: &mut [f64], s: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// Returns `v / |v|`, or `None` for the zero vector.
pub fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    (n > 0.0).then(|| scale(v, 1.0 / n))
}

/// Dense real m×n matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.row_vecs()).finish()
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::dims(
                format!("{rows}x{cols} positive"),
                format!("{} entries", data.len()),
            ));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::dims("rectangular rows", "ragged rows"));
        }
        Matrix::from_row_major(m, n, rows.concat())
    }

    /// Builds a matrix from column vectors of equal length.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let n = cols.len();
        let m = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != m) || m == 0 || n == 0 {
            return Err(Error::dims("equal-length nonempty columns", "ragged columns"));
        }
        let mut out = Matrix::zeros(m, n);
        for (j, c) in cols.iter().enumerate() {
            out.set_column(j, c);
        }
        Ok(out)
    }

    /// `a ⊗ b = a bᵀ`.
    pub fn outer(a: &[f64], b: &[f64]) -> Self {
        let mut m = Matrix::zeros(a.len(), b.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m[(i, j)] = ai * bj;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row_vecs(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[f64]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "mul_vec shape mismatch");
        self.data.chunks(self.cols).map(|row| dot(row, x)).collect()
    }

    pub fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Frobenius inner product `A : B = tr(AᵀB)`.
    pub fn frobenius_dot(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        dot(&self.data, &other.data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn symmetric_part(&self) -> Matrix {
        assert!(self.is_square());
        let t = self.transpose();
        self.add(&t).scaled(0.5)
    }

    pub fn skew_part(&self) -> Matrix {
        assert!(self.is_square());
        let t = self.transpose();
        self.sub(&t).scaled(0.5)
    }

    /// LU factorization with partial pivoting; returns `(lu, perm, sign)` or
    /// `None` when a pivot vanishes.
    fn lu(&self) -> Option<(Matrix, Vec<usize>, f64)> {
        assert!(self.is_square());
        let n = self.rows;
        let mut lu = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for c in 0..n {
            let (p, pv) = (c..n)
                .map(|r| (r, lu[(r, c)].abs()))
                .fold((c, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pv == 0.0 {
                return None;
            }
            if p != c {
                for j in 0..n {
                    lu.data.swap(c * n + j, p * n + j);
                }
                perm.swap(c, p);
                sign = -sign;
            }
            for r in c + 1..n {
                let f = lu[(r, c)] / lu[(c, c)];
                lu[(r, c)] = f;
                for j in c + 1..n {
                    let v = lu[(c, j)];
                    lu[(r, j)] -= f * v;
                }
            }
        }
        Some((lu, perm, sign))
    }

    pub fn determinant(&self) -> f64 {
        match self.lu() {
            Some((lu, _, sign)) => (0..self.rows).map(|i| lu[(i, i)]).product::<f64>() * sign,
            None => 0.0,
        }
    }

    /// Solves `self · x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let (lu, perm, _) = self.lu()?;
        let n = self.rows;
        let mut y: Vec<f64> = perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] -= lu[(i, j)] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= lu[(i, j)] * y[j];
            }
            y[i] /= lu[(i, i)];
        }
        Some(y)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.rows;
        let mut inv = Matrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            inv.set_column(j, &self.solve(&e)?);
        }
        Some(inv)
    }

    /// Singular value decomposition by one-sided Jacobi rotations.
    pub fn svd(&self) -> Svd {
        Svd::compute(self)
    }

    pub fn polar(&self) -> PolarFactors {
        PolarFactors::from_svd(self, &self.svd())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(&rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.row_vecs()
    }
}

/// Symmetric n×n matrix; construction symmetrizes, so `a[i][j] == a[j][i]`
/// holds bit-for-bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    /// Returns `(A + Aᵀ)/2`.
    pub fn from_matrix(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dims("square matrix", format!("{}x{}", a.rows, a.cols)));
        }
        let n = a.rows;
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            s[(i, i)] = a[(i, i)];
            for j in i + 1..n {
                let v = 0.5 * (a[(i, j)] + a[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        Ok(SymMatrix(s))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        SymMatrix::from_matrix(&Matrix::from_rows(rows)?)
    }

    pub fn diag(values: &[f64]) -> Self {
        SymMatrix(Matrix::diag(values))
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(Matrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Congruence `Qᵀ A Q`.
    pub fn congruence(&self, q: &Matrix) -> SymMatrix {
        let m = q.transpose().matmul(&self.0).matmul(q);
        SymMatrix::from_matrix(&m).expect("square by construction")
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::compute(self)
    }

    /// Threshold below which eigenvalues count as zero.
    pub fn snap_threshold(&self) -> f64 {
        SNAP_REL * (1.0 + self.0.frobenius_norm())
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymMatrix::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.0.row_vecs()
    }
}

/// Eigenvalues sorted ascending together with an orthonormal eigenbasis
/// (column `i` of `vectors` belongs to `values[i]`).
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl Spectrum {
    fn compute(a: &SymMatrix) -> Spectrum {
        let n = a.dim();
        let mut w = a.0.clone();
        let mut v = Matrix::identity(n);
        let scale = w.frobenius_norm();
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| w[(i, j)] * w[(i, j)])
                .sum::<f64>()
                .sqrt();
            if off <= JACOBI_TOL * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = w[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for r in 0..n {
                        let (wrp, wrq) = (w[(r, p)], w[(r, q)]);
                        w[(r, p)] = c * wrp - s * wrq;
                        w[(r, q)] = s * wrp + c * wrq;
                    }
                    for r in 0..n {
                        let (wpr, wqr) = (w[(p, r)], w[(q, r)]);
                        w[(p, r)] = c * wpr - s * wqr;
                        w[(q, r)] = s * wpr + c * wqr;
                    }
                    w[(p, q)] = 0.0;
                    w[(q, p)] = 0.0;
                    for r in 0..n {
                        let (vrp, vrq) = (v[(r, p)], v[(r, q)]);
                        v[(r, p)] = c * vrp - s * vrq;
                        v[(r, q)] = s * vrp + c * vrq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| w[(i, i)].total_cmp(&w[(j, j)]));
        let values = order.iter().map(|&i| w[(i, i)]).collect();
        let mut vectors = Matrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &v.column(src));
        }
        Spectrum { values, vectors }
    }

    /// Builds a spectrum from explicit eigenpairs; the caller guarantees the
    /// vectors are orthonormal. Pairs are re-sorted ascending.
    pub fn from_parts(values: Vec<f64>, vectors: Matrix) -> Result<Spectrum> {
        if !vectors.is_square() || vectors.cols() != values.len() {
            return Err(Error::dims(
                format!("{0}x{0} eigenvector matrix", values.len()),
                format!("{}x{}", vectors.rows(), vectors.cols()),
            ));
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let mut sorted = Matrix::zeros(vectors.rows(), vectors.cols());
        for (dst, &src) in order.iter().enumerate() {
            sorted.set_column(dst, &vectors.column(src));
        }
        Ok(Spectrum {
            values: order.iter().map(|&i| values[i]).collect(),
            vectors: sorted,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }

    /// `Σ λ_i e_i ⊗ e_i`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for (i, &l) in self.values.iter().enumerate() {
            let e = self.vector(i);
            out = out.add(&Matrix::outer(&e, &e).scaled(l));
        }
        out
    }

    /// Eigenvalues with magnitudes at or below `threshold` replaced by zero.
    pub fn snapped(&self, threshold: f64) -> Vec<f64> {
        self.values
            .iter()
            .map(|&l| if l.abs() <= threshold { 0.0 } else { l })
            .collect()
    }
}

/// Closed-form eigenvalues of a symmetric 3×3 matrix (trigonometric Cardano
/// solution followed by one Newton step on the characteristic polynomial),
/// sorted ascending.
pub fn sym3_eigenvalues(a: &SymMatrix) -> Result<[f64; 3]> {
    if a.dim() != 3 {
        return Err(Error::dims("3x3", format!("{0}x{0}", a.dim())));
    }
    let m = a.as_matrix();
    let p1 = m[(0, 1)].powi(2) + m[(0, 2)].powi(2) + m[(1, 2)].powi(2);
    let mut eig = if p1 == 0.0 {
        [m[(0, 0)], m[(1, 1)], m[(2, 2)]]
    } else {
        let q = m.trace() / 3.0;
        let p2 = (m[(0, 0)] - q).powi(2) + (m[(1, 1)] - q).powi(2) + (m[(2, 2)] - q).powi(2)
            + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let b = m.sub(&Matrix::identity(3).scaled(q)).scaled(1.0 / p);
        let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        [e1, 3.0 * q - e1 - e3, e3]
    };
    // characteristic polynomial λ³ - c2 λ² + c1 λ - c0
    let c2 = m.trace();
    let c1 = m[(0, 0)] * m[(1, 1)] - m[(0, 1)].powi(2) + m[(0, 0)] * m[(2, 2)]
        - m[(0, 2)].powi(2)
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)].powi(2);
    let c0 = m.determinant();
    for l in eig.iter_mut() {
        let f = ((*l - c2) * *l + c1) * *l - c0;
        let df = (3.0 * *l - 2.0 * c2) * *l + c1;
        if df.abs() > 1e-8 * (1.0 + c2.abs() + c1.abs()) {
            *l -= f / df;
        }
    }
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// `A = U diag(s) Vᵀ` with `s` sorted descending. `U` is m×n; its columns
/// for nonzero singular values are `A v_i / s_i`, the rest complete an
/// orthonormal family when `m >= n` and are zero beyond rank `m` otherwise.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    fn compute(a: &Matrix) -> Svd {
        let (m, n) = (a.rows, a.cols);
        let mut w = a.clone();
        let mut v = Matrix::identity(n);
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                    for i in 0..m {
                        let (x, y) = (w[(i, p)], w[(i, q)]);
                        alpha += x * x;
                        beta += y * y;
                        gamma += x * y;
                    }
                    if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let sgn = if zeta >= 0.0 { 1.0 } else { -1.0 };
                    let t = sgn / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..m {
                        let (x, y) = (w[(i, p)], w[(i, q)]);
                        w[(i, p)] = c * x - s * y;
                        w[(i, q)] = s * x + c * y;
                    }
                    for i in 0..n {
                        let (x, y) = (v[(i, p)], v[(i, q)]);
                        v[(i, p)] = c * x - s * y;
                        v[(i, q)] = s * x + c * y;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let norms: Vec<f64> = (0..n).map(|j| norm(&w.column(j))).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

        let tol = SNAP_REL * (1.0 + a.frobenius_norm());
        let mut singular_values = Vec::with_capacity(n);
        let mut sorted_v = Matrix::zeros(n, n);
        let mut u_cols: Vec<Option<Vec<f64>>> = Vec::with_capacity(n);
        for (dst, &src) in order.iter().enumerate() {
            let s = norms[src];
            sorted_v.set_column(dst, &v.column(src));
            if s > tol {
                singular_values.push(s);
                u_cols.push(Some(scale(&w.column(src), 1.0 / s)));
            } else {
                singular_values.push(if s > 0.0 { s } else { 0.0 });
                u_cols.push(None);
            }
        }
        // complete U with Gram-Schmidt against canonical vectors
        let mut basis: Vec<Vec<f64>> = u_cols.iter().flatten().cloned().collect();
        let mut candidates = (0..m).map(|i| {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            e
        });
        let mut u = Matrix::zeros(m, n);
        for (j, col) in u_cols.into_iter().enumerate() {
            let col = col.or_else(|| {
                if basis.len() >= m {
                    return None;
                }
                candidates.by_ref().find_map(|mut e| {
                    for b in &basis {
                        let d = dot(&e, b);
                        axpy(&mut e, -d, b);
                    }
                    let r = normalized(&e).filter(|_| norm(&e) > 1e-8);
                    if let Some(ref r) = r {
                        basis.push(r.clone());
                    }
                    r
                })
            });
            if let Some(c) = col {
                u.set_column(j, &c);
            }
        }
        Svd {
            u,
            singular_values,
            v: sorted_v,
        }
    }

    /// Number of singular values above the snapping threshold.
    pub fn rank(&self, a_frobenius: f64) -> usize {
        let tol = SNAP_REL * (1.0 + a_frobenius);
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }
}

/// Polar factors `A = R U` with `U = √(AᵀA)`.
///
/// `R = U_svd Vᵀ` has orthonormal columns when `m >= n`; for `m < n` it is
/// the partial isometry sending each right singular vector to its left
/// partner (zero on the part of the kernel that cannot be completed).
#[derive(Clone, Debug)]
pub struct PolarFactors {
    pub r: Matrix,
    pub u: SymMatrix,
    pub singular_values: Vec<f64>,
    /// Right singular vectors (eigenvectors of `U`) as columns.
    pub right_vectors: Matrix,
}

impl PolarFactors {
    fn from_svd(_a: &Matrix, svd: &Svd) -> PolarFactors {
        let vt = svd.v.transpose();
        let r = svd.u.matmul(&vt);
        let u = svd.v.matmul(&Matrix::diag(&svd.singular_values)).matmul(&vt);
        PolarFactors {
            r,
            u: SymMatrix::from_matrix(&u).expect("square"),
            singular_values: svd.singular_values.clone(),
            right_vectors: svd.v.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn spectrum_of_diagonal_is_sorted() {
        let s = SymMatrix::diag(&[3.0, -2.0, -1.0]).spectrum();
        assert_eq!(s.values, vec![-2.0, -1.0, 3.0]);
        assert!(s.reconstruct().sub(&Matrix::diag(&[3.0, -2.0, -1.0])).frobenius_norm() < 1e-15);
    }

    #[test]
    fn spectrum_reconstructs_dense_matrix() {
        let a = SymMatrix::from_rows(&[
            vec![2.0, -1.0, 0.5, 0.0],
            vec![-1.0, 0.3, 0.7, 1.2],
            vec![0.5, 0.7, -1.5, 0.1],
            vec![0.0, 1.2, 0.1, 0.9],
        ])
        .unwrap();
        let s = a.spectrum();
        let err = s.reconstruct().sub(a.as_matrix()).frobenius_norm();
        assert!(err <= 1e-10 * (1.0 + a.as_matrix().frobenius_norm()), "err {err}");
        let vtv = s.vectors.transpose().matmul(&s.vectors);
        assert!(vtv.sub(&Matrix::identity(4)).frobenius_norm() < 1e-10);
        assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn cardano_matches_jacobi() {
        let a = SymMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, -4.0, 0.5],
            vec![3.0, 0.5, 0.25],
        ])
        .unwrap();
        let closed = sym3_eigenvalues(&a).unwrap();
        let jac = a.spectrum().values;
        for (c, j) in closed.iter().zip(&jac) {
            assert!(close(*c, *j, 1e-12), "{closed:?} vs {jac:?}");
        }
        let rep = sym3_eigenvalues(&SymMatrix::diag(&[1.0, 1.0, 3.0])).unwrap();
        assert_eq!(rep, [1.0, 1.0, 3.0]);
    }

    #[test]
    fn svd_of_nilpotent() {
        let a = Matrix::from_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let svd = a.svd();
        assert!(close(svd.singular_values[0], 2.0, 1e-15));
        assert_eq!(svd.singular_values[1], 0.0);
        let rec = svd
            .u
            .matmul(&Matrix::diag(&svd.singular_values))
            .matmul(&svd.v.transpose());
        assert!(rec.sub(&a).frobenius_norm() < 1e-14);
    }

    #[test]
    fn svd_wide_and_tall() {
        let wide = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 2.0]]).unwrap();
        for a in [wide.clone(), wide.transpose()] {
            let svd = a.svd();
            let rec = svd
                .u
                .matmul(&Matrix::diag(&svd.singular_values))
                .matmul(&svd.v.transpose());
            assert!(rec.sub(&a).frobenius_norm() < 1e-12);
            let vtv = svd.v.transpose().matmul(&svd.v);
            assert!(vtv.sub(&Matrix::identity(a.cols())).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn polar_factors_reconstruct() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![0.0, -1.0]]).unwrap();
        let p = a.polar();
        assert!(p.r.matmul(p.u.as_matrix()).sub(&a).frobenius_norm() < 1e-12);
        let rtr = p.r.transpose().matmul(&p.r);
        assert!(rtr.sub(&Matrix::identity(2)).frobenius_norm() < 1e-12);
        assert!(p.u.spectrum().values[0] >= -1e-12);
    }

    #[test]
    fn polar_of_rank_deficient_square() {
        let a = Matrix::outer(&[1.0, 2.0], &[3.0, 0.0]);
        let p = a.polar();
        assert!(p.r.matmul(p.u.as_matrix()).sub(&a).frobenius_norm() < 1e-12);
        let rtr = p.r.transpose().matmul(&p.r);
        assert!(rtr.sub(&Matrix::identity(2)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn solve_and_determinant() {
        let a = Matrix::from_rows(&[vec![0.0, 2.0], vec![1.0, 1.0]]).unwrap();
        assert!(close(a.determinant(), -2.0, 1e-15));
        let x = a.solve(&[2.0, 3.0]).unwrap();
        assert!(close(x[0], 2.0, 1e-15) && close(x[1], 1.0, 1e-15));
        let singular = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(singular.inverse().is_none() || singular.determinant().abs() < 1e-15);
    }

    #[test]
    fn matrix_json_is_nested_rows() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[1.0,2.0],[3.0,4.0]]");
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Matrix>("[[1.0],[2.0,3.0]]").is_err());
    }
}
