//! Tensor and symmetric tensor products, and additive decompositions of
//! matrices into rank-one (`a⊗b`) or symmetric rank-one (`a⊙b`) pieces whose
//! Frobenius costs add up to the Schatten-1 or symmetric Schatten-1 norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, scale, Matrix, Spectrum, SymMatrix, SNAP_REL};

/// `a⊗b = a bᵀ`.
pub fn tensor(a: &[f64], b: &[f64]) -> Matrix {
    Matrix::outer(a, b)
}

/// `a⊙b = (a⊗b + b⊗a)/2`.
pub fn sym_tensor(a: &[f64], b: &[f64]) -> Result<SymMatrix> {
    if a.len() != b.len() {
        return Err(Error::dims(
            format!("vectors of equal length {}", a.len()),
            format!("length {}", b.len()),
        ));
    }
    SymMatrix::from_matrix(&Matrix::outer(a, b))
}

/// A single piece `a⊗b`, or `a⊙b` when `symmetric` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOnePiece {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub symmetric: bool,
}

impl RankOnePiece {
    pub fn tensor(left: Vec<f64>, right: Vec<f64>) -> Self {
        RankOnePiece {
            left,
            right,
            symmetric: false,
        }
    }

    pub fn sym(left: Vec<f64>, right: Vec<f64>) -> Self {
        debug_assert_eq!(left.len(), right.len());
        RankOnePiece {
            left,
            right,
            symmetric: true,
        }
    }

    /// The designated zero piece of an `n×n` symmetric decomposition.
    pub fn zero_sym(n: usize) -> Self {
        RankOnePiece::sym(vec![0.0; n], vec![0.0; n])
    }

    pub fn is_zero(&self) -> bool {
        self.left.iter().chain(&self.right).all(|&x| x == 0.0)
    }

    pub fn matrix(&self) -> Matrix {
        let m = Matrix::outer(&self.left, &self.right);
        if self.symmetric {
            m.symmetric_part()
        } else {
            m
        }
    }

    /// Frobenius norm of the piece, which equals its Schatten-1 (resp.
    /// symmetric Schatten-1) norm.
    pub fn cost(&self) -> f64 {
        self.matrix().frobenius_norm()
    }
}

/// Which branch of the construction produced a decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecompositionCase {
    /// All eigenvalues snap to zero; no pieces.
    Zero,
    /// No eigenvalues of opposite sign: `λ_i e_i⊙e_i` pieces.
    SameSign,
    /// Exactly one positive eigenvalue and at least one negative one.
    OneException,
    /// Exactly one negative eigenvalue and at least two positive ones,
    /// handled by negation.
    Mirror,
    /// At least two eigenvalues of each sign.
    General,
    /// Singular-value pieces `s_i (R v_i)⊗v_i`.
    SingularValue,
    /// Produced by a randomized or user-supplied construction.
    Other,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Decomposition {
    pub pieces: Vec<RankOnePiece>,
    pub target: Matrix,
    pub case: DecompositionCase,
    /// Number of dimension-reducing recursion levels used.
    pub depth: usize,
}

impl Decomposition {
    pub fn reconstruct(&self) -> Matrix {
        self.pieces
            .iter()
            .fold(Matrix::zeros(self.target.rows(), self.target.cols()), |acc, p| {
                acc.add(&p.matrix())
            })
    }

    pub fn reconstruction_error(&self) -> f64 {
        self.reconstruct().sub(&self.target).frobenius_norm()
    }

    /// `Σ |piece|`.
    pub fn cost(&self) -> f64 {
        self.pieces.iter().map(RankOnePiece::cost).sum()
    }

    /// Reconstruction within `tol · (1 + |target|)`.
    pub fn reconstructs(&self, tol: f64) -> bool {
        self.reconstruction_error() <= tol * (1.0 + self.target.frobenius_norm())
    }
}

/// Writes a symmetric 2×2 matrix with `det A ≤ 0` as `α⊙β`.
///
/// With eigenpairs `λ₁ ≤ 0 ≤ λ₂` the factors are
/// `α = √λ₂ e₂ + √|λ₁| e₁`, `β = √λ₂ e₂ − √|λ₁| e₁`. A positive semidefinite
/// rank-one input returns `α = β`; a negative semidefinite one returns
/// `α = −β`. Determinants in `(0, 1e-12]` are treated as rank one by dropping
/// the eigenvalue of smaller magnitude.
pub fn sym_rank_one_factor(a: &SymMatrix) -> Result<RankOnePiece> {
    if a.dim() != 2 {
        return Err(Error::dims("2x2 symmetric", format!("{0}x{0}", a.dim())));
    }
    let det = a.determinant();
    if det > 1e-12 {
        return Err(Error::PositiveDeterminant(det));
    }
    let spec = a.spectrum();
    let mut l = spec.snapped(a.snap_threshold());
    if l[0] * l[1] > 0.0 {
        if l[0].abs() < l[1].abs() {
            l[0] = 0.0;
        } else {
            l[1] = 0.0;
        }
    }
    let (e1, e2) = (spec.vector(0), spec.vector(1));
    let piece = match (l[0], l[1]) {
        (l1, l2) if l1 == 0.0 && l2 == 0.0 => RankOnePiece::zero_sym(2),
        (l1, l2) if l1 == 0.0 || l2 == 0.0 => {
            let (lam, e) = if l1 != 0.0 { (l1, &e1) } else { (l2, &e2) };
            let alpha = scale(e, lam.abs().sqrt());
            let beta = if lam > 0.0 { alpha.clone() } else { scale(&alpha, -1.0) };
            RankOnePiece::sym(alpha, beta)
        }
        (l1, l2) => {
            let (p, q) = (l2.sqrt(), l1.abs().sqrt());
            let alpha = (0..2).map(|i| p * e2[i] + q * e1[i]).collect();
            let beta = (0..2).map(|i| p * e2[i] - q * e1[i]).collect();
            RankOnePiece::sym(alpha, beta)
        }
    };
    Ok(piece)
}

/// Decomposes a symmetric matrix into symmetric rank-one pieces whose costs
/// sum to `ssym(A)`.
pub fn bd_decompose(a: &SymMatrix) -> Decomposition {
    bd_decompose_spectrum(&a.spectrum())
}

/// [`bd_decompose`] driven by an explicit eigen-decomposition, so callers can
/// choose the basis of repeated eigenspaces. The target is the matrix the
/// spectrum reconstructs.
pub fn bd_decompose_spectrum(spec: &Spectrum) -> Decomposition {
    let target = spec.reconstruct();
    let threshold = SNAP_REL * (1.0 + norm(&spec.values));
    let values = spec.snapped(threshold);
    let vectors: Vec<Vec<f64>> = (0..spec.dim()).map(|i| spec.vector(i)).collect();
    let neg: Vec<usize> = (0..values.len()).filter(|&i| values[i] < 0.0).collect();
    let pos: Vec<usize> = (0..values.len()).filter(|&i| values[i] > 0.0).collect();

    let (pieces, case, depth) = if neg.is_empty() && pos.is_empty() {
        (Vec::new(), DecompositionCase::Zero, 0)
    } else if neg.is_empty() || pos.is_empty() {
        let pieces = neg
            .iter()
            .chain(&pos)
            .map(|&i| RankOnePiece::sym(scale(&vectors[i], values[i]), vectors[i].clone()))
            .collect();
        (pieces, DecompositionCase::SameSign, 0)
    } else if pos.len() == 1 {
        let lam_n = values[pos[0]];
        let negs: Vec<(f64, &[f64])> = neg.iter().map(|&i| (values[i], &vectors[i][..])).collect();
        let pieces = one_exception(&negs, lam_n, &vectors[pos[0]]);
        (pieces, DecompositionCase::OneException, 0)
    } else if neg.len() == 1 {
        let lam_n = -values[neg[0]];
        let others: Vec<(f64, &[f64])> =
            pos.iter().map(|&i| (-values[i], &vectors[i][..])).collect();
        let pieces = one_exception(&others, lam_n, &vectors[neg[0]])
            .into_iter()
            .map(|p| RankOnePiece::sym(scale(&p.left, -1.0), p.right))
            .collect();
        (pieces, DecompositionCase::Mirror, 0)
    } else {
        let pos_sum: f64 = pos.iter().map(|&j| values[j]).sum();
        let mut pieces = Vec::with_capacity(neg.len() * pos.len());
        for &j in &pos {
            let a_j = values[j] / pos_sum;
            let negs: Vec<(f64, &[f64])> = neg
                .iter()
                .map(|&i| (a_j * values[i], &vectors[i][..]))
                .collect();
            pieces.extend(one_exception(&negs, values[j], &vectors[j]));
        }
        (pieces, DecompositionCase::General, 1)
    };
    Decomposition {
        pieces,
        target,
        case,
        depth,
    }
}

/// Pieces `α_j⊙β_j` for `Σ_j λ_j e_j⊗e_j + λ_n e_n⊗e_n` with every `λ_j < 0`
/// and `λ_n > 0`: `δ_j = λ_j / Σ λ_l`,
/// `α_j = −√|λ_j| e_j + √(δ_j λ_n) e_n`, `β_j = √|λ_j| e_j + √(δ_j λ_n) e_n`.
fn one_exception(negs: &[(f64, &[f64])], lam_n: f64, e_n: &[f64]) -> Vec<RankOnePiece> {
    let total: f64 = negs.iter().map(|&(l, _)| l).sum();
    negs.iter()
        .map(|&(l, e_j)| {
            let delta = l / total;
            let p = l.abs().sqrt();
            let q = (delta * lam_n).sqrt();
            let alpha = (0..e_n.len()).map(|i| -p * e_j[i] + q * e_n[i]).collect();
            let beta = (0..e_n.len()).map(|i| p * e_j[i] + q * e_n[i]).collect();
            RankOnePiece::sym(alpha, beta)
        })
        .collect()
}

/// Decomposes `A = Σ s_i (R v_i)⊗v_i` from the polar factorisation
/// `A = R U`, one piece per nonzero singular value.
pub fn bv_decompose(a: &Matrix) -> Decomposition {
    let polar = a.polar();
    let tol = SNAP_REL * (1.0 + a.frobenius_norm());
    let pieces = polar
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol)
        .map(|(i, &s)| {
            let v = polar.right_vectors.column(i);
            RankOnePiece::tensor(scale(&polar.r.mul_vec(&v), s), v)
        })
        .collect();
    Decomposition {
        pieces,
        target: a.clone(),
        case: DecompositionCase::SingularValue,
        depth: 0,
    }
}
