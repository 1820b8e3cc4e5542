//! Closed-form matrix norms: Frobenius, Schatten-1 (nuclear), Schatten-∞
//! (spectral), the symmetric Schatten-1 norm on symmetric matrices, and the
//! divergence-cone norm on symmetric 2×2 and 3×3 matrices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};

pub fn frobenius(a: &Matrix) -> f64 {
    a.frobenius_norm()
}

/// Sum of singular values, `tr √(AᵀA)`.
pub fn schatten1(a: &Matrix) -> f64 {
    a.svd().singular_values.iter().sum()
}

/// Largest singular value.
pub fn schatten_inf(a: &Matrix) -> f64 {
    a.svd().singular_values[0]
}

/// Both algebraic forms of the symmetric Schatten-1 norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SsymForms {
    /// `√(½ S1(A)² + ½ tr(A)²)`
    pub definition: f64,
    /// `√((Σ_{λ≤0} λ)² + (Σ_{λ>0} λ)²)`
    pub sign_split: f64,
}

pub fn ssym_forms(a: &SymMatrix) -> SsymForms {
    let snap = a.snap_threshold();
    let values = a.spectrum().snapped(snap);
    let s1: f64 = values.iter().map(|l| l.abs()).sum();
    let tr: f64 = values.iter().sum();
    let nonpos: f64 = values.iter().filter(|&&l| l <= 0.0).sum();
    let pos: f64 = values.iter().filter(|&&l| l > 0.0).sum();
    SsymForms {
        definition: (0.5 * s1 * s1 + 0.5 * tr * tr).sqrt(),
        sign_split: nonpos.hypot(pos),
    }
}

/// Symmetric Schatten-1 norm, evaluated through the sign split of the
/// spectrum. The definition form is computed alongside and checked in debug
/// builds.
pub fn ssym(a: &SymMatrix) -> f64 {
    let f = ssym_forms(a);
    debug_assert!(
        (f.definition - f.sign_split).abs() <= 1e-10 * (1.0 + f.sign_split),
        "ssym forms disagree: {f:?}"
    );
    f.sign_split
}

/// `√(|A|² + 2 det(A)⁺)`, the two-dimensional shortcut for [`ssym`].
pub fn ssym_2d(a: &SymMatrix) -> Result<f64> {
    if a.dim() != 2 {
        return Err(Error::dims("2x2 symmetric", format!("{0}x{0}", a.dim())));
    }
    let m = a.as_matrix();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    Ok((m.frobenius_norm().powi(2) + 2.0 * det.max(0.0)).sqrt())
}

/// Divergence-cone norm for `n = 2` (equal to Schatten-1) and the
/// two-branch formula for `n = 3`.
///
/// The three-dimensional formula is the conjectured envelope of the
/// Frobenius norm restricted to singular symmetric matrices; it is evaluated
/// here as stated, not derived.
pub fn div_norm(a: &SymMatrix) -> Result<f64> {
    match a.dim() {
        2 => Ok(schatten1(a.as_matrix())),
        3 => {
            let v = a.spectrum().snapped(a.snap_threshold());
            Ok(div_norm_eigen([v[0], v[1], v[2]]))
        }
        n => Err(Error::UnsupportedDimension(n)),
    }
}

/// The two branch values `(√((|λ₁|+|λ₂|)² + λ₃²), (|λ₁|+|λ₂|+|λ₃|)/√2)` for
/// eigenvalues ordered by magnitude.
pub fn div_norm_branches(eigenvalues: [f64; 3]) -> (f64, f64) {
    let mut mags = eigenvalues.map(f64::abs);
    mags.sort_by(f64::total_cmp);
    let small = mags[0] + mags[1];
    (
        small.hypot(mags[2]),
        (mags[0] + mags[1] + mags[2]) / std::f64::consts::SQRT_2,
    )
}

pub fn div_norm_eigen(eigenvalues: [f64; 3]) -> f64 {
    let mut mags = eigenvalues.map(f64::abs);
    mags.sort_by(f64::total_cmp);
    let (low, high) = div_norm_branches(eigenvalues);
    if mags[0] + mags[1] <= mags[2] {
        low
    } else {
        high
    }
}

/// Norm selector shared by variation computations and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Frobenius,
    Schatten1,
    Ssym,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Frobenius, NormKind::Schatten1, NormKind::Ssym];

    /// Evaluates the norm. `Ssym` symmetrizes non-symmetric square input and
    /// rejects rectangular input.
    pub fn eval(self, a: &Matrix) -> Result<f64> {
        Ok(match self {
            NormKind::Frobenius => frobenius(a),
            NormKind::Schatten1 => schatten1(a),
            NormKind::Ssym => ssym(&SymMatrix::from_matrix(a)?),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            NormKind::Frobenius => "frobenius",
            NormKind::Schatten1 => "schatten1",
            NormKind::Ssym => "ssym",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "frobenius" | "fro" => Ok(NormKind::Frobenius),
            "schatten1" | "s1" | "nuclear" => Ok(NormKind::Schatten1),
            "ssym" => Ok(NormKind::Ssym),
            other => Err(Error::InvalidConfig(format!("unknown norm '{other}'"))),
        }
    }
}
