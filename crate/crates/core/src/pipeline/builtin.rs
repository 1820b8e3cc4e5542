use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::BoxDomain;
use crate::laminate::Mode;
use crate::linalg::Matrix;
use crate::sampling::{rng, uniform_matrix, uniform_vec};

/// Names accepted by [`Builtin::from_name`].
pub const BUILTIN_NAMES: [&str; 6] = [
    "identity2d",
    "identity3d",
    "skew2d",
    "rankone-sym2d",
    "sinusoid2d",
    "affine-random",
];

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Affine { a: Matrix, b: Vec<f64> },
    Sinusoid,
}

/// A named test field on its default box.
///
/// | name | field | ssym target | Schatten-1 target |
/// |---|---|---|---|
/// | identity2d | `x` on `(0,1)²` | 2 | 2 |
/// | identity3d | `x` on `(0,1)³` | 3 | 3 |
/// | skew2d | `(−x₂, x₁)` | 0 | 2 |
/// | rankone-sym2d | `(a⊙b) x`, `a=(1,0)`, `b=(1,2)` | √3 | √5 |
/// | sinusoid2d | `(sin x₂, sin x₁)/2` | `√2 sin(1)/2` | `sin 1` |
/// | affine-random | `A x + b`, entries uniform in `[−1,1]` | computed | computed |
#[derive(Clone, Debug, PartialEq)]
pub struct Builtin {
    pub name: String,
    pub seed: Option<u64>,
    pub domain: BoxDomain,
    kind: Kind,
}

impl Builtin {
    /// Looks up a builtin; `seed` is used by `affine-random` only.
    pub fn from_name(name: &str, seed: u64) -> Result<Self> {
        let affine = |a: Matrix, n: usize| Kind::Affine { a, b: vec![0.0; n] };
        let (kind, n, seed) = match name {
            "identity2d" => (affine(Matrix::identity(2), 2), 2, None),
            "identity3d" => (affine(Matrix::identity(3), 3), 3, None),
            "skew2d" => (
                affine(Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]])?, 2),
                2,
                None,
            ),
            "rankone-sym2d" => (
                affine(Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]])?, 2),
                2,
                None,
            ),
            "sinusoid2d" => (Kind::Sinusoid, 2, None),
            "affine-random" => {
                let mut r = rng(seed, 0);
                let a = uniform_matrix(&mut r, 2, 2);
                let b = uniform_vec(&mut r, 2, -1.0, 1.0);
                (Kind::Affine { a, b }, 2, Some(seed))
            }
            other => {
                return Err(Error::InvalidField(format!(
                    "unknown builtin '{other}' (expected one of {})",
                    BUILTIN_NAMES.join(", ")
                )))
            }
        };
        Ok(Builtin {
            name: name.to_string(),
            seed,
            domain: BoxDomain::unit(n),
            kind,
        })
    }

    pub fn n(&self) -> usize {
        self.domain.dim()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            Kind::Affine { a, b } => a.mul_vec(x).iter().zip(b).map(|(y, c)| y + c).collect(),
            Kind::Sinusoid => vec![0.5 * x[1].sin(), 0.5 * x[0].sin()],
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Matrix {
        match &self.kind {
            Kind::Affine { a, .. } => a.clone(),
            Kind::Sinusoid => Matrix::from_rows(&[
                vec![0.0, 0.5 * x[1].cos()],
                vec![0.5 * x[0].cos(), 0.0],
            ])
            .expect("finite"),
        }
    }

    /// Closed-form `∫ N(∇u)` over the default unit box, where `N` is the
    /// mode's Schatten norm.
    pub fn analytic_target(&self, mode: Mode) -> Result<f64> {
        match &self.kind {
            Kind::Affine { a, .. } => mode.target_norm(a),
            Kind::Sinusoid => Ok(match mode {
                Mode::Bd => std::f64::consts::SQRT_2 * 1f64.sin() / 2.0,
                Mode::Bv => 1f64.sin(),
            }),
        }
    }

    /// Midpoint-rule `∫_box N(∇u)` with `points` nodes per axis.
    pub fn quadrature_target(&self, mode: Mode, domain: &BoxDomain, points: usize) -> Result<f64> {
        let n = domain.dim();
        let h: Vec<f64> = (0..n)
            .map(|i| (domain.hi[i] - domain.lo[i]) / points as f64)
            .collect();
        let cell = h.iter().product::<f64>();
        let total_nodes = points.pow(n as u32);
        let mut x = vec![0.0; n];
        let mut sum = 0.0;
        for lin in 0..total_nodes {
            let mut rest = lin;
            for i in 0..n {
                x[i] = domain.lo[i] + h[i] * ((rest % points) as f64 + 0.5);
                rest /= points;
            }
            sum += mode.target_norm(&self.gradient(&x))?;
        }
        Ok(sum * cell)
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.seed {
            Some(s) => write!(f, "{}(seed={s})", self.name),
            None => f.write_str(&self.name),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_targets() {
        let s3 = 3f64.sqrt();
        let id = Builtin::from_name("identity2d", 0).unwrap();
        assert_eq!(id.analytic_target(Mode::Bd).unwrap(), 2.0);
        let r1 = Builtin::from_name("rankone-sym2d", 0).unwrap();
        assert!((r1.analytic_target(Mode::Bd).unwrap() - s3).abs() < 1e-12);
        assert!((r1.analytic_target(Mode::Bv).unwrap() - 5f64.sqrt()).abs() < 1e-12);
        let sk = Builtin::from_name("skew2d", 0).unwrap();
        assert!(sk.analytic_target(Mode::Bd).unwrap().abs() < 1e-12);
        assert!((sk.analytic_target(Mode::Bv).unwrap() - 2.0).abs() < 1e-12);
        assert!(Builtin::from_name("nope", 0).is_err());
    }

    #[test]
    fn sinusoid_quadrature_matches_closed_form() {
        let s = Builtin::from_name("sinusoid2d", 0).unwrap();
        for mode in [Mode::Bd, Mode::Bv] {
            let q = s.quadrature_target(mode, &s.domain, 200).unwrap();
            assert!((q - s.analytic_target(mode).unwrap()).abs() < 1e-5);
        }
    }

    #[test]
    fn affine_random_is_seeded() {
        let a = Builtin::from_name("affine-random", 3).unwrap();
        let b = Builtin::from_name("affine-random", 3).unwrap();
        let c = Builtin::from_name("affine-random", 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
