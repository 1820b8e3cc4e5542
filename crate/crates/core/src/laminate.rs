//! Staircase laminates `u_k(x) = M x + b + Σ c_j s_k(d_j·x)` approximating
//! affine maps, and the exact variation of their jump measures on simplices.
//!
//! In BV mode `M = 0` and the terms come from the singular-value pieces
//! `s_i (R v_i)⊗v_i` of `A`. In BD mode `M = A^skew` and the terms come from
//! the symmetric rank-one pieces `a⊙b` of `A^sym`, each written in pair form
//! `(a|b|/2) s_k(b̂·x) + (b|a|/2) s_k(â·x)` (a single term `(a·b) b̂ s_k(b̂·x)`
//! when `a ∥ b`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{slice_measure_open, JumpForm, Simplex, UNIT_TOL};
use crate::linalg::{axpy, dot, norm, normalized, scale, sub, Matrix, SymMatrix};
use crate::norms::NormKind;
use crate::rank_one::{bd_decompose, bv_decompose, Decomposition, RankOnePiece};
use crate::sampling::halton;

/// `|sin ∠(a, b)|` at or below which a pair is treated as parallel.
pub const PARALLEL_SIN: f64 = 1e-10;
/// Directions closer than this (after sign canonicalisation) share a
/// hyperplane family.
pub const FAMILY_TOL: f64 = 1e-12;
/// `|k t − round(k t)|` at or below which `t` counts as a lattice point in
/// one-sided evaluation.
const LATTICE_TOL: f64 = 1e-9;
/// Quasi-random points used for the empirical sup-norm error.
pub const SUP_SAMPLES: u64 = 10_000;

/// Which derivative the laminate controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Piecewise constant fields; the full gradient `Du` is measured.
    Bv,
    /// Piecewise rigid fields; the symmetric gradient `Eu` is measured.
    Bd,
}

impl Mode {
    pub fn jump_form(self) -> JumpForm {
        match self {
            Mode::Bv => JumpForm::Tensor,
            Mode::Bd => JumpForm::Symmetric,
        }
    }

    /// Schatten-1 in BV mode, symmetric Schatten-1 in BD mode.
    pub fn schatten_norm(self) -> NormKind {
        match self {
            Mode::Bv => NormKind::Schatten1,
            Mode::Bd => NormKind::Ssym,
        }
    }

    /// The mode's Schatten norm applied to a gradient matrix (its symmetric
    /// part in BD mode).
    pub fn target_norm(self, a: &Matrix) -> Result<f64> {
        self.schatten_norm().eval(a)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Bv => "bv",
            Mode::Bd => "bd",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bv" => Ok(Mode::Bv),
            "bd" => Ok(Mode::Bd),
            other => Err(Error::InvalidConfig(format!("unknown mode '{other}'"))),
        }
    }
}

/// `s_k(t) = ⌊k t⌋ / k`.
pub fn step_eval(k: u32, t: f64) -> f64 {
    let kf = k as f64;
    (kf * t).floor() / kf
}

/// One-sided limit of `s_k` at `t` approached from `side · (+∞)`: at a
/// lattice point `r/k` the value is `r/k` from above and `(r−1)/k` from
/// below. `side == 0` falls back to [`step_eval`].
pub fn step_eval_one_sided(k: u32, t: f64, side: f64) -> f64 {
    let kf = k as f64;
    let kt = kf * t;
    let r = kt.round();
    if (kt - r).abs() <= LATTICE_TOL && side != 0.0 {
        if side > 0.0 {
            r / kf
        } else {
            (r - 1.0) / kf
        }
    } else {
        kt.floor() / kf
    }
}

/// `c · s_k(d·x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaircaseTerm {
    pub coefficient: Vec<f64>,
    pub direction: Vec<f64>,
    pub k: u32,
}

impl StaircaseTerm {
    pub fn new(coefficient: Vec<f64>, direction: Vec<f64>, k: u32) -> Result<Self> {
        let len = norm(&direction);
        if (len - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitDirection(len));
        }
        if k == 0 {
            return Err(Error::InvalidConfig("lamination fineness k must be positive".into()));
        }
        Ok(StaircaseTerm {
            coefficient,
            direction,
            k,
        })
    }

    pub fn step(&self, x: &[f64]) -> f64 {
        step_eval(self.k, dot(&self.direction, x))
    }

    /// Step value approached from `x + ε side`.
    pub fn step_one_sided(&self, x: &[f64], side: &[f64]) -> f64 {
        let s = dot(&self.direction, side);
        let s = if s.abs() <= 1e-12 { 0.0 } else { s };
        step_eval_one_sided(self.k, dot(&self.direction, x), s)
    }
}

/// Jump hyperplanes `{d̂·x = ℓ/k}` shared by one or more terms, with the
/// summed coefficient `ĉ`: crossing a hyperplane in the `+d̂` direction
/// changes the field by `ĉ/k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperplaneFamily {
    pub direction: Vec<f64>,
    pub k: u32,
    pub coefficient: Vec<f64>,
}

impl HyperplaneFamily {
    pub fn spacing(&self) -> f64 {
        1.0 / self.k as f64
    }

    /// `(ĉ/k)⊗d̂` or `(ĉ/k)⊙d̂`.
    pub fn jump_matrix(&self, form: JumpForm) -> Matrix {
        form.matrix(&scale(&self.coefficient, self.spacing()), &self.direction)
    }

    /// `ĉ⊗d̂` or `ĉ⊙d̂`, the jump density per unit volume as `k → ∞`.
    pub fn density_matrix(&self, form: JumpForm) -> Matrix {
        form.matrix(&self.coefficient, &self.direction)
    }
}

/// Flips `d` so that its first entry of (near-)maximal magnitude is positive.
fn canonical_sign(d: &[f64]) -> f64 {
    let max = d.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let lead = d.iter().find(|x| x.abs() >= max - 1e-9).copied().unwrap_or(1.0);
    if lead < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Affine part plus staircase terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaircaseField {
    pub n: usize,
    pub m: usize,
    pub mode: Mode,
    pub k: u32,
    /// `M`: zero in BV mode, `A^skew` in BD mode.
    pub affine: Matrix,
    pub offset: Vec<f64>,
    pub terms: Vec<StaircaseTerm>,
}

impl StaircaseField {
    pub fn affine_value(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.affine.mul_vec(x);
        for (yi, bi) in y.iter_mut().zip(&self.offset) {
            *yi += bi;
        }
        y
    }

    /// `M x + b + Σ c s_k(d·x)`.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.affine_value(x);
        for t in &self.terms {
            axpy(&mut y, t.step(x), &t.coefficient);
        }
        y
    }

    /// Limit of [`Self::eval`] at `x` approached from the `side` direction.
    pub fn eval_one_sided(&self, x: &[f64], side: &[f64]) -> Vec<f64> {
        let mut y = self.affine_value(x);
        for t in &self.terms {
            axpy(&mut y, t.step_one_sided(x, side), &t.coefficient);
        }
        y
    }

    /// Terms grouped by coincident hyperplane families, in order of first
    /// appearance.
    pub fn families(&self) -> Vec<HyperplaneFamily> {
        let mut out: Vec<HyperplaneFamily> = Vec::new();
        for t in &self.terms {
            let sigma = canonical_sign(&t.direction);
            let d = scale(&t.direction, sigma);
            let c = scale(&t.coefficient, sigma);
            match out
                .iter_mut()
                .find(|f| f.k == t.k && norm(&sub(&f.direction, &d)) <= FAMILY_TOL)
            {
                Some(f) => axpy(&mut f.coefficient, 1.0, &c),
                None => out.push(HyperplaneFamily {
                    direction: d,
                    k: t.k,
                    coefficient: c,
                }),
            }
        }
        out
    }

    /// `Σ_terms |c| / k`, an upper bound on `|u_k − (A x + b)|` everywhere.
    pub fn sup_error_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| norm(&t.coefficient) / t.k as f64)
            .sum()
    }

    /// `Σ_families N(ĉ⊗/⊙d̂)`: the variation per unit volume as `k → ∞`.
    pub fn variation_density(&self, norm_kind: NormKind) -> Result<f64> {
        self.families()
            .iter()
            .map(|f| norm_kind.eval(&f.density_matrix(self.mode.jump_form())))
            .sum()
    }
}

/// Staircase terms for a symmetric piece `a⊙b`.
fn pair_terms(piece: &RankOnePiece, k: u32) -> Result<Vec<StaircaseTerm>> {
    let (a, b) = (&piece.left, &piece.right);
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Ok(Vec::new());
    }
    let b_hat = scale(b, 1.0 / nb);
    let mut r = a.clone();
    axpy(&mut r, -dot(a, &b_hat), &b_hat);
    if norm(&r) <= PARALLEL_SIN * na {
        return Ok(vec![StaircaseTerm::new(scale(&b_hat, dot(a, b)), b_hat, k)?]);
    }
    let a_hat = normalized(a).expect("nonzero");
    Ok(vec![
        StaircaseTerm::new(scale(a, nb / 2.0), b_hat, k)?,
        StaircaseTerm::new(scale(b, na / 2.0), a_hat, k)?,
    ])
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidConfig("lamination fineness k must be positive".into()));
    }
    Ok(())
}

fn check_offset(a: &Matrix, b: &[f64]) -> Result<()> {
    if b.len() != a.rows() {
        return Err(Error::dims(format!("offset of length {}", a.rows()), format!("{}", b.len())));
    }
    Ok(())
}

/// BV laminate `Σ s_i s_k(x·v_i) R v_i + b`.
pub fn build_bv_laminate(a: &Matrix, b: &[f64], k: u32) -> Result<StaircaseField> {
    check_k(k)?;
    check_offset(a, b)?;
    let terms = bv_decompose(a)
        .pieces
        .into_iter()
        .map(|p| StaircaseTerm::new(p.left, p.right, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(StaircaseField {
        n: a.cols(),
        m: a.rows(),
        mode: Mode::Bv,
        k,
        affine: Matrix::zeros(a.rows(), a.cols()),
        offset: b.to_vec(),
        terms,
    })
}

/// BD laminate `v_k(x) + A^skew x + b` built from [`bd_decompose`] of
/// `A^sym`.
pub fn build_bd_laminate(a: &Matrix, b: &[f64], k: u32) -> Result<StaircaseField> {
    let sym = SymMatrix::from_matrix(a)?;
    build_bd_laminate_from(&bd_decompose(&sym), &a.skew_part(), b, k)
}

/// BD laminate from a given symmetric decomposition of `A^sym` and the skew
/// part `A^skew`.
pub fn build_bd_laminate_from(
    decomposition: &Decomposition,
    skew: &Matrix,
    b: &[f64],
    k: u32,
) -> Result<StaircaseField> {
    check_k(k)?;
    check_offset(skew, b)?;
    if !skew.is_square() || skew.rows() != decomposition.target.rows() {
        return Err(Error::dims(
            format!("{0}x{0} skew part", decomposition.target.rows()),
            format!("{}x{}", skew.rows(), skew.cols()),
        ));
    }
    let mut terms = Vec::new();
    for piece in &decomposition.pieces {
        terms.extend(pair_terms(piece, k)?);
    }
    Ok(StaircaseField {
        n: skew.cols(),
        m: skew.rows(),
        mode: Mode::Bd,
        k,
        affine: skew.clone(),
        offset: b.to_vec(),
        terms,
    })
}

/// `Σ_ℓ H^{n−1}(open cell ∩ {d·x = ℓ/k})`.
pub fn lattice_slice_total(cell: &Simplex, d: &[f64], k: u32) -> Result<f64> {
    let kf = k as f64;
    let (lo, hi) = cell.support(d);
    let mut total = 0.0;
    for l in (lo * kf).floor() as i64..=(hi * kf).ceil() as i64 {
        total += slice_measure_open(cell, d, l as f64 / kf)?;
    }
    Ok(total)
}

/// Variation of the field's jump measure inside the open `cell` under
/// `norm_kind`: jump matrices of coincident hyperplanes are summed before
/// the norm is applied. Jumps on the cell boundary are not included.
pub fn variation_on_cell(field: &StaircaseField, cell: &Simplex, norm_kind: NormKind) -> Result<f64> {
    variation_by_family(field, cell, &[norm_kind]).map(|v| v[0])
}

fn variation_by_family(
    field: &StaircaseField,
    cell: &Simplex,
    norms: &[NormKind],
) -> Result<Vec<f64>> {
    if cell.dim() != field.n {
        return Err(Error::dims(format!("{}-simplex", field.n), format!("{}-simplex", cell.dim())));
    }
    let form = field.mode.jump_form();
    let mut out = vec![0.0; norms.len()];
    for fam in field.families() {
        let jump = fam.jump_matrix(form);
        let measure = lattice_slice_total(cell, &fam.direction, fam.k)?;
        if measure == 0.0 {
            continue;
        }
        for (o, nk) in out.iter_mut().zip(norms) {
            *o += nk.eval(&jump)? * measure;
        }
    }
    Ok(out)
}

/// Per-region breakdown of a laminate's variation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionVariation {
    pub index: usize,
    pub k: u32,
    pub volume: f64,
    pub frobenius: f64,
    pub schatten1: f64,
    /// Present for square fields.
    pub ssym: Option<f64>,
    pub interface: f64,
    pub sup_error: f64,
}

impl RegionVariation {
    pub fn get(&self, norm_kind: NormKind) -> Option<f64> {
        match norm_kind {
            NormKind::Frobenius => Some(self.frobenius),
            NormKind::Schatten1 => Some(self.schatten1),
            NormKind::Ssym => self.ssym,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VariationReport {
    pub regions: Vec<RegionVariation>,
}

impl VariationReport {
    pub fn total(&self, norm_kind: NormKind) -> Option<f64> {
        self.regions.iter().map(|r| r.get(norm_kind)).sum()
    }

    pub fn interface_total(&self) -> f64 {
        self.regions.iter().map(|r| r.interface).sum()
    }

    pub fn volume(&self) -> f64 {
        self.regions.iter().map(|r| r.volume).sum()
    }
}

/// Variation of `field` on `cell` under every applicable norm.
pub fn region_variation(field: &StaircaseField, cell: &Simplex, index: usize) -> Result<RegionVariation> {
    let square = field.n == field.m;
    let norms: Vec<NormKind> = if square {
        NormKind::ALL.to_vec()
    } else {
        vec![NormKind::Frobenius, NormKind::Schatten1]
    };
    let v = variation_by_family(field, cell, &norms)?;
    Ok(RegionVariation {
        index,
        k: field.k,
        volume: cell.volume(),
        frobenius: v[0],
        schatten1: v[1],
        ssym: square.then(|| v[2]),
        interface: 0.0,
        sup_error: field.sup_error_bound(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupError {
    /// `Σ |c| / k`.
    pub bound: f64,
    /// Largest `|u_k(x) − (A x + b)|` over quasi-random points of the region.
    pub empirical: f64,
}

/// Analytic and sampled sup-norm distance between the laminate and
/// `x ↦ A x + b` on `region`.
pub fn sup_error(field: &StaircaseField, a: &Matrix, b: &[f64], region: &Simplex) -> SupError {
    let target = |x: &[f64]| {
        let mut y = a.mul_vec(x);
        for (yi, bi) in y.iter_mut().zip(b) {
            *yi += bi;
        }
        y
    };
    let mut empirical: f64 = 0.0;
    for i in 0..SUP_SAMPLES {
        let x = region.point_from_unit(&halton(i, region.dim()));
        empirical = empirical.max(norm(&sub(&field.eval(&x), &target(&x))));
    }
    SupError {
        bound: field.sup_error_bound(),
        empirical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::ssym;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn unit_half() -> Simplex {
        Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(step_eval(4, 0.3), 0.25);
        assert_eq!(step_eval(7, 0.0), 0.0);
        assert_eq!(step_eval(2, -0.3), -0.5);
        assert_eq!(step_eval_one_sided(4, 0.5, 1.0), 0.5);
        assert_eq!(step_eval_one_sided(4, 0.5, -1.0), 0.25);
        assert_eq!(step_eval_one_sided(4, 0.3, -1.0), 0.25);
    }

    #[test]
    fn bv_laminate_examples() {
        let f = build_bv_laminate(&Matrix::identity(2), &[0.0, 0.0], 8).unwrap();
        assert_eq!(f.terms.len(), 2);
        for t in &f.terms {
            assert!(t.direction.iter().filter(|x| x.abs() == 1.0).count() == 1);
        }
        let f4 = build_bv_laminate(&Matrix::identity(2), &[0.0, 0.0], 4).unwrap();
        let y = f4.eval(&[0.3, 0.6]);
        assert!((y[0] - 0.25).abs() < 1e-15 && (y[1] - 0.5).abs() < 1e-15);

        let ab = Matrix::outer(&[1.0, 2.0], &[0.6, 0.8]);
        assert_eq!(build_bv_laminate(&ab, &[0.0, 0.0], 8).unwrap().terms.len(), 1);

        let z = build_bv_laminate(&Matrix::zeros(2, 3), &[1.0, -1.0], 8).unwrap();
        assert!(z.terms.is_empty());
        assert_eq!(z.eval(&[0.3, 0.2, 0.1]), vec![1.0, -1.0]);
    }

    #[test]
    fn bd_laminate_examples() {
        let f = build_bd_laminate(&Matrix::identity(2), &[0.0, 0.0], 8).unwrap();
        assert_eq!(f.terms.len(), 2);

        let f = build_bd_laminate(&Matrix::diag(&[1.0, -1.0]), &[0.0, 0.0], 8).unwrap();
        assert_eq!(f.terms.len(), 2);
        let mut dirs: Vec<Vec<f64>> = f
            .families()
            .into_iter()
            .map(|fam| fam.direction.iter().map(|x| x * SQRT2).collect())
            .collect();
        dirs.sort_by(|a, b| a[1].total_cmp(&b[1]));
        assert!(norm(&sub(&dirs[0], &[1.0, -1.0])) < 1e-12);
        assert!(norm(&sub(&dirs[1], &[1.0, 1.0])) < 1e-12);

        let skew = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let f = build_bd_laminate(&skew, &[0.5, 0.0], 8).unwrap();
        assert!(f.terms.is_empty());
        assert_eq!(f.eval(&[1.0, 2.0]), vec![-1.5, 1.0]);
    }

    #[test]
    fn eval_without_terms_is_affine() {
        let skew = Matrix::from_rows(&[vec![0.0, 2.0], vec![-2.0, 0.0]]).unwrap();
        let f = build_bd_laminate(&skew, &[1.0, 1.0], 3).unwrap();
        assert_eq!(f.eval(&[0.5, 0.25]), f.affine_value(&[0.5, 0.25]));
    }

    #[test]
    fn laminate_limits_reproduce_the_matrix() {
        let a = Matrix::from_rows(&[vec![0.3, -1.1, 0.2], vec![0.7, 0.1, -0.4], vec![0.0, 0.5, 0.9]])
            .unwrap();
        let mut limit = Matrix::zeros(3, 3);
        for t in &build_bd_laminate(&a, &[0.0; 3], 1).unwrap().terms {
            limit = limit.add(&Matrix::outer(&t.coefficient, &t.direction));
        }
        assert!(limit.symmetric_part().sub(&a.symmetric_part()).frobenius_norm() < 1e-12);
        let mut limit = Matrix::zeros(3, 3);
        for t in &build_bv_laminate(&a, &[0.0; 3], 1).unwrap().terms {
            limit = limit.add(&Matrix::outer(&t.coefficient, &t.direction));
        }
        assert!(limit.sub(&a).frobenius_norm() < 1e-12);
    }

    #[test]
    fn variation_examples() {
        let cell = unit_half();
        let f = build_bd_laminate(&Matrix::identity(2), &[0.0, 0.0], 512).unwrap();
        let s = variation_on_cell(&f, &cell, NormKind::Ssym).unwrap();
        let fr = variation_on_cell(&f, &cell, NormKind::Frobenius).unwrap();
        assert!((s - 2.0 * 0.5).abs() < 4.0 / 512.0);
        assert!((fr - s).abs() <= 1e-12);

        let single = StaircaseField {
            n: 2,
            m: 2,
            mode: Mode::Bv,
            k: 256,
            affine: Matrix::zeros(2, 2),
            offset: vec![0.0, 0.0],
            terms: vec![StaircaseTerm::new(vec![3.0, 4.0], vec![0.6, 0.8], 256).unwrap()],
        };
        let v = variation_on_cell(&single, &cell, NormKind::Schatten1).unwrap();
        assert!((v - 5.0 * 0.5).abs() < 0.05);
    }

    #[test]
    fn coincident_terms_are_aggregated() {
        let mk = |c: Vec<f64>, d: Vec<f64>| StaircaseTerm::new(c, d, 4).unwrap();
        let f = StaircaseField {
            n: 2,
            m: 2,
            mode: Mode::Bv,
            k: 4,
            affine: Matrix::zeros(2, 2),
            offset: vec![0.0, 0.0],
            terms: vec![
                mk(vec![1.0, 0.0], vec![1.0, 0.0]),
                mk(vec![-1.0, 0.0], vec![1.0, 0.0]),
                mk(vec![0.0, 1.0], vec![-1.0, 0.0]),
            ],
        };
        let fams = f.families();
        assert_eq!(fams.len(), 1);
        assert_eq!(fams[0].coefficient, vec![0.0, -1.0]);
    }

    #[test]
    fn sup_error_examples() {
        let cell = unit_half();
        let a = Matrix::identity(2);
        let f8 = build_bd_laminate(&a, &[0.0, 0.0], 8).unwrap();
        let f16 = build_bd_laminate(&a, &[0.0, 0.0], 16).unwrap();
        let e8 = sup_error(&f8, &a, &[0.0, 0.0], &cell);
        let e16 = sup_error(&f16, &a, &[0.0, 0.0], &cell);
        assert!((e8.bound - 0.25).abs() < 1e-15);
        assert_eq!(e16.bound * 2.0, e8.bound);
        assert!(e8.empirical <= e8.bound);
        let z = build_bv_laminate(&Matrix::zeros(2, 2), &[0.0, 0.0], 8).unwrap();
        assert_eq!(sup_error(&z, &Matrix::zeros(2, 2), &[0.0, 0.0], &cell).bound, 0.0);
    }

    #[test]
    fn density_matches_ssym() {
        let a = Matrix::from_rows(&[vec![0.2, 0.9], vec![-0.3, -0.7]]).unwrap();
        let f = build_bd_laminate(&a, &[0.0, 0.0], 1).unwrap();
        let d = f.variation_density(NormKind::Ssym).unwrap();
        assert!((d - ssym(&SymMatrix::from_matrix(&a).unwrap())).abs() < 1e-10);
    }
}
