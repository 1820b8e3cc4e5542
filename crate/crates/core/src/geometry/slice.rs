use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, normalized};
use crate::sampling::halton;

use super::polytope::ConvexPolytope;
use super::simplex::Simplex;

/// Allowed deviation of a direction from unit length.
pub const UNIT_TOL: f64 = 1e-12;
/// Vertices within this distance (relative to the cell diameter) of a
/// hyperplane count as lying on it.
const ON_PLANE_REL: f64 = 1e-12;
/// Relative offset nudge, in units of the lattice spacing.
const NUDGE: f64 = 1e-9;

pub(crate) fn check_unit(d: &[f64]) -> Result<()> {
    let len = norm(d);
    if (len - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitDirection(len));
    }
    Ok(())
}

/// `cell ∩ {x·d = offset}` as a convex polytope, or `None` when the
/// hyperplane misses the closed cell.
pub fn slice_polytope(cell: &Simplex, d: &[f64], offset: f64) -> Result<Option<ConvexPolytope>> {
    check_unit(d)?;
    if d.len() != cell.dim() {
        return Err(Error::dims(format!("direction of length {}", cell.dim()), format!("{}", d.len())));
    }
    let tol = ON_PLANE_REL * cell.diameter();
    let s: Vec<f64> = cell.vertices().iter().map(|v| dot(d, v) - offset).collect();
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (i, &si) in s.iter().enumerate() {
        if si.abs() <= tol {
            points.push(cell.vertex(i).to_vec());
        }
    }
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let (si, sj) = (s[i], s[j]);
            if si.abs() > tol && sj.abs() > tol && (si < 0.0) != (sj < 0.0) {
                let t = si / (si - sj);
                let (vi, vj) = (cell.vertex(i), cell.vertex(j));
                points.push(vi.iter().zip(vj).map(|(a, b)| a + t * (b - a)).collect());
            }
        }
    }
    if points.is_empty() {
        return Ok(None);
    }
    ConvexPolytope::hull(&points).map(Some)
}

/// `(n−1)`-dimensional measure of `cell ∩ {x·d = offset}` for the closed
/// cell. A hyperplane containing a facet returns that facet's measure.
pub fn slice_measure(cell: &Simplex, d: &[f64], offset: f64) -> Result<f64> {
    Ok(slice_polytope(cell, d, offset)?
        .map_or(0.0, |p| p.measure_in(cell.dim() - 1)))
}

/// Like [`slice_measure`], but for the open cell: zero unless the
/// hyperplane has vertices strictly on both sides.
pub fn slice_measure_open(cell: &Simplex, d: &[f64], offset: f64) -> Result<f64> {
    check_unit(d)?;
    let tol = ON_PLANE_REL * cell.diameter();
    let s = cell.vertices().iter().map(|v| dot(d, v) - offset);
    let (mut below, mut above) = (false, false);
    for si in s {
        below |= si < -tol;
        above |= si > tol;
    }
    if below && above {
        slice_measure(cell, d, offset)
    } else {
        Ok(0.0)
    }
}

/// Orthonormal basis of `d^⊥`.
pub fn tangent_basis(d: &[f64]) -> Vec<Vec<f64>> {
    let n = d.len();
    let mut basis: Vec<Vec<f64>> = vec![d.to_vec()];
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&e, b);
                axpy(&mut e, -c, b);
            }
        }
        if norm(&e) > 1e-6 {
            basis.push(normalized(&e).expect("nonzero"));
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Hit-or-miss estimate of [`slice_measure`]: `samples` Halton points in
/// the bounding box of the cell's projection onto the hyperplane, tested for
/// membership in the cell. Works in any dimension `n ≤ 9`.
pub fn slice_measure_mc(cell: &Simplex, d: &[f64], offset: f64, samples: usize) -> Result<f64> {
    check_unit(d)?;
    let n = cell.dim();
    let (lo_t, hi_t) = cell.support(d);
    if offset < lo_t || offset > hi_t {
        return Ok(0.0);
    }
    let tangents = tangent_basis(d);
    let mut lo = vec![f64::INFINITY; n - 1];
    let mut hi = vec![f64::NEG_INFINITY; n - 1];
    for v in cell.vertices() {
        for (k, t) in tangents.iter().enumerate() {
            let c = dot(v, t);
            lo[k] = lo[k].min(c);
            hi[k] = hi[k].max(c);
        }
    }
    let box_measure: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    if box_measure == 0.0 || samples == 0 {
        return Ok(0.0);
    }
    let tol = 1e-12;
    let mut hits = 0usize;
    for i in 0..samples as u64 {
        let u = halton(i, n - 1);
        let mut x: Vec<f64> = d.iter().map(|di| di * offset).collect();
        for k in 0..n - 1 {
            axpy(&mut x, lo[k] + u[k] * (hi[k] - lo[k]), &tangents[k]);
        }
        if cell.contains(&x, tol) {
            hits += 1;
        }
    }
    Ok(box_measure * hits as f64 / samples as f64)
}

/// `Σ_ℓ (1/k) · slice_measure(cell, d, ℓ/k)` over all integers `ℓ`. An offset
/// passing within `1e-12` of a vertex is shifted by `1e-9/k`.
pub fn coarea_sum(cell: &Simplex, d: &[f64], k: u32) -> Result<f64> {
    check_unit(d)?;
    if k == 0 {
        return Err(Error::InvalidConfig("lamination fineness k must be positive".into()));
    }
    let kf = k as f64;
    let spacing = 1.0 / kf;
    let (lo, hi) = cell.support(d);
    let tol = ON_PLANE_REL * cell.diameter().max(1.0);
    let mut total = 0.0;
    for l in (lo * kf).floor() as i64 - 1..=(hi * kf).ceil() as i64 + 1 {
        let mut offset = l as f64 * spacing;
        if cell.vertices().iter().any(|v| (dot(d, v) - offset).abs() <= tol) {
            offset += NUDGE * spacing;
        }
        total += spacing * slice_measure(cell, d, offset)?;
    }
    Ok(total)
}
