use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sub, Matrix};
use crate::norms::NormKind;
use crate::sampling::halton;

use super::polytope::ConvexPolytope;

/// Hyperplanes `{x·direction = ℓ·spacing : ℓ ∈ Z}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutFamily {
    pub direction: Vec<f64>,
    pub spacing: f64,
}

/// How a jump vector `w` combines with the face normal `ν`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum JumpForm {
    /// `w⊗ν`
    Tensor,
    /// `w⊙ν`
    Symmetric,
}

impl JumpForm {
    pub fn matrix(self, w: &[f64], nu: &[f64]) -> Matrix {
        let t = Matrix::outer(w, nu);
        match self {
            JumpForm::Tensor => t,
            JumpForm::Symmetric => t.symmetric_part(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FaceIntegral {
    pub value: f64,
    /// Number of sub-cells of the partition (samples when estimated).
    pub subcells: usize,
    /// Standard error when the Monte-Carlo fallback was used.
    pub std_error: Option<f64>,
}

/// Maximum number of sub-cells before falling back to sampling.
pub const SUBCELL_CAP: usize = 100_000;
const FALLBACK_SAMPLES: u64 = 20_000;
/// Directions whose tangential part is below this are parallel to the face.
const PARALLEL_TOL: f64 = 1e-12;

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// `∫_face N(jump(x) ⊗/⊙ ν) dH^{n−1}`, with the face partitioned by every
/// hyperplane of `cuts` so the integrand is smooth on each sub-cell.
///
/// Segments (`n = 2`) are split at all breakpoints and integrated with
/// five-point Gauss–Legendre per piece. Polygons (`n = 3`) are split by
/// convex clipping and integrated with a seven-point degree-five rule per
/// fan triangle. Beyond [`SUBCELL_CAP`] pieces the integral is estimated by
/// quasi-random sampling and a standard error is reported.
pub fn face_partition_integral(
    face: &ConvexPolytope,
    normal: &[f64],
    cuts: &[CutFamily],
    jump: &dyn Fn(&[f64]) -> Vec<f64>,
    norm_kind: NormKind,
    form: JumpForm,
) -> Result<FaceIntegral> {
    let n = face.ambient_dim();
    if face.affine_dim() + 1 != n {
        return Err(Error::NotCodimensionOne {
            expected: n.saturating_sub(1),
            found: face.affine_dim(),
        });
    }
    if normal.len() != n {
        return Err(Error::dims(format!("normal of length {n}"), format!("{}", normal.len())));
    }
    let integrand = |x: &[f64]| norm_kind.eval(&form.matrix(&jump(x), normal));
    match n {
        2 => segment_integral(face, cuts, &integrand),
        3 => polygon_integral(face, normal, cuts, &integrand),
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

fn segment_integral(
    face: &ConvexPolytope,
    cuts: &[CutFamily],
    f: &dyn Fn(&[f64]) -> Result<f64>,
) -> Result<FaceIntegral> {
    let (p, q) = (&face.vertices()[0], &face.vertices()[1]);
    let e = sub(q, p);
    let len = norm(&e);
    let mut breaks = vec![0.0, 1.0];
    for fam in cuts {
        let slope = dot(&fam.direction, &e);
        if slope.abs() <= PARALLEL_TOL * len {
            continue;
        }
        let (t0, t1) = (dot(&fam.direction, p), dot(&fam.direction, q));
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        let first = (lo / fam.spacing).ceil() as i64;
        let last = (hi / fam.spacing).floor() as i64;
        for l in first..=last {
            let s = (l as f64 * fam.spacing - t0) / slope;
            if s > 0.0 && s < 1.0 {
                breaks.push(s);
            }
        }
        if breaks.len() > SUBCELL_CAP {
            return sampled(face, f);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
    let mut value = 0.0;
    let mut x = vec![0.0; p.len()];
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        if half <= 0.0 {
            continue;
        }
        let mid = 0.5 * (a + b);
        let mut piece = 0.0;
        for (node, weight) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
            let s = mid + half * node;
            for i in 0..x.len() {
                x[i] = p[i] + s * e[i];
            }
            piece += weight * f(&x)?;
        }
        value += piece * half * len;
    }
    Ok(FaceIntegral {
        value,
        subcells: breaks.len() - 1,
        std_error: None,
    })
}

type Polygon = Vec<Vec<f64>>;

/// Splits an ordered convex polygon by `{x·d = c}` into the parts below and
/// above; empty parts are `None`.
fn split_polygon(
    poly: &[Vec<f64>],
    d: &[f64],
    c: f64,
) -> (Option<Polygon>, Option<Polygon>) {
    let s: Vec<f64> = poly.iter().map(|p| dot(d, p) - c).collect();
    let mut below = Vec::new();
    let mut above = Vec::new();
    for i in 0..poly.len() {
        let j = (i + 1) % poly.len();
        let (si, sj) = (s[i], s[j]);
        if si <= 0.0 {
            below.push(poly[i].clone());
        }
        if si >= 0.0 {
            above.push(poly[i].clone());
        }
        if (si < 0.0 && sj > 0.0) || (si > 0.0 && sj < 0.0) {
            let t = si / (si - sj);
            let x: Vec<f64> = poly[i]
                .iter()
                .zip(&poly[j])
                .map(|(a, b)| a + t * (b - a))
                .collect();
            below.push(x.clone());
            above.push(x);
        }
    }
    let keep = |v: Vec<Vec<f64>>| (v.len() >= 3).then_some(v);
    (keep(below), keep(above))
}

fn triangle_area(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let (u, v) = (sub(b, a), sub(c, a));
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    0.5 * norm(&cross)
}

fn triangle_rule() -> [([f64; 3], f64); 7] {
    let r15 = 15f64.sqrt();
    let (a1, b1, w1) = ((9.0 - 2.0 * r15) / 21.0, (6.0 + r15) / 21.0, (155.0 + r15) / 1200.0);
    let (a2, b2, w2) = ((9.0 + 2.0 * r15) / 21.0, (6.0 - r15) / 21.0, (155.0 - r15) / 1200.0);
    let third = 1.0 / 3.0;
    [
        ([third, third, third], 0.225),
        ([a1, b1, b1], w1),
        ([b1, a1, b1], w1),
        ([b1, b1, a1], w1),
        ([a2, b2, b2], w2),
        ([b2, a2, b2], w2),
        ([b2, b2, a2], w2),
    ]
}

fn polygon_integral(
    face: &ConvexPolytope,
    normal: &[f64],
    cuts: &[CutFamily],
    f: &dyn Fn(&[f64]) -> Result<f64>,
) -> Result<FaceIntegral> {
    let scale = face.measure().sqrt();
    let mut polys: Vec<Vec<Vec<f64>>> = vec![face.vertices().to_vec()];
    for fam in cuts {
        let along = dot(&fam.direction, normal);
        let tangential = (1.0 - along * along).max(0.0).sqrt();
        if tangential <= PARALLEL_TOL {
            continue;
        }
        let mut next = Vec::with_capacity(polys.len());
        for poly in polys {
            let (lo, hi) = poly
                .iter()
                .map(|p| dot(&fam.direction, p))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), t| (a.min(t), b.max(t)));
            let first = (lo / fam.spacing).ceil() as i64;
            let last = (hi / fam.spacing).floor() as i64;
            let mut rest = Some(poly);
            for l in first..=last {
                let c = l as f64 * fam.spacing;
                if c <= lo + 1e-14 * scale || c >= hi - 1e-14 * scale {
                    continue;
                }
                let Some(cur) = rest.take() else { break };
                let (below, above) = split_polygon(&cur, &fam.direction, c);
                next.extend(below);
                rest = above;
            }
            next.extend(rest);
            if next.len() > SUBCELL_CAP {
                return sampled(face, f);
            }
        }
        polys = next;
    }
    let rule = triangle_rule();
    let mut value = 0.0;
    let mut x = vec![0.0; 3];
    for poly in &polys {
        let p0 = &poly[0];
        for w in poly[1..].windows(2) {
            let (p1, p2) = (&w[0], &w[1]);
            let area = triangle_area(p0, p1, p2);
            if area == 0.0 {
                continue;
            }
            let mut piece = 0.0;
            for (bary, weight) in &rule {
                for i in 0..3 {
                    x[i] = bary[0] * p0[i] + bary[1] * p1[i] + bary[2] * p2[i];
                }
                piece += weight * f(&x)?;
            }
            value += piece * area;
        }
    }
    Ok(FaceIntegral {
        value,
        subcells: polys.len(),
        std_error: None,
    })
}

/// Quasi-random estimate over the face (a segment or a fan of triangles).
fn sampled(face: &ConvexPolytope, f: &dyn Fn(&[f64]) -> Result<f64>) -> Result<FaceIntegral> {
    let v = face.vertices();
    let measure = face.measure();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let tris: Vec<(usize, f64)> = if face.affine_dim() == 1 {
        vec![(0, measure)]
    } else {
        (1..v.len() - 1)
            .map(|i| (i, triangle_area(&v[0], &v[i], &v[i + 1])))
            .collect()
    };
    for i in 0..FALLBACK_SAMPLES {
        let u = halton(i, 2);
        let x: Vec<f64> = if face.affine_dim() == 1 {
            v[0].iter().zip(&v[1]).map(|(a, b)| a + u[0] * (b - a)).collect()
        } else {
            let mut pick = u[1] * measure;
            let mut tri = tris[tris.len() - 1].0;
            for &(t, a) in &tris {
                if pick < a {
                    tri = t;
                    break;
                }
                pick -= a;
            }
            let (mut r, mut s) = (u[0], (pick / tris[tri - 1].1).clamp(0.0, 1.0));
            if r + s > 1.0 {
                r = 1.0 - r;
                s = 1.0 - s;
            }
            (0..3)
                .map(|k| v[0][k] + r * (v[tri][k] - v[0][k]) + s * (v[tri + 1][k] - v[0][k]))
                .collect()
        };
        let y = f(&x)? * measure;
        sum += y;
        sum_sq += y * y;
    }
    let n = FALLBACK_SAMPLES as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(FaceIntegral {
        value: mean,
        subcells: FALLBACK_SAMPLES as usize,
        std_error: Some((var / n).sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment() -> ConvexPolytope {
        ConvexPolytope::hull(&[vec![0.5, 0.0], vec![0.5, 1.0]]).unwrap()
    }

    #[test]
    fn zero_jump_gives_zero() {
        let cuts = vec![CutFamily {
            direction: vec![0.0, 1.0],
            spacing: 0.1,
        }];
        let r = face_partition_integral(
            &segment(),
            &[1.0, 0.0],
            &cuts,
            &|_| vec![0.0, 0.0],
            NormKind::Frobenius,
            JumpForm::Tensor,
        )
        .unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.subcells, 10);
    }

    #[test]
    fn constant_jump_scales_with_length() {
        let h = [0.3, -0.4];
        let r = face_partition_integral(
            &segment(),
            &[1.0, 0.0],
            &[],
            &|_| h.to_vec(),
            NormKind::Ssym,
            JumpForm::Symmetric,
        )
        .unwrap();
        let expected = JumpForm::Symmetric.matrix(&h, &[1.0, 0.0]).frobenius_norm();
        assert!((r.value - expected).abs() < 1e-12);
    }

    #[test]
    fn staircase_jump_is_integrated_piecewise() {
        // jump s_4(y) - y along x = 0.5 integrates to 1/8 in absolute value
        let cuts = vec![CutFamily {
            direction: vec![0.0, 1.0],
            spacing: 0.25,
        }];
        let r = face_partition_integral(
            &segment(),
            &[1.0, 0.0],
            &cuts,
            &|x| vec![(4.0 * x[1]).floor() / 4.0 - x[1], 0.0],
            NormKind::Frobenius,
            JumpForm::Tensor,
        )
        .unwrap();
        assert!((r.value - 0.125).abs() < 1e-14);
    }

    #[test]
    fn triangle_face_in_3d() {
        let tri = ConvexPolytope::hull(&[
            vec![0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let cuts = vec![
            CutFamily { direction: vec![0.0, 1.0, 0.0], spacing: 0.125 },
            CutFamily { direction: vec![1.0, 0.0, 0.0], spacing: 0.125 },
        ];
        let r = face_partition_integral(
            &tri,
            &[1.0, 0.0, 0.0],
            &cuts,
            &|x| vec![(8.0 * x[1]).floor() / 8.0 - x[1], 0.0, 0.0],
            NormKind::Frobenius,
            JumpForm::Tensor,
        )
        .unwrap();
        // ∫_0^1 (1 − y) frac(8y)/8 dy = 23/768
        assert!((r.value - 23.0 / 768.0).abs() < 1e-12, "{}", r.value);
        assert!(r.subcells >= 8);
    }

    #[test]
    fn wrong_dimension_face_is_rejected() {
        let pt = ConvexPolytope::hull(&[vec![0.5, 0.5]]).unwrap();
        assert!(matches!(
            face_partition_integral(&pt, &[1.0, 0.0], &[], &|_| vec![0.0], NormKind::Frobenius, JumpForm::Tensor),
            Err(Error::NotCodimensionOne { .. })
        ));
    }
}
