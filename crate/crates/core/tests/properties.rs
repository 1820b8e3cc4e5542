use proptest::prelude::*;

use laminate::geometry::{coarea_sum, freudenthal_mesh, interpolate, BoxDomain, Simplex};
use laminate::laminate::{build_bd_laminate, build_bv_laminate, step_eval, Mode};
use laminate::linalg::{norm, sub, Spectrum};
use laminate::norms::{frobenius, schatten1, schatten_inf, ssym};
use laminate::rank_one::{bd_decompose, bd_decompose_spectrum, bv_decompose};
use laminate::sampling::{random_orthogonal, rng};
use laminate::{Matrix, NormKind, SymMatrix};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-3.0..3.0f64, rows * cols)
        .prop_map(move |d| Matrix::from_row_major(rows, cols, d).unwrap())
}

fn any_matrix() -> impl Strategy<Value = Matrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(m, n)| matrix(m, n))
}

fn sym(n: usize) -> impl Strategy<Value = SymMatrix> {
    matrix(n, n).prop_map(|a| SymMatrix::from_matrix(&a.symmetric_part()).unwrap())
}

fn any_sym() -> impl Strategy<Value = SymMatrix> {
    (1usize..=5).prop_flat_map(sym)
}

fn square_pair() -> impl Strategy<Value = (Matrix, Matrix)> {
    (1usize..=4).prop_flat_map(|n| (matrix(n, n), matrix(n, n)))
}

fn to_sym(a: &Matrix) -> SymMatrix {
    SymMatrix::from_matrix(&a.symmetric_part()).unwrap()
}

fn tol(x: f64) -> f64 {
    1e-9 * (1.0 + x.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn norm_ordering(a in any_matrix()) {
        let rank = a.rows().min(a.cols()) as f64;
        let (f, s1, inf) = (frobenius(&a), schatten1(&a), schatten_inf(&a));
        prop_assert!(inf <= f + tol(f));
        prop_assert!(f <= s1 + tol(s1));
        prop_assert!(s1 <= rank.sqrt() * f + tol(s1));
    }

    #[test]
    fn ssym_between_frobenius_and_nuclear(a in any_sym()) {
        let (f, s, n) = (frobenius(a.as_matrix()), ssym(&a), schatten1(a.as_matrix()));
        prop_assert!(f <= s + tol(s));
        prop_assert!(s <= n + tol(n));
    }

    #[test]
    fn norm_axioms((a, b) in square_pair(), t in -4.0..4.0f64) {
        for kind in NormKind::ALL {
            let eval = |m: &Matrix| kind.eval(m).unwrap();
            let (na, nb, nab) = (eval(&a), eval(&b), eval(&a.add(&b)));
            prop_assert!(nab <= na + nb + tol(na + nb), "{kind}");
            prop_assert!((eval(&a.scaled(t)) - t.abs() * na).abs() <= tol(na), "{kind}");
            prop_assert!(na >= 0.0);
        }
    }

    #[test]
    fn unitary_invariance(a in matrix(3, 3), seed in any::<u64>()) {
        let mut r = rng(seed, 0);
        let (q, p) = (random_orthogonal(&mut r, 3), random_orthogonal(&mut r, 3));
        let s1 = schatten1(&a);
        prop_assert!((schatten1(&q.matmul(&a).matmul(&p)) - s1).abs() <= tol(s1));
        let s = to_sym(&a);
        let rotated = s.congruence(&q);
        prop_assert!((ssym(&rotated) - ssym(&s)).abs() <= tol(ssym(&s)));
    }

    #[test]
    fn bd_decomposition_identity(a in any_sym()) {
        let d = bd_decompose(&a);
        let s = ssym(&a);
        prop_assert!((d.cost() - s).abs() <= tol(s));
        prop_assert!(d.reconstructs(1e-10));
        prop_assert!(d.pieces.iter().all(|p| p.symmetric));
    }

    #[test]
    fn bv_decomposition_identity(a in any_matrix()) {
        let d = bv_decompose(&a);
        let s = schatten1(&a);
        prop_assert!((d.cost() - s).abs() <= tol(s));
        prop_assert!(d.reconstructs(1e-10));
    }

    #[test]
    fn degenerate_eigenbasis_choice_is_irrelevant(
        l in -3.0..3.0f64,
        m in -3.0..3.0f64,
        theta in 0.0..std::f64::consts::TAU,
        seed in any::<u64>(),
    ) {
        let q = random_orthogonal(&mut rng(seed, 1), 3);
        let (c, s) = (theta.cos(), theta.sin());
        let turn = Matrix::from_rows(&[
            vec![c, -s, 0.0],
            vec![s, c, 0.0],
            vec![0.0, 0.0, 1.0],
        ]).unwrap();
        let values = vec![l, l, m];
        let a = Spectrum::from_parts(values.clone(), q.clone()).unwrap();
        let b = Spectrum::from_parts(values, q.matmul(&turn)).unwrap();
        let (da, db) = (bd_decompose_spectrum(&a), bd_decompose_spectrum(&b));
        prop_assert!((da.cost() - db.cost()).abs() <= tol(da.cost()));
        prop_assert!(da.reconstruct().sub(&db.reconstruct()).frobenius_norm() <= 1e-9);
    }

    #[test]
    fn staircase_brackets_identity(k in 1u32..200, t in -50.0..50.0f64) {
        let s = step_eval(k, t);
        let kf = k as f64;
        prop_assert!(s <= t + 1e-12 && s > t - 1.0 / kf - 1e-12);
        prop_assert!(((s * kf) - (s * kf).round()).abs() <= 1e-9);
    }

    #[test]
    fn laminate_tracks_affine_map(
        a in matrix(2, 2),
        b in prop::collection::vec(-1.0..1.0f64, 2),
        k in 1u32..64,
        x in prop::collection::vec(-2.0..2.0f64, 2),
        bd in any::<bool>(),
    ) {
        let lam = if bd { build_bd_laminate(&a, &b, k) } else { build_bv_laminate(&a, &b, k) }.unwrap();
        let exact: Vec<f64> = a.mul_vec(&x).iter().zip(&b).map(|(y, c)| y + c).collect();
        let err = norm(&sub(&lam.eval(&x), &exact));
        prop_assert!(err <= lam.sup_error_bound() + 1e-9);
        let mode = if bd { Mode::Bd } else { Mode::Bv };
        let target = mode.target_norm(&a).unwrap();
        let density = lam.variation_density(mode.schatten_norm()).unwrap();
        let fro = lam.variation_density(NormKind::Frobenius).unwrap();
        prop_assert!((density - target).abs() <= tol(target));
        prop_assert!((fro - density).abs() <= tol(density));
    }

    #[test]
    fn mesh_tiles_the_box(
        n in 1usize..=3,
        s in 1usize..=3,
        lo in prop::collection::vec(-1.0..1.0f64, 3),
        ext in prop::collection::vec(0.2..2.0f64, 3),
    ) {
        let lo = lo[..n].to_vec();
        let hi: Vec<f64> = lo.iter().zip(&ext).map(|(l, e)| l + e).collect();
        let domain = BoxDomain::new(lo, hi).unwrap();
        let mesh = freudenthal_mesh(&domain, s).unwrap();
        prop_assert_eq!(mesh.len(), (1..=n).product::<usize>() * s.pow(n as u32));
        prop_assert!((mesh.total_volume() - domain.volume()).abs() <= 1e-12 * domain.volume());
        prop_assert!(mesh.has_disjoint_interiors());
    }

    #[test]
    fn interpolation_reproduces_affine_fields(
        a in matrix(2, 2),
        b in prop::collection::vec(-1.0..1.0f64, 2),
        s in 1usize..=4,
    ) {
        let mesh = freudenthal_mesh(&BoxDomain::unit(2), s).unwrap();
        let f = interpolate(|x| a.mul_vec(x).iter().zip(&b).map(|(y, c)| y + c).collect(), &mesh).unwrap();
        for cell in &f.cells {
            prop_assert!(cell.a.sub(&a).frobenius_norm() <= 1e-9 * (1.0 + a.frobenius_norm()));
        }
        prop_assert!(f.continuous);
    }

    #[test]
    fn coarea_sum_converges_to_volume(
        pts in prop::collection::vec(-1.0..1.0f64, 6),
        angle in 0.0..std::f64::consts::TAU,
    ) {
        let verts = vec![pts[0..2].to_vec(), pts[2..4].to_vec(), pts[4..6].to_vec()];
        let cell = match Simplex::new(verts) {
            Ok(c) if c.volume() > 1e-3 => c,
            _ => return Ok(()),
        };
        let d = [angle.cos(), angle.sin()];
        let k = 256;
        let err = (coarea_sum(&cell, &d, k).unwrap() - cell.volume()).abs();
        prop_assert!(err <= 2.0 * cell.diameter() / k as f64);
    }
}
