//! Seeded random and quasi-random sources.
//!
//! Every random draw goes through [`rng`], a ChaCha8 generator keyed by a
//! `(seed, stream)` pair so that independent trials are reproducible and can
//! be evaluated in any order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{axpy, dot, normalized, Matrix};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian_vec<R: Rng + ?Sized>(r: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

pub fn uniform_vec<R: Rng + ?Sized>(r: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| r.random_range(lo..hi)).collect()
}

pub fn gaussian_matrix<R: Rng + ?Sized>(r: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_row_major(rows, cols, gaussian_vec(r, rows * cols)).expect("finite samples")
}

pub fn uniform_matrix<R: Rng + ?Sized>(r: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_row_major(rows, cols, uniform_vec(r, rows * cols, -1.0, 1.0))
        .expect("finite samples")
}

/// Orthogonal `n×n` matrix from Gram-Schmidt on Gaussian columns.
pub fn random_orthogonal<R: Rng + ?Sized>(r: &mut R, n: usize) -> Matrix {
    loop {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut v = gaussian_vec(r, n);
            for _ in 0..2 {
                for c in &cols {
                    let d = dot(&v, c);
                    axpy(&mut v, -d, c);
                }
            }
            match normalized(&v) {
                Some(u) => cols.push(u),
                None => break,
            }
        }
        if cols.len() == n {
            return Matrix::from_columns(&cols).expect("square");
        }
    }
}

/// Gaussian `n×n` matrix with condition number at most `max_cond`
/// (estimated through its singular values).
pub fn random_invertible<R: Rng + ?Sized>(r: &mut R, n: usize, max_cond: f64) -> Matrix {
    loop {
        let g = gaussian_matrix(r, n, n);
        let s = g.svd().singular_values;
        let (hi, lo) = (s[0], s[n - 1]);
        if lo > 0.0 && hi / lo <= max_cond {
            return g;
        }
    }
}

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut x = 0.0;
    while i > 0 {
        x += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    x
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// The `i`-th point of the Halton sequence in `[0,1)^dim` (dim ≤ 8),
/// skipping the origin.
pub fn halton(i: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "halton supports up to {} dimensions", PRIMES.len());
    PRIMES[..dim].iter().map(|&b| radical_inverse(i + 1, b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = gaussian_vec(&mut rng(7, 3), 4);
        let b: Vec<f64> = gaussian_vec(&mut rng(7, 3), 4);
        let c: Vec<f64> = gaussian_vec(&mut rng(7, 4), 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let q = random_orthogonal(&mut rng(1, 0), 4);
        let err = q.transpose().matmul(&q).sub(&Matrix::identity(4)).frobenius_norm();
        assert!(err < 1e-13);
    }

    #[test]
    fn halton_is_in_unit_cube() {
        assert_eq!(halton(0, 2), vec![0.5, 1.0 / 3.0]);
        for i in 0..1000 {
            assert!(halton(i, 3).iter().all(|&x| (0.0..1.0).contains(&x)));
        }
    }
}
