//! Randomized two-sided bounds on the convex envelopes of the Frobenius norm
//! restricted to rank-one and symmetric rank-one matrices.
//!
//! The lower bound for the Schatten-1 envelope is the support function of the
//! Schatten-∞ unit ball, evaluated on sampled extreme points plus the analytic
//! maximizer. Upper bounds are costs of exact rank-one decompositions: the
//! analytic one from [`crate::rank_one`] and randomized ones obtained by
//! decomposing a random congruence or a random residual. Trial `t` of a run
//! with seed `s` always uses stream `t` of [`crate::sampling::rng`]`(s, ·)`,
//! so estimates are reproducible and monotone in the trial count.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{Matrix, SymMatrix};
use crate::norms::schatten1;
use crate::rank_one::{
    bd_decompose, bv_decompose, Decomposition, DecompositionCase, RankOnePiece,
};
use crate::sampling::{gaussian_vec, random_invertible, random_orthogonal, rng};

/// Condition-number cap for random transforms.
const MAX_COND: f64 = 1e3;
/// Relative reconstruction tolerance for accepting a random decomposition.
const RECONSTRUCT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeEstimate {
    pub lower: f64,
    pub upper: f64,
    pub witness_decomposition: Decomposition,
    pub witness_dual: Matrix,
}

/// Result of a decomposition search.
#[derive(Clone, Debug, Serialize)]
pub struct UpperSearch {
    /// Minimum cost over all candidates, including the analytic one.
    pub upper: f64,
    pub witness: Decomposition,
    /// Cost of the analytic decomposition.
    pub analytic: f64,
    /// Minimum cost over accepted random candidates (`inf` if none).
    pub best_random: f64,
    pub accepted: usize,
    pub rejected: usize,
}

/// Lower bound `max A:X` over sampled `X` with `|X|_∞ = 1`, always including
/// `X = Σ u_i v_iᵀ` from the SVD of `A`. Returns the bound and its witness.
pub fn dual_bound_s1(a: &Matrix, samples: usize, seed: u64) -> (f64, Matrix) {
    let svd = a.svd();
    let rank = svd.rank(a.frobenius_norm());
    let (m, n) = (a.rows(), a.cols());
    let mut analytic = Matrix::zeros(m, n);
    for i in 0..rank {
        analytic = analytic.add(&Matrix::outer(&svd.u.column(i), &svd.v.column(i)));
    }
    let best = (a.frobenius_dot(&analytic), analytic);
    let sampled: Vec<(f64, Matrix)> = (0..samples as u64)
        .into_par_iter()
        .map(|t| {
            let mut r = rng(seed, t);
            let x = random_extreme_point(&mut r, m, n);
            (a.frobenius_dot(&x), x)
        })
        .collect();
    sampled
        .into_iter()
        .fold(best, |acc, cand| if cand.0 > acc.0 { cand } else { acc })
}

/// `Q D Pᵀ` with Haar-like orthogonal `Q`, `P` and random signs on the
/// diagonal of `D`, an extreme point of the Schatten-∞ unit ball.
fn random_extreme_point<R: Rng + ?Sized>(r: &mut R, m: usize, n: usize) -> Matrix {
    let q = random_orthogonal(r, m);
    let p = random_orthogonal(r, n);
    let mut d = Matrix::zeros(m, n);
    for i in 0..m.min(n) {
        d[(i, i)] = if r.random::<bool>() { 1.0 } else { -1.0 };
    }
    q.matmul(&d).matmul(&p.transpose())
}

/// Randomized rank-one decomposition of `a`. Even trials decompose the
/// transformed matrix `Q⁻¹ A P⁻ᵀ` and map pieces back by `Q`, `P`; odd
/// trials split off a random piece and decompose the residual.
fn random_bv<R: Rng + ?Sized>(r: &mut R, a: &Matrix, trial: u64) -> Decomposition {
    let (m, n) = (a.rows(), a.cols());
    let pieces = if trial.is_multiple_of(2) {
        let q = random_invertible(r, m, MAX_COND);
        let p = random_invertible(r, n, MAX_COND);
        let (qi, pi) = (
            q.inverse().expect("well conditioned"),
            p.inverse().expect("well conditioned"),
        );
        let b = qi.matmul(a).matmul(&pi.transpose());
        bv_decompose(&b)
            .pieces
            .into_iter()
            .map(|pc| RankOnePiece::tensor(q.mul_vec(&pc.left), p.mul_vec(&pc.right)))
            .collect()
    } else {
        let s = a.frobenius_norm().max(1e-300).sqrt();
        let left: Vec<f64> = gaussian_vec(r, m).iter().map(|x| x * s).collect();
        let right: Vec<f64> = gaussian_vec(r, n).iter().map(|x| x * s).collect();
        let first = RankOnePiece::tensor(left, right);
        let rest = bv_decompose(&a.sub(&first.matrix()));
        std::iter::once(first).chain(rest.pieces).collect()
    };
    Decomposition {
        pieces,
        target: a.clone(),
        case: DecompositionCase::Other,
        depth: 0,
    }
}

/// Symmetric analogue of [`random_bv`] using congruences `W B Wᵀ`.
fn random_bd<R: Rng + ?Sized>(r: &mut R, a: &SymMatrix, trial: u64) -> Decomposition {
    let n = a.dim();
    let pieces = if trial.is_multiple_of(2) {
        let w = random_invertible(r, n, MAX_COND);
        let wi = w.inverse().expect("well conditioned");
        let b = a.congruence(&wi.transpose());
        bd_decompose(&b)
            .pieces
            .into_iter()
            .map(|pc| RankOnePiece::sym(w.mul_vec(&pc.left), w.mul_vec(&pc.right)))
            .collect()
    } else {
        let s = a.as_matrix().frobenius_norm().max(1e-300).sqrt();
        let left: Vec<f64> = gaussian_vec(r, n).iter().map(|x| x * s).collect();
        let right: Vec<f64> = gaussian_vec(r, n).iter().map(|x| x * s).collect();
        let first = RankOnePiece::sym(left, right);
        let residual = SymMatrix::from_matrix(&a.as_matrix().sub(&first.matrix()))
            .expect("square");
        std::iter::once(first)
            .chain(bd_decompose(&residual).pieces)
            .collect()
    };
    Decomposition {
        pieces,
        target: a.as_matrix().clone(),
        case: DecompositionCase::Other,
        depth: 0,
    }
}

fn search(
    analytic: Decomposition,
    trials: usize,
    make: impl Fn(u64) -> Decomposition + Sync,
) -> UpperSearch {
    let analytic_cost = analytic.cost();
    let candidates: Vec<Option<(f64, Decomposition)>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let d = make(t);
            d.reconstructs(RECONSTRUCT_TOL).then(|| (d.cost(), d))
        })
        .collect();
    let mut out = UpperSearch {
        upper: analytic_cost,
        witness: analytic,
        analytic: analytic_cost,
        best_random: f64::INFINITY,
        accepted: 0,
        rejected: 0,
    };
    for cand in candidates {
        match cand {
            None => out.rejected += 1,
            Some((cost, d)) => {
                out.accepted += 1;
                out.best_random = out.best_random.min(cost);
                if cost < out.upper {
                    out.upper = cost;
                    out.witness = d;
                }
            }
        }
    }
    out
}

/// Minimum cost over `trials` random rank-one decompositions of `a` and the
/// singular-value decomposition.
pub fn envelope_upper_s1(a: &Matrix, trials: usize, seed: u64) -> UpperSearch {
    search(bv_decompose(a), trials, |t| random_bv(&mut rng(seed, t), a, t))
}

/// Minimum cost over `trials` random symmetric rank-one decompositions of
/// `a` and [`bd_decompose`].
pub fn envelope_upper_ssym(a: &SymMatrix, trials: usize, seed: u64) -> UpperSearch {
    search(bd_decompose(a), trials, |t| random_bd(&mut rng(seed, t), a, t))
}

/// Both sides of the Schatten-1 envelope sandwich.
pub fn estimate_s1(a: &Matrix, samples: usize, trials: usize, seed: u64) -> EnvelopeEstimate {
    let (lower, witness_dual) = dual_bound_s1(a, samples, seed);
    let up = envelope_upper_s1(a, trials, seed.wrapping_add(1));
    debug_assert!(lower <= up.upper + 1e-7 * (1.0 + schatten1(a)));
    EnvelopeEstimate {
        lower,
        upper: up.upper,
        witness_decomposition: up.witness,
        witness_dual,
    }
}
