//! Seeded random matrices and vectors.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::numlin::matrix::{c64, DenseMatrix, Scalar};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut SeededRng) -> Scalar {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    Uniform::new(lo, hi).expect("lo < hi").sample(rng)
}

pub fn unit_vector(rng: &mut SeededRng, n: usize) -> Vec<Scalar> {
    loop {
        let v: Vec<Scalar> = (0..n).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// `n x k` matrix with orthonormal columns, Haar distributed.
pub fn orthonormal_frame(rng: &mut SeededRng, n: usize, k: usize) -> DenseMatrix {
    assert!(k <= n, "frame wider than ambient space");
    if k == 0 {
        return DenseMatrix::zeros(n, 0);
    }
    let g: DMatrix<Scalar> = gaussian_matrix(rng, n, k).into_inner();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // fix column phases so the distribution is Haar
    for j in 0..k {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c64(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    DenseMatrix::from_inner(q)
}

pub fn unitary(rng: &mut SeededRng, n: usize) -> DenseMatrix {
    orthonormal_frame(rng, n, n)
}

/// Rank-`r` matrix `X diag(s) Y*` with orthonormal frames `X` (rows x r),
/// `Y` (cols x r) and singular values drawn from `[lo, hi]`.
pub fn with_singular_values(
    rng: &mut SeededRng,
    rows: usize,
    cols: usize,
    rank: usize,
    lo: f64,
    hi: f64,
) -> DenseMatrix {
    let x = orthonormal_frame(rng, rows, rank);
    let y = orthonormal_frame(rng, cols, rank);
    let s: Vec<f64> = (0..rank).map(|_| uniform(rng, lo, hi)).collect();
    &x * &DenseMatrix::diag_real(&s) * y.adjoint()
}

/// `V M V*` with `V` an `n x r` orthonormal frame and `M` an invertible
/// `r x r` core whose singular values lie in `[lo, hi]`. Range and adjoint
/// range are both `span(V)`.
pub fn ep_matrix(rng: &mut SeededRng, n: usize, rank: usize, lo: f64, hi: f64) -> DenseMatrix {
    let v = orthonormal_frame(rng, n, rank);
    let core = with_singular_values(rng, rank, rank, rank, lo, hi);
    &v * &core * v.adjoint()
}
