//! Seeded generators for random test operators.
//!
//! Every generator is a deterministic function of its seed: the same seed
//! yields bit-identical matrices on every run and platform.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, C64};

pub type TestRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` independent seeds drawn from stream `stream` of the generator
/// seeded by `seed`. Different streams never share draws.
pub fn derived_seeds(seed: u64, stream: u64, count: usize) -> Vec<u64> {
    let mut rng = rng_from_seed(seed);
    rng.set_stream(stream);
    (0..count).map(|_| rng.random()).collect()
}

/// Matrix with i.i.d. standard complex Gaussian entries (unit variance).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let entries: Vec<C64> = (0..rows * cols)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * scale, im * scale)
        })
        .collect();
    ComplexMatrix::from_row_major(rows, cols, entries).expect("gaussian entries are finite")
}

/// Haar-distributed unitary (QR of a Gaussian matrix with the phases of
/// `R`'s diagonal folded back into `Q`).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_isometry(rng, n, n)
}

/// `rows × cols` matrix with orthonormal columns, `cols ≤ rows`.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    if cols == 0 {
        return ComplexMatrix::zeros(rows, 0);
    }
    let g = complex_gaussian(rng, rows, cols);
    let qr = g.inner().clone().qr();
    let mut q: DMatrix<C64> = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_inner(q)
}

/// `rows × cols` matrix of numerical rank `rank` with singular values drawn
/// uniformly from `[sigma_lo, sigma_hi]`. The remaining singular values are
/// rounding noise (around `1e-16·sigma_hi`), not exact zeros.
pub fn random_with_rank<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    rank: usize,
    sigma_lo: f64,
    sigma_hi: f64,
) -> ComplexMatrix {
    assert!(rank <= rows.min(cols), "rank exceeds dimensions");
    let left = random_isometry(rng, rows, rank);
    let right = random_isometry(rng, cols, rank);
    let sigma: Vec<f64> = (0..rank).map(|_| rng.random_range(sigma_lo..=sigma_hi)).collect();
    let core = ComplexMatrix::from_real_diagonal(&sigma);
    &(&left * &core) * &right.adjoint()
}

/// `rows × cols` matrix whose rank is exactly `rank` in floating point, with
/// smallest nonzero singular value at least `sigma_min`.
///
/// Built as `X·Y` with `X`, `Y` of small dyadic Gaussian-integer entries, so
/// every product and sum is exact and the null space carries no rounding
/// noise. Limits taken towards zero regularization behave as for a truly
/// rank-deficient operator.
pub fn random_exact_rank<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    rank: usize,
    sigma_min: f64,
) -> ComplexMatrix {
    assert!(rank <= rows.min(cols), "rank exceeds dimensions");
    let mut dyadic = |r: usize, c: usize| {
        let entries: Vec<C64> = (0..r * c)
            .map(|_| {
                let re = rng.random_range(-3i32..=3) as f64 / 4.0;
                let im = rng.random_range(-3i32..=3) as f64 / 4.0;
                C64::new(re, im)
            })
            .collect();
        ComplexMatrix::from_row_major(r, c, entries).expect("finite entries")
    };
    loop {
        let t = &dyadic(rows, rank) * &dyadic(rank, cols);
        if rank == 0 {
            return t;
        }
        let sigma = crate::linalg::singular_values(&t);
        if sigma[rank - 1] >= sigma_min {
            return t;
        }
    }
}

/// Square invertible matrix with singular values in `[sigma_lo, sigma_hi]`
/// and generic (non-normal) structure.
pub fn random_invertible<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    sigma_lo: f64,
    sigma_hi: f64,
) -> ComplexMatrix {
    random_with_rank(rng, n, n, n, sigma_lo, sigma_hi)
}

/// Uniform phase times a modulus drawn from `[lo, hi]`.
pub fn random_nonzero_scalar<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> C64 {
    let modulus = rng.random_range(lo..=hi);
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar(modulus, angle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rank_has_exact_zero_gram_defect() {
        let mut rng = rng_from_seed(5);
        let t = random_exact_rank(&mut rng, 6, 5, 2, 0.1);
        let sigma = crate::linalg::singular_values(&t);
        assert!(sigma[1] >= 0.1);
        assert!(sigma[2] < 1e-13 * sigma[0]);
        // entries are dyadic with few bits
        for z in t.to_row_major() {
            assert_eq!((z.re * 16.0).fract(), 0.0);
            assert_eq!((z.im * 16.0).fract(), 0.0);
        }
    }

    #[test]
    fn unitary_is_unitary_and_deterministic() {
        let u = random_unitary(&mut rng_from_seed(9), 6);
        let uu = &u.adjoint() * &u;
        assert!(uu.distance(&ComplexMatrix::identity(6)) < 1e-13);
        let again = random_unitary(&mut rng_from_seed(9), 6);
        assert_eq!(u, again);
    }

    #[test]
    fn prescribed_rank_and_spectrum() {
        let t = random_with_rank(&mut rng_from_seed(4), 8, 8, 4, 0.1, 2.0);
        let f = crate::linalg::factorize(&t).unwrap();
        assert!(f.singular_values[3] >= 0.1 - 1e-12);
        assert!(f.singular_values[4] < 1e-13);
    }
}
