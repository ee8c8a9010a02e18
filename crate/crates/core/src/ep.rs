//! EP operators: detection, isomorphism factorizations, block forms and
//! random generators.
//!
//! An EP operator `T` on ℂⁿ has `Ran(T) = Ran(T*)`. [`is_ep`] evaluates four
//! characterizations that are equivalent in exact arithmetic and reports
//! any disagreement instead of picking a winner.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Determinacy, NumericalContext, C64};
use crate::pseudoinverse::pinv;
use crate::random::{random_invertible, random_nonzero_scalar, random_unitary, rng_from_seed};
use crate::subspace::{kernel_of, range_of, Subspace};
use rand::Rng;

/// Outcome of the four EP characterizations.
#[derive(Debug, Clone)]
pub struct EpReport {
    /// `Ran(T) = Ran(T*)`.
    pub range_equal: bool,
    /// `Ker(T) = Ker(T*)`.
    pub kernel_equal: bool,
    /// `TT† = T†T`.
    pub mp_commutes: bool,
    /// `X = Ran(T) ⊕ Ker(T)` with the summands orthogonal.
    pub orth_decomp: bool,
    pub is_ep: bool,
    /// The four characterizations did not all agree.
    pub disagreement: bool,
    pub rank: usize,
    pub determinacy: Determinacy,
    /// Distances behind the four verdicts, in the same order.
    pub evidence: [f64; 4],
    /// Principal angles between `Ran(T)` and `Ran(T*)`.
    pub range_angles: Vec<f64>,
    /// Smallest singular value of `T` on `Ran(T*)`; the bounded-below
    /// constant of the restriction.
    pub restriction_bound: f64,
}

fn require_square(t: &ComplexMatrix) -> Result<usize> {
    if !t.is_square() {
        return Err(Error::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    Ok(t.rows())
}

pub fn is_ep(t: &ComplexMatrix, ctx: &NumericalContext) -> Result<EpReport> {
    let n = require_square(t)?;
    let t_adj = t.adjoint();
    let ran = range_of(t, ctx)?;
    let ran_adj = range_of(&t_adj, ctx)?;
    let ker = kernel_of(t, ctx)?;
    let ker_adj = kernel_of(&t_adj, ctx)?;

    let range_dist = ran.projector_distance(&ran_adj)?;
    let kernel_dist = ker.projector_distance(&ker_adj)?;

    let g = pinv(t, ctx)?;
    let commutator = (&(t * &g) - &(&g * t)).norm2();

    // Ran(T) ⊥ Ker(T) and the dimensions fill the space.
    let cross = (&ran.basis().adjoint() * ker.basis()).norm2();
    let fills = ran.dim() + ker.dim() == n;
    let orth_defect = if fills { cross } else { f64::INFINITY };

    let range_equal = range_dist <= ctx.eq_tol;
    let kernel_equal = kernel_dist <= ctx.eq_tol;
    let mp_commutes = commutator <= ctx.eq_tol;
    let orth_decomp = orth_defect <= ctx.eq_tol;
    let verdicts = [range_equal, kernel_equal, mp_commutes, orth_decomp];
    let all = verdicts.iter().all(|&v| v);
    let any = verdicts.iter().any(|&v| v);

    let range_angles = crate::subspace::principal_angles(&ran, &ran_adj)?;
    let restriction_bound = if ran_adj.dim() == 0 {
        f64::INFINITY
    } else {
        (t * ran_adj.basis()).sigma_min()
    };

    Ok(EpReport {
        range_equal,
        kernel_equal,
        mp_commutes,
        orth_decomp,
        is_ep: all,
        disagreement: any && !all,
        rank: ran.dim(),
        determinacy: ran.determinacy().and(ker.determinacy()),
        evidence: [range_dist, kernel_dist, commutator, orth_defect],
        range_angles,
        restriction_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorizationKind {
    /// `T* = V·T`.
    AdjointForm,
    /// `T† = V·T = T·V`.
    CommutingForm,
}

#[derive(Debug, Clone)]
pub struct EpFactorization {
    pub v: ComplexMatrix,
    pub kind: FactorizationKind,
    /// `‖T* − VT‖_F` for the adjoint form; `max(‖T† − VT‖_F, ‖T† − TV‖_F)`
    /// for the commuting form.
    pub residual: f64,
    pub sigma_min_v: f64,
}

/// Orthonormal bases of `Ran(T)` and `Ker(T)` plus the compressed operator
/// `T₁ = Q*TQ` on the range, for an EP operator.
struct RangeSplit {
    range: Subspace,
    kernel: Subspace,
    t1: ComplexMatrix,
}

fn split_ep(t: &ComplexMatrix, ctx: &NumericalContext) -> Result<RangeSplit> {
    let report = is_ep(t, ctx)?;
    if !report.is_ep {
        return Err(Error::NotEp);
    }
    let range = range_of(t, ctx)?;
    let kernel = range.complement();
    let q = range.basis();
    let t1 = &(&q.adjoint() * t) * q;
    let sigma_min = t1.sigma_min();
    if sigma_min <= ctx.eq_tol {
        return Err(Error::SingularRestriction { sigma_min });
    }
    Ok(RangeSplit { range, kernel, t1 })
}

/// `Q · M · Q* + K·K*`: acts by `M` in range coordinates, identity on the
/// kernel.
fn assemble_on_split(split: &RangeSplit, m: &ComplexMatrix) -> ComplexMatrix {
    let q = split.range.basis();
    let k = split.kernel.basis();
    let on_range = &(q * m) * &q.adjoint();
    &on_range + &(k * &k.adjoint())
}

/// `V = T*·(T|Ran)⁻¹` on `Ran(T)` and the identity on `Ker(T)`, so that
/// `T* = V·T`.
pub fn ep_factor_adjoint(t: &ComplexMatrix, ctx: &NumericalContext) -> Result<EpFactorization> {
    let split = split_ep(t, ctx)?;
    let q = split.range.basis();
    // T* restricted to Ran(T), in range coordinates: Q*T*Q = T1*.
    let t1_adj = split.t1.adjoint();
    let r = q.cols();
    let t1_inv = split
        .t1
        .solve(&ComplexMatrix::identity(r))
        .ok_or(Error::SingularRestriction { sigma_min: 0.0 })?;
    let v = assemble_on_split(&split, &(&t1_adj * &t1_inv));
    let residual = t.adjoint().distance(&(&v * t));
    Ok(EpFactorization {
        sigma_min_v: v.sigma_min(),
        v,
        kind: FactorizationKind::AdjointForm,
        residual,
    })
}

/// `V = (T|Ran)⁻²` on `Ran(T)` and the identity on `Ker(T)`, so that
/// `TV = VT = T†`.
pub fn ep_factor_commuting(t: &ComplexMatrix, ctx: &NumericalContext) -> Result<EpFactorization> {
    let split = split_ep(t, ctx)?;
    let r = split.t1.rows();
    let t1_sq = &split.t1 * &split.t1;
    let inv_sq = t1_sq
        .solve(&ComplexMatrix::identity(r))
        .ok_or(Error::SingularRestriction { sigma_min: 0.0 })?;
    let v = assemble_on_split(&split, &inv_sq);
    let g = pinv(t, ctx)?;
    let residual = g.distance(&(&v * t)).max(g.distance(&(t * &v)));
    Ok(EpFactorization {
        sigma_min_v: v.sigma_min(),
        v,
        kind: FactorizationKind::CommutingForm,
        residual,
    })
}

/// `T = U·diag(T₁, 0)·U*` with `U = [Ran(T) basis | Ker(T) basis]`.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub u: ComplexMatrix,
    pub t1: ComplexMatrix,
    /// `‖T − U·diag(T₁,0)·U*‖_F`.
    pub reconstruction_residual: f64,
    /// `‖T† − U·diag(T₁⁻¹,0)·U*‖_F`.
    pub inverse_residual: f64,
}

impl CanonicalForm {
    pub fn rank(&self) -> usize {
        self.t1.rows()
    }

    /// `U·diag(M, 0)·U*` for an `r × r` core `M`.
    pub fn embed(&self, core: &ComplexMatrix) -> ComplexMatrix {
        let n = self.u.rows();
        let r = self.rank();
        let full = core.block_diag(&ComplexMatrix::zeros(n - r, n - r));
        &(&self.u * &full) * &self.u.adjoint()
    }
}

pub fn canonical_form(t: &ComplexMatrix, ctx: &NumericalContext) -> Result<CanonicalForm> {
    let split = split_ep(t, ctx)?;
    let u = split.range.basis().hstack(split.kernel.basis())?;
    let r = split.t1.rows();
    let t1_inv = split
        .t1
        .solve(&ComplexMatrix::identity(r))
        .ok_or(Error::SingularRestriction { sigma_min: 0.0 })?;
    let mut form = CanonicalForm {
        u,
        t1: split.t1,
        reconstruction_residual: 0.0,
        inverse_residual: 0.0,
    };
    form.reconstruction_residual = t.distance(&form.embed(&form.t1));
    form.inverse_residual = pinv(t, ctx)?.distance(&form.embed(&t1_inv));
    Ok(form)
}

/// Matrix of `T` from `Ran(T*) ⊕ Ker(T)` to `W ⊕ W⊥`, and `T†` assembled
/// from the blocks.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub domain_range: ComplexMatrix,
    pub domain_kernel: ComplexMatrix,
    pub codomain_w: ComplexMatrix,
    pub codomain_w_perp: ComplexMatrix,
    /// `Ran(T*) → W`.
    pub t1: ComplexMatrix,
    /// `Ran(T*) → W⊥`.
    pub t2: ComplexMatrix,
    /// `‖[T₃; T₄]‖_F`, the action on `Ker(T)`; zero up to rounding.
    pub kernel_block_norm: f64,
    /// `T₁*T₁ + T₂*T₂` on `Ran(T*)`.
    pub a: ComplexMatrix,
    pub a_sigma_min: f64,
    /// `[A⁻¹T₁*, A⁻¹T₂*; 0, 0]` mapped back to the standard bases.
    pub mp_from_blocks: ComplexMatrix,
}

pub fn block_decompose(
    t: &ComplexMatrix,
    w: &Subspace,
    ctx: &NumericalContext,
) -> Result<BlockDecomposition> {
    if w.ambient_dim() != t.rows() {
        return Err(Error::AmbientMismatch {
            left: t.rows(),
            right: w.ambient_dim(),
        });
    }
    let ran_adj = range_of(&t.adjoint(), ctx)?;
    if let Determinacy::IllDetermined { gap_ratio } = ran_adj.determinacy() {
        return Err(Error::IllDeterminedRank {
            rank: ran_adj.dim(),
            gap_ratio,
        });
    }
    let ker = ran_adj.complement();
    let w_perp = w.complement();

    let r_basis = ran_adj.basis();
    let w_basis = w.basis();
    let wp_basis = w_perp.basis();
    let t_on_range = t * r_basis;
    let t_on_kernel = t * ker.basis();
    let t1 = &w_basis.adjoint() * &t_on_range;
    let t2 = &wp_basis.adjoint() * &t_on_range;

    let a = &(&t1.adjoint() * &t1) + &(&t2.adjoint() * &t2);
    let a_sigma_min = a.sigma_min();
    if a_sigma_min <= ctx.eq_tol {
        return Err(Error::SingularBlock {
            sigma_min: a_sigma_min,
        });
    }
    let g1 = a
        .solve(&t1.adjoint())
        .ok_or(Error::SingularBlock { sigma_min: 0.0 })?;
    let g2 = a
        .solve(&t2.adjoint())
        .ok_or(Error::SingularBlock { sigma_min: 0.0 })?;
    // G = R·(A⁻¹T₁*·W* + A⁻¹T₂*·W⊥*); the Ker(T) rows of the block form are zero.
    let coords = &(&g1 * &w_basis.adjoint()) + &(&g2 * &wp_basis.adjoint());
    let mp_from_blocks = r_basis * &coords;

    Ok(BlockDecomposition {
        domain_range: r_basis.clone(),
        domain_kernel: ker.basis().clone(),
        codomain_w: w_basis.clone(),
        codomain_w_perp: wp_basis.clone(),
        t1,
        t2,
        kernel_block_norm: t_on_kernel.frobenius_norm(),
        a,
        a_sigma_min,
        mp_from_blocks,
    })
}

/// Lower bound on `σ_min(M)` enforced by [`random_ep`].
pub const RANDOM_EP_SIGMA_FLOOR: f64 = 0.1;

/// `U·diag(M, 0)·U*` with Haar-random unitary `U` and a generic invertible
/// `r × r` core `M` whose singular values lie in `[0.25, 2.5]`.
pub fn random_ep(n: usize, r: usize, seed: u64) -> Result<ComplexMatrix> {
    if r > n {
        return Err(Error::RankOutOfBounds { rank: r, dim: n });
    }
    let mut rng = rng_from_seed(seed);
    let u = random_unitary(&mut rng, n);
    let core = random_invertible(&mut rng, r, 2.5 * RANDOM_EP_SIGMA_FLOOR, 2.5);
    let full = core.block_diag(&ComplexMatrix::zeros(n - r, n - r));
    Ok(&(&u * &full) * &u.adjoint())
}

/// `U·diag(d)·U*`.
pub fn conjugate_diagonal(u: &ComplexMatrix, d: &[C64]) -> ComplexMatrix {
    &(u * &ComplexMatrix::from_diagonal(d)) * &u.adjoint()
}

/// Two commuting EP operators `U·D₁·U*`, `U·D₂·U*` sharing a random unitary.
/// Each diagonal entry is zero with probability 1/3 (independently per
/// factor) and otherwise has modulus in `[0.5, 2]`.
pub fn random_commuting_ep_pair(n: usize, seed: u64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if n == 0 {
        return Err(Error::Precondition("commuting pair needs n >= 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let u = random_unitary(&mut rng, n);
    let diag = |rng: &mut crate::random::TestRng| -> Vec<C64> {
        (0..n)
            .map(|_| {
                if rng.random_range(0..3) == 0 {
                    C64::new(0.0, 0.0)
                } else {
                    random_nonzero_scalar(rng, 0.5, 2.0)
                }
            })
            .collect()
    };
    let d1 = diag(&mut rng);
    let d2 = diag(&mut rng);
    Ok((conjugate_diagonal(&u, &d1), conjugate_diagonal(&u, &d2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{complex_gaussian, random_isometry};

    fn ctx() -> NumericalContext {
        NumericalContext::default()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn detection_examples() {
        let herm = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let r = is_ep(&herm, &ctx()).unwrap();
        assert!(r.is_ep && !r.disagreement);

        let nil = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let r = is_ep(&nil, &ctx()).unwrap();
        assert!(!r.is_ep);
        assert!(!r.range_equal && !r.kernel_equal && !r.mp_commutes && !r.orth_decomp);
        assert!((r.range_angles[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);

        let u = random_unitary(&mut rng_from_seed(1), 5);
        let r = is_ep(&u, &ctx()).unwrap();
        assert!(r.is_ep);
        assert_eq!(r.rank, 5);

        let t = random_ep(8, 3, 99).unwrap();
        let r = is_ep(&t, &ctx()).unwrap();
        assert!(r.is_ep && !r.disagreement);
        assert_eq!(r.rank, 3);
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(
            is_ep(&ComplexMatrix::zeros(2, 3), &ctx()),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn adjoint_factor_examples() {
        let f = ep_factor_adjoint(&ComplexMatrix::identity(3), &ctx()).unwrap();
        assert!(f.v.distance(&ComplexMatrix::identity(3)) < 1e-14);

        let f = ep_factor_adjoint(&ComplexMatrix::from_real_diagonal(&[2.0, 0.0]), &ctx())
            .unwrap();
        assert!(f.v.distance(&ComplexMatrix::identity(2)) < 1e-14);

        let t = ComplexMatrix::from_diagonal(&[c(0.0, 2.0), c(0.0, 0.0)]);
        let f = ep_factor_adjoint(&t, &ctx()).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[-1.0, 1.0]);
        assert!(f.v.distance(&expected) < 1e-14);
        let vt = &f.v * &t;
        assert!(vt.distance(&ComplexMatrix::from_diagonal(&[c(0.0, -2.0), c(0.0, 0.0)])) < 1e-14);
        assert_eq!(f.kind, FactorizationKind::AdjointForm);
    }

    #[test]
    fn commuting_factor_examples() {
        let f = ep_factor_commuting(&ComplexMatrix::identity(2), &ctx()).unwrap();
        assert!(f.v.distance(&ComplexMatrix::identity(2)) < 1e-14);

        let t = ComplexMatrix::from_real_diagonal(&[2.0, 0.0]);
        let f = ep_factor_commuting(&t, &ctx()).unwrap();
        assert!(f.v.distance(&ComplexMatrix::from_real_diagonal(&[0.25, 1.0])) < 1e-14);
        assert!((&f.v * &t).distance(&ComplexMatrix::from_real_diagonal(&[0.5, 0.0])) < 1e-14);

        let t = ComplexMatrix::from_diagonal(&[c(0.0, 2.0), c(0.0, 0.0)]);
        let f = ep_factor_commuting(&t, &ctx()).unwrap();
        assert!(f.v.distance(&ComplexMatrix::from_real_diagonal(&[-0.25, 1.0])) < 1e-14);
        let vt = &f.v * &t;
        assert!(vt.distance(&ComplexMatrix::from_diagonal(&[c(0.0, -0.5), c(0.0, 0.0)])) < 1e-14);
    }

    #[test]
    fn factorizations_reject_non_ep() {
        let nil = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(ep_factor_adjoint(&nil, &ctx()).unwrap_err(), Error::NotEp);
        assert_eq!(ep_factor_commuting(&nil, &ctx()).unwrap_err(), Error::NotEp);
        assert_eq!(canonical_form(&nil, &ctx()).unwrap_err(), Error::NotEp);
    }

    #[test]
    fn block_examples() {
        let ctx = ctx();
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let w = range_of(&t, &ctx).unwrap();
        let b = block_decompose(&t, &w, &ctx).unwrap();
        assert!((b.t1.get(0, 0).norm() - 1.0).abs() < 1e-14);
        assert!(b.t2.get(0, 0).norm() < 1e-14);
        assert!((b.a.get(0, 0).re - 1.0).abs() < 1e-14);
        assert!(b.mp_from_blocks.distance(&t) < 1e-14);

        let t = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let w = range_of(&t, &ctx).unwrap();
        let b = block_decompose(&t, &w, &ctx).unwrap();
        assert!((b.t1.get(0, 0).norm() - 2f64.sqrt()).abs() < 1e-14);
        assert!(b.t2.get(0, 0).norm() < 1e-14);
        assert!((b.a.get(0, 0).re - 2.0).abs() < 1e-14);
        let expected = ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.5, 0.0]]);
        assert!(b.mp_from_blocks.distance(&expected) < 1e-14);
    }

    #[test]
    fn block_formula_independent_of_w() {
        let ctx = ctx();
        let mut rng = rng_from_seed(12);
        let t = crate::random::random_with_rank(&mut rng, 6, 6, 3, 0.2, 2.0);
        let w = Subspace::from_orthonormal(random_isometry(&mut rng, 6, 2), ctx);
        let b = block_decompose(&t, &w, &ctx).unwrap();
        assert!(b.mp_from_blocks.distance(&pinv(&t, &ctx).unwrap()) < 1e-9);
        assert!(b.kernel_block_norm < 1e-12);
    }

    #[test]
    fn block_decompose_rejects_wrong_codomain() {
        let ctx = ctx();
        let t = ComplexMatrix::identity(2);
        let w = Subspace::zero(3, ctx);
        assert!(matches!(
            block_decompose(&t, &w, &ctx),
            Err(Error::AmbientMismatch { .. })
        ));
    }

    #[test]
    fn canonical_examples() {
        let f = canonical_form(&ComplexMatrix::identity(2), &ctx()).unwrap();
        assert_eq!(f.rank(), 2);
        assert!(f.reconstruction_residual < 1e-14);

        let f = canonical_form(&ComplexMatrix::from_real_diagonal(&[3.0, 0.0]), &ctx()).unwrap();
        assert_eq!(f.rank(), 1);
        assert!((f.t1.get(0, 0) - c(3.0, 0.0)).norm() < 1e-14);
        // U = I up to column phases
        for k in 0..2 {
            assert!((f.u.get(k, k).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn canonical_recovers_conjugated_core() {
        let mut rng = rng_from_seed(31);
        let q = random_unitary(&mut rng, 5);
        let m = complex_gaussian(&mut rng, 3, 3);
        let t = &(&q * &m.block_diag(&ComplexMatrix::zeros(2, 2))) * &q.adjoint();
        let f = canonical_form(&t, &ctx()).unwrap();
        assert_eq!(f.rank(), 3);
        assert!(f.reconstruction_residual < 1e-12);
        assert!(f.inverse_residual < 1e-10);
        // T1 is unitarily similar to M: equal singular values.
        let a = crate::linalg::factorize(&f.t1).unwrap().singular_values;
        let b = crate::linalg::factorize(&m).unwrap().singular_values;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn random_ep_bounds_and_extremes() {
        assert!(matches!(random_ep(3, 4, 0), Err(Error::RankOutOfBounds { .. })));
        let z = random_ep(4, 0, 7).unwrap();
        assert!(z.frobenius_norm() < 1e-15);
        assert!(is_ep(&z, &ctx()).unwrap().is_ep);
        let full = random_ep(4, 4, 7).unwrap();
        let r = is_ep(&full, &ctx()).unwrap();
        assert!(r.is_ep && r.rank == 4);
        assert_eq!(random_ep(6, 2, 5).unwrap(), random_ep(6, 2, 5).unwrap());
    }

    #[test]
    fn commuting_pair_fixture_and_draws() {
        let u = ComplexMatrix::identity(2);
        let t = conjugate_diagonal(&u, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let s = conjugate_diagonal(&u, &[c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!((&t * &s).frobenius_norm(), 0.0);

        for seed in 0..100 {
            let (t, s) = random_commuting_ep_pair(6, seed).unwrap();
            assert!((&(&t * &s) - &(&s * &t)).frobenius_norm() <= 1e-12);
            assert!(is_ep(&t, &ctx()).unwrap().is_ep);
            assert!(is_ep(&s, &ctx()).unwrap().is_ep);
        }
        assert!(random_commuting_ep_pair(0, 1).is_err());
    }
}
