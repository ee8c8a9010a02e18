//! Lattice of subspaces of ℂⁿ with orthonormal-basis representation.
//!
//! Every subspace carries an `ambient_dim × k` basis with orthonormal
//! columns; the zero subspace is the `ambient_dim × 0` basis. Equality and
//! containment compare orthogonal projectors in the operator 2-norm, so they
//! do not depend on which basis was chosen.

use crate::error::{Error, Result};
use crate::linalg::{
    factorize, factorize_full_right, numerical_rank, ComplexMatrix, Determinacy, NumericalContext,
};

#[derive(Debug, Clone)]
pub struct Subspace {
    basis: ComplexMatrix,
    ctx: NumericalContext,
    determinacy: Determinacy,
}

impl Subspace {
    /// Wraps a basis that is already orthonormal. Panics in debug builds if
    /// it is not.
    pub fn from_orthonormal(basis: ComplexMatrix, ctx: NumericalContext) -> Self {
        debug_assert!(basis.cols() <= basis.rows());
        Self {
            basis,
            ctx,
            determinacy: Determinacy::WellDetermined,
        }
    }

    /// Span of arbitrary columns (orthonormalized via the range of the
    /// matrix they form).
    pub fn span(columns: &ComplexMatrix, ctx: &NumericalContext) -> Result<Self> {
        range_of(columns, ctx)
    }

    pub fn zero(ambient_dim: usize, ctx: NumericalContext) -> Self {
        Self::from_orthonormal(ComplexMatrix::zeros(ambient_dim, 0), ctx)
    }

    pub fn full(ambient_dim: usize, ctx: NumericalContext) -> Self {
        Self::from_orthonormal(ComplexMatrix::identity(ambient_dim), ctx)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn ctx(&self) -> &NumericalContext {
        &self.ctx
    }

    /// Rank determinacy of the computation that produced this subspace.
    pub fn determinacy(&self) -> Determinacy {
        self.determinacy
    }

    /// Orthogonal projector `B·B*`.
    pub fn projector(&self) -> ComplexMatrix {
        &self.basis * &self.basis.adjoint()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::AmbientMismatch {
                left: self.ambient_dim(),
                right: other.ambient_dim(),
            });
        }
        Ok(())
    }

    fn with_determinacy(mut self, d: Determinacy) -> Self {
        self.determinacy = self.determinacy.and(d);
        self
    }

    /// `‖P₁ − P₂‖₂`.
    pub fn projector_distance(&self, other: &Subspace) -> Result<f64> {
        self.check_ambient(other)?;
        Ok((&self.projector() - &other.projector()).norm2())
    }

    /// `‖(I − P_self)·P_other‖₂`: how far `other` sticks out of `self`.
    pub fn containment_gap(&self, other: &Subspace) -> Result<f64> {
        self.check_ambient(other)?;
        let coords = &self.basis.adjoint() * &other.basis;
        let residual = &other.basis - &(&self.basis * &coords);
        Ok(residual.norm2())
    }

    pub fn equal(&self, other: &Subspace) -> Result<bool> {
        Ok(self.projector_distance(other)? <= self.ctx.eq_tol)
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        Ok(self.containment_gap(other)? <= self.ctx.eq_tol)
    }

    pub fn complement(&self) -> Subspace {
        complement(self)
    }
}

/// Span of the left singular vectors belonging to the numerical rank.
pub fn range_of(t: &ComplexMatrix, ctx: &NumericalContext) -> Result<Subspace> {
    let f = factorize(t)?;
    let rank = numerical_rank(&f, ctx);
    Ok(Subspace {
        basis: f.left_factor.columns(0, rank.rank),
        ctx: *ctx,
        determinacy: rank.determinacy,
    })
}

/// Span of the right singular vectors below the rank threshold, completed
/// to a full unitary so that `dim = cols − rank`.
pub fn kernel_of(t: &ComplexMatrix, ctx: &NumericalContext) -> Result<Subspace> {
    let f = factorize_full_right(t)?;
    let rank = numerical_rank(&f, ctx);
    let n = t.cols();
    Ok(Subspace {
        basis: f.right_factor.columns(rank.rank, n),
        ctx: *ctx,
        determinacy: rank.determinacy,
    })
}

/// Orthogonal complement within the ambient space.
pub fn complement(s: &Subspace) -> Subspace {
    // B* has orthonormal rows, so every nonzero singular value is 1 and the
    // rank decision is unambiguous.
    let k = kernel_of(&s.basis.adjoint(), &s.ctx).expect("orthonormal rows factorize");
    Subspace {
        basis: k.basis,
        ctx: s.ctx,
        determinacy: s.determinacy,
    }
}

/// `S1 + S2`: range of the concatenated bases.
pub fn sum(s1: &Subspace, s2: &Subspace) -> Result<Subspace> {
    s1.check_ambient(s2)?;
    let stacked = s1.basis.hstack(&s2.basis)?;
    Ok(range_of(&stacked, &s1.ctx)?
        .with_determinacy(s1.determinacy)
        .with_determinacy(s2.determinacy))
}

/// `S1 ∩ S2 = (S1⊥ + S2⊥)⊥`.
pub fn intersect(s1: &Subspace, s2: &Subspace) -> Result<Subspace> {
    s1.check_ambient(s2)?;
    Ok(complement(&sum(&complement(s1), &complement(s2))?))
}

pub fn equal(s1: &Subspace, s2: &Subspace) -> Result<bool> {
    s1.equal(s2)
}

/// Whether `s2 ⊆ s1`.
pub fn contains(s1: &Subspace, s2: &Subspace) -> Result<bool> {
    s1.contains(s2)
}

/// Principal angles between two subspaces in radians, ascending; there are
/// `min(dim S1, dim S2)` of them.
///
/// Small angles come from the sines (singular values of `(I − P₁)Q₂`) and
/// large ones from the cosines, so both ends keep full relative accuracy.
pub fn principal_angles(s1: &Subspace, s2: &Subspace) -> Result<Vec<f64>> {
    s1.check_ambient(s2)?;
    let count = s1.dim().min(s2.dim());
    if count == 0 {
        return Ok(Vec::new());
    }
    let cross = &s1.basis.adjoint() * &s2.basis;
    let cosines = factorize(&cross)?.singular_values;
    let residual = &s2.basis - &(&s1.basis * &cross);
    let mut sines = factorize(&residual)?.singular_values;
    sines.reverse();
    Ok((0..count)
        .map(|i| {
            let (c, s) = (cosines[i].clamp(0.0, 1.0), sines[i].clamp(0.0, 1.0));
            if c > std::f64::consts::FRAC_1_SQRT_2 {
                s.asin()
            } else {
                c.acos()
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::random::{complex_gaussian, random_with_rank, rng_from_seed};

    fn ctx() -> NumericalContext {
        NumericalContext::default()
    }

    fn e(n: usize, k: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[k] = C64::new(1.0, 0.0);
        v
    }

    fn span_of(n: usize, vecs: &[Vec<C64>]) -> Subspace {
        Subspace::span(&ComplexMatrix::from_columns(n, vecs), &ctx()).unwrap()
    }

    #[test]
    fn range_examples() {
        let r = range_of(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0]), &ctx()).unwrap();
        assert!(r.equal(&span_of(2, &[e(2, 0)])).unwrap());

        let r = range_of(&ComplexMatrix::zeros(3, 3), &ctx()).unwrap();
        assert_eq!(r.dim(), 0);
        assert_eq!(r.ambient_dim(), 3);

        let t = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let r = range_of(&t, &ctx()).unwrap();
        assert_eq!(r.dim(), 1);
        assert!(r.equal(&span_of(2, &[e(2, 0)])).unwrap());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_of(&ComplexMatrix::identity(3), &ctx()).unwrap().dim(), 0);

        let nil = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let k = kernel_of(&nil, &ctx()).unwrap();
        assert!(k.equal(&span_of(2, &[e(2, 0)])).unwrap());

        let t = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let k = kernel_of(&t, &ctx()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = span_of(2, &[vec![C64::new(s, 0.0), C64::new(-s, 0.0)]]);
        assert!(k.equal(&expected).unwrap());
        assert!((&t * k.basis()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn kernel_of_wide_matrix_has_full_dimension() {
        let t = complex_gaussian(&mut rng_from_seed(2), 2, 5);
        let k = kernel_of(&t, &ctx()).unwrap();
        assert_eq!(k.dim(), 3);
        assert!((&t * k.basis()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn complement_examples() {
        let c = span_of(2, &[e(2, 0)]).complement();
        assert!(c.equal(&span_of(2, &[e(2, 1)])).unwrap());
        assert_eq!(Subspace::full(4, ctx()).complement().dim(), 0);
        assert_eq!(Subspace::zero(4, ctx()).complement().dim(), 4);
    }

    #[test]
    fn intersection_and_sum_examples() {
        let a = span_of(2, &[e(2, 0)]);
        let b = span_of(2, &[e(2, 1)]);
        assert_eq!(intersect(&a, &b).unwrap().dim(), 0);
        assert!(intersect(&a, &a).unwrap().equal(&a).unwrap());
        assert!(sum(&a, &b).unwrap().equal(&Subspace::full(2, ctx())).unwrap());
        assert!(sum(&a, &Subspace::zero(2, ctx())).unwrap().equal(&a).unwrap());

        let p = span_of(3, &[e(3, 0), e(3, 1)]);
        let q = span_of(3, &[e(3, 1), e(3, 2)]);
        let i = intersect(&p, &q).unwrap();
        assert!(i.equal(&span_of(3, &[e(3, 1)])).unwrap());
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = Subspace::zero(2, ctx());
        let b = Subspace::zero(3, ctx());
        assert!(matches!(sum(&a, &b), Err(Error::AmbientMismatch { .. })));
        assert!(matches!(intersect(&a, &b), Err(Error::AmbientMismatch { .. })));
        assert!(matches!(a.equal(&b), Err(Error::AmbientMismatch { .. })));
        assert!(matches!(a.contains(&b), Err(Error::AmbientMismatch { .. })));
    }

    #[test]
    fn equality_tolerates_tiny_perturbation() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = span_of(2, &[vec![C64::new(s, 0.0), C64::new(s, 0.0)]]);
        let b = span_of(2, &[vec![C64::new(1.0, 0.0), C64::new(1.0 + 1e-14, 0.0)]]);
        // projector distance is about 5e-15
        assert!(a.projector_distance(&b).unwrap() < 1e-13);
        assert!(a.equal(&b).unwrap());
        assert!(!span_of(2, &[e(2, 0)]).equal(&span_of(2, &[e(2, 1)])).unwrap());
    }

    #[test]
    fn range_kernel_complement_duality() {
        let mut rng = rng_from_seed(77);
        for _ in 0..10 {
            let t = random_with_rank(&mut rng, 6, 5, 3, 0.2, 2.0);
            let ran = range_of(&t, &ctx()).unwrap();
            let ker_adj = kernel_of(&t.adjoint(), &ctx()).unwrap();
            assert!(ran.complement().equal(&ker_adj).unwrap());
            let ker = kernel_of(&t, &ctx()).unwrap();
            let ran_adj = range_of(&t.adjoint(), &ctx()).unwrap();
            assert!(ker.complement().equal(&ran_adj).unwrap());
        }
    }

    #[test]
    fn principal_angles_of_orthogonal_lines() {
        let a = span_of(2, &[e(2, 0)]);
        let b = span_of(2, &[e(2, 1)]);
        let angles = principal_angles(&a, &b).unwrap();
        assert!((angles[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
