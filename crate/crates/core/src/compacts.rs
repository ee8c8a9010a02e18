//! Finite direct sums of matrix algebras `⊕ᵢ M_{nᵢ}(ℂ)` as desk-scale
//! C*-algebras of compact operators, the algebra viewed as a module over
//! itself, and the principal right ideals `a𝒜`.
//!
//! Coordinates: block `i` contributes its `nᵢ²` matrix units `E_pq` in
//! row-major order, so in block `i` left multiplication by `aᵢ` is
//! `aᵢ ⊗ I` and right multiplication is `I ⊗ aᵢᵀ`.

use crate::ep::{is_ep, random_commuting_ep_pair, EpReport};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, NumericalContext};
use crate::subspace::{intersect, kernel_of, range_of, sum, Subspace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockAlgebra {
    block_dims: Vec<usize>,
}

impl BlockAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::BlockShape("algebra needs at least one block".into()));
        }
        if block_dims.contains(&0) {
            return Err(Error::BlockShape("block sizes must be positive".into()));
        }
        Ok(Self { block_dims })
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// `Σ nᵢ²`, the dimension of the algebra as a vector space.
    pub fn dim(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }
}

#[derive(Debug, Clone)]
pub struct AlgebraElement {
    algebra: BlockAlgebra,
    blocks: Vec<ComplexMatrix>,
}

impl AlgebraElement {
    pub fn new(algebra: &BlockAlgebra, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != algebra.block_dims.len() {
            return Err(Error::BlockShape(format!(
                "expected {} blocks, got {}",
                algebra.block_dims.len(),
                blocks.len()
            )));
        }
        for (i, (b, &n)) in blocks.iter().zip(&algebra.block_dims).enumerate() {
            if b.shape() != (n, n) {
                return Err(Error::BlockShape(format!(
                    "block {i} is {}x{}, expected {n}x{n}",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        Ok(Self {
            algebra: algebra.clone(),
            blocks,
        })
    }

    pub fn identity(algebra: &BlockAlgebra) -> Self {
        let blocks = algebra.block_dims.iter().map(|&n| ComplexMatrix::identity(n)).collect();
        Self {
            algebra: algebra.clone(),
            blocks,
        }
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn mul(&self, rhs: &AlgebraElement) -> Result<AlgebraElement> {
        if self.algebra != rhs.algebra {
            return Err(Error::BlockShape("elements live in different algebras".into()));
        }
        let blocks = self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a * b).collect();
        Ok(AlgebraElement {
            algebra: self.algebra.clone(),
            blocks,
        })
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(ComplexMatrix::norm2).fold(0.0, f64::max)
    }
}

fn block_diagonal(blocks: impl Iterator<Item = ComplexMatrix>) -> ComplexMatrix {
    blocks.fold(ComplexMatrix::zeros(0, 0), |acc, b| acc.block_diag(&b))
}

/// Matrix of `x ↦ ax` on the coordinate space.
pub fn left_mult_matrix(a: &AlgebraElement) -> ComplexMatrix {
    block_diagonal(
        a.blocks
            .iter()
            .map(|b| b.kronecker(&ComplexMatrix::identity(b.rows()))),
    )
}

/// Matrix of `x ↦ xa` on the coordinate space.
pub fn right_mult_matrix(a: &AlgebraElement) -> ComplexMatrix {
    block_diagonal(
        a.blocks
            .iter()
            .map(|b| ComplexMatrix::identity(b.rows()).kronecker(&b.transpose())),
    )
}

/// `{x : ax = 0}` computed directly from the blocks: in block `i` it is the
/// set of matrices whose columns lie in `Ker(aᵢ)`.
pub fn annihilator_from_blocks(a: &AlgebraElement, ctx: &NumericalContext) -> Result<Subspace> {
    let ctx = ctx.with_scale(a.norm());
    let parts = a
        .blocks
        .iter()
        .map(|b| {
            let k = kernel_of(b, &ctx)?;
            // x = Σ_q k_c e_qᵀ: column q of x is the kernel vector k_c.
            Ok(k.basis().kronecker(&ComplexMatrix::identity(b.rows())))
        })
        .collect::<Result<Vec<_>>>()?;
    let dim = a.algebra.dim();
    let mut basis = ComplexMatrix::zeros(dim, 0);
    let mut offset = 0;
    for (part, &n) in parts.iter().zip(&a.algebra.block_dims) {
        let mut placed = ComplexMatrix::zeros(dim, part.cols());
        for r in 0..part.rows() {
            for c in 0..part.cols() {
                placed.set(offset + r, c, part.get(r, c));
            }
        }
        basis = basis.hstack(&placed)?;
        offset += n * n;
    }
    Ok(Subspace::from_orthonormal(basis, ctx))
}

/// `aℂⁿ ⊗ ℂⁿ` per block: matrices whose columns lie in `Ran(aᵢ)`.
pub fn ideal_from_blocks(a: &AlgebraElement, ctx: &NumericalContext) -> Result<Subspace> {
    let ctx = ctx.with_scale(a.norm());
    let dim = a.algebra.dim();
    let mut basis = ComplexMatrix::zeros(dim, 0);
    let mut offset = 0;
    for (b, &n) in a.blocks.iter().zip(&a.algebra.block_dims) {
        let part = range_of(b, &ctx)?
            .basis()
            .kronecker(&ComplexMatrix::identity(n));
        let mut placed = ComplexMatrix::zeros(dim, part.cols());
        for r in 0..part.rows() {
            for c in 0..part.cols() {
                placed.set(offset + r, c, part.get(r, c));
            }
        }
        basis = basis.hstack(&placed)?;
        offset += n * n;
    }
    Ok(Subspace::from_orthonormal(basis, ctx))
}

#[derive(Debug, Clone)]
pub struct ElementEpReport {
    pub blocks: Vec<EpReport>,
    /// Every block is EP.
    pub blockwise: bool,
    pub left_mult: EpReport,
    /// The blockwise verdict matches the verdict on `L_a`.
    pub agree: bool,
}

impl ElementEpReport {
    pub fn is_ep(&self) -> bool {
        self.blockwise
    }
}

/// `a` commutes with `a†` iff each block does; cross-checked on `L_a`.
pub fn element_is_ep(a: &AlgebraElement, ctx: &NumericalContext) -> Result<ElementEpReport> {
    let ctx = ctx.with_scale(a.norm());
    let blocks = a
        .blocks
        .iter()
        .map(|b| is_ep(b, &ctx))
        .collect::<Result<Vec<_>>>()?;
    let blockwise = blocks.iter().all(|r| r.is_ep);
    let left_mult = is_ep(&left_mult_matrix(a), &ctx)?;
    Ok(ElementEpReport {
        agree: blockwise == left_mult.is_ep,
        blocks,
        blockwise,
        left_mult,
    })
}

pub const KERNEL_READING_NOTE: &str = "kernel condition evaluated as Ker(L_ab) = Ker(L_a) + Ker(L_b), \
     i.e. with the left annihilators {x : ax = 0}; the right-annihilator variant \
     {x : xa = 0} is reported separately and is not a valid criterion in general";

#[derive(Debug, Clone)]
pub struct IdealReport {
    pub a_ep: bool,
    pub b_ep: bool,
    pub ab_ep: bool,
    /// Projector distance between `ab𝒜` and `a𝒜 ∩ b𝒜`.
    pub ideal_distance: f64,
    pub ideal_equal: bool,
    /// `Ker(L_ab) = Ker(L_a) + Ker(L_b)`.
    pub left_kernel_distance: f64,
    pub left_kernel_sum: bool,
    /// `{x : xab = 0} = {x : xa = 0} + {x : xb = 0}`; informational.
    pub right_kernel_distance: f64,
    pub right_kernel_sum: bool,
    /// If `a`, `b`, `ab` are all EP then `ab𝒜 = a𝒜 ∩ b𝒜`. `None` when the
    /// hypothesis fails.
    pub ideal_equality_holds: Option<bool>,
    /// For EP `a`, `b`: `ab` EP iff the ideal equality and the kernel sum
    /// both hold. `None` unless `a` and `b` are EP.
    pub biconditional_holds: Option<bool>,
    pub note: &'static str,
}

impl IdealReport {
    /// No evaluated implication is violated.
    pub fn consistent(&self) -> bool {
        self.ideal_equality_holds.unwrap_or(true) && self.biconditional_holds.unwrap_or(true)
    }
}

pub fn ideal_equality_check(
    a: &AlgebraElement,
    b: &AlgebraElement,
    ctx: &NumericalContext,
) -> Result<IdealReport> {
    let ab = a.mul(b)?;
    let a_ep = element_is_ep(a, ctx)?.is_ep();
    let b_ep = element_is_ep(b, ctx)?.is_ep();
    let ab_ctx = ctx.with_scale(a.norm() * b.norm());
    let ab_ep = element_is_ep(&ab, &ab_ctx)?.is_ep();

    let (la, lb, lab) = (left_mult_matrix(a), left_mult_matrix(b), left_mult_matrix(&ab));
    let a_ctx = ctx.with_scale(a.norm());
    let b_ctx = ctx.with_scale(b.norm());
    let meet = intersect(&range_of(&la, &a_ctx)?, &range_of(&lb, &b_ctx)?)?;
    let ideal_distance = range_of(&lab, &ab_ctx)?.projector_distance(&meet)?;
    let ideal_equal = ideal_distance <= ctx.eq_tol;

    let left_join = sum(&kernel_of(&la, &a_ctx)?, &kernel_of(&lb, &b_ctx)?)?;
    let left_kernel_distance = kernel_of(&lab, &ab_ctx)?.projector_distance(&left_join)?;
    let left_kernel_sum = left_kernel_distance <= ctx.eq_tol;

    let (ra, rb, rab) = (right_mult_matrix(a), right_mult_matrix(b), right_mult_matrix(&ab));
    let right_join = sum(&kernel_of(&ra, &a_ctx)?, &kernel_of(&rb, &b_ctx)?)?;
    let right_kernel_distance = kernel_of(&rab, &ab_ctx)?.projector_distance(&right_join)?;
    let right_kernel_sum = right_kernel_distance <= ctx.eq_tol;

    let ideal_equality_holds = (a_ep && b_ep && ab_ep).then_some(ideal_equal);
    let biconditional_holds = (a_ep && b_ep).then_some(ab_ep == (ideal_equal && left_kernel_sum));
    Ok(IdealReport {
        a_ep,
        b_ep,
        ab_ep,
        ideal_distance,
        ideal_equal,
        left_kernel_distance,
        left_kernel_sum,
        right_kernel_distance,
        right_kernel_sum,
        ideal_equality_holds,
        biconditional_holds,
        note: KERNEL_READING_NOTE,
    })
}

/// Commuting EP elements `a`, `b` (hence `ab` EP), drawn block by block
/// from [`random_commuting_ep_pair`].
pub fn random_commuting_ep_elements(
    algebra: &BlockAlgebra,
    seed: u64,
) -> Result<(AlgebraElement, AlgebraElement)> {
    let mut a_blocks = Vec::new();
    let mut b_blocks = Vec::new();
    for (i, &n) in algebra.block_dims.iter().enumerate() {
        let (a, b) = random_commuting_ep_pair(n, seed.wrapping_mul(1_000_003).wrapping_add(i as u64))?;
        a_blocks.push(a);
        b_blocks.push(b);
    }
    Ok((
        AlgebraElement::new(algebra, a_blocks)?,
        AlgebraElement::new(algebra, b_blocks)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{complex_gaussian, rng_from_seed};

    fn ctx() -> NumericalContext {
        NumericalContext::default()
    }

    fn single(rows: &[&[f64]]) -> AlgebraElement {
        let m = ComplexMatrix::from_real_rows(rows);
        let alg = BlockAlgebra::new(vec![m.rows()]).unwrap();
        AlgebraElement::new(&alg, vec![m]).unwrap()
    }

    #[test]
    fn algebra_shape_validation() {
        assert!(BlockAlgebra::new(vec![]).is_err());
        assert!(BlockAlgebra::new(vec![2, 0]).is_err());
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        assert_eq!(alg.dim(), 13);
        assert!(AlgebraElement::new(&alg, vec![ComplexMatrix::identity(2)]).is_err());
        assert!(AlgebraElement::new(
            &alg,
            vec![ComplexMatrix::identity(3), ComplexMatrix::identity(2)]
        )
        .is_err());
    }

    #[test]
    fn left_mult_examples() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let one = AlgebraElement::identity(&alg);
        assert_eq!(left_mult_matrix(&one), ComplexMatrix::identity(13));

        let two = single(&[&[2.0]]);
        assert_eq!(left_mult_matrix(&two), ComplexMatrix::from_real_diagonal(&[2.0]));

        let p = single(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let l = left_mult_matrix(&p);
        // keeps E_11, E_12; kills the bottom-row units E_21, E_22
        assert_eq!(l, ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn multiplication_matrices_act_correctly() {
        let mut rng = rng_from_seed(3);
        let alg = BlockAlgebra::new(vec![3]).unwrap();
        let a = AlgebraElement::new(&alg, vec![complex_gaussian(&mut rng, 3, 3)]).unwrap();
        let x = AlgebraElement::new(&alg, vec![complex_gaussian(&mut rng, 3, 3)]).unwrap();
        let vec_of = |e: &AlgebraElement| {
            ComplexMatrix::from_row_major(9, 1, e.blocks()[0].to_row_major()).unwrap()
        };
        let ax = a.mul(&x).unwrap();
        let xa = x.mul(&a).unwrap();
        assert!((&left_mult_matrix(&a) * &vec_of(&x)).distance(&vec_of(&ax)) < 1e-12);
        assert!((&right_mult_matrix(&a) * &vec_of(&x)).distance(&vec_of(&xa)) < 1e-12);
    }

    #[test]
    fn element_ep_examples() {
        let alg = BlockAlgebra::new(vec![2, 1]).unwrap();
        let a = AlgebraElement::new(
            &alg,
            vec![
                ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
                ComplexMatrix::zeros(1, 1),
            ],
        )
        .unwrap();
        let r = element_is_ep(&a, &ctx()).unwrap();
        assert!(r.is_ep() && r.agree);

        let nil = single(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let r = element_is_ep(&nil, &ctx()).unwrap();
        assert!(!r.is_ep() && r.agree);
    }

    #[test]
    fn annihilator_and_ideal_match_multiplication_operators() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        for seed in 0..10 {
            let (a, _) = random_commuting_ep_elements(&alg, seed).unwrap();
            let la = left_mult_matrix(&a);
            let c = ctx().with_scale(a.norm());
            let ker = kernel_of(&la, &c).unwrap();
            assert!(ker.projector_distance(&annihilator_from_blocks(&a, &ctx()).unwrap()).unwrap() < 1e-10);
            let ran = range_of(&la, &c).unwrap();
            assert!(ran.projector_distance(&ideal_from_blocks(&a, &ctx()).unwrap()).unwrap() < 1e-10);
        }
    }

    #[test]
    fn ideal_examples() {
        let one = single(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let r = ideal_equality_check(&one, &one, &ctx()).unwrap();
        assert!(r.ideal_equal && r.consistent());

        let a = single(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let b = single(&[&[0.0, 0.0], &[0.0, 1.0]]);
        let r = ideal_equality_check(&a, &b, &ctx()).unwrap();
        assert!(r.ab_ep && r.ideal_equal);
        assert_eq!(r.ideal_equality_holds, Some(true));
        assert!(r.consistent());
    }

    #[test]
    fn random_commuting_elements_satisfy_the_ideal_equality() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        for seed in 0..20 {
            let (a, b) = random_commuting_ep_elements(&alg, seed).unwrap();
            let r = ideal_equality_check(&a, &b, &ctx()).unwrap();
            assert_eq!(r.ideal_equality_holds, Some(true), "seed {seed}");
            assert!(r.left_kernel_sum && r.consistent(), "seed {seed}");
        }
    }

    #[test]
    fn right_annihilator_reading_fails_as_a_criterion() {
        // a: projection onto span{e1, e2}; b: EP with Ran b = span{e1, e3}.
        // ab is not EP, yet the ideal equality and the right-annihilator sum
        // both hold, so that reading cannot characterize EP products.
        let a = single(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        let b = single(&[&[1.0, 0.0, 1.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
        let r = ideal_equality_check(&a, &b, &ctx()).unwrap();
        assert!(r.a_ep && r.b_ep && !r.ab_ep);
        assert!(r.ideal_equal);
        assert!(r.right_kernel_sum);
        // the left-annihilator reading gets it right
        assert!(!r.left_kernel_sum);
        assert_eq!(r.biconditional_holds, Some(true));
    }
}
