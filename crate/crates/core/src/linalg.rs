//! Dense complex matrices and the rank-revealing factorization everything
//! else is built on.
//!
//! [`ComplexMatrix`] wraps a column-major `nalgebra` matrix but its logical
//! layout for construction and serialization is row-major. Zero-row and
//! zero-column matrices are legal and flow through every operation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Maximum number of Jacobi sweeps granted to the SVD before it is declared
/// non-convergent. Desk-scale inputs converge in well under twenty.
const JACOBI_MAX_SWEEPS: usize = 100;

/// Tolerances used to turn exact closed-range statements into numerical ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericalContext {
    /// Singular values at or below `rank_rel_tol * sigma_max` count as zero.
    pub rank_rel_tol: f64,
    /// Absolute threshold for operator and projector equality.
    pub eq_tol: f64,
    /// Gaps `sigma_r / sigma_{r+1}` below this ratio flag the rank as
    /// ill-determined.
    pub gap_warn_ratio: f64,
    /// Absolute scale below which singular values count as zero regardless
    /// of `sigma_max`. Zero by default; set it when a matrix is a computed
    /// product whose natural scale is known (see [`Self::with_scale`]).
    pub rank_floor: f64,
}

impl Default for NumericalContext {
    fn default() -> Self {
        Self {
            rank_rel_tol: 1e-10,
            eq_tol: 1e-9,
            gap_warn_ratio: 1e4,
            rank_floor: 0.0,
        }
    }
}

impl NumericalContext {
    pub fn new(rank_rel_tol: f64, eq_tol: f64, gap_warn_ratio: f64) -> Result<Self> {
        let ctx = Self {
            rank_rel_tol,
            eq_tol,
            gap_warn_ratio,
            rank_floor: 0.0,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rank_rel_tol) || self.rank_rel_tol >= 1.0 {
            return Err(Error::InvalidContext(format!(
                "rank_rel_tol must lie in (0, 1), got {}",
                self.rank_rel_tol
            )));
        }
        if !positive(self.eq_tol) {
            return Err(Error::InvalidContext(format!(
                "eq_tol must be positive, got {}",
                self.eq_tol
            )));
        }
        if !positive(self.gap_warn_ratio) {
            return Err(Error::InvalidContext(format!(
                "gap_warn_ratio must be positive, got {}",
                self.gap_warn_ratio
            )));
        }
        if !(self.rank_floor.is_finite() && self.rank_floor >= 0.0) {
            return Err(Error::InvalidContext(format!(
                "rank_floor must be finite and non-negative, got {}",
                self.rank_floor
            )));
        }
        Ok(())
    }

    pub fn with_eq_tol(mut self, eq_tol: f64) -> Self {
        self.eq_tol = eq_tol;
        self
    }

    pub fn with_rank_rel_tol(mut self, rank_rel_tol: f64) -> Self {
        self.rank_rel_tol = rank_rel_tol;
        self
    }

    /// Raises the rank floor to at least `rank_rel_tol · scale`, so that a
    /// matrix such as a product `TS` is ranked against `‖T‖‖S‖` rather than
    /// against its own (possibly rounding-level) largest singular value. An
    /// existing higher floor is kept.
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.rank_floor = self.rank_floor.max(self.rank_rel_tol * scale);
        self
    }
}

/// Dense complex rectangular matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Builds a matrix from row-major entries, rejecting NaN and infinities.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if let Some(k) = entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    /// Real matrix from a list of rows. Panics on ragged or non-finite input;
    /// meant for fixtures.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::from_row_major(nrows, ncols, entries).expect("finite fixture entries")
    }

    /// Complex matrix from a list of rows. Panics on ragged or non-finite input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        let entries = rows.iter().flatten().copied().collect();
        Self::from_row_major(nrows, ncols, entries).expect("finite fixture entries")
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = d;
        }
        Self(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        let mut m = DMatrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Self(m)
    }

    pub(crate) fn from_inner(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.0[(row, col)] = value;
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch {
                op: "multiply",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        Ok(Self(&self.0 * &rhs.0))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch {
                op: "subtract",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        Ok(Self(&self.0 - &rhs.0))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator 2-norm (largest singular value).
    pub fn norm2(&self) -> f64 {
        if self.rows() == 0 || self.cols() == 0 {
            return 0.0;
        }
        singular_values(self).first().copied().unwrap_or(0.0)
    }

    /// Smallest singular value of a square matrix; `0` for the empty matrix
    /// is avoided by returning `+inf` (the empty operator is invertible).
    pub fn sigma_min(&self) -> f64 {
        if self.rows() == 0 || self.cols() == 0 {
            return f64::INFINITY;
        }
        singular_values(self).last().copied().unwrap_or(0.0)
    }

    /// Columns `start..end` as a new matrix.
    pub fn columns(&self, start: usize, end: usize) -> Self {
        Self(self.0.columns(start, end - start).into_owned())
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.0.column(j).iter().copied().collect()
    }

    /// Horizontal concatenation `[self rhs]`.
    pub fn hstack(&self, rhs: &Self) -> Result<Self> {
        if self.rows() != rhs.rows() {
            return Err(Error::DimensionMismatch {
                op: "hstack",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut m = DMatrix::zeros(self.rows(), self.cols() + rhs.cols());
        m.columns_mut(0, self.cols()).copy_from(&self.0);
        m.columns_mut(self.cols(), rhs.cols()).copy_from(&rhs.0);
        Ok(Self(m))
    }

    /// Block-diagonal assembly `diag(self, rhs)`.
    pub fn block_diag(&self, rhs: &Self) -> Self {
        let (r1, c1) = self.shape();
        let (r2, c2) = rhs.shape();
        let mut m = DMatrix::zeros(r1 + r2, c1 + c2);
        m.view_mut((0, 0), (r1, c1)).copy_from(&self.0);
        m.view_mut((r1, c1), (r2, c2)).copy_from(&rhs.0);
        Self(m)
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kronecker(&self, rhs: &Self) -> Self {
        Self(self.0.kronecker(&rhs.0))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// `‖self − rhs‖_F`; panics on shape mismatch.
    pub fn distance(&self, rhs: &Self) -> f64 {
        (self - rhs).frobenius_norm()
    }

    /// Solves `self · X = rhs` for square invertible `self` by LU with
    /// partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        if !self.is_square() || self.rows() != rhs.rows() {
            return None;
        }
        if self.rows() == 0 {
            return Some(Self::zeros(0, rhs.cols()));
        }
        self.0.clone().lu().solve(&rhs.0).map(Self)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "\n  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
        }
        write!(f, "]")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on dimension mismatch; use [`multiply`] for a checked product.
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product dimensions")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: Self) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum dimensions");
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix difference dimensions")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Conjugate transpose of `t`.
pub fn adjoint(t: &ComplexMatrix) -> ComplexMatrix {
    t.adjoint()
}

/// Checked matrix product.
pub fn multiply(t: &ComplexMatrix, s: &ComplexMatrix) -> Result<ComplexMatrix> {
    t.try_mul(s)
}

/// Singular value decomposition `T = U · diag(σ) · W*` with `σ`
/// nonincreasing. [`factorize`] returns `min(rows, cols)` columns in each
/// factor.
#[derive(Debug, Clone)]
pub struct SingularFactorization {
    pub left_factor: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right_factor: ComplexMatrix,
}

impl SingularFactorization {
    /// `U · diag(σ) · W*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.left_factor.cols();
        let mut scaled = self.left_factor.clone();
        for (j, &s) in self.singular_values.iter().take(k).enumerate() {
            scaled.0.column_mut(j).scale_mut(s);
        }
        &scaled * &self.right_factor.columns(0, k).adjoint()
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

/// One-sided Jacobi (Hestenes) SVD on the columns of `t`.
///
/// Returns the unsorted column norms, the rotated columns and, when
/// requested, the accumulated `cols × cols` unitary.
struct JacobiResult {
    columns: Vec<Vec<C64>>,
    norms: Vec<f64>,
    /// Column norms at or below this are rounding noise.
    negligible: f64,
    right: Option<Vec<Vec<C64>>>,
}

fn jacobi_sweeps(t: &ComplexMatrix, with_right: bool) -> Result<JacobiResult> {
    let (m, n) = t.shape();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| t.0.column(j).iter().copied().collect()).collect();
    let mut right: Option<Vec<Vec<C64>>> = with_right.then(|| {
        (0..n)
            .map(|j| {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[j] = C64::new(1.0, 0.0);
                e
            })
            .collect()
    });
    let tol = f64::EPSILON;
    // Columns below this norm are rounding noise; their mutual inner
    // products never settle under the relative test.
    let frob_sq: f64 = cols.iter().flatten().map(|z| z.norm_sqr()).sum();
    let negligible_sq = (f64::EPSILON * f64::EPSILON) * frob_sq;

    let mut converged = n < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&cols[p], &cols[q]);
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = C64::new(0.0, 0.0);
                    for i in 0..m {
                        alpha += cp[i].norm_sqr();
                        beta += cq[i].norm_sqr();
                        gamma += cp[i].conj() * cq[i];
                    }
                    (alpha, beta, gamma)
                };
                let g = gamma.norm();
                if g == 0.0
                    || g <= tol * (alpha * beta).sqrt()
                    || alpha <= negligible_sq
                    || beta <= negligible_sq
                {
                    continue;
                }
                rotated = true;
                // Fold the phase of γ into column q, then rotate by a real
                // Jacobi angle that zeroes the real off-diagonal entry.
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let tan = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + tan * tan).sqrt();
                let s = c * tan;
                let conj_phase = phase.conj();
                rotate_pair(&mut cols, p, q, c, s, conj_phase);
                if let Some(v) = right.as_mut() {
                    rotate_pair(v, p, q, c, s, conj_phase);
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::ConvergenceFailure { rows: m, cols: n });
    }
    let norms = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    Ok(JacobiResult {
        columns: cols,
        norms,
        negligible: negligible_sq.sqrt(),
        right,
    })
}

/// `[x_p, x_q] ← [c·x_p − s·ω·x_q, s·x_p + c·ω·x_q]` with `ω = conj(phase)`.
fn rotate_pair(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, omega: C64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
        let w = omega * *xq;
        let new_p = *xp * c - w * s;
        let new_q = *xp * s + w * c;
        *xp = new_p;
        *xq = new_q;
    }
}

pub(crate) fn singular_values(t: &ComplexMatrix) -> Vec<f64> {
    // Fewer, longer columns converge faster.
    let src = if t.rows() < t.cols() { t.adjoint() } else { t.clone() };
    let mut s = match jacobi_sweeps(&src, false) {
        Ok(r) => r.norms,
        Err(_) => vec![f64::NAN],
    };
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Extends orthonormal columns to `target` of them by Gram-Schmidt on the
/// standard basis vector with the largest residual at each step.
fn complete_orthonormal(mut cols: Vec<Vec<C64>>, dim: usize, target: usize) -> Vec<Vec<C64>> {
    let project_out = |v: &mut Vec<C64>, basis: &[Vec<C64>]| {
        for _ in 0..2 {
            for c in basis {
                let proj: C64 = c.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= proj * ci;
                }
            }
        }
    };
    while cols.len() < target {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for i in 0..dim {
            let mut v = vec![C64::new(0.0, 0.0); dim];
            v[i] = C64::new(1.0, 0.0);
            project_out(&mut v, &cols);
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, v));
            }
        }
        match best {
            Some((norm, v)) if norm > 0.0 => cols.push(v.into_iter().map(|z| z / norm).collect()),
            _ => break,
        }
    }
    cols
}

/// Sorted SVD with a `cols × cols` right factor; the left factor has
/// `min(rows, cols)` columns.
fn jacobi_svd(t: &ComplexMatrix) -> Result<SingularFactorization> {
    let (m, n) = t.shape();
    let k = m.min(n);
    let res = jacobi_sweeps(t, true)?;
    let right = res.right.expect("right factor requested");

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| res.norms[b].total_cmp(&res.norms[a]));

    let sigma: Vec<f64> = order.iter().take(k).map(|&j| res.norms[j]).collect();
    let mut left_cols: Vec<Vec<C64>> = Vec::with_capacity(k);
    for &j in order.iter().take(k) {
        let s = res.norms[j];
        // Noise-level columns were never orthogonalized; their left
        // vectors come from the completion below instead.
        if s > res.negligible {
            left_cols.push(res.columns[j].iter().map(|z| z / s).collect());
        } else {
            break;
        }
    }
    let left_cols = complete_orthonormal(left_cols, m, k);

    let mut left = DMatrix::zeros(m, k);
    for (j, col) in left_cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            left[(i, j)] = z;
        }
    }
    let mut right_m = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for (i, &z) in right[src].iter().enumerate() {
            right_m[(i, dst)] = z;
        }
    }
    let mut sigma_all = sigma;
    sigma_all.extend(order.iter().skip(k).map(|&j| res.norms[j]));
    Ok(SingularFactorization {
        left_factor: ComplexMatrix(left),
        singular_values: sigma_all,
        right_factor: ComplexMatrix(right_m),
    })
}

/// Thin SVD of `t`.
pub fn factorize(t: &ComplexMatrix) -> Result<SingularFactorization> {
    let (m, n) = t.shape();
    if m == 0 || n == 0 {
        return Ok(SingularFactorization {
            left_factor: ComplexMatrix::zeros(m, 0),
            singular_values: Vec::new(),
            right_factor: ComplexMatrix::zeros(n, 0),
        });
    }
    if m < n {
        // T* = U'ΣW'*  ⇒  T = W'ΣU'*.
        let f = jacobi_svd(&t.adjoint())?;
        return Ok(SingularFactorization {
            left_factor: f.right_factor,
            singular_values: f.singular_values,
            right_factor: f.left_factor,
        });
    }
    jacobi_svd(t)
}

/// SVD whose right factor is a full `cols × cols` unitary. The singular
/// value list has `cols` entries; those past `min(rows, cols)` are the
/// (zero) norms of directions annihilated by `t`.
pub(crate) fn factorize_full_right(t: &ComplexMatrix) -> Result<SingularFactorization> {
    let (m, n) = t.shape();
    if n == 0 {
        return factorize(t);
    }
    if m >= n {
        return jacobi_svd(t);
    }
    // Wide input: factor the adjoint, then extend the row-space basis to a
    // unitary; the added columns span the kernel.
    let f = factorize(t)?;
    let right_cols: Vec<Vec<C64>> = (0..m).map(|j| f.right_factor.column(j)).collect();
    let right_cols = complete_orthonormal(right_cols, n, n);
    let mut sigma = f.singular_values;
    sigma.resize(n, 0.0);
    Ok(SingularFactorization {
        left_factor: f.left_factor,
        singular_values: sigma,
        right_factor: ComplexMatrix::from_columns(n, &right_cols),
    })
}

/// Whether the numerical rank sits on a clear spectral gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Determinacy {
    WellDetermined,
    /// `σ_r / σ_{r+1}` fell below the warning ratio.
    IllDetermined { gap_ratio: f64 },
}

impl Determinacy {
    pub fn is_well_determined(&self) -> bool {
        matches!(self, Determinacy::WellDetermined)
    }

    /// Combines two flags, keeping the worse one.
    pub fn and(self, other: Determinacy) -> Determinacy {
        match (self, other) {
            (Determinacy::WellDetermined, d) | (d, Determinacy::WellDetermined) => d,
            (
                Determinacy::IllDetermined { gap_ratio: a },
                Determinacy::IllDetermined { gap_ratio: b },
            ) => Determinacy::IllDetermined {
                gap_ratio: a.min(b),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericalRank {
    pub rank: usize,
    pub determinacy: Determinacy,
}

/// Counts singular values above `rank_rel_tol · σ_max` and flags a narrow gap
/// between the last kept and the first dropped value.
pub fn numerical_rank(f: &SingularFactorization, ctx: &NumericalContext) -> NumericalRank {
    rank_from_spectrum(&f.singular_values, ctx)
}

pub fn rank_from_spectrum(sigma: &[f64], ctx: &NumericalContext) -> NumericalRank {
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let threshold = (ctx.rank_rel_tol * sigma_max).max(ctx.rank_floor);
    if sigma_max == 0.0 || sigma_max <= threshold {
        return NumericalRank {
            rank: 0,
            determinacy: Determinacy::WellDetermined,
        };
    }
    let rank = sigma.iter().take_while(|&&s| s > threshold).count();
    let determinacy = match sigma.get(rank) {
        Some(&next) if next > 0.0 => {
            let gap_ratio = sigma[rank - 1] / next;
            if gap_ratio < ctx.gap_warn_ratio {
                Determinacy::IllDetermined { gap_ratio }
            } else {
                Determinacy::WellDetermined
            }
        }
        _ => Determinacy::WellDetermined,
    };
    NumericalRank { rank, determinacy }
}

/// Cholesky factor of a Hermitian positive-definite matrix, reusable across
/// right-hand sides.
pub(crate) struct HpdFactor(Option<nalgebra::linalg::Cholesky<C64, nalgebra::Dyn>>);

impl HpdFactor {
    pub(crate) fn new(a: &ComplexMatrix) -> Option<Self> {
        if a.rows() == 0 {
            return Some(HpdFactor(None));
        }
        a.0.clone().cholesky().map(|c| HpdFactor(Some(c)))
    }

    pub(crate) fn solve(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        match &self.0 {
            Some(c) => ComplexMatrix(c.solve(&rhs.0)),
            None => ComplexMatrix::zeros(0, rhs.cols()),
        }
    }
}
