//! Moore-Penrose inverse by two independent routes.
//!
//! [`mp_svd`] truncates the singular value decomposition at the numerical
//! rank. [`mp_tikhonov`] follows the regularized limit
//! `G_ω = (ωI + T*T)⁻¹T*` down a schedule of `ω → 0⁺`, solving each system
//! by Cholesky. [`penrose_residuals`] scores any candidate against the four
//! defining equations.

use crate::compensated::tikhonov_residual;
use crate::error::{Error, Result};
use crate::linalg::{
    factorize, numerical_rank, ComplexMatrix, HpdFactor, NumericalContext, NumericalRank, C64,
};
use crate::subspace::{kernel_of, range_of, Subspace};

#[derive(Debug, Clone)]
pub struct MpInverse {
    pub inverse: ComplexMatrix,
    /// Rank used for truncation, with the gap advisory.
    pub rank: NumericalRank,
}

/// Truncated-SVD pseudoinverse `W · diag(1/σ_k, k < r) · U*`.
pub fn mp_svd(t: &ComplexMatrix, ctx: &NumericalContext) -> Result<MpInverse> {
    let f = factorize(t)?;
    let rank = numerical_rank(&f, ctx);
    let r = rank.rank;
    let mut right = f.right_factor.columns(0, r);
    for k in 0..r {
        let inv = C64::new(1.0 / f.singular_values[k], 0.0);
        for i in 0..right.rows() {
            right.set(i, k, right.get(i, k) * inv);
        }
    }
    let left = f.left_factor.columns(0, r);
    Ok(MpInverse {
        inverse: &right * &left.adjoint(),
        rank,
    })
}

/// Shorthand for `mp_svd(t, ctx)?.inverse`.
pub fn pinv(t: &ComplexMatrix, ctx: &NumericalContext) -> Result<ComplexMatrix> {
    Ok(mp_svd(t, ctx)?.inverse)
}

/// Geometric schedule `1e-1, 1e-2, …, 1e-10`.
pub fn default_schedule() -> Vec<f64> {
    (1..=10).map(|k| 10f64.powi(-k)).collect()
}

#[derive(Debug, Clone)]
pub struct TikhonovTrace {
    pub omegas: Vec<f64>,
    pub iterates: Vec<ComplexMatrix>,
    /// `‖G_ω − G_svd‖_F` per ω.
    pub errors: Vec<f64>,
    pub reference: ComplexMatrix,
}

impl TikhonovTrace {
    /// Errors divided by `‖G_svd‖_F` (equal to the raw errors when the
    /// reference vanishes).
    pub fn relative_errors(&self) -> Vec<f64> {
        let scale = self.reference.frobenius_norm();
        let scale = if scale > 0.0 { scale } else { 1.0 };
        self.errors.iter().map(|e| e / scale).collect()
    }

    pub fn final_iterate(&self) -> &ComplexMatrix {
        self.iterates.last().expect("schedule is nonempty")
    }

    pub fn final_error(&self) -> f64 {
        *self.errors.last().expect("schedule is nonempty")
    }

    /// Whether errors never grow by more than `slack` between steps.
    pub fn is_nonincreasing(&self, slack: f64) -> bool {
        self.errors.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

/// `(ωI + T*T)⁻¹ T*` via a Hermitian positive-definite solve.
pub fn tikhonov_iterate(t: &ComplexMatrix, omega: f64) -> Result<ComplexMatrix> {
    let t_adj = t.adjoint();
    let mut gram = &t_adj * t;
    for k in 0..gram.rows() {
        let d = gram.get(k, k);
        gram.set(k, k, C64::new(d.re + omega, 0.0));
    }
    let factor = HpdFactor::new(&gram).ok_or(Error::LinearSolveFailure { omega })?;
    let mut x = factor.solve(&t_adj);
    // The factor of the rounded normal matrix is only accurate to about
    // eps·cond; refining against an extra-precise residual recovers the
    // iterate of the stored operator instead of one polluted at O(eps/ω).
    for _ in 0..REFINE_MAX_STEPS {
        let residual = tikhonov_residual(t, omega, &x, &t_adj);
        let delta = factor.solve(&residual);
        x = &x + &delta;
        if !delta.frobenius_norm().is_finite() {
            return Err(Error::LinearSolveFailure { omega });
        }
        if delta.frobenius_norm() <= f64::EPSILON * x.frobenius_norm() {
            break;
        }
    }
    Ok(x)
}

const REFINE_MAX_STEPS: usize = 30;

fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidSchedule("schedule is empty".into()));
    }
    if let Some(w) = schedule.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::InvalidSchedule(format!("omega {w} is not positive")));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSchedule(
            "omegas must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// Regularized iterates along `schedule`, each compared with [`mp_svd`].
pub fn mp_tikhonov(
    t: &ComplexMatrix,
    schedule: &[f64],
    ctx: &NumericalContext,
) -> Result<TikhonovTrace> {
    validate_schedule(schedule)?;
    let reference = mp_svd(t, ctx)?;
    let (m, n) = t.shape();
    if reference.rank.rank == 0 {
        return Ok(TikhonovTrace {
            omegas: schedule.to_vec(),
            iterates: vec![ComplexMatrix::zeros(n, m); schedule.len()],
            errors: vec![0.0; schedule.len()],
            reference: reference.inverse,
        });
    }
    let mut iterates = Vec::with_capacity(schedule.len());
    let mut errors = Vec::with_capacity(schedule.len());
    for &omega in schedule {
        let g = tikhonov_iterate(t, omega)?;
        errors.push(g.distance(&reference.inverse));
        iterates.push(g);
    }
    Ok(TikhonovTrace {
        omegas: schedule.to_vec(),
        iterates,
        errors,
        reference: reference.inverse,
    })
}

/// Residuals of a candidate inverse against the four Penrose equations.
#[derive(Debug, Clone)]
pub struct PenroseReport {
    pub candidate: ComplexMatrix,
    /// `‖TGT−T‖_F`, `‖GTG−G‖_F`, `‖(TG)*−TG‖_F`, `‖(GT)*−GT‖_F`.
    pub residuals: [f64; 4],
    /// `TG` is Hermitian and idempotent within `eq_tol`.
    pub tg_is_projector: bool,
    /// `GT` is Hermitian and idempotent within `eq_tol`.
    pub gt_is_projector: bool,
}

impl PenroseReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Every residual at or below `tol`.
    pub fn within(&self, tol: f64) -> bool {
        self.residuals.iter().all(|&r| r <= tol)
    }

    /// Residuals divided by the norm of the quantity each equation
    /// reproduces: `‖T‖`, `‖G‖`, `‖TG‖`, `‖GT‖` (a zero norm leaves the
    /// residual as is).
    pub fn relative_residuals(&self, t: &ComplexMatrix) -> [f64; 4] {
        let g = &self.candidate;
        let scales = [
            t.frobenius_norm(),
            g.frobenius_norm(),
            (t * g).frobenius_norm(),
            (g * t).frobenius_norm(),
        ];
        let mut out = self.residuals;
        for (r, s) in out.iter_mut().zip(scales) {
            if s > 0.0 {
                *r /= s;
            }
        }
        out
    }
}

fn projector_defect(p: &ComplexMatrix) -> f64 {
    let hermitian = p.distance(&p.adjoint());
    let idempotent = p.distance(&(p * p));
    hermitian.max(idempotent)
}

pub fn penrose_residuals(
    t: &ComplexMatrix,
    g: &ComplexMatrix,
    ctx: &NumericalContext,
) -> Result<PenroseReport> {
    if g.shape() != (t.cols(), t.rows()) {
        return Err(Error::DimensionMismatch {
            op: "penrose_residuals",
            left: t.shape(),
            right: g.shape(),
        });
    }
    let tg = t * g;
    let gt = g * t;
    let residuals = [
        (&tg * t).distance(t),
        (&gt * g).distance(g),
        tg.adjoint().distance(&tg),
        gt.adjoint().distance(&gt),
    ];
    Ok(PenroseReport {
        candidate: g.clone(),
        residuals,
        tg_is_projector: projector_defect(&tg) <= ctx.eq_tol,
        gt_is_projector: projector_defect(&gt) <= ctx.eq_tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    /// Projector distance (or decomposition defect) behind the verdict.
    pub distance: f64,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct MpIdentitiesReport {
    pub checks: Vec<IdentityCheck>,
}

impl MpIdentitiesReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

fn equality(name: &'static str, a: &Subspace, b: &Subspace) -> Result<IdentityCheck> {
    let distance = a.projector_distance(b)?;
    Ok(IdentityCheck {
        name,
        distance,
        holds: distance <= a.ctx().eq_tol,
    })
}

/// `X = A ⊕ B` orthogonally, scored by `‖P_A + P_B − I‖₂`.
fn orthogonal_sum(name: &'static str, a: &Subspace, b: &Subspace) -> Result<IdentityCheck> {
    let n = a.ambient_dim();
    let total = &a.projector() + &b.projector();
    let distance = (&total - &ComplexMatrix::identity(n)).norm2();
    Ok(IdentityCheck {
        name,
        distance,
        holds: distance <= a.ctx().eq_tol,
    })
}

/// Range and kernel identities of `T†`, each checked as a subspace equality
/// or an orthogonal decomposition.
pub fn mp_identities_check(t: &ComplexMatrix, ctx: &NumericalContext) -> Result<MpIdentitiesReport> {
    let g = pinv(t, ctx)?;
    let t_adj = t.adjoint();
    let gt = &g * t;
    let tg = t * &g;

    let ran_g = range_of(&g, ctx)?;
    let ker_g = kernel_of(&g, ctx)?;
    let ran_t = range_of(t, ctx)?;
    let ker_t = kernel_of(t, ctx)?;

    let checks = vec![
        equality("Ran(T+) = Ran(T+T)", &ran_g, &range_of(&gt, ctx)?)?,
        equality("Ran(T) = Ran(TT+)", &ran_t, &range_of(&tg, ctx)?)?,
        equality("Ker(T) = Ker(T+T)", &ker_t, &kernel_of(&gt, ctx)?)?,
        equality("Ker(T+) = Ker(TT+)", &ker_g, &kernel_of(&tg, ctx)?)?,
        equality("Ran(T+) = Ran(T*)", &ran_g, &range_of(&t_adj, ctx)?)?,
        equality("Ker(T+) = Ker(T*)", &ker_g, &kernel_of(&t_adj, ctx)?)?,
        orthogonal_sum("X = Ker(T) + Ran(T+)", &ker_t, &ran_g)?,
        orthogonal_sum("X = Ker(T+) + Ran(T)", &ker_g, &ran_t)?,
    ];
    Ok(MpIdentitiesReport { checks })
}
