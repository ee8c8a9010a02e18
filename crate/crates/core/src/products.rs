//! Products of EP operators: the commuting lemma, the commuting-product
//! theorem, invariance inclusions and the range/kernel characterization of
//! when `TS` is EP.
//!
//! A product `TS` is ranked against `‖T‖·‖S‖` rather than against its own
//! largest singular value, so a product that vanishes up to rounding is
//! treated as the zero operator.

use crate::ep::{is_ep, EpReport};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Determinacy, NumericalContext};
use crate::pseudoinverse::pinv;
use crate::subspace::{intersect, kernel_of, range_of, sum, Subspace};

/// Condition (ii) — `Ker(T) + Ker(S)` dense in its biorthogonal complement —
/// is vacuous for finite-dimensional modules.
pub const COND_II_NOTE: &str =
    "condition (ii) holds automatically: every subspace of a finite-dimensional space is closed";

fn check_pair(t: &ComplexMatrix, s: &ComplexMatrix) -> Result<()> {
    if !t.is_square() {
        return Err(Error::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    if t.shape() != s.shape() {
        return Err(Error::DimensionMismatch {
            op: "operator pair",
            left: t.shape(),
            right: s.shape(),
        });
    }
    Ok(())
}

/// Context for analysing `TS`, with the rank floor tied to `‖T‖‖S‖`.
pub fn product_context(t: &ComplexMatrix, s: &ComplexMatrix, ctx: &NumericalContext) -> NumericalContext {
    ctx.with_scale(t.norm2() * s.norm2())
}

fn commutator_residual(t: &ComplexMatrix, s: &ComplexMatrix) -> f64 {
    (&(t * s) - &(s * t)).frobenius_norm()
}

fn require_commuting(t: &ComplexMatrix, s: &ComplexMatrix, ctx: &NumericalContext) -> Result<()> {
    let residual = commutator_residual(t, s);
    if residual > ctx.eq_tol * (1.0 + t.norm2() * s.norm2()) {
        return Err(Error::NotCommuting { residual });
    }
    Ok(())
}

fn require_ep(label: &str, t: &ComplexMatrix, ctx: &NumericalContext) -> Result<EpReport> {
    let report = is_ep(t, ctx)?;
    if !report.is_ep {
        return Err(Error::Precondition(format!("{label} is not EP")));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy)]
pub struct CommutingMpCheck {
    /// `‖S·T† − T†·S‖_F`.
    pub residual: f64,
    /// `eq_tol · (1 + ‖S‖‖T†‖)`.
    pub bound: f64,
    pub holds: bool,
}

/// If `S` commutes with `T` then it commutes with `T†`.
pub fn commuting_mp_check(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    ctx: &NumericalContext,
) -> Result<CommutingMpCheck> {
    check_pair(t, s)?;
    require_commuting(t, s, ctx)?;
    let ran = range_of(t, ctx)?;
    if let Determinacy::IllDetermined { gap_ratio } = ran.determinacy() {
        return Err(Error::IllDeterminedRank {
            rank: ran.dim(),
            gap_ratio,
        });
    }
    let g = pinv(t, ctx)?;
    let residual = (&(s * &g) - &(&g * s)).frobenius_norm();
    let bound = ctx.eq_tol * (1.0 + s.norm2() * g.norm2());
    Ok(CommutingMpCheck {
        residual,
        bound,
        holds: residual <= bound,
    })
}

#[derive(Debug, Clone)]
pub struct CommutingProductReport {
    pub ts_ep: EpReport,
    /// `‖(TS)† − S†T†‖_F`.
    pub dist_s_t: f64,
    /// `‖(TS)† − T†S†‖_F`.
    pub dist_t_s: f64,
    pub tol: f64,
    pub holds: bool,
}

/// For commuting EP operators, `TS` is EP and `(TS)† = S†T† = T†S†`.
pub fn commuting_ep_product(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    ctx: &NumericalContext,
) -> Result<CommutingProductReport> {
    check_pair(t, s)?;
    require_ep("T", t, ctx)?;
    require_ep("S", s, ctx)?;
    require_commuting(t, s, ctx)?;
    let ts = t * s;
    let pctx = product_context(t, s, ctx);
    let ts_ep = is_ep(&ts, &pctx)?;
    let g_ts = pinv(&ts, &pctx)?;
    let g_t = pinv(t, ctx)?;
    let g_s = pinv(s, ctx)?;
    let dist_s_t = g_ts.distance(&(&g_s * &g_t));
    let dist_t_s = g_ts.distance(&(&g_t * &g_s));
    let tol = ctx.eq_tol * (1.0 + g_t.norm2() * g_s.norm2());
    Ok(CommutingProductReport {
        holds: ts_ep.is_ep && dist_s_t <= tol && dist_t_s <= tol,
        ts_ep,
        dist_s_t,
        dist_t_s,
        tol,
    })
}

/// `‖(I − P_V)·A·P_V‖₂ / ‖A‖₂`: how far `A` is from leaving `V` invariant.
fn invariance_gap(a: &ComplexMatrix, v: &Subspace) -> f64 {
    let scale = a.norm2();
    if scale == 0.0 || v.dim() == 0 {
        return 0.0;
    }
    let image = a * v.basis();
    let outside = &image - &(v.basis() * &(&v.basis().adjoint() * &image));
    outside.norm2() / scale
}

#[derive(Debug, Clone, Copy)]
pub struct Inclusions {
    /// `T(Ran S) ⊆ Ran S`.
    pub t_preserves_ran_s: bool,
    /// `S*(Ran T) ⊆ Ran T`.
    pub s_adj_preserves_ran_t: bool,
    /// Relative invariance gaps behind the two verdicts.
    pub gaps: [f64; 2],
}

impl Inclusions {
    pub fn both(&self) -> bool {
        self.t_preserves_ran_s && self.s_adj_preserves_ran_t
    }
}

/// When `T`, `S` and `TS` are EP: `T(Ran S) ⊆ Ran S` and
/// `S*(Ran T) ⊆ Ran T`.
pub fn invariance_inclusions(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    ctx: &NumericalContext,
) -> Result<Inclusions> {
    check_pair(t, s)?;
    require_ep("T", t, ctx)?;
    require_ep("S", s, ctx)?;
    require_ep("TS", &(t * s), &product_context(t, s, ctx))?;
    inclusions_unchecked(t, s, ctx)
}

fn inclusions_unchecked(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    ctx: &NumericalContext,
) -> Result<Inclusions> {
    let ran_s = range_of(s, ctx)?;
    let ran_t = range_of(t, ctx)?;
    let gaps = [
        invariance_gap(t, &ran_s),
        invariance_gap(&s.adjoint(), &ran_t),
    ];
    Ok(Inclusions {
        t_preserves_ran_s: gaps[0] <= ctx.eq_tol,
        s_adj_preserves_ran_t: gaps[1] <= ctx.eq_tol,
        gaps,
    })
}

/// A logical relation between the conditions, evaluated on one pair.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub relation: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct ProductReport {
    pub ts_ep: EpReport,
    /// (i): `TS` is EP.
    pub cond_i: bool,
    pub cond_ii_note: &'static str,
    /// (iii): `Ran(TS) = Ran(T) ∩ Ran(S)`.
    pub cond_iii: bool,
    pub cond_iii_distance: f64,
    /// (iv): `Ker(TS) = Ker(T) + Ker(S)`.
    pub cond_iv: bool,
    pub cond_iv_distance: f64,
    /// Evaluated only when `TS` is EP, since that is their hypothesis.
    pub inclusions: Option<Inclusions>,
    pub verdicts: Vec<Verdict>,
}

impl ProductReport {
    /// Every evaluated relation holds.
    pub fn consistent(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
            && self.inclusions.is_none_or(|inc| inc.both())
    }
}

/// Range/kernel characterization of EP products for EP `T`, `S`:
/// (i) ⇒ (iii), and (i) ⇔ (iii) ∧ (iv) (with (ii) automatic).
pub fn ep_product_conditions(t: &ComplexMatrix, s: &ComplexMatrix, ctx: &NumericalContext) -> Result<ProductReport> {
    check_pair(t, s)?;
    require_ep("T", t, ctx)?;
    require_ep("S", s, ctx)?;
    let ts = t * s;
    let pctx = product_context(t, s, ctx);
    let ts_ep = is_ep(&ts, &pctx)?;

    let ran_ts = range_of(&ts, &pctx)?;
    let meet = intersect(&range_of(t, ctx)?, &range_of(s, ctx)?)?;
    let cond_iii_distance = ran_ts.projector_distance(&meet)?;

    let ker_ts = kernel_of(&ts, &pctx)?;
    let join = sum(&kernel_of(t, ctx)?, &kernel_of(s, ctx)?)?;
    let cond_iv_distance = ker_ts.projector_distance(&join)?;

    let cond_i = ts_ep.is_ep;
    let cond_iii = cond_iii_distance <= ctx.eq_tol;
    let cond_iv = cond_iv_distance <= ctx.eq_tol;
    let inclusions = if cond_i {
        Some(inclusions_unchecked(t, s, ctx)?)
    } else {
        None
    };
    let verdicts = vec![
        Verdict {
            relation: "(i) -> (iii)",
            holds: !cond_i || cond_iii,
        },
        Verdict {
            relation: "(i) and (ii) <-> (iii) and (iv)",
            holds: cond_i == (cond_iii && cond_iv),
        },
    ];
    Ok(ProductReport {
        ts_ep,
        cond_i,
        cond_ii_note: COND_II_NOTE,
        cond_iii,
        cond_iii_distance,
        cond_iv,
        cond_iv_distance,
        inclusions,
        verdicts,
    })
}

#[derive(Debug, Clone)]
pub struct KernelSplitCheck {
    /// Projector distance between `Ker(TS)` and `Ker(S) ⊕ Q_S·Ker(S₁)`.
    pub distance: f64,
    pub holds: bool,
    pub dim_ker_s: usize,
    pub dim_ker_s1: usize,
}

/// `Ker(TS) = Ker(S) ⊕ Ker(S₁)`, where `S₁ = Q_T*·S·Q_S : Ran(S) → Ran(T)`
/// is the compression of `S` in orthonormal range bases `Q_T`, `Q_S`.
pub fn kernel_split_check(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    ctx: &NumericalContext,
) -> Result<KernelSplitCheck> {
    check_pair(t, s)?;
    require_ep("T", t, ctx)?;
    require_ep("S", s, ctx)?;
    let q_t = range_of(t, ctx)?;
    let q_s = range_of(s, ctx)?;
    let s1 = &(&q_t.basis().adjoint() * s) * q_s.basis();
    // S₁ is a compression of S; rank it on S's scale.
    let ker_s1 = kernel_of(&s1, &ctx.with_scale(s.norm2()))?;
    let embedded = Subspace::from_orthonormal(q_s.basis() * ker_s1.basis(), *ctx);
    let ker_s = kernel_of(s, ctx)?;
    let split = sum(&ker_s, &embedded)?;
    let ker_ts = kernel_of(&(t * s), &product_context(t, s, ctx))?;
    let distance = ker_ts.projector_distance(&split)?;
    Ok(KernelSplitCheck {
        distance,
        holds: distance <= ctx.eq_tol,
        dim_ker_s: ker_s.dim(),
        dim_ker_s1: ker_s1.dim(),
    })
}

#[derive(Debug, Clone)]
pub struct ClosedRangeNote {
    /// `dim(Ker(T) + Ran(S))`.
    pub sum_dim: usize,
    pub complement_dim: usize,
    /// The sum and its orthogonal complement split the space.
    pub complemented: bool,
    pub note: &'static str,
}

/// `TS` has closed range iff `Ker(T) + Ran(S)` is an orthogonal summand; in
/// finite dimension the criterion is always met.
pub fn product_closed_range_note(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    ctx: &NumericalContext,
) -> Result<ClosedRangeNote> {
    check_pair(t, s)?;
    let total = sum(&kernel_of(t, ctx)?, &range_of(s, ctx)?)?;
    let comp = total.complement();
    let cross = (&total.basis().adjoint() * comp.basis()).norm2();
    let complemented = total.dim() + comp.dim() == t.rows() && cross <= ctx.eq_tol;
    Ok(ClosedRangeNote {
        sum_dim: total.dim(),
        complement_dim: comp.dim(),
        complemented,
        note: "finite dimension: every subspace is an orthogonal summand, so TS has closed range",
    })
}

/// `T = diag(1, 0)` and `S = ½[[1,1],[1,1]]`: orthogonal projections onto
/// `e₁` and `(e₁+e₂)/√2` whose product is not EP.
pub fn skew_projection_fixture() -> (ComplexMatrix, ComplexMatrix) {
    (
        ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
        ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]),
    )
}
