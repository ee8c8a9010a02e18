use std::path::Path;

use epmod::ep::is_ep;
use epmod::products::{
    commuting_ep_product, commuting_mp_check, ep_product_conditions, kernel_split_check,
    product_closed_range_note,
};
use epmod::{ComplexMatrix, NumericalContext};

use super::{require_square, yes_no};
use crate::io::load_operator;
use crate::report::{ContextEcho, RunReport};
use crate::InputError;

pub fn product(path_t: &Path, path_s: &Path, ctx: &NumericalContext) -> Result<RunReport, InputError> {
    let t = load_operator(path_t)?;
    let s = load_operator(path_s)?;
    let mut report = RunReport::new(
        format!("product {} {}", path_t.display(), path_s.display()),
        ContextEcho::new(ctx, None),
    );
    analyze_pair(&t, &s, ctx, &mut report)?;
    Ok(report)
}

pub fn analyze_pair(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    ctx: &NumericalContext,
    report: &mut RunReport,
) -> Result<(), InputError> {
    require_square("T", t)?;
    require_square("S", s)?;
    if t.shape() != s.shape() {
        return Err(InputError::Shape(format!(
            "T is {}x{} but S is {}x{}",
            t.rows(),
            t.cols(),
            s.rows(),
            s.cols()
        )));
    }
    let t_ep = is_ep(t, ctx)?.is_ep;
    let s_ep = is_ep(s, ctx)?.is_ep;
    report.info("T is EP", yes_no(t_ep));
    report.info("S is EP", yes_no(s_ep));

    let closed = product_closed_range_note(t, s, ctx)?;
    report.claim("Ker(T) + Ran(S) is an orthogonal summand", closed.complemented, closed.note);

    if !(t_ep && s_ep) {
        report.skip("product conditions", "need T and S to be EP");
        return Ok(());
    }

    let conditions = ep_product_conditions(t, s, ctx)?;
    report.info("(i) TS is EP", yes_no(conditions.cond_i));
    report.info("(ii) Ker(T) + Ker(S) dense in its biorthogonal complement", conditions.cond_ii_note);
    report.push(
        "(iii) Ran(TS) = Ran(T) n Ran(S)",
        crate::report::Status::Info,
        Some(conditions.cond_iii_distance),
        yes_no(conditions.cond_iii),
    );
    report.push(
        "(iv) Ker(TS) = Ker(T) + Ker(S)",
        crate::report::Status::Info,
        Some(conditions.cond_iv_distance),
        yes_no(conditions.cond_iv),
    );
    for v in &conditions.verdicts {
        report.claim(format!("implication {}", v.relation), v.holds, "");
    }
    match conditions.inclusions {
        Some(inc) => {
            report.bound("T(Ran S) in Ran S", inc.gaps[0], ctx.eq_tol);
            report.bound("S*(Ran T) in Ran T", inc.gaps[1], ctx.eq_tol);
        }
        None => report.skip("invariance inclusions", "need TS to be EP"),
    }
    let split = kernel_split_check(t, s, ctx)?;
    report.bound("Ker(TS) = Ker(S) (+) Ker(S1)", split.distance, ctx.eq_tol);

    let verdict = if conditions.consistent() {
        "corollary respected"
    } else {
        "corollary violated"
    };
    report.note(format!("consistency verdict: {verdict}"));

    let commutator = (&(t * s) - &(s * t)).frobenius_norm();
    if commutator > ctx.eq_tol * (1.0 + t.norm2() * s.norm2()) {
        report.skip("commuting-pair checks", "T and S do not commute");
        return Ok(());
    }
    let lemma = commuting_mp_check(t, s, ctx)?;
    report.bound("S commutes with T+", lemma.residual, lemma.bound);
    let prod = commuting_ep_product(t, s, ctx)?;
    report.claim("commuting product TS is EP", prod.ts_ep.is_ep, "");
    report.bound("(TS)+ = S+T+", prod.dist_s_t, prod.tol);
    report.bound("(TS)+ = T+S+", prod.dist_t_s, prod.tol);
    Ok(())
}
