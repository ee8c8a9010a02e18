use std::path::Path;

use epmod::ep::{canonical_form, ep_factor_adjoint, ep_factor_commuting, is_ep};
use epmod::linalg::factorize;
use epmod::pseudoinverse::{default_schedule, mp_identities_check, mp_svd, mp_tikhonov, penrose_residuals};
use epmod::{ComplexMatrix, Determinacy, NumericalContext};

use super::{require_square, scaled_tol, yes_no};
use crate::io::load_operator;
use crate::report::{fmt_num, ContextEcho, RunReport};
use crate::InputError;

const PENROSE_NAMES: [&str; 4] = ["TGT = T", "GTG = G", "(TG)* = TG", "(GT)* = GT"];

pub fn analyze(path: &Path, ctx: &NumericalContext) -> Result<RunReport, InputError> {
    let t = load_operator(path)?;
    require_square("operator", &t)?;
    let mut report = RunReport::new(
        format!("analyze {}", path.display()),
        ContextEcho::new(ctx, None),
    );
    analyze_matrix(&t, ctx, &mut report)?;
    Ok(report)
}

/// The full EP / Moore-Penrose analysis of one square operator.
pub fn analyze_matrix(t: &ComplexMatrix, ctx: &NumericalContext, report: &mut RunReport) -> Result<(), InputError> {
    report.info("dimension", format!("{}x{}", t.rows(), t.cols()));

    let mp = mp_svd(t, ctx)?;
    let g = &mp.inverse;
    let rank_detail = match mp.rank.determinacy {
        Determinacy::WellDetermined => format!("{} (well-determined)", mp.rank.rank),
        Determinacy::IllDetermined { gap_ratio } => format!(
            "{} (ill-determined: gap ratio {} below {})",
            mp.rank.rank,
            fmt_num(gap_ratio),
            fmt_num(ctx.gap_warn_ratio)
        ),
    };
    report.info("rank", rank_detail);

    let penrose = penrose_residuals(t, g, ctx)?;
    for (name, r) in PENROSE_NAMES.iter().zip(penrose.relative_residuals(t)) {
        report.bound(format!("penrose {name} (relative)"), r, ctx.eq_tol);
    }
    for check in mp_identities_check(t, ctx)?.checks {
        report.bound(check.name, check.distance, ctx.eq_tol);
    }

    let trace = mp_tikhonov(t, &default_schedule(), ctx)?;
    let sigma = factorize(t)?.singular_values;
    let sigma_min = sigma[..mp.rank.rank].last().copied().unwrap_or(f64::INFINITY);
    let omega = *trace.omegas.last().expect("schedule is nonempty");
    let tikhonov_tol = 1e-5_f64.max(10.0 * omega / sigma_min.powi(3));
    let reference = g.frobenius_norm().max(1.0);
    report.bound(
        "tikhonov limit matches SVD route (relative)",
        trace.final_error() / reference,
        tikhonov_tol,
    );
    report.info(
        "tikhonov errors nonincreasing",
        yes_no(trace.is_nonincreasing(1e-14)),
    );

    let ep = is_ep(t, ctx)?;
    report.info("EP", yes_no(ep.is_ep));
    let names = ["Ran(T) = Ran(T*)", "Ker(T) = Ker(T*)", "TT+ = T+T", "X = Ran(T) (+) Ker(T)"];
    let verdicts = [ep.range_equal, ep.kernel_equal, ep.mp_commutes, ep.orth_decomp];
    for ((name, holds), evidence) in names.iter().zip(verdicts).zip(ep.evidence) {
        report.push(
            format!("characterization {name}"),
            crate::report::Status::Info,
            Some(evidence),
            yes_no(holds),
        );
    }
    report.claim(
        "characterizations agree",
        !ep.disagreement,
        if ep.disagreement { "borderline input: the four tests disagree" } else { "" },
    );

    if ep.is_ep {
        let tol = scaled_tol(ctx, t, g);
        let adj = ep_factor_adjoint(t, ctx)?;
        report.bound("factorization T* = VT", adj.residual, tol);
        report.claim(
            "factorization T* = VT: V invertible",
            adj.sigma_min_v > ctx.eq_tol,
            format!("sigma_min(V) {}", fmt_num(adj.sigma_min_v)),
        );
        let com = ep_factor_commuting(t, ctx)?;
        report.bound("factorization T+ = VT = TV", com.residual, tol);
        report.claim(
            "factorization T+ = VT: V invertible",
            com.sigma_min_v > ctx.eq_tol,
            format!("sigma_min(V) {}", fmt_num(com.sigma_min_v)),
        );
        let form = canonical_form(t, ctx)?;
        report.bound("canonical form reproduces T", form.reconstruction_residual, tol);
        report.bound("canonical form reproduces T+", form.inverse_residual, tol);
        report.info_value("restriction bound c", ep.restriction_bound);
    } else {
        let widest = ep.range_angles.iter().copied().fold(0.0, f64::max);
        report.info(
            "witness",
            format!(
                "Ran(T) != Ran(T*): largest principal angle {} rad, range distance {}",
                fmt_num(widest),
                fmt_num(ep.evidence[0])
            ),
        );
    }

    report.matrix("MP inverse", g);
    Ok(())
}
