use epmod::shift::{cross_check_truncation, verify_shift_example, IndexSet};
use epmod::NumericalContext;

use super::yes_no;
use crate::report::{ContextEcho, RunReport};
use crate::InputError;

fn show(set: &IndexSet) -> String {
    let items: Vec<String> = set.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

/// Exact index-level verdicts for the shift pair, plus agreement with the
/// truncated matrices.
pub fn example34(cutoff: u64, ctx: &NumericalContext) -> Result<RunReport, InputError> {
    let r = verify_shift_example(cutoff).map_err(|e| InputError::Usage(e.to_string()))?;
    let mut report = RunReport::new(format!("example34 --cutoff {cutoff}"), ContextEcho::new(ctx, None));

    report.claim("(a) index 2 not in Ran(TS)", r.two_outside_range, "");
    report.claim("(b) index 2 not in Ker(TS)", r.two_outside_kernel, "");
    report.claim("(c) T(Ran S) in Ran S: T maps evens to evens", r.t_preserves_evens, "");
    report.claim("(d) S*(Ran T) in Ran T", r.s_adj_preserves_ran_t, "");
    report.claim("T is EP (exact model)", r.t_is_ep, "");
    report.claim("S is EP (exact model)", r.s_is_ep, "");
    report.claim("TS is not EP", !r.ts_is_ep, format!("2 in Ran((TS)*): {}", yes_no(r.two_in_adjoint_range)));
    report.info("Ran(TS)", show(&r.range_ts));
    report.info("Ker(TS)", show(&r.kernel_ts));
    report.info("boundary indices", show(&r.boundary_ts));

    let check = cross_check_truncation(cutoff, ctx)?;
    let detail = format!("{} interior memberships compared", check.compared);
    report.claim("truncated matrices agree with the exact model", check.agrees(), detail);

    report.note(
        "Ran(TS) (+) Ker(TS) misses xi_2, so TS is not EP although both invariance \
         inclusions hold: the inclusions do not imply that the product is EP",
    );
    Ok(report)
}
