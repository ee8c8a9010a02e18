mod analyze;
mod example;
mod product;

pub use analyze::analyze;
pub use example::example34;
pub use product::product;

use epmod::{ComplexMatrix, NumericalContext};

use crate::InputError;

/// `eq_tol · (1 + ‖A‖_F‖B‖_F)`: equality tolerance for identities that
/// involve a product of an operator with an inverse-like factor.
pub(crate) fn scaled_tol(ctx: &NumericalContext, a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    ctx.eq_tol * (1.0 + a.frobenius_norm() * b.frobenius_norm())
}

pub(crate) fn require_square(label: &str, t: &ComplexMatrix) -> Result<(), InputError> {
    if !t.is_square() {
        return Err(InputError::Shape(format!(
            "{label} is {}x{}; this command needs a square operator",
            t.rows(),
            t.cols()
        )));
    }
    Ok(())
}

pub(crate) fn yes_no(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}
