//! The digamma function on the positive real axis.

use crate::error::{Error, Result};
use crate::summation::NeumaierSum;

/// Arguments below this are shifted up by the recurrence first.
const ASYMPTOTIC_CUTOFF: f64 = 12.0;

/// `Ψ(x) = Γ'(x)/Γ(x)` for `x > 0`, absolute error below `1e-12`.
///
/// Uses `Ψ(x) = Ψ(x + 1) - 1/x` to move the argument to at least 12, then
/// `ln x - 1/(2x) - 1/(12x²) + 1/(120x⁴) - 1/(252x⁶) + 1/(240x⁸)`.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::NonPositiveArgument(x));
    }
    let mut shift = NeumaierSum::new();
    let mut y = x;
    while y < ASYMPTOTIC_CUTOFF {
        shift.add(-1.0 / y);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    // Horner form of the Bernoulli tail.
    let tail = inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
    let mut acc = NeumaierSum::new();
    acc.add(y.ln());
    acc.add(-0.5 * inv);
    acc.add(-tail);
    Ok(acc.merge(shift).value())
}
