//! One-parameter Mittag-Leffler function by direct power-series summation.
//!
//! `E_α(λ t^α)` is the exact solution of the scalar Caputo problem
//! `D^α x = λ x`, `x(0) = 1`, which makes it the reference for the solver
//! and for every diagonal closed loop built by the coupling module.

use crate::error::{Error, Result};
use crate::gamma::ln_gamma_unchecked;

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 10_000;
const RELATIVE_CUTOFF: f64 = 1e-16;
/// Largest acceptable rounding error of the summed series.
const ABSOLUTE_ACCURACY: f64 = 1e-10;

/// `E_α(z) = Σ_k z^k / Γ(αk + 1)` for `α ∈ (0, 1]`.
///
/// Terms are formed in log space so that `Γ(αk + 1)` never overflows.
/// For large negative `z` the alternating terms cancel; when the rounding
/// error of the sum could exceed `1e-10` a convergence error is returned.
pub fn mittag_leffler(alpha: f64, z: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "Mittag-Leffler order must lie in (0, 1], got {alpha}"
        )));
    }
    if !z.is_finite() {
        return Err(Error::Domain(format!("argument must be finite, got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }

    let ln_abs_z = z.abs().ln();
    let negative = z < 0.0;
    let mut sum = 1.0;
    let mut prev_term = 1.0_f64;
    let mut largest = 1.0_f64;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        let magnitude = (kf * ln_abs_z - ln_gamma_unchecked(alpha * kf + 1.0)).exp();
        let term = if negative && k % 2 == 1 {
            -magnitude
        } else {
            magnitude
        };
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Convergence {
                terms: k + 1,
                last_term: term,
            });
        }
        largest = largest.max(magnitude);
        if magnitude < prev_term && magnitude <= RELATIVE_CUTOFF * sum.abs() {
            let rounding = largest * f64::EPSILON * (k as f64).sqrt();
            if negative && rounding > ABSOLUTE_ACCURACY {
                return Err(Error::Convergence {
                    terms: k + 1,
                    last_term: term,
                });
            }
            return Ok(sum);
        }
        prev_term = magnitude;
    }
    Err(Error::Convergence {
        terms: MAX_TERMS,
        last_term: prev_term,
    })
}
