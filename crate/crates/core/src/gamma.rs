//! Gamma and log-Gamma for positive real arguments, backed by the musl
//! implementations in `libm`.

use crate::error::{Error, Result};

fn check_arg(x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "gamma requires a finite positive argument, got {x}"
        )));
    }
    Ok(())
}

/// Γ(x) for finite x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    libm::tgamma(x)
}

/// ln Γ(x) for finite x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    libm::lgamma(x)
}
