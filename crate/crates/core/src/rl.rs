//! Riemann-Liouville fractional integral on a uniform grid.
//!
//! Product-rectangle quadrature: on each cell `[t_j, t_{j+1})` the integrand
//! is frozen at its left sample and the kernel `(t - s)^{β-1}` is integrated
//! exactly. The result is a Toeplitz convolution, so long series go through
//! an FFT instead of the direct quadratic sum.

use crate::error::{Error, Result};
use crate::gamma::gamma_unchecked;
use rustfft::{num_complex::Complex, FftPlanner};

/// Above this many samples the convolution is done with an FFT.
pub const FFT_THRESHOLD: usize = 2048;

/// `I^β x` evaluated at every grid point `t_n = n h`; entry 0 is always 0.
pub fn rl_integral(beta: f64, samples: &[f64], step_h: f64) -> Result<Vec<f64>> {
    validate(beta, samples, step_h)?;
    if samples.len() > FFT_THRESHOLD {
        Ok(rl_integral_fft(beta, samples, step_h))
    } else {
        Ok(rl_integral_direct(beta, samples, step_h))
    }
}

fn validate(beta: f64, samples: &[f64], step_h: f64) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::Domain("empty series".into()));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("integral order must be positive, got {beta}")));
    }
    if !(step_h > 0.0 && step_h.is_finite()) {
        return Err(Error::Domain(format!("step must be positive, got {step_h}")));
    }
    Ok(())
}

/// `w_k = k^β - (k-1)^β` for `k = 1..=n`; index 0 unused.
fn kernel_weights(beta: f64, n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    let mut prev = 0.0;
    for (k, slot) in w.iter_mut().enumerate().skip(1) {
        let cur = (k as f64).powf(beta);
        *slot = cur - prev;
        prev = cur;
    }
    w
}

fn scale(beta: f64, step_h: f64) -> f64 {
    step_h.powf(beta) / gamma_unchecked(beta + 1.0)
}

pub(crate) fn rl_integral_direct(beta: f64, samples: &[f64], step_h: f64) -> Vec<f64> {
    let n = samples.len();
    let w = kernel_weights(beta, n);
    let c = scale(beta, step_h);
    (0..n)
        .map(|i| {
            let acc: f64 = (1..=i).map(|k| w[k] * samples[i - k]).sum();
            c * acc
        })
        .collect()
}

pub(crate) fn rl_integral_fft(beta: f64, samples: &[f64], step_h: f64) -> Vec<f64> {
    let n = samples.len();
    let w = kernel_weights(beta, n);
    let size = (2 * n).next_power_of_two();

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);

    let mut kernel: Vec<Complex<f64>> = (0..size)
        .map(|k| Complex::new(if k < n { w[k] } else { 0.0 }, 0.0))
        .collect();
    let mut signal: Vec<Complex<f64>> = (0..size)
        .map(|k| Complex::new(if k < n { samples[k] } else { 0.0 }, 0.0))
        .collect();
    forward.process(&mut kernel);
    forward.process(&mut signal);
    for (s, k) in signal.iter_mut().zip(&kernel) {
        *s *= k;
    }
    inverse.process(&mut signal);

    let c = scale(beta, step_h) / size as f64;
    let mut out: Vec<f64> = signal[..n].iter().map(|v| c * v.re).collect();
    out[0] = 0.0;
    out
}
