//! Stability verdicts for diagonal fractional linear systems and empirical
//! classification of error trajectories.
//!
//! `D^α e = λ e` with `0 < α <= 1` is asymptotically stable iff
//! `|arg λ| > α π / 2` (Matignon). For real `λ` this reduces to the sign of
//! `λ`, independent of `α`.

use crate::coupling::{closed_loop_of, CouplingScheme};
use crate::error::{Error, Result};
use crate::solver::{max_norm, Trajectory, TrajectoryStatus, DEFAULT_DIVERGENCE_THRESHOLD};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

/// Default tolerance on the tail sup-norm for "complete" synchronization.
pub const DEFAULT_SYNC_TOLERANCE: f64 = 1e-3;
/// Default fraction of the grid inspected by [`classify_error`].
pub const DEFAULT_TAIL_FRACTION: f64 = 0.25;

const ARG_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Marginal => "marginal",
        })
    }
}

/// Matignon verdict for `D^α e = λ e`. Requires `α ∈ (0, 1]`.
pub fn matignon_verdict(lambda: Complex64, alpha: f64) -> Verdict {
    if lambda.norm() == 0.0 {
        return Verdict::Marginal;
    }
    let margin = lambda.arg().abs() - alpha * FRAC_PI_2;
    if margin.abs() <= ARG_EPS {
        Verdict::Marginal
    } else if margin > 0.0 {
        Verdict::Stable
    } else {
        Verdict::Unstable
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentVerdict {
    pub lambda: f64,
    pub alpha: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub components: Vec<ComponentVerdict>,
    pub overall: Verdict,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.overall == Verdict::Stable
    }
}

/// Per-component verdicts for a diagonal system. Overall is stable only if
/// every component is; any unstable component makes it unstable.
pub fn stability_report(lambdas: &[f64], orders: &[f64]) -> Result<StabilityReport> {
    if lambdas.len() != orders.len() {
        return Err(Error::Domain(format!(
            "{} eigenvalues but {} orders",
            lambdas.len(),
            orders.len()
        )));
    }
    if lambdas.is_empty() {
        return Err(Error::Domain("no eigenvalues given".into()));
    }
    if let Some(a) = orders.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
        return Err(Error::Domain(format!("order {a} outside (0, 1]")));
    }
    let components: Vec<ComponentVerdict> = lambdas
        .iter()
        .zip(orders)
        .map(|(&lambda, &alpha)| ComponentVerdict {
            lambda,
            alpha,
            verdict: matignon_verdict(Complex64::new(lambda, 0.0), alpha),
        })
        .collect();
    let overall = if components.iter().all(|c| c.verdict == Verdict::Stable) {
        Verdict::Stable
    } else if components.iter().any(|c| c.verdict == Verdict::Unstable) {
        Verdict::Unstable
    } else {
        Verdict::Marginal
    };
    Ok(StabilityReport {
        components,
        overall,
    })
}

/// Stability of the closed loop a scheme's controller is designed to
/// produce. Initial conditions play no role.
pub fn proposition_audit(scheme: &CouplingScheme) -> StabilityReport {
    let closed = closed_loop_of(scheme);
    stability_report(&closed.lambda, closed.orders.as_slice())
        .expect("closed loop has three components with valid orders")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceVerdict {
    ConvergedToZero,
    BoundedNonzero,
    Diverged,
}

impl fmt::Display for ConvergenceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConvergenceVerdict::ConvergedToZero => "converged-to-zero",
            ConvergenceVerdict::BoundedNonzero => "bounded-nonzero",
            ConvergenceVerdict::Diverged => "diverged",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceClassification {
    pub verdict: ConvergenceVerdict,
    pub tolerance: f64,
    pub tail_fraction: f64,
    /// Sup over the tail window of the row max-norm.
    pub tail_sup_norm: f64,
    /// First row of the tail window.
    pub tail_start: usize,
    pub status: TrajectoryStatus,
}

/// Classifies an error trajectory by the sup-norm over its final
/// `tail_fraction` of rows.
pub fn classify_error(
    traj: &Trajectory,
    tolerance: f64,
    tail_fraction: f64,
) -> Result<ConvergenceClassification> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::Domain(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    if !(tolerance > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tolerance}")));
    }
    if traj.is_empty() {
        return Err(Error::Domain("empty trajectory".into()));
    }
    let n = traj.len();
    let tail_len = ((tail_fraction * n as f64).round() as usize).clamp(1, n);
    let tail_start = n - tail_len;
    let tail_sup_norm = (tail_start..n)
        .map(|j| max_norm(traj.row(j)))
        .fold(0.0, f64::max);

    let verdict = if !traj.is_completed() || tail_sup_norm > DEFAULT_DIVERGENCE_THRESHOLD {
        ConvergenceVerdict::Diverged
    } else if tail_sup_norm < tolerance {
        ConvergenceVerdict::ConvergedToZero
    } else {
        ConvergenceVerdict::BoundedNonzero
    };
    Ok(ConvergenceClassification {
        verdict,
        tolerance,
        tail_fraction,
        tail_sup_norm,
        tail_start,
        status: traj.status(),
    })
}

/// True when the row max-norm increases strictly from each row to the next.
pub fn strictly_growing(traj: &Trajectory) -> bool {
    let norms = traj.row_norms();
    norms.len() >= 2 && norms.windows(2).all(|w| w[1] > w[0])
}
