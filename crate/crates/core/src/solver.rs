//! Fractional Adams-Bashforth-Moulton predictor-corrector for Caputo systems
//! with one order per state component.
//!
//! For a component with order `α` the scheme is the product-rectangle
//! predictor
//!
//! ```text
//! xP_{n+1} = x_0 + 1/Γ(α) Σ_{j=0..n} b_{j,n+1} f(t_j, x_j)
//! b_{j,n+1} = h^α/α ((n+1-j)^α - (n-j)^α)
//! ```
//!
//! followed by the product-trapezoid corrector
//!
//! ```text
//! x_{n+1} = x_0 + h^α/Γ(α+2) ( f(t_{n+1}, xP_{n+1}) + Σ_{j=0..n} a_{j,n+1} f(t_j, x_j) )
//! a_{0,n+1} = n^{α+1} - (n-α)(n+1)^α
//! a_{j,n+1} = (n-j+2)^{α+1} + (n-j)^{α+1} - 2(n-j+1)^{α+1},   1 <= j <= n
//! ```
//!
//! Every step convolves against the full history, so a solve costs
//! O(N²) field-history products per component.

use crate::error::{Error, Result};
use crate::gamma::gamma_unchecked;

/// Default state-norm bound beyond which a run is classified as diverged.
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e12;

/// Per-component Caputo orders, each in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalOrders(Vec<f64>);

impl FractionalOrders {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::Domain("at least one order is required".into()));
        }
        if let Some(bad) = alpha.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
            return Err(Error::Domain(format!(
                "fractional orders must lie in (0, 1], got {bad}"
            )));
        }
        Ok(Self(alpha))
    }

    pub fn uniform(alpha: f64, dimension: usize) -> Result<Self> {
        Self::new(vec![alpha; dimension])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation, used to drive a joint solve of two subsystems.
    pub fn concat(&self, other: &FractionalOrders) -> FractionalOrders {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FractionalOrders(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub step_h: f64,
    pub n_steps: usize,
    /// Number of corrector applications per step; 1 is classic PECE.
    pub corrector_sweeps: usize,
    pub divergence_threshold: f64,
    /// Keep only the most recent `w` history samples in the convolutions.
    /// `None` uses the full history.
    pub memory_window: Option<usize>,
}

impl SolverConfig {
    pub fn new(step_h: f64, n_steps: usize) -> Self {
        Self {
            step_h,
            n_steps,
            corrector_sweeps: 1,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
            memory_window: None,
        }
    }

    /// Grid with step `h` covering `[0, t_end]`; `t_end / h` is rounded to
    /// the nearest whole number of steps.
    pub fn from_horizon(step_h: f64, t_end: f64) -> Result<Self> {
        if !(step_h > 0.0 && step_h.is_finite()) {
            return Err(Error::Domain(format!("step must be positive, got {step_h}")));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::Domain(format!("horizon must be positive, got {t_end}")));
        }
        let n = (t_end / step_h).round();
        if n < 1.0 || n > u32::MAX as f64 {
            return Err(Error::Domain(format!(
                "horizon {t_end} with step {step_h} gives an unusable step count"
            )));
        }
        Ok(Self::new(step_h, n as usize))
    }

    pub fn with_corrector_sweeps(mut self, sweeps: usize) -> Self {
        self.corrector_sweeps = sweeps;
        self
    }

    pub fn with_divergence_threshold(mut self, threshold: f64) -> Self {
        self.divergence_threshold = threshold;
        self
    }

    pub fn with_memory_window(mut self, window: Option<usize>) -> Self {
        self.memory_window = window;
        self
    }

    pub fn horizon(&self) -> f64 {
        self.step_h * self.n_steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_h > 0.0 && self.step_h.is_finite()) {
            return Err(Error::Domain(format!("step must be positive, got {}", self.step_h)));
        }
        if self.n_steps == 0 {
            return Err(Error::Domain("n_steps must be positive".into()));
        }
        if !self.horizon().is_finite() {
            return Err(Error::Domain("simulation horizon is not finite".into()));
        }
        if self.corrector_sweeps == 0 {
            return Err(Error::Domain("corrector_sweeps must be at least 1".into()));
        }
        if !(self.divergence_threshold > 0.0) {
            return Err(Error::Domain("divergence threshold must be positive".into()));
        }
        if self.memory_window == Some(0) {
            return Err(Error::Domain("memory window must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryStatus {
    Completed,
    /// The state norm crossed the divergence threshold at this step; the
    /// trajectory holds rows `0..step`.
    Diverged { step: usize },
}

impl std::fmt::Display for TrajectoryStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrajectoryStatus::Completed => write!(f, "completed"),
            TrajectoryStatus::Diverged { step } => write!(f, "diverged-at-step-{step}"),
        }
    }
}

/// Samples on the uniform grid `t_j = j h`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    step_h: f64,
    dimension: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    status: TrajectoryStatus,
}

impl Trajectory {
    /// Builds a trajectory from explicit rows. Times are regenerated from
    /// `step_h`.
    pub fn from_rows(
        step_h: f64,
        dimension: usize,
        rows: Vec<Vec<f64>>,
        status: TrajectoryStatus,
    ) -> Result<Self> {
        if dimension == 0 || rows.is_empty() {
            return Err(Error::Domain("trajectory needs at least one row".into()));
        }
        if !(step_h > 0.0) {
            return Err(Error::Domain("trajectory step must be positive".into()));
        }
        let mut states = Vec::with_capacity(rows.len() * dimension);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dimension {
                return Err(Error::Domain(format!(
                    "row {i} has {} entries, expected {dimension}",
                    r.len()
                )));
            }
            states.extend_from_slice(r);
        }
        let times = (0..rows.len()).map(|j| j as f64 * step_h).collect();
        Ok(Self {
            step_h,
            dimension,
            times,
            states,
            status,
        })
    }

    fn with_capacity(step_h: f64, dimension: usize, rows: usize) -> Self {
        Self {
            step_h,
            dimension,
            times: Vec::with_capacity(rows),
            states: Vec::with_capacity(rows * dimension),
            status: TrajectoryStatus::Completed,
        }
    }

    fn push(&mut self, t: f64, row: &[f64]) {
        self.times.push(t);
        self.states.extend_from_slice(row);
    }

    pub fn step_h(&self) -> f64 {
        self.step_h
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of stored rows.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn status(&self) -> TrajectoryStatus {
        self.status
    }

    pub fn is_completed(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.states[j * self.dimension..(j + 1) * self.dimension]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks_exact(self.dimension)
    }

    pub fn last(&self) -> &[f64] {
        self.row(self.len() - 1)
    }

    /// Time series of one state component.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.rows().map(|r| r[i]).collect()
    }

    /// Column slice `[start, start + width)` of every row, same grid and status.
    pub fn columns(&self, start: usize, width: usize) -> Trajectory {
        let mut out = Trajectory::with_capacity(self.step_h, width, self.len());
        for (t, r) in self.times.iter().zip(self.rows()) {
            out.push(*t, &r[start..start + width]);
        }
        out.status = self.status;
        out
    }

    /// Row-wise combination `f(a_row, b_row)` of two trajectories on the same
    /// grid, truncated to the shorter one.
    pub fn zip_map(
        &self,
        other: &Trajectory,
        dimension: usize,
        mut f: impl FnMut(&[f64], &[f64], &mut [f64]),
    ) -> Trajectory {
        let n = self.len().min(other.len());
        let mut out = Trajectory::with_capacity(self.step_h, dimension, n);
        let mut buf = vec![0.0; dimension];
        for j in 0..n {
            f(self.row(j), other.row(j), &mut buf);
            out.push(self.times[j], &buf);
        }
        out.status = match (self.status, other.status) {
            (TrajectoryStatus::Completed, TrajectoryStatus::Completed) => TrajectoryStatus::Completed,
            (TrajectoryStatus::Diverged { step }, _) | (_, TrajectoryStatus::Diverged { step }) => {
                TrajectoryStatus::Diverged { step }
            }
        };
        out
    }

    /// Same trajectory with every state multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Trajectory {
        let mut out = self.clone();
        out.states.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Max-norm of each stored row.
    pub fn row_norms(&self) -> Vec<f64> {
        self.rows().map(max_norm).collect()
    }
}

pub(crate) fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Quadrature weights for one order, precomputed up to a step count.
#[derive(Debug, Clone)]
struct ComponentWeights {
    alpha: f64,
    /// `(m+1)^α - m^α` for `m = 0..=N`
    predictor: Vec<f64>,
    /// `(m+1)^{α+1} + (m-1)^{α+1} - 2 m^{α+1}` for `m = 1..=N`, index 0 unused
    corrector: Vec<f64>,
    /// `k^{α+1}` and `k^α`, needed for the j = 0 corrector weight
    pow_a1: Vec<f64>,
    pow_a: Vec<f64>,
    predictor_scale: f64,
    corrector_scale: f64,
}

impl ComponentWeights {
    fn new(alpha: f64, step_h: f64, n_steps: usize) -> Self {
        let pow_a: Vec<f64> = (0..=n_steps + 1).map(|k| (k as f64).powf(alpha)).collect();
        let pow_a1: Vec<f64> = (0..=n_steps + 1)
            .map(|k| (k as f64).powf(alpha + 1.0))
            .collect();
        let predictor = (0..=n_steps).map(|m| pow_a[m + 1] - pow_a[m]).collect();
        let mut corrector = vec![0.0; n_steps + 1];
        for m in 1..=n_steps {
            corrector[m] = pow_a1[m + 1] + pow_a1[m - 1] - 2.0 * pow_a1[m];
        }
        let h_alpha = step_h.powf(alpha);
        Self {
            alpha,
            predictor,
            corrector,
            pow_a1,
            pow_a,
            predictor_scale: h_alpha / gamma_unchecked(alpha + 1.0),
            corrector_scale: h_alpha / gamma_unchecked(alpha + 2.0),
        }
    }

    fn first_corrector_weight(&self, n: usize) -> f64 {
        self.pow_a1[n] - (n as f64 - self.alpha) * self.pow_a[n + 1]
    }
}

/// Predictor weights `b_{j,n+1}` for `j = 0..=n`.
pub fn predictor_weights(alpha: f64, step_h: f64, n: usize) -> Vec<f64> {
    let c = step_h.powf(alpha) / alpha;
    (0..=n)
        .map(|j| {
            let m = (n - j) as f64;
            c * ((m + 1.0).powf(alpha) - m.powf(alpha))
        })
        .collect()
}

/// Corrector weights `a_{j,n+1}` for `j = 0..=n` (without the `h^α/Γ(α+2)` factor).
pub fn corrector_weights(alpha: f64, n: usize) -> Vec<f64> {
    let nf = n as f64;
    let p = alpha + 1.0;
    (0..=n)
        .map(|j| {
            if j == 0 {
                nf.powf(p) - (nf - alpha) * (nf + 1.0).powf(alpha)
            } else {
                let m = (n - j) as f64;
                (m + 2.0).powf(p) + m.powf(p) - 2.0 * (m + 1.0).powf(p)
            }
        })
        .collect()
}

/// Integrates `D^{α_i} x_i = f_i(t, x)` from `x(0) = x0` on the configured grid.
///
/// `field(t, state, out)` must write the derivative into `out`. Divergence
/// (state norm above the threshold, or an overflow) ends the run early and
/// is reported through [`TrajectoryStatus`]; a NaN from the field is an error.
pub fn abm_solve<F>(
    field: F,
    orders: &FractionalOrders,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    config.validate()?;
    let dim = x0.len();
    if dim == 0 || orders.len() != dim {
        return Err(Error::Domain(format!(
            "initial state has {dim} components but {} orders were given",
            orders.len()
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("initial state must be finite".into()));
    }

    let h = config.step_h;
    let n_steps = config.n_steps;

    // one weight table per distinct order
    let mut tables: Vec<ComponentWeights> = Vec::new();
    let mut table_of = Vec::with_capacity(dim);
    for &alpha in orders.as_slice() {
        let idx = match tables.iter().position(|t| t.alpha.to_bits() == alpha.to_bits()) {
            Some(i) => i,
            None => {
                tables.push(ComponentWeights::new(alpha, h, n_steps));
                tables.len() - 1
            }
        };
        table_of.push(idx);
    }

    let mut traj = Trajectory::with_capacity(h, dim, n_steps + 1);
    traj.push(0.0, x0);

    // field history, one column per component
    let mut history: Vec<Vec<f64>> = vec![Vec::with_capacity(n_steps + 1); dim];
    let mut f_buf = vec![0.0; dim];
    field(0.0, x0, &mut f_buf);
    check_nan(&f_buf, 0, 0.0)?;
    for (col, v) in history.iter_mut().zip(&f_buf) {
        col.push(*v);
    }

    let mut predictor_sum = vec![0.0; dim];
    let mut corrector_sum = vec![0.0; dim];
    let mut state = vec![0.0; dim];

    for n in 0..n_steps {
        let t_next = (n + 1) as f64 * h;
        let lo = match config.memory_window {
            Some(w) if n + 1 > w => n + 1 - w,
            _ => 0,
        };

        for i in 0..dim {
            let w = &tables[table_of[i]];
            let f_hist = &history[i][lo..=n];

            // b weight for history index j is predictor[n - j]
            let p: f64 = f_hist
                .iter()
                .zip(w.predictor[..=n - lo].iter().rev())
                .map(|(f, b)| f * b)
                .sum();

            let start = lo.max(1);
            let mut c: f64 = if start <= n {
                history[i][start..=n]
                    .iter()
                    .zip(w.corrector[1..=n - start + 1].iter().rev())
                    .map(|(f, a)| f * a)
                    .sum()
            } else {
                0.0
            };
            if lo == 0 {
                c += w.first_corrector_weight(n) * history[i][0];
            }

            predictor_sum[i] = p;
            corrector_sum[i] = c;
            state[i] = x0[i] + w.predictor_scale * p;
        }

        for _ in 0..config.corrector_sweeps {
            field(t_next, &state, &mut f_buf);
            check_nan(&f_buf, n + 1, t_next)?;
            for i in 0..dim {
                let w = &tables[table_of[i]];
                state[i] = x0[i] + w.corrector_scale * (f_buf[i] + corrector_sum[i]);
            }
        }

        if state.iter().any(|v| !v.is_finite()) || max_norm(&state) > config.divergence_threshold {
            traj.status = TrajectoryStatus::Diverged { step: n + 1 };
            return Ok(traj);
        }
        traj.push(t_next, &state);

        if n + 1 < n_steps {
            field(t_next, &state, &mut f_buf);
            check_nan(&f_buf, n + 1, t_next)?;
            for (col, v) in history.iter_mut().zip(&f_buf) {
                col.push(*v);
            }
        }
    }
    Ok(traj)
}

fn check_nan(values: &[f64], step: usize, time: f64) -> Result<()> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Numeric { step, time });
    }
    Ok(())
}
