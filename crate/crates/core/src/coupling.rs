//! Drive/response coupling with nonlinear cancellation control.
//!
//! The response carries a control `u = c(x_d, x_r) + A e`, where the
//! cancellation part `c` deletes every nonlinear and drive-dependent term of
//! the error dynamics and leaves `D^α e = M e + v`, `v = A e`. Four scenarios
//! are supported: T driving T and Rössler driving T, each in synchronization
//! (`e = x_r - x_d`) and anti-synchronization (`e = x_r + x_d`) mode.

use crate::error::{Error, Result};
use crate::solver::{abm_solve, FractionalOrders, SolverConfig, Trajectory};
use crate::systems::{
    rossler_preset, rossler_system, t_preset, t_response_for_rossler, t_system, Params,
    SystemDef, DEFAULT_ORDERS,
};
use std::fmt;
use std::str::FromStr;

pub type Matrix3 = [[f64; 3]; 3];
pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// T system drives a controlled T system.
    TT,
    /// Rössler system drives a controlled T system.
    RT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sync,
    Anti,
}

impl Mode {
    /// `+1` for anti-synchronization, `-1` for synchronization: `e = x_r + sign x_d`.
    fn drive_sign(self) -> f64 {
        match self {
            Mode::Sync => -1.0,
            Mode::Anti => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainVariant {
    /// The feedback matrices exactly as published.
    Paper,
    /// TT row 1 replaced by `[2a1, -a1, 0]` so the closed loop is diagonal;
    /// identical to `Paper` for RT.
    Corrected,
    /// Closed loop `D^{α_i} e_i = -k_i e_i`.
    Stabilized(Vec3),
}

impl GainVariant {
    pub fn name(&self) -> &'static str {
        match self {
            GainVariant::Paper => "paper",
            GainVariant::Corrected => "corrected",
            GainVariant::Stabilized(_) => "stabilized",
        }
    }
}

/// Scenario and mode together, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioName {
    pub scenario: Scenario,
    pub mode: Mode,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 4] = [
        ScenarioName { scenario: Scenario::TT, mode: Mode::Sync },
        ScenarioName { scenario: Scenario::TT, mode: Mode::Anti },
        ScenarioName { scenario: Scenario::RT, mode: Mode::Sync },
        ScenarioName { scenario: Scenario::RT, mode: Mode::Anti },
    ];
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.scenario {
            Scenario::TT => "tt",
            Scenario::RT => "rt",
        };
        let m = match self.mode {
            Mode::Sync => "sync",
            Mode::Anti => "anti",
        };
        write!(f, "{s}-{m}")
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.to_string() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown scenario {s:?} (expected tt-sync, tt-anti, rt-sync or rt-anti)"
                ))
            })
    }
}

/// Parameters used by the controllers: T (`a1, b1, c1`) and Rössler
/// (`a2, b2, c2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlParams {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
}

impl ControlParams {
    fn from_maps(t: &Params, r: &Params) -> Result<Self> {
        let get = |m: &Params, k: &str| {
            m.get(k)
                .copied()
                .ok_or_else(|| Error::Config(format!("coupling requires parameter {k}")))
        };
        Ok(Self {
            a1: get(t, "a1")?,
            b1: get(t, "b1")?,
            c1: get(t, "c1")?,
            a2: get(r, "a2")?,
            b2: get(r, "b2")?,
            c2: get(r, "c2")?,
        })
    }
}

/// Reduced closed loop `D^{α_i} e_i = λ_i e_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopDiagonal {
    pub lambda: Vec3,
    pub orders: FractionalOrders,
}

#[derive(Debug, Clone)]
pub struct CouplingScheme {
    pub name: ScenarioName,
    pub gains: GainVariant,
    pub orders: FractionalOrders,
    pub drive: SystemDef,
    pub response: SystemDef,
    pub params: ControlParams,
}

impl CouplingScheme {
    /// `t_params` must hold `a1, b1, c1`; `rossler_params` must hold
    /// `a2, b2, c2` (also for TT scenarios, where they are unused).
    pub fn new(
        name: ScenarioName,
        gains: GainVariant,
        t_params: &Params,
        rossler_params: &Params,
        orders: FractionalOrders,
    ) -> Result<Self> {
        if orders.len() != 3 {
            return Err(Error::Config(format!(
                "coupled systems are 3-dimensional, got {} orders",
                orders.len()
            )));
        }
        if let GainVariant::Stabilized(k) = gains {
            if k.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::Config(format!(
                    "stabilizing gains must be positive, got {k:?}"
                )));
            }
        }
        let params = ControlParams::from_maps(t_params, rossler_params)?;
        let (drive, response) = match name.scenario {
            Scenario::TT => (t_system(t_params)?, t_system(t_params)?),
            Scenario::RT => (
                rossler_system(rossler_params)?,
                t_response_for_rossler(t_params, params.a2)?,
            ),
        };
        Ok(Self {
            name,
            gains,
            orders,
            drive,
            response,
            params,
        })
    }

    /// Preset parameters and the default orders (0.9, 0.5, 0.6).
    pub fn with_presets(name: ScenarioName, gains: GainVariant) -> Self {
        Self::new(
            name,
            gains,
            &t_preset().values,
            &rossler_preset().values,
            FractionalOrders::new(DEFAULT_ORDERS.to_vec()).expect("valid orders"),
        )
        .expect("presets are complete")
    }

    pub fn scenario(&self) -> Scenario {
        self.name.scenario
    }

    pub fn mode(&self) -> Mode {
        self.name.mode
    }

    pub fn error(&self, drive: &[f64], response: &[f64]) -> Vec3 {
        let s = self.mode().drive_sign();
        [
            response[0] + s * drive[0],
            response[1] + s * drive[1],
            response[2] + s * drive[2],
        ]
    }

    /// Linear part `M` of the error dynamics once the cancellation terms are
    /// applied (`D^α e = M e + v`). Identical for both modes.
    pub fn open_loop_matrix(&self) -> Matrix3 {
        let ControlParams { a1, b1, c1, a2, c2, .. } = self.params;
        match self.scenario() {
            Scenario::TT => [
                [-a1, a1, 0.0],
                [c1 - a1, 0.0, 0.0],
                [0.0, 0.0, -b1],
            ],
            Scenario::RT => [
                [-a1, a1 - 1.0, -1.0],
                [c1 - a1 + 1.0, a2, 0.0],
                [0.0, 0.0, -(b1 + c2)],
            ],
        }
    }

    /// Feedback matrix `A` of `v = A e`.
    pub fn gain_matrix(&self) -> Matrix3 {
        let ControlParams { a1, b1, c1, c2, .. } = self.params;
        match (self.gains, self.scenario()) {
            (GainVariant::Paper, Scenario::TT) => [
                [0.0, a1, 0.0],
                [-(c1 - a1), c1, 0.0],
                [0.0, 0.0, 2.0 * b1],
            ],
            (GainVariant::Corrected, Scenario::TT) => [
                [2.0 * a1, -a1, 0.0],
                [-(c1 - a1), c1, 0.0],
                [0.0, 0.0, 2.0 * b1],
            ],
            (GainVariant::Paper | GainVariant::Corrected, Scenario::RT) => [
                [2.0 * a1, -(a1 - 1.0), 1.0],
                [-(c1 - a1 + 1.0), 0.0, 0.0],
                [0.0, 0.0, 2.0 * b1 + c2],
            ],
            (GainVariant::Stabilized(k), _) => {
                let m = self.open_loop_matrix();
                let mut a = [[0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        a[i][j] = -m[i][j];
                    }
                    a[i][i] -= k[i];
                }
                a
            }
        }
    }

    /// `M + A`: the error dynamics actually realised by the controller.
    pub fn effective_closed_loop_matrix(&self) -> Matrix3 {
        let m = self.open_loop_matrix();
        let a = self.gain_matrix();
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = m[i][j] + a[i][j];
            }
        }
        out
    }

    /// Nonlinear cancellation part of the control.
    fn cancellation(&self, d: &[f64], r: &[f64]) -> Vec3 {
        let ControlParams { a1, b1, c1, a2, b2, c2 } = self.params;
        let (x1, y1, z1) = (d[0], d[1], d[2]);
        let (x2, y2, z2) = (r[0], r[1], r[2]);
        match (self.scenario(), self.mode()) {
            (Scenario::TT, Mode::Sync) => [0.0, a1 * (x2 * z2 - x1 * z1), x1 * y1 - x2 * y2],
            (Scenario::TT, Mode::Anti) => [0.0, a1 * (x2 * z2 + x1 * z1), -x1 * y1 - x2 * y2],
            (Scenario::RT, Mode::Sync) => [
                -a1 * (y1 - x1) - y2 - z2,
                -(c1 - a1) * x1 + x2 + a2 * x2 * z2 + a2 * y2,
                b2 - x2 * y2 + b1 * z1 + z1 * x1 - c2 * z2,
            ],
            (Scenario::RT, Mode::Anti) => [
                -a1 * (x1 - y1) - y2 - z2,
                (c1 - a1) * x1 + x2 + a2 * x2 * z2 + a2 * y2,
                -b2 - x2 * y2 - b1 * z1 - z1 * x1 - c2 * z2,
            ],
        }
    }
}

fn mat_vec(m: &Matrix3, v: &Vec3) -> Vec3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Control input `u` applied to the response at the joint state.
pub fn build_control(scheme: &CouplingScheme, drive: &[f64], response: &[f64]) -> Vec3 {
    let e = scheme.error(drive, response);
    let v = mat_vec(&scheme.gain_matrix(), &e);
    let c = scheme.cancellation(drive, response);
    [c[0] + v[0], c[1] + v[1], c[2] + v[2]]
}

/// The diagonal closed loop the controller is designed to produce.
///
/// For `Paper` TT gains this is the published claim `(a1, c1, b1)`, which
/// the published matrix does not actually realise in row 1; see
/// [`CouplingScheme::effective_closed_loop_matrix`].
pub fn closed_loop_of(scheme: &CouplingScheme) -> ClosedLoopDiagonal {
    let p = scheme.params;
    let lambda = match (scheme.gains, scheme.scenario()) {
        (GainVariant::Stabilized(k), _) => [-k[0], -k[1], -k[2]],
        (_, Scenario::TT) => [p.a1, p.c1, p.b1],
        (_, Scenario::RT) => [p.a1, p.a2, p.b1],
    };
    ClosedLoopDiagonal {
        lambda,
        orders: scheme.orders.clone(),
    }
}

/// Error-dynamics right-hand side obtained by evaluating both systems and
/// the control, `(f_r(x_r) + u) ∓ f_d(x_d)`.
pub fn error_field(scheme: &CouplingScheme, drive: &[f64], response: &[f64]) -> Vec3 {
    let mut fd = [0.0; 3];
    let mut fr = [0.0; 3];
    scheme.drive.eval(0.0, drive, &mut fd);
    scheme.response.eval(0.0, response, &mut fr);
    let u = build_control(scheme, drive, response);
    let s = scheme.mode().drive_sign();
    [
        fr[0] + u[0] + s * fd[0],
        fr[1] + u[1] + s * fd[1],
        fr[2] + u[2] + s * fd[2],
    ]
}

/// `error_field - λ ∘ e` at one joint state.
pub fn cancellation_residual(scheme: &CouplingScheme, drive: &[f64], response: &[f64]) -> Vec3 {
    let ef = error_field(scheme, drive, response);
    let e = scheme.error(drive, response);
    let lambda = closed_loop_of(scheme).lambda;
    [
        ef[0] - lambda[0] * e[0],
        ef[1] - lambda[1] * e[1],
        ef[2] - lambda[2] * e[2],
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct CancellationReport {
    /// Largest absolute residual per component over all samples.
    pub max_residual: Vec3,
    pub samples: usize,
}

impl CancellationReport {
    pub fn is_exact(&self, tolerance: f64) -> bool {
        self.max_residual.iter().all(|r| *r <= tolerance)
    }
}

/// Evaluates [`cancellation_residual`] at each `(drive, response)` sample.
pub fn cancellation_check(scheme: &CouplingScheme, samples: &[(Vec3, Vec3)]) -> CancellationReport {
    let mut max_residual = [0.0_f64; 3];
    for (d, r) in samples {
        let res = cancellation_residual(scheme, d, r);
        for i in 0..3 {
            max_residual[i] = max_residual[i].max(res[i].abs());
        }
    }
    CancellationReport {
        max_residual,
        samples: samples.len(),
    }
}

#[derive(Debug, Clone)]
pub struct CoupledRun {
    pub drive: Trajectory,
    pub response: Trajectory,
    /// `response ∓ drive`, row by row.
    pub error: Trajectory,
}

/// Joint 6-dimensional solve of the drive and the controlled response.
pub fn simulate_coupled(
    scheme: &CouplingScheme,
    drive_x0: &[f64],
    response_x0: &[f64],
    config: &SolverConfig,
) -> Result<CoupledRun> {
    if drive_x0.len() != 3 || response_x0.len() != 3 {
        return Err(Error::Domain("coupled initial states must have 3 components".into()));
    }
    let x0: Vec<f64> = drive_x0.iter().chain(response_x0).copied().collect();
    let orders = scheme.orders.concat(&scheme.orders);
    let field = |t: f64, s: &[f64], out: &mut [f64]| {
        let (d, r) = s.split_at(3);
        let (fd, fr) = out.split_at_mut(3);
        scheme.drive.eval(t, d, fd);
        scheme.response.eval(t, r, fr);
        let u = build_control(scheme, d, r);
        for i in 0..3 {
            fr[i] += u[i];
        }
    };
    let joint = abm_solve(field, &orders, &x0, config)?;
    let drive = joint.columns(0, 3);
    let response = joint.columns(3, 3);
    let sign = scheme.mode().drive_sign();
    let error = response.zip_map(&drive, 3, |r, d, out| {
        for i in 0..3 {
            out[i] = r[i] + sign * d[i];
        }
    });
    Ok(CoupledRun {
        drive,
        response,
        error,
    })
}

/// Integrates the diagonal closed loop `D^{α_i} e_i = λ_i e_i`.
pub fn simulate_diagonal(
    closed: &ClosedLoopDiagonal,
    e0: &[f64],
    config: &SolverConfig,
) -> Result<Trajectory> {
    if e0.len() != 3 || closed.orders.len() != 3 {
        return Err(Error::Domain("diagonal closed loop is 3-dimensional".into()));
    }
    let lambda = closed.lambda;
    abm_solve(
        move |_t, e: &[f64], out: &mut [f64]| {
            for i in 0..3 {
                out[i] = lambda[i] * e[i];
            }
        },
        &closed.orders,
        e0,
        config,
    )
}

/// Integrates a general linear error system `D^{α_i} e = K e`.
pub fn simulate_linear(
    matrix: &Matrix3,
    orders: &FractionalOrders,
    e0: &[f64],
    config: &SolverConfig,
) -> Result<Trajectory> {
    if e0.len() != 3 || orders.len() != 3 {
        return Err(Error::Domain("linear error system is 3-dimensional".into()));
    }
    let m = *matrix;
    abm_solve(
        move |_t, e: &[f64], out: &mut [f64]| {
            out.copy_from_slice(&mat_vec(&m, &[e[0], e[1], e[2]]));
        },
        orders,
        e0,
        config,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scheme(name: &str, gains: GainVariant) -> CouplingScheme {
        CouplingScheme::with_presets(name.parse().unwrap(), gains)
    }

    fn approx(a: Vec3, b: Vec3) -> bool {
        a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn tt_sync_zero_error_gives_zero_control() {
        let s = scheme("tt-sync", GainVariant::Paper);
        let u = build_control(&s, &[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]);
        assert_eq!(u, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn tt_sync_direct_substitution() {
        let s = scheme("tt-sync", GainVariant::Paper);
        assert_eq!(s.error(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]), [3.0, 3.0, 3.0]);
        let u = build_control(&s, &[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]);
        assert!(approx(u, [6.3, 50.4, -14.4]), "{u:?}");
    }

    #[test]
    fn tt_anti_direct_substitution() {
        let s = scheme("tt-anti", GainVariant::Paper);
        assert_eq!(s.error(&[1.0, 1.0, 1.0], &[-1.0, -1.0, -1.0]), [0.0, 0.0, 0.0]);
        let u = build_control(&s, &[1.0, 1.0, 1.0], &[-1.0, -1.0, -1.0]);
        assert!(approx(u, [0.0, 4.2, -2.0]), "{u:?}");
    }

    #[test]
    fn closed_loops() {
        assert_eq!(closed_loop_of(&scheme("tt-sync", GainVariant::Paper)).lambda, [2.1, 30.0, 0.6]);
        assert_eq!(closed_loop_of(&scheme("rt-sync", GainVariant::Paper)).lambda, [2.1, 0.2, 0.6]);
        assert_eq!(
            closed_loop_of(&scheme("tt-anti", GainVariant::Stabilized([1.0, 2.0, 3.0]))).lambda,
            [-1.0, -2.0, -3.0]
        );
    }

    #[test]
    fn gain_variants_share_rows_two_and_three() {
        for name in ["tt-sync", "tt-anti"] {
            let p = scheme(name, GainVariant::Paper).gain_matrix();
            let c = scheme(name, GainVariant::Corrected).gain_matrix();
            assert_eq!(p[1], c[1]);
            assert_eq!(p[2], c[2]);
            assert_ne!(p[0], c[0]);
        }
        for name in ["rt-sync", "rt-anti"] {
            assert_eq!(
                scheme(name, GainVariant::Paper).gain_matrix(),
                scheme(name, GainVariant::Corrected).gain_matrix()
            );
        }
    }

    #[test]
    fn effective_matrix_is_diagonal_except_paper_tt() {
        for name in ScenarioName::ALL {
            for gains in [GainVariant::Paper, GainVariant::Corrected, GainVariant::Stabilized([1.0, 2.0, 0.5])] {
                let s = CouplingScheme::with_presets(name, gains);
                let k = s.effective_closed_loop_matrix();
                let lambda = closed_loop_of(&s).lambda;
                let paper_tt = gains == GainVariant::Paper && name.scenario == Scenario::TT;
                for i in 0..3 {
                    for j in 0..3 {
                        let want = if i == j { lambda[i] } else { 0.0 };
                        if paper_tt && i == 0 {
                            continue;
                        }
                        assert!((k[i][j] - want).abs() < 1e-12, "{name} {gains:?} ({i},{j})");
                    }
                }
                if paper_tt {
                    let a1 = s.params.a1;
                    assert!((k[0][0] + a1).abs() < 1e-12);
                    assert!((k[0][1] - 2.0 * a1).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn paper_tt_row_one_residual_has_the_predicted_form() {
        let s = scheme("tt-sync", GainVariant::Paper);
        let d = [0.3, -1.2, 4.0];
        let r = [1.1, 0.7, 2.5];
        let e = s.error(&d, &r);
        let res = cancellation_residual(&s, &d, &r);
        let a1 = s.params.a1;
        assert!((res[0] - 2.0 * a1 * (e[1] - e[0])).abs() < 1e-12);
        assert!(res[1].abs() < 1e-12 && res[2].abs() < 1e-12);
    }

    #[test]
    fn scenario_names_round_trip() {
        for n in ScenarioName::ALL {
            assert_eq!(n.to_string().parse::<ScenarioName>().unwrap(), n);
        }
        assert!("tt-async".parse::<ScenarioName>().is_err());
    }

    #[test]
    fn rejects_bad_configuration() {
        let orders = FractionalOrders::new(DEFAULT_ORDERS.to_vec()).unwrap();
        let name: ScenarioName = "tt-sync".parse().unwrap();
        assert!(CouplingScheme::new(
            name,
            GainVariant::Stabilized([1.0, 0.0, 1.0]),
            &t_preset().values,
            &rossler_preset().values,
            orders.clone()
        )
        .is_err());
        assert!(CouplingScheme::new(name, GainVariant::Paper, &Params::new(), &rossler_preset().values, orders)
            .is_err());
        assert!(CouplingScheme::new(
            name,
            GainVariant::Paper,
            &t_preset().values,
            &rossler_preset().values,
            FractionalOrders::uniform(0.5, 2).unwrap()
        )
        .is_err());
    }

    fn zero_error_run(name: ScenarioName, gains: GainVariant) -> Trajectory {
        let cfg = SolverConfig::from_horizon(0.01, 2.0).unwrap();
        let s = CouplingScheme::with_presets(name, gains);
        let d0 = [0.01, 0.02, 0.03];
        let r0 = match name.mode {
            Mode::Sync => d0,
            Mode::Anti => [-0.01, -0.02, -0.03],
        };
        simulate_coupled(&s, &d0, &r0, &cfg).unwrap().error
    }

    #[test]
    fn zero_error_is_preserved_under_stable_gains() {
        for name in ScenarioName::ALL {
            let e = zero_error_run(name, GainVariant::Stabilized([1.0, 1.0, 1.0]));
            assert!(e.is_completed(), "{name}: {}", e.status());
            for row in e.rows() {
                assert!(row.iter().all(|v| v.abs() <= 1e-12), "{name}: {row:?}");
            }
        }
    }

    #[test]
    fn zero_error_under_paper_gains() {
        // sync mode evaluates identical expressions on identical states, so the
        // error stays exactly zero even though the closed loop is unstable
        for name in ["tt-sync", "rt-sync", "rt-anti"] {
            let e = zero_error_run(name.parse().unwrap(), GainVariant::Paper);
            assert!(e.is_completed(), "{name}: {}", e.status());
            for row in e.rows() {
                assert!(row.iter().all(|v| v.abs() <= 1e-12), "{name}: {row:?}");
            }
        }
        // TT anti: rounding residue of order 1e-16 is amplified by the λ = 30,
        // α = 0.5 mode until the run diverges
        let e = zero_error_run("tt-anti".parse().unwrap(), GainVariant::Paper);
        assert!(!e.is_completed());
    }
}
