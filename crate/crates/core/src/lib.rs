//! Fractional-order chaotic systems, drive/response synchronization and a
//! trajectory-keyed additive stream cipher.
//!
//! The numerical substrate is a per-component fractional Adams-Bashforth-Moulton
//! solver ([`solver::abm_solve`]) with Mittag-Leffler and Riemann-Liouville
//! reference routines. On top of it sit the T and Rössler systems
//! ([`systems`]), the nonlinear cancellation controllers for synchronization
//! and anti-synchronization ([`coupling`]), stability verdicts for the
//! resulting error dynamics ([`analysis`]) and the mod-m cipher ([`cipher`]).

pub mod analysis;
pub mod cipher;
pub mod coupling;
pub mod error;
pub mod gamma;
pub mod mittag_leffler;
pub mod rl;
pub mod solver;
pub mod systems;

pub use error::{Error, Result};
pub use gamma::{gamma_fn, ln_gamma};
pub use mittag_leffler::mittag_leffler;
pub use rl::rl_integral;
pub use solver::{abm_solve, FractionalOrders, SolverConfig, Trajectory, TrajectoryStatus};
