//! Stationary states, bifurcation boundaries and simulation of two
//! interacting communities of noisy phase oscillators.

pub mod boundaries;
pub mod classify;
pub mod error;
pub mod model;
pub mod roots;
pub mod simulate;
pub mod sweep;
pub mod vkernel;

pub use error::{Error, Result};
pub use model::{Community, Coupling, CurveShape, LevelCurve, Param, Psi, SyncSolution, TurningPoint};
