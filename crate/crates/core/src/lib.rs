//! Photon deflection at the solar limb under a short-distance-corrected
//! Newtonian force law F = GMm/(r(r−δ)).
//!
//! The crate computes the bending angle of a grazing light ray three
//! independent ways and reproduces the published result tables:
//!
//! * [`deflection::deflection_closed_form`] — the branch formula
//!   φ = (2m−1)π/k + (2/k)·arctan(RD/k), assembled in compensated
//!   arithmetic so the ~1e-5 rad deflection keeps full precision on top
//!   of π;
//! * [`deflection::deflection_root_find`] — bracketed root-finding on the
//!   transcendental deflection condition;
//! * [`ode::integrate_orbit`] — adaptive integration of the orbit ODE
//!   from the boundary conditions with event detection, in both its
//!   linearized and exact-force forms.
//!
//! [`report`] turns sweeps over the correction length δ and the branch
//! index m into tables with the published values and the observational
//! interval attached, rendered as text, CSV, or JSON.
//!
//! All numerics are generic over the floating-point [`Scalar`]; the
//! `*F64` aliases below fix the working precision the tables are
//! published at.

pub mod constants;
pub mod deflection;
pub mod error;
pub mod fp;
pub mod model;
pub mod ode;
pub mod report;
pub mod root;
pub mod scalar;

pub use constants::{arcsec_per_rad, Angle, AngleUnit, PhysicalConstants};
pub use deflection::{
    branch_sweep, deflection_closed_form, deflection_root_find, DeflectionResult, Method,
};
pub use error::Error;
pub use model::{derive, force_magnitude, orbit_u, DerivedQuantities, ModelParams};
pub use ode::{
    deflection_from_trajectory, integrate_orbit, trajectory_csv, IntegrationSettings, OdeMode,
    Trajectory, TrajectorySample,
};
pub use report::{
    compare_observation, render, sig4_trunc, table1, table1_with_observation, table2, Observation,
    OutputFormat, SweepKind, SweepRow, SweepTable,
};
pub use scalar::Scalar;

/// Working-precision aliases.
pub type PhysicalConstantsF64 = PhysicalConstants<f64>;
pub type ModelParamsF64 = ModelParams<f64>;
pub type DerivedQuantitiesF64 = DerivedQuantities<f64>;
pub type DeflectionResultF64 = DeflectionResult<f64>;
pub type TrajectoryF64 = Trajectory<f64>;
pub type SweepTableF64 = SweepTable<f64>;
