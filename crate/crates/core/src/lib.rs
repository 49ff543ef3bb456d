//! Exact self-similar solutions of the three-dimensional incompressible
//! Navier-Stokes equations built from Kummer functions, together with an
//! independent finite-difference verification harness.
//!
//! Module map:
//! - [`kummer`]: Pochhammer, Gamma, Kummer `M`/`U`, derivatives, Whittaker.
//! - [`reduction`]: reduced profile ODEs, closed-form `f`, numerical `g`, `h`, `l`.
//! - [`fields`]: space-time velocity and pressure fields from the profiles.
//! - [`verify`]: PDE residuals, convergence orders, reduction audits, reports.
//! - [`io`]: CSV emitters and loaders.

mod chebyshev;
pub mod error;
pub mod fields;
pub mod interp;
pub mod io;
pub mod kummer;
pub mod precision;
pub mod reduction;
mod taylor;
pub mod verify;

pub use error::{Error, Result};
pub use kummer::{
    gamma, kummer_m, kummer_m_deriv_n, kummer_u, kummer_u_deriv, kummer_u_deriv2, kummer_u_deriv2_printed,
    kummer_u_deriv_identity, kummer_u_deriv_n, kummer_u_detailed, kummer_u_fixed_digits, pochhammer, whittaker_w,
    KummerArgs, UEvaluation,
};
pub use precision::{PrecisionConfig, Real};
pub use reduction::{complete_profiles, f_closed, uniform_grid, FlowParams, GInit, ProfileSet, ReducedOde, Variant};
pub use fields::{evaluate_field, level_set_points, sample_grid, FieldSample, GridSpec, LevelSetOptions, SpaceTimePoint};
pub use verify::report::{CheckResult, Family, ResidualReport, Verdict};
pub use verify::suite::{run_suite, CheckFilter, SuiteOptions};
