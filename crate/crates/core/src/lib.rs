//! Early exercise boundary of the American put on a non-dividend-paying asset.
//!
//! Every method here produces `rho(tau)`, the critical asset price below
//! which immediate exercise is optimal, as a function of time to maturity
//! `tau`:
//!
//! - [`asymptotics`]: closed-form short-maturity approximations;
//! - [`zhu`]: the exact integral representation of the boundary;
//! - [`ssch`]: a node-by-node solver for the nonlinear integral equation;
//! - [`psor`]: a finite-difference benchmark on the linear complementarity problem;
//! - [`pricing`]: what a boundary error costs in option value.
//!
//! ```
//! use early_exercise::{AsymptoticMethod, MarketParams};
//!
//! let p = MarketParams::new(0.1, 0.3, 100.0).unwrap();
//! let rho = AsymptoticMethod::Ekk.eval(0.01, &p).unwrap();
//! assert!((rho - 94.3251).abs() < 1e-3);
//! ```

// `!(x > 0.0)` is used on purpose: it sends NaN down the error path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod numerics;
pub mod params;
pub mod pricing;
pub mod psor;
pub mod ssch;
pub mod zhu;

pub use asymptotics::AsymptoticMethod;
pub use error::{Error, Result};
pub use params::{BoundaryCurve, MarketParams, QuadratureConfig, TauGrid};
pub use psor::{PsorConfig, PsorSolution};
pub use ssch::MeshKind;
