//! Fractional (Caputo) SIS epidemic model with constant population.
//!
//! The infected fraction solves `D^α I = βcI − βI²`. This crate provides
//! its truncated power-series solutions, two time-stepping schemes (a
//! fractional Adams–Bashforth–Moulton predictor–corrector and an L1
//! scheme), the special functions they rest on, and the classical
//! `α = 1` closed forms used as oracles.
//!
//! Everything numerical is generic over [`scalar::Real`]; the aliases
//! below fix the scalar to `f64`.
//!
//! ```
//! use fracsis::{model, series, coeffs, specfn::EvalPolicy};
//!
//! let p = fracsis::ModelParams::new(0.7, 0.05, 0.12, 0.7, 0.0).unwrap();
//! let d = model::derive(&p).unwrap();
//! let table = coeffs::euler_alpha(0.7, 120).unwrap();
//! let s = series::build_series_thm1(&d, 0.7, table).unwrap();
//! let r = series::eval(&s, 1.0, &EvalPolicy::default()).unwrap();
//! assert!(r.converged && r.value_i > d.c / 2.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coeffs;
pub mod error;
pub mod model;
pub mod scalar;
pub mod series;
pub mod solvers;
pub mod specfn;

pub use error::{Error, Result};
pub use solvers::{Method, NodeStatus};

pub type ModelParams = model::ModelParams<f64>;
pub type DerivedParams = model::DerivedParams<f64>;
pub type CoeffTable = coeffs::CoeffTable<f64>;
pub type RadiusEstimate = coeffs::RadiusEstimate<f64>;
pub type SeriesSolution = series::SeriesSolution<f64>;
pub type EvalResult = series::EvalResult<f64>;
pub type EvalPolicy = specfn::EvalPolicy<f64>;
pub type TimeGrid = solvers::TimeGrid<f64>;
pub type Trajectory = solvers::Trajectory<f64>;
