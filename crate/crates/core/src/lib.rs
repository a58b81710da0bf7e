//! Direct (non-iterative) parameter estimation for ODE systems that are
//! linear in their parameters.
//!
//! The estimator implemented here converts each state equation
//!
//! ```text
//! dX_q/dt = Σ_k β_{q,k} h_{q,k}(X_1, …, X_s)
//! ```
//!
//! into its integral form, approximates the integrals of the basis functions
//! `h_{q,k}` by cumulative quadrature over the observed data, and solves for
//! the coefficients `β` by linear least squares. Because the covariates are
//! built from noisy observations, each basis evaluation is replaced by a
//! bias-corrected version `h*` with `E[h*(Y)] = h(X)` under the declared
//! observation-noise model; this is what makes the estimates consistent.
//! We call the resulting method bias-corrected least squares (BCLS).
//!
//! The crate also ships the machinery needed to study the estimator:
//!
//! - [`model`]: expression ASTs, model specifications, and staged
//!   estimation plans, including the built-in logistic-growth and
//!   FitzHugh-Nagumo systems.
//! - [`noise`]: observation-noise models, automatic derivation of the
//!   corrections `h*`, and residual-σ estimation via smoothing splines.
//! - [`quadrature`]: cumulative trapezoid / left-endpoint integration.
//! - [`bcls`]: stage construction, the linear solve, and fit diagnostics.
//! - [`odesim`]: fixed-step RK4 integration and synthetic data generation.
//! - [`nls`]: the Levenberg–Marquardt baseline and SSE surface scans.
//! - [`mc`]: Monte Carlo sweeps, consistency diagnostics, and bootstrap
//!   confidence intervals.
//!
//! The crate is `no_std`-compatible (with `alloc`): disable default features
//! and enable `libm` for builds without the standard library. The `parallel`
//! feature (on by default) runs Monte Carlo replicates on a rayon pool.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("bcls-core requires either the `std` or the `libm` feature");

pub(crate) mod math;
pub(crate) mod runtime;

pub mod bcls;
pub mod linalg;
pub mod mc;
pub mod model;
pub mod nls;
pub mod noise;
pub mod odesim;
pub mod quadrature;

pub use bcls::{fit_bcls, BclsFit, FitOptions, TimeSeriesData};
pub use model::{builtin_model, BasisExpr, BuiltinModel, ModelSpec, StagePlan};
pub use noise::{correct_basis, NoiseKind, NoiseModel};
pub use odesim::{simulate_data, solve_ode, Trajectory};
