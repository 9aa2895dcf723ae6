//! Real eigenvalues of the Dirichlet-type fractional Sturm-Liouville problem
//!
//! ```text
//! -ᶜD^α (D^α y) + q y = λ y   on [0, 1],   I^{1-α} y(0) = I^{1-α} y(1) = 0
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`special`]: reciprocal Gamma and the generalized Mittag-Leffler function
//!   `E_{δ,θ}` on the real axis, including large negative arguments.
//! - [`fractional`]: left Riemann-Liouville integrals and Caputo / Riemann-Liouville
//!   derivatives of sampled functions by product integration.
//! - [`volterra`]: the Volterra integral equation equivalent of the differential
//!   equation, its classical (`α = 1`) counterpart and an equation-residual check.
//! - [`spectrum`]: the characteristic function `Δ(λ) = I^{1-α} y(1)`, bracketing
//!   intervals, eigenvalue enumeration, `N*(α)` and the critical order.

// `!(x > 0.0)` is used on purpose: it also rejects NaN. Index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fractional;
pub mod special;
pub mod spectrum;
pub mod volterra;

mod gauss_jacobi;

pub use error::{Error, Result};
pub use fractional::{Interp, QuadratureConfig, SampledFunction};
pub use special::{gamma_recip, ml, ml_dz, MLEvalConfig, MLParams, MittagLeffler};
pub use spectrum::{Eigenvalue, Interval, SearchConfig, SpectrumResult};
pub use volterra::{BoundaryData, Potential, Solution};
