//! Radial solvers, transforms and integral identities for
//! `-Δu - μ u/|x|^2 = λ u^p - ε u^q` and its weighted form
//! `-div(|x|^{-2ν} ∇v) = λ |x|^{-(p+1)ν} v^p - ε |x|^{-(q+1)ν} v^q`, `u = |x|^{-ν} v`.

// `!(x > 0.0)` is used on purpose: NaN must fail the same checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowup;
pub mod classifier;
pub mod constants;
pub mod error;
pub mod extended;
pub mod greenfn;
pub mod large_solution;
pub mod pohozaev;
pub mod quad;
pub mod radial_ode;
pub mod singular_cauchy;
pub mod variational;

pub use error::{Error, Result};
