//! Exact, event-driven solvers for the one-dimensional interaction equation
//! with attractive or repulsive Newtonian potential `W(x) = σ|x|`.
//!
//! Three solution routes are provided and cross-checked:
//!
//! * the Wasserstein gradient flow, realised by sticky particles (`σ = 1`)
//!   or by the explicit spreading map (`σ = -1`), see [`flow`];
//! * the entropy solution of `∂t F + ∂x σF(1-F) = 0` for the cumulative
//!   distribution, via wave-front tracking or characteristics, see [`entropy`];
//! * the L² gradient flow of the quantile function, see [`flow::QuantileFlow`].
//!
//! All state is piecewise linear, so every distance, energy and residual is
//! integrated in closed form per piece.

// `!(a < b)` is deliberate throughout: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod flow;
pub mod harness;
pub mod io;
pub mod measure;
pub mod sigma;
pub mod subdiff;
pub mod tolerance;

pub use error::{Error, Result};
pub use measure::{
    cdf_of, flat_decomposition, interaction_energy, measure_of, quantile_of, wasserstein1,
    wasserstein2, Atom, FlatDecomposition, FlatInterval, FunctionKind, Measure1D, PiecewiseLinear,
    Segment,
};
pub use sigma::Sigma;
