//! Entropy solutions of `∂t F + ∂x σF(1-F) = 0` for monotone data.

mod flux;
mod fronts;
mod solution;
mod weak;

pub use flux::{unit_front_speed, Flux};
pub use fronts::{wft_advance, wft_init, Collision, Front, FrontSet, FrontTraceRow};
pub use solution::{
    evaluate, oleinik_check, riemann, EntropySolution, Fan, OleinikReport, OleinikSampling,
};
pub use weak::{weak_residual, PiecewisePoly, Poly, TestFunction};
