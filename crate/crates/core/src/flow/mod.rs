//! Gradient-flow solutions: sticky particles for `σ = 1`, the explicit
//! spreading map for `σ = -1`, and the L² flow of the quantile.

mod energy;
mod particles;
mod quantile;
mod repulsive;

pub use energy::{
    energy_dissipation_trace, is_non_increasing, EnergySample, RepulsiveTrajectory, Trajectory,
};
pub use particles::{
    attractive_particle_flow, MergeEvent, Particle, ParticleState, ParticleTrajectory,
};
pub use quantile::{l2_flow, minimal_subdifferential_l2, QuantileFlow};
pub use repulsive::repulsive_flow;

use crate::error::{Error, Result};
use crate::measure::Measure1D;
use crate::sigma::Sigma;

/// Wasserstein gradient flow of `μ0` at time `t` for either sign.
///
/// For `σ = 1` the datum must be atomic.
pub fn gradient_flow(mu0: &Measure1D, sigma: Sigma, t: f64) -> Result<Measure1D> {
    match sigma {
        Sigma::Repulsive => repulsive_flow(mu0, t),
        Sigma::Attractive if mu0.is_atomic() => attractive_particle_flow(mu0, t)?.measure(),
        Sigma::Attractive => Err(Error::Unsupported(
            "attractive flow of non-atomic data: discretize first".into(),
        )),
    }
}
