//! Numerical thresholds shared across solvers and checks.

/// Allowed deviation of the total mass from 1 before construction fails.
pub const MASS_REJECT: f64 = 1e-9;

/// Relative density difference below which adjacent segments are merged.
pub const DENSITY_MERGE: f64 = 1e-13;

/// Relative window inside which collision events are treated as simultaneous.
pub const EVENT_TIME: f64 = 1e-13;

/// Agreement required between the two interaction-energy evaluations.
pub const ENERGY_AGREEMENT: f64 = 1e-10;

/// Slack on the Oleinik constant `1/2`.
pub const OLEINIK: f64 = 1e-9;

/// Cross-formulation agreement.
pub const EQUIVALENCE: f64 = 1e-10;

/// Slack on contraction inequalities.
pub const CONTRACTION: f64 = 1e-10;

/// `d_{W,1}` threshold for plan marginals.
pub const MARGINAL: f64 = 1e-12;

/// Cdf limits must be within this of 0 and 1.
pub const CDF_LIMIT: f64 = 1e-12;

/// Slack on the particle-approximation error bound.
pub const PROOF_BOUND: f64 = 1e-12;

/// Extra slack for `σ = 1` continuum data compared after discretization.
pub const DISCRETIZED_EQUIVALENCE: f64 = 1e-8;

/// Particle count used to discretize `σ = 1` continuum data.
pub const DISCRETIZATION_PARTICLES: usize = 2048;
