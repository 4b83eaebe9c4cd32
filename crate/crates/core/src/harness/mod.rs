//! Cross-checks between the solution routes and particle convergence
//! studies. Everything runs sequentially in a fixed order, so reports are
//! reproducible from their inputs.

mod contraction;
mod equivalence;
mod particles;
pub mod random;
mod scenario;

pub use contraction::{
    contraction_suite, pair_distances, ContractionReport, Inequality, PairSample, Violation,
};
pub use equivalence::{check_equivalence, EquivalenceMode, EquivalenceReport, EquivalenceRow};
pub use particles::{
    convergence_study, empirical, particle_positions_init, repulsive_particle_flow,
    repulsive_particle_positions, ConvergenceRow,
};
pub use random::{random_measure, rng_from_seed, MeasureClass};
pub use scenario::Scenario;
