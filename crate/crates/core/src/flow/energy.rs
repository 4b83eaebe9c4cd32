use serde::{Deserialize, Serialize};

use crate::entropy::EntropySolution;
use crate::error::Result;
use crate::measure::{interaction_energy, measure_of, Measure1D};
use crate::sigma::Sigma;

use super::particles::ParticleTrajectory;
use super::quantile::QuantileFlow;
use super::repulsive::repulsive_flow;

/// A curve of measures that can be sampled.
pub trait Trajectory {
    fn measure_at(&self, t: f64) -> Result<Measure1D>;

    /// Event times in `[0, horizon]` worth sampling besides the requested ones.
    fn event_times(&self, _horizon: f64) -> Vec<f64> {
        vec![]
    }
}

impl Trajectory for ParticleTrajectory {
    fn measure_at(&self, t: f64) -> Result<Measure1D> {
        self.state_at(t)?.measure()
    }

    fn event_times(&self, horizon: f64) -> Vec<f64> {
        self.merge_times()
            .into_iter()
            .filter(|&t| t <= horizon)
            .collect()
    }
}

impl Trajectory for QuantileFlow {
    fn measure_at(&self, t: f64) -> Result<Measure1D> {
        measure_of(&self.at(t)?)
    }

    fn event_times(&self, horizon: f64) -> Vec<f64> {
        QuantileFlow::event_times(self)
            .into_iter()
            .filter(|&t| t <= horizon)
            .collect()
    }
}

impl Trajectory for EntropySolution {
    fn measure_at(&self, t: f64) -> Result<Measure1D> {
        EntropySolution::measure_at(self, t)
    }

    fn event_times(&self, horizon: f64) -> Vec<f64> {
        self.collisions(horizon)
            .map(|c| c.into_iter().map(|c| c.time).collect())
            .unwrap_or_default()
    }
}

/// Repulsive flow from a fixed initial measure.
#[derive(Debug, Clone, PartialEq)]
pub struct RepulsiveTrajectory(pub Measure1D);

impl Trajectory for RepulsiveTrajectory {
    fn measure_at(&self, t: f64) -> Result<Measure1D> {
        repulsive_flow(&self.0, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    pub energy: f64,
}

/// Interaction energy along a trajectory at the requested samples and at
/// every event up to the last sample, sorted by time.
pub fn energy_dissipation_trace(
    traj: &impl Trajectory,
    sigma: Sigma,
    samples: &[f64],
) -> Result<Vec<EnergySample>> {
    let horizon = samples.iter().copied().fold(0.0, f64::max);
    let mut times: Vec<f64> = samples.to_vec();
    times.extend(traj.event_times(horizon));
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
        .into_iter()
        .map(|t| {
            Ok(EnergySample {
                t,
                energy: interaction_energy(&traj.measure_at(t)?, sigma),
            })
        })
        .collect()
}

/// True when the energies never increase by more than `tol`.
pub fn is_non_increasing(trace: &[EnergySample], tol: f64) -> bool {
    trace.windows(2).all(|w| w[1].energy <= w[0].energy + tol)
}
