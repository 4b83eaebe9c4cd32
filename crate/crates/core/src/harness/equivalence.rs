use serde::{Deserialize, Serialize};

use crate::entropy::EntropySolution;
use crate::error::Result;
use crate::flow::{repulsive_flow, ParticleTrajectory, QuantileFlow};
use crate::measure::{l2_distance, measure_of, wasserstein2, Measure1D, PiecewiseLinear};
use crate::sigma::Sigma;
use crate::tolerance;

use super::particles::{empirical, particle_positions_init};
use super::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EquivalenceMode {
    /// All three routes on the initial datum itself.
    Exact,
    /// `σ = 1` continuum data: particle and entropy routes on the `N`-particle
    /// discretization only.
    Discretized {
        #[serde(rename = "N")]
        n: usize,
        initial_distance: f64,
    },
}

/// Discrepancies at one time. Route 1 is the Wasserstein gradient flow,
/// route 2 the entropy solution, route 3 the L² flow of the quantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub t: f64,
    pub dw_flow_entropy: f64,
    pub dw_flow_l2: Option<f64>,
    pub dw_entropy_l2: Option<f64>,
    /// `‖X_flow - X_L²‖` with the L² flow taken as computed, without a
    /// round trip through a measure.
    pub quantile_l2: Option<f64>,
    pub pass: bool,
}

impl EquivalenceRow {
    pub fn max(&self) -> f64 {
        [
            Some(self.dw_flow_entropy),
            self.dw_flow_l2,
            self.dw_entropy_l2,
            self.quantile_l2,
        ]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub sigma: Sigma,
    pub mode: EquivalenceMode,
    pub tolerance: f64,
    pub rows: Vec<EquivalenceRow>,
    pub pass: bool,
}

enum Flow {
    Particles(ParticleTrajectory),
    Repulsive(Measure1D),
}

impl Flow {
    fn at(&self, t: f64) -> Result<Measure1D> {
        match self {
            Flow::Particles(p) => p.state_at(t)?.measure(),
            Flow::Repulsive(mu) => repulsive_flow(mu, t),
        }
    }
}

/// Runs the three solution routes at every scenario time and compares them.
pub fn check_equivalence(sc: &Scenario) -> Result<EquivalenceReport> {
    let horizon = sc.times.iter().copied().fold(0.0, f64::max);
    let (mu0, mode, tol) = if sc.sigma == Sigma::Attractive && !sc.measure.is_atomic() {
        let n = tolerance::DISCRETIZATION_PARTICLES;
        let discrete = empirical(&particle_positions_init(&sc.measure, n)?)?;
        let initial_distance = wasserstein2(&discrete, &sc.measure);
        (
            discrete,
            EquivalenceMode::Discretized {
                n,
                initial_distance,
            },
            initial_distance + tolerance::DISCRETIZED_EQUIVALENCE,
        )
    } else {
        (
            sc.measure.clone(),
            EquivalenceMode::Exact,
            tolerance::EQUIVALENCE,
        )
    };

    let flow = match sc.sigma {
        Sigma::Attractive => Flow::Particles(ParticleTrajectory::simulate(&mu0, horizon)?),
        Sigma::Repulsive => Flow::Repulsive(mu0.clone()),
    };
    let entropy = EntropySolution::from_measure(&mu0, sc.sigma)?;
    let l2 = match mode {
        EquivalenceMode::Exact => Some(QuantileFlow::new(mu0.quantile(), sc.sigma)?),
        EquivalenceMode::Discretized { .. } => None,
    };

    let mut rows = Vec::with_capacity(sc.times.len());
    for &t in &sc.times {
        let c1 = flow.at(t)?;
        let c2 = measure_of(&entropy.profile(t)?)?;
        let x3: Option<PiecewiseLinear> = l2.as_ref().map(|q| q.at(t)).transpose()?;
        let c3 = x3.as_ref().map(measure_of).transpose()?;
        let mut row = EquivalenceRow {
            t,
            dw_flow_entropy: wasserstein2(&c1, &c2),
            dw_flow_l2: c3.as_ref().map(|c3| wasserstein2(&c1, c3)),
            dw_entropy_l2: c3.as_ref().map(|c3| wasserstein2(&c2, c3)),
            quantile_l2: x3.as_ref().map(|x3| l2_distance(&c1.quantile(), x3)),
            pass: false,
        };
        row.pass = row.max() < tol;
        rows.push(row);
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(EquivalenceReport {
        sigma: sc.sigma,
        mode,
        tolerance: tol,
        rows,
        pass,
    })
}
