use serde::{Deserialize, Serialize};

use crate::entropy::unit_front_speed;
use crate::error::{Error, Result};
use crate::flow::repulsive_flow;
use crate::measure::{l2_distance, wasserstein2, Atom, Measure1D};
use crate::sigma::Sigma;
use crate::tolerance;

use super::scenario::Scenario;

/// Mid-mass placement `X_j = X_μ((2j - 1) / 2N)`, `j = 1..N`.
pub fn particle_positions_init(mu0: &Measure1D, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidScenario("N must be positive".into()));
    }
    let x = mu0.quantile();
    Ok((1..=n)
        .map(|j| x.eval((2 * j - 1) as f64 / (2 * n) as f64))
        .collect())
}

/// Empirical measure with mass `1/N` at each position.
pub fn empirical(positions: &[f64]) -> Result<Measure1D> {
    let m = 1.0 / positions.len() as f64;
    Measure1D::new(
        positions
            .iter()
            .map(|&position| Atom { position, mass: m })
            .collect(),
        vec![],
    )
}

/// `x_j(t) = x_j + t (2j - 1 - N) / N`.
pub fn repulsive_particle_positions(positions: &[f64], n: usize, t: f64) -> Result<Vec<f64>> {
    if positions.len() != n || n == 0 {
        return Err(Error::InvalidScenario(format!(
            "expected {n} positions, got {}",
            positions.len()
        )));
    }
    if positions.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidScenario("positions must be sorted".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidTime(format!("non-negative, got {t}")));
    }
    Ok(positions
        .iter()
        .enumerate()
        .map(|(i, &x)| x + unit_front_speed(i + 1, n) * t)
        .collect())
}

pub fn repulsive_particle_flow(positions: &[f64], n: usize, t: f64) -> Result<Measure1D> {
    empirical(&repulsive_particle_positions(positions, n, t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: f64,
    /// `d_W(μ^N(t), μ(t))`.
    pub distance: f64,
    /// `‖X_0 - X_0^N‖`.
    pub initial_distance: f64,
    /// `‖X_0 - X_0^N‖ + t/N`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Particle approximation error of the repulsive flow on the `(N, t)` grid
/// of the scenario, ordered by `N` then `t`.
pub fn convergence_study(sc: &Scenario) -> Result<Vec<ConvergenceRow>> {
    if sc.sigma != Sigma::Repulsive {
        return Err(Error::Unsupported("convergence study is for σ = -1".into()));
    }
    let x0 = sc.measure.quantile();
    let mut ns = sc.n.clone();
    ns.sort_unstable();
    let mut rows = Vec::with_capacity(ns.len() * sc.times.len());
    for n in ns {
        let init = particle_positions_init(&sc.measure, n)?;
        let initial_distance = l2_distance(&x0, &empirical(&init)?.quantile());
        for &t in &sc.times {
            let exact = repulsive_flow(&sc.measure, t)?;
            let approx = repulsive_particle_flow(&init, n, t)?;
            let distance = wasserstein2(&approx, &exact);
            let bound = initial_distance + t / n as f64;
            rows.push(ConvergenceRow {
                n,
                t,
                distance,
                initial_distance,
                bound,
                within_bound: distance <= bound + tolerance::PROOF_BOUND,
            });
        }
    }
    Ok(rows)
}
