use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::EntropySolution;
use crate::error::{Error, Result};
use crate::flow::{repulsive_flow, ParticleTrajectory, QuantileFlow};
use crate::measure::{l1_distance, l2_distance, wasserstein2, Measure1D};
use crate::sigma::Sigma;
use crate::tolerance;

use super::random::{random_measure, random_time, rng_from_seed, MeasureClass};

pub const SAMPLES_PER_TRIAL: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `d_W(μ_t, ν_t) ≤ d_W(μ_0, ν_0)` along the gradient flow.
    Wasserstein,
    /// `‖F_t - G_t‖_{L¹} ≤ ‖F_0 - G_0‖_{L¹}` for entropy solutions.
    Entropy,
    /// `‖X_t - Y_t‖_{L²} ≤ ‖X_0 - Y_0‖_{L²}` along the L² flow.
    L2,
}

/// Distances at one time for one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub t: f64,
    pub wasserstein: f64,
    pub entropy: f64,
    pub l2: f64,
}

impl PairSample {
    fn get(&self, which: Inequality) -> f64 {
        match which {
            Inequality::Wasserstein => self.wasserstein,
            Inequality::Entropy => self.entropy,
            Inequality::L2 => self.l2,
        }
    }
}

type FlowAt<'a> = &'a dyn Fn(f64) -> Result<Measure1D>;

fn distances(
    t: f64,
    flows: (FlowAt<'_>, FlowAt<'_>),
    entropy: (&EntropySolution, &EntropySolution),
    l2: (&QuantileFlow, &QuantileFlow),
) -> Result<PairSample> {
    Ok(PairSample {
        t,
        wasserstein: wasserstein2(&flows.0(t)?, &flows.1(t)?),
        entropy: l1_distance(&entropy.0.profile(t)?, &entropy.1.profile(t)?),
        l2: l2_distance(&l2.0.at(t)?, &l2.1.at(t)?),
    })
}

/// Distances between the evolutions of `mu` and `nu` at time 0 followed by
/// each of `times`, along all three routes. `σ = 1` needs atomic data.
pub fn pair_distances(
    mu: &Measure1D,
    nu: &Measure1D,
    sigma: Sigma,
    times: &[f64],
) -> Result<Vec<PairSample>> {
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let attractive = |m: &Measure1D| -> Result<Box<dyn Fn(f64) -> Result<Measure1D>>> {
        let traj = ParticleTrajectory::simulate(m, horizon)?;
        Ok(Box::new(move |t| traj.state_at(t)?.measure()))
    };
    let repulsive = |m: &Measure1D| -> Box<dyn Fn(f64) -> Result<Measure1D>> {
        let m = m.clone();
        Box::new(move |t| repulsive_flow(&m, t))
    };
    let (f_mu, f_nu) = match sigma {
        Sigma::Attractive => (attractive(mu)?, attractive(nu)?),
        Sigma::Repulsive => (repulsive(mu), repulsive(nu)),
    };
    let e_mu = EntropySolution::from_measure(mu, sigma)?;
    let e_nu = EntropySolution::from_measure(nu, sigma)?;
    let q_mu = QuantileFlow::new(mu.quantile(), sigma)?;
    let q_nu = QuantileFlow::new(nu.quantile(), sigma)?;
    std::iter::once(0.0)
        .chain(times.iter().copied())
        .map(|t| distances(t, (&*f_mu, &*f_nu), (&e_mu, &e_nu), (&q_mu, &q_nu)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub t: f64,
    pub inequality: Inequality,
    pub before: f64,
    pub after: f64,
    pub mu: Measure1D,
    pub nu: Measure1D,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub seed: u64,
    pub sigma: Sigma,
    pub trials: usize,
    /// Largest `after / before` seen, per inequality (pairs at distance 0
    /// are excluded from the ratio but still checked).
    pub max_ratio_wasserstein: f64,
    pub max_ratio_entropy: f64,
    pub max_ratio_l2: f64,
    pub violations: Vec<Violation>,
    pub pass: bool,
}

/// Random pairs evolved to three random times each; every contraction
/// inequality is checked with slack `1e-10`. Trials run in order, so the
/// report depends only on `(seed, sigma, trials)`.
pub fn contraction_suite(seed: u64, sigma: Sigma, trials: usize) -> Result<ContractionReport> {
    if trials == 0 {
        return Err(Error::InvalidScenario("trials must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut report = ContractionReport {
        seed,
        sigma,
        trials,
        max_ratio_wasserstein: 0.0,
        max_ratio_entropy: 0.0,
        max_ratio_l2: 0.0,
        violations: vec![],
        pass: true,
    };
    for trial in 0..trials {
        let class = match sigma {
            Sigma::Attractive => MeasureClass::Atomic,
            Sigma::Repulsive => [
                MeasureClass::Atomic,
                MeasureClass::Continuous,
                MeasureClass::Mixed,
            ][rng.gen_range(0..3)],
        };
        let mu = random_measure(&mut rng, class);
        let nu = random_measure(&mut rng, class);
        let mut times: Vec<f64> = (0..SAMPLES_PER_TRIAL)
            .map(|_| random_time(&mut rng))
            .collect();
        times.sort_by(f64::total_cmp);

        let samples = pair_distances(&mu, &nu, sigma, &times)?;
        let start = samples[0];
        for s in &samples[1..] {
            for (which, max) in [
                (Inequality::Wasserstein, &mut report.max_ratio_wasserstein),
                (Inequality::Entropy, &mut report.max_ratio_entropy),
                (Inequality::L2, &mut report.max_ratio_l2),
            ] {
                let (before, after) = (start.get(which), s.get(which));
                if before > 0.0 {
                    *max = max.max(after / before);
                }
                if after > before + tolerance::CONTRACTION {
                    report.violations.push(Violation {
                        trial,
                        t: s.t,
                        inequality: which,
                        before,
                        after,
                        mu: mu.clone(),
                        nu: nu.clone(),
                    });
                }
            }
        }
    }
    report.pass = report.violations.is_empty();
    Ok(report)
}
