use serde::{Deserialize, Serialize};

use super::flux::Flux;
use super::fronts::{wft_init, Collision, FrontSet};
use crate::error::{Error, Result};
use crate::measure::{FunctionKind, Measure1D, PiecewiseLinear};
use crate::sigma::Sigma;
use crate::tolerance;

/// A rarefaction fan emanating from a jump of the initial cdf.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fan {
    pub origin: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Representation {
    /// Shocks tracked through collisions.
    Fronts(FrontSet),
    /// Repulsive exact flux: every knot `(x, F)` of the initial cdf travels
    /// along its characteristic `x + t(2F - 1)`. Jumps open into fans,
    /// ramps stretch, and since all data is increasing nothing ever crosses.
    Characteristics,
}

/// Entropy solution of `∂t F + ∂x σF(1-F) = 0` for non-decreasing data.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropySolution {
    sigma: Sigma,
    initial: PiecewiseLinear,
    repr: Representation,
}

impl EntropySolution {
    /// Exact-flux solution: front tracking for `σ = 1` (data must be
    /// piecewise constant), characteristics for `σ = -1`.
    pub fn new(initial: PiecewiseLinear, sigma: Sigma) -> Result<Self> {
        if initial.kind() != FunctionKind::Cdf {
            return Err(Error::InvalidFunction("initial datum must be a cdf".into()));
        }
        let repr = match sigma {
            Sigma::Attractive => {
                if !initial.is_piecewise_constant() {
                    return Err(Error::Unsupported(
                        "attractive entropy solutions need piecewise-constant data; \
                         discretize the initial measure first"
                            .into(),
                    ));
                }
                Representation::Fronts(wft_init(&initial, Flux::exact(sigma))?)
            }
            Sigma::Repulsive => Representation::Characteristics,
        };
        Ok(Self {
            sigma,
            initial,
            repr,
        })
    }

    pub fn from_measure(mu0: &Measure1D, sigma: Sigma) -> Result<Self> {
        Self::new(mu0.cdf(), sigma)
    }

    /// Wave-front tracking with an explicit flux, e.g. the polygonal `g_N`.
    pub fn front_tracking(initial: PiecewiseLinear, flux: Flux) -> Result<Self> {
        let fronts = wft_init(&initial, flux)?;
        Ok(Self {
            sigma: flux.sigma(),
            initial,
            repr: Representation::Fronts(fronts),
        })
    }

    #[cfg(test)]
    pub(crate) fn from_fronts_unchecked(initial: PiecewiseLinear, fronts: FrontSet) -> Self {
        Self {
            sigma: fronts.flux.sigma(),
            initial,
            repr: Representation::Fronts(fronts),
        }
    }

    pub fn sigma(&self) -> Sigma {
        self.sigma
    }

    pub fn initial(&self) -> &PiecewiseLinear {
        &self.initial
    }

    pub fn fronts(&self) -> Option<&FrontSet> {
        match &self.repr {
            Representation::Fronts(fs) => Some(fs),
            Representation::Characteristics => None,
        }
    }

    /// Fans of the characteristic representation, one per initial jump.
    pub fn fans(&self) -> Vec<Fan> {
        match self.repr {
            Representation::Fronts(_) => Vec::new(),
            Representation::Characteristics => self
                .initial
                .jumps()
                .into_iter()
                .map(|(origin, lower, upper)| Fan {
                    origin,
                    lower,
                    upper,
                })
                .collect(),
        }
    }

    /// Cdf `F(·, t)`; at `t = 0` the right-continuous initial datum.
    pub fn profile(&self, t: f64) -> Result<PiecewiseLinear> {
        if !(t >= 0.0) {
            return Err(Error::InvalidTime(format!("non-negative, got {t}")));
        }
        match &self.repr {
            Representation::Fronts(fs) => fs.advance(t)?.profile(self.initial.first().v),
            Representation::Characteristics => {
                let knots = self
                    .initial
                    .knots()
                    .iter()
                    .map(|k| (k.x + t * (2.0 * k.v - 1.0), k.v))
                    .collect();
                PiecewiseLinear::cdf(knots)
            }
        }
    }

    /// Collisions up to `horizon` (none for the characteristic form).
    pub fn collisions(&self, horizon: f64) -> Result<Vec<Collision>> {
        match &self.repr {
            Representation::Fronts(fs) => Ok(fs.advance_traced(horizon)?.1),
            Representation::Characteristics => Ok(Vec::new()),
        }
    }

    /// Straight pieces of every breakpoint trajectory on `[0, horizon]`, as
    /// `(t_start, t_end, x_start, speed)`.
    pub(crate) fn breakpoint_paths(&self, horizon: f64) -> Result<Vec<(f64, f64, f64, f64)>> {
        match &self.repr {
            Representation::Characteristics => Ok(self
                .initial
                .knots()
                .iter()
                .map(|k| (0.0, horizon, k.x, 2.0 * k.v - 1.0))
                .collect()),
            Representation::Fronts(fs) => {
                let events = fs.advance_traced(horizon)?.1;
                let mut times: Vec<f64> = vec![0.0];
                times.extend(events.iter().map(|e| e.time));
                times.push(horizon);
                times.dedup();
                let mut paths = Vec::new();
                for w in times.windows(2) {
                    let mid = 0.5 * (w[0] + w[1]);
                    for f in fs.advance(mid)?.fronts {
                        paths.push((w[0], w[1], f.position_at(w[0]), f.speed));
                    }
                }
                Ok(paths)
            }
        }
    }

    pub fn measure_at(&self, t: f64) -> Result<Measure1D> {
        Measure1D::from_function(&self.profile(t)?)
    }
}

/// Solution of the Riemann problem with states `left < right` jumping at `x0`.
pub fn riemann(sigma: Sigma, left: f64, right: f64, x0: f64) -> Result<EntropySolution> {
    if !(0.0..=1.0).contains(&left) || !(0.0..=1.0).contains(&right) || !(left < right) {
        return Err(Error::RiemannData { left, right });
    }
    EntropySolution::new(PiecewiseLinear::cdf(vec![(x0, left), (x0, right)])?, sigma)
}

pub fn evaluate(sol: &EntropySolution, x: f64, t: f64) -> Result<f64> {
    Ok(sol.profile(t)?.eval(x))
}

/// Where the Oleinik ratio is sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OleinikSampling {
    pub x_min: f64,
    pub x_max: f64,
    pub x_count: usize,
    pub z_values: Vec<f64>,
    /// Also test every linear piece of the profile end to end, which hits the
    /// exact maximal slope.
    pub include_breakpoints: bool,
}

impl OleinikSampling {
    /// Uniform grid over the support of the solution at `t`, padded by 1.
    pub fn covering(profile: &PiecewiseLinear, x_count: usize) -> Self {
        let (lo, hi) = (profile.first().x - 1.0, profile.last().x + 1.0);
        let span = hi - lo;
        Self {
            x_min: lo,
            x_max: hi,
            x_count,
            z_values: vec![span * 1e-3, span * 1e-2, span * 0.1],
            include_breakpoints: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OleinikReport {
    pub max_ratio: f64,
    pub pass: bool,
}

/// Largest sampled `t (F(x+z,t) - F(x,t)) / z`; passes iff `≤ 1/2 + 1e-9`.
pub fn oleinik_check(
    sol: &EntropySolution,
    t: f64,
    samples: &OleinikSampling,
) -> Result<OleinikReport> {
    if !(t > 0.0) {
        return Err(Error::InvalidTime(format!(
            "positive for the Oleinik check, got {t}"
        )));
    }
    if sol.sigma() != Sigma::Repulsive {
        return Err(Error::Unsupported(
            "the Oleinik condition applies to the repulsive (convex-flux) case".into(),
        ));
    }
    let f = sol.profile(t)?;
    let mut max_ratio: f64 = 0.0;
    let mut ratio = |x: f64, z: f64| {
        if z > 0.0 {
            max_ratio = max_ratio.max(t * (f.eval(x + z) - f.eval(x)) / z);
        }
    };
    if samples.x_count > 0 {
        let step = if samples.x_count > 1 {
            (samples.x_max - samples.x_min) / (samples.x_count - 1) as f64
        } else {
            0.0
        };
        for i in 0..samples.x_count {
            let x = samples.x_min + step * i as f64;
            for &z in &samples.z_values {
                ratio(x, z);
            }
        }
    }
    if samples.include_breakpoints {
        for w in f.knots().windows(2) {
            if w[1].x > w[0].x {
                ratio(w[0].x, w[1].x - w[0].x);
            }
        }
    }
    Ok(OleinikReport {
        max_ratio,
        pass: max_ratio <= 0.5 + tolerance::OLEINIK,
    })
}
