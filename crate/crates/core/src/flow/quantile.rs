use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{
    flat_decomposition, FlatDecomposition, FlatInterval, FunctionKind, PiecewiseLinear,
};
use crate::sigma::Sigma;
use crate::tolerance;

/// Element of minimal norm of the subdifferential of the quantile energy
/// `σ ∫ (2s - 1) X(s) ds` restricted to non-decreasing `X`.
///
/// Accepts a quantile or a velocity-kind function; the latter is checked for
/// monotonicity since the energy is `+∞` off the cone.
pub fn minimal_subdifferential_l2(x: &PiecewiseLinear, sigma: Sigma) -> Result<PiecewiseLinear> {
    let x = match x.kind() {
        FunctionKind::Quantile => x.clone(),
        FunctionKind::Velocity => {
            let knots = x.knots().iter().map(|k| (k.x, k.v)).collect();
            PiecewiseLinear::quantile(knots)?
        }
        FunctionKind::Cdf => {
            return Err(Error::InvalidFunction(
                "expected a function on (0, 1)".into(),
            ))
        }
    };
    match sigma {
        Sigma::Repulsive => PiecewiseLinear::velocity(vec![(0.0, 1.0), (1.0, -1.0)]),
        Sigma::Attractive => {
            let flats = flat_decomposition(&x)?;
            let mut knots = Vec::new();
            let mut cursor = 0.0;
            for f in &flats.intervals {
                if f.start > cursor {
                    knots.push((cursor, 2.0 * cursor - 1.0));
                    knots.push((f.start, 2.0 * f.start - 1.0));
                }
                let c = f.start + f.end - 1.0;
                knots.push((f.start, c));
                knots.push((f.end, c));
                cursor = f.end;
            }
            if cursor < 1.0 {
                knots.push((cursor, 2.0 * cursor - 1.0));
                knots.push((1.0, 1.0));
            }
            PiecewiseLinear::velocity(knots)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Flat {
    start: f64,
    end: f64,
    speed: f64,
    anchor_value: f64,
    anchor_time: f64,
}

impl Flat {
    fn new(start: f64, end: f64, value: f64, time: f64) -> Self {
        Self {
            start,
            end,
            speed: 1.0 - start - end,
            anchor_value: value,
            anchor_time: time,
        }
    }

    fn value_at(&self, t: f64) -> f64 {
        self.anchor_value + self.speed * (t - self.anchor_time)
    }
}

/// Flat intervals right after an event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FlatSnapshot {
    time: f64,
    flats: Vec<Flat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Evolution {
    Translation,
    /// Piecewise-constant data under `σ = 1`: exact flat-interval events.
    Flats(Vec<FlatSnapshot>),
    /// Other data under `σ = 1`: closed form valid up to `limit`.
    Continuum {
        limit: f64,
    },
}

/// L² gradient flow `X_t` of the quantile energy on the cone of
/// non-decreasing functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileFlow {
    sigma: Sigma,
    initial: PiecewiseLinear,
    evolution: Evolution,
}

impl QuantileFlow {
    pub fn new(x0: PiecewiseLinear, sigma: Sigma) -> Result<Self> {
        if x0.kind() != FunctionKind::Quantile {
            return Err(Error::InvalidFunction(
                "initial datum must be a quantile".into(),
            ));
        }
        let evolution = match sigma {
            Sigma::Repulsive => Evolution::Translation,
            Sigma::Attractive if x0.is_piecewise_constant() => {
                Evolution::Flats(simulate_flats(&flat_decomposition(&x0)?))
            }
            Sigma::Attractive => Evolution::Continuum {
                limit: continuum_limit(&x0)?,
            },
        };
        Ok(Self {
            sigma,
            initial: x0,
            evolution,
        })
    }

    pub fn sigma(&self) -> Sigma {
        self.sigma
    }

    pub fn initial(&self) -> &PiecewiseLinear {
        &self.initial
    }

    /// Times at which flat intervals merge (empty unless the data are
    /// piecewise constant and `σ = 1`).
    pub fn event_times(&self) -> Vec<f64> {
        match &self.evolution {
            Evolution::Flats(snaps) => snaps[1..].iter().map(|s| s.time).collect(),
            _ => vec![],
        }
    }

    /// Latest time for which [`QuantileFlow::at`] is exact.
    pub fn horizon(&self) -> f64 {
        match self.evolution {
            Evolution::Continuum { limit } => limit,
            _ => f64::INFINITY,
        }
    }

    /// `X_t`.
    pub fn at(&self, t: f64) -> Result<PiecewiseLinear> {
        if !(t >= 0.0) {
            return Err(Error::InvalidTime(format!("non-negative, got {t}")));
        }
        match &self.evolution {
            Evolution::Translation => self
                .initial
                .map_values(FunctionKind::Quantile, |s, v| v + t * (2.0 * s - 1.0)),
            Evolution::Flats(snaps) => {
                let flats = &snapshot_at(snaps, t).flats;
                let mut knots = Vec::with_capacity(2 * flats.len());
                let mut floor = f64::NEG_INFINITY;
                for f in flats {
                    // flats within rounding of their meeting time may cross
                    // by an ulp
                    let v = f.value_at(t).max(floor);
                    floor = v;
                    knots.push((f.start, v));
                    knots.push((f.end, v));
                }
                PiecewiseLinear::quantile(knots)
            }
            Evolution::Continuum { limit } => {
                if t > *limit {
                    return Err(Error::ContinuumFlattening {
                        limit: *limit,
                        requested: t,
                    });
                }
                continuum_at(&self.initial, t)
            }
        }
    }

    /// Flat decomposition of `X_t`.
    pub fn flats_at(&self, t: f64) -> Result<FlatDecomposition> {
        flat_decomposition(&self.at(t)?)
    }
}

pub fn l2_flow(x0: &PiecewiseLinear, sigma: Sigma, t: f64) -> Result<PiecewiseLinear> {
    QuantileFlow::new(x0.clone(), sigma)?.at(t)
}

fn snapshot_at(snaps: &[FlatSnapshot], t: f64) -> &FlatSnapshot {
    let idx = snaps.partition_point(|s| s.time <= t);
    &snaps[idx.max(1) - 1]
}

fn meeting_time(l: &Flat, r: &Flat) -> Option<f64> {
    if l.speed <= r.speed {
        return None;
    }
    Some(
        (r.anchor_value - l.anchor_value + l.speed * l.anchor_time - r.speed * r.anchor_time)
            / (l.speed - r.speed),
    )
}

fn simulate_flats(initial: &FlatDecomposition) -> Vec<FlatSnapshot> {
    let mut flats: Vec<Flat> = initial
        .intervals
        .iter()
        .map(|f| Flat::new(f.start, f.end, f.value, 0.0))
        .collect();
    let mut snaps = vec![FlatSnapshot {
        time: 0.0,
        flats: flats.clone(),
    }];
    let mut now = 0.0f64;
    loop {
        let times: Vec<Option<f64>> = flats
            .windows(2)
            .map(|w| meeting_time(&w[0], &w[1]).map(|t| t.max(now)))
            .collect();
        let earliest = times
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if !earliest.is_finite() {
            break;
        }
        let window = earliest + tolerance::EVENT_TIME * earliest.abs().max(1.0);
        let mut next = Vec::with_capacity(flats.len());
        let mut i = 0;
        while i < flats.len() {
            let mut j = i;
            while j < times.len() && matches!(times[j], Some(t) if t <= window) {
                j += 1;
            }
            if j == i {
                next.push(flats[i]);
            } else {
                let value = flats[i].value_at(earliest);
                next.push(Flat::new(flats[i].start, flats[j].end, value, earliest));
            }
            i = j + 1;
        }
        flats = next;
        now = earliest;
        snaps.push(FlatSnapshot {
            time: now,
            flats: flats.clone(),
        });
    }
    snaps
}

/// Classifies each linear piece of a quantile: `Some(flat)` or `None` for a
/// strictly increasing piece. Vertical pieces (jumps) are skipped.
fn pieces(
    x: &PiecewiseLinear,
    flats: &FlatDecomposition,
) -> Vec<(f64, f64, f64, f64, Option<FlatInterval>)> {
    x.knots()
        .windows(2)
        .filter(|w| w[1].x > w[0].x)
        .map(|w| {
            let flat = if w[0].v == w[1].v {
                flats.contains(0.5 * (w[0].x + w[1].x)).copied()
            } else {
                None
            };
            (w[0].x, w[1].x, w[0].v, w[1].v, flat)
        })
        .collect()
}

/// First time at which the closed form for general data stops being valid:
/// a rising piece collapses, two flats meet, or a flat reaches a rising
/// piece (immediately when they touch, since the flat then absorbs mass).
fn continuum_limit(x0: &PiecewiseLinear) -> Result<f64> {
    let flats = flat_decomposition(x0)?;
    let ps = pieces(x0, &flats);
    let mut limit = f64::INFINITY;
    for p in &ps {
        if p.4.is_none() {
            let slope = (p.3 - p.2) / (p.1 - p.0);
            limit = limit.min(0.5 * slope);
        }
    }
    // end speed of a piece at abscissa s: flat speed or 1 - 2s
    let end_speed = |p: &(f64, f64, f64, f64, Option<FlatInterval>), s: f64| match p.4 {
        Some(f) => 1.0 - f.start - f.end,
        None => 1.0 - 2.0 * s,
    };
    for w in ps.windows(2) {
        let (l, r) = (&w[0], &w[1]);
        if l.4.is_some() && r.4.is_some() && l.4 == r.4 {
            continue;
        }
        if l.4.is_none() && r.4.is_none() {
            // both ends move at 1 - 2s, the gap is preserved
            continue;
        }
        let gap = r.2 - l.3;
        let closing = end_speed(l, l.1) - end_speed(r, r.0);
        if closing > 0.0 {
            limit = limit.min(gap / closing);
        }
    }
    Ok(limit)
}

fn continuum_at(x0: &PiecewiseLinear, t: f64) -> Result<PiecewiseLinear> {
    let flats = flat_decomposition(x0)?;
    let mut knots = Vec::with_capacity(x0.knots().len());
    for p in pieces(x0, &flats) {
        match p.4 {
            Some(f) => {
                let v = p.2 + t * (1.0 - f.start - f.end);
                knots.push((p.0, v));
                knots.push((p.1, v));
            }
            None => {
                knots.push((p.0, p.2 - t * (2.0 * p.0 - 1.0)));
                knots.push((p.1, p.3 - t * (2.0 * p.1 - 1.0)));
            }
        }
    }
    PiecewiseLinear::quantile(knots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{l2_distance, Measure1D};

    fn q(knots: &[(f64, f64)]) -> PiecewiseLinear {
        PiecewiseLinear::quantile(knots.to_vec()).unwrap()
    }

    #[test]
    fn repulsive_subdifferential_is_global_line() {
        let v =
            minimal_subdifferential_l2(&q(&[(0.0, 3.0), (1.0, 3.0)]), Sigma::Repulsive).unwrap();
        assert_eq!(v.eval(0.0), 1.0);
        assert_eq!(v.eval(0.25), 0.5);
    }

    #[test]
    fn attractive_subdifferential_strictly_increasing() {
        let v =
            minimal_subdifferential_l2(&q(&[(0.0, 0.0), (1.0, 1.0)]), Sigma::Attractive).unwrap();
        for s in [0.1, 0.5, 0.9] {
            assert!((v.eval(s) - (2.0 * s - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn attractive_subdifferential_single_atom_is_zero() {
        let v =
            minimal_subdifferential_l2(&q(&[(0.0, 2.0), (1.0, 2.0)]), Sigma::Attractive).unwrap();
        for s in [0.01, 0.5, 0.99] {
            assert_eq!(v.eval(s), 0.0);
        }
    }

    #[test]
    fn attractive_subdifferential_mixed() {
        // flat on (0, 1/4), rising afterwards
        let x = q(&[(0.0, 0.0), (0.25, 0.0), (1.0, 3.0)]);
        let v = minimal_subdifferential_l2(&x, Sigma::Attractive).unwrap();
        assert_eq!(v.eval(0.1), -0.75);
        assert!((v.eval(0.5) - 0.0).abs() < 1e-15);
        // minimality: the flat value is the average of 2s - 1 over the flat
        let avg = (0.25f64 * 0.25 - 0.25) / 0.25;
        assert!((avg - v.eval(0.1)).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_monotone() {
        let x = PiecewiseLinear::velocity(vec![(0.0, 1.0), (1.0, 0.0)]).unwrap();
        assert!(matches!(
            minimal_subdifferential_l2(&x, Sigma::Attractive),
            Err(Error::NotMonotone)
        ));
        assert!(QuantileFlow::new(x, Sigma::Attractive).is_err());
    }

    #[test]
    fn repulsive_translation() {
        let x0 = q(&[(0.0, 0.0), (1.0, 0.0)]);
        let x = l2_flow(&x0, Sigma::Repulsive, 2.0).unwrap();
        assert_eq!(x.eval(0.0), -2.0);
        assert_eq!(x.eval(0.75), 1.0);
    }

    #[test]
    fn two_flats_merge_at_two() {
        let x0 = Measure1D::atomic(&[(-1.0, 0.5), (1.0, 0.5)])
            .unwrap()
            .quantile();
        let flow = QuantileFlow::new(x0, Sigma::Attractive).unwrap();
        assert_eq!(flow.event_times(), vec![2.0]);
        let d = flow.flats_at(1.0).unwrap();
        assert_eq!(d.intervals.len(), 2);
        assert_eq!(d.intervals[0].value, -0.5);
        assert_eq!(d.intervals[1].value, 0.5);
        let d = flow.flats_at(3.0).unwrap();
        assert_eq!(d.intervals.len(), 1);
        assert_eq!((d.intervals[0].start, d.intervals[0].end), (0.0, 1.0));
        assert_eq!(d.intervals[0].value, 0.0);
    }

    #[test]
    fn continuum_before_flattening() {
        // X0(s) = 4s: slope collapses at t = 2
        let x0 = q(&[(0.0, 0.0), (1.0, 4.0)]);
        let flow = QuantileFlow::new(x0.clone(), Sigma::Attractive).unwrap();
        assert_eq!(flow.horizon(), 2.0);
        let x = flow.at(0.5).unwrap();
        let expected = x0
            .map_values(FunctionKind::Quantile, |s, v| v - 0.5 * (2.0 * s - 1.0))
            .unwrap();
        assert!(l2_distance(&x, &expected) < 1e-15);
        // residual of ∂t X = -(2s - 1) by finite differences
        let h = 1e-6;
        let xh = flow.at(0.5 + h).unwrap();
        for s in [0.1, 0.4, 0.8] {
            let dt = (xh.eval(s) - x.eval(s)) / h;
            assert!((dt + 2.0 * s - 1.0).abs() < 1e-6);
        }
        assert!(matches!(
            flow.at(3.0),
            Err(Error::ContinuumFlattening { .. })
        ));
    }

    #[test]
    fn flat_touching_ramp_has_no_horizon() {
        let x0 = q(&[(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)]);
        let flow = QuantileFlow::new(x0, Sigma::Attractive).unwrap();
        assert_eq!(flow.horizon(), 0.0);
        assert!(flow.at(0.0).is_ok());
        assert!(flow.at(1e-3).is_err());
    }

    #[test]
    fn flat_separated_from_ramp() {
        // flat (0, ½) at 0 with speed ½; ramp starts at 2 with left speed 0
        let x0 = q(&[(0.0, 0.0), (0.5, 0.0), (0.5, 2.0), (1.0, 4.0)]);
        let flow = QuantileFlow::new(x0, Sigma::Attractive).unwrap();
        // gap 2 closes at rate ½ => 4; ramp slope 4 collapses at 2
        assert_eq!(flow.horizon(), 2.0);
        let x = flow.at(1.0).unwrap();
        assert_eq!(x.eval(0.25), 0.5);
        assert_eq!(x.eval(0.5), 2.0);
    }
}
