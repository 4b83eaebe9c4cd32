use serde::{Deserialize, Serialize};

use super::flux::Flux;
use crate::error::{Error, Result};
use crate::measure::{FunctionKind, PiecewiseLinear};
use crate::sigma::Sigma;
use crate::tolerance;

/// A shock front moving at its Rankine–Hugoniot speed.
///
/// The position is always derived from the anchor `(anchor_position,
/// anchor_time)` where the front was created, so advancing in several steps
/// reproduces a single advance bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub position: f64,
    pub left_state: f64,
    pub right_state: f64,
    pub speed: f64,
    anchor_position: f64,
    anchor_time: f64,
}

impl Front {
    fn new(position: f64, time: f64, left_state: f64, right_state: f64, flux: &Flux) -> Self {
        Front {
            position,
            left_state,
            right_state,
            speed: flux.shock_speed(left_state, right_state),
            anchor_position: position,
            anchor_time: time,
        }
    }

    pub fn position_at(&self, t: f64) -> f64 {
        self.anchor_position + self.speed * (t - self.anchor_time)
    }

    pub fn anchor(&self) -> (f64, f64) {
        (self.anchor_position, self.anchor_time)
    }
}

/// A collision processed during an advance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collision {
    pub time: f64,
    pub position: f64,
    pub left_state: f64,
    pub right_state: f64,
    /// Number of fronts that merged into one.
    pub merged: usize,
}

/// Position-ordered fronts of a piecewise-constant monotone solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontSet {
    pub time: f64,
    pub flux: Flux,
    pub fronts: Vec<Front>,
}

/// Fronts for piecewise-constant initial data.
///
/// Each jump becomes one front, except under the repulsive `g_N`, where an
/// increasing jump over several grid cells is a fan of unit fronts leaving
/// the same point with speeds `λ_j`.
pub fn wft_init(f0: &PiecewiseLinear, flux: Flux) -> Result<FrontSet> {
    if f0.kind() != FunctionKind::Cdf {
        return Err(Error::InvalidFunction("front tracking needs a cdf".into()));
    }
    if !f0.is_piecewise_constant() {
        return Err(Error::NotPiecewiseConstant);
    }
    let mut fronts = Vec::new();
    for (x, lo, hi) in f0.jumps() {
        if hi <= lo {
            continue;
        }
        match flux {
            Flux::Exact(Sigma::Attractive) => fronts.push(Front::new(x, 0.0, lo, hi, &flux)),
            Flux::Exact(Sigma::Repulsive) => {
                return Err(Error::Unsupported(
                    "increasing jumps under the convex exact flux are rarefactions; \
                     use the characteristic solution or a discretized flux"
                        .into(),
                ))
            }
            Flux::Discretized { sigma, levels } => {
                let i = flux.grid_index(lo).ok_or(Error::OffGrid(lo))?;
                let k = flux.grid_index(hi).ok_or(Error::OffGrid(hi))?;
                let state = |j: usize| j as f64 / levels as f64;
                match sigma {
                    Sigma::Repulsive => {
                        for j in i + 1..=k {
                            fronts.push(Front::new(x, 0.0, state(j - 1), state(j), &flux));
                        }
                    }
                    Sigma::Attractive => fronts.push(Front::new(x, 0.0, state(i), state(k), &flux)),
                }
            }
        }
    }
    Ok(FrontSet {
        time: 0.0,
        flux,
        fronts,
    })
}

/// Time at which `l` catches up with `r`, computed from the anchors.
fn collision_time(l: &Front, r: &Front) -> Option<f64> {
    if l.speed <= r.speed {
        return None;
    }
    Some(
        (r.anchor_position - l.anchor_position + l.speed * l.anchor_time - r.speed * r.anchor_time)
            / (l.speed - r.speed),
    )
}

impl FrontSet {
    pub fn positions(&self) -> Vec<f64> {
        self.fronts.iter().map(|f| f.position).collect()
    }

    /// Event-driven advance to `t_target`; see [`FrontSet::advance_traced`].
    pub fn advance(&self, t_target: f64) -> Result<FrontSet> {
        self.advance_traced(t_target).map(|(fs, _)| fs)
    }

    /// Advances to `t_target`, merging fronts at every collision.
    ///
    /// Fronts meeting at the same instant (within a relative window of
    /// 1e-13) merge in one step into a single front carrying the outer
    /// states, so the result does not depend on pair order.
    pub fn advance_traced(&self, t_target: f64) -> Result<(FrontSet, Vec<Collision>)> {
        if !(t_target >= self.time) {
            return Err(Error::InvalidTime(format!(
                "at least the current time {} (got {t_target})",
                self.time
            )));
        }
        let mut fronts = self.fronts.clone();
        let mut now = self.time;
        let mut events = Vec::new();

        loop {
            let times: Vec<Option<f64>> = fronts
                .windows(2)
                .map(|w| collision_time(&w[0], &w[1]).map(|t| t.max(now)))
                .collect();
            let earliest = times
                .iter()
                .flatten()
                .copied()
                .filter(|&t| t <= t_target)
                .fold(f64::INFINITY, f64::min);
            if !earliest.is_finite() {
                break;
            }
            let window = earliest + tolerance::EVENT_TIME * earliest.abs().max(1.0);
            let hits: Vec<bool> = times
                .iter()
                .map(|t| matches!(t, Some(t) if *t <= window && *t <= t_target))
                .collect();

            let mut merged = Vec::with_capacity(fronts.len());
            let mut i = 0;
            while i < fronts.len() {
                let mut j = i;
                while j < hits.len() && hits[j] {
                    j += 1;
                }
                if j == i {
                    merged.push(fronts[i]);
                } else {
                    let first = fronts[i];
                    let last = fronts[j];
                    let position = first.position_at(earliest);
                    let front = Front::new(
                        position,
                        earliest,
                        first.left_state,
                        last.right_state,
                        &self.flux,
                    );
                    events.push(Collision {
                        time: earliest,
                        position,
                        left_state: front.left_state,
                        right_state: front.right_state,
                        merged: j - i + 1,
                    });
                    merged.push(front);
                }
                i = j + 1;
            }
            fronts = merged;
            now = earliest;
        }

        for f in &mut fronts {
            f.position = f.position_at(t_target);
        }
        Ok((
            FrontSet {
                time: t_target,
                flux: self.flux,
                fronts,
            },
            events,
        ))
    }

    /// Right-continuous cdf of the current state, with `left` as the state
    /// left of all fronts.
    pub fn profile(&self, left: f64) -> Result<PiecewiseLinear> {
        if self.fronts.is_empty() {
            return PiecewiseLinear::cdf(vec![(0.0, left), (0.0, left)]);
        }
        let knots = self
            .fronts
            .iter()
            .flat_map(|f| [(f.position, f.left_state), (f.position, f.right_state)])
            .collect();
        PiecewiseLinear::cdf(knots)
    }

    /// Rows `(t, front_index, position, left_state, right_state, speed)` at
    /// every collision time up to the last sample and at each sample time.
    pub fn trace(&self, sample_times: &[f64]) -> Result<Vec<FrontTraceRow>> {
        let horizon = sample_times.iter().copied().fold(self.time, f64::max);
        let (_, events) = self.advance_traced(horizon)?;
        let mut times: Vec<f64> = events
            .iter()
            .map(|e| e.time)
            .chain(sample_times.iter().copied())
            .collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        let mut rows = Vec::new();
        for t in times {
            let state = self.advance(t)?;
            for (i, f) in state.fronts.iter().enumerate() {
                rows.push(FrontTraceRow {
                    t,
                    front_index: i,
                    position: f.position,
                    left_state: f.left_state,
                    right_state: f.right_state,
                    speed: f.speed,
                });
            }
        }
        Ok(rows)
    }
}

pub fn wft_advance(fs: &FrontSet, t_target: f64) -> Result<FrontSet> {
    fs.advance(t_target)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontTraceRow {
    pub t: f64,
    pub front_index: usize,
    pub position: f64,
    pub left_state: f64,
    pub right_state: f64,
    pub speed: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Measure1D;

    fn attractive(points: &[(f64, f64)]) -> FrontSet {
        let f0 = Measure1D::atomic(points).unwrap().cdf();
        wft_init(&f0, Flux::exact(Sigma::Attractive)).unwrap()
    }

    #[test]
    fn init_unit_fronts_for_two_levels() {
        let f0 = Measure1D::atomic(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap().cdf();
        let fs = wft_init(&f0, Flux::discretized(Sigma::Repulsive, 2).unwrap()).unwrap();
        let speeds: Vec<f64> = fs.fronts.iter().map(|f| f.speed).collect();
        assert_eq!(speeds, vec![-0.5, 0.5]);
    }

    #[test]
    fn single_full_jump_is_stationary() {
        let fs = attractive(&[(3.0, 1.0)]);
        assert_eq!(fs.fronts.len(), 1);
        assert_eq!(fs.fronts[0].speed, 0.0);
    }

    #[test]
    fn three_atom_speeds() {
        let fs = attractive(&[(-1.0, 0.5), (0.0, 0.25), (2.0, 0.25)]);
        let speeds: Vec<f64> = fs.fronts.iter().map(|f| f.speed).collect();
        // oracle: direct g evaluation, (g(L) - g(R)) / (L - R)
        let g = |f: f64| f * (1.0 - f);
        let rh = |l: f64, r: f64| (g(l) - g(r)) / (l - r);
        let expected = [rh(0.0, 0.5), rh(0.5, 0.75), rh(0.75, 1.0)];
        for (s, e) in speeds.iter().zip(expected) {
            assert!((s - e).abs() < 1e-15);
        }
        assert_eq!(speeds, vec![0.5, -0.25, -0.75]);
    }

    #[test]
    fn rejects_off_grid_and_continuous_data() {
        let f0 = Measure1D::atomic(&[(0.0, 0.3), (1.0, 0.7)]).unwrap().cdf();
        let err = wft_init(&f0, Flux::discretized(Sigma::Repulsive, 4).unwrap()).unwrap_err();
        assert!(matches!(err, Error::OffGrid(_)));
        let f0 = Measure1D::uniform(0.0, 1.0).unwrap().cdf();
        assert_eq!(
            wft_init(&f0, Flux::exact(Sigma::Attractive)).unwrap_err(),
            Error::NotPiecewiseConstant
        );
    }

    #[test]
    fn two_fronts_merge_at_origin() {
        let fs = attractive(&[(-1.0, 0.5), (1.0, 0.5)]);
        let (after, events) = fs.advance_traced(3.0).unwrap();
        assert_eq!(events.len(), 1);
        // oracle: -1 + t/2 = 1 - t/2
        assert_eq!(events[0].time, 2.0);
        assert_eq!(events[0].position, 0.0);
        assert_eq!(after.fronts.len(), 1);
        assert_eq!(after.fronts[0].speed, 0.0);
        assert_eq!(
            (after.fronts[0].left_state, after.fronts[0].right_state),
            (0.0, 1.0)
        );
    }

    #[test]
    fn repulsive_unit_fronts_never_collide() {
        let f0 = Measure1D::atomic(&[(0.0, 0.25), (0.5, 0.5), (0.75, 0.25)])
            .unwrap()
            .cdf();
        let fs = wft_init(&f0, Flux::discretized(Sigma::Repulsive, 8).unwrap()).unwrap();
        let (after, events) = fs.advance_traced(10.0).unwrap();
        assert!(events.is_empty());
        assert_eq!(after.fronts.len(), 8);
        assert!(after.positions().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn triple_collision_independent_of_pair_order() {
        // three fronts reaching x = 0 at t = 4/3
        let fs = attractive(&[(-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)]);
        let speeds: Vec<f64> = fs.fronts.iter().map(|f| f.speed).collect();
        assert_eq!(speeds, vec![0.75, 0.0, -0.75]);
        let oracle_left_first = {
            let flux = Flux::exact(Sigma::Attractive);
            let ab = Front::new(0.0, 4.0 / 3.0, 0.0, 0.75, &flux);
            Front::new(0.0, 4.0 / 3.0, ab.left_state, 1.0, &flux)
        };
        let oracle_right_first = {
            let flux = Flux::exact(Sigma::Attractive);
            let bc = Front::new(0.0, 4.0 / 3.0, 0.25, 1.0, &flux);
            Front::new(0.0, 4.0 / 3.0, 0.0, bc.right_state, &flux)
        };
        assert_eq!(oracle_left_first.speed, oracle_right_first.speed);
        let (after, events) = fs.advance_traced(2.0).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].merged, 3);
        assert_eq!(after.fronts.len(), 1);
        assert_eq!(after.fronts[0].speed, oracle_left_first.speed);
        assert!((events[0].time - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn advance_rejects_past() {
        let fs = attractive(&[(0.0, 1.0)]).advance(1.0).unwrap();
        assert!(fs.advance(0.5).is_err());
    }

    #[test]
    fn trace_rows_cover_events() {
        let fs = attractive(&[(-1.0, 0.5), (1.0, 0.5)]);
        let rows = fs.trace(&[0.0, 1.0, 3.0]).unwrap();
        let at_two: Vec<_> = rows.iter().filter(|r| r.t == 2.0).collect();
        assert_eq!(at_two.len(), 1);
        assert_eq!(at_two[0].position, 0.0);
        assert_eq!(rows.iter().filter(|r| r.t == 0.0).count(), 2);
    }
}
