use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Atom, Measure1D};
use crate::tolerance;

/// One (possibly merged) particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub position: f64,
    pub mass: f64,
    pub velocity: f64,
    /// Indices of the initial atoms aggregated in this particle.
    pub members: Vec<usize>,
    anchor_position: f64,
    anchor_time: f64,
}

impl Particle {
    pub fn position_at(&self, t: f64) -> f64 {
        self.position_at_with(self.velocity, t)
    }

    fn position_at_with(&self, velocity: f64, t: f64) -> f64 {
        self.anchor_position + velocity * (t - self.anchor_time)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub time: f64,
    pub particles: Vec<Particle>,
}

impl ParticleState {
    pub fn measure(&self) -> Result<Measure1D> {
        Measure1D::new(
            self.particles
                .iter()
                .map(|p| Atom {
                    position: p.position,
                    mass: p.mass,
                })
                .collect(),
            vec![],
        )
    }

    pub fn positions(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.position).collect()
    }

    fn at(&self, t: f64) -> ParticleState {
        let mut out = self.clone();
        out.time = t;
        for p in &mut out.particles {
            p.position = p.position_at(t);
        }
        out
    }
}

/// `ẋ_j = -Σ_k m_k sign(x_j - x_k)` with `sign(0) = 0`: the mass to the right
/// minus the mass to the left.
fn assign_velocities(particles: &mut [Particle]) {
    // both sides summed outward so mirror-symmetric data give exact zeros
    let mut right = vec![0.0; particles.len()];
    for j in (1..particles.len()).rev() {
        right[j - 1] = right[j] + particles[j].mass;
    }
    let mut left = 0.0;
    for (p, r) in particles.iter_mut().zip(right) {
        p.velocity = r - left;
        left += p.mass;
    }
}

fn collision_time(l: &Particle, r: &Particle) -> Option<f64> {
    if l.velocity <= r.velocity {
        return None;
    }
    Some(
        (r.anchor_position - l.anchor_position + l.velocity * l.anchor_time
            - r.velocity * r.anchor_time)
            / (l.velocity - r.velocity),
    )
}

/// A merge of adjacent particles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeEvent {
    pub time: f64,
    pub position: f64,
    pub members: Vec<usize>,
}

/// Sticky-particle trajectory of the attractive flow: states right after
/// each merge, starting with the initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleTrajectory {
    pub snapshots: Vec<ParticleState>,
    pub merges: Vec<MergeEvent>,
}

impl ParticleTrajectory {
    /// Simulates until every particle has merged into one (velocities are
    /// strictly decreasing in the index, so that always happens) or until
    /// `horizon`, whichever comes first.
    pub fn simulate(mu0: &Measure1D, horizon: f64) -> Result<Self> {
        if !mu0.is_atomic() {
            return Err(Error::Unsupported(
                "sticky particles need a purely atomic initial measure".into(),
            ));
        }
        if !(horizon >= 0.0) {
            return Err(Error::InvalidTime(format!("non-negative, got {horizon}")));
        }
        let mut particles: Vec<Particle> = mu0
            .atoms()
            .iter()
            .enumerate()
            .map(|(i, a)| Particle {
                position: a.position,
                mass: a.mass,
                velocity: 0.0,
                members: vec![i],
                anchor_position: a.position,
                anchor_time: 0.0,
            })
            .collect();
        assign_velocities(&mut particles);
        let mut snapshots = vec![ParticleState {
            time: 0.0,
            particles: particles.clone(),
        }];
        let mut merges = Vec::new();
        let mut now = 0.0f64;

        loop {
            let times: Vec<Option<f64>> = particles
                .windows(2)
                .map(|w| collision_time(&w[0], &w[1]).map(|t| t.max(now)))
                .collect();
            let earliest = times
                .iter()
                .flatten()
                .copied()
                .filter(|&t| t <= horizon)
                .fold(f64::INFINITY, f64::min);
            if !earliest.is_finite() {
                break;
            }
            let window = earliest + tolerance::EVENT_TIME * earliest.abs().max(1.0);

            // every maximal run of particles meeting at `earliest` merges at once
            let mut next = Vec::with_capacity(particles.len());
            let mut i = 0;
            while i < particles.len() {
                let mut j = i;
                while j < times.len() && matches!(times[j], Some(t) if t <= window && t <= horizon)
                {
                    j += 1;
                }
                if j == i {
                    next.push(particles[i].clone());
                } else {
                    let position = particles[i].position_at(earliest);
                    let mut members: Vec<usize> = particles[i..=j]
                        .iter()
                        .flat_map(|p| p.members.iter().copied())
                        .collect();
                    members.sort_unstable();
                    merges.push(MergeEvent {
                        time: earliest,
                        position,
                        members: members.clone(),
                    });
                    next.push(Particle {
                        position,
                        mass: particles[i..=j].iter().map(|p| p.mass).sum(),
                        velocity: 0.0,
                        members,
                        anchor_position: position,
                        anchor_time: earliest,
                    });
                }
                i = j + 1;
            }
            // untouched particles keep their velocity up to rounding in the
            // prefix sums; re-anchor any that moved so positions stay continuous
            let before: Vec<f64> = next.iter().map(|p| p.velocity).collect();
            assign_velocities(&mut next);
            for (p, v) in next.iter_mut().zip(before) {
                if p.anchor_time != earliest && p.velocity != v {
                    p.anchor_position = p.position_at_with(v, earliest);
                    p.anchor_time = earliest;
                }
            }
            particles = next;
            now = earliest;
            let mut snap = ParticleState {
                time: now,
                particles: particles.clone(),
            };
            for p in &mut snap.particles {
                p.position = p.position_at(now);
            }
            snapshots.push(snap);
        }
        Ok(Self { snapshots, merges })
    }

    /// State at time `t`.
    pub fn state_at(&self, t: f64) -> Result<ParticleState> {
        if !(t >= 0.0) {
            return Err(Error::InvalidTime(format!("non-negative, got {t}")));
        }
        let idx = self.snapshots.partition_point(|s| s.time <= t);
        Ok(self.snapshots[idx.max(1) - 1].at(t))
    }

    pub fn merge_times(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.time).collect()
    }
}

/// Attractive Wasserstein gradient flow of an atomic measure at time `t`.
pub fn attractive_particle_flow(mu0: &Measure1D, t: f64) -> Result<ParticleState> {
    ParticleTrajectory::simulate(mu0, t)?.state_at(t)
}
