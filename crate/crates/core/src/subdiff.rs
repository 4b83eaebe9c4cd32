//! Fréchet and extended subdifferentials of the interaction energy.

use serde::{Deserialize, Serialize};

use crate::measure::{wasserstein1, Atom, Element, Measure1D, PiecewiseLinear, Segment};
use crate::sigma::Sigma;
use crate::tolerance;

/// `k(x) = σ (μ(-∞, x) - μ(x, ∞))`, the minimal Fréchet subdifferential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityField {
    sigma: Sigma,
    cdf: PiecewiseLinear,
}

impl VelocityField {
    pub fn sigma(&self) -> Sigma {
        self.sigma
    }

    /// `σ (F(x⁻) + F(x) - 1)`; at an atom this is the symmetric value that
    /// drops self-interaction.
    pub fn eval(&self, x: f64) -> f64 {
        self.sigma.value() * (self.cdf.left_limit(x) + self.cdf.eval(x) - 1.0)
    }

    /// Knots `(x, σ(2F(x) - 1))` of the right-continuous profile.
    pub fn profile(&self) -> Vec<(f64, f64)> {
        self.cdf
            .knots()
            .iter()
            .map(|k| (k.x, self.sigma.value() * (2.0 * k.v - 1.0)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FrechetMinimal {
    /// No Fréchet subdifferential; `atom` witnesses it.
    Empty {
        atom: Atom,
    },
    Field(VelocityField),
}

impl FrechetMinimal {
    pub fn is_empty(&self) -> bool {
        matches!(self, FrechetMinimal::Empty { .. })
    }
}

pub fn frechet_minimal(mu: &Measure1D, sigma: Sigma) -> FrechetMinimal {
    match (sigma, mu.atoms().first()) {
        (Sigma::Repulsive, Some(&atom)) => FrechetMinimal::Empty { atom },
        _ => FrechetMinimal::Field(VelocityField {
            sigma,
            cdf: mu.cdf(),
        }),
    }
}

/// `½ δ_x ⊗ χ[y_lo, y_hi]`-type piece: uniform density on a vertical segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalPiece {
    pub x: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub density: f64,
}

impl VerticalPiece {
    pub fn mass(&self) -> f64 {
        self.density * (self.y_hi - self.y_lo)
    }
}

/// Mass spread uniformly in `x` along the segment from `(x_lo, y_lo)` to
/// `(x_hi, y_hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPiece {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub mass: f64,
}

/// Plan on `ℝ × ℝ` made of vertical and graph pieces.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawPlan", into = "RawPlan")]
pub struct TransportPlan {
    pub vertical: Vec<VerticalPiece>,
    pub graph: Vec<GraphPiece>,
}

#[derive(Serialize, Deserialize)]
struct RawPlan {
    vertical: Vec<[f64; 4]>,
    graph: Vec<[f64; 5]>,
}

impl From<TransportPlan> for RawPlan {
    fn from(p: TransportPlan) -> Self {
        RawPlan {
            vertical: p
                .vertical
                .iter()
                .map(|v| [v.x, v.y_lo, v.y_hi, v.density])
                .collect(),
            graph: p
                .graph
                .iter()
                .map(|g| [g.x_lo, g.x_hi, g.y_lo, g.y_hi, g.mass])
                .collect(),
        }
    }
}

impl TryFrom<RawPlan> for TransportPlan {
    type Error = String;

    fn try_from(r: RawPlan) -> std::result::Result<Self, String> {
        let plan = TransportPlan {
            vertical: r
                .vertical
                .iter()
                .map(|v| VerticalPiece {
                    x: v[0],
                    y_lo: v[1],
                    y_hi: v[2],
                    density: v[3],
                })
                .collect(),
            graph: r
                .graph
                .iter()
                .map(|g| GraphPiece {
                    x_lo: g[0],
                    x_hi: g[1],
                    y_lo: g[2],
                    y_hi: g[3],
                    mass: g[4],
                })
                .collect(),
        };
        let bad_v = plan
            .vertical
            .iter()
            .any(|v| !(v.y_hi >= v.y_lo) || !(v.density >= 0.0));
        let bad_g = plan
            .graph
            .iter()
            .any(|g| !(g.x_hi > g.x_lo) || !(g.mass >= 0.0));
        if bad_v || bad_g {
            return Err("malformed plan piece".into());
        }
        Ok(plan)
    }
}

impl TransportPlan {
    /// First marginal, or `None` if it is not a probability measure.
    pub fn first_marginal(&self) -> Option<Measure1D> {
        let atoms = self
            .vertical
            .iter()
            .map(|v| Atom {
                position: v.x,
                mass: v.mass(),
            })
            .collect();
        let segments = self
            .graph
            .iter()
            .map(|g| Segment {
                left: g.x_lo,
                right: g.x_hi,
                mass: g.mass,
            })
            .collect();
        Measure1D::new(atoms, segments).ok()
    }

    pub fn total_mass(&self) -> f64 {
        self.vertical.iter().map(VerticalPiece::mass).sum::<f64>()
            + self.graph.iter().map(|g| g.mass).sum::<f64>()
    }
}

/// Minimal element of the extended subdifferential (repulsive case): each
/// atom carries its velocities uniformly over `[2α - 1, 2β - 1]` with density
/// ½, and the diffuse part follows the graph of `2F - 1`.
pub fn extended_minimal_plan(mu0: &Measure1D) -> TransportPlan {
    let mut plan = TransportPlan::default();
    for (e, below) in mu0.elements_with_mass_below() {
        let y_lo = 2.0 * below - 1.0;
        let y_hi = 2.0 * (below + e.mass()) - 1.0;
        match e {
            Element::Atom(a) => plan.vertical.push(VerticalPiece {
                x: a.position,
                y_lo,
                y_hi,
                density: 0.5,
            }),
            Element::Segment(s) => plan.graph.push(GraphPiece {
                x_lo: s.left,
                x_hi: s.right,
                y_lo,
                y_hi,
                mass: s.mass,
            }),
        }
    }
    plan
}

/// `∫ y² dγ`, exact per piece.
pub fn plan_norm(p: &TransportPlan) -> f64 {
    let vertical: f64 = p
        .vertical
        .iter()
        .map(|v| v.density * (v.y_hi.powi(3) - v.y_lo.powi(3)) / 3.0)
        .sum();
    let graph: f64 = p
        .graph
        .iter()
        .map(|g| g.mass * (g.y_lo * g.y_lo + g.y_lo * g.y_hi + g.y_hi * g.y_hi) / 3.0)
        .sum();
    vertical + graph
}

/// True when the first marginal of `p` is `mu` up to `1e-12` in `W₁`.
pub fn marginal_check(p: &TransportPlan, mu: &Measure1D) -> bool {
    if (p.total_mass() - 1.0).abs() > tolerance::MARGINAL {
        return false;
    }
    match p.first_marginal() {
        Some(m) => wasserstein1(&m, mu) <= tolerance::MARGINAL,
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repulsive_dirac_is_empty() {
        let mu = Measure1D::dirac(0.0).unwrap();
        match frechet_minimal(&mu, Sigma::Repulsive) {
            FrechetMinimal::Empty { atom } => assert_eq!(atom.position, 0.0),
            other => panic!("expected empty, got {other:?}"),
        }
        assert!(!frechet_minimal(&mu, Sigma::Attractive).is_empty());
    }

    #[test]
    fn repulsive_uniform_field() {
        let mu = Measure1D::uniform(-1.0, 1.0).unwrap();
        let FrechetMinimal::Field(k) = frechet_minimal(&mu, Sigma::Repulsive) else {
            panic!("uniform measure has a subdifferential")
        };
        for x in [-0.9, -0.3, 0.0, 0.5, 0.99] {
            // oracle: -∫ sign(x - y) dy / 2 over [-1, 1] = -((x + 1) - (1 - x)) / 2
            let direct = -(((x + 1.0) - (1.0 - x)) / 2.0);
            assert!((k.eval(x) - direct).abs() < 1e-15);
            assert!((k.eval(x) + x).abs() < 1e-15);
        }
    }

    #[test]
    fn attractive_atoms_drop_self_term() {
        let pts = [(-1.0, 0.5), (1.0, 0.5)];
        let mu = Measure1D::atomic(&pts).unwrap();
        let FrechetMinimal::Field(k) = frechet_minimal(&mu, Sigma::Attractive) else {
            panic!()
        };
        for &(x, _) in &pts {
            let brute: f64 = pts
                .iter()
                .map(|&(y, m)| m * crate::sigma::sign(x - y))
                .sum();
            assert_eq!(k.eval(x), brute);
        }
        assert_eq!(k.eval(-1.0), -0.5);
        assert_eq!(k.eval(1.0), 0.5);
    }

    #[test]
    fn dirac_plan() {
        let mu = Measure1D::dirac(3.0).unwrap();
        let plan = extended_minimal_plan(&mu);
        assert_eq!(
            plan.vertical,
            vec![VerticalPiece {
                x: 3.0,
                y_lo: -1.0,
                y_hi: 1.0,
                density: 0.5
            }]
        );
        assert!((plan_norm(&plan) - 1.0 / 3.0).abs() < 1e-15);
        assert!(marginal_check(&plan, &mu));
        assert!(!marginal_check(&plan, &Measure1D::dirac(4.0).unwrap()));
    }

    #[test]
    fn two_atom_plan_pieces() {
        let mu = Measure1D::atomic(&[(0.0, 0.25), (1.0, 0.75)]).unwrap();
        let plan = extended_minimal_plan(&mu);
        assert_eq!(plan.vertical[0].y_lo, -1.0);
        assert_eq!(plan.vertical[0].y_hi, -0.5);
        assert_eq!(plan.vertical[1].y_lo, -0.5);
        assert_eq!(plan.vertical[1].y_hi, 1.0);
        assert!((plan_norm(&plan) - 1.0 / 3.0).abs() < 1e-15);
        assert!(marginal_check(&plan, &mu));
    }

    #[test]
    fn continuous_plan_and_zero_graph() {
        let mu = Measure1D::uniform(0.0, 2.0).unwrap();
        let plan = extended_minimal_plan(&mu);
        assert!(plan.vertical.is_empty());
        assert!((plan_norm(&plan) - 1.0 / 3.0).abs() < 1e-15);
        let flat = TransportPlan {
            vertical: vec![],
            graph: vec![GraphPiece {
                x_lo: 0.0,
                x_hi: 1.0,
                y_lo: 0.0,
                y_hi: 0.0,
                mass: 1.0,
            }],
        };
        assert_eq!(plan_norm(&flat), 0.0);
    }

    #[test]
    fn mixed_round_trip_and_json_shape() {
        let mu = Measure1D::new(
            vec![Atom {
                position: 0.5,
                mass: 0.25,
            }],
            vec![Segment {
                left: 0.0,
                right: 1.0,
                mass: 0.75,
            }],
        )
        .unwrap();
        let plan = extended_minimal_plan(&mu);
        assert!(marginal_check(&plan, &mu));
        let json = serde_json::to_value(&plan).unwrap();
        assert_eq!(json["vertical"][0].as_array().unwrap().len(), 4);
        assert_eq!(json["graph"][0].as_array().unwrap().len(), 5);
        let back: TransportPlan = serde_json::from_value(json).unwrap();
        assert_eq!(back, plan);
    }

    #[test]
    fn invalid_marginal_is_rejected() {
        let plan = TransportPlan {
            vertical: vec![VerticalPiece {
                x: 0.0,
                y_lo: -1.0,
                y_hi: 0.0,
                density: 0.5,
            }],
            graph: vec![],
        };
        assert!(!marginal_check(&plan, &Measure1D::dirac(0.0).unwrap()));
    }
}
