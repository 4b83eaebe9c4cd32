use serde::{Deserialize, Serialize};

use super::piecewise::{FunctionKind, PiecewiseLinear};
use crate::error::{Error, Result};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: f64,
    pub mass: f64,
}

/// Uniform density `mass / (right - left)` on `[left, right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub left: f64,
    pub right: f64,
    pub mass: f64,
}

impl Segment {
    pub fn density(&self) -> f64 {
        self.mass / (self.right - self.left)
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }
}

/// One piece of a measure in left-to-right order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    Atom(Atom),
    Segment(Segment),
}

impl Element {
    pub fn mass(&self) -> f64 {
        match self {
            Element::Atom(a) => a.mass,
            Element::Segment(s) => s.mass,
        }
    }

    pub fn start(&self) -> f64 {
        match self {
            Element::Atom(a) => a.position,
            Element::Segment(s) => s.left,
        }
    }

    pub fn end(&self) -> f64 {
        match self {
            Element::Atom(a) => a.position,
            Element::Segment(s) => s.right,
        }
    }
}

/// A probability measure made of finitely many atoms and uniform segments.
///
/// Always canonical: atoms have distinct positions, segment interiors are
/// disjoint from each other and from atoms, adjacent segments of equal
/// density are merged and the total mass is renormalized to 1. Totals that
/// already equal 1 up to summation rounding are left alone, so rebuilding a
/// measure from its own parts is the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct Measure1D {
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
}

impl Measure1D {
    pub fn new(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self> {
        for a in &atoms {
            if !a.position.is_finite() || !a.mass.is_finite() || a.mass < 0.0 {
                return Err(Error::InvalidMeasure(format!("bad atom {a:?}")));
            }
        }
        for s in &segments {
            if !(s.left.is_finite() && s.right.is_finite() && s.mass.is_finite()) || s.mass < 0.0 {
                return Err(Error::InvalidMeasure(format!("bad segment {s:?}")));
            }
            if s.right <= s.left && s.mass > 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "segment [{}, {}] must have right > left",
                    s.left, s.right
                )));
            }
        }

        let atoms = merge_atoms(atoms);
        let segments = canonical_segments(segments, &atoms);

        let total: f64 = atoms.iter().map(|a| a.mass).sum::<f64>()
            + segments.iter().map(|s| s.mass).sum::<f64>();
        if !((total - 1.0).abs() <= tolerance::MASS_REJECT) {
            return Err(Error::MassNotNormalized(total));
        }
        let mut m = Self { atoms, segments };
        let rounding = (m.atoms.len() + m.segments.len()) as f64 * f64::EPSILON;
        if (total - 1.0).abs() > rounding {
            let scale = 1.0 / total;
            m.atoms.iter_mut().for_each(|a| a.mass *= scale);
            m.segments.iter_mut().for_each(|s| s.mass *= scale);
        }
        Ok(m)
    }

    pub fn dirac(position: f64) -> Result<Self> {
        Self::new(
            vec![Atom {
                position,
                mass: 1.0,
            }],
            vec![],
        )
    }

    pub fn uniform(left: f64, right: f64) -> Result<Self> {
        Self::new(
            vec![],
            vec![Segment {
                left,
                right,
                mass: 1.0,
            }],
        )
    }

    /// Purely atomic measure from `(position, mass)` pairs.
    pub fn atomic(points: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            points
                .iter()
                .map(|&(position, mass)| Atom { position, mass })
                .collect(),
            vec![],
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn has_atoms(&self) -> bool {
        !self.atoms.is_empty()
    }

    pub fn is_atomic(&self) -> bool {
        self.segments.is_empty()
    }

    /// Pieces ordered by position; an atom sitting on a segment endpoint
    /// comes after the segment ending there and before the one starting there.
    pub fn elements(&self) -> Vec<Element> {
        let mut out = Vec::with_capacity(self.atoms.len() + self.segments.len());
        let (mut i, mut j) = (0, 0);
        while i < self.atoms.len() || j < self.segments.len() {
            let take_atom = match (self.atoms.get(i), self.segments.get(j)) {
                (Some(a), Some(s)) => a.position <= s.left,
                (Some(_), None) => true,
                _ => false,
            };
            if take_atom {
                out.push(Element::Atom(self.atoms[i]));
                i += 1;
            } else {
                out.push(Element::Segment(self.segments[j]));
                j += 1;
            }
        }
        out
    }

    /// Elements paired with the cumulative mass before each of them.
    pub fn elements_with_mass_below(&self) -> Vec<(Element, f64)> {
        let mut acc = 0.0;
        self.elements()
            .into_iter()
            .map(|e| {
                let below = acc;
                acc += e.mass();
                (e, below)
            })
            .collect()
    }

    pub fn support(&self) -> (f64, f64) {
        let el = self.elements();
        (el[0].start(), el[el.len() - 1].end())
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass * a.position).sum::<f64>()
            + self
                .segments
                .iter()
                .map(|s| s.mass * 0.5 * (s.left + s.right))
                .sum::<f64>()
    }

    /// Right-continuous distribution function.
    pub fn cdf(&self) -> PiecewiseLinear {
        let mut knots = Vec::new();
        let mut acc = 0.0;
        for e in self.elements() {
            let next = (acc + e.mass()).min(1.0);
            knots.push((e.start(), acc));
            knots.push((e.end(), next));
            acc = next;
        }
        finish_at_one(&mut knots);
        PiecewiseLinear::new(FunctionKind::Cdf, knots).expect("canonical measure has a valid cdf")
    }

    /// Right-continuous pseudo-inverse `X(s) = inf{x : F(x) > s}`.
    pub fn quantile(&self) -> PiecewiseLinear {
        let mut knots = Vec::new();
        let mut acc = 0.0;
        for e in self.elements() {
            let next = (acc + e.mass()).min(1.0);
            knots.push((acc, e.start()));
            knots.push((next, e.end()));
            acc = next;
        }
        let n = knots.len();
        knots[n - 1].0 = 1.0;
        PiecewiseLinear::new(FunctionKind::Quantile, knots)
            .expect("canonical measure has a valid quantile")
    }

    /// Inverse of [`Measure1D::cdf`] and [`Measure1D::quantile`].
    pub fn from_function(f: &PiecewiseLinear) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut segments = Vec::new();
        match f.kind() {
            FunctionKind::Cdf => {
                let (lo, hi) = (f.first().v, f.last().v);
                if lo.abs() > tolerance::CDF_LIMIT || (hi - 1.0).abs() > tolerance::CDF_LIMIT {
                    return Err(Error::CdfLimits {
                        left: lo,
                        right: hi,
                    });
                }
                for w in f.knots().windows(2) {
                    let mass = w[1].v - w[0].v;
                    if mass <= 0.0 {
                        continue;
                    }
                    if w[0].x == w[1].x {
                        atoms.push(Atom {
                            position: w[0].x,
                            mass,
                        });
                    } else {
                        segments.push(Segment {
                            left: w[0].x,
                            right: w[1].x,
                            mass,
                        });
                    }
                }
            }
            FunctionKind::Quantile => {
                for w in f.knots().windows(2) {
                    let mass = w[1].x - w[0].x;
                    if mass <= 0.0 {
                        continue;
                    }
                    if w[0].v == w[1].v {
                        atoms.push(Atom {
                            position: w[0].v,
                            mass,
                        });
                    } else {
                        segments.push(Segment {
                            left: w[0].v,
                            right: w[1].v,
                            mass,
                        });
                    }
                }
            }
            FunctionKind::Velocity => {
                return Err(Error::InvalidFunction(
                    "a velocity field does not describe a measure".into(),
                ))
            }
        }
        Self::new(atoms, segments)
    }

    /// `∫ ξ dμ` for a function given with its antiderivative.
    pub fn integrate(&self, f: impl Fn(f64) -> f64, antiderivative: impl Fn(f64) -> f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.mass * f(a.position))
            .sum::<f64>()
            + self
                .segments
                .iter()
                .map(|s| s.density() * (antiderivative(s.right) - antiderivative(s.left)))
                .sum::<f64>()
    }

    /// Piece-by-piece comparison.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol;
        self.atoms.len() == other.atoms.len()
            && self.segments.len() == other.segments.len()
            && self
                .atoms
                .iter()
                .zip(&other.atoms)
                .all(|(a, b)| close(a.position, b.position) && close(a.mass, b.mass))
            && self.segments.iter().zip(&other.segments).all(|(a, b)| {
                close(a.left, b.left) && close(a.right, b.right) && close(a.mass, b.mass)
            })
    }
}

fn finish_at_one(knots: &mut [(f64, f64)]) {
    if let Some(last) = knots.last_mut() {
        last.1 = 1.0;
    }
}

fn merge_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.retain(|a| a.mass > 0.0);
    atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if last.position == a.position => last.mass += a.mass,
            _ => out.push(a),
        }
    }
    out
}

/// Splits overlapping segments into elementary pieces, sums their densities,
/// cuts at atoms, then merges neighbours of equal density.
fn canonical_segments(mut segments: Vec<Segment>, atoms: &[Atom]) -> Vec<Segment> {
    segments.retain(|s| s.mass > 0.0);
    if segments.is_empty() {
        return segments;
    }
    let mut cuts: Vec<f64> = segments.iter().flat_map(|s| [s.left, s.right]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let (lo, hi) = (cuts[0], cuts[cuts.len() - 1]);
    cuts.extend(
        atoms
            .iter()
            .map(|a| a.position)
            .filter(|&p| p > lo && p < hi),
    );
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let disjoint = segments.len() == 1 || {
        let mut sorted = segments.clone();
        sorted.sort_by(|a, b| a.left.total_cmp(&b.left));
        sorted.windows(2).all(|w| w[0].right <= w[1].left)
    };

    let mut pieces: Vec<Segment> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let covering: Vec<&Segment> = segments
            .iter()
            .filter(|s| s.left <= a && s.right >= b)
            .collect();
        if covering.is_empty() {
            continue;
        }
        let mass = if disjoint && covering[0].left == a && covering[0].right == b {
            // untouched input segment keeps its exact mass
            covering[0].mass
        } else {
            covering.iter().map(|s| s.density()).sum::<f64>() * (b - a)
        };
        if mass > 0.0 {
            pieces.push(Segment {
                left: a,
                right: b,
                mass,
            });
        }
    }

    let mut out: Vec<Segment> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let Some(last) = out.last_mut() {
            let contiguous = last.right == p.left;
            let atom_between = atoms.iter().any(|a| a.position == p.left);
            let (d0, d1) = (last.density(), p.density());
            let same = (d0 - d1).abs() <= tolerance::DENSITY_MERGE * d0.max(d1);
            if contiguous && !atom_between && same {
                last.right = p.right;
                last.mass += p.mass;
                continue;
            }
        }
        out.push(p);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    #[serde(default)]
    atoms: Vec<[f64; 2]>,
    #[serde(default)]
    segments: Vec<[f64; 3]>,
}

impl TryFrom<RawMeasure> for Measure1D {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        Measure1D::new(
            raw.atoms
                .iter()
                .map(|&[position, mass]| Atom { position, mass })
                .collect(),
            raw.segments
                .iter()
                .map(|&[left, right, mass]| Segment { left, right, mass })
                .collect(),
        )
    }
}

impl From<Measure1D> for RawMeasure {
    fn from(m: Measure1D) -> Self {
        RawMeasure {
            atoms: m.atoms.iter().map(|a| [a.position, a.mass]).collect(),
            segments: m
                .segments
                .iter()
                .map(|s| [s.left, s.right, s.mass])
                .collect(),
        }
    }
}
