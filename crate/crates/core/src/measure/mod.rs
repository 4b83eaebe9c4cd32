//! Probability measures on the line and their cdf / quantile representations.

mod measure1d;
mod piecewise;

pub use measure1d::{Atom, Element, Measure1D, Segment};
pub(crate) use piecewise::LinearPiece;
pub use piecewise::{FunctionKind, Knot, PiecewiseLinear};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigma::Sigma;
use crate::tolerance;

pub fn cdf_of(mu: &Measure1D) -> PiecewiseLinear {
    mu.cdf()
}

pub fn quantile_of(mu: &Measure1D) -> PiecewiseLinear {
    mu.quantile()
}

pub fn measure_of(f: &PiecewiseLinear) -> Result<Measure1D> {
    Measure1D::from_function(f)
}

/// `∫ d²` over a linear piece, exact.
fn square_integral(p: &LinearPiece) -> f64 {
    (p.x1 - p.x0) * (p.d0 * p.d0 + p.d0 * p.d1 + p.d1 * p.d1) / 3.0
}

/// `∫ |d|` over a linear piece, exact (splits at the sign change).
fn abs_integral(p: &LinearPiece) -> f64 {
    let h = p.x1 - p.x0;
    let (a, b) = (p.d0, p.d1);
    if a * b >= 0.0 {
        h * (a.abs() + b.abs()) / 2.0
    } else {
        h * (a * a + b * b) / (2.0 * (a.abs() + b.abs()))
    }
}

/// `‖f - g‖_{L²}` for two functions on `(0, 1)`.
pub fn l2_distance(f: &PiecewiseLinear, g: &PiecewiseLinear) -> f64 {
    f.difference_pieces(g)
        .iter()
        .map(square_integral)
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// `‖f - g‖_{L¹}` over the union of both knot ranges.
pub fn l1_distance(f: &PiecewiseLinear, g: &PiecewiseLinear) -> f64 {
    f.difference_pieces(g).iter().map(abs_integral).sum()
}

/// `∫ f g` over the union of both knot ranges, exact (Simpson per piece).
pub fn l2_inner(f: &PiecewiseLinear, g: &PiecewiseLinear) -> f64 {
    let mut xs: Vec<f64> = f.breakpoints().into_iter().chain(g.breakpoints()).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let m = 0.5 * (a + b);
            let p0 = f.eval(a) * g.eval(a);
            let pm = f.eval(m) * g.eval(m);
            let p1 = f.left_limit(b) * g.left_limit(b);
            (b - a) * (p0 + 4.0 * pm + p1) / 6.0
        })
        .sum()
}

/// Quadratic Wasserstein distance, `‖X_μ - X_ν‖_{L²(0,1)}`.
pub fn wasserstein2(mu: &Measure1D, nu: &Measure1D) -> f64 {
    l2_distance(&mu.quantile(), &nu.quantile())
}

/// 1-Wasserstein distance, `‖F_μ - F_ν‖_{L¹(ℝ)}`.
pub fn wasserstein1(mu: &Measure1D, nu: &Measure1D) -> f64 {
    l1_distance(&mu.cdf(), &nu.cdf())
}

/// `∫₀¹ (2s - 1) X(s) ds`, exact per piece.
pub fn linear_form(x: &PiecewiseLinear) -> f64 {
    x.knots()
        .windows(2)
        .filter(|w| w[1].x > w[0].x)
        .map(|w| {
            let (s0, s1) = (w[0].x, w[1].x);
            let q = (w[1].v - w[0].v) / (s1 - s0);
            let p = w[0].v - q * s0;
            2.0 * q * (s1.powi(3) - s0.powi(3)) / 3.0 + (2.0 * p - q) * (s1 * s1 - s0 * s0) / 2.0
                - p * (s1 - s0)
        })
        .sum()
}

/// Interaction energy `½ σ ∬ |x - y| dμ dμ`, evaluated through the
/// quantile as `σ ∫₀¹ (2s - 1) X(s) ds`.
///
/// In debug builds the value is checked against [`interaction_energy_pairwise`].
pub fn interaction_energy(mu: &Measure1D, sigma: Sigma) -> f64 {
    let value = sigma.value() * linear_form(&mu.quantile());
    debug_assert!(
        (value - interaction_energy_pairwise(mu, sigma)).abs() <= tolerance::ENERGY_AGREEMENT,
        "energy routes disagree"
    );
    value
}

/// Interaction energy as a double sum over pairs of pieces.
pub fn interaction_energy_pairwise(mu: &Measure1D, sigma: Sigma) -> f64 {
    let el = mu.elements();
    let mut total = 0.0;
    for a in &el {
        for b in &el {
            total += a.mass() * b.mass() * mean_abs_difference(a, b);
        }
    }
    0.5 * sigma.value() * total
}

/// `E|U - V|` for independent `U ~ a`, `V ~ b` (normalized pieces).
fn mean_abs_difference(a: &Element, b: &Element) -> f64 {
    match (a, b) {
        (Element::Atom(p), Element::Atom(q)) => (p.position - q.position).abs(),
        (Element::Atom(p), Element::Segment(s)) | (Element::Segment(s), Element::Atom(p)) => {
            let x = p.position;
            if x <= s.left {
                0.5 * (s.left + s.right) - x
            } else if x >= s.right {
                x - 0.5 * (s.left + s.right)
            } else {
                ((x - s.left).powi(2) + (s.right - x).powi(2)) / (2.0 * s.width())
            }
        }
        (Element::Segment(s), Element::Segment(t)) => {
            if s == t {
                s.width() / 3.0
            } else {
                // canonical segments never overlap
                (0.5 * (s.left + s.right) - 0.5 * (t.left + t.right)).abs()
            }
        }
    }
}

/// A maximal interval `(start, end)` of `(0, 1)` on which a quantile is
/// constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatInterval {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

impl FlatInterval {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// Ordered maximal constancy intervals of a quantile.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FlatDecomposition {
    pub intervals: Vec<FlatInterval>,
}

impl FlatDecomposition {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, s: f64) -> Option<&FlatInterval> {
        self.intervals.iter().find(|i| i.start < s && s < i.end)
    }
}

pub fn flat_decomposition(x: &PiecewiseLinear) -> Result<FlatDecomposition> {
    if x.kind() != FunctionKind::Quantile {
        return Err(Error::InvalidFunction(
            "flat decomposition needs a quantile".into(),
        ));
    }
    let mut intervals: Vec<FlatInterval> = Vec::new();
    for w in x.knots().windows(2) {
        if w[1].x > w[0].x && w[1].v == w[0].v {
            match intervals.last_mut() {
                Some(last) if last.end == w[0].x && last.value == w[0].v => last.end = w[1].x,
                _ => intervals.push(FlatInterval {
                    start: w[0].x,
                    end: w[1].x,
                    value: w[0].v,
                }),
            }
        }
    }
    Ok(FlatDecomposition { intervals })
}
