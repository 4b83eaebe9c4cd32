use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a [`PiecewiseLinear`] is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionKind {
    /// Cumulative distribution function on ℝ, values in `[0, 1]`.
    Cdf,
    /// Pseudo-inverse on `(0, 1)`, non-decreasing.
    Quantile,
    /// Arbitrary function on `(0, 1)`, e.g. a subdifferential element.
    Velocity,
}

impl FunctionKind {
    fn on_unit_interval(self) -> bool {
        matches!(self, FunctionKind::Quantile | FunctionKind::Velocity)
    }
}

/// A knot `(x, v)`. Two consecutive knots with the same abscissa encode a
/// jump from `v⁻` to `v⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub x: f64,
    pub v: f64,
}

/// Piecewise-linear function with explicit jumps.
///
/// Between knots with distinct abscissae the function is linear. A jump at
/// `x` is stored as the pair `(x, v⁻), (x, v⁺)`; evaluation is
/// right-continuous. Outside the knot range the function is extended by its
/// first and last values, which for a normalized cdf are 0 and 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    kind: FunctionKind,
    knots: Vec<Knot>,
}

/// A linear piece `[x0, x1]` of the difference of two functions, with the
/// right value at `x0` and the left limit at `x1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LinearPiece {
    pub x0: f64,
    pub x1: f64,
    pub d0: f64,
    pub d1: f64,
}

impl PiecewiseLinear {
    /// Validating constructor.
    ///
    /// Consecutive duplicate knots are removed, and runs of three or more
    /// knots at one abscissa collapse to their outer values. For functions on
    /// `(0, 1)` a jump sitting exactly on `s = 0` or `s = 1` is dropped since
    /// it carries no information on the open interval.
    pub fn new(kind: FunctionKind, knots: Vec<(f64, f64)>) -> Result<Self> {
        let mut raw: Vec<Knot> = knots.into_iter().map(|(x, v)| Knot { x, v }).collect();
        if raw.iter().any(|k| !k.x.is_finite() || !k.v.is_finite()) {
            return Err(Error::InvalidFunction("non-finite knot".into()));
        }
        if raw.is_empty() {
            return Err(Error::InvalidFunction("no knots".into()));
        }
        if raw.windows(2).any(|w| w[1].x < w[0].x) {
            return Err(Error::InvalidFunction(
                "abscissae must be non-decreasing".into(),
            ));
        }

        let mut collapsed: Vec<Knot> = Vec::with_capacity(raw.len());
        let mut i = 0;
        while i < raw.len() {
            let mut j = i;
            while j + 1 < raw.len() && raw[j + 1].x == raw[i].x {
                j += 1;
            }
            collapsed.push(raw[i]);
            if raw[j].v != raw[i].v {
                collapsed.push(raw[j]);
            }
            i = j + 1;
        }
        raw = collapsed;

        if kind.on_unit_interval() {
            if raw[0].x != 0.0 || raw[raw.len() - 1].x != 1.0 {
                return Err(Error::InvalidFunction(
                    "quantile domain must start at 0 and end at 1".into(),
                ));
            }
            if raw.len() >= 2 && raw[1].x == 0.0 {
                raw.remove(0);
            }
            let n = raw.len();
            if n >= 2 && raw[n - 2].x == 1.0 {
                raw.pop();
            }
            if raw.len() < 2 {
                return Err(Error::InvalidFunction(
                    "degenerate unit-interval function".into(),
                ));
            }
        }

        if kind != FunctionKind::Velocity && raw.windows(2).any(|w| w[1].v < w[0].v) {
            return Err(Error::NotMonotone);
        }
        if kind == FunctionKind::Cdf && raw.iter().any(|k| k.v < 0.0 || k.v > 1.0) {
            return Err(Error::InvalidFunction(
                "cdf values must lie in [0, 1]".into(),
            ));
        }
        Ok(Self { kind, knots: raw })
    }

    pub fn cdf(knots: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(FunctionKind::Cdf, knots)
    }

    pub fn quantile(knots: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(FunctionKind::Quantile, knots)
    }

    pub fn velocity(knots: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(FunctionKind::Velocity, knots)
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn first(&self) -> Knot {
        self.knots[0]
    }

    pub fn last(&self) -> Knot {
        self.knots[self.knots.len() - 1]
    }

    /// Right-continuous value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        // number of knots with abscissa <= x
        let i = k.partition_point(|p| p.x <= x);
        if i == 0 {
            return k[0].v;
        }
        if i == k.len() {
            return k[k.len() - 1].v;
        }
        let (a, b) = (k[i - 1], k[i]);
        if x == a.x {
            return a.v;
        }
        interpolate(a, b, x)
    }

    /// Left limit at `x`.
    pub fn left_limit(&self, x: f64) -> f64 {
        let k = &self.knots;
        // first knot with abscissa >= x
        let j = k.partition_point(|p| p.x < x);
        if j == 0 {
            return k[0].v;
        }
        if j == k.len() {
            return k[k.len() - 1].v;
        }
        let (a, b) = (k[j - 1], k[j]);
        if b.x == x {
            return b.v;
        }
        interpolate(a, b, x)
    }

    /// Distinct abscissae, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.knots.iter().map(|k| k.x).collect();
        out.dedup();
        out
    }

    /// Jumps as `(x, v⁻, v⁺)`.
    pub fn jumps(&self) -> Vec<(f64, f64, f64)> {
        self.knots
            .windows(2)
            .filter(|w| w[0].x == w[1].x)
            .map(|w| (w[0].x, w[0].v, w[1].v))
            .collect()
    }

    /// True when every piece between jumps is constant.
    pub fn is_piecewise_constant(&self) -> bool {
        self.knots
            .windows(2)
            .all(|w| w[0].x == w[1].x || w[0].v == w[1].v)
    }

    /// Maps every knot value through `f(x, v)`; the abscissae are kept.
    pub fn map_values(&self, kind: FunctionKind, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let knots = self.knots.iter().map(|k| (k.x, f(k.x, k.v))).collect();
        Self::new(kind, knots)
    }

    /// Linear pieces of `self - other` over the union of both breakpoint sets.
    ///
    /// For cdfs the range covers both supports; outside it the difference is
    /// constant (zero for normalized cdfs).
    pub(crate) fn difference_pieces(&self, other: &Self) -> Vec<LinearPiece> {
        let mut xs: Vec<f64> = self
            .knots
            .iter()
            .chain(other.knots.iter())
            .map(|k| k.x)
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.windows(2)
            .map(|w| LinearPiece {
                x0: w[0],
                x1: w[1],
                d0: self.eval(w[0]) - other.eval(w[0]),
                d1: self.left_limit(w[1]) - other.left_limit(w[1]),
            })
            .collect()
    }
}

fn interpolate(a: Knot, b: Knot, x: f64) -> f64 {
    let w = (x - a.x) / (b.x - a.x);
    a.v + (b.v - a.v) * w
}
