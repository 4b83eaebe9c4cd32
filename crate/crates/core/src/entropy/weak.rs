//! Weak-form residual of an entropy solution against polynomial test
//! functions.
//!
//! The space integral is exact per piece. In time the integrand is analytic
//! between the instants where a profile breakpoint crosses a breakpoint of
//! the test function (or fronts collide); those instants split the time axis
//! and each sub-interval uses composite Gauss–Legendre.

use serde::{Deserialize, Serialize};

use super::solution::EntropySolution;
use crate::error::{Error, Result};

/// Polynomial in monomial basis, ascending coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn linear(c0: f64, c1: f64) -> Self {
        Poly(vec![c0, c1])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::default();
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    /// `Σ |c_i| |x|^i`, the scale of the rounding error in [`Poly::eval`].
    fn magnitude(&self, x: f64) -> f64 {
        self.0
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x.abs() + c.abs())
    }

    /// Coefficients of `y ↦ p(y + c)`.
    pub fn shift(&self, c: f64) -> Poly {
        let mut q = self.0.clone();
        let n = q.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                q[j] += c * q[j + 1];
            }
        }
        Poly(q)
    }

    /// `∫_a^b p(x) dx`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let anti = |x: f64| {
            self.0
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (i, &c)| acc * x + c / (i + 1) as f64)
                * x
        };
        anti(b) - anti(a)
    }
}

/// Compactly supported, continuous piecewise polynomial; zero outside
/// `[breaks[0], breaks[last]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePoly {
    breaks: Vec<f64>,
    pieces: Vec<Poly>,
}

impl PiecewisePoly {
    pub fn new(breaks: Vec<f64>, pieces: Vec<Poly>) -> Result<Self> {
        if breaks.len() < 2 || pieces.len() + 1 != breaks.len() {
            return Err(Error::InvalidTestFunction(
                "need n + 1 breakpoints for n pieces".into(),
            ));
        }
        if breaks.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidTestFunction("support must be compact".into()));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTestFunction(
                "breakpoints must increase".into(),
            ));
        }
        let scale = pieces
            .iter()
            .zip(breaks.windows(2))
            .flat_map(|(p, w)| [p.eval(w[0]).abs(), p.eval(w[1]).abs()])
            .fold(1.0f64, f64::max);
        let tol = 1e-12 * scale;
        for i in 1..pieces.len() {
            let x = breaks[i];
            if (pieces[i - 1].eval(x) - pieces[i].eval(x)).abs() > tol {
                return Err(Error::InvalidTestFunction(format!("discontinuous at {x}")));
            }
        }
        Ok(Self { breaks, pieces })
    }

    /// Hat function with peak `height` at `peak`.
    pub fn tent(left: f64, peak: f64, right: f64, height: f64) -> Result<Self> {
        let up = height / (peak - left);
        let down = height / (right - peak);
        Self::new(
            vec![left, peak, right],
            vec![
                Poly::linear(-up * left, up),
                Poly::linear(down * right, -down),
            ],
        )
    }

    /// `scale (x - a)² (b - x)²` on `[a, b]`.
    pub fn bump(a: f64, b: f64, scale: f64) -> Result<Self> {
        let left = Poly(vec![a * a, -2.0 * a, 1.0]);
        let right = Poly(vec![b * b, -2.0 * b, 1.0]);
        Self::new(
            vec![a, b],
            vec![left.mul(&right).mul(&Poly::constant(scale))],
        )
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breaks[0], self.breaks[self.breaks.len() - 1])
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        let i = self
            .breaks
            .partition_point(|&b| b <= x)
            .clamp(1, self.pieces.len());
        self.pieces[i - 1].eval(x)
    }

    pub fn derivative_at(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x >= hi {
            return 0.0;
        }
        let i = self
            .breaks
            .partition_point(|&b| b <= x)
            .clamp(1, self.pieces.len());
        self.pieces[i - 1].derivative().eval(x)
    }

    /// Pieces as `(a, b, poly)`.
    fn segments(&self) -> impl Iterator<Item = (f64, f64, &Poly)> {
        self.breaks
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, p)| (w[0], w[1], p))
    }
}

/// Product test function `φ(x, t) = a(x) b(t)`.
///
/// `a` must vanish at both ends of its support; `b` must vanish at the right
/// end of its support, while `b(0)` may be non-zero so that the initial datum
/// enters the weak form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    space: PiecewisePoly,
    time: PiecewisePoly,
}

impl TestFunction {
    pub fn new(space: PiecewisePoly, time: PiecewisePoly) -> Result<Self> {
        let (a, b) = space.support();
        let tol = 1e-12;
        let vanishes = |p: &Poly, x: f64| p.eval(x).abs() <= tol * p.magnitude(x).max(1.0);
        if !vanishes(&space.pieces[0], a) || !vanishes(&space.pieces[space.pieces.len() - 1], b) {
            return Err(Error::InvalidTestFunction(
                "spatial factor must vanish on the boundary of its support".into(),
            ));
        }
        let (_, t_hi) = time.support();
        if t_hi <= 0.0 {
            return Err(Error::InvalidTestFunction(
                "time support must reach t > 0".into(),
            ));
        }
        if !vanishes(&time.pieces[time.pieces.len() - 1], t_hi) {
            return Err(Error::InvalidTestFunction(
                "time factor must vanish at the end of its support".into(),
            ));
        }
        Ok(Self { space, time })
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.space.eval(x) * self.time.eval(t)
    }

    pub fn space(&self) -> &PiecewisePoly {
        &self.space
    }

    pub fn time(&self) -> &PiecewisePoly {
        &self.time
    }
}

/// Residual `∫F₀φ(·,0)dx + ∬[F φ_t + g(F) φ_x] dx dt` of the weak form.
pub fn weak_residual(sol: &EntropySolution, phi: &TestFunction) -> Result<f64> {
    let (t_lo, t_hi) = phi.time.support();
    let start = t_lo.max(0.0);
    let sigma = sol.sigma().value();

    let initial = {
        let b0 = phi.time.eval(0.0);
        if t_lo <= 0.0 && b0 != 0.0 {
            b0 * space_integral(sol.initial(), &phi.space, Poly::constant)
        } else {
            0.0
        }
    };

    // x-integral at time t
    let slice = |t: f64| -> Result<f64> {
        let profile = sol.profile(t)?;
        let with_b = phi.time.eval(t);
        let with_db = phi.time.derivative_at(t);
        let mut acc = 0.0;
        if with_db != 0.0 {
            acc += with_db * space_integral(&profile, &phi.space, Poly::constant);
        }
        if with_b != 0.0 {
            let da = PiecewisePoly {
                breaks: phi.space.breaks.clone(),
                pieces: phi.space.pieces.iter().map(Poly::derivative).collect(),
            };
            acc += with_b * flux_integral(&profile, &da, sigma);
        }
        Ok(acc)
    };

    let mut cuts = vec![start, t_hi];
    cuts.extend(phi.time.breaks().iter().copied());
    for (t0, t1, x0, speed) in sol.breakpoint_paths(t_hi)? {
        if speed == 0.0 {
            continue;
        }
        for &xi in phi.space.breaks() {
            let tc = t0 + (xi - x0) / speed;
            if tc > t0 && tc < t1 {
                cuts.push(tc);
            }
        }
        cuts.push(t0);
        cuts.push(t1);
    }
    cuts.retain(|&t| t >= start && t <= t_hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let (nodes, weights) = gauss_legendre(16);
    let mut body = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        const PARTS: usize = 4;
        let h = (b - a) / PARTS as f64;
        for k in 0..PARTS {
            let (lo, hi) = (a + h * k as f64, a + h * (k + 1) as f64);
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (x, wgt) in nodes.iter().zip(&weights) {
                body += wgt * half * slice(mid + half * x)?;
            }
        }
    }
    Ok(initial + body)
}

/// `∫ h(F(x)) a(x) dx`, where `h` maps a constant value of `F` on a piece
/// to a polynomial.
fn space_integral(
    profile: &crate::measure::PiecewiseLinear,
    a: &PiecewisePoly,
    h: impl Fn(f64) -> Poly,
) -> f64 {
    integrate_against(profile, a, |f0, slope| match slope {
        None => h(f0),
        Some(slope) => Poly::linear(f0, slope),
    })
}

/// `∫ g(F(x)) a'(x) dx` with `g(F) = σF(1-F)`.
fn flux_integral(profile: &crate::measure::PiecewiseLinear, da: &PiecewisePoly, sigma: f64) -> f64 {
    integrate_against(profile, da, |f0, slope| {
        let f = match slope {
            None => Poly::constant(f0),
            Some(slope) => Poly::linear(f0, slope),
        };
        let one_minus = Poly(
            f.0.iter()
                .enumerate()
                .map(|(i, c)| if i == 0 { 1.0 - c } else { -c })
                .collect(),
        );
        f.mul(&one_minus).mul(&Poly::constant(sigma))
    })
}

/// Splits the support of `weight` at profile knots and integrates
/// `integrand(F) * weight` exactly. Each piece `[u, v]` is integrated in the
/// local variable `y = x - u`: the callback receives `F(u)` and the slope
/// (`None` on a constant piece) and returns a polynomial in `y`. Narrow fans
/// have slopes near `1/2t`, and expanding them around `x = 0` instead would
/// cancel catastrophically.
fn integrate_against(
    profile: &crate::measure::PiecewiseLinear,
    weight: &PiecewisePoly,
    integrand: impl Fn(f64, Option<f64>) -> Poly,
) -> f64 {
    let mut total = 0.0;
    for (a, b, p) in weight.segments() {
        let mut cuts: Vec<f64> = vec![a, b];
        cuts.extend(
            profile
                .breakpoints()
                .into_iter()
                .filter(|&x| x > a && x < b),
        );
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            let (u, v) = (w[0], w[1]);
            let (fu, fv) = (profile.eval(u), profile.left_limit(v));
            let poly = if fu == fv {
                integrand(fu, None)
            } else {
                integrand(fu, Some((fv - fu) / (v - u)))
            };
            total += poly.mul(&p.shift(u)).integral(0.0, v - u);
        }
    }
    total
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::riemann;
    use crate::measure::Measure1D;
    use crate::sigma::Sigma;

    #[test]
    fn poly_arithmetic() {
        let p = Poly(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(2.0), 17.0);
        assert_eq!(p.derivative(), Poly(vec![2.0, 6.0]));
        assert!((p.integral(0.0, 1.0) - 3.0).abs() < 1e-15);
        assert_eq!(
            Poly::linear(1.0, 1.0).mul(&Poly::linear(-1.0, 1.0)),
            Poly(vec![-1.0, 0.0, 1.0])
        );
        // 1 + 2(y+2) + 3(y+2)² = 17 + 14y + 3y²
        assert_eq!(p.shift(2.0), Poly(vec![17.0, 14.0, 3.0]));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_unbounded_support() {
        assert!(PiecewisePoly::new(vec![0.0, f64::INFINITY], vec![Poly::constant(0.0)]).is_err());
        let not_vanishing = PiecewisePoly::new(vec![0.0, 1.0], vec![Poly::constant(1.0)]).unwrap();
        let time = PiecewisePoly::bump(-1.0, 1.0, 1.0).unwrap();
        assert!(TestFunction::new(not_vanishing, time).is_err());
    }

    fn dirac_solution() -> EntropySolution {
        EntropySolution::from_measure(&Measure1D::dirac(0.0).unwrap(), Sigma::Repulsive).unwrap()
    }

    #[test]
    fn rarefaction_is_weak_solution() {
        let sol = dirac_solution();
        let phi = TestFunction::new(
            PiecewisePoly::tent(-1.5, 0.2, 1.0, 1.0).unwrap(),
            PiecewisePoly::new(
                vec![-1.0, 2.0],
                vec![Poly(vec![4.0, -4.0, 1.0])], // (2 - t)²
            )
            .unwrap(),
        )
        .unwrap();
        let r = weak_residual(&sol, &phi).unwrap();
        assert!(r.abs() < 1e-8, "residual {r}");
    }

    #[test]
    fn stationary_shock_is_weak_solution() {
        let shock = riemann(Sigma::Attractive, 0.0, 1.0, 0.0).unwrap();
        let phi = TestFunction::new(
            PiecewisePoly::bump(-1.0, 1.0, 1.0).unwrap(),
            PiecewisePoly::bump(-1.0, 1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!(weak_residual(&shock, &phi).unwrap().abs() < 1e-12);
    }

    #[test]
    fn wrong_shock_speed_leaves_residual() {
        let sol = riemann(Sigma::Attractive, 0.0, 0.5, 0.0).unwrap();
        let phi = TestFunction::new(
            PiecewisePoly::bump(-2.0, 2.0, 1.0).unwrap(),
            PiecewisePoly::bump(-1.0, 1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!(weak_residual(&sol, &phi).unwrap().abs() < 1e-12);

        let mut fs = sol.fronts().unwrap().clone();
        fs.fronts[0].speed = 0.0;
        let wrong = EntropySolution::from_fronts_unchecked(sol.initial().clone(), fs);
        assert!(weak_residual(&wrong, &phi).unwrap().abs() > 1e-3);
    }

    #[test]
    fn constant_region_gives_zero() {
        let sol = dirac_solution();
        let phi = TestFunction::new(
            PiecewisePoly::bump(5.0, 7.0, 3.0).unwrap(),
            PiecewisePoly::bump(-1.0, 1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!(weak_residual(&sol, &phi).unwrap().abs() < 1e-14);
    }
}
