use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigma::Sigma;

/// Flux `g(F) = σF(1-F)` or its polygonal interpolant `g_N` on the grid `j/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Flux {
    Exact(Sigma),
    Discretized { sigma: Sigma, levels: usize },
}

/// Speed of the `j`-th unit front (states `(j-1)/N → j/N`) under the
/// repulsive `g_N`, `(2j - 1 - N) / N` for `j = 1..=N`.
pub fn unit_front_speed(j: usize, levels: usize) -> f64 {
    (2 * j as i64 - 1 - levels as i64) as f64 / levels as f64
}

fn exact_g(sigma: Sigma, f: f64) -> f64 {
    sigma.value() * f * (1.0 - f)
}

impl Flux {
    pub fn exact(sigma: Sigma) -> Self {
        Flux::Exact(sigma)
    }

    pub fn discretized(sigma: Sigma, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Unsupported("flux grid needs N >= 1".into()));
        }
        Ok(Flux::Discretized { sigma, levels })
    }

    pub fn sigma(&self) -> Sigma {
        match *self {
            Flux::Exact(s) => s,
            Flux::Discretized { sigma, .. } => sigma,
        }
    }

    pub fn levels(&self) -> Option<usize> {
        match *self {
            Flux::Exact(_) => None,
            Flux::Discretized { levels, .. } => Some(levels),
        }
    }

    pub fn g(&self, f: f64) -> f64 {
        match *self {
            Flux::Exact(sigma) => exact_g(sigma, f),
            Flux::Discretized { sigma, levels } => {
                if let Some(j) = self.grid_index(f) {
                    return exact_g(sigma, j as f64 / levels as f64);
                }
                let n = levels as f64;
                let j = ((f * n).floor() as i64).clamp(0, levels as i64 - 1) as f64;
                let (a, b) = (j / n, (j + 1.0) / n);
                let (ga, gb) = (exact_g(sigma, a), exact_g(sigma, b));
                ga + (gb - ga) * (f - a) * n
            }
        }
    }

    /// Grid index of `f`, if it lies on `{j/N}` (within 1e-12).
    pub fn grid_index(&self, f: f64) -> Option<usize> {
        let levels = self.levels()?;
        let j = (f * levels as f64).round();
        if j < 0.0 || j > levels as f64 {
            return None;
        }
        ((f - j / levels as f64).abs() <= 1e-12).then_some(j as usize)
    }

    /// Rankine–Hugoniot speed of a jump from `left` to `right`.
    pub fn shock_speed(&self, left: f64, right: f64) -> f64 {
        match *self {
            // (g(L) - g(R)) / (L - R) simplifies to σ(1 - L - R)
            Flux::Exact(sigma) => sigma.value() * (1.0 - left - right),
            Flux::Discretized { sigma, levels } => {
                match (self.grid_index(left), self.grid_index(right)) {
                    (Some(i), Some(k)) if k == i + 1 => {
                        let lambda = unit_front_speed(k, levels);
                        match sigma {
                            Sigma::Repulsive => lambda,
                            Sigma::Attractive => -lambda,
                        }
                    }
                    _ => (self.g(left) - self.g(right)) / (left - right),
                }
            }
        }
    }
}
