use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign of the Newtonian potential `W(x) = σ|x|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Sigma {
    /// `σ = 1`, `W(x) = |x|`.
    Attractive,
    /// `σ = -1`, `W(x) = -|x|`.
    Repulsive,
}

impl Sigma {
    pub fn value(self) -> f64 {
        match self {
            Sigma::Attractive => 1.0,
            Sigma::Repulsive => -1.0,
        }
    }

    pub fn from_int(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sigma::Attractive),
            -1 => Ok(Sigma::Repulsive),
            other => Err(Error::InvalidSigma(other)),
        }
    }
}

impl TryFrom<i64> for Sigma {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        Sigma::from_int(v)
    }
}

impl From<Sigma> for i64 {
    fn from(s: Sigma) -> i64 {
        match s {
            Sigma::Attractive => 1,
            Sigma::Repulsive => -1,
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", i64::from(*self))
    }
}

/// Sign with `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}
