use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::Measure1D;
use crate::sigma::Sigma;

/// One input file for every command: the measure fields plus run settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(flatten)]
    pub measure: Measure1D,
    pub sigma: Sigma,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default, rename = "N")]
    pub n: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    pub fn new(measure: Measure1D, sigma: Sigma, times: Vec<f64>) -> Result<Self> {
        let sc = Self {
            measure,
            sigma,
            times,
            n: vec![],
            seed: 0,
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn with_grid(mut self, n: Vec<usize>) -> Result<Self> {
        self.n = n;
        self.validate()?;
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sc: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::InvalidScenario(
                "times must be finite and non-negative".into(),
            ));
        }
        if self.times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidScenario("times must be sorted".into()));
        }
        if self.n.contains(&0) {
            return Err(Error::InvalidScenario("N values must be positive".into()));
        }
        let mut n = self.n.clone();
        n.sort_unstable();
        n.dedup();
        if n.len() != self.n.len() {
            return Err(Error::InvalidScenario("N values must be distinct".into()));
        }
        Ok(())
    }
}
