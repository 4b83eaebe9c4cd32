use crate::error::{Error, Result};
use crate::measure::{Element, Measure1D, Segment};

/// Repulsive Wasserstein gradient flow at time `t`.
///
/// Works piece by piece on the measure: the mass between levels `M` and
/// `M + m` is spread so that its ends move with speeds `2M - 1` and
/// `2(M + m) - 1`. Atoms therefore open into segments of width `2tm`.
pub fn repulsive_flow(mu0: &Measure1D, t: f64) -> Result<Measure1D> {
    if !(t >= 0.0) {
        return Err(Error::InvalidTime(format!("non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(mu0.clone());
    }
    let mut segments = Vec::new();
    for (e, below) in mu0.elements_with_mass_below() {
        let lo = t * (2.0 * below - 1.0);
        let hi = t * (2.0 * (below + e.mass()) - 1.0);
        let (left, right, mass) = match e {
            Element::Atom(a) => (a.position + lo, a.position + hi, a.mass),
            Element::Segment(s) => (s.left + lo, s.right + hi, s.mass),
        };
        segments.push(Segment { left, right, mass });
    }
    Measure1D::new(vec![], segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{measure_of, wasserstein2, FunctionKind};

    #[test]
    fn dirac_spreads_uniformly() {
        for t in [0.1, 1.0, 10.0] {
            let mu = repulsive_flow(&Measure1D::dirac(0.0).unwrap(), t).unwrap();
            assert!(mu.approx_eq(&Measure1D::uniform(-t, t).unwrap(), 0.0));
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let mu = Measure1D::atomic(&[(0.0, 0.25), (2.0, 0.75)]).unwrap();
        assert_eq!(repulsive_flow(&mu, 0.0).unwrap(), mu);
    }

    #[test]
    fn two_atoms_quarter_time() {
        let mu = Measure1D::atomic(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let t = 0.25;
        let out = repulsive_flow(&mu, t).unwrap();
        // oracle: quantile arithmetic X0 + t(2s - 1), then back to a measure
        let x = mu
            .quantile()
            .map_values(FunctionKind::Quantile, |s, v| v + t * (2.0 * s - 1.0))
            .unwrap();
        let oracle = measure_of(&x).unwrap();
        assert!(out.approx_eq(&oracle, 1e-15), "{out:?}");
        // each atom opens to width 2tm = 1/4 on its outer side
        let expected = Measure1D::new(
            vec![],
            vec![
                Segment {
                    left: -1.25,
                    right: -1.0,
                    mass: 0.5,
                },
                Segment {
                    left: 1.0,
                    right: 1.25,
                    mass: 0.5,
                },
            ],
        )
        .unwrap();
        assert!(out.approx_eq(&expected, 1e-15));
        assert!(out
            .segments()
            .iter()
            .all(|s| (s.density() - 2.0).abs() < 1e-15));
        assert!(wasserstein2(&out, &expected) < 1e-15);
    }

    #[test]
    fn output_has_no_atoms() {
        let mu = Measure1D::new(
            vec![crate::measure::Atom {
                position: 0.5,
                mass: 0.5,
            }],
            vec![Segment {
                left: 0.0,
                right: 1.0,
                mass: 0.5,
            }],
        )
        .unwrap();
        let out = repulsive_flow(&mu, 0.3).unwrap();
        assert!(!out.has_atoms());
        assert!((out.mean() - mu.mean()).abs() < 1e-15);
    }
}
