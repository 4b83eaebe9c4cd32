mod common;

use common::{arb_atomic, arb_measure, arb_time, dyadic};
use newtonflow::entropy::{
    riemann, weak_residual, wft_init, EntropySolution, Flux, PiecewisePoly, Poly, TestFunction,
};
use newtonflow::flow::ParticleTrajectory;
use newtonflow::harness::{
    empirical, particle_positions_init, repulsive_particle_positions, MeasureClass,
};
use newtonflow::measure::l1_distance;
use newtonflow::{Measure1D, Sigma};
use proptest::prelude::*;

fn test_function(a: f64, b: f64, end: f64) -> TestFunction {
    let space = PiecewisePoly::bump(a, b, 1.0).unwrap();
    let time =
        PiecewisePoly::new(vec![0.0, end], vec![Poly(vec![end * end, -2.0 * end, 1.0])]).unwrap();
    TestFunction::new(space, time).unwrap()
}

proptest! {
    #[test]
    fn repulsive_l1_contraction(mu in arb_measure(), nu in arb_measure(), t in arb_time()) {
        let a = EntropySolution::from_measure(&mu, Sigma::Repulsive).unwrap();
        let b = EntropySolution::from_measure(&nu, Sigma::Repulsive).unwrap();
        let before = l1_distance(&mu.cdf(), &nu.cdf());
        let after = l1_distance(&a.profile(t).unwrap(), &b.profile(t).unwrap());
        prop_assert!(after <= before + 1e-10, "{after} > {before}");
    }

    #[test]
    fn attractive_l1_contraction(mu in arb_atomic(), nu in arb_atomic(), t in arb_time()) {
        let a = EntropySolution::from_measure(&mu, Sigma::Attractive).unwrap();
        let b = EntropySolution::from_measure(&nu, Sigma::Attractive).unwrap();
        let before = l1_distance(&mu.cdf(), &nu.cdf());
        let after = l1_distance(&a.profile(t).unwrap(), &b.profile(t).unwrap());
        prop_assert!(after <= before + 1e-10, "{after} > {before}");
    }

    /// Under the discretized flux `g_N` the unit fronts of an `N`-particle
    /// empirical cdf are exactly the repulsive particles.
    #[test]
    fn discretized_fronts_are_particles(mu in arb_measure(), n in 1usize..40, t in arb_time()) {
        let init = particle_positions_init(&mu, n).unwrap();
        let fs = wft_init(&empirical(&init).unwrap().cdf(), Flux::discretized(Sigma::Repulsive, n).unwrap())
            .unwrap();
        let fronts = fs.advance(t).unwrap().positions();
        prop_assert_eq!(fronts, repulsive_particle_positions(&init, n, t).unwrap());
    }

    /// Shock collisions of the attractive entropy solution happen where and
    /// when the sticky particles merge.
    #[test]
    fn collisions_are_merges(mu in arb_atomic()) {
        let sol = EntropySolution::from_measure(&mu, Sigma::Attractive).unwrap();
        let collisions = sol.collisions(50.0).unwrap();
        let merges = ParticleTrajectory::simulate(&mu, 50.0).unwrap().merges;
        prop_assert_eq!(collisions.len(), merges.len());
        for (c, m) in collisions.iter().zip(&merges) {
            prop_assert!((c.time - m.time).abs() <= 1e-13 * m.time.max(1.0), "{c:?} vs {m:?}");
            prop_assert!((c.position - m.position).abs() <= 1e-12, "{c:?} vs {m:?}");
        }
    }

    #[test]
    fn weak_residual_vanishes(
        mu in prop_oneof![dyadic(MeasureClass::Atomic), dyadic(MeasureClass::Mixed)],
        a in -8.0..0.0f64,
        width in 0.5..10.0f64,
        end in 0.5..4.0f64,
    ) {
        let phi = test_function(a, a + width, end);
        let rep = EntropySolution::from_measure(&mu, Sigma::Repulsive).unwrap();
        let r = weak_residual(&rep, &phi).unwrap();
        prop_assert!(r.abs() < 1e-9, "{r}");
        if mu.is_atomic() {
            let att = EntropySolution::from_measure(&mu, Sigma::Attractive).unwrap();
            prop_assert!(weak_residual(&att, &phi).unwrap().abs() < 1e-9);
        }
    }
}

#[test]
fn repulsive_riemann_fan() {
    // F(x, 1) = (x + 1) / 2 on [-1, 1]
    let sol = riemann(Sigma::Repulsive, 0.0, 1.0, 0.0).unwrap();
    let f = sol.profile(1.0).unwrap();
    for x in [-1.5, -1.0, -0.3, 0.0, 0.7, 1.0, 2.0] {
        assert_eq!(f.eval(x), ((x + 1.0) / 2.0).clamp(0.0, 1.0));
    }
}

#[test]
fn attractive_riemann_shock() {
    // states 1/4 and 3/4: speed 1 - 1/4 - 3/4 = 0
    let sol = riemann(Sigma::Attractive, 0.25, 0.75, 2.0).unwrap();
    let f = sol.profile(3.0).unwrap();
    assert_eq!(f.eval(1.999), 0.25);
    assert_eq!(f.eval(2.0), 0.75);
    // states 0 and 1/2: speed 1/2
    let sol = riemann(Sigma::Attractive, 0.0, 0.5, 0.0).unwrap();
    let f = sol.profile(2.0).unwrap();
    assert_eq!(f.eval(0.999), 0.0);
    assert_eq!(f.eval(1.0), 0.5);
}

#[test]
fn dirac_weak_form() {
    let sol =
        EntropySolution::from_measure(&Measure1D::dirac(0.0).unwrap(), Sigma::Repulsive).unwrap();
    for (a, b, end) in [(-2.0, 2.0, 1.0), (-0.5, 3.0, 2.5), (0.25, 0.75, 0.5)] {
        assert!(
            weak_residual(&sol, &test_function(a, b, end))
                .unwrap()
                .abs()
                < 1e-12
        );
    }
}
