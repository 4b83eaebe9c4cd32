mod common;

use common::{arb_atomic, arb_measure, arb_time, dyadic, dyadic_any};
use newtonflow::entropy::Flux;
use newtonflow::flow::{
    energy_dissipation_trace, gradient_flow, is_non_increasing, repulsive_flow, ParticleTrajectory,
    QuantileFlow, RepulsiveTrajectory,
};
use newtonflow::harness::MeasureClass;
use newtonflow::{wasserstein1, wasserstein2, Atom, Measure1D, Sigma};
use proptest::prelude::*;

/// Particle and L² states at every merge time and halfway between merges.
fn particle_and_l2_states(mu: &Measure1D) -> Vec<(f64, Measure1D, Measure1D)> {
    let traj = ParticleTrajectory::simulate(mu, 50.0).unwrap();
    let l2 = QuantileFlow::new(mu.quantile(), Sigma::Attractive).unwrap();
    let mut times = traj.merge_times();
    let mids: Vec<f64> = times.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    times.extend(mids);
    times.push(0.0);
    times
        .into_iter()
        .map(|t| {
            let a = traj.state_at(t).unwrap().measure().unwrap();
            let b = Measure1D::from_function(&l2.at(t).unwrap()).unwrap();
            (t, a, b)
        })
        .collect()
}

proptest! {
    #[test]
    fn repulsive_preserves_mass_and_mean(mu in arb_measure(), t in arb_time()) {
        let mt = repulsive_flow(&mu, t).unwrap();
        let mass: f64 = mt.elements().iter().map(|e| e.mass()).sum();
        prop_assert!((mass - 1.0).abs() < 1e-12);
        prop_assert!((mt.mean() - mu.mean()).abs() < 1e-10);
    }

    #[test]
    fn attractive_preserves_mass_and_mean(mu in arb_atomic(), t in arb_time()) {
        let mt = gradient_flow(&mu, Sigma::Attractive, t).unwrap();
        let mass: f64 = mt.atoms().iter().map(|a| a.mass).sum();
        prop_assert!((mass - 1.0).abs() < 1e-12);
        prop_assert!(mt.segments().is_empty());
        prop_assert!((mt.mean() - mu.mean()).abs() < 1e-10);
    }

    #[test]
    fn repulsive_contracts(mu in dyadic_any(), nu in dyadic_any(), t in arb_time()) {
        let before = wasserstein2(&mu, &nu);
        let after = wasserstein2(&repulsive_flow(&mu, t).unwrap(), &repulsive_flow(&nu, t).unwrap());
        prop_assert!(after <= before + 1e-12, "{after} > {before}");
    }

    #[test]
    fn attractive_contracts(mu in arb_atomic(), nu in arb_atomic(), t in arb_time()) {
        let before = wasserstein2(&mu, &nu);
        let after = wasserstein2(
            &gradient_flow(&mu, Sigma::Attractive, t).unwrap(),
            &gradient_flow(&nu, Sigma::Attractive, t).unwrap(),
        );
        prop_assert!(after <= before + 1e-12, "{after} > {before}");
    }

    /// Sticky particles and the L² flow of the quantile agree at every merge
    /// and between merges. Both routes sum masses in their own order, which
    /// shifts quantile jumps by rounding in `s`; `W₁` is linear in that shift
    /// while `W₂` sees its square root, so arbitrary masses are compared in
    /// `W₁` and exactly representable (dyadic) ones in `W₂`.
    #[test]
    fn particles_match_l2_flow(mu in arb_atomic()) {
        for (t, a, b) in particle_and_l2_states(&mu) {
            prop_assert!(wasserstein1(&a, &b) < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn particles_match_l2_flow_dyadic(mu in dyadic(MeasureClass::Atomic)) {
        for (t, a, b) in particle_and_l2_states(&mu) {
            prop_assert!(wasserstein2(&a, &b) < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn merge_times_match_l2_events(mu in arb_atomic()) {
        let traj = ParticleTrajectory::simulate(&mu, 50.0).unwrap();
        let l2 = QuantileFlow::new(mu.quantile(), Sigma::Attractive).unwrap();
        let merges = traj.merge_times();
        let mut events = l2.event_times();
        events.retain(|&t| t > 0.0);
        prop_assert_eq!(merges.len(), events.len());
        for (a, b) in merges.iter().zip(&events) {
            prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn energy_decreases(mu in dyadic_any(), nu in dyadic(MeasureClass::Atomic)) {
        let rep = energy_dissipation_trace(&RepulsiveTrajectory(mu), Sigma::Repulsive, &[0.0, 0.5, 1.0, 2.0, 4.0]).unwrap();
        prop_assert!(is_non_increasing(&rep, 1e-12));
        let traj = ParticleTrajectory::simulate(&nu, 8.0).unwrap();
        let att = energy_dissipation_trace(&traj, Sigma::Attractive, &[0.0, 0.5, 1.0, 2.0, 4.0, 8.0]).unwrap();
        prop_assert!(is_non_increasing(&att, 1e-12));
    }

    #[test]
    fn repulsive_flow_has_no_atoms(mu in arb_measure(), t in 0.01..6.0f64) {
        let mt = repulsive_flow(&mu, t).unwrap();
        prop_assert!(!mt.has_atoms());
    }

    /// Between events the quantile of the repulsive flow moves with
    /// velocity `2s - 1`.
    #[test]
    fn repulsive_quantile_velocity(mu in arb_measure(), t in 0.01..3.0f64, s in 0.001..0.999f64) {
        let h = 1e-2;
        let x0 = repulsive_flow(&mu, t).unwrap().quantile().eval(s);
        let x1 = repulsive_flow(&mu, t + h).unwrap().quantile().eval(s);
        prop_assert!(((x1 - x0) / h - (2.0 * s - 1.0)).abs() < 1e-10);
    }

    /// Each particle moves at the Rankine–Hugoniot speed of the jump it
    /// carries in the cdf.
    #[test]
    fn particle_speed_is_shock_speed(mu in arb_atomic()) {
        let flux = Flux::exact(Sigma::Attractive);
        let f = mu.cdf();
        let state = &ParticleTrajectory::simulate(&mu, 0.0).unwrap().snapshots[0];
        for p in &state.particles {
            let rh = flux.shock_speed(f.left_limit(p.position), f.eval(p.position));
            prop_assert!((p.velocity - rh).abs() < 1e-12);
        }
    }

    /// Merge events depend only on the measure, not on how it was listed.
    #[test]
    fn events_ignore_input_order(mu in arb_atomic(), seed in any::<u64>()) {
        let mut atoms: Vec<Atom> = mu.atoms().to_vec();
        let n = atoms.len();
        for i in (1..n).rev() {
            atoms.swap(i, (seed as usize ^ i.wrapping_mul(2654435761)) % (i + 1));
        }
        let shuffled = Measure1D::new(atoms, vec![]).unwrap();
        let a = ParticleTrajectory::simulate(&mu, 50.0).unwrap();
        let b = ParticleTrajectory::simulate(&shuffled, 50.0).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn attractive_continuum_is_unsupported() {
    let mu = Measure1D::uniform(0.0, 1.0).unwrap();
    assert!(gradient_flow(&mu, Sigma::Attractive, 1.0).is_err());
}

#[test]
fn three_equal_atoms_collapse_at_once() {
    // oracle: the outer atoms move at ±2/3 towards the fixed middle one
    let mu = Measure1D::atomic(&[(-1.0, 1.0 / 3.0), (0.0, 1.0 / 3.0), (1.0, 1.0 / 3.0)]).unwrap();
    let traj = ParticleTrajectory::simulate(&mu, 5.0).unwrap();
    assert_eq!(traj.merges.len(), 1);
    assert!((traj.merges[0].time - 1.5).abs() < 1e-14);
    assert_eq!(traj.merges[0].members.len(), 3);
}
