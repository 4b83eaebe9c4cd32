#![allow(dead_code)]

use newtonflow::harness::{random_measure, rng_from_seed, MeasureClass};
use newtonflow::{Atom, Measure1D, Segment};
use proptest::prelude::*;

/// Measures with arbitrary (non-dyadic) data; segments may overlap each
/// other and atoms.
pub fn arb_measure() -> impl Strategy<Value = Measure1D> {
    (
        prop::collection::vec((-5.0..5.0f64, 0.01..1.0f64), 0..6),
        prop::collection::vec((-5.0..5.0f64, 0.05..3.0f64, 0.01..1.0f64), 0..3),
    )
        .prop_filter("need at least one piece", |(a, s)| {
            !a.is_empty() || !s.is_empty()
        })
        .prop_map(|(atoms, segments)| {
            let total: f64 =
                atoms.iter().map(|a| a.1).sum::<f64>() + segments.iter().map(|s| s.2).sum::<f64>();
            Measure1D::new(
                atoms
                    .iter()
                    .map(|&(position, w)| Atom {
                        position,
                        mass: w / total,
                    })
                    .collect(),
                segments
                    .iter()
                    .map(|&(left, width, w)| Segment {
                        left,
                        right: left + width,
                        mass: w / total,
                    })
                    .collect(),
            )
            .unwrap()
        })
}

pub fn arb_atomic() -> impl Strategy<Value = Measure1D> {
    prop::collection::vec((-5.0..5.0f64, 0.01..1.0f64), 1..10).prop_map(|atoms| {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        Measure1D::new(
            atoms
                .iter()
                .map(|&(position, w)| Atom {
                    position,
                    mass: w / total,
                })
                .collect(),
            vec![],
        )
        .unwrap()
    })
}

/// Dyadic measures from the harness generator.
pub fn dyadic(class: MeasureClass) -> impl Strategy<Value = Measure1D> {
    any::<u64>().prop_map(move |seed| random_measure(&mut rng_from_seed(seed), class))
}

pub fn dyadic_any() -> impl Strategy<Value = Measure1D> {
    prop_oneof![
        dyadic(MeasureClass::Atomic),
        dyadic(MeasureClass::Continuous),
        dyadic(MeasureClass::Mixed),
    ]
}

pub fn arb_time() -> impl Strategy<Value = f64> {
    0.0..6.0f64
}
