use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::measure::{Atom, Measure1D, Segment};

pub const MAX_ATOMS: usize = 12;
pub const MAX_SEGMENTS: usize = 4;
const MASS_UNITS: usize = 64;
const CELLS: usize = 64;
const CELL_WIDTH: f64 = 0.25;
const GRID_LEFT: f64 = -8.0;
const OFFSET: f64 = 1.0 / 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureClass {
    Atomic,
    Continuous,
    Mixed,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random measure on `[-8, 8)` with dyadic data: at most 12 atoms and 4
/// segments, each in its own cell of width ¼, endpoints on multiples of
/// 1/16 and masses on multiples of 1/64.
pub fn random_measure(rng: &mut impl Rng, class: MeasureClass) -> Measure1D {
    let (atoms, segments) = match class {
        MeasureClass::Atomic => (rng.gen_range(1..=MAX_ATOMS), 0),
        MeasureClass::Continuous => (0, rng.gen_range(1..=MAX_SEGMENTS)),
        MeasureClass::Mixed => (
            rng.gen_range(1..=MAX_ATOMS),
            rng.gen_range(1..=MAX_SEGMENTS),
        ),
    };
    let pieces = atoms + segments;
    let cells = sample(rng, CELLS, pieces).into_vec();
    let masses = random_composition(rng, MASS_UNITS, pieces);

    let mut out_atoms = Vec::with_capacity(atoms);
    let mut out_segments = Vec::with_capacity(segments);
    for (k, (&cell, &units)) in cells.iter().zip(&masses).enumerate() {
        let base = GRID_LEFT + cell as f64 * CELL_WIDTH;
        let mass = units as f64 / MASS_UNITS as f64;
        if k < atoms {
            let position = base + rng.gen_range(0..4) as f64 * OFFSET;
            out_atoms.push(Atom { position, mass });
        } else {
            let lo = rng.gen_range(0..4);
            let hi = rng.gen_range(lo + 1..=4);
            out_segments.push(Segment {
                left: base + lo as f64 * OFFSET,
                right: base + hi as f64 * OFFSET,
                mass,
            });
        }
    }
    Measure1D::new(out_atoms, out_segments).expect("generated masses sum to one")
}

/// `total` split into `parts` positive integers.
fn random_composition(rng: &mut impl Rng, total: usize, parts: usize) -> Vec<usize> {
    let mut cuts = sample(rng, total - 1, parts - 1).into_vec();
    cuts.iter_mut().for_each(|c| *c += 1);
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        out.push(c - prev);
        prev = c;
    }
    out
}

/// Random time in `(0, 4]` on the 1/16 grid.
pub fn random_time(rng: &mut impl Rng) -> f64 {
    rng.gen_range(1..=64) as f64 / 16.0
}
