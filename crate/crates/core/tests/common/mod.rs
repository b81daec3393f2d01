#![allow(dead_code)]

use octacover::octahedron::{covering_lattice_nine_eighths, parallelohedron_ref, TranslateSet};
use octacover::scalar::ratio;
use octacover::slice::{slice, SliceSquare};
use octacover::overlap::slice_intersection_area;
use octacover::{Rational, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the grid `(1/den)·Z ∩ [lo, hi]`.
pub fn rational_in(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rational {
    ratio(rng.random_range(lo * den..=hi * den), den)
}

pub fn vec_in(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Vec3 {
    Vec3::new(rational_in(rng, lo, hi, den), rational_in(rng, lo, hi, den), rational_in(rng, lo, hi, den))
}

pub fn lattice_in_p() -> TranslateSet {
    TranslateSet::new(covering_lattice_nine_eighths().points_meeting(parallelohedron_ref())).unwrap()
}

/// Two translates and a height at which both slices have half-side in
/// `[1/27, 53/27]` and overlap with positive area.
pub struct SliceConfig {
    pub xa: Vec3,
    pub xk: Vec3,
    pub z0: Rational,
    pub anchor: SliceSquare,
    pub other: SliceSquare,
}

pub fn random_config(rng: &mut ChaCha8Rng) -> SliceConfig {
    const DEN: i64 = 108;
    loop {
        let xa = vec_in(rng, -1, 1, DEN);
        let z0 = rational_in(rng, -3, 3, DEN);
        let Some(anchor) = slice(&xa, &z0, 0) else { continue };
        if !anchor.in_window() {
            continue;
        }
        let xk = xa.add(&vec_in(rng, -4, 4, DEN));
        let Some(other) = slice(&xk, &z0, 1) else { continue };
        if !other.in_window() || slice_intersection_area(&anchor, &other).unwrap() == ratio(0, 1) {
            continue;
        }
        return SliceConfig { xa, xk, z0, anchor, other };
    }
}
