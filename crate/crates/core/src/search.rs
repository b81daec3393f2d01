//! Simulated annealing over coverings of `P`, looking for thin ones.
//!
//! Every state the chain visits is an exactly certified covering: a move is
//! applied to the coverage engine only if the union test still passes, and
//! density changes are exact rationals. Floats appear only in the Metropolis
//! acceptance draw and the trace.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coverage::{certify_covering, Engine};
use crate::density::{density, region_overlap_volume};
use crate::error::{Error, Result};
use crate::octahedron::{
    body_meets_region, covering_lattice_nine_eighths, octahedron_ref, parallelohedron_ref, LatticeBasis,
    TranslateSet,
};
use crate::polytope::{Polytope3, Vec3};
use crate::scalar::{rat, ratio, rational_to_f64, Rational};

/// Moves are multiples of `1/QUANTUM` in each coordinate.
pub const QUANTUM: i64 = 192;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// The lattice points of the 9/8 covering whose bodies meet `P`.
    Lattice,
    Set(TranslateSet),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchParams {
    pub initial: InitialState,
    pub iterations: usize,
    /// Largest coordinate offset of a perturbation at iteration 0.
    pub step0: Rational,
    pub step_decay: f64,
    pub temp0: f64,
    pub temp_decay: f64,
    /// Probability that a move is a deletion.
    pub delete_probability: f64,
    pub grid_step: Rational,
    pub seed: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            initial: InitialState::Lattice,
            iterations: 10_000,
            step0: ratio(1, 4),
            step_decay: 0.9997,
            temp0: 2e-4,
            temp_decay: 0.9995,
            delete_probability: 0.25,
            grid_step: ratio(1, 8),
            seed: 7,
        }
    }
}

impl SearchParams {
    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.into()));
        if self.step0 <= rat(0) {
            return bad("step0 must be positive");
        }
        if !(self.step_decay > 0.0 && self.step_decay <= 1.0) {
            return bad("step decay must lie in (0, 1]");
        }
        if !(self.temp_decay > 0.0 && self.temp_decay <= 1.0) {
            return bad("temperature decay must lie in (0, 1]");
        }
        if !(self.temp0 >= 0.0 && self.temp0.is_finite()) {
            return bad("temperature must be finite and non-negative");
        }
        if !(0.0..=1.0).contains(&self.delete_probability) {
            return bad("delete probability must lie in [0, 1]");
        }
        if self.grid_step <= rat(0) {
            return Err(Error::NonPositiveStep);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Move {
    Perturb { index: usize, offset: [i64; 3] },
    Delete { index: usize },
}

impl std::fmt::Display for Move {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Move::Perturb { index, offset } => {
                write!(f, "perturb {index} by ({},{},{})/{QUANTUM}", offset[0], offset[1], offset[2])
            }
            Move::Delete { index } => write!(f, "delete {index}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    /// θ of the current state after this iteration.
    pub theta_float: f64,
    pub accepted: bool,
    /// The move did not keep `P` covered.
    pub broke_cover: bool,
    pub proposed: Move,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchTrace {
    pub records: Vec<TraceRecord>,
    pub initial_theta: Rational,
    pub best: TranslateSet,
    pub best_theta: Rational,
    pub best_iteration: usize,
}

impl SearchTrace {
    /// `iteration,theta_float,accepted,move`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,theta_float,accepted,move\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{:.12},{},{}", r.iteration, r.theta_float, r.accepted, r.proposed);
        }
        out
    }

    /// Two whitespace-separated columns, iteration and θ.
    pub fn plot_data(&self) -> String {
        let mut out = String::from("# iteration theta\n");
        for r in &self.records {
            let _ = writeln!(out, "{} {:.12}", r.iteration, r.theta_float);
        }
        out
    }

    pub fn accepted_count(&self) -> usize {
        self.records.iter().filter(|r| r.accepted).count()
    }
}

/// Lattice points of the 9/8 covering whose bodies meet `P`.
pub fn lattice_start() -> TranslateSet {
    TranslateSet::new(covering_lattice_nine_eighths().points_meeting(parallelohedron_ref()))
        .expect("lattice points are distinct")
}

fn overlap(p: &Vec3) -> Rational {
    let region = parallelohedron_ref();
    if body_meets_region(p, region) {
        region_overlap_volume(octahedron_ref(), region, p)
    } else {
        Rational::zero()
    }
}

/// Anneal from `params.initial`, keeping only certified coverings of `P`.
pub fn minimize_density(params: &SearchParams) -> Result<SearchTrace> {
    params.validate()?;
    let start = match &params.initial {
        InitialState::Lattice => lattice_start(),
        InitialState::Set(s) => s.clone(),
    };
    let p = parallelohedron_ref();
    let vol_p = p.volume();
    let mut engine = Engine::new(octahedron_ref(), start.as_slice(), p, &params.grid_step, &[BigInt::from(QUANTUM)])?;
    if !engine.covers() {
        return Err(Error::InitialNotCovering);
    }
    let q = (engine.scale() / BigInt::from(QUANTUM))
        .to_i64()
        .expect("grid scale fits in i64");

    let mut vols: Vec<Rational> = start.iter().map(overlap).collect();
    let mut live: Vec<usize> = (0..start.len()).collect();
    let mut total: Rational = vols.iter().sum();
    let initial_theta = &total / &vol_p;
    let mut best_total = total.clone();
    let mut best_iteration = 0;
    let mut best_positions: Vec<Option<[i64; 3]>> = (0..engine.translate_count()).map(|i| engine.translate(i)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let step0 = rational_to_f64(&params.step0) * QUANTUM as f64;
    let mut records = Vec::with_capacity(params.iterations);

    for it in 0..params.iterations {
        if live.is_empty() {
            break;
        }
        let temp = params.temp0 * params.temp_decay.powi(it as i32);
        let reach = ((step0 * params.step_decay.powi(it as i32)).round() as i64).max(1);
        let slot = rng.random_range(0..live.len());
        let index = live[slot];
        let old = engine.translate(index).expect("live translate");
        let proposed = if rng.random_bool(params.delete_probability) {
            Move::Delete { index }
        } else {
            let mut offset = [0i64; 3];
            while offset == [0, 0, 0] {
                for o in offset.iter_mut() {
                    *o = rng.random_range(-reach..=reach);
                }
            }
            Move::Perturb { index, offset }
        };

        let (target, new_vol) = match &proposed {
            Move::Delete { .. } => (None, Rational::zero()),
            Move::Perturb { offset, .. } => {
                let pos = [old[0] + offset[0] * q, old[1] + offset[1] * q, old[2] + offset[2] * q];
                let v = overlap(&engine.grid_point(&pos));
                // A body that no longer meets P is dropped.
                (if v.is_zero() { None } else { Some(pos) }, v)
            }
        };
        let delta = &new_vol - &vols[index];
        let d = rational_to_f64(&delta) / rational_to_f64(&vol_p);
        // Always draw, so the random stream does not depend on the branch.
        let u: f64 = rng.random();
        let metropolis = d <= 0.0 || (temp > 0.0 && u < (-d / temp).exp());

        let mut broke_cover = false;
        let accepted = metropolis && {
            let ok = engine.try_set(index, target);
            broke_cover = !ok;
            ok
        };
        if accepted {
            total += &delta;
            vols[index] = new_vol;
            if target.is_none() {
                live.swap_remove(slot);
                live.sort_unstable();
            }
            if total < best_total {
                best_total = total.clone();
                best_iteration = it + 1;
                best_positions = (0..engine.translate_count()).map(|i| engine.translate(i)).collect();
            }
        }
        records.push(TraceRecord {
            iteration: it + 1,
            theta_float: rational_to_f64(&(&total / &vol_p)),
            accepted,
            broke_cover,
            proposed,
        });
    }

    let best = TranslateSet::new(best_positions.iter().flatten().map(|g| engine.grid_point(g)).collect())?;
    let best_theta = density(&best, p);
    debug_assert_eq!(best_theta, &best_total / &vol_p);
    Ok(SearchTrace {
        records,
        initial_theta,
        best,
        best_theta,
        best_iteration,
    })
}

/// Runs with seeds `seed0, seed0+1, ...` in parallel; results come back in
/// seed order.
pub fn run_seeds(params: &SearchParams, runs: usize) -> Result<Vec<SearchTrace>> {
    use rayon::prelude::*;
    (0..runs as u64)
        .into_par_iter()
        .map(|k| {
            let mut p = params.clone();
            p.seed = params.seed.wrapping_add(k);
            minimize_density(&p)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeDensity {
    /// `vol(C₃) / |det|`.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub intrinsic: Rational,
    /// Density of the lattice translates restricted to the region.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub region_value: Rational,
    pub translates: usize,
}

/// Density of a lattice covering, after certifying that it covers `region`.
pub fn lattice_density(basis: &LatticeBasis, region: &Polytope3) -> Result<LatticeDensity> {
    lattice_density_with_step(basis, region, &ratio(1, 8))
}

pub fn lattice_density_with_step(basis: &LatticeBasis, region: &Polytope3, h: &Rational) -> Result<LatticeDensity> {
    let x = TranslateSet::new(basis.points_meeting(region))?;
    let cert = certify_covering(&x, region, h)?;
    if !cert.is_certified() {
        return Err(Error::NotACovering { gaps: cert.gap_cells() });
    }
    let det = basis.determinant().clone();
    let det = if det < rat(0) { -det } else { det };
    Ok(LatticeDensity {
        intrinsic: octahedron_ref().volume() / det,
        region_value: density(&x, region),
        translates: x.len(),
    })
}
