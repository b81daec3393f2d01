use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Polytope3;
use crate::scalar::Scalar;

/// Samples drawn per generator stream. Stream `k` covers samples
/// `[k·CHUNK, (k+1)·CHUNK)`, so the result does not depend on how chunks
/// are spread over worker threads.
const CHUNK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl MonteCarloEstimate {
    /// |estimate - exact| <= k·σ. A zero σ requires an exact match.
    pub fn agrees_with(&self, exact: f64, k: f64) -> bool {
        (self.estimate - exact).abs() <= k * self.std_error + f64::EPSILON * exact.abs().max(1.0)
    }
}

/// Hit-ratio volume estimate over the bounding box of `body`.
pub fn monte_carlo_volume<S: Scalar>(body: &Polytope3<S>, samples: u64, seed: u64) -> MonteCarloEstimate {
    assert!(samples >= 1, "at least one sample is required");
    let body = body.to_f64();
    let (lo, hi) = body.bounding_box();
    let lo = [lo.x, lo.y, lo.z];
    let span = [hi.x - lo[0], hi.y - lo[1], hi.z - lo[2]];
    let box_volume = span[0] * span[1] * span[2];
    let facets: Vec<([f64; 3], f64)> = body
        .facets()
        .iter()
        .map(|h| ([h.normal.x, h.normal.y, h.normal.z], h.offset))
        .collect();

    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let n = CHUNK.min(samples - k * CHUNK);
            let mut hits = 0u64;
            for _ in 0..n {
                let p = [
                    lo[0] + span[0] * rng.random::<f64>(),
                    lo[1] + span[1] * rng.random::<f64>(),
                    lo[2] + span[2] * rng.random::<f64>(),
                ];
                if facets
                    .iter()
                    .all(|(n, b)| n[0] * p[0] + n[1] * p[1] + n[2] * p[2] <= *b)
                {
                    hits += 1;
                }
            }
            hits
        })
        .collect::<Vec<u64>>()
        .into_iter()
        .sum();

    let ratio = hits as f64 / samples as f64;
    MonteCarloEstimate {
        estimate: box_volume * ratio,
        std_error: box_volume * (ratio * (1.0 - ratio) / samples as f64).sqrt(),
        samples,
    }
}
