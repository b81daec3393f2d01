//! Exact certification that translates of a body cover a region.

mod engine;
mod fm;

pub(crate) use engine::Engine;

use serde::Serialize;

use crate::error::Result;
use crate::octahedron::{octahedron_ref, TranslateSet};
use crate::polytope::{Polytope3, Vec3};
use crate::scalar::Rational;

/// Witnesses reported per certificate.
pub const MAX_WITNESSES: usize = 16;

pub const MARGIN_RULE: &str = "a cell of L-infinity radius h is covered when one translate contains all its \
corners (for C3: |p - x|_1 <= 2 - 3h at the centre p); every other cell is decided by an exact test that \
the translates meeting it leave no open subset of the cell and region uncovered";

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CoverageStatus {
    Certified,
    Gap {
        gap_cells: usize,
        /// Points of the region outside every translate (at most 16).
        #[serde(serialize_with = "crate::io::ser_vec3_list")]
        witnesses: Vec<Vec3>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageCertificate {
    #[serde(serialize_with = "crate::io::ser_polytope")]
    pub region: Polytope3,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub grid_step: Rational,
    pub cells_checked: usize,
    /// Cells settled by a single containing translate.
    pub margin_cells: usize,
    pub margin_rule: &'static str,
    pub status: CoverageStatus,
}

impl CoverageCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == CoverageStatus::Certified
    }

    pub fn gap_cells(&self) -> usize {
        match &self.status {
            CoverageStatus::Certified => 0,
            CoverageStatus::Gap { gap_cells, .. } => *gap_cells,
        }
    }
}

/// Certify that `C₃ + X` covers `region`, using cells of L∞ radius `h`.
///
/// `Certified` is a proof: each cell is either inside one translate or
/// shown covered by an exact union test. `Gap` witnesses are points of the
/// region that no translate contains.
pub fn certify_covering(x: &TranslateSet, region: &Polytope3, h: &Rational) -> Result<CoverageCertificate> {
    certify_covering_with_body(octahedron_ref(), x, region, h)
}

/// As [`certify_covering`] for translates of an arbitrary body.
pub fn certify_covering_with_body(
    body: &Polytope3,
    x: &TranslateSet,
    region: &Polytope3,
    h: &Rational,
) -> Result<CoverageCertificate> {
    let engine = Engine::new(body, x.as_slice(), region, h, &[])?;
    let scan = engine.scan(MAX_WITNESSES);
    let status = if scan.gap_cells == 0 {
        CoverageStatus::Certified
    } else {
        CoverageStatus::Gap {
            gap_cells: scan.gap_cells,
            witnesses: scan.witnesses,
        }
    };
    Ok(CoverageCertificate {
        region: region.clone(),
        grid_step: h.clone(),
        cells_checked: scan.cells,
        margin_cells: scan.margin_cells,
        margin_rule: MARGIN_RULE,
        status,
    })
}

/// Exact membership of `p` in some translate of `body`.
pub fn covered_by(body: &Polytope3, x: &TranslateSet, p: &Vec3) -> bool {
    x.iter().any(|t| body.contains_point(&p.sub(t)))
}
