//! The localized density `θ(C₃, X, P)` and the lower-bound chain for it.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::coverage::{certify_covering, certify_covering_with_body, CoverageCertificate, CoverageStatus};
use crate::error::{Error, Result};
use crate::octahedron::{
    body_meets_region, neighbor_set, octahedron_ref, parallelohedron_ref, scaled_octahedron, TranslateSet,
};
use crate::overlap::{
    classify, config_lower_bound, exact_pair_volume, pair_bound_floor, Certificate, OverlapKind,
};
use crate::polytope::{Polytope3, Vec3};
use crate::scalar::{rat, ratio, rational_to_f64, Rational};
use crate::slice::{find_good_height, slice, SliceSquare};

/// Grid step used when a caller does not choose one.
pub fn default_grid_step() -> Rational {
    ratio(1, 32)
}

/// Step used for the covering precondition checks inside this module. The
/// union test is exact at any step, so only speed depends on it.
fn precondition_step() -> Rational {
    ratio(1, 8)
}

/// `1 + 4/6¹⁰`.
pub fn theorem_bound() -> Rational {
    rat(1) + Rational::new(4.into(), 60_466_176.into())
}

/// `1 + 1/96`.
pub fn case_one_bound() -> Rational {
    rat(1) + ratio(1, 96)
}

/// `23/32 + (m+1)·vol(C₃)/vol(P)`.
pub fn case_one_value(m: usize) -> Rational {
    rat(1) - ratio(9, 32) + Rational::from_integer((m as i64 + 1).into()) * ratio(32, 3) / rat(1024)
}

/// `vol(region ∩ (body + x))`, with shortcuts for the common cases.
pub fn region_overlap_volume(body: &Polytope3, region: &Polytope3, x: &Vec3) -> Rational {
    let moved = body.translate(x);
    let (blo, bhi) = moved.bounding_box();
    let (rlo, rhi) = region.bounding_box();
    let apart = [(&blo.x, &bhi.x, &rlo.x, &rhi.x), (&blo.y, &bhi.y, &rlo.y, &rhi.y), (&blo.z, &bhi.z, &rlo.z, &rhi.z)]
        .iter()
        .any(|(a0, a1, b0, b1)| a1 <= b0 || b1 <= a0);
    if apart {
        return Rational::zero();
    }
    if region.contains_polytope(&moved) {
        return moved.volume();
    }
    region.intersect(&moved).volume()
}

fn octahedron_overlap_volume(region: &Polytope3, x: &Vec3) -> Rational {
    if !body_meets_region(x, region) {
        return Rational::zero();
    }
    region_overlap_volume(octahedron_ref(), region, x)
}

/// `θ(C₃, X, region) = Σ vol(region ∩ (C₃ + x)) / vol(region)`.
pub fn density(x: &TranslateSet, region: &Polytope3) -> Rational {
    let vols: Vec<Rational> = x.as_slice().par_iter().map(|t| octahedron_overlap_volume(region, t)).collect();
    vols.into_iter().sum::<Rational>() / region.volume()
}

/// As [`density`] for translates of an arbitrary body.
pub fn density_with_body(body: &Polytope3, x: &TranslateSet, region: &Polytope3) -> Rational {
    let vols: Vec<Rational> = x.as_slice().par_iter().map(|t| region_overlap_volume(body, region, t)).collect();
    vols.into_iter().sum::<Rational>() / region.volume()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityExcess {
    /// `density - 1`, the integral of (coverage count - 1) over the region.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub excess: Rational,
    /// `Σ_{i<j} vol(region ∩ B_i ∩ B_j) / vol(region)`.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub pairwise_sum: Rational,
    /// `excess - pairwise_sum`; zero when no point lies in three bodies.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub residue: Rational,
}

/// Excess of a certified covering, with the pairwise-overlap sum reported
/// separately from the exact excess.
pub fn multiplicity_excess(x: &TranslateSet, region: &Polytope3) -> Result<MultiplicityExcess> {
    multiplicity_excess_with_body(octahedron_ref(), x, region)
}

pub fn multiplicity_excess_with_body(
    body: &Polytope3,
    x: &TranslateSet,
    region: &Polytope3,
) -> Result<MultiplicityExcess> {
    let cert = certify_covering_with_body(body, x, region, &precondition_step())?;
    if !cert.is_certified() {
        return Err(Error::NotACovering { gaps: cert.gap_cells() });
    }
    let excess = density_with_body(body, x, region) - rat(1);
    let pts = x.as_slice();
    let bodies: Vec<Polytope3> = pts.iter().map(|t| body.translate(t)).collect();
    let pairs: Vec<(usize, usize)> = (0..pts.len())
        .flat_map(|i| (i + 1..pts.len()).map(move |j| (i, j)))
        .collect();
    let vols: Vec<Rational> = pairs
        .par_iter()
        .map(|&(i, j)| match bodies[i].intersect(&bodies[j]).body() {
            Some(lens) => region_overlap_volume(lens, region, &Vec3::zero()),
            None => Rational::zero(),
        })
        .collect();
    let pairwise_sum = vols.into_iter().sum::<Rational>() / region.volume();
    Ok(MultiplicityExcess {
        residue: &excess - &pairwise_sum,
        excess,
        pairwise_sum,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseUsed {
    Case1,
    Case2,
    NotLocalizable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapCertificate {
    pub certificate: Certificate,
    /// Index in `X` of the neighbour compared with the anchor.
    pub neighbor: usize,
    /// For a third-square certificate, index in `X` of the square that
    /// covers the crossing point.
    pub third: Option<usize>,
    pub config: OverlapKind,
    /// Closed-form value; `None` for third-square certificates.
    #[serde(serialize_with = "crate::io::ser_opt_rational")]
    pub formula_value: Option<Rational>,
    /// Exact overlap volume (for a third square, the sum of the two
    /// exact overlaps with the third body).
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub exact_volume: Rational,
    /// Both slices have half-side in `[1/27, 53/27]`.
    pub in_window: bool,
    /// The neighbour's slice reaches the anchor slice's boundary.
    pub on_boundary: bool,
    /// The bound was read with anchor and neighbour exchanged.
    pub swapped: bool,
    /// The closed form does not exceed the exact volume (always true for
    /// third-square certificates, whose value is exact).
    pub valid: bool,
}

impl OverlapCertificate {
    /// The amount this certificate proves for `∫(count - 1)`.
    pub fn proven(&self) -> Rational {
        match (&self.formula_value, self.valid) {
            (_, false) => Rational::zero(),
            (Some(f), true) => f.clone().max(Rational::zero()),
            (None, true) => self.exact_volume.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub theta: Rational,
    pub theta_float: f64,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub excess: Rational,
    pub case_used: CaseUsed,
    pub coverage: Option<CoverageSummary>,
    /// Index in `X` of the translate whose body contains the origin.
    pub anchor: Option<usize>,
    /// Number of neighbours of the anchor (the anchor not counted).
    pub m: Option<usize>,
    /// `3C₃ + anchor ⊂ P`, checked rather than assumed.
    pub anchor_hull_in_p: Option<bool>,
    #[serde(serialize_with = "crate::io::ser_opt_rational")]
    pub good_height: Option<Rational>,
    /// Every side of the anchor slice is covered by neighbour slices.
    pub boundary_covered: Option<bool>,
    pub certificates: Vec<OverlapCertificate>,
    /// Lower bound on θ obtained by the localization argument.
    #[serde(serialize_with = "crate::io::ser_opt_rational")]
    pub lower_bound: Option<Rational>,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub theorem_bound: Rational,
    /// `θ >= 1 + 4/6¹⁰` on a certified covering.
    pub bound_satisfied: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverageSummary {
    pub certified: bool,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub grid_step: Rational,
    pub cells_checked: usize,
    pub gap_cells: usize,
}

impl From<&CoverageCertificate> for CoverageSummary {
    fn from(c: &CoverageCertificate) -> Self {
        CoverageSummary {
            certified: c.is_certified(),
            grid_step: c.grid_step.clone(),
            cells_checked: c.cells_checked,
            gap_cells: c.gap_cells(),
        }
    }
}

/// Localization data independent of θ.
struct Localized {
    case_used: CaseUsed,
    anchor: usize,
    m: usize,
    anchor_hull_in_p: bool,
    good_height: Option<Rational>,
    boundary_covered: Option<bool>,
    certificates: Vec<OverlapCertificate>,
    lower_bound: Option<Rational>,
    note: Option<String>,
}

/// Index of the first translate whose body contains the origin.
pub fn origin_anchor(x: &TranslateSet) -> Result<usize> {
    x.iter()
        .position(|t| t.l1_norm() <= rat(2))
        .ok_or(Error::NoOriginTranslate)
}

/// Does the union of closed intervals cover `[lo, hi]`?
fn intervals_cover(mut parts: Vec<(Rational, Rational)>, lo: &Rational, hi: &Rational) -> bool {
    parts.sort();
    let mut reach = lo.clone();
    for (a, b) in parts {
        if a > reach {
            return false;
        }
        if b > reach {
            reach = b;
        }
        if &reach >= hi {
            return true;
        }
    }
    &reach >= hi
}

/// For each neighbour slice, whether it covers a piece of positive length
/// of the anchor slice's boundary; and whether the boundary is covered.
fn boundary_scan(anchor: &SliceSquare, others: &[SliceSquare]) -> (Vec<bool>, bool) {
    let (au, av) = (anchor.u_interval(), anchor.v_interval());
    let mut touches = vec![false; others.len()];
    let mut all_covered = true;
    // Sides u = const (running along v) and v = const (running along u).
    for (fixed_axis, fixed) in [(0, &au.0), (0, &au.1), (1, &av.0), (1, &av.1)] {
        let (run_lo, run_hi) = if fixed_axis == 0 { (&av.0, &av.1) } else { (&au.0, &au.1) };
        let mut parts = Vec::new();
        for (k, o) in others.iter().enumerate() {
            let (fix_iv, run_iv) = if fixed_axis == 0 {
                (o.u_interval(), o.v_interval())
            } else {
                (o.v_interval(), o.u_interval())
            };
            if fixed < &fix_iv.0 || fixed > &fix_iv.1 {
                continue;
            }
            let a = (&run_iv.0).max(run_lo).clone();
            let b = (&run_iv.1).min(run_hi).clone();
            if a < b {
                touches[k] = true;
                parts.push((a, b));
            } else if a == b {
                parts.push((a, b));
            }
        }
        if !intervals_cover(parts, run_lo, run_hi) {
            all_covered = false;
        }
    }
    (touches, all_covered)
}

/// Points where the boundary of `other` crosses the boundary of `anchor`,
/// in the rotated frame.
fn crossing_points(anchor: &SliceSquare, other: &SliceSquare) -> Vec<(Rational, Rational)> {
    let (au, av) = (anchor.u_interval(), anchor.v_interval());
    let (ou, ov) = (other.u_interval(), other.v_interval());
    let inside = |x: &Rational, iv: &(Rational, Rational)| &iv.0 <= x && x <= &iv.1;
    let mut pts = Vec::new();
    for u in [&au.0, &au.1] {
        for v in [&ov.0, &ov.1] {
            if inside(u, &ou) && inside(v, &av) {
                pts.push((u.clone(), v.clone()));
            }
        }
    }
    for v in [&av.0, &av.1] {
        for u in [&ou.0, &ou.1] {
            if inside(v, &ov) && inside(u, &au) {
                pts.push((u.clone(), v.clone()));
            }
        }
    }
    pts.sort();
    pts.dedup();
    pts
}

fn localize(x: &TranslateSet) -> Result<Localized> {
    let anchor = origin_anchor(x)?;
    let pts = x.as_slice();
    let a = &pts[anchor];
    // Indices in X of the anchor's neighbours, anchor last.
    let mut idx: Vec<usize> = (0..pts.len())
        .filter(|&i| i != anchor && pts[i].sub(a).l1_norm() <= rat(4))
        .collect();
    idx.push(anchor);
    let neighbors = neighbor_set(x, anchor)?;
    debug_assert_eq!(neighbors.len(), idx.len());
    let m = idx.len() - 1;
    let anchor_hull_in_p = parallelohedron_ref().contains_polytope(&scaled_octahedron(&rat(3)).translate(a));

    let mut out = Localized {
        case_used: CaseUsed::Case1,
        anchor,
        m,
        anchor_hull_in_p,
        good_height: None,
        boundary_covered: None,
        certificates: Vec::new(),
        lower_bound: None,
        note: None,
    };
    if m >= 27 {
        out.lower_bound = Some(case_one_value(m));
        return Ok(out);
    }
    out.case_used = CaseUsed::Case2;
    let z0 = match find_good_height(&neighbors) {
        Ok(z) => z,
        Err(Error::NoFeasibleHeight) => {
            out.case_used = CaseUsed::NotLocalizable;
            out.note = Some("no good height: the bad height windows cover the anchor window".into());
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    let anchor_slice = slice(a, &z0, anchor).expect("good height lies in the anchor window");
    let others: Vec<SliceSquare> = idx[..m]
        .iter()
        .filter_map(|&i| slice(&pts[i], &z0, i))
        .filter(|s| s.t.is_positive())
        .collect();
    let (touches, covered) = boundary_scan(&anchor_slice, &others);
    out.boundary_covered = Some(covered);
    out.good_height = Some(z0.clone());

    for (k, other) in others.iter().enumerate() {
        let config = classify(&anchor_slice, other)?;
        if config.kind == OverlapKind::Disjoint {
            continue;
        }
        let bound = config_lower_bound(&anchor_slice, other)?;
        let xi = &pts[other.source];
        let cert = match bound.certificate {
            Certificate::DirectSameSign | Certificate::DirectOppositeIII => {
                let exact = exact_pair_volume(a, xi);
                OverlapCertificate {
                    certificate: bound.certificate,
                    neighbor: other.source,
                    third: None,
                    config: config.kind,
                    valid: bound.value <= exact,
                    formula_value: Some(bound.value),
                    exact_volume: exact,
                    in_window: bound.in_window,
                    on_boundary: touches[k],
                    swapped: bound.swapped,
                }
            }
            Certificate::ThirdSquareNeeded => {
                let mut best: Option<(usize, Rational)> = None;
                for (u, v) in crossing_points(&anchor_slice, other) {
                    let (px, py) = ((&u + &v) / rat(2), (&u - &v) / rat(2));
                    for j in others.iter().filter(|s| s.source != other.source) {
                        if !j.contains_xy(&px, &py) {
                            continue;
                        }
                        let xj = &pts[j.source];
                        let sum = exact_pair_volume(a, xj) + exact_pair_volume(xi, xj);
                        if best.as_ref().is_none_or(|(_, s)| sum > *s) {
                            best = Some((j.source, sum));
                        }
                    }
                }
                OverlapCertificate {
                    certificate: Certificate::ThirdSquareNeeded,
                    neighbor: other.source,
                    third: best.as_ref().map(|(j, _)| *j),
                    config: config.kind,
                    formula_value: None,
                    valid: best.is_some(),
                    exact_volume: best.map(|(_, s)| s).unwrap_or_else(Rational::zero),
                    in_window: bound.in_window,
                    on_boundary: touches[k],
                    swapped: bound.swapped,
                }
            }
        };
        out.certificates.push(cert);
    }
    let best = out
        .certificates
        .iter()
        .map(OverlapCertificate::proven)
        .max()
        .unwrap_or_else(Rational::zero);
    out.lower_bound = Some(rat(1) + best / rat(1024));
    Ok(out)
}

fn assemble(theta: Rational, coverage: Option<&CoverageCertificate>, loc: Option<Localized>) -> DensityReport {
    let certified = coverage.is_none_or(|c| c.is_certified());
    let bound_satisfied = certified && theta >= theorem_bound();
    let mut report = DensityReport {
        theta_float: rational_to_f64(&theta),
        excess: &theta - rat(1),
        theta,
        case_used: CaseUsed::NotLocalizable,
        coverage: coverage.map(CoverageSummary::from),
        anchor: None,
        m: None,
        anchor_hull_in_p: None,
        good_height: None,
        boundary_covered: None,
        certificates: Vec::new(),
        lower_bound: None,
        theorem_bound: theorem_bound(),
        bound_satisfied,
        note: None,
    };
    if let Some(l) = loc {
        report.case_used = l.case_used;
        report.anchor = Some(l.anchor);
        report.m = Some(l.m);
        report.anchor_hull_in_p = Some(l.anchor_hull_in_p);
        report.good_height = l.good_height;
        report.boundary_covered = l.boundary_covered;
        report.certificates = l.certificates;
        report.lower_bound = l.lower_bound;
        report.note = l.note;
    }
    report
}

/// The localization chain on a covering of `P`: anchor, neighbour count,
/// and either the Case 1 count bound or Case 2 overlap certificates.
pub fn localization_bound(x: &TranslateSet) -> Result<DensityReport> {
    let cert = certify_covering(x, parallelohedron_ref(), &precondition_step())?;
    if !cert.is_certified() {
        return Err(Error::NotACovering { gaps: cert.gap_cells() });
    }
    let theta = density(x, parallelohedron_ref());
    Ok(assemble(theta, Some(&cert), Some(localize(x)?)))
}

/// End to end: certify at step `h`, compute θ, localize.
pub fn theorem_report(x: &TranslateSet, h: &Rational) -> Result<DensityReport> {
    let p = parallelohedron_ref();
    let cert = certify_covering(x, p, h)?;
    let theta = density(x, p);
    if !cert.is_certified() {
        let mut report = assemble(theta, Some(&cert), None);
        report.note = Some("translates do not cover P".into());
        return Ok(report);
    }
    Ok(assemble(theta, Some(&cert), Some(localize(x)?)))
}

/// Gap witnesses of a certificate, if any.
pub fn gap_witnesses(cert: &CoverageCertificate) -> &[Vec3] {
    match &cert.status {
        CoverageStatus::Certified => &[],
        CoverageStatus::Gap { witnesses, .. } => witnesses,
    }
}

/// Whether `pair_bound_floor()` is reached by the best proven certificate.
pub fn reaches_pair_floor(report: &DensityReport) -> bool {
    report
        .certificates
        .iter()
        .any(|c| c.proven() >= pair_bound_floor())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::octahedron::{covering_lattice_nine_eighths, parallelohedron_p};

    fn lattice_in_p() -> TranslateSet {
        let b = covering_lattice_nine_eighths();
        TranslateSet::new(b.points_meeting(&parallelohedron_p())).unwrap()
    }

    #[test]
    fn constants() {
        assert_eq!(case_one_value(27), case_one_bound());
        assert_eq!(ratio(1, 1024) * pair_bound_floor(), &theorem_bound() - rat(1));
        assert!(rational_to_f64(&theorem_bound()) > 1.0 + 6.6e-8);
    }

    #[test]
    fn single_translate_density() {
        let x = TranslateSet::new(vec![Vec3::zero()]).unwrap();
        assert_eq!(density(&x, &parallelohedron_p()), ratio(1, 96));
    }

    #[test]
    fn lattice_density_on_p_is_nine_eighths() {
        assert_eq!(density(&lattice_in_p(), &parallelohedron_p()), ratio(9, 8));
    }

    #[test]
    fn lattice_localizes_in_case_two() {
        let r = theorem_report(&lattice_in_p(), &ratio(1, 8)).unwrap();
        assert_eq!(r.case_used, CaseUsed::Case2);
        assert_eq!(r.m, Some(14));
        assert_eq!(r.anchor_hull_in_p, Some(true));
        assert_eq!(r.good_height, Some(ratio(-5, 3)));
        assert_eq!(r.boundary_covered, Some(true));
        assert!(r.bound_satisfied);
        assert!(reaches_pair_floor(&r));
        assert!(r.lower_bound.unwrap() >= theorem_bound());
    }

    #[test]
    fn gap_reports_are_not_errors() {
        let x = TranslateSet::new(vec![Vec3::zero()]).unwrap();
        let r = theorem_report(&x, &ratio(1, 2)).unwrap();
        assert!(!r.bound_satisfied);
        assert!(!r.coverage.as_ref().unwrap().certified);
        assert!(matches!(localization_bound(&x), Err(Error::NotACovering { .. })));
    }

    #[test]
    fn interval_cover() {
        let parts = vec![(rat(0), rat(1)), (ratio(1, 2), rat(2))];
        assert!(intervals_cover(parts.clone(), &rat(0), &rat(2)));
        assert!(!intervals_cover(parts, &rat(0), &rat(3)));
        assert!(!intervals_cover(vec![(rat(0), rat(1)), (ratio(3, 2), rat(2))], &rat(0), &rat(2)));
    }
}
