//! How two slice squares overlap, the closed-form lower bounds on the
//! volume shared by their octahedra, and the exact shared volume.
//!
//! Distances live in the rotated frame, where they are √2 times the plane
//! distances. Converting the closed forms gives rational expressions in the
//! half-sides `t`: for example `(√2/3)(b + 2√2 - l)³` becomes
//! `(b' + 4 - 2t)³ / 6` with `b' = √2·b` and `l = √2·t`.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::Vec3;
use crate::scalar::{rat, Rational};
use crate::slice::{delta_product, simpson, slice, SliceSquare};

/// `4/3¹⁰`, the overlap volume every certificate must reach.
pub fn pair_bound_floor() -> Rational {
    Rational::new(4.into(), 59049.into())
}

fn clipped_overlap(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    let lo = (&a.0).max(&b.0);
    let hi = (&a.1).min(&b.1);
    if hi > lo {
        hi - lo
    } else {
        Rational::zero()
    }
}

/// Area of the intersection of two L1 disks at the same height.
pub fn slice_intersection_area(a: &SliceSquare, b: &SliceSquare) -> Result<Rational> {
    if a.z0 != b.z0 {
        return Err(Error::HeightMismatch);
    }
    Ok(area_unchecked(a, b))
}

fn area_unchecked(a: &SliceSquare, b: &SliceSquare) -> Rational {
    let du = clipped_overlap(&a.u_interval(), &b.u_interval());
    let dv = clipped_overlap(&a.v_interval(), &b.v_interval());
    du * dv / rat(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OverlapKind {
    I,
    II,
    III,
    Disjoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Distances {
    I {
        #[serde(serialize_with = "crate::io::ser_rational")]
        a: Rational,
        #[serde(serialize_with = "crate::io::ser_rational")]
        b: Rational,
    },
    II {
        #[serde(serialize_with = "crate::io::ser_rational")]
        c: Rational,
        #[serde(serialize_with = "crate::io::ser_rational")]
        d: Rational,
        #[serde(serialize_with = "crate::io::ser_rational")]
        e: Rational,
    },
    III {
        #[serde(serialize_with = "crate::io::ser_rational")]
        g: Rational,
        #[serde(serialize_with = "crate::io::ser_rational")]
        h: Rational,
        #[serde(serialize_with = "crate::io::ser_rational")]
        r: Rational,
        #[serde(serialize_with = "crate::io::ser_rational")]
        s: Rational,
    },
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapConfig {
    pub kind: OverlapKind,
    pub covered_vertices: u8,
    pub distances: Distances,
    /// Where each distance was measured, in the order of `distances`:
    /// `u`/`v` for an overlap width, `u-`, `u+`, `v-`, `v+` for the gap on
    /// that side of the anchor.
    pub labels: Vec<&'static str>,
}

const U_SIDES: [&str; 2] = ["u-", "u+"];
const V_SIDES: [&str; 2] = ["v-", "v+"];

/// Gaps between the anchor's sides and the other square's parallel sides
/// on one axis, as `(gap, label)` for the low and high side.
fn side_gaps(
    anchor: &(Rational, Rational),
    other: &(Rational, Rational),
    labels: [&'static str; 2],
) -> [(Rational, &'static str); 2] {
    [
        ((&anchor.0 - &other.0).abs(), labels[0]),
        ((&other.1 - &anchor.1).abs(), labels[1]),
    ]
}

fn covered_ends(anchor: &(Rational, Rational), other: &(Rational, Rational)) -> u8 {
    let inside = |x: &Rational| &other.0 <= x && x <= &other.1;
    inside(&anchor.0) as u8 + inside(&anchor.1) as u8
}

fn sorted_pairs<const N: usize>(mut xs: [(Rational, &'static str); N]) -> [(Rational, &'static str); N] {
    xs.sort_by(|a, b| a.0.cmp(&b.0));
    xs
}

/// Configuration of `other` relative to `anchor` by the number of anchor
/// corners it covers: one gives I, two or none give II, four give III.
/// Three is impossible for axis-parallel squares. With none covered the
/// other square is the smaller one and the bound in
/// [`config_lower_bound`] is taken from the reverse classification.
pub fn classify(anchor: &SliceSquare, other: &SliceSquare) -> Result<OverlapConfig> {
    if anchor.z0 != other.z0 {
        return Err(Error::HeightMismatch);
    }
    let (au, av) = (anchor.u_interval(), anchor.v_interval());
    let (ou, ov) = (other.u_interval(), other.v_interval());
    let (cu, cv) = (covered_ends(&au, &ou), covered_ends(&av, &ov));
    let covered_vertices = cu * cv;
    let wu = clipped_overlap(&au, &ou);
    let wv = clipped_overlap(&av, &ov);
    if wu.is_zero() || wv.is_zero() {
        return Ok(OverlapConfig {
            kind: OverlapKind::Disjoint,
            covered_vertices,
            distances: Distances::None,
            labels: vec![],
        });
    }
    let config = match covered_vertices {
        4 => {
            let mut gaps = Vec::with_capacity(4);
            gaps.extend(side_gaps(&au, &ou, U_SIDES));
            gaps.extend(side_gaps(&av, &ov, V_SIDES));
            let [g, h, r, s] = sorted_pairs(<[_; 4]>::try_from(gaps).expect("four sides"));
            OverlapConfig {
                kind: OverlapKind::III,
                covered_vertices,
                labels: vec![g.1, h.1, r.1, s.1],
                distances: Distances::III { g: g.0, h: h.0, r: r.0, s: s.0 },
            }
        }
        1 => {
            let [b, a] = sorted_pairs([(wu, "u"), (wv, "v")]);
            OverlapConfig {
                kind: OverlapKind::I,
                covered_vertices,
                labels: vec![a.1, b.1],
                distances: Distances::I { a: a.0, b: b.0 },
            }
        }
        _ => {
            // The partial axis is the one where the other square covers a
            // single end of the anchor; with no end covered at all it is the
            // axis of smaller overlap.
            let u_partial = match (cu, cv) {
                (2, _) | (0, 1) => false,
                (_, 2) | (1, 0) => true,
                _ => wu <= wv,
            };
            let (e, full_gaps) = if u_partial {
                ((wu, "u"), side_gaps(&av, &ov, V_SIDES))
            } else {
                ((wv, "v"), side_gaps(&au, &ou, U_SIDES))
            };
            let [c, d] = sorted_pairs(full_gaps);
            OverlapConfig {
                kind: OverlapKind::II,
                covered_vertices,
                labels: vec![c.1, d.1, e.1],
                distances: Distances::II { c: c.0, d: d.0, e: e.0 },
            }
        }
    };
    Ok(config)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Certificate {
    DirectSameSign,
    DirectOppositeIII,
    ThirdSquareNeeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairBound {
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub value: Rational,
    pub certificate: Certificate,
    pub config: OverlapConfig,
    /// Both half-sides lie in `[1/27, 53/27]`, the hypothesis under which
    /// `value >= 4/3¹⁰` is claimed.
    pub in_window: bool,
    /// The other square covers no corner of the anchor, so the bound was
    /// read with the roles exchanged (the anchor then covers two or four
    /// corners of the other square).
    pub swapped: bool,
}

fn cube_over_six(x: Rational) -> Rational {
    &x * &x * &x / rat(6)
}

/// Closed-form lower bound on `vol((C₃+x_anchor) ∩ (C₃+x_other))` read
/// off the two slices at a common height.
pub fn config_lower_bound(anchor: &SliceSquare, other: &SliceSquare) -> Result<PairBound> {
    let same_sign = delta_product(anchor, other)? == 1;
    let config = classify(anchor, other)?;
    if config.covered_vertices == 0 && config.kind != OverlapKind::Disjoint {
        let reverse = config_lower_bound(other, anchor)?;
        debug_assert!(reverse.config.covered_vertices > 0);
        return Ok(PairBound {
            config,
            swapped: true,
            ..reverse
        });
    }
    let four = rat(4);
    let ta = &anchor.t;
    let tk = &other.t;
    let (value, certificate) = match (&config.distances, same_sign) {
        (Distances::None, _) => return Err(Error::NotOverlapping),
        (Distances::I { b, .. }, true) => {
            // The two squares play symmetric roles in a corner overlap; the
            // bound is stated with the larger one as the reference.
            let t_big = ta.max(tk);
            (cube_over_six(b + &four - rat(2) * t_big), Certificate::DirectSameSign)
        }
        (Distances::II { e, .. }, true) => {
            let base = &four - rat(2) * tk + e;
            let value = &base * &base * (&four - rat(2) * tk + rat(2) * ta) / rat(6);
            (value, Certificate::DirectSameSign)
        }
        (Distances::III { g, .. }, true) => (
            cube_over_six(g + &four - rat(2) * tk + rat(2) * ta),
            Certificate::DirectSameSign,
        ),
        (Distances::III { g, .. }, false) => (cube_over_six(g + rat(2) * ta), Certificate::DirectOppositeIII),
        (_, false) => (Rational::zero(), Certificate::ThirdSquareNeeded),
    };
    Ok(PairBound {
        value,
        certificate,
        config,
        in_window: anchor.in_window() && other.in_window(),
        swapped: false,
    })
}

/// Exact `vol((C₃+xi) ∩ (C₃+xj))` by integrating the slice overlap area
/// over `z`. The area is the product of two clipped linear functions, so it
/// is quadratic between the heights where a slice changes slope or two
/// interval ends cross; Simpson's rule is exact on each such piece.
pub fn exact_pair_volume(xi: &Vec3, xj: &Vec3) -> Rational {
    let two = rat(2);
    let lo = (&xi.z).max(&xj.z) - &two;
    let hi = (&xi.z).min(&xj.z) + &two;
    if lo >= hi {
        return Rational::zero();
    }
    let mut breaks = vec![lo.clone(), hi.clone()];
    for z in [&xi.z, &xj.z] {
        if &lo < z && z < &hi {
            breaks.push(z.clone());
        }
    }
    breaks.sort();
    breaks.dedup();

    let ends = |z: &Rational| -> [Rational; 8] {
        let si = slice(xi, z, 0).expect("inside the common window");
        let sj = slice(xj, z, 1).expect("inside the common window");
        let (a, b, c, d) = (si.u_interval(), sj.u_interval(), si.v_interval(), sj.v_interval());
        [a.0, a.1, b.0, b.1, c.0, c.1, d.0, d.1]
    };
    let area = |z: &Rational| -> Rational {
        let si = slice(xi, z, 0).expect("inside the common window");
        let sj = slice(xj, z, 1).expect("inside the common window");
        area_unchecked(&si, &sj)
    };

    let mut total = Rational::zero();
    for w in breaks.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        let (ep, eq) = (ends(p), ends(q));
        let mut cuts = vec![p.clone(), q.clone()];
        // Interval ends are linear on (p, q); record where any two on the
        // same axis cross.
        for axis in [0..4, 4..8] {
            for a in axis.clone() {
                for b in (a + 1)..axis.end {
                    let dp = &ep[a] - &ep[b];
                    let dq = &eq[a] - &eq[b];
                    if dp.signum() * dq.signum() == -rat(1) {
                        cuts.push(p + (q - p) * &dp / (&dp - &dq));
                    }
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        for c in cuts.windows(2) {
            total += simpson(&c[0], &c[1], area);
        }
    }
    total
}

/// `vol((C₃+xi) ∩ (C₃+xj)) > 0`.
pub fn bodies_overlap(xi: &Vec3, xj: &Vec3) -> bool {
    xi.sub(xj).l1_norm().cmp(&rat(4)) == Ordering::Less
}
