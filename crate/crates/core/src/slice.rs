//! Horizontal cross-sections of translated octahedra.
//!
//! The slice of `C₃ + (x, y, z)` by the plane at height `z0` is the L1 disk
//! `{|X - x| + |Y - y| <= t}` with `t = 2 - |z0 - z|`. In the rotated frame
//! `u = X + Y`, `v = X - Y` it is the axis-aligned square `[u - t, u + t] ×
//! [v - t, v + t]`. Side lengths carry a factor √2, so every threshold is
//! stated on `t` instead.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::octahedron::{TranslateSet, RADIUS};
use crate::polytope::Vec3;
use crate::scalar::{rat, ratio, Rational};

/// Slices with `t <= 1/27` are too small for the overlap estimates.
pub fn t_min() -> Rational {
    ratio(1, 27)
}

/// Slices with `t >= 53/27` are too large for the overlap estimates.
pub fn t_max() -> Rational {
    ratio(53, 27)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceSquare {
    #[serde(serialize_with = "crate::io::ser_pair")]
    pub center_xy: (Rational, Rational),
    /// L1 radius; half-side in the rotated frame.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub t: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub z0: Rational,
    pub source: usize,
    /// +1 while the slice grows with `z0` (at or below the equator), else -1.
    pub delta: i8,
}

impl SliceSquare {
    /// `side_length² = 2t²`.
    pub fn side_length_squared(&self) -> Rational {
        rat(2) * &self.t * &self.t
    }

    /// Area of the L1 disk, `2t²`.
    pub fn area(&self) -> Rational {
        self.side_length_squared()
    }

    pub fn rotated_center(&self) -> (Rational, Rational) {
        let (x, y) = &self.center_xy;
        (x + y, x - y)
    }

    pub fn u_interval(&self) -> (Rational, Rational) {
        let (u, _) = self.rotated_center();
        (&u - &self.t, &u + &self.t)
    }

    pub fn v_interval(&self) -> (Rational, Rational) {
        let (_, v) = self.rotated_center();
        (&v - &self.t, &v + &self.t)
    }

    /// Whether both the side length lies in `[√2/27, 53√2/27]`.
    pub fn in_window(&self) -> bool {
        self.t >= t_min() && self.t <= t_max()
    }

    /// Exact L1-disk membership of a point `(x, y)` at this height.
    pub fn contains_xy(&self, x: &Rational, y: &Rational) -> bool {
        (x - &self.center_xy.0).abs() + (y - &self.center_xy.1).abs() <= self.t
    }
}

/// The slice of `C₃ + translate` at height `z0`, or `None` when the plane
/// misses the body. A plane through an apex gives `t = 0`.
pub fn slice(translate: &Vec3, z0: &Rational, source: usize) -> Option<SliceSquare> {
    let offset = z0 - &translate.z;
    let t = rat(RADIUS) - offset.abs();
    if t.is_negative() {
        return None;
    }
    Some(SliceSquare {
        center_xy: (translate.x.clone(), translate.y.clone()),
        t,
        z0: z0.clone(),
        source,
        delta: if offset.is_positive() { -1 } else { 1 },
    })
}

/// `δ(a)·δ(b)`.
pub fn delta_product(a: &SliceSquare, b: &SliceSquare) -> Result<i8> {
    if a.z0 != b.z0 {
        return Err(Error::HeightMismatch);
    }
    Ok(a.delta * b.delta)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightWindow {
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub lo: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub hi: Rational,
}

impl HeightWindow {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "window bounds out of order");
        HeightWindow { lo, hi }
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, z: &Rational) -> bool {
        &self.lo <= z && z <= &self.hi
    }
}

/// Heights where the slice exists but `t <= 1/27` or `t >= 53/27`:
/// the two ends of the existence interval and a band around the equator.
pub fn bad_height_set(translate: &Vec3) -> Vec<HeightWindow> {
    let z = &translate.z;
    let two = rat(RADIUS);
    let e = t_min();
    vec![
        HeightWindow::new(z - &two, z - &two + &e),
        HeightWindow::new(z - &e, z + &e),
        HeightWindow::new(z + &two - &e, z + &two),
    ]
}

/// A height in the open anchor window `(z_a - 2, z_a + 2)` where every
/// slice that exists has `t` strictly inside `(1/27, 53/27)`. The anchor is
/// the last entry. Returns the midpoint of the lowest feasible interval.
pub fn find_good_height(neighbors: &TranslateSet) -> Result<Rational> {
    let anchor = neighbors
        .as_slice()
        .last()
        .ok_or_else(|| Error::InvalidParameter("neighbor set is empty".into()))?;
    let lo = &anchor.z - rat(RADIUS);
    let hi = &anchor.z + rat(RADIUS);
    let mut bad: Vec<HeightWindow> = neighbors
        .iter()
        .flat_map(bad_height_set)
        .filter(|w| w.hi > lo && w.lo < hi)
        .collect();
    bad.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));

    let mut cursor = lo;
    for w in &bad {
        if w.lo > cursor {
            return Ok((&cursor + &w.lo) / rat(2));
        }
        if w.hi > cursor {
            cursor = w.hi.clone();
        }
    }
    match cursor.cmp(&hi) {
        Ordering::Less => Ok((cursor + hi) / rat(2)),
        _ => Err(Error::NoFeasibleHeight),
    }
}

/// `∫ 2t(z)² dz` over the existence interval, integrated piecewise.
pub fn slice_area_integral(translate: &Vec3) -> Rational {
    let z = &translate.z;
    let two = rat(RADIUS);
    let area = |h: &Rational| -> Rational {
        slice(translate, h, 0).map(|s| s.area()).unwrap_or_else(Rational::zero)
    };
    let pieces = [(z - &two, z.clone()), (z.clone(), z + &two)];
    pieces
        .iter()
        .map(|(a, b)| simpson(a, b, area))
        .sum()
}

/// Simpson's rule; exact for polynomials of degree at most 3.
pub(crate) fn simpson(a: &Rational, b: &Rational, f: impl Fn(&Rational) -> Rational) -> Rational {
    let mid = (a + b) / rat(2);
    (b - a) * (f(a) + rat(4) * f(&mid) + f(b)) / rat(6)
}
