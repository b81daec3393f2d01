//! Integer grid over a region with per-cell containment counts.
//!
//! Everything is scaled by a common denominator `D` so that cell centres,
//! translates and facet offsets are integers. A cell (a cube of L∞ radius
//! `h` around its centre) is covered outright when it lies inside one
//! translate; otherwise the union test below decides exactly whether the
//! translates meeting it cover its part of the region.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::fm::{feasible_exact, interior_point, Row};
use crate::error::{Error, Result};
use crate::polytope::{HalfSpace, Polytope3, Vec3};
use crate::scalar::Rational;

/// Scaled coordinates must stay below this so that facet evaluations fit
/// comfortably in `i64`.
const COORD_LIMIT: i64 = 1 << 40;
const NORMAL_LIMIT: i64 = 1 << 20;
const MAX_CELLS: usize = 1 << 28;

const OUTSIDE: u8 = 0;
const INSIDE: u8 = 1;
const BOUNDARY: u8 = 2;

#[derive(Clone, Debug)]
struct IntFacet {
    n: [i64; 3],
    b: i64,
    l1: i64,
}

/// A facet with a primitive integer normal and rational offset.
fn integer_facet(h: &HalfSpace) -> ([BigInt; 3], Rational) {
    let lcm = h
        .normal
        .coords()
        .iter()
        .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let scaled: Vec<BigInt> = h
        .normal
        .coords()
        .iter()
        .map(|c| (*c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = scaled.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let k = Rational::new(lcm, g.clone());
    let n = [&scaled[0] / &g, &scaled[1] / &g, &scaled[2] / &g];
    (n, &h.offset * k)
}

fn to_i64(x: &BigInt, limit: i64) -> Result<i64> {
    x.to_i64().filter(|v| v.abs() <= limit).ok_or(Error::ScaleOverflow)
}

fn scaled(x: &Rational, d: &BigInt) -> Result<i64> {
    let v = x * Rational::from_integer(d.clone());
    debug_assert!(v.is_integer());
    to_i64(&v.to_integer(), COORD_LIMIT)
}

fn facets_to_int(facets: &[([BigInt; 3], Rational)], d: &BigInt) -> Result<Vec<IntFacet>> {
    facets
        .iter()
        .map(|(n, b)| {
            let n = [
                to_i64(&n[0], NORMAL_LIMIT)?,
                to_i64(&n[1], NORMAL_LIMIT)?,
                to_i64(&n[2], NORMAL_LIMIT)?,
            ];
            Ok(IntFacet {
                l1: n.iter().map(|c| c.abs()).sum(),
                n,
                b: scaled(b, d)?,
            })
        })
        .collect()
}

/// `⌈a / b⌉` for `b > 0`.
fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

fn dot(n: &[i64; 3], p: &[i64; 3]) -> i64 {
    n[0] * p[0] + n[1] * p[1] + n[2] * p[2]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rel {
    Inside,
    Partial,
    Disjoint,
}

pub(crate) struct Engine {
    d: BigInt,
    h: i64,
    origin: [i64; 3],
    dims: [usize; 3],
    region: Vec<IntFacet>,
    body: Vec<IntFacet>,
    ext_lo: [i64; 3],
    ext_hi: [i64; 3],
    state: Vec<u8>,
    counts: Vec<u32>,
    translates: Vec<Option<[i64; 3]>>,
    buckets: HashMap<[i64; 3], Vec<usize>>,
    bucket: i64,
}

/// Outcome of a full scan.
pub(crate) struct Scan {
    pub cells: usize,
    pub margin_cells: usize,
    pub gap_cells: usize,
    pub witnesses: Vec<Vec3>,
}

impl Engine {
    /// `extra` lists denominators the grid must also represent exactly
    /// (for example a move quantum).
    pub fn new(
        body: &Polytope3,
        translates: &[Vec3],
        region: &Polytope3,
        h: &Rational,
        extra: &[BigInt],
    ) -> Result<Self> {
        if !h.is_positive() {
            return Err(Error::NonPositiveStep);
        }
        let body_f: Vec<_> = body.facets().iter().map(integer_facet).collect();
        let region_f: Vec<_> = region.facets().iter().map(integer_facet).collect();

        let mut d = h.denom().clone();
        let mut absorb = |r: &Rational| d = d.lcm(r.denom());
        translates.iter().for_each(|t| t.coords().iter().for_each(|c| absorb(c)));
        region.vertices().iter().for_each(|v| v.coords().iter().for_each(|c| absorb(c)));
        body.vertices().iter().for_each(|v| v.coords().iter().for_each(|c| absorb(c)));
        body_f.iter().chain(&region_f).for_each(|(_, b)| absorb(b));
        for e in extra {
            d = d.lcm(e);
        }

        let (lo, hi) = region.bounding_box();
        let (blo, bhi) = body.bounding_box();
        let hs = scaled(h, &d)?;
        let origin = [scaled(&lo.x, &d)?, scaled(&lo.y, &d)?, scaled(&lo.z, &d)?];
        let top = [scaled(&hi.x, &d)?, scaled(&hi.y, &d)?, scaled(&hi.z, &d)?];
        let mut dims = [0usize; 3];
        for k in 0..3 {
            dims[k] = (ceil_div(top[k] - origin[k], 2 * hs)).max(1) as usize;
        }
        let total = dims[0]
            .checked_mul(dims[1])
            .and_then(|x| x.checked_mul(dims[2]))
            .filter(|&n| n <= MAX_CELLS)
            .ok_or_else(|| Error::InvalidParameter("grid step too fine for this region".into()))?;
        let ext_lo = [scaled(&blo.x, &d)?, scaled(&blo.y, &d)?, scaled(&blo.z, &d)?];
        let ext_hi = [scaled(&bhi.x, &d)?, scaled(&bhi.y, &d)?, scaled(&bhi.z, &d)?];
        let bucket = (0..3).map(|k| ext_hi[k] - ext_lo[k]).max().unwrap() + 2 * hs;

        let mut engine = Engine {
            h: hs,
            origin,
            dims,
            region: facets_to_int(&region_f, &d)?,
            body: facets_to_int(&body_f, &d)?,
            d,
            ext_lo,
            ext_hi,
            state: Vec::new(),
            counts: vec![0; total],
            translates: Vec::new(),
            buckets: HashMap::new(),
            bucket,
        };
        engine.state = (0..total)
            .into_par_iter()
            .map(|idx| engine.region_state(idx))
            .collect();
        for t in translates {
            let p = engine.to_grid(t)?;
            engine.insert(p);
        }
        Ok(engine)
    }

    pub fn scale(&self) -> &BigInt {
        &self.d
    }

    pub fn to_grid(&self, p: &Vec3) -> Result<[i64; 3]> {
        Ok([scaled(&p.x, &self.d)?, scaled(&p.y, &self.d)?, scaled(&p.z, &self.d)?])
    }

    pub fn grid_point(&self, p: &[i64; 3]) -> Vec3 {
        let c = |v: i64| Rational::new(BigInt::from(v), self.d.clone());
        Vec3::new(c(p[0]), c(p[1]), c(p[2]))
    }

    pub fn translate(&self, i: usize) -> Option<[i64; 3]> {
        self.translates[i]
    }

    pub fn translate_count(&self) -> usize {
        self.translates.len()
    }

    fn center(&self, idx: usize) -> [i64; 3] {
        let i = idx % self.dims[0];
        let j = (idx / self.dims[0]) % self.dims[1];
        let k = idx / (self.dims[0] * self.dims[1]);
        [
            self.origin[0] + self.h * (2 * i as i64 + 1),
            self.origin[1] + self.h * (2 * j as i64 + 1),
            self.origin[2] + self.h * (2 * k as i64 + 1),
        ]
    }

    fn box_rows(&self, c: &[i64; 3]) -> Vec<Row<i128>> {
        let mut rows = Vec::with_capacity(12);
        for k in 0..3 {
            let mut e = [0i128; 4];
            e[k] = 1;
            e[3] = (c[k] + self.h) as i128;
            rows.push(e);
            let mut e = [0i128; 4];
            e[k] = -1;
            e[3] = -((c[k] - self.h) as i128);
            rows.push(e);
        }
        rows
    }

    /// Region facets that cut the cell, as strict rows.
    fn region_rows(&self, c: &[i64; 3], rows: &mut Vec<Row<i128>>) {
        for f in &self.region {
            if dot(&f.n, c) + self.h * f.l1 > f.b {
                rows.push([f.n[0] as i128, f.n[1] as i128, f.n[2] as i128, f.b as i128]);
            }
        }
    }

    fn region_state(&self, idx: usize) -> u8 {
        let c = self.center(idx);
        let mut inside = true;
        for f in &self.region {
            let s = dot(&f.n, &c);
            if s - self.h * f.l1 >= f.b {
                return OUTSIDE;
            }
            if s + self.h * f.l1 > f.b {
                inside = false;
            }
        }
        if inside {
            return INSIDE;
        }
        let mut rows = self.box_rows(&c);
        self.region_rows(&c, &mut rows);
        if feasible_exact(&rows) {
            BOUNDARY
        } else {
            OUTSIDE
        }
    }

    fn relation(&self, c: &[i64; 3], x: &[i64; 3]) -> Rel {
        for k in 0..3 {
            if c[k] + self.h <= x[k] + self.ext_lo[k] || c[k] - self.h >= x[k] + self.ext_hi[k] {
                return Rel::Disjoint;
            }
        }
        let rel = [c[0] - x[0], c[1] - x[1], c[2] - x[2]];
        let mut inside = true;
        for f in &self.body {
            let s = dot(&f.n, &rel);
            if s - self.h * f.l1 >= f.b {
                return Rel::Disjoint;
            }
            if s + self.h * f.l1 > f.b {
                inside = false;
            }
        }
        if inside {
            Rel::Inside
        } else {
            Rel::Partial
        }
    }

    fn bucket_key(&self, p: &[i64; 3]) -> [i64; 3] {
        [
            p[0].div_euclid(self.bucket),
            p[1].div_euclid(self.bucket),
            p[2].div_euclid(self.bucket),
        ]
    }

    /// Indices of live translates whose bounding boxes may meet the cell.
    fn nearby(&self, c: &[i64; 3]) -> Vec<usize> {
        let lo = self.bucket_key(&[
            c[0] - self.h - self.ext_hi[0],
            c[1] - self.h - self.ext_hi[1],
            c[2] - self.h - self.ext_hi[2],
        ]);
        let hi = self.bucket_key(&[
            c[0] + self.h - self.ext_lo[0],
            c[1] + self.h - self.ext_lo[1],
            c[2] + self.h - self.ext_lo[2],
        ]);
        let mut out = Vec::new();
        for a in lo[0]..=hi[0] {
            for b in lo[1]..=hi[1] {
                for e in lo[2]..=hi[2] {
                    if let Some(v) = self.buckets.get(&[a, b, e]) {
                        out.extend_from_slice(v);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Cell indices whose cubes may meet the body placed at `x`.
    fn cells_near(&self, x: &[i64; 3]) -> impl Iterator<Item = usize> + '_ {
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        let mut empty = false;
        for k in 0..3 {
            let a = x[k] + self.ext_lo[k] - self.origin[k];
            let b = x[k] + self.ext_hi[k] - self.origin[k];
            let kmin = a.div_euclid(2 * self.h).max(0);
            let kmax = (ceil_div(b, 2 * self.h) - 1).min(self.dims[k] as i64 - 1);
            if kmin > kmax {
                empty = true;
            }
            lo[k] = kmin.max(0) as usize;
            hi[k] = kmax.max(0) as usize;
        }
        let (d0, d1) = (self.dims[0], self.dims[1]);
        let ranges = if empty { None } else { Some((lo, hi)) };
        ranges.into_iter().flat_map(move |(lo, hi)| {
            (lo[2]..=hi[2]).flat_map(move |k| {
                (lo[1]..=hi[1]).flat_map(move |j| (lo[0]..=hi[0]).map(move |i| i + d0 * (j + d1 * k)))
            })
        })
    }

    fn insert(&mut self, p: [i64; 3]) -> usize {
        let i = self.translates.len();
        self.translates.push(None);
        self.place(i, p);
        i
    }

    fn place(&mut self, i: usize, p: [i64; 3]) {
        self.translates[i] = Some(p);
        let key = self.bucket_key(&p);
        self.buckets.entry(key).or_default().push(i);
        let cells: Vec<usize> = self
            .cells_near(&p)
            .filter(|&idx| self.state[idx] != OUTSIDE && self.relation(&self.center(idx), &p) == Rel::Inside)
            .collect();
        for idx in cells {
            self.counts[idx] += 1;
        }
    }

    /// Remove translate `i`; returns the cells that may have lost coverage,
    /// those that dropped to zero containing translates first.
    fn lift(&mut self, i: usize) -> Vec<usize> {
        let p = self.translates[i].take().expect("translate is live");
        let key = self.bucket_key(&p);
        if let Some(v) = self.buckets.get_mut(&key) {
            v.retain(|&j| j != i);
        }
        let mut dropped = Vec::new();
        let mut touched = Vec::new();
        let cells: Vec<(usize, Rel)> = self
            .cells_near(&p)
            .filter(|&idx| self.state[idx] != OUTSIDE)
            .map(|idx| (idx, self.relation(&self.center(idx), &p)))
            .collect();
        for (idx, rel) in cells {
            match rel {
                Rel::Inside => {
                    self.counts[idx] -= 1;
                    if self.counts[idx] == 0 {
                        dropped.push(idx);
                    }
                }
                Rel::Partial => touched.push(idx),
                Rel::Disjoint => {}
            }
        }
        dropped.extend(touched);
        dropped
    }

    /// Move (or with `None`, delete) translate `i`. The configuration is
    /// kept only if it still covers the region; returns whether it was.
    pub fn try_set(&mut self, i: usize, new: Option<[i64; 3]>) -> bool {
        let old = self.translates[i].expect("translate is live");
        let suspects = self.lift(i);
        if let Some(p) = new {
            self.place(i, p);
        }
        let ok = suspects
            .iter()
            .all(|&idx| self.counts[idx] > 0 || self.cell_gap(idx).is_none());
        if !ok {
            if new.is_some() {
                self.lift(i);
            }
            self.place(i, old);
        }
        ok
    }

    /// Strict rows of a gap inside cell `idx`, or `None` when the
    /// translates cover the cell's part of the region.
    fn cell_gap(&self, idx: usize) -> Option<Vec<Row<i128>>> {
        let c = self.center(idx);
        let mut parts: Vec<Vec<Row<i128>>> = Vec::new();
        for i in self.nearby(&c) {
            let x = self.translates[i].expect("bucketed translates are live");
            match self.relation(&c, &x) {
                Rel::Inside => return None,
                Rel::Disjoint => {}
                Rel::Partial => {
                    let rel = [c[0] - x[0], c[1] - x[1], c[2] - x[2]];
                    let mut rows = Vec::new();
                    for f in &self.body {
                        if dot(&f.n, &rel) + self.h * f.l1 > f.b {
                            // Outside this facet: n·p > b + n·x.
                            rows.push([
                                -(f.n[0] as i128),
                                -(f.n[1] as i128),
                                -(f.n[2] as i128),
                                -((f.b + dot(&f.n, &x)) as i128),
                            ]);
                        }
                    }
                    parts.push(rows);
                }
            }
        }
        parts.sort_by_key(Vec::len);
        let mut rows = self.box_rows(&c);
        if self.state[idx] == BOUNDARY {
            self.region_rows(&c, &mut rows);
        }
        if search_gap(&mut rows, &parts, 0) {
            Some(rows)
        } else {
            None
        }
    }

    /// Check every region cell.
    pub fn scan(&self, max_witnesses: usize) -> Scan {
        let live: Vec<usize> = (0..self.state.len()).filter(|&i| self.state[i] != OUTSIDE).collect();
        let margin_cells = live.iter().filter(|&&i| self.counts[i] > 0).count();
        let gaps: Vec<(usize, Option<Vec<Row<i128>>>)> = live
            .par_iter()
            .filter(|&&i| self.counts[i] == 0)
            .filter_map(|&i| self.cell_gap(i).map(|rows| (i, Some(rows))))
            .collect();
        let witnesses = gaps
            .iter()
            .take(max_witnesses)
            .filter_map(|(_, rows)| rows.as_ref().and_then(|r| interior_point(r)))
            .map(|p| {
                let d = Rational::from_integer(self.d.clone());
                Vec3::new(&p[0] / &d, &p[1] / &d, &p[2] / &d)
            })
            .collect();
        Scan {
            cells: live.len(),
            margin_cells,
            gap_cells: gaps.len(),
            witnesses,
        }
    }

    /// True iff every region cell is covered; stops at the first gap.
    pub fn covers(&self) -> bool {
        (0..self.state.len())
            .into_par_iter()
            .filter(|&i| self.state[i] != OUTSIDE && self.counts[i] == 0)
            .all(|i| self.cell_gap(i).is_none())
    }
}

fn opposes(a: &Row<i128>, b: &Row<i128>) -> bool {
    a[0] == -b[0] && a[1] == -b[1] && a[2] == -b[2] && a[3] + b[3] <= 0
}

/// Depth-first choice of one violated facet per partially meeting
/// translate; a feasible full choice is an open uncovered set.
fn search_gap(rows: &mut Vec<Row<i128>>, parts: &[Vec<Row<i128>>], level: usize) -> bool {
    if level == parts.len() {
        return feasible_exact(rows);
    }
    for r in &parts[level] {
        if rows.iter().any(|q| opposes(q, r)) {
            continue;
        }
        rows.push(*r);
        let alive = level + 1 == parts.len() || feasible_exact(rows);
        if alive && search_gap(rows, parts, level + 1) {
            return true;
        }
        rows.pop();
    }
    false
}
