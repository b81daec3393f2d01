//! Convex 3-polytopes held in vertex and half-space form at once.
//!
//! Bodies are generic over [`Scalar`]: `Polytope3<Rational>` is the exact
//! track used for every verification path, `Polytope3<f64>` is available
//! for exploratory work and compares through [`DEFAULT_TOLERANCE`].

mod dd;
mod monte_carlo;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, DEFAULT_TOLERANCE};

pub use monte_carlo::{monte_carlo_volume, MonteCarloEstimate};

#[derive(Clone, Debug, PartialEq, PartialOrd, Default)]
pub struct Vec3<S = Rational> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> Vec3<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Vec3 { x, y, z }
    }

    pub fn zero() -> Self {
        Vec3::new(S::zero(), S::zero(), S::zero())
    }

    pub fn from_i64(x: i64, y: i64, z: i64) -> Self {
        Vec3::new(S::from_i64(x), S::from_i64(y), S::from_i64(z))
    }

    pub fn coords(&self) -> [&S; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn add(&self, o: &Self) -> Self {
        Vec3::new(self.x.add_ref(&o.x), self.y.add_ref(&o.y), self.z.add_ref(&o.z))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Vec3::new(self.x.sub_ref(&o.x), self.y.sub_ref(&o.y), self.z.sub_ref(&o.z))
    }

    pub fn scale(&self, k: &S) -> Self {
        Vec3::new(self.x.mul_ref(k), self.y.mul_ref(k), self.z.mul_ref(k))
    }

    pub fn neg(&self) -> Self {
        Vec3::new(-self.x.clone(), -self.y.clone(), -self.z.clone())
    }

    pub fn dot(&self, o: &Self) -> S {
        self.x.mul_ref(&o.x) + self.y.mul_ref(&o.y) + self.z.mul_ref(&o.z)
    }

    pub fn cross(&self, o: &Self) -> Self {
        Vec3::new(
            self.y.mul_ref(&o.z).sub_ref(&self.z.mul_ref(&o.y)),
            self.z.mul_ref(&o.x).sub_ref(&self.x.mul_ref(&o.z)),
            self.x.mul_ref(&o.y).sub_ref(&self.y.mul_ref(&o.x)),
        )
    }

    /// L1 norm |x| + |y| + |z|.
    pub fn l1_norm(&self) -> S {
        self.x.abs_val() + self.y.abs_val() + self.z.abs_val()
    }

    pub fn linf_norm(&self) -> S {
        let mut m = self.x.abs_val();
        for c in [self.y.abs_val(), self.z.abs_val()] {
            if c > m {
                m = c;
            }
        }
        m
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.x.to_f64(), self.y.to_f64(), self.z.to_f64()]
    }

    fn lex_cmp(&self, o: &Self, tol: f64) -> Ordering {
        self.x
            .cmp_tol(&o.x, tol)
            .then_with(|| self.y.cmp_tol(&o.y, tol))
            .then_with(|| self.z.cmp_tol(&o.z, tol))
    }

    fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        self.sub(o).linf_norm().sign(tol) == Ordering::Equal
    }
}

impl Vec3<Rational> {
    pub fn from_ratios(c: [(i64, i64); 3]) -> Self {
        use crate::scalar::ratio;
        Vec3::new(ratio(c[0].0, c[0].1), ratio(c[1].0, c[1].1), ratio(c[2].0, c[2].1))
    }
}

impl Eq for Vec3<Rational> {}

impl Ord for Vec3<Rational> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_cmp(other, 0.0)
    }
}

impl Hash for Vec3<Rational> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.x.hash(state);
        self.y.hash(state);
        self.z.hash(state);
    }
}

impl fmt::Display for Vec3<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::scalar::format_rational as fr;
        write!(f, "({}, {}, {})", fr(&self.x), fr(&self.y), fr(&self.z))
    }
}

/// `{p : normal·p <= offset}`.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct HalfSpace<S = Rational> {
    pub normal: Vec3<S>,
    pub offset: S,
}

impl<S: Scalar> HalfSpace<S> {
    pub fn new(normal: Vec3<S>, offset: S) -> Self {
        HalfSpace { normal, offset }
    }

    /// `offset - normal·p`: nonnegative inside.
    pub fn slack(&self, p: &Vec3<S>) -> S {
        self.offset.sub_ref(&self.normal.dot(p))
    }

    pub fn contains(&self, p: &Vec3<S>, tol: f64) -> bool {
        self.slack(p).sign(tol) != Ordering::Less
    }

    pub fn translated(&self, shift: &Vec3<S>) -> Self {
        HalfSpace::new(self.normal.clone(), self.offset.add_ref(&self.normal.dot(shift)))
    }

    /// Same half-space with the normal scaled to unit max-norm.
    fn canonical(&self) -> Self {
        let m = self.normal.linf_norm();
        HalfSpace::new(
            Vec3::new(
                self.normal.x.div_ref(&m),
                self.normal.y.div_ref(&m),
                self.normal.z.div_ref(&m),
            ),
            self.offset.div_ref(&m),
        )
    }

    fn homogeneous(&self) -> dd::Hom<S> {
        [
            self.normal.x.clone(),
            self.normal.y.clone(),
            self.normal.z.clone(),
            -self.offset.clone(),
        ]
    }

    fn lex_cmp(&self, o: &Self, tol: f64) -> Ordering {
        self.normal
            .lex_cmp(&o.normal, tol)
            .then_with(|| self.offset.cmp_tol(&o.offset, tol))
    }
}

/// A bounded, full-dimensional convex polytope.
///
/// Vertices are minimal and sorted lexicographically; facets are the
/// irredundant supporting half-spaces with max-norm-one normals, sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope3<S = Rational> {
    vertices: Vec<Vec3<S>>,
    facets: Vec<HalfSpace<S>>,
}

/// Outcome of intersecting two bodies.
#[derive(Clone, Debug, PartialEq)]
pub enum Intersection<S = Rational> {
    Body(Polytope3<S>),
    /// Nonempty but flat; `dim` is the affine dimension (0 = single point).
    LowerDimensional { dim: usize, points: Vec<Vec3<S>> },
    Empty,
}

impl<S: Scalar> Intersection<S> {
    pub fn volume(&self) -> S {
        match self {
            Intersection::Body(p) => p.volume(),
            _ => S::zero(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Intersection::Empty)
    }

    pub fn body(&self) -> Option<&Polytope3<S>> {
        match self {
            Intersection::Body(p) => Some(p),
            _ => None,
        }
    }
}

fn dedup_points<S: Scalar>(mut pts: Vec<Vec3<S>>, tol: f64) -> Vec<Vec3<S>> {
    pts.sort_by(|a, b| a.lex_cmp(b, tol));
    let mut out: Vec<Vec3<S>> = Vec::with_capacity(pts.len());
    for p in pts {
        if !out.iter().any(|q| q.approx_eq(&p, tol)) {
            out.push(p);
        }
    }
    out
}

/// Affine dimension of a point set (-1 is reported as 0 for empty input).
pub(crate) fn affine_dimension<S: Scalar>(pts: &[Vec3<S>], tol: f64) -> usize {
    if pts.len() < 2 {
        return 0;
    }
    let base = &pts[0];
    let mut rows: Vec<[S; 3]> = pts[1..]
        .iter()
        .map(|p| {
            let d = p.sub(base);
            [d.x, d.y, d.z]
        })
        .collect();
    let mut rank = 0;
    for col in 0..3 {
        let pivot = (rank..rows.len()).max_by(|&a, &b| {
            rows[a][col]
                .abs_val()
                .partial_cmp(&rows[b][col].abs_val())
                .unwrap_or(Ordering::Equal)
        });
        let Some(pivot) = pivot else { break };
        if rows[pivot][col].sign(tol) == Ordering::Equal {
            continue;
        }
        rows.swap(rank, pivot);
        let pr = rows[rank].clone();
        for r in rows.iter_mut().skip(rank + 1) {
            let f = r[col].div_ref(&pr[col]);
            for c in 0..3 {
                r[c] = r[c].sub_ref(&f.mul_ref(&pr[c]));
            }
        }
        rank += 1;
    }
    rank
}

fn centroid<S: Scalar>(pts: &[Vec3<S>]) -> Vec3<S> {
    let n = S::from_i64(pts.len() as i64);
    let sum = pts.iter().fold(Vec3::zero(), |acc: Vec3<S>, p| acc.add(p));
    Vec3::new(sum.x.div_ref(&n), sum.y.div_ref(&n), sum.z.div_ref(&n))
}

fn det3<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>, c: &Vec3<S>) -> S {
    a.dot(&b.cross(c))
}

enum Enumerated<S> {
    Full(Vec<Vec3<S>>),
    Flat { dim: usize, points: Vec<Vec3<S>> },
}

fn enumerate_vertices<S: Scalar>(facets: &[HalfSpace<S>], tol: f64) -> Result<Enumerated<S>> {
    let mut sorted: Vec<HalfSpace<S>> = Vec::with_capacity(facets.len());
    for h in facets {
        if h.normal.linf_norm().sign(tol) == Ordering::Equal {
            // 0 <= b holds everywhere or nowhere.
            if h.offset.sign(tol) == Ordering::Less {
                return Err(Error::Empty);
            }
            continue;
        }
        sorted.push(h.canonical());
    }
    sorted.sort_by(|a, b| a.lex_cmp(b, tol));
    let rows: Vec<dd::Hom<S>> = sorted.iter().map(HalfSpace::homogeneous).collect();
    match dd::enumerate(&rows, tol) {
        dd::Cone::Empty => Err(Error::Empty),
        dd::Cone::Unbounded => Err(Error::Unbounded),
        dd::Cone::Vertices(ws) => {
            let pts: Vec<Vec3<S>> = ws
                .into_iter()
                .map(|w| {
                    let s = &w[3];
                    Vec3::new(w[0].div_ref(s), w[1].div_ref(s), w[2].div_ref(s))
                })
                .collect();
            let pts = dedup_points(pts, tol);
            let dim = affine_dimension(&pts, tol);
            if dim < 3 {
                Ok(Enumerated::Flat { dim, points: pts })
            } else {
                Ok(Enumerated::Full(pts))
            }
        }
    }
}

impl<S: Scalar> Polytope3<S> {
    pub fn vertices(&self) -> &[Vec3<S>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[HalfSpace<S>] {
        &self.facets
    }

    /// Convex hull of a finite point set.
    pub fn from_vertices(points: &[Vec3<S>]) -> Result<Self> {
        Self::from_vertices_tol(points, DEFAULT_TOLERANCE)
    }

    pub fn from_vertices_tol(points: &[Vec3<S>], tol: f64) -> Result<Self> {
        let pts = dedup_points(points.to_vec(), tol);
        if pts.len() < 4 || affine_dimension(&pts, tol) < 3 {
            return Err(Error::DegenerateInput);
        }
        // Facets of conv(V) are the vertices of the polar {y : (v - c)·y <= 1}.
        let c = centroid(&pts);
        let polar: Vec<HalfSpace<S>> = pts
            .iter()
            .map(|v| HalfSpace::new(v.sub(&c), S::one()))
            .collect();
        let ys = match enumerate_vertices(&polar, tol)? {
            Enumerated::Full(ys) => ys,
            Enumerated::Flat { .. } => return Err(Error::DegenerateInput),
        };
        let facets: Vec<HalfSpace<S>> = ys
            .into_iter()
            .map(|y| {
                let off = S::one().add_ref(&y.dot(&c));
                HalfSpace::new(y, off)
            })
            .collect();
        Ok(Self::assemble(pts, facets, tol))
    }

    /// Intersection of half-spaces; must be bounded and full-dimensional.
    pub fn from_halfspaces(facets: &[HalfSpace<S>]) -> Result<Self> {
        Self::from_halfspaces_tol(facets, DEFAULT_TOLERANCE)
    }

    pub fn from_halfspaces_tol(facets: &[HalfSpace<S>], tol: f64) -> Result<Self> {
        match enumerate_vertices(facets, tol)? {
            Enumerated::Full(pts) => Ok(Self::assemble(pts, facets.to_vec(), tol)),
            Enumerated::Flat { dim, .. } => Err(Error::LowerDimensional { dim }),
        }
    }

    /// Keep the extreme points and the supporting half-spaces that are
    /// tight on a 2-dimensional vertex set.
    fn assemble(points: Vec<Vec3<S>>, candidates: Vec<HalfSpace<S>>, tol: f64) -> Self {
        let mut facets: Vec<HalfSpace<S>> = Vec::new();
        let mut tight_sets: Vec<Vec<usize>> = Vec::new();
        for h in candidates.iter().map(HalfSpace::canonical) {
            let tight: Vec<usize> = (0..points.len())
                .filter(|&i| h.slack(&points[i]).sign(tol) == Ordering::Equal)
                .collect();
            if tight.len() < 3 || tight_sets.contains(&tight) {
                continue;
            }
            let tp: Vec<Vec3<S>> = tight.iter().map(|&i| points[i].clone()).collect();
            if affine_dimension(&tp, tol) == 2 {
                tight_sets.push(tight);
                facets.push(h);
            }
        }
        let vertices: Vec<Vec3<S>> = points
            .into_iter()
            .filter(|p| {
                let normals: Vec<Vec3<S>> = facets
                    .iter()
                    .filter(|h| h.slack(p).sign(tol) == Ordering::Equal)
                    .map(|h| h.normal.clone())
                    .collect();
                // Normals spanning R³ means the point is the unique solution.
                let mut as_points = vec![Vec3::zero()];
                as_points.extend(normals);
                affine_dimension(&as_points, tol) == 3
            })
            .collect();
        facets.sort_by(|a, b| a.lex_cmp(b, tol));
        Polytope3 { vertices, facets }
    }

    pub fn contains_point(&self, p: &Vec3<S>) -> bool {
        self.contains_point_tol(p, DEFAULT_TOLERANCE)
    }

    pub fn contains_point_tol(&self, p: &Vec3<S>, tol: f64) -> bool {
        self.facets.iter().all(|h| h.contains(p, tol))
    }

    /// Interior point (vertex centroid).
    pub fn centroid(&self) -> Vec3<S> {
        centroid(&self.vertices)
    }

    /// Vertices of each facet in cyclic order.
    pub fn facet_cycles(&self) -> Vec<Vec<Vec3<S>>> {
        self.facets
            .iter()
            .map(|h| {
                let on: Vec<Vec3<S>> = self
                    .vertices
                    .iter()
                    .filter(|v| h.slack(v).sign(DEFAULT_TOLERANCE) == Ordering::Equal)
                    .cloned()
                    .collect();
                cyclic_order(on, &h.normal)
            })
            .collect()
    }

    /// Volume by fanning each facet polygon from the vertex centroid.
    pub fn volume(&self) -> S {
        let c = self.centroid();
        let six = S::from_i64(6);
        let mut total = S::zero();
        for cycle in self.facet_cycles() {
            let a = cycle[0].sub(&c);
            for w in cycle[1..].windows(2) {
                let d = det3(&a, &w[0].sub(&c), &w[1].sub(&c));
                total = total + d.abs_val();
            }
        }
        total.div_ref(&six)
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Vec3<S>, Vec3<S>) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for (l, h, c) in [
                (&mut lo.x, &mut hi.x, &v.x),
                (&mut lo.y, &mut hi.y, &v.y),
                (&mut lo.z, &mut hi.z, &v.z),
            ] {
                if c < l {
                    *l = c.clone();
                }
                if c > h {
                    *h = c.clone();
                }
            }
        }
        (lo, hi)
    }

    /// `{scale·p + shift : p ∈ self}`.
    pub fn affine(&self, scale: &S, shift: &Vec3<S>) -> Result<Self> {
        if scale.sign(0.0) != Ordering::Greater {
            return Err(Error::NonPositiveScale);
        }
        let vertices = self.vertices.iter().map(|v| v.scale(scale).add(shift)).collect();
        let facets = self
            .facets
            .iter()
            .map(|h| HalfSpace::new(h.normal.clone(), h.offset.mul_ref(scale).add_ref(&h.normal.dot(shift))))
            .collect();
        Ok(Polytope3 { vertices, facets })
    }

    pub fn translate(&self, shift: &Vec3<S>) -> Self {
        self.affine(&S::one(), shift).expect("unit scale is positive")
    }

    /// True iff every vertex of `inner` satisfies every facet of `self`.
    pub fn contains_polytope(&self, inner: &Polytope3<S>) -> bool {
        inner.vertices.iter().all(|v| self.contains_point(v))
    }

    /// Exact intersection; touching bodies are reported as lower-dimensional.
    pub fn intersect(&self, other: &Polytope3<S>) -> Intersection<S> {
        let mut all = self.facets.clone();
        all.extend(other.facets.iter().cloned());
        intersect_halfspaces(&all).expect("intersection of bounded bodies is bounded")
    }

    /// Minkowski sum with another body.
    pub fn minkowski_sum(&self, other: &Polytope3<S>) -> Self {
        self.minkowski_sum_points(&other.vertices)
    }

    /// Minkowski sum with the convex hull of `points` (which may be a single
    /// point or otherwise flat).
    pub fn minkowski_sum_points(&self, points: &[Vec3<S>]) -> Self {
        let sums: Vec<Vec3<S>> = self
            .vertices
            .iter()
            .flat_map(|a| points.iter().map(move |b| a.add(b)))
            .collect();
        Self::from_vertices(&sums).expect("sum with a full-dimensional body is full-dimensional")
    }

    /// `D(K) = {x - y : x, y ∈ K}`.
    pub fn difference_body(&self) -> Self {
        let neg: Vec<Vec3<S>> = self.vertices.iter().map(Vec3::neg).collect();
        self.minkowski_sum_points(&neg)
    }

    /// Same vertex set (up to tolerance).
    pub fn same_body(&self, other: &Polytope3<S>) -> bool {
        self.vertices.len() == other.vertices.len()
            && self
                .vertices
                .iter()
                .all(|v| other.vertices.iter().any(|w| v.approx_eq(w, DEFAULT_TOLERANCE)))
    }

    pub fn to_f64(&self) -> Polytope3<f64> {
        let cv = |v: &Vec3<S>| Vec3::new(v.x.to_f64(), v.y.to_f64(), v.z.to_f64());
        Polytope3 {
            vertices: self.vertices.iter().map(cv).collect(),
            facets: self
                .facets
                .iter()
                .map(|h| HalfSpace::new(cv(&h.normal), h.offset.to_f64()))
                .collect(),
        }
    }
}

/// Intersection of half-spaces, classifying empty and flat outcomes.
/// Fails only with [`Error::Unbounded`].
pub fn intersect_halfspaces<S: Scalar>(facets: &[HalfSpace<S>]) -> Result<Intersection<S>> {
    match enumerate_vertices(facets, DEFAULT_TOLERANCE) {
        Ok(Enumerated::Full(pts)) => Ok(Intersection::Body(Polytope3::assemble(
            pts,
            facets.to_vec(),
            DEFAULT_TOLERANCE,
        ))),
        Ok(Enumerated::Flat { dim, points }) => Ok(Intersection::LowerDimensional { dim, points }),
        Err(Error::Empty) => Ok(Intersection::Empty),
        Err(e) => Err(e),
    }
}

/// Sort coplanar points counterclockwise around their centroid as seen from
/// the side `normal` points to. Uses exact half-plane and cross-product
/// comparisons, no angles.
fn cyclic_order<S: Scalar>(pts: Vec<Vec3<S>>, normal: &Vec3<S>) -> Vec<Vec3<S>> {
    let drop = {
        let a = [normal.x.abs_val(), normal.y.abs_val(), normal.z.abs_val()];
        let mut k = 0;
        for i in 1..3 {
            if a[i] > a[k] {
                k = i;
            }
        }
        k
    };
    let project = |v: &Vec3<S>| -> (S, S) {
        match drop {
            0 => (v.y.clone(), v.z.clone()),
            1 => (v.z.clone(), v.x.clone()),
            _ => (v.x.clone(), v.y.clone()),
        }
    };
    let c = centroid(&pts);
    let (cu, cv) = project(&c);
    let rel: Vec<(S, S)> = pts
        .iter()
        .map(|p| {
            let (u, v) = project(p);
            (u.sub_ref(&cu), v.sub_ref(&cv))
        })
        .collect();
    let upper = |(u, v): &(S, S)| {
        let sv = v.sign(DEFAULT_TOLERANCE);
        sv == Ordering::Greater || (sv == Ordering::Equal && u.sign(DEFAULT_TOLERANCE) == Ordering::Greater)
    };
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&i, &j| {
        let (a, b) = (&rel[i], &rel[j]);
        match (upper(a), upper(b)) {
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => {
                let cross = a.0.mul_ref(&b.1).sub_ref(&a.1.mul_ref(&b.0));
                cross.sign(DEFAULT_TOLERANCE).reverse()
            }
        }
    });
    idx.into_iter().map(|i| pts[i].clone()).collect()
}
