//! Double-description vertex enumeration in homogeneous coordinates.
//!
//! A polyhedron `{p : n_k·p <= b_k}` is lifted to the cone
//! `{(p, s) : n_k·p - b_k s <= 0, s >= 0}` in R⁴. The cone is built by
//! adding one constraint at a time to an initial full space (held as a
//! lineality basis). Extreme rays with `s > 0` are the vertices.

use std::cmp::Ordering;

use crate::scalar::Scalar;

pub(crate) type Hom<S> = [S; 4];

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }
    fn first_n(n: usize, len: usize) -> Self {
        let mut b = Bits::new(len);
        for i in 0..n {
            b.insert(i);
        }
        b
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn is_superset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray<S> {
    w: Hom<S>,
    zeros: Bits,
}

#[derive(Debug)]
pub(crate) enum Cone<S> {
    /// Bounded and nonempty: the vertex list (possibly a single point).
    Vertices(Vec<Hom<S>>),
    Empty,
    Unbounded,
}

fn dot<S: Scalar>(a: &Hom<S>, b: &Hom<S>) -> S {
    a[0].mul_ref(&b[0]) + a[1].mul_ref(&b[1]) + a[2].mul_ref(&b[2]) + a[3].mul_ref(&b[3])
}

fn axpy<S: Scalar>(w: &Hom<S>, c: &S, l: &Hom<S>) -> Hom<S> {
    [
        w[0].sub_ref(&c.mul_ref(&l[0])),
        w[1].sub_ref(&c.mul_ref(&l[1])),
        w[2].sub_ref(&c.mul_ref(&l[2])),
        w[3].sub_ref(&c.mul_ref(&l[3])),
    ]
}

fn normalized<S: Scalar>(mut w: Hom<S>) -> Hom<S> {
    S::normalize_homogeneous(&mut w);
    w
}

/// Enumerate the extreme rays of `{w : row·w <= 0 for all rows}` intersected
/// with `s >= 0`, and classify the underlying polyhedron.
///
/// Rows are processed in the order given; callers sort them for
/// reproducibility.
pub(crate) fn enumerate<S: Scalar>(rows: &[Hom<S>], tol: f64) -> Cone<S> {
    let mut all_rows: Vec<Hom<S>> = Vec::with_capacity(rows.len() + 1);
    all_rows.push([S::zero(), S::zero(), S::zero(), -S::one()]);
    all_rows.extend(rows.iter().cloned().map(normalized));
    let n = all_rows.len();

    let mut lineality: Vec<Hom<S>> = (0..4)
        .map(|i| {
            let mut e = [S::zero(), S::zero(), S::zero(), S::zero()];
            e[i] = S::one();
            e
        })
        .collect();
    let mut rays: Vec<Ray<S>> = Vec::new();

    for (k, row) in all_rows.iter().enumerate() {
        if let Some(pos) = lineality
            .iter()
            .position(|l| dot(row, l).sign(tol) != Ordering::Equal)
        {
            let l = lineality.remove(pos);
            let rl = dot(row, &l);
            for other in lineality.iter_mut() {
                let c = dot(row, other).div_ref(&rl);
                *other = normalized(axpy(other, &c, &l));
            }
            for ray in rays.iter_mut() {
                let c = dot(row, &ray.w).div_ref(&rl);
                ray.w = normalized(axpy(&ray.w, &c, &l));
                ray.zeros.insert(k);
            }
            let dir = if rl.sign(tol) == Ordering::Less {
                l
            } else {
                [-l[0].clone(), -l[1].clone(), -l[2].clone(), -l[3].clone()]
            };
            rays.push(Ray {
                w: normalized(dir),
                zeros: Bits::first_n(k, n),
            });
            continue;
        }

        let vals: Vec<S> = rays.iter().map(|r| dot(row, &r.w)).collect();
        let signs: Vec<Ordering> = vals.iter().map(|v| v.sign(tol)).collect();
        let positive: Vec<usize> = (0..rays.len()).filter(|&i| signs[i] == Ordering::Greater).collect();
        if positive.is_empty() {
            for (ray, s) in rays.iter_mut().zip(&signs) {
                if *s == Ordering::Equal {
                    ray.zeros.insert(k);
                }
            }
            continue;
        }
        let negative: Vec<usize> = (0..rays.len()).filter(|&i| signs[i] == Ordering::Less).collect();
        let pointed_dim = 4 - lineality.len();
        let mut fresh: Vec<Ray<S>> = Vec::new();
        for &p in &positive {
            for &q in &negative {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if pointed_dim >= 2 && common.count() < pointed_dim - 2 {
                    continue;
                }
                let blocked = rays.iter().enumerate().any(|(j, r)| {
                    j != p && j != q && r.zeros.is_superset_of(&common)
                });
                if blocked {
                    continue;
                }
                // vals[p] > 0 > vals[q]: vals[p]·w_q - vals[q]·w_p has row·w = 0.
                let a = &vals[p];
                let b = &vals[q];
                let w = [
                    a.mul_ref(&rays[q].w[0]).sub_ref(&b.mul_ref(&rays[p].w[0])),
                    a.mul_ref(&rays[q].w[1]).sub_ref(&b.mul_ref(&rays[p].w[1])),
                    a.mul_ref(&rays[q].w[2]).sub_ref(&b.mul_ref(&rays[p].w[2])),
                    a.mul_ref(&rays[q].w[3]).sub_ref(&b.mul_ref(&rays[p].w[3])),
                ];
                let mut zeros = common;
                zeros.insert(k);
                fresh.push(Ray {
                    w: normalized(w),
                    zeros,
                });
            }
        }
        let mut kept: Vec<Ray<S>> = Vec::with_capacity(rays.len() + fresh.len());
        for (ray, s) in rays.into_iter().zip(signs) {
            match s {
                Ordering::Greater => {}
                Ordering::Equal => {
                    let mut ray = ray;
                    ray.zeros.insert(k);
                    kept.push(ray);
                }
                Ordering::Less => kept.push(ray),
            }
        }
        kept.extend(fresh);
        rays = kept;
    }

    let vertices: Vec<Hom<S>> = rays
        .iter()
        .filter(|r| r.w[3].sign(tol) == Ordering::Greater)
        .map(|r| r.w.clone())
        .collect();
    if vertices.is_empty() {
        return Cone::Empty;
    }
    if !lineality.is_empty() || rays.iter().any(|r| r.w[3].sign(tol) != Ordering::Greater) {
        return Cone::Unbounded;
    }
    Cone::Vertices(vertices)
}
