//! Fourier–Motzkin elimination for strict systems `a·p < b` in three
//! variables. A strict system is feasible iff its solution set is a
//! nonempty open set, which is what the union test needs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::scalar::{rat, Rational};

/// `[a0, a1, a2, b]` encodes `a0·p0 + a1·p1 + a2·p2 < b`.
pub(crate) type Row<T> = [T; 4];

pub(crate) trait FmInt: Clone + Ord + Integer + Signed {
    fn mul_c(&self, o: &Self) -> Option<Self>;
    fn add_c(&self, o: &Self) -> Option<Self>;
}

impl FmInt for i128 {
    fn mul_c(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn add_c(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
}

impl FmInt for BigInt {
    fn mul_c(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn add_c(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
}

/// Divide a row by the gcd of its entries.
fn reduce<T: FmInt>(mut r: Row<T>) -> Row<T> {
    let g = r.iter().fold(T::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in r.iter_mut() {
            *x = x.div_floor(&g);
        }
    }
    r
}

/// Keep one row per direction of `a`, the tightest.
fn dedup<T: FmInt>(rows: Vec<Row<T>>) -> Option<Vec<Row<T>>> {
    let mut out: Vec<Row<T>> = Vec::with_capacity(rows.len());
    'next: for r in rows {
        let g = r[..3].iter().fold(T::zero(), |g, x| g.gcd(x));
        for kept in out.iter_mut() {
            let gk = kept[..3].iter().fold(T::zero(), |g, x| g.gcd(x));
            let mut same = true;
            for i in 0..3 {
                if r[i].mul_c(&gk)? != kept[i].mul_c(&g)? {
                    same = false;
                    break;
                }
            }
            if same {
                // b/g vs b_kept/g_kept, both gcds positive.
                if r[3].mul_c(&gk)? < kept[3].mul_c(&g)? {
                    *kept = r;
                }
                continue 'next;
            }
        }
        out.push(r);
    }
    Some(out)
}

/// Eliminate variable `var`. Returns `None` on overflow and `Some(None)`
/// when a constant row `0 < b` with `b <= 0` proves infeasibility.
fn eliminate<T: FmInt>(rows: &[Row<T>], var: usize) -> Option<Option<Vec<Row<T>>>> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for r in rows {
        match r[var].signum() {
            s if s.is_positive() => pos.push(r),
            s if s.is_negative() => neg.push(r),
            _ => out.push(r.clone()),
        }
    }
    for p in &pos {
        for n in &neg {
            let cp = -n[var].clone();
            let cn = p[var].clone();
            let mut row: Row<T> = [T::zero(), T::zero(), T::zero(), T::zero()];
            for i in 0..4 {
                row[i] = p[i].mul_c(&cp)?.add_c(&n[i].mul_c(&cn)?)?;
            }
            out.push(reduce(row));
        }
    }
    let mut kept = Vec::with_capacity(out.len());
    for r in out {
        if r[..3].iter().all(Zero::is_zero) {
            if !r[3].is_positive() {
                return Some(None);
            }
        } else {
            kept.push(r);
        }
    }
    Some(Some(dedup(kept)?))
}

/// Feasibility of a strict system; `None` if the arithmetic overflowed.
pub(crate) fn feasible<T: FmInt>(rows: &[Row<T>]) -> Option<bool> {
    let mut cur: Vec<Row<T>> = Vec::with_capacity(rows.len());
    for r in rows {
        if r[..3].iter().all(Zero::is_zero) {
            if !r[3].is_positive() {
                return Some(false);
            }
        } else {
            cur.push(reduce(r.clone()));
        }
    }
    let mut cur = dedup(cur)?;
    for var in (0..3).rev() {
        match eliminate(&cur, var)? {
            None => return Some(false),
            Some(next) => cur = next,
        }
    }
    Some(true)
}

/// Feasibility, retrying with big integers when `i128` overflows.
pub(crate) fn feasible_exact(rows: &[Row<i128>]) -> bool {
    if let Some(ans) = feasible(rows) {
        return ans;
    }
    let big: Vec<Row<BigInt>> = rows.iter().map(|r| r.map(BigInt::from)).collect();
    feasible(&big).expect("big integers do not overflow")
}

/// A point strictly satisfying every row, or `None` if there is none.
pub(crate) fn interior_point(rows: &[Row<i128>]) -> Option<[Rational; 3]> {
    let big: Vec<Row<BigInt>> = rows.iter().map(|r| reduce(r.map(BigInt::from))).collect();
    // stages[k] involves only variables < k.
    let mut stages: Vec<Vec<Row<BigInt>>> = vec![Vec::new(); 4];
    stages[3] = big;
    for var in (0..3).rev() {
        stages[var] = eliminate(&stages[var + 1], var).expect("big integers do not overflow")?;
    }
    let mut point: [Rational; 3] = [rat(0), rat(0), rat(0)];
    for var in 0..3 {
        let mut lower: Option<Rational> = None;
        let mut upper: Option<Rational> = None;
        for r in &stages[var + 1] {
            let a = Rational::from_integer(r[var].clone());
            let mut rest = Rational::from_integer(r[3].clone());
            for (k, value) in point.iter().enumerate().take(var) {
                rest -= Rational::from_integer(r[k].clone()) * value;
            }
            if a.is_zero() {
                if !rest.is_positive() {
                    return None;
                }
                continue;
            }
            let bound = rest / &a;
            if a.is_positive() {
                if upper.as_ref().is_none_or(|u| bound < *u) {
                    upper = Some(bound);
                }
            } else if lower.as_ref().is_none_or(|l| bound > *l) {
                lower = Some(bound);
            }
        }
        point[var] = match (lower, upper) {
            (Some(l), Some(u)) if l < u => (l + u) / rat(2),
            (Some(_), Some(_)) => return None,
            (Some(l), None) => l + rat(1),
            (None, Some(u)) => u - rat(1),
            (None, None) => rat(0),
        };
    }
    Some(point)
}
