mod common;

use octacover::octahedron::octahedron_at;
use octacover::overlap::{
    bodies_overlap, classify, config_lower_bound, exact_pair_volume, pair_bound_floor, slice_intersection_area,
    Certificate, Distances, OverlapKind,
};
use octacover::scalar::{rat, ratio};
use octacover::slice::{slice, SliceSquare};
use octacover::{Error, Rational, Vec3};
use proptest::prelude::*;

/// A slice square given by its centre in the rotated frame
/// `u = x + y`, `v = x - y`, half-side `t`, at height 0.
fn sq(u: Rational, v: Rational, t: Rational, delta: i8) -> SliceSquare {
    SliceSquare {
        center_xy: ((&u + &v) / rat(2), (&u - &v) / rat(2)),
        t,
        z0: rat(0),
        source: 0,
        delta,
    }
}

fn xy(x: i64, y: i64, t: Rational) -> SliceSquare {
    sq(rat(x + y), rat(x - y), t, 1)
}

#[test]
fn intersection_area_examples() {
    let big = xy(0, 0, rat(2));
    assert_eq!(slice_intersection_area(&big, &big).unwrap(), rat(8));
    assert_eq!(slice_intersection_area(&xy(0, 0, rat(1)), &xy(2, 0, rat(1))).unwrap(), rat(0));
    // The unit disk centred at (1,0) lies inside the disk of radius 2, so
    // the overlap is the whole small disk.
    assert_eq!(slice_intersection_area(&big, &xy(1, 0, rat(1))).unwrap(), rat(2));
}

/// Area of the intersection of two L1 disks by counting pixel centres.
fn pixel_area(a: &SliceSquare, b: &SliceSquare, res: i64) -> f64 {
    let inside = |s: &SliceSquare, x: f64, y: f64| {
        let (cx, cy) = (octacover::scalar::rational_to_f64(&s.center_xy.0), octacover::scalar::rational_to_f64(&s.center_xy.1));
        (x - cx).abs() + (y - cy).abs() <= octacover::scalar::rational_to_f64(&s.t)
    };
    let mut n = 0u64;
    let step = 1.0 / res as f64;
    for i in -4 * res..4 * res {
        for j in -4 * res..4 * res {
            let (x, y) = ((i as f64 + 0.5) * step, (j as f64 + 0.5) * step);
            n += (inside(a, x, y) && inside(b, x, y)) as u64;
        }
    }
    n as f64 * step * step
}

#[test]
fn intersection_area_against_pixels() {
    let cases = [
        (xy(0, 0, rat(2)), xy(1, 0, rat(1))),
        (xy(0, 0, rat(1)), sq(rat(1), rat(1), rat(1), 1)),
        (xy(0, 0, ratio(3, 2)), xy(1, 1, ratio(5, 4))),
    ];
    for (a, b) in cases {
        let exact = octacover::scalar::rational_to_f64(&slice_intersection_area(&a, &b).unwrap());
        assert!((pixel_area(&a, &b, 256) - exact).abs() < 1e-2);
    }
}

#[test]
fn classify_examples() {
    let anchor = sq(rat(0), rat(0), rat(1), 1);
    let c = classify(&anchor, &sq(rat(1), rat(1), rat(1), 1)).unwrap();
    assert_eq!(c.kind, OverlapKind::I);
    assert_eq!(c.covered_vertices, 1);
    assert_eq!(c.distances, Distances::I { a: rat(1), b: rat(1) });

    let c = classify(&anchor, &sq(rat(1), rat(0), ratio(6, 5), 1)).unwrap();
    assert_eq!(c.kind, OverlapKind::II);
    assert_eq!(c.covered_vertices, 2);

    let c = classify(&anchor, &sq(rat(0), rat(0), rat(2), 1)).unwrap();
    assert_eq!(c.kind, OverlapKind::III);
    assert_eq!(c.covered_vertices, 4);
    assert_eq!(c.distances, Distances::III { g: rat(1), h: rat(1), r: rat(1), s: rat(1) });

    let far = classify(&anchor, &sq(rat(2), rat(0), rat(1), 1)).unwrap();
    assert_eq!(far.kind, OverlapKind::Disjoint);
}

#[test]
fn bound_examples() {
    // Corner overlap with both half-sides 53/27 and the short overlap width
    // b shrinking to 0: the bound (b + 4 - 2t)³/6 tends to 4/3¹⁰.
    let t = ratio(53, 27);
    let anchor = sq(rat(0), rat(0), t.clone(), 1);
    for k in [1i64, 10, 1000] {
        let b_width = ratio(1, k);
        let other = sq(rat(2) * &t - &b_width, rat(2) * &t - rat(1), t.clone(), 1);
        let b = config_lower_bound(&anchor, &other).unwrap();
        assert_eq!(b.config.kind, OverlapKind::I);
        let base = &b_width + rat(4) - rat(2) * &t;
        assert_eq!(b.value, &base * &base * &base / rat(6));
        assert!(b.value > pair_bound_floor());
    }

    // Concentric, same sign, equal sizes: (0 + 4 - 2t + 2t)³/6.
    let a = sq(rat(0), rat(0), rat(1), 1);
    let b = config_lower_bound(&a, &a).unwrap();
    assert_eq!(b.config.kind, OverlapKind::III);
    assert_eq!(b.value, ratio(32, 3));
    assert_eq!(b.certificate, Certificate::DirectSameSign);

    let b = config_lower_bound(&a, &sq(rat(1), rat(1), rat(1), -1)).unwrap();
    assert_eq!(b.certificate, Certificate::ThirdSquareNeeded);

    let err = config_lower_bound(&a, &sq(rat(5), rat(0), rat(1), 1)).unwrap_err();
    assert_eq!(err, Error::NotOverlapping);
}

#[test]
fn concentric_opposite_signs() {
    let (x0, x1) = (Vec3::zero(), Vec3::from_ratios([(0, 1), (0, 1), (-8, 3)]));
    let z0 = ratio(-5, 3);
    let a = slice(&x0, &z0, 0).unwrap();
    let k = slice(&x1, &z0, 1).unwrap();
    let b = config_lower_bound(&a, &k).unwrap();
    assert_eq!(b.certificate, Certificate::DirectOppositeIII);
    assert_eq!(b.value, ratio(32, 81));
    assert_eq!(exact_pair_volume(&x0, &x1), ratio(32, 81));
}

#[test]
fn pair_volume_examples() {
    let o = Vec3::zero();
    assert_eq!(exact_pair_volume(&o, &o), ratio(32, 3));
    assert_eq!(exact_pair_volume(&o, &Vec3::from_i64(4, 0, 0)), rat(0));
    assert_eq!(exact_pair_volume(&o, &Vec3::from_i64(2, 0, 0)), ratio(4, 3));
    assert!(!bodies_overlap(&o, &Vec3::from_i64(4, 0, 0)));
}

#[test]
fn direct_bounds_hold_on_random_configurations() {
    let mut r = common::rng(55);
    for _ in 0..2000 {
        let c = common::random_config(&mut r);
        let b = config_lower_bound(&c.anchor, &c.other).unwrap();
        if b.certificate == Certificate::ThirdSquareNeeded {
            continue;
        }
        let exact = exact_pair_volume(&c.xa, &c.xk);
        assert!(b.value <= exact, "{} {} at {}: {:?}", c.xa, c.xk, c.z0, b);
        assert!(b.value >= pair_bound_floor());
    }
}

fn point() -> impl Strategy<Value = Vec3> {
    (-48i64..=48, -48i64..=48, -48i64..=48).prop_map(|(a, b, c)| Vec3::from_ratios([(a, 12), (b, 12), (c, 12)]))
}

fn square() -> impl Strategy<Value = SliceSquare> {
    (-24i64..=24, -24i64..=24, 1i64..=24, prop::bool::ANY).prop_map(|(u, v, t, up)| {
        sq(ratio(u, 8), ratio(v, 8), ratio(t, 12), if up { 1 } else { -1 })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pair_volume_matches_polytope_intersection(xi in point(), xj in point()) {
        let oracle = octahedron_at(&xi).intersect(&octahedron_at(&xj)).volume();
        prop_assert_eq!(exact_pair_volume(&xi, &xj), oracle);
    }

    #[test]
    fn pair_volume_is_symmetric_and_translation_invariant(xi in point(), xj in point(), s in point()) {
        let v = exact_pair_volume(&xi, &xj);
        prop_assert_eq!(&v, &exact_pair_volume(&xj, &xi));
        prop_assert_eq!(&v, &exact_pair_volume(&xi.add(&s), &xj.add(&s)));
    }

    #[test]
    fn every_overlap_gets_one_kind(a in square(), b in square()) {
        let c = classify(&a, &b).unwrap();
        prop_assert!(c.covered_vertices <= 4 && c.covered_vertices != 3);
        let area = slice_intersection_area(&a, &b).unwrap();
        prop_assert_eq!(c.kind == OverlapKind::Disjoint, area == rat(0));
        if c.kind != OverlapKind::Disjoint {
            match c.covered_vertices {
                4 => prop_assert_eq!(c.kind, OverlapKind::III),
                1 => prop_assert_eq!(c.kind, OverlapKind::I),
                _ => prop_assert_eq!(c.kind, OverlapKind::II),
            }
        }
    }

    #[test]
    fn intersection_area_symmetric_and_monotone(a in square(), b in square(), grow in 1i64..=12) {
        let ab = slice_intersection_area(&a, &b).unwrap();
        prop_assert_eq!(&ab, &slice_intersection_area(&b, &a).unwrap());
        let mut bigger = a.clone();
        bigger.t = &bigger.t + ratio(grow, 12);
        prop_assert!(slice_intersection_area(&bigger, &b).unwrap() >= ab);
        let mut bigger_b = b.clone();
        bigger_b.t = &bigger_b.t + ratio(grow, 12);
        prop_assert!(slice_intersection_area(&a, &bigger_b).unwrap() >= ab);
    }
}
