use octacover::octahedron::{octahedron, parallelohedron_p, scaled_octahedron};
use octacover::polytope::monte_carlo_volume;
use octacover::scalar::{rat, ratio, rational_to_f64};
use octacover::{Error, HalfSpace, Intersection, Polytope3, Rational, Vec3};
use proptest::prelude::*;

fn v(x: i64, y: i64, z: i64) -> Vec3 {
    Vec3::from_i64(x, y, z)
}

fn corner_simplex() -> Polytope3 {
    Polytope3::from_vertices(&[v(0, 0, 0), v(1, 0, 0), v(0, 1, 0), v(0, 0, 1)]).unwrap()
}

fn cube(r: i64) -> Polytope3 {
    let mut pts = Vec::new();
    for i in 0..8 {
        pts.push(v(if i & 1 == 0 { -r } else { r }, if i & 2 == 0 { -r } else { r }, if i & 4 == 0 { -r } else { r }));
    }
    Polytope3::from_vertices(&pts).unwrap()
}

#[test]
fn hull_examples() {
    assert_eq!(parallelohedron_p().vertices().len(), 8);
    let s = corner_simplex();
    assert_eq!(s.facets().len(), 4);
    assert_eq!(s.volume(), ratio(1, 6));
    let with_centre = Polytope3::from_vertices(&[
        v(2, 0, 0),
        v(-2, 0, 0),
        v(0, 2, 0),
        v(0, -2, 0),
        v(0, 0, 2),
        v(0, 0, -2),
        v(0, 0, 0),
    ])
    .unwrap();
    assert_eq!(with_centre.vertices().len(), 6);
    assert!(with_centre.same_body(&octahedron()));
}

#[test]
fn halfspace_examples() {
    let mut facets = Vec::new();
    for s in octacover::octahedron::sign_patterns() {
        facets.push(HalfSpace::new(Vec3::from_i64(s[0], s[1], s[2]), rat(2)));
    }
    assert!(Polytope3::from_halfspaces(&facets).unwrap().same_body(&octahedron()));
    let mut touching = facets.clone();
    touching.extend(facets.iter().map(|h| h.translated(&v(4, 0, 0))));
    match octacover::polytope::intersect_halfspaces(&touching).unwrap() {
        Intersection::LowerDimensional { dim, points } => {
            assert_eq!(dim, 0);
            assert_eq!(points, vec![v(2, 0, 0)]);
        }
        other => panic!("expected a single point, got {other:?}"),
    }
    let mut box_facets = Vec::new();
    for k in 0..3 {
        let mut e = [0i64; 3];
        e[k] = 1;
        box_facets.push(HalfSpace::new(Vec3::from_i64(e[0], e[1], e[2]), rat(1)));
        box_facets.push(HalfSpace::new(Vec3::from_i64(-e[0], -e[1], -e[2]), rat(1)));
    }
    assert_eq!(Polytope3::from_halfspaces(&box_facets).unwrap().vertices().len(), 8);
}

#[test]
fn volumes() {
    assert_eq!(octahedron().volume(), ratio(32, 3));
    assert_eq!(parallelohedron_p().volume(), rat(1024));
}

#[test]
fn intersections() {
    let c = octahedron();
    assert_eq!(c.intersect(&c).volume(), ratio(32, 3));
    assert_eq!(c.intersect(&c.translate(&v(2, 0, 0))).volume(), ratio(4, 3));
    assert!(matches!(c.intersect(&c.translate(&v(4, 0, 0))), Intersection::LowerDimensional { .. }));
    assert!(matches!(c.intersect(&c.translate(&v(5, 0, 0))), Intersection::Empty));
}

#[test]
fn minkowski_and_difference() {
    let c = octahedron();
    let three = scaled_octahedron(&rat(3));
    assert!(c.minkowski_sum(&c.difference_body()).same_body(&three));
    assert!(c.minkowski_sum_points(&[Vec3::zero()]).same_body(&c));
    assert!(c.minkowski_sum(&c).same_body(&scaled_octahedron(&rat(2))));
    assert!(c.difference_body().same_body(&scaled_octahedron(&rat(2))));
    let ds = corner_simplex().difference_body();
    assert_eq!(ds.vertices().len(), 12);
    assert!(cube(1).difference_body().same_body(&cube(2)));
}

#[test]
fn containment_and_affine() {
    let p = parallelohedron_p();
    let four = scaled_octahedron(&rat(4));
    assert!(p.contains_polytope(&four));
    assert!(octahedron().contains_polytope(&octahedron()));
    assert!(!four.contains_polytope(&p));
    let c = octahedron();
    assert_eq!(c.affine(&rat(3), &Vec3::zero()).unwrap().volume(), rat(288));
    assert!(c.affine(&rat(1), &v(8, 0, 0)).unwrap().vertices().contains(&v(10, 0, 0)));
    assert!(p.contains_polytope(&c.affine(&rat(4), &Vec3::zero()).unwrap()));
    assert_eq!(c.affine(&rat(0), &Vec3::zero()).unwrap_err(), Error::NonPositiveScale);
}

#[test]
fn degenerate_inputs() {
    assert!(Polytope3::from_vertices(&[v(0, 0, 0), v(1, 0, 0), v(0, 1, 0)]).is_err());
    assert!(Polytope3::<Rational>::from_vertices(&[]).is_err());
}

#[test]
fn monte_carlo_examples() {
    let c = octahedron();
    assert!(monte_carlo_volume(&c, 1_000_000, 1).agrees_with(32.0 / 3.0, 3.0));
    let lens = c.intersect(&c.translate(&v(2, 0, 0)));
    assert!(monte_carlo_volume(lens.body().unwrap(), 1_000_000, 2).agrees_with(4.0 / 3.0, 3.0));
    assert!(monte_carlo_volume(&parallelohedron_p(), 1_000_000, 3).agrees_with(1024.0, 3.0));
}

#[test]
fn float_track_matches() {
    let p = parallelohedron_p();
    let f = p.to_f64();
    assert!((f.volume() - 1024.0).abs() < 1e-9);
    assert!((rational_to_f64(&octahedron().volume()) - octahedron().to_f64().volume()).abs() < 1e-9);
}

fn small_point() -> impl Strategy<Value = Vec3> {
    (-12i64..=12, -12i64..=12, -12i64..=12).prop_map(|(a, b, c)| Vec3::from_ratios([(a, 3), (b, 3), (c, 3)]))
}

fn random_body() -> impl Strategy<Value = Polytope3> {
    prop::collection::vec(small_point(), 5..12).prop_filter_map("full-dimensional hull", |pts| {
        Polytope3::from_vertices(&pts).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn vertex_and_facet_descriptions_agree(k in random_body()) {
        let again = Polytope3::from_halfspaces(k.facets()).unwrap();
        prop_assert_eq!(again.volume(), k.volume());
        let rebuilt = Polytope3::from_vertices(k.vertices()).unwrap();
        prop_assert_eq!(rebuilt.volume(), k.volume());
    }

    #[test]
    fn doubling_scales_volume_by_eight(k in random_body()) {
        prop_assert_eq!(k.minkowski_sum(&k).volume(), rat(8) * k.volume());
    }

    #[test]
    fn difference_body_is_symmetric(k in random_body()) {
        let d = k.difference_body();
        for p in d.vertices() {
            prop_assert!(d.vertices().contains(&p.neg()));
        }
    }

    #[test]
    fn intersection_is_symmetric_and_smaller(a in random_body(), b in random_body()) {
        let ab = a.intersect(&b).volume();
        let ba = b.intersect(&a).volume();
        prop_assert_eq!(&ab, &ba);
        prop_assert!(ab <= a.volume() && ab <= b.volume());
    }

    #[test]
    fn translation_keeps_volume(k in random_body(), s in small_point()) {
        prop_assert_eq!(k.translate(&s).volume(), k.volume());
    }
}
