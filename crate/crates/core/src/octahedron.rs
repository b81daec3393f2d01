//! The concrete bodies of the covering problem and the facts about them:
//! `C₃`, its dilates, the parallelohedron `P`, translate sets, and the
//! body-centred lattice whose `C₃`-covering has density 9/8.

use std::collections::HashSet;
use std::sync::LazyLock;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::{HalfSpace, Polytope3, Vec3};
use crate::scalar::{format_rational, rat, ratio, Rational};

/// L1 radius of `C₃`.
pub const RADIUS: i64 = 2;

static OCTAHEDRON: LazyLock<Polytope3> = LazyLock::new(|| scaled_octahedron(&rat(1)));
static PARALLELOHEDRON: LazyLock<Polytope3> = LazyLock::new(build_parallelohedron);

/// Sign patterns of the eight facet normals of an L1 ball.
pub fn sign_patterns() -> [[i64; 3]; 8] {
    let mut out = [[0; 3]; 8];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = [
            if i & 4 == 0 { -1 } else { 1 },
            if i & 2 == 0 { -1 } else { 1 },
            if i & 1 == 0 { -1 } else { 1 },
        ];
    }
    out
}

/// `C₃ = {|x| + |y| + |z| <= 2}`.
pub fn octahedron() -> Polytope3 {
    OCTAHEDRON.clone()
}

/// Shared reference to `C₃` without cloning.
pub fn octahedron_ref() -> &'static Polytope3 {
    &OCTAHEDRON
}

/// `k·C₃`, the L1 ball of radius `2k`.
pub fn scaled_octahedron(k: &Rational) -> Polytope3 {
    let r = rat(RADIUS) * k;
    let facets: Vec<HalfSpace> = sign_patterns()
        .iter()
        .map(|s| HalfSpace::new(Vec3::from_i64(s[0], s[1], s[2]), r.clone()))
        .collect();
    Polytope3::from_halfspaces(&facets).expect("L1 ball is a bounded body")
}

/// `C₃ + x`.
pub fn octahedron_at(x: &Vec3) -> Polytope3 {
    OCTAHEDRON.translate(x)
}

fn build_parallelohedron() -> Polytope3 {
    let pts = [
        Vec3::from_i64(8, 0, 0),
        Vec3::from_i64(-8, 0, 0),
        Vec3::from_i64(0, 8, 0),
        Vec3::from_i64(0, -8, 0),
        Vec3::from_i64(0, 0, 8),
        Vec3::from_i64(0, 0, -8),
        Vec3::from_i64(8, 8, 8),
        Vec3::from_i64(-8, -8, -8),
    ];
    Polytope3::from_vertices(&pts).expect("P is full-dimensional")
}

/// The parallelepiped `P = conv{±8e₁, ±8e₂, ±8e₃, ±(8,8,8)}`, vol 1024.
pub fn parallelohedron_p() -> Polytope3 {
    PARALLELOHEDRON.clone()
}

pub fn parallelohedron_ref() -> &'static Polytope3 {
    &PARALLELOHEDRON
}

/// Two translates of `C₃` meet (touching included) iff their centres are
/// within L1 distance 4, the radius of `D(C₃) = 2C₃`.
pub fn bodies_meet(a: &Vec3, b: &Vec3) -> bool {
    a.sub(b).l1_norm() <= rat(2 * RADIUS)
}

/// An ordered set of distinct translate vectors.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TranslateSet {
    translates: Vec<Vec3>,
}

impl TranslateSet {
    pub fn new(translates: Vec<Vec3>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(translates.len());
        for (index, t) in translates.iter().enumerate() {
            if !seen.insert(t) {
                return Err(Error::DuplicateTranslate { index });
            }
        }
        Ok(TranslateSet { translates })
    }

    pub fn len(&self) -> usize {
        self.translates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.translates.is_empty()
    }

    pub fn as_slice(&self) -> &[Vec3] {
        &self.translates
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec3> {
        self.translates.iter()
    }

    pub fn get(&self, index: usize) -> Option<&Vec3> {
        self.translates.get(index)
    }

    pub fn into_vec(self) -> Vec<Vec3> {
        self.translates
    }

    /// Union of two sets; fails if they share a translate.
    pub fn union(&self, other: &TranslateSet) -> Result<TranslateSet> {
        let mut all = self.translates.clone();
        all.extend(other.translates.iter().cloned());
        TranslateSet::new(all)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborLemma {
    pub intersects: bool,
    pub contained_in_3c3: bool,
}

impl NeighborLemma {
    /// `intersects ⟹ contained_in_3c3`.
    pub fn holds(&self) -> bool {
        !self.intersects || self.contained_in_3c3
    }
}

/// Whether `C₃ + x` meets `C₃`, and whether it lies inside `3C₃`.
pub fn neighbor_lemma_check(x: &Vec3) -> NeighborLemma {
    static TRIPLE: LazyLock<Polytope3> = LazyLock::new(|| scaled_octahedron(&rat(3)));
    let moved = octahedron_at(x);
    NeighborLemma {
        intersects: !OCTAHEDRON.intersect(&moved).is_empty(),
        contained_in_3c3: TRIPLE.contains_polytope(&moved),
    }
}

/// Translates whose bodies meet the anchor's body (touching included),
/// in input order with the anchor moved last.
pub fn neighbor_set(set: &TranslateSet, anchor_index: usize) -> Result<TranslateSet> {
    let anchor = set.get(anchor_index).ok_or(Error::IndexOutOfRange {
        index: anchor_index,
        len: set.len(),
    })?;
    let mut out: Vec<Vec3> = set
        .iter()
        .enumerate()
        .filter(|&(i, x)| i != anchor_index && bodies_meet(anchor, x))
        .map(|(_, x)| x.clone())
        .collect();
    out.push(anchor.clone());
    TranslateSet::new(out)
}

/// A lattice basis; rows are the basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    rows: [Vec3; 3],
    determinant: Rational,
}

impl LatticeBasis {
    pub fn new(rows: [Vec3; 3]) -> Result<Self> {
        let det = rows[0].dot(&rows[1].cross(&rows[2])).abs();
        if det.is_zero() {
            return Err(Error::SingularBasis);
        }
        Ok(LatticeBasis { rows, determinant: det })
    }

    pub fn rows(&self) -> &[Vec3; 3] {
        &self.rows
    }

    /// |det| of the basis matrix: the volume of a fundamental cell.
    pub fn determinant(&self) -> &Rational {
        &self.determinant
    }

    pub fn scaled(&self, k: &Rational) -> Result<Self> {
        LatticeBasis::new([self.rows[0].scale(k), self.rows[1].scale(k), self.rows[2].scale(k)])
    }

    pub fn point(&self, n: [i64; 3]) -> Vec3 {
        self.rows[0]
            .scale(&rat(n[0]))
            .add(&self.rows[1].scale(&rat(n[1])))
            .add(&self.rows[2].scale(&rat(n[2])))
    }

    /// The half-open parallelepiped spanned by the rows, as a closed body.
    pub fn fundamental_cell(&self) -> Polytope3 {
        let mut pts = Vec::with_capacity(8);
        for i in 0..8i64 {
            pts.push(self.point([i & 1, (i >> 1) & 1, (i >> 2) & 1]));
        }
        Polytope3::from_vertices(&pts).expect("nonsingular basis spans a body")
    }

    /// Lattice coordinates of `p` (solves `n·B = p`).
    fn coordinates(&self, p: &Vec3) -> [Rational; 3] {
        let [a, b, c] = &self.rows;
        let det = a.dot(&b.cross(c));
        // Rows of B⁻¹ as columns: p·B⁻¹ = (p·(b×c), p·(c×a), p·(a×b)) / det.
        [
            p.dot(&b.cross(c)) / &det,
            p.dot(&c.cross(a)) / &det,
            p.dot(&a.cross(b)) / &det,
        ]
    }

    /// Lattice points `λ` with `(C₃ + λ) ∩ region ≠ ∅`, sorted.
    pub fn points_meeting(&self, region: &Polytope3) -> Vec<Vec3> {
        let (lo, hi) = region.bounding_box();
        let r = rat(RADIUS);
        let lo = Vec3::new(&lo.x - &r, &lo.y - &r, &lo.z - &r);
        let hi = Vec3::new(&hi.x + &r, &hi.y + &r, &hi.z + &r);
        let mut min = [i64::MAX; 3];
        let mut max = [i64::MIN; 3];
        for i in 0..8 {
            let corner = Vec3::new(
                if i & 1 == 0 { lo.x.clone() } else { hi.x.clone() },
                if i & 2 == 0 { lo.y.clone() } else { hi.y.clone() },
                if i & 4 == 0 { lo.z.clone() } else { hi.z.clone() },
            );
            for (k, c) in self.coordinates(&corner).iter().enumerate() {
                let f: i64 = c.floor().to_integer().try_into().expect("lattice range fits i64");
                let g: i64 = c.ceil().to_integer().try_into().expect("lattice range fits i64");
                min[k] = min[k].min(f);
                max[k] = max[k].max(g);
            }
        }
        let mut out = Vec::new();
        for a in min[0]..=max[0] {
            for b in min[1]..=max[1] {
                for c in min[2]..=max[2] {
                    let p = self.point([a, b, c]);
                    let inside_box = [(&p.x, &lo.x, &hi.x), (&p.y, &lo.y, &hi.y), (&p.z, &lo.z, &hi.z)]
                        .iter()
                        .all(|(v, l, h)| v >= l && v <= h);
                    if inside_box && body_meets_region(&p, region) {
                        out.push(p);
                    }
                }
            }
        }
        out.sort();
        out
    }
}

/// Exact test whether `C₃ + x` meets `region` (touching included).
pub fn body_meets_region(x: &Vec3, region: &Polytope3) -> bool {
    let r = rat(RADIUS);
    // Separated by a facet of the region: min over C₃+x of n·p = n·x - 2‖n‖∞.
    for h in region.facets() {
        if h.normal.dot(x) - &r * h.normal.linf_norm() > h.offset {
            return false;
        }
    }
    // Separated by a facet of C₃+x.
    for s in sign_patterns() {
        let n = Vec3::from_i64(s[0], s[1], s[2]);
        let bound = &r + n.dot(x);
        if region.vertices().iter().all(|v| n.dot(v) > bound) {
            return false;
        }
    }
    if region.contains_point(x) {
        return true;
    }
    !region.intersect(&octahedron_at(x)).is_empty()
}

/// The body-centred lattice generated by (8/3,0,0), (0,8/3,0), (4/3,4/3,4/3).
/// Its Voronoi cell is a truncated octahedron inscribed in `C₃`.
pub fn covering_lattice_nine_eighths() -> LatticeBasis {
    LatticeBasis::new([
        Vec3::from_ratios([(8, 3), (0, 1), (0, 1)]),
        Vec3::from_ratios([(0, 1), (8, 3), (0, 1)]),
        Vec3::from_ratios([(4, 3), (4, 3), (4, 3)]),
    ])
    .expect("basis is nonsingular")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactCheck {
    pub name: String,
    pub computed: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactsReport {
    pub checks: Vec<FactCheck>,
}

impl FactsReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&FactCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn vertex_list(p: &Polytope3) -> String {
    let parts: Vec<String> = p.vertices().iter().map(|v| v.to_string()).collect();
    parts.join(" ")
}

/// Exact checks of the basic identities about `C₃` and `P`.
pub fn verify_basic_facts() -> FactsReport {
    let c3 = octahedron();
    let p = parallelohedron_p();
    let two = scaled_octahedron(&rat(2));
    let three = scaled_octahedron(&rat(3));
    let four = scaled_octahedron(&rat(4));
    let diff = c3.difference_body();
    let sum = c3.minkowski_sum(&diff);
    let edge_sq = {
        let a = Vec3::from_i64(2, 0, 0);
        let b = Vec3::from_i64(0, 2, 0);
        let d = a.sub(&b);
        d.dot(&d)
    };

    let mut checks = Vec::new();
    let mut value = |name: &str, computed: Rational, expected: Rational| {
        checks.push(FactCheck {
            name: name.to_string(),
            pass: computed == expected,
            computed: format_rational(&computed),
            expected: format_rational(&expected),
        });
    };
    value("vol(C3)", c3.volume(), ratio(32, 3));
    value("vol(P)", p.volume(), rat(1024));
    value("edge(C3)^2", edge_sq, rat(8));
    value("vol(3C3)/vol(P)", three.volume() / p.volume(), ratio(9, 32));
    value("#vertices(P)", rat(p.vertices().len() as i64), rat(8));

    let mut body = |name: &str, computed: &Polytope3, expected: &Polytope3| {
        checks.push(FactCheck {
            name: name.to_string(),
            pass: computed.same_body(expected),
            computed: vertex_list(computed),
            expected: vertex_list(expected),
        });
    };
    body("D(C3)=2C3", &diff, &two);
    body("C3+D(C3)=3C3", &sum, &three);

    let contained = p.contains_polytope(&four);
    checks.push(FactCheck {
        name: "4C3⊂P".to_string(),
        computed: contained.to_string(),
        expected: "true".to_string(),
        pass: contained,
    });
    FactsReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64, z: i64) -> Vec3 {
        Vec3::from_i64(x, y, z)
    }

    #[test]
    fn octahedron_shape() {
        let c = octahedron();
        assert_eq!(c.volume(), ratio(32, 3));
        assert_eq!(c.facets().len(), 8);
        assert_eq!(c.vertices().len(), 6);
    }

    #[test]
    fn parallelohedron_shape() {
        let p = parallelohedron_p();
        assert_eq!(p.volume(), rat(1024));
        assert_eq!(p.vertices().len(), 8);
        assert_eq!(p.facets().len(), 6);
        assert!(p.contains_polytope(&scaled_octahedron(&rat(4))));
        assert!(!scaled_octahedron(&rat(4)).contains_polytope(&p));
    }

    #[test]
    fn basic_facts_all_pass() {
        let r = verify_basic_facts();
        assert!(r.all_pass(), "{r:#?}");
        assert_eq!(r.get("vol(C3)").unwrap().computed, "32/3");
        assert_eq!(r.get("vol(P)").unwrap().computed, "1024");
    }

    #[test]
    fn neighbor_lemma_examples() {
        let both = NeighborLemma { intersects: true, contained_in_3c3: true };
        assert_eq!(neighbor_lemma_check(&v(2, 0, 0)), both);
        assert_eq!(neighbor_lemma_check(&v(4, 0, 0)), both);
        let neither = NeighborLemma { intersects: false, contained_in_3c3: false };
        assert_eq!(neighbor_lemma_check(&v(5, 0, 0)), neither);
    }

    #[test]
    fn duplicates_are_rejected() {
        let err = TranslateSet::new(vec![v(0, 0, 0), v(1, 0, 0), v(0, 0, 0)]).unwrap_err();
        assert_eq!(err, Error::DuplicateTranslate { index: 2 });
    }

    #[test]
    fn neighbor_set_examples() {
        let set = TranslateSet::new(vec![v(0, 0, 0), v(2, 0, 0), v(5, 0, 0)]).unwrap();
        assert_eq!(neighbor_set(&set, 0).unwrap().as_slice(), &[v(2, 0, 0), v(0, 0, 0)]);
        let single = TranslateSet::new(vec![v(0, 0, 0)]).unwrap();
        assert_eq!(neighbor_set(&single, 0).unwrap().as_slice(), &[v(0, 0, 0)]);
        assert!(matches!(neighbor_set(&single, 3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn nine_eighths_lattice() {
        let b = covering_lattice_nine_eighths();
        assert_eq!(b.determinant(), &ratio(256, 27));
        // (2/3)³ times the volume 32 of the truncated octahedron conv(perm(0, ±1, ±2)).
        assert_eq!(b.determinant(), &(ratio(8, 27) * rat(32)));
        assert_eq!(octahedron().volume() / b.determinant(), ratio(9, 8));
        assert_eq!(b.fundamental_cell().volume(), ratio(256, 27));
    }

    #[test]
    fn singular_basis_rejected() {
        let rows = [v(1, 0, 0), v(0, 1, 0), v(1, 1, 0)];
        assert_eq!(LatticeBasis::new(rows), Err(Error::SingularBasis));
    }

    #[test]
    fn body_meets_region_agrees_with_intersection() {
        let cell = covering_lattice_nine_eighths().fundamental_cell();
        for x in -6..=6 {
            for y in [-3, 0, 5] {
                for z in [-4, 1, 6] {
                    let p = Vec3::from_ratios([(x, 2), (y, 1), (z, 2)]);
                    let direct = !cell.intersect(&octahedron_at(&p)).is_empty();
                    assert_eq!(body_meets_region(&p, &cell), direct, "{p}");
                }
            }
        }
    }
}
