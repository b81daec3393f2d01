mod common;

use octacover::coverage::certify_covering;
use octacover::density::{density, theorem_bound};
use octacover::octahedron::{covering_lattice_nine_eighths, parallelohedron_p, TranslateSet};
use octacover::scalar::{rat, ratio};
use octacover::search::{
    lattice_density, minimize_density, InitialState, Move, SearchParams, QUANTUM,
};
use octacover::{Error, Vec3};

fn params(iterations: usize, seed: u64) -> SearchParams {
    SearchParams {
        iterations,
        seed,
        ..SearchParams::default()
    }
}

#[test]
fn best_never_exceeds_the_start() {
    let t = minimize_density(&params(400, 7)).unwrap();
    assert_eq!(t.initial_theta, ratio(9, 8));
    assert!(t.best_theta <= ratio(9, 8));
    assert!(t.best_theta >= rat(1));
    assert!(t.best_theta >= theorem_bound());
    assert_eq!(density(&t.best, &parallelohedron_p()), t.best_theta);
    assert!(certify_covering(&t.best, &parallelohedron_p(), &ratio(1, 16)).unwrap().is_certified());
}

#[test]
fn zero_iterations() {
    let t = minimize_density(&params(0, 1)).unwrap();
    assert_eq!(t.best_theta, t.initial_theta);
    assert_eq!(t.best, common::lattice_in_p());
}

#[test]
fn same_seed_same_trace() {
    let a = minimize_density(&params(200, 42)).unwrap();
    let b = minimize_density(&params(200, 42)).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.best, b.best);
    let c = minimize_density(&params(200, 43)).unwrap();
    assert_ne!(a.to_csv(), c.to_csv());
}

#[test]
fn accepted_states_are_coverings() {
    // Replay the accepted moves and certify every intermediate state.
    let t = minimize_density(&params(300, 5)).unwrap();
    let mut state: Vec<Option<Vec3>> = common::lattice_in_p().into_vec().into_iter().map(Some).collect();
    let p = parallelohedron_p();
    let q = ratio(1, QUANTUM);
    let mut best_seen = t.initial_theta.clone();
    let mut checked = 0;
    for r in t.records.iter().filter(|r| r.accepted) {
        match &r.proposed {
            Move::Delete { index } => state[*index] = None,
            Move::Perturb { index, offset } => {
                let old = state[*index].take().unwrap();
                let step = Vec3::new(&q * rat(offset[0]), &q * rat(offset[1]), &q * rat(offset[2]));
                let new = old.add(&step);
                // A body pushed clear of P is dropped.
                if octacover::octahedron::body_meets_region(&new, &p) && density(&TranslateSet::new(vec![new.clone()]).unwrap(), &p) > rat(0) {
                    state[*index] = Some(new);
                }
            }
        }
        let x = TranslateSet::new(state.iter().flatten().cloned().collect()).unwrap();
        assert!(certify_covering(&x, &p, &ratio(1, 8)).unwrap().is_certified());
        let theta = density(&x, &p);
        assert!((octacover::scalar::rational_to_f64(&theta) - r.theta_float).abs() < 1e-12);
        if theta < best_seen {
            best_seen = theta;
        }
        checked += 1;
    }
    assert_eq!(best_seen, t.best_theta);
    assert!(checked > 0);
}

#[test]
fn best_so_far_is_non_increasing() {
    let t = minimize_density(&params(300, 11)).unwrap();
    let mut best = f64::INFINITY;
    let mut running = Vec::new();
    for r in &t.records {
        best = best.min(r.theta_float);
        running.push(best);
    }
    assert!(running.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn trace_outputs() {
    let t = minimize_density(&params(5, 2)).unwrap();
    let csv = t.to_csv();
    assert!(csv.starts_with("iteration,theta_float,accepted,move\n"));
    assert_eq!(csv.lines().count(), 6);
    assert_eq!(t.plot_data().lines().count(), 6);
}

#[test]
fn bad_parameters() {
    let mut p = params(1, 1);
    p.step_decay = 1.5;
    assert!(matches!(minimize_density(&p), Err(Error::InvalidParameter(_))));
    let p = SearchParams {
        initial: InitialState::Set(TranslateSet::new(vec![Vec3::zero()]).unwrap()),
        ..params(1, 1)
    };
    assert_eq!(minimize_density(&p).unwrap_err(), Error::InitialNotCovering);
}

#[test]
fn lattice_density_examples() {
    let b = covering_lattice_nine_eighths();
    let d = lattice_density(&b, &b.fundamental_cell()).unwrap();
    assert_eq!(d.intrinsic, ratio(9, 8));

    let dense = b.scaled(&ratio(99, 100)).unwrap();
    let d = lattice_density(&dense, &dense.fundamental_cell()).unwrap();
    let expected = ratio(32, 3) / (ratio(99, 100) * ratio(99, 100) * ratio(99, 100) * ratio(256, 27));
    assert_eq!(d.intrinsic, expected);
    assert!(d.intrinsic > ratio(9, 8));

    let sparse = b.scaled(&ratio(6, 5)).unwrap();
    let cell = sparse.fundamental_cell();
    assert!(matches!(lattice_density(&sparse, &cell), Err(Error::NotACovering { .. })));
    let x = TranslateSet::new(sparse.points_meeting(&cell)).unwrap();
    let cert = certify_covering(&x, &cell, &ratio(1, 8)).unwrap();
    if let octacover::coverage::CoverageStatus::Gap { witnesses, .. } = &cert.status {
        assert!(!witnesses.is_empty());
        for w in witnesses {
            assert!(x.iter().all(|t| w.sub(t).l1_norm() > rat(2)));
        }
    } else {
        panic!("stretched lattice should leave gaps");
    }
}
