mod common;

use fiberqm::separability::{schmidt_coefficients, value_span_singular_values};
use fiberqm::state::random_state_with_spectrum;
use fiberqm::{
    evolve_free, is_decomposable, schmidt_rank, to_fiber, value_span_rank, FactorVector,
    TensorState, C64, RANK_TOL,
};

#[test]
fn value_span_rank_equals_schmidt_rank() {
    let b = common::desk_basis();
    for seed in 0..50u64 {
        let planted = 1 + (seed as usize % 8);
        let (s, _) = random_state_with_spectrum(&b, &b, seed, planted).unwrap();
        let oracle = common::singular_values(s.amplitudes())
            .iter()
            .filter(|&&x| x > 1e-8)
            .count();
        assert_eq!(oracle, planted);
        let r = schmidt_rank(&s, RANK_TOL).unwrap();
        let f = to_fiber(&s);
        assert_eq!(r, planted);
        assert_eq!(value_span_rank(&f, RANK_TOL).unwrap(), r, "seed {seed}");
        // weighted rows reproduce the full Schmidt spectrum, not just its rank
        let a = value_span_singular_values(&f).unwrap();
        let b = schmidt_coefficients(&s).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-10);
        }
    }
}

#[test]
fn rank_is_invariant_under_local_unitaries_and_evolution() {
    let b = common::desk_basis();
    let mut rng = common::rng(5);
    for seed in 0..30u64 {
        let planted = 1 + (seed as usize % 6);
        let s = TensorState::random(&b, &b, seed, Some(planted)).unwrap();
        let u = common::random_unitary(8, &mut rng);
        let v = common::random_unitary(8, &mut rng);
        let rotated = TensorState::new(&b, &b, &u * s.amplitudes() * v.transpose()).unwrap();
        assert_eq!(schmidt_rank(&rotated, RANK_TOL).unwrap(), planted);
        assert_eq!(
            schmidt_rank(&evolve_free(&s, 1.3 * seed as f64), RANK_TOL).unwrap(),
            planted
        );
    }
}

#[test]
fn witness_is_deterministic_and_gauge_invariant() {
    let b = common::desk_basis();
    let mut rng = common::rng(9);
    let psi = FactorVector::random(&b, &mut rng);
    let phi = FactorVector::random(&b, &mut rng);
    let lambda = C64::from_polar(1.7, 0.9);
    let s1 = TensorState::product(&psi, &phi);
    let s2 = TensorState::product(&psi.scale(lambda), &phi.scale(lambda.inv()));
    let (p1, f1) = is_decomposable(&s1, RANK_TOL).unwrap().unwrap();
    let (p2, f2) = is_decomposable(&s2, RANK_TOL).unwrap().unwrap();
    assert!((p1.coefficients() - p2.coefficients())
        .iter()
        .all(|z| z.norm() <= 1e-10));
    assert!((f1.coefficients() - f2.coefficients())
        .iter()
        .all(|z| z.norm() <= 1e-10));
    let again = is_decomposable(&s1, RANK_TOL).unwrap().unwrap();
    assert_eq!(again.0, p1);
    assert_eq!(again.1, f1);
}

#[test]
fn witness_residual_within_tolerance() {
    let b = common::desk_basis();
    for seed in 0..20 {
        let s = TensorState::random(&b, &b, seed, Some(1))
            .unwrap()
            .scale(C64::new(3.0, 1.0));
        let (psi, phi) = is_decomposable(&s, RANK_TOL).unwrap().expect("rank one");
        let d = TensorState::superpose(
            C64::new(1.0, 0.0),
            &s,
            C64::new(-1.0, 0.0),
            &TensorState::product(&psi, &phi),
        )
        .unwrap();
        assert!(d.norm() <= RANK_TOL * s.norm());
        assert!((phi.norm() - 1.0).abs() <= 1e-12);
    }
}
