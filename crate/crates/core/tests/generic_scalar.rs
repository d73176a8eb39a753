use num_bigint::BigInt;
use num_rational::BigRational;
use rotlab_core::hamiltonian::HamiltonianModel;
use rotlab_core::linalg;
use rotlab_core::mather::{beta, BetaOptions, QuadraticSurd};
use rotlab_core::rotation::{mz_rotation_set, TorusMapLift};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn exact_linear_algebra_over_rationals() {
    let a = vec![vec![q(1, 2), q(1, 3)], vec![q(1, 4), q(1, 5)]];
    // 1/10 − 1/12 = 1/60
    assert_eq!(linalg::det(&a), q(1, 60));
    let inv = linalg::inverse(&a).unwrap();
    assert_eq!(linalg::mat_mul(&a, &inv), linalg::identity(2));
}

#[test]
fn exact_linear_algebra_over_surds() {
    let s2 = QuadraticSurd::sqrt(2).unwrap();
    let one = QuadraticSurd::integer(1);
    let a = vec![vec![one.clone(), s2.clone()], vec![s2.clone(), one.clone()]];
    assert_eq!(linalg::det(&a), QuadraticSurd::integer(-1));
    let x = linalg::solve(&a, &[one.clone(), one.clone()]).unwrap();
    assert_eq!(x[0], s2 - one);
}

#[test]
fn single_precision_pipelines() {
    let f = TorusMapLift::<f32>::translation([0.25, 0.5]);
    let rs = mz_rotation_set(&f, 4, 8);
    assert_eq!(rs.vertices.len(), 1);
    assert!((rs.vertices[0][0] - 0.25).abs() < 1e-6);

    let b = beta(
        &HamiltonianModel::<f32>::flat(2),
        &[1.0, 0.0],
        &BetaOptions::default(),
    )
    .unwrap();
    assert!((b.value - 0.5).abs() < 1e-4, "{}", b.value);
}
