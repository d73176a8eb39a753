use std::sync::Arc;

use super::*;
use crate::flow::{FieldFlow, LiftedFlow, LinearFlow};
use crate::scalar::{cos_2pi, sin_2pi};
use crate::torus::tischler_fibration;

fn samples() -> Vec<[f64; 2]> {
    default_samples()
}

#[test]
fn equivariance_examples() {
    assert!(check_equivariance(
        &TorusMapLift::<f64>::translation([0.3, 0.7]),
        &samples()
    ));
    assert!(check_equivariance(
        &TorusMapLift::<f64>::shear(0.2),
        &samples()
    ));
    assert!(check_equivariance(
        &TorusMapLift::<f64>::two_param_shear(1.5, 0.5),
        &samples()
    ));
    let anosov = TorusMapLift::<f64>::linear([[2, 1], [1, 1]]);
    assert!(!check_equivariance(&anosov, &samples()));
    assert!((equivariance_defect(&anosov, &samples()) - 1.0).abs() < 1e-12);
}

#[test]
fn translation_and_identity_sets_are_points() {
    let rs = mz_rotation_set(&TorusMapLift::<f64>::translation([0.3, 0.7]), 16, 50);
    assert_eq!(rs.vertices.len(), 1);
    assert!((rs.vertices[0][0] - 0.3).abs() < 1e-9 && (rs.vertices[0][1] - 0.7).abs() < 1e-9);
    let rs = mz_rotation_set(&TorusMapLift::<f64>::identity(), 16, 50);
    assert_eq!(rs.vertices, vec![[0.0, 0.0]]);
    assert_eq!(rs.area(), 0.0);
}

#[test]
fn hull_basics() {
    let pts = [
        [0.0, 0.0],
        [1.0, 0.0],
        [0.0, 1.0],
        [0.2, 0.2],
        [0.5, 0.0],
        [1.0, 0.0],
    ];
    let h = convex_hull(&pts, 1e-9);
    assert_eq!(h, vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
    let rs: RotationSet<f64> = RotationSet::from_points(&pts, 6, 1);
    assert!((rs.area() - 0.5).abs() < 1e-15);
    assert!((rs.signed_distance([0.25, 0.25]) - 0.25).abs() < 1e-15);
    assert!((rs.signed_distance([2.0, 0.0]) + 1.0).abs() < 1e-15);
    let other: RotationSet<f64> =
        RotationSet::from_points(&[[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]], 3, 1);
    assert!((rs.hausdorff(&other) - 1.0).abs() < 1e-15);
    assert_eq!(rs.hausdorff(&rs), 0.0);
}

/// Sign of `cross(a, b, p/q)` for integer vertices, in exact arithmetic.
fn exact_cross(a: [i64; 2], b: [i64; 2], p: [i64; 2], q: i64) -> i64 {
    let v = (b[0] - a[0]) * (p[1] - a[1] * q) - (b[1] - a[1]) * (p[0] - a[0] * q);
    v.signum()
}

#[test]
fn rational_interior_points_match_exact_oracle() {
    let tri = RotationSet::from_points(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], 3, 1);
    let verts = [[0, 0], [1, 0], [0, 1]];
    for qmax in 1..=6 {
        let mut oracle = Vec::new();
        for q in 1..=qmax {
            for p0 in 0..=q {
                for p1 in 0..=q {
                    if num_integer::gcd(num_integer::gcd(p0, p1), q) != 1 {
                        continue;
                    }
                    if (0..3).all(|i| exact_cross(verts[i], verts[(i + 1) % 3], [p0, p1], q) > 0) {
                        oracle.push(([p0, p1], q));
                    }
                }
            }
        }
        let got = rational_interior_points(&tri, qmax, 0.0);
        assert!(!got.degenerate);
        assert_eq!(got.points, oracle, "Q = {qmax}");
    }
    assert!(rational_interior_points(&tri, 2, 0.0).points.is_empty());
    assert_eq!(
        rational_interior_points(&tri, 3, 0.0).points,
        vec![([1, 1], 3)]
    );

    let point = RotationSet::from_points(&[[0.2, 0.2]], 1, 1);
    let r = rational_interior_points(&point, 5, 0.0);
    assert!(r.degenerate && r.points.is_empty());

    let square =
        RotationSet::from_points(&[[-0.1, -0.1], [0.1, -0.1], [0.1, 0.1], [-0.1, 0.1]], 4, 1);
    assert_eq!(
        rational_interior_points(&square, 1, 0.02).points,
        vec![([0, 0], 1)]
    );
}

#[test]
fn periodic_points_of_simple_maps() {
    let id = TorusMapLift::<f64>::identity();
    let r = find_periodic_point(&id, [0, 0], 1, 1e-10);
    assert!(r.found && r.residual == 0.0);
    let half = TorusMapLift::<f64>::translation([0.5, 0.0]);
    let r = find_periodic_point(&half, [1, 0], 2, 1e-10);
    assert!(r.found && r.residual == 0.0);
    let none = find_periodic_point(
        &TorusMapLift::<f64>::translation([0.3, 0.0]),
        [0, 0],
        1,
        1e-10,
    );
    assert!(!none.found);
}

#[test]
fn periodic_point_of_dissipative_shear_verified_directly() {
    let f = TorusMapLift::<f64>::two_param_shear(1.0, 0.5);
    for (p, q) in [([0, 0], 1), ([1, 0], 1), ([0, 1], 2)] {
        let r = find_periodic_point(&f, p, q, 1e-10);
        assert!(r.found, "{p:?}/{q}: {r:?}");
        let x = [r.point.coords()[0], r.point.coords()[1]];
        let y = f.iterate(x, q);
        assert!((y[0] - x[0] - p[0] as f64).abs() < 1e-10);
        assert!((y[1] - x[1] - p[1] as f64).abs() < 1e-10);
    }
}

#[test]
fn conjugation_transforms_rotation_set() {
    let alpha = [0.3, 0.7];
    let a = [[2, 1], [1, 1]];
    let f = TorusMapLift::<f64>::translation(alpha);
    let g = f.conjugate(a).unwrap();
    assert!(check_equivariance(&g, &samples()));
    let rs = mz_rotation_set(&g, 8, 20);
    let expected = mz_rotation_set(&f, 8, 20).transform([[2.0, 1.0], [1.0, 1.0]]);
    assert!(rs.hausdorff(&expected) < 1e-6);
    assert!(f.conjugate([[2, 0], [0, 1]]).is_none());
}

#[test]
fn refinement_is_monotone_on_shear_family() {
    let f = TorusMapLift::<f64>::simultaneous_shear([0.1, 0.1], [0.1, 0.1]);
    let coarse = mz_rotation_set(&f, 24, 200);
    let deep = mz_rotation_set(&f, 24, 400);
    // deeper iterates stay inside the coarse hull up to sampling error
    for v in &deep.vertices {
        assert!(coarse.signed_distance(*v) > -0.02);
    }
}

fn suspension_maps() -> Vec<TorusMapLift<f64>> {
    vec![
        TorusMapLift::identity(),
        TorusMapLift::translation([0.3, 0.7]),
        TorusMapLift::simultaneous_shear([0.1, 0.1], [0.1, 0.1]),
    ]
}

#[test]
fn suspension_flow_applies_map_at_integer_times() {
    for f in suspension_maps() {
        let flow = SuspensionFlow::new(f.clone());
        let x = [0.0, 0.31, 0.62];
        let y = flow.advance(&x, 3.0);
        let z = f.iterate([0.31, 0.62], 3);
        assert!((y[0] - 3.0).abs() < 1e-15);
        assert!((y[1] - z[0]).abs() < 1e-12 && (y[2] - z[1]).abs() < 1e-12);
        // composition of partial advances
        let a = flow.advance(&flow.advance(&x, 0.37), 1.9);
        let b = flow.advance(&x, 2.27);
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-12);
        }
        // backward advance undoes forward
        let back = flow.advance(&b, -2.27);
        for i in 0..3 {
            assert!((back[i] - x[i]).abs() < 1e-9);
        }
    }
    let s = suspension_homology_set(&TorusMapLift::<f64>::translation([0.3, 0.7]), 8, 10);
    assert_eq!(s.fibre_class, [1, 0, 0]);
    assert!((s.sigma.vertices[0][0] - 0.3).abs() < 1e-12);
}

#[test]
fn return_map_round_trip() {
    let fib = tischler_fibration(&[1.0, 0.0, 0.0], 0.0).unwrap();
    for f in suspension_maps() {
        let flow = Arc::new(SuspensionFlow::new(f.clone()));
        let ret = poincare_return_map(flow, &fib, ReturnOptions::default()).unwrap();
        for z in sample_grid::<f64>(4) {
            let a = ret.apply(z);
            let b = f.apply(z);
            assert!(
                (a[0] - b[0]).abs() < 1e-8 && (a[1] - b[1]).abs() < 1e-8,
                "{:?}",
                f.kind()
            );
        }
        assert!(check_equivariance(&ret, &sample_grid(3)));
    }
}

#[test]
fn return_map_of_linear_flow_is_translation() {
    let fib = tischler_fibration(&[1.0, 0.0, 0.0], 0.0).unwrap();
    let flow = Arc::new(LinearFlow::new(vec![1.0, 0.25, -0.4]));
    let ret = poincare_return_map(flow, &fib, ReturnOptions::default()).unwrap();
    let z: [f64; 2] = ret.apply([0.2, 0.6]);
    assert!((z[0] - 0.45).abs() < 1e-9 && (z[1] - 0.2).abs() < 1e-9);

    let sideways = Arc::new(LinearFlow::new(vec![0.0, 1.0, 0.0]));
    assert!(matches!(
        poincare_return_map(sideways, &fib, ReturnOptions::default()),
        Err(RotationError::NotTransverse { .. })
    ));
    let backwards = Arc::new(LinearFlow::new(vec![-1.0, 0.25, 0.0]));
    let ret = poincare_return_map(backwards, &fib, ReturnOptions::default()).unwrap();
    assert!(check_equivariance(&ret, &sample_grid(3)));
}

#[test]
fn return_map_of_curved_flow_is_equivariant() {
    let field = |x: &[f64]| {
        vec![
            1.0 + 0.3 * sin_2pi(x[1]),
            0.2 + 0.3 * cos_2pi(x[0]),
            0.1 * sin_2pi(x[1]) + 0.15,
        ]
    };
    let flow = Arc::new(FieldFlow::new(3, 0.01, field));
    // skew fibration x₁ + x₃ = const
    let fib = tischler_fibration(&[1.0, 0.0, 1.0], 0.0).unwrap();
    let ret = poincare_return_map(flow, &fib, ReturnOptions::default()).unwrap();
    assert!(check_equivariance(&ret, &sample_grid(3)));
    let rs = mz_rotation_set(&ret, 4, 5);
    assert!(!rs.vertices.is_empty());
}

#[test]
fn hedlund_verdicts() {
    let id = [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 0.0, 1.0]];
    let f = TorusMapLift::<f64>::two_param_shear(1.0, 1.0);
    match hedlund_scenario_check(&id, Some(&f), 3, 0.0) {
        HedlundVerdict::IndependentImpliesPeriodicSearch {
            det,
            interior,
            results,
        } => {
            assert_eq!(det, 1.0);
            assert_eq!(interior.points, vec![([1, 1], 3)]);
            assert_eq!(results.len(), 1);
        }
        v => panic!("{v:?}"),
    }
    let same = [[1.0, 0.2, 0.3]; 3];
    assert!(matches!(
        hedlund_scenario_check(&same, None, 3, 0.0),
        HedlundVerdict::Degenerate { .. }
    ));
    let line = [[1.0, 0.0, 0.0], [1.0, 0.5, 0.5], [1.0, 1.0, 1.0]];
    assert!(matches!(
        hedlund_scenario_check(&line, None, 3, 0.0),
        HedlundVerdict::Degenerate { .. }
    ));
}

#[test]
fn polygon_json() {
    let rs = RotationSet::from_points(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], 3, 1);
    assert_eq!(
        rs.to_json().to_string(),
        r#"{"vertices":[[0.0,0.0],[1.0,0.0],[0.0,1.0]]}"#
    );
}
