use super::*;
use crate::flow::{sample_path, FieldFlow, LinearFlow};
use crate::hamiltonian::mane_example_field;
use crate::homology::{minimal_slope, HomologyVector, NormModel, SlopeBound};
use crate::torus::{geodesible_tensor, MetricField};

fn inv_phi() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn mane_flow() -> FieldFlow<f64, fn(&[f64]) -> Vec<f64>> {
    FieldFlow::new(2, 0.05, mane_example_field::<f64> as fn(&[f64]) -> Vec<f64>)
}

#[test]
fn linear_rotation_vector_is_exact() {
    let v = vec![1.0, inv_phi()];
    let path = sample_path(&LinearFlow::new(v.clone()), &[0.3, 0.1], 0.5, 100.0);
    let est = rotation_vector(&path, 4).unwrap();
    assert!((est.value[0] - v[0]).abs() < 1e-9 && (est.value[1] - v[1]).abs() < 1e-9);
    assert!(est.cauchy_gap < 1e-9);
    assert_eq!(est.horizon, 100.0);
}

#[test]
fn mane_orbit_rotates_like_gamma1() {
    let path = sample_path(&mane_flow(), &[0.0, 0.3], 10.0, 1e4);
    let est = rotation_vector(&path, 4).unwrap();
    assert!(
        est.value[0].abs() < 1e-2 && (est.value[1] - 1.0).abs() < 1e-2,
        "{:?}",
        est.value
    );
}

#[test]
fn closed_orbit_class_per_period() {
    let path = sample_path(&mane_flow(), &[0.25, 0.0], 0.25, 1.0);
    let rec = quasi_orbit_class(&path, &Closer::Flat, 1.0).unwrap();
    assert_eq!(rec.total_class.0, vec![0, 1]);
    assert!(rec.closing_length < 1e-12);
    assert!(!rec.ambiguous);
    let est = rotation_vector(&path, 1).unwrap();
    assert_eq!(est.value[0], 0.0);
    assert!((est.value[1] - 1.0).abs() < 1e-12);
}

#[test]
fn irrational_linear_quasi_orbit() {
    let path = sample_path(
        &LinearFlow::new(vec![1.0, inv_phi()]),
        &[0.0, 0.0],
        1.0,
        100.0,
    );
    // nearest lattice point to (100, 61.803…)
    let rec = quasi_orbit_class(&path, &Closer::Flat, 100.0).unwrap();
    assert_eq!(rec.total_class.0, vec![100, 62]);
    assert!((rec.closing_length - (62.0 - 100.0 * inv_phi())).abs() < 1e-9);
    let zero = quasi_orbit_class(&path, &Closer::Flat, 0.0).unwrap();
    assert!(zero.total_class.is_zero());
    assert_eq!(zero.closing_length, 0.0);
    assert!(matches!(
        quasi_orbit_class(&path, &Closer::Flat, 200.0),
        Err(AsymptoticError::HorizonOutOfRange { .. })
    ));
}

#[test]
fn closing_metric_does_not_change_rotation() {
    let metric =
        MetricField::<f64>::conformal(2, 32, |x| 0.3 * (std::f64::consts::TAU * x[0]).cos())
            .unwrap();
    let grid = GeodesicGrid::new(&metric);
    let systole = grid
        .stable_norm_integer(&IntHomologyClass::new(vec![0, 1]))
        .unwrap();
    let diameter = grid.diameter(4);
    let v = vec![0.7, 0.2 * 2f64.sqrt()];
    let path = sample_path(&LinearFlow::new(v.clone()), &[0.1, 0.4], 1.0, 40.0);
    let rot = rotation_vector(&path, 1).unwrap().value;
    for horizon in [10.0, 25.0, 40.0] {
        let flat = quasi_orbit_class(&path, &Closer::Flat, horizon).unwrap();
        let curved = quasi_orbit_class(
            &path,
            &Closer::Grid {
                grid: &grid,
                systole,
            },
            horizon,
        )
        .unwrap();
        for i in 0..2 {
            let a = flat.total_class.0[i] as f64 / horizon;
            let b = curved.total_class.0[i] as f64 / horizon;
            assert!((a - b).abs() <= 2.0 * diameter / horizon + 1e-12);
        }
        for i in 0..2 {
            let full = path.lift_at(horizon)[i] - path.lift(0)[i];
            assert!(
                (full / horizon - flat.total_class.0[i] as f64 / horizon).abs()
                    <= (0.5f64.sqrt() + 1.0) / horizon
            );
        }
    }
    assert!((rot[0] - v[0]).abs() < 1e-12);
}

#[test]
fn linear_flow_accumulates_at_its_velocity() {
    let v = vec![1.0, inv_phi()];
    let bases: Vec<Vec<f64>> = (0..5)
        .map(|i| vec![i as f64 * 0.2, 0.13 * i as f64])
        .collect();
    let clusters = homology_accumulation(
        &LinearFlow::new(v.clone()),
        &Closer::Flat,
        &bases,
        &[200.0, 400.0],
        0.05,
    )
    .unwrap();
    assert_eq!(clusters.len(), 1);
    assert!((clusters[0].center[0] - v[0]).abs() < 5e-3);
    assert!((clusters[0].center[1] - v[1]).abs() < 5e-3);
    assert_eq!(clusters[0].members, 10);
}

#[test]
fn mane_accumulation_is_not_in_a_proper_cone() {
    let mut bases: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 / 8.0 + 0.01, 0.5]).collect();
    bases.push(vec![0.75, 0.0]);
    let clusters =
        homology_accumulation(&mane_flow(), &Closer::Flat, &bases, &[500.0], 0.05).unwrap();
    assert_eq!(clusters.len(), 2);
    let up = clusters.iter().find(|c| c.center[1] > 0.0).unwrap();
    let down = clusters.iter().find(|c| c.center[1] < 0.0).unwrap();
    assert!((up.center[1] - 1.0).abs() < 1e-2 && up.members == 8);
    assert!((down.center[1] + 1.0).abs() < 1e-12 && down.members == 1);
    let vectors: Vec<HomologyVector<f64>> = clusters
        .iter()
        .map(|c| HomologyVector(c.center.clone()))
        .collect();
    for axis in [[0.0, 1.0], [1.0, 0.0], [0.3, -0.8]] {
        let comp = vec![HomologyVector(vec![-axis[1], axis[0]])];
        let s = minimal_slope(
            &HomologyVector(axis.to_vec()),
            &comp,
            &NormModel::Euclidean,
            &vectors,
        )
        .unwrap();
        assert_eq!(s, SlopeBound::NotProper);
    }
}

#[test]
fn quadratic_helpers_on_flat_lattice() {
    let id = vec![
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ];
    assert_eq!(quadratic_systole(&id, 3), 1.0);
    assert!((quadratic_diameter(&id, 4) - 0.75f64.sqrt()).abs() < 1e-12);
    assert_eq!(shortest_transverse_class(&id, &[1, 0, 0]).0, vec![1, 0, 0]);
    let (k, d) = nearest_lattice_point(&id, &[2.4, -0.6, 0.5]);
    assert_eq!(&k[..2], &[2, -1]);
    assert!((d - (0.16f64 + 0.16 + 0.25).sqrt()).abs() < 1e-12);
}

#[test]
fn cone_audit_product_and_tilted() {
    let id = vec![
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ];
    let flat_norm = |v: &[f64]| linalg::norm2(v);
    let setup = ConeAuditSetup {
        axis: IntHomologyClass::new(vec![1, 0, 0]),
        base: vec![0.0, 0.3, 0.6],
        return_time: 1.0,
        diameter: quadratic_diameter(&id, 8),
        norm: &flat_norm,
        closer: Closer::Flat,
    };
    let audit = cone_bound_audit(&LinearFlow::new(vec![1.0, 0.0, 0.0]), &setup, 20).unwrap();
    assert!(audit.rows.iter().all(|r| (r.ratio - 1.0).abs() < 1e-12));

    let x = vec![1.0, 2f64.sqrt() - 1.0, (3f64.sqrt() - 1.0) / 2.0];
    let g = geodesible_tensor(&id, &x, &[1.0, 0.0, 0.0]).unwrap();
    let h = shortest_transverse_class(&g, &[1, 0, 0]);
    let gn = g.clone();
    let norm = move |v: &[f64]| quadratic_norm(&gn, v);
    let setup = ConeAuditSetup {
        axis: h,
        base: vec![0.0, 0.0, 0.0],
        return_time: 1.0,
        diameter: quadratic_diameter(&g, 8),
        norm: &norm,
        closer: Closer::Quadratic(g.clone()),
    };
    let audit = cone_bound_audit(&LinearFlow::new(x.clone()), &setup, 50).unwrap();
    assert!(audit.rows.iter().all(|r| r.slack >= 0.0));
    // ratios approach |X|_G / ℓ
    let limit = quadratic_norm(&g, &x) / audit.axis_length;
    assert!((audit.limsup - limit).abs() < 0.05);
    let mut buf = Vec::new();
    audit.write_csv(&mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 51);
}

#[test]
fn clustering_links_chains() {
    let v: Vec<Vec<f64>> = vec![
        vec![0.0, 0.0],
        vec![0.04, 0.0],
        vec![0.08, 0.0],
        vec![1.0, 1.0],
    ];
    let c = cluster_vectors(&v, 0.05);
    assert_eq!(c.len(), 2);
    assert_eq!(c[0].members, 3);
    assert!((c[0].center[0] - 0.04).abs() < 1e-12);
    assert!((c[0].radius - 0.04).abs() < 1e-12);
}
