use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::hamiltonian::{critical_value_mechanical, HamiltonianModel, Potential};

fn surd(label: &str) -> QuadraticSurd {
    QuadraticSurd::parse_label(label).unwrap()
}

fn int(n: i64) -> QuadraticSurd {
    QuadraticSurd::integer(n)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn surd_arithmetic() {
    let (r2, r3) = (surd("sqrt2"), surd("sqrt3"));
    assert_eq!(
        (r2.clone() + r3.clone()) * (r2.clone() - r3.clone()),
        int(-1)
    );
    assert_eq!(r2.clone() * r3.clone() * r3.clone(), int(3) * r2.clone());
    assert_eq!(surd("sqrt8"), int(2) * r2.clone());
    assert_eq!(surd("√(12)"), int(2) * r3.clone());
    assert_eq!(surd("sqrt6") * r3.clone(), int(3) * r2.clone());
    let x = int(1) + r2.clone() + r3.clone() + surd("sqrt6") * int(5);
    assert_eq!(x.clone() * x.inverse().unwrap(), QuadraticSurd::one());
    assert_eq!(x.clone() / x.clone(), QuadraticSurd::one());
    assert!(QuadraticSurd::zero().inverse().is_none());
    assert!((x.to_f64() - (1.0 + 2f64.sqrt() + 3f64.sqrt() + 5.0 * 6f64.sqrt())).abs() < 1e-12);
    assert_eq!(QuadraticSurd::field_basis([&r2, &r3]), vec![1, 2, 3, 6]);
    assert_eq!((int(2) * r2.clone() - r3).to_string(), "2·√2 - √3");
    assert!(QuadraticSurd::parse_label("pi").is_none());
}

#[test]
fn totally_irrational_unit_cases() {
    let basis = ["1", "sqrt2", "sqrt3"];
    let v = IrrationalVector::from_integers(&basis, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])
        .unwrap();
    assert!(totally_irrational_check(&v));
    let v = IrrationalVector::from_integers(&basis, &[vec![1, 0, 0], vec![2, 0, 0], vec![3, 0, 0]])
        .unwrap();
    assert!(!totally_irrational_check(&v));
    let v = IrrationalVector::from_integers(&basis, &[vec![0, 1, 0], vec![0, 2, 0], vec![1, 0, 0]])
        .unwrap();
    assert!(!totally_irrational_check(&v));
}

fn random_unimodular(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let mut a = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
    for _ in 0..6 {
        let (i, j) = (rng.gen_range(0..3), rng.gen_range(0..3));
        if i == j {
            a.swap(i, (i + 1) % 3);
            continue;
        }
        let k: i64 = rng.gen_range(-2..=2);
        for c in 0..3 {
            a[i][c] += k * a[j][c];
        }
    }
    a
}

#[test]
fn check_is_invariant_under_unimodular_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let basis = ["1", "sqrt2", "sqrt3"];
    let cases = [
        IrrationalVector::from_integers(&basis, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])
            .unwrap(),
        IrrationalVector::from_integers(&basis, &[vec![0, 1, 0], vec![0, 2, 0], vec![1, 0, 0]])
            .unwrap(),
        IrrationalVector::from_integers(&basis, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]])
            .unwrap(),
    ];
    for _ in 0..50 {
        let a = random_unimodular(&mut rng);
        assert!(crate::linalg::is_unimodular(&a));
        for v in &cases {
            assert_eq!(
                totally_irrational_check(&v.transform(&a)),
                totally_irrational_check(v)
            );
        }
    }
}

#[test]
fn obstruction_witness_matches_hand_computation() {
    let basis = ["1", "sqrt2", "sqrt3"];
    let v1 =
        IrrationalVector::from_integers(&basis, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])
            .unwrap();
    let v2 =
        IrrationalVector::from_integers(&basis, &[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]])
            .unwrap();
    let w = rationality_obstruction(&v1, &v2).unwrap();
    // α(1 + √2) = 1 by symmetry, so α = β = √2 − 1 and w₃ = 2(√2 − 1)√3
    let a = surd("sqrt2") - int(1);
    assert_eq!(w.rows, [0, 1]);
    assert_eq!(w.alpha, a);
    assert_eq!(w.beta, a);
    assert_eq!(w.q3, int(2) * surd("sqrt6") - int(2) * surd("sqrt3"));
    assert_eq!(w.w.basis, vec!["1", "sqrt2", "sqrt3", "sqrt6"]);
    let one = vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)];
    assert_eq!(w.w.coeffs[0], one);
    assert_eq!(w.w.coeffs[1], one);
    assert!(!w.w_totally_irrational);
    assert!(!totally_irrational_check(&w.w));
    let approx = w.w.approx().unwrap();
    assert!((approx[2] - (2.0 * 6f64.sqrt() - 2.0 * 3f64.sqrt())).abs() < 1e-12);
}

#[test]
fn obstruction_errors() {
    let basis = ["1", "sqrt2", "sqrt3"];
    let v1 =
        IrrationalVector::from_integers(&basis, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])
            .unwrap();
    let v2 =
        IrrationalVector::from_integers(&basis, &[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]])
            .unwrap();
    assert_eq!(
        rationality_obstruction(&v1, &v2),
        Err(ExactError::NotIndependent)
    );
    let rational =
        IrrationalVector::from_integers(&basis, &[vec![1, 0, 0], vec![2, 0, 0], vec![3, 0, 0]])
            .unwrap();
    assert_eq!(
        rationality_obstruction(&rational, &v1),
        Err(ExactError::NotTotallyIrrational { which: 1 })
    );
    let pi = IrrationalVector::from_integers(
        &["1", "pi", "e"],
        &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
    )
    .unwrap();
    assert!(matches!(
        rationality_obstruction(&pi, &pi),
        Err(ExactError::NotApplicable(_))
    ));
    assert!(IrrationalVector::from_integers(&basis, &[vec![1, 0]]).is_err());
}

#[test]
fn irrational_vector_json() {
    let text = r#"{"basis":["1","sqrt2","sqrt3"],"coeffs":[[[1,2],[0,1],[0,1]],[[0,1],["3","4"],[0,1]],[0,"5/3",[0,1]]]}"#;
    let v: IrrationalVector = serde_json::from_str(text).unwrap();
    assert_eq!(v.coeffs[0][0], rat(1, 2));
    assert_eq!(v.coeffs[1][1], rat(3, 4));
    assert_eq!(v.coeffs[2][1], rat(5, 3));
    let back: IrrationalVector = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(back, v);
    assert!(
        serde_json::from_str::<IrrationalVector>(r#"{"basis":["1"],"coeffs":[[[1,0]]]}"#).is_err()
    );
    assert!(
        serde_json::from_str::<IrrationalVector>(r#"{"basis":["1"],"coeffs":[[1]],"x":1}"#)
            .is_err()
    );
}

#[test]
fn rational_approximation_finds_smallest_denominator() {
    assert_eq!(
        rational_approximation(&[0.5, -0.25], 64),
        Some((vec![2, -1], 4))
    );
    assert_eq!(
        rational_approximation(&[0.0, 0.0], 64),
        Some((vec![0, 0], 1))
    );
    assert_eq!(rational_approximation(&[2f64.sqrt(), 0.0], 64), None);
}

#[test]
fn action_gradient_matches_differences() {
    let model = HamiltonianModel::<f64>::pendulum(2);
    let mut curve = PeriodicCurve::straight(
        &[0.1, 0.2],
        crate::homology::IntHomologyClass::new(vec![1, 0]),
        1.0,
        16,
    );
    for (i, n) in curve.nodes.iter_mut().enumerate() {
        n[1] += 0.05 * (i as f64).sin();
    }
    let (_, g) = curve_action(&model, &curve).unwrap();
    let eps = 1e-6;
    for i in [0, 5, 15] {
        for c in 0..2 {
            let mut p = curve.clone();
            p.nodes[i][c] += eps;
            let mut m = curve.clone();
            m.nodes[i][c] -= eps;
            let fd = (curve_action(&model, &p).unwrap().0 - curve_action(&model, &m).unwrap().0)
                / (2.0 * eps);
            assert!((fd - g[i][c]).abs() < 1e-8, "{i},{c}: {fd} vs {}", g[i][c]);
        }
    }
}

#[test]
fn flat_beta_is_half_square() {
    let model = HamiltonianModel::<f64>::flat(2);
    let opts = BetaOptions::default();
    for h in [[1.0, 0.0], [0.5, -0.25], [0.0, 0.0], [-1.5, 2.0]] {
        let b = beta(&model, &h, &opts).unwrap();
        assert!(b.converged);
        assert!((b.value - 0.5 * (h[0] * h[0] + h[1] * h[1])).abs() < 1e-3);
        let curve = b.optimizer.unwrap();
        assert_eq!(curve.rotation_vector(), h.to_vec());
    }
    // irrational h: envelope of rational corners, an upper bound
    let h = [2f64.sqrt() / 2.0, 3f64.sqrt() / 5.0];
    let b = beta(&model, &h, &opts).unwrap();
    let exact = 0.5 * (h[0] * h[0] + h[1] * h[1]);
    assert!(
        b.value >= exact - 1e-12 && b.value - exact < 5e-3,
        "{}",
        b.value
    );
    assert!(b.optimizer.is_none());
}

#[test]
fn pendulum_beta_at_rest_and_in_the_free_direction() {
    let model = HamiltonianModel::<f64>::pendulum(2);
    let opts = BetaOptions::default();
    let b = beta(&model, &[0.0, 0.0], &opts).unwrap();
    assert!((b.value + 1.0).abs() < 1e-3, "{}", b.value);
    let b = beta(&model, &[0.0, 0.5], &opts).unwrap();
    assert!((b.value - (-1.0 + 0.125)).abs() < 1e-3, "{}", b.value);
}

/// Period-one rotating pendulum for `L = ½v² + cos 2πx`, by energy
/// conservation and one-dimensional quadrature.
fn rotating_pendulum_action() -> f64 {
    let simpson = |f: &dyn Fn(f64) -> f64| {
        let n = 20_000;
        let h = 1.0 / n as f64;
        (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * f(i as f64 * h)
            })
            .sum::<f64>()
            * h
            / 3.0
    };
    let speed = |e: f64, x: f64| (2.0 * (e + (2.0 * std::f64::consts::PI * x).cos())).sqrt();
    let period = |e: f64| simpson(&|x| 1.0 / speed(e, x));
    let (mut lo, mut hi) = (1.0 + 1e-9, 50.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if period(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let e = 0.5 * (lo + hi);
    simpson(&|x| {
        let v = speed(e, x);
        (0.5 * v * v + (2.0 * std::f64::consts::PI * x).cos()) / v
    })
}

#[test]
fn pendulum_beta_matches_quadrature() {
    let model = HamiltonianModel::<f64>::pendulum(2);
    let opts = BetaOptions {
        nodes: 128,
        ..BetaOptions::default()
    };
    let b = beta(&model, &[1.0, 0.0], &opts).unwrap();
    let oracle = rotating_pendulum_action();
    assert!(b.converged);
    assert!((b.value - oracle).abs() < 1e-3, "{} vs {oracle}", b.value);
    // curves are a subclass of measures; the discrete value is close but
    // carries the midpoint-rule error of order 1/N²
    assert!(b.value < oracle + 1e-3);
}

#[test]
fn beta_is_convex_and_superlinear_on_samples() {
    let model = HamiltonianModel::<f64>::pendulum(2);
    let opts = BetaOptions::default();
    let mut table = BetaTable::from_model(model, opts);
    let hs: Vec<Vec<f64>> = vec![
        vec![0.0, 0.0],
        vec![0.5, 0.0],
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![0.5, 0.5],
        vec![1.0, 1.0],
        vec![0.25, 0.5],
        vec![1.5, 0.0],
    ];
    table.prefill(&hs).unwrap();
    let s = table.samples();
    let value = |h: &[f64]| s.iter().find(|(x, _)| x == h).unwrap().1;
    for (a, b, m) in [
        ([0.0, 0.0], [1.0, 0.0], [0.5, 0.0]),
        ([0.0, 0.0], [1.0, 1.0], [0.5, 0.5]),
        ([0.5, 0.0], [0.0, 1.0], [0.25, 0.5]),
        ([1.0, 0.0], [0.0, 1.0], [0.5, 0.5]),
    ] {
        assert!(value(&m) <= 0.5 * (value(&a) + value(&b)) + 2e-3);
    }
    let ratio: Vec<f64> = [0.5, 1.0, 1.5]
        .iter()
        .map(|t| value(&[*t, 0.0]) / t)
        .collect();
    assert!(ratio.windows(2).all(|w| w[0] < w[1]), "{ratio:?}");
}

#[test]
fn flat_alpha_and_double_conjugate() {
    let mut table = BetaTable::from_model(HamiltonianModel::<f64>::flat(2), BetaOptions::default());
    let grid = SampleGrid::cube(2, 2.0, 9);
    let cgrid = SampleGrid::cube(2, 1.0, 9);
    let alphas: Vec<AlphaEvaluation<f64>> = cgrid
        .points()
        .iter()
        .map(|c| alpha(&mut table, &grid, c).unwrap())
        .collect();
    for a in &alphas {
        assert!((a.value - 0.5 * (a.c[0] * a.c[0] + a.c[1] * a.c[1])).abs() < 2e-3);
        assert!(a.converged);
    }
    assert!(fenchel_young_min(&alphas, &table.samples()) >= -1e-6);
    // β** on the inner grid
    let alpha_samples: Vec<(Vec<f64>, f64)> =
        alphas.iter().map(|a| (a.c.clone(), a.value)).collect();
    for h in SampleGrid::cube(2, 0.5, 5).points() {
        let (v, _) = conjugate_max(&alpha_samples, &h).unwrap();
        assert!((v - 0.5 * (h[0] * h[0] + h[1] * h[1])).abs() < 5e-3);
    }
    assert!(matches!(
        alpha(&mut table, &grid, &[3.0, 0.0]),
        Err(MatherError::BoxTooSmall { .. })
    ));
}

#[test]
fn mechanical_alpha_at_zero_is_critical_value() {
    let model = HamiltonianModel::<f64>::pendulum(2);
    let critical = critical_value_mechanical(
        &Potential::Fourier(crate::hamiltonian::FourierSeries::cos(vec![1, 0], 1.0)).to_grid(2, 64),
    );
    let mut table = BetaTable::from_model(model, BetaOptions::default());
    let a = alpha(&mut table, &SampleGrid::cube(2, 1.0, 5), &[0.0, 0.0]).unwrap();
    assert!((a.value - 1.0).abs() < 2e-3, "{}", a.value);
    assert!((a.value - critical).abs() < 2e-3);
}

#[test]
fn subdifferential_width() {
    let dirs = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
    let smooth = |c: &[f64]| Ok(0.5 * (c[0] * c[0] + c[1] * c[1]));
    let w1 = alpha_subdifferential_width(smooth, &[0.2, 0.1], &dirs, 1e-2).unwrap();
    let w2 = alpha_subdifferential_width(smooth, &[0.2, 0.1], &dirs, 1e-3).unwrap();
    assert!((w1 - 1e-2).abs() < 1e-9 && (w2 - 1e-3).abs() < 1e-9);
    let kink = |c: &[f64]| Ok(c[0].abs());
    let w = alpha_subdifferential_width(kink, &[0.0, 0.0], &dirs, 1e-3).unwrap();
    assert!((w - 2.0).abs() < 1e-12);
    // the same kink recovered from β samples supported on a segment
    let mut table = BetaTable::from_fn(|h: &[f64]| {
        if h[1] == 0.0 && h[0].abs() <= 1.0 {
            0.0
        } else {
            1e3
        }
    });
    let seg: Vec<Vec<f64>> = (0..=8).map(|i| vec![-1.0 + 0.25 * i as f64, 0.0]).collect();
    table.prefill(&seg).unwrap();
    let samples = table.samples();
    let from_samples = |c: &[f64]| Ok(conjugate_max(&samples, c).unwrap().0);
    let w = alpha_subdifferential_width(from_samples, &[0.0, 0.0], &dirs[..1], 1e-3).unwrap();
    assert!((w - 2.0).abs() < 1e-12);
}

#[test]
fn csv_tables() {
    let mut table = BetaTable::from_model(HamiltonianModel::<f64>::flat(2), BetaOptions::default());
    table.prefill(&[vec![0.5, 0.0]]).unwrap();
    let mut out = Vec::new();
    table.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("h1,h2,value,converged\n0.5,0,0.125"));
    let a = alpha(&mut table, &SampleGrid::cube(2, 1.0, 5), &[0.0, 0.0]).unwrap();
    let mut out = Vec::new();
    write_alpha_csv(&[a], &mut out).unwrap();
    assert!(String::from_utf8(out)
        .unwrap()
        .starts_with("c1,c2,value,converged\n0,0,0,true"));
}
