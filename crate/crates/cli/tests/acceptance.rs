//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotlab_cli::{Report, ScenarioConfig, ScenarioId};
use rotlab_core::asymptotic::{normalized_classes, Closer};
use rotlab_core::flow::LiftedFlow;
use rotlab_core::hamiltonian::{integrate, HamiltonianModel, IntegratorConfig, PhaseState, Scheme};
use rotlab_core::homology::IntHomologyClass;
use rotlab_core::mather::{rationality_obstruction, totally_irrational_check, IrrationalVector};
use rotlab_core::rotation::{
    poincare_return_map, suspension_homology_set, ReturnOptions, RotationSet, SuspensionFlow,
    TorusMapLift,
};
use rotlab_core::torus::{tischler_fibration, GeodesicGrid, MetricField};
use serde_json::{json, Value};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn scenario(id: ScenarioId, parameters: Value) -> (Report, Duration) {
    let start = Instant::now();
    let (report, _) =
        rotlab_cli::execute(&ScenarioConfig::new(id, parameters, 20240607)).expect("scenario runs");
    (report, start.elapsed())
}

fn summarize(report: &Report) -> String {
    report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{}={:.3e}{}",
                c.name,
                c.value,
                if c.passed { "" } else { "!" }
            )
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn energy_conservation() -> Outcome {
    let start = Instant::now();
    let model = HamiltonianModel::<f64>::pendulum(2);
    let s0 = PhaseState::new(vec![0.1, 0.0], vec![0.5, 0.3]);
    let cfg = IntegratorConfig::new(Scheme::Verlet, 1e-3, 1.0).sampled(100_000);
    let traj = integrate(&model, &s0, 1000.0, &cfg).expect("integrates");
    let secs = start.elapsed().as_secs_f64();
    outcome(
        traj.max_drift < 1e-5 && secs < 10.0,
        format!(
            "max relative drift {:.2e} (< 1e-5), {secs:.2}s (< 10s)",
            traj.max_drift
        ),
    )
}

fn linear_flow_rotation() -> Outcome {
    let (r, _) = scenario(ScenarioId::LinearFlow, json!({}));
    let c = r.check("rotation_error").expect("check present");
    outcome(
        c.passed && c.value < 1e-9,
        format!("error {:.2e} (< 1e-9)", c.value),
    )
}

fn mane_counterexample() -> Outcome {
    let (r, t) = scenario(ScenarioId::ManeExample, json!({}));
    let secs = t.as_secs_f64();
    outcome(
        r.passed() && secs < 60.0,
        format!("{} in {secs:.1}s (< 60s)", summarize(&r)),
    )
}

fn flat_stable_norm() -> Outcome {
    let start = Instant::now();
    let grid = GeodesicGrid::new(&MetricField::<f64>::flat(2, 64));
    let mut classes = Vec::new();
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            if (a, b) != (0, 0) {
                classes.push(IntHomologyClass::new(vec![a, b]));
            }
        }
    }
    let norms = grid.stable_norms(&classes).expect("stable norms");
    let worst = classes
        .iter()
        .zip(&norms)
        .map(|(k, n)| {
            let euclid = ((k.0[0] * k.0[0] + k.0[1] * k.0[1]) as f64).sqrt();
            (n - euclid).abs() / euclid
        })
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 0.02 && secs < 60.0,
        format!(
            "{} classes, worst relative error {worst:.4} (< 0.02), {secs:.1}s",
            classes.len()
        ),
    )
}

fn cone_bound() -> Outcome {
    let (r, _) = scenario(ScenarioId::ConeAudit, json!({ "m_max": 50 }));
    outcome(r.passed(), summarize(&r))
}

fn rotation_sets() -> Outcome {
    let (r, _) = scenario(ScenarioId::RotationSet, json!({}));
    outcome(r.passed(), summarize(&r))
}

fn franks() -> Outcome {
    let (r, t) = scenario(ScenarioId::FranksExperiment, json!({}));
    let secs = t.as_secs_f64();
    let maps = r
        .checks
        .iter()
        .filter(|c| c.name.ends_with(".periodic_residual"))
        .count();
    outcome(
        r.passed() && maps == 10 && secs < 120.0,
        format!(
            "{maps} maps, {} failed checks, worst residual {:.1e}, {secs:.1}s (< 120s)",
            r.failed_checks().len(),
            r.checks
                .iter()
                .filter(|c| c.name.ends_with(".periodic_residual"))
                .map(|c| c.value)
                .fold(0.0, f64::max)
        ),
    )
}

fn test_maps() -> Vec<(&'static str, TorusMapLift<f64>)> {
    vec![
        ("identity", TorusMapLift::identity()),
        ("translation", TorusMapLift::translation([0.3, 0.7])),
        (
            "shear",
            TorusMapLift::simultaneous_shear([0.1, 0.1], [0.1, 0.1]),
        ),
    ]
}

fn suspension_consistency() -> Outcome {
    let (g, n) = (32, 1000);
    let mut details = Vec::new();
    let mut ok = true;
    for (name, f) in test_maps() {
        let predicted = suspension_homology_set(&f, g, n);
        // flow the suspension from mid-period starts and read off the
        // fibre part of the normalized class
        let flow = SuspensionFlow::new(f);
        let bases: Vec<Vec<f64>> = (0..g * g)
            .map(|i| {
                vec![
                    0.5,
                    ((i % g) as f64 + 0.25) / g as f64,
                    ((i / g) as f64 + 0.25) / g as f64,
                ]
            })
            .collect();
        let classes =
            normalized_classes(&flow, &Closer::Flat, &bases, &[n as f64]).expect("classes");
        let fibre_ok = classes.iter().all(|c| c[0] == 1.0);
        let sigma: Vec<[f64; 2]> = classes.iter().map(|c| [c[1], c[2]]).collect();
        let measured = RotationSet::from_points(&sigma, bases.len(), n);
        let d = measured.hausdorff(&predicted.sigma);
        ok &= fibre_ok && predicted.fibre_class == [1, 0, 0] && d < 0.02;
        details.push(format!("{name} {d:.1e}"));
    }
    outcome(ok, format!("Hausdorff (< 0.02): {}", details.join(", ")))
}

fn poincare_round_trip() -> Outcome {
    let fib = tischler_fibration(&[1.0, 0.0, 0.0], 0.0).expect("fibration");
    let mut details = Vec::new();
    let mut ok = true;
    for (name, f) in test_maps() {
        let flow = Arc::new(SuspensionFlow::new(f.clone()));
        assert_eq!(flow.dim(), 3);
        let ret = poincare_return_map(flow, &fib, ReturnOptions::default()).expect("return map");
        let worst = (0..100)
            .map(|i| {
                let z = [
                    (i % 10) as f64 / 10.0 + 0.013,
                    (i / 10) as f64 / 10.0 + 0.037,
                ];
                let (a, b) = (ret.apply(z), f.apply(z));
                (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
            })
            .fold(0.0, f64::max);
        ok &= worst < 1e-8;
        details.push(format!("{name} {worst:.1e}"));
    }
    outcome(
        ok,
        format!("max error on 100 points (< 1e-8): {}", details.join(", ")),
    )
}

fn mather_duality() -> Outcome {
    let (flat, _) = scenario(ScenarioId::MatherTable, json!({}));
    let pendulum = json!({
        "model": {
            "kind": "mechanical",
            "dimension": 2,
            "metric": "flat",
            "potential": { "terms": [{ "k": [1, 0], "cos": 1.0 }] }
        }
    });
    let (mech, _) = scenario(ScenarioId::MatherTable, pendulum);
    let ok = flat.passed()
        && mech
            .check("alpha_zero_minus_critical_value")
            .is_some_and(|c| c.passed)
        && mech.check("fenchel_young_min").is_some_and(|c| c.passed);
    outcome(
        ok,
        format!(
            "flat: {} | pendulum: {}",
            summarize(&flat),
            summarize(&mech)
        ),
    )
}

fn det3(a: &[Vec<i64>]) -> i64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

fn exact_algebra() -> Outcome {
    let (r, _) = scenario(ScenarioId::HedlundCheck, json!({}));
    let unit_cases = [
        "unit_case.basis",
        "unit_case.rational",
        "unit_case.dependent",
    ]
    .iter()
    .all(|n| r.check(n).is_some_and(|c| c.passed));

    let basis = ["1", "sqrt2", "sqrt3"];
    let v1 =
        IrrationalVector::from_integers(&basis, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])
            .unwrap();
    let v2 =
        IrrationalVector::from_integers(&basis, &[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]])
            .unwrap();
    let w = rationality_obstruction(&v1, &v2).expect("witness");
    let rational_row = |row: &[num_rational::BigRational]| {
        row.iter()
            .zip(&w.w.basis)
            .all(|(q, b)| b == "1" || q.is_zero())
    };
    let witness_ok = rational_row(&w.w.coeffs[0])
        && rational_row(&w.w.coeffs[1])
        && !totally_irrational_check(&w.w);

    let cases = [
        (v1.clone(), true),
        (
            IrrationalVector::from_integers(&basis, &[vec![1, 0, 0], vec![2, 0, 0], vec![3, 0, 0]])
                .unwrap(),
            false,
        ),
        (
            IrrationalVector::from_integers(&basis, &[vec![0, 1, 0], vec![0, 2, 0], vec![1, 0, 0]])
                .unwrap(),
            false,
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut invariant = true;
    let mut tested = 0;
    while tested < 50 {
        let a: Vec<Vec<i64>> = (0..3)
            .map(|_| (0..3).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        if det3(&a).abs() != 1 {
            continue;
        }
        tested += 1;
        invariant &= cases
            .iter()
            .all(|(v, truth)| totally_irrational_check(&v.transform(&a)) == *truth);
    }
    outcome(
        unit_cases && witness_ok && invariant && r.passed(),
        format!("unit cases {unit_cases}, witness rational rows {witness_ok}, invariant on {tested} matrices {invariant}"),
    )
}

fn tischler() -> Outcome {
    let (r, _) = scenario(ScenarioId::TischlerDemo, json!({}));
    outcome(r.passed(), summarize(&r))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("energy conservation", energy_conservation),
        ("rotation vector exactness", linear_flow_rotation),
        ("Mañé counterexample", mane_counterexample),
        ("flat stable norm", flat_stable_norm),
        ("cone bound audit", cone_bound),
        ("rotation sets", rotation_sets),
        ("Franks experiment", franks),
        ("suspension consistency", suspension_consistency),
        ("Poincaré round trip", poincare_round_trip),
        ("Mather duality", mather_duality),
        ("exact algebra", exact_algebra),
        ("Tischler approximation", tischler),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!(
            "{:>2} {} {name}: {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
