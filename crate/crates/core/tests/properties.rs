use opspread_core::experiment::io::{read_surface_csv, surface_csv_string};
use opspread_core::experiment::ExperimentConfig;
use opspread_core::ising::IsingParams;
use opspread_core::mitigation::{project_simplex, tmem_correct, zne_correct, TmemProblem, ZnePair};
use opspread_core::noise::{depolarizing_kraus, sample_counts, NoiseModel, ReadoutError};
use opspread_core::otoc::{build_surface_with, Execution, SpreadSurface, SurfacePoint};
use opspread_core::qsim::{BitstringDistribution, Circuit, Gate, StateVector};
use opspread_core::weave::{trotter_step, Weave, WeaveSchedule};
use opspread_core::{CMatrix, RMatrix};
use proptest::prelude::*;

fn on_simplex(p: &[f64], tol: f64) -> bool {
    p.iter().all(|&x| x >= -tol) && (p.iter().sum::<f64>() - 1.0).abs() < tol
}

fn distribution(n: usize) -> impl Strategy<Value = BitstringDistribution> {
    prop::collection::vec(0.0f64..1.0, 1 << n).prop_filter_map("nonzero mass", move |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-6)
            .then(|| BitstringDistribution::new(n, w.iter().map(|x| x / s).collect()).unwrap())
    })
}

fn gate(n: usize) -> impl Strategy<Value = Gate> {
    let angle = -7.0f64..7.0;
    let pair = (0..n, 0..n).prop_filter("distinct", |(a, b)| a != b);
    prop_oneof![
        (0..n, angle.clone()).prop_map(|(q, t)| Gate::rx(q, t)),
        (0..n, angle.clone()).prop_map(|(q, t)| Gate::pz(q, t)),
        (pair.clone(), angle).prop_map(|((a, b), t)| Gate::rzz(a, b, t)),
        pair.clone().prop_map(|(a, b)| Gate::cnot(a, b)),
        pair.prop_map(|(a, b)| Gate::cz(a, b)),
        (0..n).prop_map(Gate::h),
        (0..n).prop_map(Gate::s),
        (0..n).prop_map(Gate::sdg),
    ]
}

fn small_config(seed: u64) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(
        &format!(
            "regime = \"chaotic\"\nn = 3\ntau = 0.1\nell_max = 4\npipeline = \"mitigated\"\nshots = 256\nseed = {seed}\n"
        ),
        "prop",
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simplex_projection_lands_on_simplex(v in prop::collection::vec(-3.0f64..3.0, 1..40)) {
        let p = project_simplex(&v);
        prop_assert_eq!(p.len(), v.len());
        prop_assert!(on_simplex(&p, 1e-12));
    }

    #[test]
    fn simplex_projection_is_idempotent(v in prop::collection::vec(-3.0f64..3.0, 1..40)) {
        let p = project_simplex(&v);
        let q = project_simplex(&p);
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn simplex_projection_is_nearest(
        v in prop::collection::vec(-3.0f64..3.0, 2..12),
        w in prop::collection::vec(0.0f64..1.0, 12),
    ) {
        let p = project_simplex(&v);
        let s: f64 = w[..v.len()].iter().sum::<f64>().max(1e-9);
        let other: Vec<f64> = w[..v.len()].iter().map(|x| x / s).collect();
        let d = |x: &[f64]| x.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        prop_assert!(d(&p) <= d(&other) + 1e-10);
    }

    #[test]
    fn tmem_output_is_a_distribution(
        p in distribution(2),
        e0 in prop::collection::vec(0.0f64..0.3, 2),
        e1 in prop::collection::vec(0.0f64..0.3, 2),
    ) {
        let nm = NoiseModel {
            readout: e0.iter().zip(&e1).map(|(&a, &b)| ReadoutError { p1_given0: a, p0_given1: b }).collect(),
            ..NoiseModel::ideal(2)
        };
        let t = opspread_core::noise::build_confusion_matrix(&nm);
        let noisy = BitstringDistribution::new(2, (&t * nalgebra::DVector::from_column_slice(p.probabilities())).as_slice().to_vec()).unwrap();
        let prob = TmemProblem::new(t, noisy.clone()).unwrap();
        let sol = tmem_correct(&prob).unwrap();
        prop_assert!(on_simplex(sol.distribution.probabilities(), 1e-9));
        prop_assert!(sol.objective <= prob.objective(noisy.probabilities()) + 1e-12);
    }

    #[test]
    fn tmem_identity_is_a_fixed_point(p in distribution(3)) {
        let prob = TmemProblem::new(RMatrix::identity(8, 8), p.clone()).unwrap();
        let sol = tmem_correct(&prob).unwrap();
        for (a, b) in sol.distribution.probabilities().iter().zip(p.probabilities()) {
            prop_assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn zne_output_is_a_distribution(p1 in distribution(2), p3 in distribution(2)) {
        let out = zne_correct(&ZnePair::new(p1, p3).unwrap());
        prop_assert!(on_simplex(out.probabilities(), 1e-12));
    }

    #[test]
    fn gates_preserve_norm(gates in prop::collection::vec(gate(4), 0..60)) {
        let mut s = StateVector::plus(4).unwrap();
        for g in &gates {
            s.apply_gate(g).unwrap();
        }
        prop_assert!((s.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn circuit_unitary_is_unitary(gates in prop::collection::vec(gate(3), 0..30)) {
        let c = Circuit::from_gates(3, gates).unwrap();
        let u = c.unitary().unwrap();
        let err = (u.adjoint() * &u - CMatrix::identity(8, 8)).camax();
        prop_assert!(err < 1e-10);
    }

    #[test]
    fn circuit_then_dagger_is_identity(gates in prop::collection::vec(gate(3), 0..30)) {
        let c = Circuit::from_gates(3, gates).unwrap();
        let mut s = StateVector::basis(3, 5).unwrap();
        s.apply_circuit(&c).unwrap();
        s.apply_circuit(&c.dagger()).unwrap();
        prop_assert!((s.amplitude(5).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn depolarizing_kraus_is_trace_preserving(p in 0.0f64..=1.0) {
        let sum = depolarizing_kraus(p)
            .iter()
            .fold(CMatrix::zeros(4, 4), |acc, k| acc + k.adjoint() * k);
        prop_assert!((sum - CMatrix::identity(4, 4)).camax() < 1e-12);
    }

    #[test]
    fn weave_decomposition_covers_ell(k in 1usize..25, ell in 0usize..200) {
        let s = WeaveSchedule::new(0.05, k, ell);
        let d = s.decompose(ell);
        prop_assert_eq!(d.cell_applications * k + d.shift_duration_steps, ell);
        prop_assert!(d.shift_duration_steps < k);
    }

    #[test]
    fn weave_circuit_is_shift_then_cells(k in 1usize..7, ell in 0usize..20, tau in 0.01f64..0.2) {
        let p = IsingParams::new(3, -1.0, 0.7, 1.5).unwrap();
        let w = Weave::new(&p, WeaveSchedule::new(tau, k, ell)).unwrap();
        let d = w.schedule().decompose(ell);
        let mut expected = Circuit::new(3);
        if d.shift_duration_steps > 0 {
            expected.append(&trotter_step(&p, d.shift_duration_steps as f64 * tau).unwrap()).unwrap();
        }
        let cell = trotter_step(&p, k as f64 * tau).unwrap();
        for _ in 0..d.cell_applications {
            expected.append(&cell).unwrap();
        }
        prop_assert_eq!(w.circuit(ell).unwrap(), expected);
    }

    #[test]
    fn sampling_is_seed_deterministic(p in distribution(3), seed in any::<u64>()) {
        let a = sample_counts(&p, 500, seed).unwrap();
        let b = sample_counts(&p, 500, seed).unwrap();
        prop_assert_eq!(a.counts(), b.counts());
        prop_assert_eq!(a.shots(), 500);
    }

    #[test]
    fn csv_round_trips(
        n in 1usize..5,
        ell_max in 0usize..6,
        tau in 0.001f64..0.5,
        values in prop::collection::vec(prop::option::of(-4.0f64..4.0), 5 * 6 * 8),
    ) {
        let mut it = values.into_iter();
        let points = (1..=n)
            .flat_map(|j| (0..=ell_max).map(move |ell| (j, ell)))
            .map(|(j, ell)| SurfacePoint {
                j,
                ell,
                t: ell as f64 * tau,
                c_raw: it.next().flatten(),
                c_tmem: it.next().flatten(),
                c_corr: it.next().flatten(),
                c_exact: it.next().flatten(),
                f_abs: it.next().flatten(),
                ..Default::default()
            })
            .collect();
        let s = SpreadSurface { n, ell_max, tau, points, diagnostics: Default::default() };
        let text = surface_csv_string(&s);
        let back = read_surface_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(surface_csv_string(&back), text);
        prop_assert_eq!(back.points.len(), n * (ell_max + 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn surfaces_are_seed_deterministic(seed in 0u64..=i64::MAX as u64) {
        let cfg = small_config(seed);
        let a = build_surface_with(&cfg, Execution::Sequential).unwrap();
        let b = build_surface_with(&cfg, Execution::default()).unwrap();
        prop_assert_eq!(surface_csv_string(&a), surface_csv_string(&b));
    }
}

#[test]
fn distinct_seeds_give_distinct_sampled_surfaces() {
    let a = build_surface_with(&small_config(1), Execution::Sequential).unwrap();
    let b = build_surface_with(&small_config(2), Execution::Sequential).unwrap();
    assert_ne!(surface_csv_string(&a), surface_csv_string(&b));
}
