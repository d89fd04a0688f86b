use approx::assert_relative_eq;
use eigencond::critical::{
    critical_report, default_method, exact_critical_energy, stochastic_critical_energy,
    stochastic_inverse_trace, tridiagonal_critical_energies, CriticalMethod, ProbeDistribution,
    StochasticOptions,
};
use eigencond::linalg::deflated_cg;
use eigencond::models::{self, Family, ModelSpec};
use eigencond::statespace::{BuildOptions, HamiltonianOperator, Representation};
use proptest::prelude::*;

fn diag(e: &[f64]) -> HamiltonianOperator {
    HamiltonianOperator::new(
        "diag",
        2,
        Representation::Diagonal { energies: e.to_vec() },
        BuildOptions::default(),
    )
    .unwrap()
}

#[test]
fn rademacher_probes_are_exact_on_diagonal_operators() {
    // |z_i|² = 1, so every probe returns Σ 1/E_i on a diagonal operator
    let h = diag(&[0.0, 1.0, 2.0, 4.0]);
    let opts = StochasticOptions {
        probes: 8,
        distribution: ProbeDistribution::Rademacher,
        solver_tol: 1e-13,
        ..Default::default()
    };
    let est = stochastic_inverse_trace(&h, 0..8, &opts).unwrap();
    for v in &est.values {
        assert_relative_eq!(*v, 1.0 + 0.5 + 0.25, max_relative = 1e-10);
    }
    let r = stochastic_critical_energy(&h, &opts).unwrap();
    assert_relative_eq!(r.eps_c_minus, 3.0 / 1.75 / 2.0, max_relative = 1e-10);
    assert!(r.stderr.unwrap() < 1e-10);
}

#[test]
fn deflated_solution_is_orthogonal_to_ground_space() {
    let h = models::build(&ModelSpec::new(Family::Heisenberg1d, 6)).unwrap();
    let basis = &h.ground_space().basis;
    let b: Vec<f64> = (0..h.dim()).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
    let out = deflated_cg(&h, basis, &b, 1e-12, 2000).unwrap();
    for g in basis {
        let overlap: f64 = g.iter().zip(&out.solution).map(|(a, b)| a * b).sum();
        assert!(overlap.abs() < 1e-10);
    }
}

#[test]
fn stochastic_estimate_agrees_with_exact_sum() {
    let h = models::build(&ModelSpec::new(Family::Mfim1d, 8)).unwrap();
    let exact = exact_critical_energy(&h).unwrap();
    let opts = StochasticOptions {
        probes: 400,
        seed: 2,
        ..Default::default()
    };
    let st = stochastic_critical_energy(&h, &opts).unwrap();
    assert!((st.eps_c_minus - exact.eps_c_minus).abs() < 4.0 * st.stderr.unwrap());
    assert!((st.eps_c_plus - exact.eps_c_plus).abs() < 4.0 * st.stderr_plus.unwrap());
    assert_eq!(st.m, Some(400));
    assert_eq!(st.seed, Some(2));
}

#[test]
fn dispatch_rules() {
    assert_eq!(default_method(&ModelSpec::tfim1d(40, 5.0)), CriticalMethod::FreeFermion);
    assert_eq!(
        default_method(&ModelSpec::new(Family::Tfim2d, 16).with("h_x", 10.0)),
        CriticalMethod::StochasticTrace
    );
    assert_eq!(default_method(&ModelSpec::new(Family::Heisenberg1d, 14)), CriticalMethod::StochasticTrace);
    assert_eq!(default_method(&ModelSpec::new(Family::Mfim1d, 12)), CriticalMethod::ExactSum);
    assert_eq!(default_method(&ModelSpec::new(Family::Goe, 16)), CriticalMethod::ExactSum);
    let r = critical_report(&ModelSpec::tfim1d(60, 5.0), None, &StochasticOptions::default()).unwrap();
    assert_eq!(r.method, CriticalMethod::FreeFermion);
}

#[test]
fn report_json_fields() {
    let r = critical_report(&ModelSpec::new(Family::Goe, 6).with_seed(1), None, &Default::default()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["method", "model", "V", "eps_c_minus", "eps_c_plus", "stderr", "m", "solver_tol", "seed"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["method"], "exact-sum");
}

fn spd_tridiagonal() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-3.0..3.0f64, n),
            prop::collection::vec(0.1..2.0f64, n - 1),
        )
    })
}

proptest! {
    #[test]
    fn tridiagonal_path_matches_full_spectrum((d, o) in spd_tridiagonal()) {
        let fast = tridiagonal_critical_energies(&d, &o).unwrap();
        let mut ev = eigencond::linalg::tridiagonal_eigenvalues(&d, &o).unwrap();
        ev.sort_by(f64::total_cmp);
        let lo = ev[0];
        let hi = *ev.last().unwrap();
        let n = ev.len() as f64;
        let inv: f64 = ev[1..].iter().map(|e| 1.0 / (e - lo)).sum();
        let inv_up: f64 = ev[..ev.len() - 1].iter().map(|e| 1.0 / (hi - e)).sum();
        prop_assume!(ev[1] - lo > 1e-6 && hi - ev[ev.len() - 2] > 1e-6);
        prop_assert!((fast.e_c_minus / ((n - 1.0) / inv) - 1.0).abs() < 1e-6);
        prop_assert!((fast.e_c_plus / ((hi - lo) - (n - 1.0) / inv_up) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn critical_energies_are_ordered(e in prop::collection::vec(0.01..10.0f64, 3..40)) {
        let mut levels = vec![0.0, 10.5];
        levels.extend(e);
        let h = diag(&levels);
        let r = exact_critical_energy(&h).unwrap();
        // harmonic means bounded by the arithmetic means over the same levels
        let top = h.width();
        let n = (levels.len() - 1) as f64;
        let above_ground = levels[1..].iter().sum::<f64>() / n / 2.0;
        let below_top = levels.iter().filter(|&&e| e < top).sum::<f64>() / n / 2.0;
        prop_assert!(0.0 < r.eps_c_minus && r.eps_c_minus <= above_ground * (1.0 + 1e-12));
        prop_assert!(r.eps_c_plus >= below_top * (1.0 - 1e-12) && r.eps_c_plus < top / 2.0);
    }
}
