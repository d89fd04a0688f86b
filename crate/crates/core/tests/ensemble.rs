use approx::assert_relative_eq;
use eigencond::critical::exact_critical_energy_minus;
use eigencond::ensemble::{
    bulk_energy, critical_energy_moment_expansion, critical_energy_moment_series, ensemble_point,
    mirror_point, reflect_beta, scaling_f, semicircle_critical_energies, solve_beta_for_energy,
    typical_weights, EnsembleCurve,
};
use eigencond::statespace::{DegeneracyPolicy, Spectrum};
use proptest::prelude::*;

fn spectrum(levels: &[f64]) -> Spectrum {
    Spectrum::from_energies(3, levels, DegeneracyPolicy::Tolerance).unwrap()
}

fn levels() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 3..64).prop_filter("non-degenerate width", |v| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let second = v.iter().filter(|&&x| x > lo + 1e-6).count();
        hi - lo > 1e-3 && second > 0
    })
}

/// Direct evaluation of the rational weights p ∝ 1/(1 + βE).
fn oracle(levels: &[f64], beta: f64) -> (f64, f64) {
    let lo = levels.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = levels.iter().map(|e| 1.0 / (1.0 + beta * (e - lo))).collect();
    let z: f64 = w.iter().sum();
    let e: f64 = levels.iter().zip(&w).map(|(e, w)| (e - lo) * w).sum::<f64>() / z;
    (z, e)
}

#[test]
fn four_level_curve_matches_direct_sums() {
    let lv = [0.0, 1.0, 2.0, 3.0];
    let s = spectrum(&lv);
    for beta in [-0.3, 0.0, 0.5, 2.0, 1e4] {
        let p = ensemble_point(&s, beta).unwrap();
        let (z, e) = oracle(&lv, beta);
        assert_relative_eq!(p.z, z, max_relative = 1e-13);
        assert_relative_eq!(p.e_av, e, max_relative = 1e-13);
        assert_relative_eq!(p.p_gs, 1.0 / z, max_relative = 1e-13);
        assert_relative_eq!(p.p_anti_gs, 1.0 / (1.0 + 3.0 * beta) / z, max_relative = 1e-13);
    }
    assert_eq!(ensemble_point(&s, 0.0).unwrap().e_av, 1.5);
}

#[test]
fn pole_is_rejected() {
    let s = spectrum(&[0.0, 1.0, 2.0]);
    assert!(ensemble_point(&s, -0.5).is_err());
    assert!(ensemble_point(&s, -0.6).is_err());
}

#[test]
fn semicircle_values() {
    let (m, p) = semicircle_critical_energies(1.0, 1.0);
    assert_relative_eq!(m, 0.5, epsilon = 1e-14);
    assert_relative_eq!(p, 1.5, epsilon = 1e-14);
}

#[test]
fn scaling_function_limits() {
    assert_relative_eq!(scaling_f(0.0), 1.0, epsilon = 1e-15);
    assert_relative_eq!(scaling_f(-50.0), 50.0, max_relative = 1e-3);
    assert_relative_eq!(scaling_f(1e8), 1e-8, max_relative = 1e-12);
}

#[test]
fn moment_expansion_on_two_level_spins() {
    // V independent spins with levels {0, 2}: ε∞ = 1, s² = 1, ε_anti = 2
    let levels: Vec<f64> = (0..1u32 << 10).map(|k| 2.0 * k.count_ones() as f64).collect();
    let s = Spectrum::from_energies(10, &levels, DegeneracyPolicy::Tolerance).unwrap();
    let moments = s.moments(8);
    assert_relative_eq!(moments.eps_infinity, 1.0, epsilon = 1e-12);
    assert_relative_eq!(moments.s2, 1.0, epsilon = 1e-12);
    let (m, p) = critical_energy_moment_expansion(&moments, 10, 2.0);
    assert_relative_eq!(m, 1.0 - 0.1, epsilon = 1e-12);
    assert_relative_eq!(p, 1.0 + 0.1, epsilon = 1e-12);
    let exact = exact_critical_energy_minus(&s).unwrap() / 10.0;
    let (series, _) = critical_energy_moment_series(&moments, 2.0);
    assert!((series - exact).abs() < (m - exact).abs());
}

proptest! {
    #[test]
    fn weights_are_normalized(lv in levels(), t in 0.0..1.0f64) {
        let s = spectrum(&lv);
        let beta = -0.99 / s.width() + t * 50.0;
        let w = typical_weights(&s, beta).unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(w.iter().all(|&x| x > 0.0));
        let p = ensemble_point(&s, beta).unwrap();
        let bulk: f64 = w[s.ground_degeneracy..w.len() - s.anti_degeneracy].iter().sum();
        prop_assert!((p.p_gs + p.p_anti_gs + bulk - 1.0).abs() < 1e-12);
    }

    #[test]
    fn average_energy_decreases_with_beta(lv in levels(), a in -0.9..50.0f64, d in 1e-3..10.0f64) {
        let s = spectrum(&lv);
        let b0 = a / s.width();
        let b1 = b0 + d;
        prop_assert!(ensemble_point(&s, b1).unwrap().e_av < ensemble_point(&s, b0).unwrap().e_av);
    }

    #[test]
    fn bulk_energy_bounded_by_critical(lv in levels(), lb in -6.0..12.0f64) {
        let s = spectrum(&lv);
        let ec = exact_critical_energy_minus(&s).unwrap();
        let beta = 10f64.powf(lb);
        let e = bulk_energy(&s, beta).unwrap();
        prop_assert!(e >= ec * (1.0 - 1e-10));
        prop_assert!(bulk_energy(&s, beta * 2.0).unwrap() <= e * (1.0 + 1e-12));
    }

    #[test]
    fn critical_energy_is_between_ground_and_mean(lv in levels()) {
        let s = spectrum(&lv);
        let ec = exact_critical_energy_minus(&s).unwrap();
        prop_assert!(ec > 0.0);
        let bulk_mean = s.bulk().iter().sum::<f64>() / s.bulk().len() as f64;
        prop_assert!(ec <= bulk_mean * (1.0 + 1e-12));
    }

    #[test]
    fn solving_for_beta_inverts_the_curve(lv in levels(), t in 0.02..0.98f64) {
        let s = spectrum(&lv);
        let target = t * s.width();
        let beta = solve_beta_for_energy(&s, target).unwrap();
        let back = ensemble_point(&s, beta).unwrap().e_av;
        prop_assert!((back - target).abs() <= 1e-8 * s.width());
    }

    #[test]
    fn reflection_is_an_involution(lv in levels(), b in 0.0..100.0f64) {
        let s = spectrum(&lv);
        let w = s.width();
        let r = reflect_beta(b, w);
        prop_assert!((reflect_beta(r, w) - b).abs() <= 1e-9 * (1.0 + b));
        let mirrored = mirror_point(&ensemble_point(&s.reflected(), b).unwrap(), w);
        let direct = ensemble_point(&s, r).unwrap();
        prop_assert!((mirrored.e_av - direct.e_av).abs() <= 1e-9 * w);
        prop_assert!((mirrored.p_gs - direct.p_gs).abs() <= 1e-9);
    }

    #[test]
    fn two_sided_curve_is_monotone(lv in levels()) {
        let s = spectrum(&lv);
        let c = EnsembleCurve::two_sided(&s, 50).unwrap();
        prop_assert!(c.check_monotone().is_ok());
        prop_assert!(c.rows.first().unwrap().e_av > 0.9 * s.width());
        prop_assert!(c.rows.last().unwrap().e_av < 0.1 * s.width());
    }
}

#[test]
fn monotonicity_check_rejects_bad_grid() {
    let s = spectrum(&[0.0, 1.0, 2.0]);
    let c = EnsembleCurve::from_spectrum(&s, &[0.1, 1.0, 0.5]).unwrap();
    assert!(c.check_monotone().is_err());
}

proptest! {
    #[test]
    fn doublet_weight_ratio_is_rational(gap in 1e-6..1.0f64, lb in -4.0..6.0f64) {
        let s = spectrum(&[0.0, gap, 2.0, 3.0, 5.0]);
        let beta = 10f64.powf(lb);
        let w = typical_weights(&s, beta).unwrap();
        let rel = (w[0] - w[1]) / w[0];
        let x = beta * gap;
        prop_assert!((rel - x / (1.0 + x)).abs() < 1e-12);
    }
}
