use eigencond::rng;
use eigencond::sampler::{
    gmc_trajectory_from, gmc_trajectory_literal, haar_quadrature, isosurface_normal, nested_sampling,
    quadrature_weights, random_tangent, reflect_tangent, rotate_pair, SamplerConfig,
};
use eigencond::statespace::{
    energy_expectation, haar_random_state, inner, BuildOptions, HamiltonianOperator, Representation,
    StateVector,
};
use eigencond::C64;
use rand::Rng;
use rand_distr::StandardNormal;

fn random_dense(n: usize, seed: u64) -> HamiltonianOperator {
    let mut r = rng::stream(seed, 7);
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let x: f64 = r.sample(StandardNormal);
            m[i * n + j] = x;
            m[j * n + i] = x;
        }
    }
    HamiltonianOperator::new("dense", 3, Representation::Dense { n, matrix: m }, BuildOptions::default())
        .unwrap()
}

/// e^{−iFθ} by eigen-decomposition of the Hermitian 2x2 block of F in the
/// orthonormal frame (ψ, v), applied to ψ: computed as a dense N×N Taylor
/// series of the matrix exponential.
fn dense_exp_apply(psi: &[C64], v: &[C64], theta: f64, x: &[C64]) -> Vec<C64> {
    let n = psi.len();
    let mut f = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            f[i * n + j] = psi[i] * v[j].conj() + v[i] * psi[j].conj();
        }
    }
    let mut term = x.to_vec();
    let mut out = x.to_vec();
    let c = C64::new(0.0, -theta);
    for k in 1..60 {
        let mut next = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                next[i] += f[i * n + j] * term[j];
            }
        }
        for t in next.iter_mut() {
            *t *= c / k as f64;
        }
        for (o, t) in out.iter_mut().zip(&next) {
            *o += t;
        }
        term = next;
    }
    out
}

#[test]
fn closed_form_rotation_matches_matrix_exponential() {
    let mut r = rng::stream(11, 0);
    let psi = haar_random_state(4, &mut r).unwrap();
    let v = random_tangent(&psi, &mut r);
    let (p2, v2) = rotate_pair(psi.amplitudes(), &v, 0.3);
    let pe = dense_exp_apply(psi.amplitudes(), &v, 0.3, psi.amplitudes());
    let ve = dense_exp_apply(psi.amplitudes(), &v, 0.3, &v);
    for i in 0..4 {
        assert!((p2[i] - pe[i]).norm() < 1e-12);
        assert!((v2[i] - ve[i]).norm() < 1e-12);
    }
}

#[test]
fn micro_steps_preserve_frame() {
    let mut r = rng::stream(12, 0);
    let psi = haar_random_state(16, &mut r).unwrap();
    let mut p = psi.amplitudes().to_vec();
    let mut v = random_tangent(&psi, &mut r);
    for _ in 0..10_000 {
        let (a, b) = rotate_pair(&p, &v, 1.0 / 1024.0);
        p = a;
        v = b;
    }
    let np: f64 = inner(&p, &p).re.sqrt();
    let nv: f64 = inner(&v, &v).re.sqrt();
    assert!((np - 1.0).abs() < 1e-12);
    assert!((nv - 1.0).abs() < 1e-12);
    assert!(inner(&p, &v).norm() < 1e-12);
}

#[test]
fn reflection_preserves_tangential_part() {
    let h = random_dense(8, 3);
    let mut r = rng::stream(13, 0);
    let psi = haar_random_state(8, &mut r).unwrap();
    let m = isosurface_normal(&h, &psi).unwrap();
    let v = random_tangent(&psi, &mut r);
    let mut w: Vec<C64> = (0..8)
        .map(|_| C64::new(r.sample(StandardNormal), r.sample(StandardNormal)))
        .collect();
    let c = inner(&m, &w).re;
    for (wi, mi) in w.iter_mut().zip(&m) {
        *wi -= c * mi;
    }
    let mut v2 = v.clone();
    reflect_tangent(&mut v2, &m);
    assert!((inner(&v2, &w).re - inner(&v, &w).re).abs() < 1e-10);
    assert!((inner(&m, &v2).re + inner(&m, &v).re).abs() < 1e-12);
    // m is orthogonal to ψ, so v stays tangent
    assert!(inner(psi.amplitudes(), &v2).norm() < 1e-12);
}

#[test]
fn analytic_segments_match_literal_micro_steps() {
    let h = random_dense(8, 5);
    let cfg = SamplerConfig {
        path_length: 2.0,
        step_theta: 1.0 / 256.0,
        ..Default::default()
    };
    let mut total_reflections = 0;
    for seed in 0..6 {
        let mut r = rng::stream(seed, 1);
        let psi = haar_random_state(8, &mut r).unwrap();
        let e = energy_expectation(&h, &psi).unwrap();
        let v = random_tangent(&psi, &mut r);
        let fast = gmc_trajectory_from(&h, &psi, v.clone(), e + 0.05, &cfg).unwrap();
        let slow = gmc_trajectory_literal(&h, &psi, v, e + 0.05, &cfg).unwrap();
        assert_eq!(fast.reflections, slow.reflections);
        assert_eq!(fast.accepted, slow.accepted);
        let overlap = fast.state.inner(&slow.state);
        assert!((overlap.norm() - 1.0).abs() < 1e-9, "overlap {overlap}");
        assert!((fast.energy - slow.energy).abs() < 1e-9);
        total_reflections += fast.reflections;
    }
    assert!(total_reflections > 0);
}

#[test]
fn nested_sampling_records_decrease_and_satisfy_constraints() {
    let spec = eigencond::models::ModelSpec::new(eigencond::models::Family::Paramagnet, 8).with("h", 1.0);
    let h = eigencond::models::build(&spec).unwrap().to_eigenbasis().unwrap();
    let cfg = SamplerConfig {
        max_iterations: 60,
        ns_moves: 2,
        seed: 4,
        ..Default::default()
    };
    let rec = nested_sampling(&h, &cfg).unwrap();
    assert_eq!(rec.len(), 60);
    for w in rec.windows(2) {
        assert!(w[1].e_star < w[0].e_star);
        let e = energy_expectation(&h, &w[1].state).unwrap();
        assert!((e - w[1].e_star).abs() < 1e-10);
    }
    for r in &rec {
        assert_eq!(r.log_measure, r.iteration as f64 * 0.5f64.ln());
    }
}

#[test]
fn quadrature_weights_telescope() {
    let w = quadrature_weights(50, 2);
    assert!(w.iter().all(|&x| x > 0.0));
    let t: f64 = 0.5;
    let expect = 0.5 * (1.0 + t) - 0.5 * (t.powi(50) + t.powi(51));
    let sum: f64 = w.iter().sum();
    assert!((sum - expect).abs() < 1e-15);
}

#[test]
fn quadrature_monotone_in_beta() {
    let spec = eigencond::models::ModelSpec::new(eigencond::models::Family::Paramagnet, 4).with("h", 1.0);
    let h = eigencond::models::build(&spec).unwrap().to_eigenbasis().unwrap();
    let cfg = SamplerConfig {
        max_iterations: 20,
        ns_moves: 1,
        path_length: 4.0,
        ..Default::default()
    };
    let rec = nested_sampling(&h, &cfg).unwrap();
    let mut last = f64::INFINITY;
    for beta in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let q = haar_quadrature(&rec, 2, beta, |_| 1.0);
        assert!(q > 0.0 && q < last);
        last = q;
    }
}

#[test]
fn ground_state_weight_projector() {
    let h = random_dense(8, 9).to_eigenbasis().unwrap();
    let gs = StateVector::basis(8, 0);
    assert_eq!(h.ground_space().weight(gs.amplitudes()), 1.0);
    assert_eq!(h.anti_ground_space().weight(gs.amplitudes()), 0.0);
}
