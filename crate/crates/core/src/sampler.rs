//! Nested sampling of energy-constrained Haar states with Galilean Monte
//! Carlo resampling, Haar quadrature over the records, and binning of
//! ground/anti-ground weights.

use std::sync::atomic::{AtomicBool, Ordering};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::statespace::{
    energy_expectation, energy_gradient_tangent, haar_random_state, inner, norm, HamiltonianOperator,
    SpectralMoments, StateVector,
};
use crate::stats::std_dev;
use crate::{rng, Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);
const RESYNC: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerConfig {
    pub n_live: usize,
    /// Arc length L of one trajectory.
    pub path_length: f64,
    /// Micro-step δθ in radians.
    pub step_theta: f64,
    /// Accepted GMC trajectories per nested-sampling iteration.
    pub ns_moves: usize,
    pub max_iterations: usize,
    pub target_energy: Option<f64>,
    pub seed: u64,
    /// Rejections tolerated per move before giving up.
    pub retry_cap: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            n_live: 2,
            path_length: 32.0,
            step_theta: 1.0 / 1024.0,
            ns_moves: 16,
            max_iterations: 10_000,
            target_energy: None,
            seed: 0,
            retry_cap: 100,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_live < 2 {
            return Err(Error::InvalidConfig(format!("n_live = {} < 2", self.n_live)));
        }
        if !(self.step_theta > 0.0 && self.step_theta < self.path_length) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < step_theta < path_length, got {} and {}",
                self.step_theta, self.path_length
            )));
        }
        if self.ns_moves == 0 || self.max_iterations == 0 || self.retry_cap == 0 {
            return Err(Error::InvalidConfig(
                "ns_moves, max_iterations and retry_cap must be positive".into(),
            ));
        }
        Ok(())
    }

    /// ln t with t = 1 − 1/n_live.
    pub fn log_shrinkage(&self) -> f64 {
        (-1.0 / self.n_live as f64).ln_1p()
    }

    fn micro_steps(&self) -> usize {
        (self.path_length / self.step_theta).round().max(1.0) as usize
    }
}

/// Result of one GMC trajectory.
#[derive(Clone, Debug)]
pub struct GmcOutcome {
    pub state: StateVector,
    pub energy: f64,
    pub accepted: bool,
    pub reflections: usize,
}

/// Closed-form two-plane rotation e^{−iFθ}, F = |ψ⟩⟨v| + |v⟩⟨ψ|, for
/// orthonormal ψ, v: returns (cosθ·ψ − i sinθ·v, cosθ·v − i sinθ·ψ).
pub fn rotate_pair(psi: &[C64], v: &[C64], theta: f64) -> (Vec<C64>, Vec<C64>) {
    let (mut p, mut w) = (psi.to_vec(), v.to_vec());
    rotate_in_place(&mut p, &mut w, theta);
    (p, w)
}

fn rotate_in_place(a: &mut [C64], b: &mut [C64], theta: f64) {
    let (s, c) = theta.sin_cos();
    let is = C64::new(0.0, -s);
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (x0, y0) = (*x, *y);
        *x = x0 * c + is * y0;
        *y = y0 * c + is * x0;
    }
}

/// Unit tangent direction drawn uniformly from the complex orthogonal
/// complement of ψ.
pub fn random_tangent<R: Rng + ?Sized>(psi: &StateVector, rng: &mut R) -> Vec<C64> {
    let n = psi.dim();
    loop {
        let mut v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        orthonormalize_against(psi.amplitudes(), &mut v);
        if v.iter().all(|x| x.re.is_finite()) && norm(&v) > 0.5 {
            return v;
        }
    }
}

fn orthonormalize_against(psi: &[C64], v: &mut [C64]) {
    let c = inner(psi, v);
    for (vi, pi) in v.iter_mut().zip(psi) {
        *vi -= c * pi;
    }
    let nv = norm(v);
    v.iter_mut().for_each(|x| *x /= nv);
}

/// Isosurface normal in the tangent-direction space: i·n, where n is the
/// unit energy gradient at ψ. Moving along v changes ψ by −iv·dθ, so the
/// normal seen by v is rotated by i.
pub fn isosurface_normal(h: &HamiltonianOperator, psi: &StateVector) -> Result<Vec<C64>> {
    let n = energy_gradient_tangent(h, psi)?;
    Ok(n.amplitudes().iter().map(|x| I * x).collect())
}

/// Specular reflection v ← v − 2·Re⟨m|v⟩·m about the unit normal m, using
/// the real inner product Re⟨a|b⟩.
pub fn reflect_tangent(v: &mut [C64], m: &[C64]) {
    let c = 2.0 * inner(m, v).re;
    for (vi, mi) in v.iter_mut().zip(m) {
        *vi -= c * mi;
    }
}

fn apply(h: &HamiltonianOperator, x: &[C64]) -> Vec<C64> {
    let mut y = vec![ZERO; x.len()];
    h.apply(x, &mut y);
    y
}

/// GMC trajectory from ψ along the random tangent drawn from `rng`.
pub fn gmc_trajectory<R: Rng + ?Sized>(
    h: &HamiltonianOperator,
    psi: &StateVector,
    e_star: f64,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<GmcOutcome> {
    let v = random_tangent(psi, rng);
    gmc_trajectory_from(h, psi, v, e_star, cfg)
}

fn check_inside(h: &HamiltonianOperator, psi: &StateVector, e_star: f64) -> Result<()> {
    if psi.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    let e = energy_expectation(h, psi)?;
    if e >= e_star {
        return Err(Error::OutOfRange {
            value: e,
            lower: f64::NEG_INFINITY,
            upper: e_star,
        });
    }
    Ok(())
}

/// GMC trajectory with a given initial tangent `v` (unit, ⟨ψ|v⟩ = 0).
///
/// Between reflections the energy along the two-plane rotation is exactly
/// E(θ) = A + B cos 2θ + C sin 2θ, so micro-steps are checked against the
/// constraint in closed form; the operator is applied only at reflections.
pub fn gmc_trajectory_from(
    h: &HamiltonianOperator,
    psi: &StateVector,
    v: Vec<C64>,
    e_star: f64,
    cfg: &SamplerConfig,
) -> Result<GmcOutcome> {
    check_inside(h, psi, e_star)?;
    let total = cfg.micro_steps();
    let dt = cfg.step_theta;
    let (rc, rs) = ((2.0 * dt).cos(), (2.0 * dt).sin());
    let grad_floor = 1e-14 * h.width().max(1.0);
    let mut p = psi.amplitudes().to_vec();
    let mut v = v;
    let mut hp = apply(h, &p);
    let mut hv = apply(h, &v);
    let mut g = vec![ZERO; p.len()];
    let mut hg = vec![ZERO; p.len()];
    let mut done = 0;
    let mut reflections = 0;
    while done < total {
        let ep = inner(&p, &hp).re;
        let ev = inner(&v, &hv).re;
        let a = 0.5 * (ep + ev);
        let b = 0.5 * (ep - ev);
        let c = -inner(&v, &hp).im;
        let remaining = total - done;
        let (mut c2, mut s2) = (1.0, 0.0);
        let mut k = 0;
        let mut outside = false;
        while k < remaining {
            k += 1;
            if k % RESYNC == 0 {
                let (s, cc) = (2.0 * dt * k as f64).sin_cos();
                c2 = cc;
                s2 = s;
            } else {
                let t = c2 * rc - s2 * rs;
                s2 = s2 * rc + c2 * rs;
                c2 = t;
            }
            if a + b * c2 + c * s2 >= e_star {
                outside = true;
                break;
            }
        }
        let theta = dt * k as f64;
        rotate_in_place(&mut p, &mut v, theta);
        rotate_in_place(&mut hp, &mut hv, theta);
        done += k;
        if !(outside && done < total) {
            continue;
        }
        reflections += 1;
        if reflections % 64 == 0 {
            let nrm = norm(&p);
            p.iter_mut().for_each(|x| *x /= nrm);
            orthonormalize_against(&p, &mut v);
            h.apply(&p, &mut hp);
            h.apply(&v, &mut hv);
        }
        // gradient g = Hψ − ⟨ψ|H|ψ⟩ψ and Hg, from one operator application
        let lambda = inner(&p, &hp);
        h.apply(&hp, &mut hg);
        for i in 0..p.len() {
            g[i] = hp[i] - lambda * p[i];
            hg[i] -= lambda * hp[i];
        }
        let gn = norm(&g);
        if gn < grad_floor {
            return Err(Error::DegenerateGradient(gn));
        }
        // normal seen by v is m = i·g/|g|
        // v ← v − 2·Re⟨m|v⟩·m with Re⟨m|v⟩ = Im⟨g|v⟩/|g|
        let scale = I / gn;
        let coef = 2.0 * inner(&g, &v).im / gn;
        for i in 0..p.len() {
            v[i] -= coef * scale * g[i];
            hv[i] -= coef * scale * hg[i];
        }
        let mu = inner(&p, &v);
        for i in 0..p.len() {
            v[i] -= mu * p[i];
            hv[i] -= mu * hp[i];
        }
        let nv = norm(&v);
        for i in 0..p.len() {
            v[i] /= nv;
            hv[i] /= nv;
        }
    }
    let state = StateVector::normalized(p)?;
    let energy = energy_expectation(h, &state)?;
    Ok(GmcOutcome {
        accepted: energy < e_star,
        state,
        energy,
        reflections,
    })
}

/// Reference implementation of the same trajectory that applies each
/// micro-step rotation and evaluates ⟨ψ|H|ψ⟩ after every step.
pub fn gmc_trajectory_literal(
    h: &HamiltonianOperator,
    psi: &StateVector,
    v: Vec<C64>,
    e_star: f64,
    cfg: &SamplerConfig,
) -> Result<GmcOutcome> {
    check_inside(h, psi, e_star)?;
    let total = cfg.micro_steps();
    let mut p = psi.amplitudes().to_vec();
    let mut v = v;
    let mut reflections = 0;
    for step in 1..=total {
        rotate_in_place(&mut p, &mut v, cfg.step_theta);
        if step % RESYNC == 0 {
            let nrm = norm(&p);
            p.iter_mut().for_each(|x| *x /= nrm);
            orthonormalize_against(&p, &mut v);
        }
        let hp = apply(h, &p);
        let e = inner(&p, &hp).re;
        if e >= e_star && step < total {
            let state = StateVector::normalized(p)?;
            let m = isosurface_normal(h, &state)?;
            p = state.into_amplitudes();
            reflect_tangent(&mut v, &m);
            orthonormalize_against(&p, &mut v);
            reflections += 1;
        }
    }
    let state = StateVector::normalized(p)?;
    let energy = energy_expectation(h, &state)?;
    Ok(GmcOutcome {
        accepted: energy < e_star,
        state,
        energy,
        reflections,
    })
}

/// One removed live point.
#[derive(Clone, Debug)]
pub struct SampleRecord {
    /// 1-based iteration index.
    pub iteration: usize,
    pub e_star: f64,
    pub state: StateVector,
    /// i·ln(1 − 1/n_live).
    pub log_measure: f64,
    /// Weight on the ground space of the sampled operator.
    pub p_gs: f64,
    /// Weight on the anti-ground space of the sampled operator.
    pub p_anti_gs: f64,
    pub accepted_moves: usize,
    pub rejected_moves: usize,
}

/// NDJSON line `{i, e_star, log_measure, p_gs, p_anti_gs, accepts, rejects}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordLine {
    pub i: usize,
    pub e_star: f64,
    pub log_measure: f64,
    pub p_gs: f64,
    pub p_anti_gs: f64,
    pub accepts: usize,
    pub rejects: usize,
}

impl SampleRecord {
    pub fn line(&self) -> RecordLine {
        RecordLine {
            i: self.iteration,
            e_star: self.e_star,
            log_measure: self.log_measure,
            p_gs: self.p_gs,
            p_anti_gs: self.p_anti_gs,
            accepts: self.accepted_moves,
            rejects: self.rejected_moves,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MaxIterations,
    TargetEnergy,
    Interrupted,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub iterations: usize,
    pub stop: StopReason,
    pub accepted: usize,
    pub rejected: usize,
}

/// Nested sampling on `h` streaming each record to `sink`. `unit` selects
/// the random stream so that independent chains do not share draws.
pub fn nested_sampling_with(
    h: &HamiltonianOperator,
    cfg: &SamplerConfig,
    unit: u64,
    stop: Option<&AtomicBool>,
    sink: &mut dyn FnMut(&SampleRecord) -> Result<()>,
) -> Result<RunSummary> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed, unit);
    let mut live: Vec<(StateVector, f64)> = (0..cfg.n_live)
        .map(|_| {
            let s = haar_random_state(h.dim(), &mut rng)?;
            let e = energy_expectation(h, &s)?;
            Ok((s, e))
        })
        .collect::<Result<_>>()?;
    let ln_t = cfg.log_shrinkage();
    let (mut acc_total, mut rej_total) = (0, 0);
    let mut prev = f64::INFINITY;
    for i in 1..=cfg.max_iterations {
        if stop.is_some_and(|s| s.load(Ordering::Relaxed)) {
            return Ok(RunSummary {
                iterations: i - 1,
                stop: StopReason::Interrupted,
                accepted: acc_total,
                rejected: rej_total,
            });
        }
        let worst = (0..live.len())
            .max_by(|&a, &b| live[a].1.total_cmp(&live[b].1))
            .unwrap();
        let e_star = live[worst].1;
        if e_star >= prev {
            return Err(Error::Invariant(format!(
                "E* did not decrease at iteration {i}: {e_star} after {prev}"
            )));
        }
        prev = e_star;
        let reached = cfg.target_energy.is_some_and(|t| e_star <= t);
        let (mut acc, mut rej) = (0, 0);
        let mut replacement = None;
        if !reached && i < cfg.max_iterations {
            let src = if cfg.n_live == 2 {
                1 - worst
            } else {
                let k = rng.random_range(0..cfg.n_live - 1);
                if k >= worst {
                    k + 1
                } else {
                    k
                }
            };
            let mut current = live[src].0.clone();
            let mut energy = live[src].1;
            for _ in 0..cfg.ns_moves {
                let mut retries = 0;
                loop {
                    let out = gmc_trajectory(h, &current, e_star, cfg, &mut rng)?;
                    if out.accepted {
                        current = out.state;
                        energy = out.energy;
                        acc += 1;
                        break;
                    }
                    rej += 1;
                    retries += 1;
                    if retries >= cfg.retry_cap {
                        return Err(Error::StuckSampler { e_star, retries });
                    }
                }
            }
            replacement = Some((current, energy));
        }
        acc_total += acc;
        rej_total += rej;
        let state = match replacement {
            Some(r) => std::mem::replace(&mut live[worst], r).0,
            None => live[worst].0.clone(),
        };
        let record = SampleRecord {
            iteration: i,
            e_star,
            p_gs: h.ground_space().weight(state.amplitudes()),
            p_anti_gs: h.anti_ground_space().weight(state.amplitudes()),
            state,
            log_measure: i as f64 * ln_t,
            accepted_moves: acc,
            rejected_moves: rej,
        };
        sink(&record)?;
        if reached {
            return Ok(RunSummary {
                iterations: i,
                stop: StopReason::TargetEnergy,
                accepted: acc_total,
                rejected: rej_total,
            });
        }
    }
    Ok(RunSummary {
        iterations: cfg.max_iterations,
        stop: StopReason::MaxIterations,
        accepted: acc_total,
        rejected: rej_total,
    })
}

/// Nested sampling collecting every record.
pub fn nested_sampling(h: &HamiltonianOperator, cfg: &SamplerConfig) -> Result<Vec<SampleRecord>> {
    let mut out = Vec::new();
    nested_sampling_with(h, cfg, 0, None, &mut |r| {
        out.push(r.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Which end of the spectrum a run descended towards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tail {
    /// Run on H.
    Lower,
    /// Run on the reflected operator W − H.
    Upper,
}

/// A record expressed in the units of the original operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightedSample {
    pub energy: f64,
    pub p_gs: f64,
    pub p_anti_gs: f64,
    pub tail: Tail,
}

impl WeightedSample {
    /// Maps a record of a run on H (lower) or on W − H (upper) back to H.
    pub fn from_record(r: &SampleRecord, tail: Tail, width: f64) -> Self {
        match tail {
            Tail::Lower => Self {
                energy: r.e_star,
                p_gs: r.p_gs,
                p_anti_gs: r.p_anti_gs,
                tail,
            },
            Tail::Upper => Self {
                energy: width - r.e_star,
                p_gs: r.p_anti_gs,
                p_anti_gs: r.p_gs,
                tail,
            },
        }
    }
}

/// Records from the H run (stream unit 0) and the W − H run (stream unit 1).
pub fn nested_sampling_both_tails(
    h: &HamiltonianOperator,
    cfg: &SamplerConfig,
) -> Result<(Vec<SampleRecord>, Vec<SampleRecord>)> {
    let mut lower = Vec::new();
    nested_sampling_with(h, cfg, 0, None, &mut |r| {
        lower.push(r.clone());
        Ok(())
    })?;
    let mut upper = Vec::new();
    nested_sampling_with(&h.reflected(), cfg, 1, None, &mut |r| {
        upper.push(r.clone());
        Ok(())
    })?;
    Ok((lower, upper))
}

/// Quadrature weights ½(t^{i−1} − t^{i+1}) for records i = 1..=n.
pub fn quadrature_weights(n: usize, n_live: usize) -> Vec<f64> {
    let ln_t = (-1.0 / n_live as f64).ln_1p();
    (1..=n)
        .map(|i| 0.5 * (((i - 1) as f64 * ln_t).exp() - ((i + 1) as f64 * ln_t).exp()))
        .collect()
}

/// Σ_i e^{−βE*_i} g(record_i)·½(t^{i−1} − t^{i+1}).
pub fn haar_quadrature(
    records: &[SampleRecord],
    n_live: usize,
    beta: f64,
    g: impl Fn(&SampleRecord) -> f64,
) -> f64 {
    let ln_t = (-1.0 / n_live as f64).ln_1p();
    records
        .iter()
        .map(|r| {
            let i = r.iteration as f64;
            let w = 0.5 * (((i - 1.0) * ln_t).exp() - ((i + 1.0) * ln_t).exp());
            (-beta * r.e_star).exp() * g(r) * w
        })
        .sum()
}

/// Bin averages of p_gs + p_anti_gs over energy density.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinnedObservable {
    pub delta: f64,
    pub bin_centers: Vec<f64>,
    pub means: Vec<f64>,
    /// Sample standard deviation over √count (NaN for single-entry bins).
    pub stderr: Vec<f64>,
    pub counts: Vec<usize>,
    /// Bins that pool samples from both tails.
    pub pooled: Vec<bool>,
}

/// Bins samples by ε = E/V with width `delta`.
pub fn bin_weights(samples: &[WeightedSample], sites: usize, delta: f64) -> Result<BinnedObservable> {
    if samples.is_empty() {
        return Err(Error::EmptyObservable);
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidConfig(format!("bin width {delta} must be positive")));
    }
    let v = sites as f64;
    let mut bins: std::collections::BTreeMap<i64, (Vec<f64>, bool, bool)> = Default::default();
    for s in samples {
        let k = (s.energy / v / delta).floor() as i64;
        let e = bins.entry(k).or_default();
        e.0.push(s.p_gs + s.p_anti_gs);
        match s.tail {
            Tail::Lower => e.1 = true,
            Tail::Upper => e.2 = true,
        }
    }
    let mut out = BinnedObservable {
        delta,
        bin_centers: Vec::new(),
        means: Vec::new(),
        stderr: Vec::new(),
        counts: Vec::new(),
        pooled: Vec::new(),
    };
    for (k, (vals, lo, up)) in bins {
        let n = vals.len();
        out.bin_centers.push((k as f64 + 0.5) * delta);
        out.means.push(vals.iter().sum::<f64>() / n as f64);
        out.stderr.push(std_dev(&vals) / (n as f64).sqrt());
        out.counts.push(n);
        out.pooled.push(lo && up);
    }
    Ok(out)
}

impl BinnedObservable {
    /// CSV `eps,mean,stderr,count`.
    pub fn write_csv(&self, mut w: impl std::io::Write) -> Result<()> {
        writeln!(w, "eps,mean,stderr,count")?;
        for i in 0..self.counts.len() {
            writeln!(
                w,
                "{:e},{:e},{:e},{}",
                self.bin_centers[i], self.means[i], self.stderr[i], self.counts[i]
            )?;
        }
        Ok(())
    }
}

/// Nested-sampling iterations needed to descend from E_∞ to `target`:
/// n ≈ ((E − E_∞)²/s²)·2^V/(V·|ln t|).
pub fn estimate_steps_to_energy(
    moments: &SpectralMoments,
    sites: usize,
    width: f64,
    target: f64,
    n_live: usize,
) -> Result<f64> {
    if !(target >= 0.0 && target <= width) {
        return Err(Error::OutOfRange {
            value: target,
            lower: 0.0,
            upper: width,
        });
    }
    let v = sites as f64;
    let d = target - moments.eps_infinity * v;
    let ln_t = (-1.0 / n_live as f64).ln_1p();
    Ok(d * d / moments.s2 * v.exp2() / v / ln_t.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespace::{BuildOptions, Representation};
    use approx::assert_relative_eq;

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
    fn quarter_turn() {
        let psi = vec![C64::new(1.0, 0.0), ZERO];
        let v = vec![ZERO, C64::new(0.0, 1.0)];
        let (p, _) = rotate_pair(&psi, &v, std::f64::consts::FRAC_PI_2);
        assert!((p[0] - 0.0).norm() < 1e-15);
        assert!((p[1] - (-I * v[1])).norm() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(SamplerConfig::default().validate().is_ok());
        let bad = SamplerConfig { n_live: 1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SamplerConfig { step_theta: 40.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn measure_after_three_iterations() {
        let h = diag(&[0.0, 1.0, 2.0, 3.0]);
        let cfg = SamplerConfig {
            max_iterations: 3,
            path_length: 1.0,
            step_theta: 1.0 / 64.0,
            ns_moves: 2,
            ..Default::default()
        };
        let rec = nested_sampling(&h, &cfg).unwrap();
        assert_eq!(rec.len(), 3);
        assert_relative_eq!(rec[2].log_measure.exp(), 0.125, epsilon = 1e-15);
        assert!(rec.windows(2).all(|w| w[1].e_star < w[0].e_star));
    }

    #[test]
    fn steps_estimate_examples() {
        let m = SpectralMoments {
            eps_infinity: 1.0,
            s2: 2.0,
            central_moments: vec![0.2],
            pauli_s2: None,
        };
        assert_eq!(estimate_steps_to_energy(&m, 10, 20.0, 10.0, 2).unwrap(), 0.0);
        let a = estimate_steps_to_energy(&m, 10, 20.0, 9.0, 2).unwrap();
        let b = estimate_steps_to_energy(&m, 10, 20.0, 8.0, 2).unwrap();
        assert_relative_eq!(b / a, 4.0, max_relative = 1e-12);
        assert!(estimate_steps_to_energy(&m, 10, 20.0, 21.0, 2).is_err());
    }
}
