//! Critical-energy estimators: exact spectral sums, the Girard–Hutchinson
//! stochastic trace of the deflated inverse, free-fermion quadrature, the
//! moment expansion, and O(N) sums for tridiagonal random matrices.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{critical_energy_moment_expansion, critical_energy_moment_series};
use crate::freefermion::{jordan_wigner_spectrum_with, FreeFermionSpectrum};
use crate::linalg::{
    deflated_cg, dot, project_out, tridiagonal_kth_eigenvalue, tridiagonal_resolvent_trace,
};
use crate::models::{self, Family, ModelSpec};
use crate::statespace::{spectral_moments, HamiltonianOperator, Representation, SpectralMoments, Spectrum};
use crate::stats::{bootstrap_std, mean, pairwise_sum, std_dev};
use crate::{rng, Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriticalMethod {
    ExactSum,
    StochasticTrace,
    FreeFermion,
    MomentExpansion,
}

impl std::str::FromStr for CriticalMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-sum" | "exact" => Ok(Self::ExactSum),
            "stochastic-trace" | "stochastic" => Ok(Self::StochasticTrace),
            "free-fermion" => Ok(Self::FreeFermion),
            "moment-expansion" | "moment" => Ok(Self::MomentExpansion),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// Critical energy densities ε_c± = E_c±/V in shifted units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalEnergyReport {
    pub method: CriticalMethod,
    pub model: String,
    #[serde(rename = "V")]
    pub sites: usize,
    pub eps_c_minus: f64,
    pub eps_c_plus: f64,
    /// Bootstrap standard error of `eps_c_minus` (stochastic trace only).
    pub stderr: Option<f64>,
    /// Bootstrap standard error of `eps_c_plus` (stochastic trace only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr_plus: Option<f64>,
    pub m: Option<usize>,
    pub solver_tol: Option<f64>,
    pub seed: Option<u64>,
}

impl CriticalEnergyReport {
    fn deterministic(method: CriticalMethod, model: &str, sites: usize, minus: f64, plus: f64) -> Self {
        Self {
            method,
            model: model.to_string(),
            sites,
            eps_c_minus: minus,
            eps_c_plus: plus,
            stderr: None,
            stderr_plus: None,
            m: None,
            solver_tol: None,
            seed: None,
        }
    }
}

/// E_c− = N_bulk / Σ_{α∉gs} 1/E_α on a shifted spectrum.
pub fn exact_critical_energy_minus(spectrum: &Spectrum) -> Result<f64> {
    let bulk = spectrum.bulk();
    if bulk.is_empty() || bulk[0] <= 0.0 {
        return Err(Error::Divergent("zero eigenvalue in the bulk".into()));
    }
    let inv: Vec<f64> = bulk.iter().map(|e| 1.0 / e).collect();
    Ok(bulk.len() as f64 / pairwise_sum(&inv))
}

/// (E_c−, E_c+) with E_c+ from the reflected spectrum, in energy units.
pub fn exact_critical_energies(spectrum: &Spectrum) -> Result<(f64, f64)> {
    let minus = exact_critical_energy_minus(spectrum)?;
    let plus = spectrum.width() - exact_critical_energy_minus(&spectrum.reflected())?;
    Ok((minus, plus))
}

/// Exact-sum report from the full spectrum of `h`.
pub fn exact_critical_energy(h: &HamiltonianOperator) -> Result<CriticalEnergyReport> {
    let (m, p) = exact_critical_energies(h.spectrum()?)?;
    let v = h.sites() as f64;
    Ok(CriticalEnergyReport::deterministic(
        CriticalMethod::ExactSum,
        h.name(),
        h.sites(),
        m / v,
        p / v,
    ))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeDistribution {
    #[default]
    Gaussian,
    Rademacher,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StochasticOptions {
    pub probes: usize,
    pub solver_tol: f64,
    /// Defaults to ⌈50√N⌉.
    pub max_iterations: Option<usize>,
    pub seed: u64,
    pub distribution: ProbeDistribution,
    pub bootstrap_resamples: usize,
}

impl Default for StochasticOptions {
    fn default() -> Self {
        Self {
            probes: 64,
            solver_tol: 1e-8,
            max_iterations: None,
            seed: 0,
            distribution: ProbeDistribution::Gaussian,
            bootstrap_resamples: 1000,
        }
    }
}

/// Per-probe samples of tr H_bulk⁻¹.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEstimate {
    pub values: Vec<f64>,
    pub max_iterations_used: usize,
}

impl TraceEstimate {
    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.values) / self.values.len() as f64
    }

    pub fn stderr(&self) -> f64 {
        std_dev(&self.values) / (self.values.len() as f64).sqrt()
    }
}

/// Girard–Hutchinson samples ⟨v⊥|x⟩ with (1−P)H(1−P)x = v⊥, one independent
/// stream per probe index in `probes`.
pub fn stochastic_inverse_trace(
    h: &HamiltonianOperator,
    probes: std::ops::Range<usize>,
    opts: &StochasticOptions,
) -> Result<TraceEstimate> {
    let n = h.dim();
    let basis = &h.ground_space().basis;
    let cap = opts
        .max_iterations
        .unwrap_or_else(|| (50.0 * (n as f64).sqrt()).ceil() as usize);
    let results: Vec<Result<(f64, usize)>> = probes
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(opts.seed, k as u64);
            let mut v: Vec<f64> = match opts.distribution {
                ProbeDistribution::Gaussian => (0..n).map(|_| r.sample(StandardNormal)).collect(),
                ProbeDistribution::Rademacher => (0..n)
                    .map(|_| if r.random::<bool>() { 1.0 } else { -1.0 })
                    .collect(),
            };
            project_out(basis, &mut v);
            let out = deflated_cg(h, basis, &v, opts.solver_tol, cap)?;
            Ok((dot(&v, &out.solution), out.iterations))
        })
        .collect();
    let mut values = Vec::with_capacity(results.len());
    let mut max_it = 0;
    for r in results {
        let (x, it) = r?;
        values.push(x);
        max_it = max_it.max(it);
    }
    Ok(TraceEstimate {
        values,
        max_iterations_used: max_it,
    })
}

/// E_c = N_bulk / mean of the trace samples, with its bootstrap error.
pub fn critical_energy_from_trace(est: &TraceEstimate, bulk_size: f64, resamples: usize, seed: u64) -> (f64, f64) {
    let ec = bulk_size / est.mean();
    let mut r = rng::stream(seed, u64::MAX);
    let se = bootstrap_std(&est.values, resamples, &mut r, |xs| bulk_size / mean(xs));
    (ec, se)
}

/// Stochastic-trace report for both tails (E_c+ from the reflected operator).
pub fn stochastic_critical_energy(
    h: &HamiltonianOperator,
    opts: &StochasticOptions,
) -> Result<CriticalEnergyReport> {
    if opts.probes == 0 {
        return Err(Error::InvalidConfig("stochastic trace needs at least one probe".into()));
    }
    let v = h.sites() as f64;
    let n = h.dim() as f64;
    let tail = |op: &HamiltonianOperator, salt: u64| -> Result<(f64, f64)> {
        let o = StochasticOptions {
            seed: opts.seed ^ salt,
            ..opts.clone()
        };
        let est = stochastic_inverse_trace(op, 0..opts.probes, &o)?;
        let nb = n - op.ground_space().degeneracy as f64;
        Ok(critical_energy_from_trace(&est, nb, opts.bootstrap_resamples, o.seed))
    };
    let (em, sm) = tail(h, 0)?;
    let r = h.reflected();
    let (ep, sp) = tail(&r, 0x9e37_79b9_7f4a_7c15)?;
    Ok(CriticalEnergyReport {
        method: CriticalMethod::StochasticTrace,
        model: h.name().to_string(),
        sites: h.sites(),
        eps_c_minus: em / v,
        eps_c_plus: (h.width() - ep) / v,
        stderr: Some(sm / v),
        stderr_plus: Some(sp / v),
        m: Some(opts.probes),
        solver_tol: Some(opts.solver_tol),
        seed: Some(opts.seed),
    })
}

/// Doubles the probe count from `opts.probes` until the relative stderr of
/// both tails falls below `rel_target` or `max_probes` is reached.
pub fn stochastic_critical_energy_adaptive(
    h: &HamiltonianOperator,
    opts: &StochasticOptions,
    rel_target: f64,
    max_probes: usize,
) -> Result<CriticalEnergyReport> {
    let mut o = opts.clone();
    loop {
        let rep = stochastic_critical_energy(h, &o)?;
        let ok = rep.stderr.unwrap() < rel_target * rep.eps_c_minus
            && rep.stderr_plus.unwrap() < rel_target * (h.width() / h.sites() as f64 - rep.eps_c_plus);
        if ok || o.probes >= max_probes {
            return Ok(rep);
        }
        o.probes = (2 * o.probes).min(max_probes);
    }
}

/// Free-fermion report; the single-particle spectrum is symmetric so
/// E_c+ = W − E_c−.
pub fn free_fermion_critical_energy(ff: &FreeFermionSpectrum, model: &str) -> Result<CriticalEnergyReport> {
    let ec = ff.critical_energy()?;
    let v = ff.sites as f64;
    Ok(CriticalEnergyReport::deterministic(
        CriticalMethod::FreeFermion,
        model,
        ff.sites,
        ec / v,
        (ff.width() - ec) / v,
    ))
}

/// Jordan–Wigner spectrum of a free-fermion catalog model.
pub fn free_fermion_spectrum(spec: &ModelSpec) -> Result<FreeFermionSpectrum> {
    spec.validate()?;
    match spec.family {
        Family::Tfim1d => jordan_wigner_spectrum_with(
            spec.sites,
            spec.param("J")?,
            spec.param("h_x")?,
            spec.policy(),
        ),
        Family::Paramagnet => {
            jordan_wigner_spectrum_with(spec.sites, 0.0, spec.param("h")?, spec.policy())
        }
        f => Err(Error::InvalidConfig(format!(
            "{} has no free-fermion solution",
            f.entry().name
        ))),
    }
}

/// Moments of a free-fermion spectrum (modes are independent two-level
/// systems, so odd central moments beyond the mean are not needed here).
pub fn free_fermion_moments(ff: &FreeFermionSpectrum) -> SpectralMoments {
    let v = ff.sites as f64;
    SpectralMoments {
        eps_infinity: ff.eps_infinity(),
        s2: ff.s2(),
        central_moments: vec![ff.s2() / v],
        pauli_s2: None,
    }
}

/// Leading moments of a Pauli operator without diagonalizing:
/// ε_∞ from the identity coefficient and s² from the string coefficients.
pub fn pauli_moments(h: &HamiltonianOperator) -> Option<SpectralMoments> {
    let Representation::Pauli(p) = h.representation() else {
        return None;
    };
    let v = h.sites() as f64;
    let s2 = p.s2();
    Some(SpectralMoments {
        eps_infinity: (h.sign() * p.identity_coeff() + h.shift()) / v,
        s2,
        central_moments: vec![s2 / v],
        pauli_s2: Some(s2),
    })
}

/// Leading-order moment-expansion report.
pub fn moment_critical_energy(
    moments: &SpectralMoments,
    sites: usize,
    eps_anti: f64,
    model: &str,
) -> CriticalEnergyReport {
    let (m, p) = critical_energy_moment_expansion(moments, sites, eps_anti);
    CriticalEnergyReport::deterministic(CriticalMethod::MomentExpansion, model, sites, m, p)
}

/// Resummed moment series (every stored central moment) as a report.
pub fn moment_series_critical_energy(
    moments: &SpectralMoments,
    sites: usize,
    eps_anti: f64,
    model: &str,
) -> CriticalEnergyReport {
    let (m, p) = critical_energy_moment_series(moments, eps_anti);
    CriticalEnergyReport::deterministic(CriticalMethod::MomentExpansion, model, sites, m, p)
}

/// Extremes and inverse sums of a tridiagonal matrix in O(N) memory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TridiagonalCritical {
    /// Unshifted lowest and highest eigenvalues.
    pub e_min: f64,
    pub e_max: f64,
    /// Shifted critical energies (ground at 0).
    pub e_c_minus: f64,
    pub e_c_plus: f64,
}

/// Σ_{α≠0} 1/(E_α − E_0) via Re tr(T − E_0 − iδ)⁻¹, Richardson-extrapolated
/// in δ to cancel the O(δ²) bias.
fn inverse_sum_above(diag: &[f64], off: &[f64], e0: f64, gap: f64) -> f64 {
    let d = 1e-3 * gap;
    let s = |delta: f64| tridiagonal_resolvent_trace(diag, off, C64::new(e0, delta)).re;
    (4.0 * s(d) - s(2.0 * d)) / 3.0
}

/// Critical energies of a nondegenerate tridiagonal matrix using Sturm
/// bisection and the resolvent-trace recurrence, O(N) per evaluation.
pub fn tridiagonal_critical_energies(diag: &[f64], off: &[f64]) -> Result<TridiagonalCritical> {
    let n = diag.len();
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    let e0 = tridiagonal_kth_eigenvalue(diag, off, 0);
    let e1 = tridiagonal_kth_eigenvalue(diag, off, 1);
    let emax = tridiagonal_kth_eigenvalue(diag, off, n - 1);
    let enext = tridiagonal_kth_eigenvalue(diag, off, n - 2);
    let w = emax - e0;
    let tol = 1e-9 * w;
    if e1 - e0 <= tol || emax - enext <= tol {
        return Err(Error::Divergent("degenerate extreme level".into()));
    }
    let nb = (n - 1) as f64;
    let lower = inverse_sum_above(diag, off, e0, e1 - e0);
    // reflected matrix −T has the same off-diagonal magnitudes
    let neg: Vec<f64> = diag.iter().map(|x| -x).collect();
    let upper = inverse_sum_above(&neg, off, -emax, emax - enext);
    Ok(TridiagonalCritical {
        e_min: e0,
        e_max: emax,
        e_c_minus: nb / lower,
        e_c_plus: w - nb / upper,
    })
}

/// One random-matrix sample for the ensemble statistics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnsembleSample {
    #[serde(rename = "V")]
    pub sites: usize,
    pub seed: u64,
    pub eps_c_minus: f64,
    pub eps_c_plus: f64,
    /// Unshifted ground-energy density E_0/V.
    pub eps_gs: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnsembleStatsRow {
    #[serde(rename = "V")]
    pub sites: usize,
    pub samples: usize,
    pub mean_eps_c: f64,
    pub std_eps_c: f64,
}

/// ε_c− distribution of a Gaussian β-ensemble family over `seeds` for each
/// size in `sizes`.
pub fn critical_energy_ensemble_stats(
    family: Family,
    sizes: &[usize],
    seeds: &[u64],
) -> Result<(Vec<EnsembleStatsRow>, Vec<EnsembleSample>)> {
    let beta = match family {
        Family::Goe => 1.0,
        Family::Gue => 2.0,
        f => {
            return Err(Error::InvalidConfig(format!(
                "{} is not a random-matrix family",
                f.entry().name
            )))
        }
    };
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for &v in sizes {
        let batch: Vec<Result<EnsembleSample>> = seeds
            .par_iter()
            .map(|&seed| {
                let (d, o) = models::gaussian_ensemble_tridiagonal(v, beta, seed);
                let c = tridiagonal_critical_energies(&d, &o)?;
                let vf = v as f64;
                Ok(EnsembleSample {
                    sites: v,
                    seed,
                    eps_c_minus: c.e_c_minus / vf,
                    eps_c_plus: c.e_c_plus / vf,
                    eps_gs: c.e_min / vf,
                })
            })
            .collect();
        let batch = batch.into_iter().collect::<Result<Vec<_>>>()?;
        let ec: Vec<f64> = batch.iter().map(|s| s.eps_c_minus).collect();
        rows.push(EnsembleStatsRow {
            sites: v,
            samples: ec.len(),
            mean_eps_c: mean(&ec),
            std_eps_c: std_dev(&ec),
        });
        samples.extend(batch);
    }
    Ok((rows, samples))
}

/// Method chosen when none is forced: free fermions for the 1D chain and
/// the paramagnet, exact sums for random matrices with V ≤ 16 and any
/// model with V ≤ 12, the stochastic trace otherwise.
pub fn default_method(spec: &ModelSpec) -> CriticalMethod {
    match spec.family {
        Family::Tfim1d | Family::Paramagnet => CriticalMethod::FreeFermion,
        Family::Goe | Family::Gue if spec.sites <= 16 => CriticalMethod::ExactSum,
        _ if spec.sites <= 12 => CriticalMethod::ExactSum,
        _ => CriticalMethod::StochasticTrace,
    }
}

/// Report for `spec` by `method` (or the default dispatch).
pub fn critical_report(
    spec: &ModelSpec,
    method: Option<CriticalMethod>,
    opts: &StochasticOptions,
) -> Result<CriticalEnergyReport> {
    let method = method.unwrap_or_else(|| default_method(spec));
    let name = spec.family.entry().name;
    match method {
        CriticalMethod::FreeFermion => free_fermion_critical_energy(&free_fermion_spectrum(spec)?, name),
        CriticalMethod::ExactSum => {
            let h = models::build(spec)?;
            if let Representation::Tridiagonal { diag, off } = h.representation() {
                if h.dim() > crate::statespace::DENSE_LIMIT {
                    let c = tridiagonal_critical_energies(diag, off)?;
                    let v = spec.sites as f64;
                    return Ok(CriticalEnergyReport::deterministic(
                        method,
                        name,
                        spec.sites,
                        c.e_c_minus / v,
                        c.e_c_plus / v,
                    ));
                }
            }
            exact_critical_energy(&h)
        }
        CriticalMethod::StochasticTrace => stochastic_critical_energy(&models::build(spec)?, opts),
        CriticalMethod::MomentExpansion => {
            if matches!(spec.family, Family::Tfim1d | Family::Paramagnet) {
                let ff = free_fermion_spectrum(spec)?;
                let eps_anti = ff.width() / ff.sites as f64;
                return Ok(moment_critical_energy(&free_fermion_moments(&ff), spec.sites, eps_anti, name));
            }
            let h = models::build(spec)?;
            let moments = match pauli_moments(&h) {
                Some(m) => m,
                None => spectral_moments(&h, 2)?,
            };
            let eps_anti = h.width() / spec.sites as f64;
            Ok(moment_critical_energy(&moments, spec.sites, eps_anti, name))
        }
    }
}
