//! The typical-weight ensemble p_α ∝ 1/(1 + βE_α): partition sums, energy
//! inversion, bulk energy, critical-energy expansions, the scaling form of
//! p_gs and the nearly degenerate doublet.

use std::io::Write;

use serde::Serialize;

use crate::freefermion::FreeFermionSpectrum;
use crate::statespace::{SpectralMoments, Spectrum};
use crate::stats::pairwise_sum;
use crate::{Error, Result};

/// One row of an ensemble curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnsemblePoint {
    pub beta: f64,
    pub z: f64,
    /// Σ_α E_α/(1+βE_α).
    pub ze: f64,
    pub e_av: f64,
    pub p_gs: f64,
    pub p_anti_gs: f64,
    /// Weight on the second-lowest level (near-degeneracy analysis).
    pub p_1: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    SpectralSum,
    FreeFermionQuadrature,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleCurve {
    pub rows: Vec<EnsemblePoint>,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub eta: f64,
    pub p_rescaled: f64,
    pub f_eta: f64,
}

/// Regime boundaries for a split ground doublet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NearDegeneracy {
    /// Splitting Δ = E_1 − E_0.
    pub gap: f64,
    /// ε_c1 = E_c1/V with E_c1⁻¹ = (N−2)⁻¹ Σ_{α≥2} 1/E_α.
    pub eps_c1: f64,
    /// ε_c0 = E_c0/V with E_c0⁻¹ = (N−1)⁻¹ Σ_{α≥1} 1/E_α.
    pub eps_c0: f64,
}

fn check_pole(beta: f64, width: f64) -> Result<()> {
    if !beta.is_finite() || 1.0 + beta * width <= 0.0 {
        return Err(Error::InvalidBeta(beta));
    }
    Ok(())
}

/// Normalized weights p_α = Z⁻¹/(1 + βE_α) over the shifted spectrum.
pub fn typical_weights(spectrum: &Spectrum, beta: f64) -> Result<Vec<f64>> {
    check_pole(beta, spectrum.width())?;
    let raw: Vec<f64> = spectrum.energies.iter().map(|e| 1.0 / (1.0 + beta * e)).collect();
    let z = pairwise_sum(&raw);
    Ok(raw.into_iter().map(|w| w / z).collect())
}

/// Ensemble quantities at `beta` by direct summation over the spectrum.
pub fn ensemble_point(spectrum: &Spectrum, beta: f64) -> Result<EnsemblePoint> {
    check_pole(beta, spectrum.width())?;
    let w: Vec<f64> = spectrum.energies.iter().map(|e| 1.0 / (1.0 + beta * e)).collect();
    let we: Vec<f64> = spectrum
        .energies
        .iter()
        .zip(&w)
        .map(|(e, x)| e * x)
        .collect();
    let z = pairwise_sum(&w);
    let ze = pairwise_sum(&we);
    let n = spectrum.dim();
    let anti: f64 = w[n - spectrum.anti_degeneracy..].iter().sum();
    Ok(EnsemblePoint {
        beta,
        z,
        ze,
        e_av: ze / z,
        p_gs: spectrum.ground_degeneracy as f64 / z,
        p_anti_gs: anti / z,
        p_1: None,
    })
}

/// Ensemble quantities from free-fermion quadrature. Negative β uses the
/// reflection symmetry of the occupation spectrum.
pub fn ff_ensemble_point(ff: &FreeFermionSpectrum, beta: f64) -> Result<EnsemblePoint> {
    let w = ff.width();
    check_pole(beta, w)?;
    let ng = ff.ground_degeneracy();
    if beta == 0.0 {
        let n = ff.dim();
        return Ok(EnsemblePoint {
            beta,
            z: n,
            ze: n * ff.mean_energy(),
            e_av: ff.mean_energy(),
            p_gs: ng / n,
            p_anti_gs: ng / n,
            p_1: None,
        });
    }
    if beta < 0.0 {
        let p = ff_ensemble_point(ff, reflect_beta(beta, w))?;
        return Ok(mirror_point(&p, w));
    }
    let z = ff.stable_z(beta)?;
    let ze = ff.stable_ze(beta)?;
    Ok(EnsemblePoint {
        beta,
        z,
        ze,
        e_av: ze / z,
        p_gs: ng / z,
        p_anti_gs: ng / (1.0 + beta * w) / z,
        p_1: None,
    })
}

/// Converts a point of the reflected spectrum W − E at β' into the point of
/// the original spectrum at the mirrored β.
pub fn mirror_point(p: &EnsemblePoint, width: f64) -> EnsemblePoint {
    let beta = reflect_beta(p.beta, width);
    let z = p.z * (1.0 + p.beta * width);
    let e_av = width - p.e_av;
    EnsemblePoint {
        beta,
        z,
        ze: e_av * z,
        e_av,
        p_gs: p.p_anti_gs,
        p_anti_gs: p.p_gs,
        p_1: None,
    }
}

/// Maps β between a spectrum of width W and its reflection W − E; the map
/// is an involution.
pub fn reflect_beta(beta: f64, width: f64) -> f64 {
    -beta / (1.0 + beta * width)
}

/// Bisection in ln β for β > 0 with E_av(β) = target < E_av(0).
fn solve_positive(target: f64, width: f64, e_av: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let scale = 1.0 / width;
    let mut lo = 1e-3 * scale;
    while e_av(lo)? <= target {
        lo *= 1e-3;
        if lo < 1e-300 {
            return Err(Error::OutOfRange {
                value: target,
                lower: 0.0,
                upper: width,
            });
        }
    }
    let mut hi = scale;
    while e_av(hi)? >= target {
        hi *= 1e3;
        if hi > 1e300 {
            return Err(Error::OutOfRange {
                value: target,
                lower: 0.0,
                upper: width,
            });
        }
    }
    let (mut llo, mut lhi) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let mid = 0.5 * (llo + lhi);
        let e = e_av(mid.exp())?;
        if (e - target).abs() <= 1e-10 * target.abs() {
            return Ok(mid.exp());
        }
        if e > target {
            llo = mid;
        } else {
            lhi = mid;
        }
        if lhi - llo < 1e-15 * lhi.abs().max(1.0) {
            break;
        }
    }
    Ok((0.5 * (llo + lhi)).exp())
}

fn check_target(e: f64, width: f64) -> Result<()> {
    if !(e > 0.0 && e < width) {
        return Err(Error::OutOfRange {
            value: e,
            lower: 0.0,
            upper: width,
        });
    }
    Ok(())
}

/// β such that the typical-weight mean energy equals `e_av`.
pub fn solve_beta_for_energy(spectrum: &Spectrum, e_av: f64) -> Result<f64> {
    let w = spectrum.width();
    check_target(e_av, w)?;
    let e_inf = spectrum.mean_energy();
    if (e_av - e_inf).abs() <= 1e-12 * w {
        return Ok(0.0);
    }
    if e_av < e_inf {
        solve_positive(e_av, w, |b| Ok(ensemble_point(spectrum, b)?.e_av))
    } else {
        let r = spectrum.reflected();
        let bp = solve_positive(w - e_av, w, |b| Ok(ensemble_point(&r, b)?.e_av))?;
        Ok(reflect_beta(bp, w))
    }
}

/// As [`solve_beta_for_energy`] with free-fermion quadrature sums.
pub fn solve_beta_for_energy_ff(ff: &FreeFermionSpectrum, e_av: f64) -> Result<f64> {
    let w = ff.width();
    check_target(e_av, w)?;
    let e_inf = ff.mean_energy();
    if (e_av - e_inf).abs() <= 1e-12 * w {
        return Ok(0.0);
    }
    let f = |b| Ok(ff_ensemble_point(ff, b)?.e_av);
    if e_av < e_inf {
        solve_positive(e_av, w, f)
    } else {
        // the occupation spectrum is its own reflection
        Ok(reflect_beta(solve_positive(w - e_av, w, f)?, w))
    }
}

/// Bulk-only weighted energy Σ_b E/(1+βE) / Σ_b 1/(1+βE), β ≥ 0.
pub fn bulk_energy(spectrum: &Spectrum, beta: f64) -> Result<f64> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidBeta(beta));
    }
    let bulk = spectrum.bulk();
    let w: Vec<f64> = bulk.iter().map(|e| 1.0 / (1.0 + beta * e)).collect();
    let we: Vec<f64> = bulk.iter().zip(&w).map(|(e, x)| e * x).collect();
    Ok(pairwise_sum(&we) / pairwise_sum(&w))
}

/// Leading-order moment expansion (ε_c−, ε_c+) in energy-density units:
/// ε_c− = ε_∞(1 − s²/(Vε_∞²)) and its mirror image
/// ε_c+ = ε_∞ + s²/(V(ε_anti − ε_∞)).
pub fn critical_energy_moment_expansion(
    moments: &SpectralMoments,
    sites: usize,
    eps_anti: f64,
) -> (f64, f64) {
    let v = sites as f64;
    let e = moments.eps_infinity;
    let s2 = moments.s2;
    if s2 == 0.0 {
        return (e, e);
    }
    let minus = e * (1.0 - s2 / (v * e * e));
    let plus = e + s2 / (v * (eps_anti - e));
    (minus, plus)
}

/// Resummed expansion ε_c⁻¹ = ε_∞⁻¹ Σ_n (−1)ⁿ μ_n/ε_∞ⁿ using every central
/// moment available.
pub fn critical_energy_moment_series(moments: &SpectralMoments, eps_anti: f64) -> (f64, f64) {
    let series = |center: f64, sign: f64| {
        let mut sum = 1.0;
        for (i, mu) in moments.central_moments.iter().enumerate() {
            let n = (i + 2) as i32;
            let mu = if n % 2 == 1 { sign * mu } else { *mu };
            sum += (-1f64).powi(n) * mu / center.powi(n);
        }
        center / sum
    };
    let e = moments.eps_infinity;
    (series(e, 1.0), eps_anti - series(eps_anti - e, -1.0))
}

/// Critical densities of a semicircle density centred at `center` with
/// half-width `radius` (ground energy center − radius = 0 when shifted):
/// ∫ρ(ε)/ε dε = 2(c − √(c² − R²))/R².
pub fn semicircle_critical_energies(center: f64, radius: f64) -> (f64, f64) {
    let inv = |c: f64| 2.0 * (c - (c * c - radius * radius).max(0.0).sqrt()) / (radius * radius);
    let lower = center - radius;
    let upper = center + radius;
    // distances measured from each edge
    let minus = lower + 1.0 / inv(center - lower);
    let plus = upper - 1.0 / inv(upper - center);
    (minus, plus)
}

/// Scaling function f(η) = ½(−η + √(η² + 4)).
pub fn scaling_f(eta: f64) -> f64 {
    if eta > 0.0 {
        // avoids cancellation for large positive η
        2.0 / (eta + (eta * eta + 4.0).sqrt())
    } else {
        0.5 * (-eta + (eta * eta + 4.0).sqrt())
    }
}

/// η = (ε − ε_c)·√(NV)/s and p_gs·ε_∞·√(NV)/s for each curve row.
pub fn scaling_transform(
    rows: &[EnsemblePoint],
    sites: usize,
    moments: &SpectralMoments,
    eps_c: f64,
) -> Vec<ScalingPoint> {
    let v = sites as f64;
    let root = ((sites as f64).exp2() * v).sqrt() / moments.s2.sqrt();
    rows.iter()
        .map(|r| {
            let eta = (r.e_av / v - eps_c) * root;
            ScalingPoint {
                eta,
                p_rescaled: r.p_gs * moments.eps_infinity * root,
                f_eta: scaling_f(eta),
            }
        })
        .collect()
}

/// Scaling points of the free-fermion chain for |η| ≤ `eta_max`, computed
/// through the offset E_av/E_c − 1 so that they resolve windows far below
/// double-precision spacing of E_av.
pub fn ff_scaling_points(
    ff: &FreeFermionSpectrum,
    eta_max: f64,
    points: usize,
) -> Result<Vec<ScalingPoint>> {
    let v = ff.sites as f64;
    let s = ff.s2().sqrt();
    let inv_sum = ff.inverse_energy_sum()?;
    let eps_c = ff.bulk_size() / inv_sum / v;
    let root = (ff.dim() * v).sqrt() / s;
    let eta_of = |beta: f64| -> Result<(f64, f64)> {
        let off = ff.critical_offset(beta, inv_sum)?;
        Ok((off.delta * eps_c * root, off.p_gs))
    };
    // η(β) decreases monotonically; bracket ±eta_max in ln β
    let find = |target: f64| -> Result<f64> {
        let guess = (ff.dim() / ff.width()).max(1.0);
        let (mut lo, mut hi) = (guess.ln(), guess.ln());
        while eta_of(lo.exp())?.0 < target {
            lo -= 2.0;
        }
        while eta_of(hi.exp())?.0 > target {
            hi += 2.0;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if eta_of(mid.exp())?.0 > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    let l0 = find(eta_max)?;
    let l1 = find(-eta_max)?;
    (0..points)
        .map(|i| {
            let lb = l0 + (l1 - l0) * i as f64 / (points - 1).max(1) as f64;
            let (eta, p) = eta_of(lb.exp())?;
            Ok(ScalingPoint {
                eta,
                p_rescaled: p * ff.eps_infinity() * root,
                f_eta: scaling_f(eta),
            })
        })
        .collect()
}

/// β grid logarithmic in 1 + β from 1e-6 to 1e3·N.
pub fn default_beta_grid(n_dim: f64, points: usize) -> Vec<f64> {
    let a = (1.0 + 1e-6f64).ln();
    let b = (1.0 + 1e3 * n_dim).ln();
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1).max(1) as f64).exp_m1())
        .collect()
}

/// Grid covering both tails: the reflected image of the positive grid
/// (ascending negative β) followed by the positive grid.
pub fn two_sided_beta_grid(n_dim: f64, width: f64, points: usize) -> Vec<f64> {
    let pos = default_beta_grid(n_dim, points);
    let mut out: Vec<f64> = pos.iter().rev().map(|&b| reflect_beta(b, width)).collect();
    out.push(0.0);
    out.extend(pos);
    out
}

impl EnsembleCurve {
    pub fn from_spectrum(spectrum: &Spectrum, betas: &[f64]) -> Result<Self> {
        let rows = betas
            .iter()
            .map(|&b| ensemble_point(spectrum, b))
            .collect::<Result<_>>()?;
        Ok(Self {
            rows,
            provenance: Provenance::SpectralSum,
        })
    }

    pub fn from_free_fermions(ff: &FreeFermionSpectrum, betas: &[f64]) -> Result<Self> {
        let rows = betas
            .iter()
            .map(|&b| ff_ensemble_point(ff, b))
            .collect::<Result<_>>()?;
        Ok(Self {
            rows,
            provenance: Provenance::FreeFermionQuadrature,
        })
    }

    /// Curve over the two-sided grid; negative β rows are evaluated on the
    /// reflected spectrum to keep accuracy near the pole β = −1/W.
    pub fn two_sided(spectrum: &Spectrum, points: usize) -> Result<Self> {
        let w = spectrum.width();
        let pos = default_beta_grid(spectrum.dim() as f64, points);
        let r = spectrum.reflected();
        let mut rows = Vec::with_capacity(2 * points + 1);
        for &b in pos.iter().rev() {
            rows.push(mirror_point(&ensemble_point(&r, b)?, w));
        }
        rows.push(ensemble_point(spectrum, 0.0)?);
        for &b in &pos {
            rows.push(ensemble_point(spectrum, b)?);
        }
        Ok(Self {
            rows,
            provenance: Provenance::SpectralSum,
        })
    }

    /// Checks that E_av strictly decreases along increasing β.
    pub fn check_monotone(&self) -> Result<()> {
        for w in self.rows.windows(2) {
            if w[1].beta <= w[0].beta {
                return Err(Error::Invariant(format!(
                    "β grid not increasing at β = {}",
                    w[0].beta
                )));
            }
            if w[1].e_av >= w[0].e_av {
                return Err(Error::Invariant(format!(
                    "E_av not decreasing between β = {} and β = {} ({} → {})",
                    w[0].beta, w[1].beta, w[0].e_av, w[1].e_av
                )));
            }
        }
        Ok(())
    }

    /// CSV `beta,Z,E_av,p_gs,p_anti_gs[,p_1]`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let with_p1 = self.rows.iter().any(|r| r.p_1.is_some());
        writeln!(out, "beta,Z,E_av,p_gs,p_anti_gs{}", if with_p1 { ",p_1" } else { "" })?;
        for r in &self.rows {
            write!(
                out,
                "{:e},{:e},{:e},{:e},{:e}",
                r.beta, r.z, r.e_av, r.p_gs, r.p_anti_gs
            )?;
            if with_p1 {
                write!(out, ",{:e}", r.p_1.unwrap_or(f64::NAN))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// CSV `beta,Z,ZE,E_av,p_gs`.
    pub fn write_ff_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "beta,Z,ZE,E_av,p_gs")?;
        for r in &self.rows {
            writeln!(out, "{:e},{:e},{:e},{:e},{:e}", r.beta, r.z, r.ze, r.e_av, r.p_gs)?;
        }
        Ok(())
    }
}

/// CSV `eta,p_rescaled,f_eta`.
pub fn write_scaling_csv(points: &[ScalingPoint], mut out: impl Write) -> Result<()> {
    writeln!(out, "eta,p_rescaled,f_eta")?;
    for p in points {
        writeln!(out, "{:e},{:e},{:e}", p.eta, p.p_rescaled, p.f_eta)?;
    }
    Ok(())
}

/// Regime boundaries of the lowest doublet.
pub fn near_degeneracy(spectrum: &Spectrum) -> Result<NearDegeneracy> {
    let e = &spectrum.energies;
    let n = e.len();
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    let v = spectrum.sites as f64;
    let upper: Vec<f64> = e[2..].iter().map(|x| 1.0 / x).collect();
    if e[2] <= 0.0 {
        return Err(Error::Divergent("third level is degenerate with the ground state".into()));
    }
    let s2 = pairwise_sum(&upper);
    let ec1 = (n - 2) as f64 / s2;
    let ec0 = if e[1] > 0.0 {
        (n - 1) as f64 / (s2 + 1.0 / e[1])
    } else {
        0.0
    };
    Ok(NearDegeneracy {
        gap: e[1],
        eps_c1: ec1 / v,
        eps_c0: ec0 / v,
    })
}

/// Curve tracking the two lowest levels separately.
pub fn near_degeneracy_curve(
    spectrum: &Spectrum,
    betas: &[f64],
) -> Result<(EnsembleCurve, NearDegeneracy)> {
    let info = near_degeneracy(spectrum)?;
    let rows = betas
        .iter()
        .map(|&b| {
            let mut p = ensemble_point(spectrum, b)?;
            p.p_gs = 1.0 / p.z;
            p.p_1 = Some(1.0 / (1.0 + b * spectrum.energies[1]) / p.z);
            Ok(p)
        })
        .collect::<Result<_>>()?;
    Ok((
        EnsembleCurve {
            rows,
            provenance: Provenance::SpectralSum,
        },
        info,
    ))
}
