//! Jordan–Wigner solution of the open transverse-field Ising chain and
//! numerically stable spectral sums over its 2^V many-body levels.
//!
//! Every many-body sum is written as a Laplace-type integral of
//! `tr e^{−yH} = Π_k (1 + e^{−yε_k})`, evaluated in the log domain.

use crate::linalg::hermitian_eigenvalues;
use crate::quadrature::{integrate_semi_infinite, log1pexp};
use crate::statespace::DegeneracyPolicy;
use crate::{Error, Result, C64};

const REL_TOL: f64 = 1e-10;

/// Single-particle energies of H = Σ_k ε_k n_k (shifted, ground energy 0).
#[derive(Clone, Debug, PartialEq)]
pub struct FreeFermionSpectrum {
    pub sites: usize,
    /// Ascending, non-negative. Modes grouped into the ground space are 0.
    pub epsilons: Vec<f64>,
    /// Number of zero modes; the ground space has 2^zero_modes states.
    pub zero_modes: usize,
    /// Unshifted ground energy −Σ ε_k / 2; the shifted spectrum is Σ ε_k n_k.
    pub const_shift: f64,
}

/// E_av/E_c − 1 and companions, computed without cancellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalOffset {
    pub beta: f64,
    /// E_av/E_c − 1.
    pub delta: f64,
    pub p_gs: f64,
    /// Σ_bulk 1/(1+βE).
    pub z_bulk: f64,
}

/// Single-particle spectrum of J Σ σᶻ_jσᶻ_{j+1} + h Σ σˣ_j on an open chain.
///
/// Builds the 2V×2V real antisymmetric Majorana coupling matrix A with
/// A_{2j,2j+1} = h and A_{2j+1,2j+2} = J; its eigenvalues come in pairs
/// ±iε_k/2.
pub fn jordan_wigner_spectrum(sites: usize, j: f64, h: f64) -> Result<FreeFermionSpectrum> {
    jordan_wigner_spectrum_with(sites, j, h, DegeneracyPolicy::Tolerance)
}

pub fn jordan_wigner_spectrum_with(
    sites: usize,
    j: f64,
    h: f64,
    policy: DegeneracyPolicy,
) -> Result<FreeFermionSpectrum> {
    if sites == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let m = 2 * sites;
    let mut a = vec![0.0; m * m];
    for s in 0..sites {
        a[(2 * s) * m + 2 * s + 1] = h;
        if s + 1 < sites {
            a[(2 * s + 1) * m + 2 * s + 2] = j;
        }
    }
    for r in 0..m {
        for c in 0..r {
            a[r * m + c] = -a[c * m + r];
        }
    }
    // iA is Hermitian with eigenvalues ∓ε_k/2
    let ia: Vec<C64> = a.iter().map(|&x| C64::new(0.0, x)).collect();
    let lam = hermitian_eigenvalues(m, &ia)?;
    let scale = lam.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for i in 0..sites {
        worst = worst.max((lam[i] + lam[m - 1 - i]).abs());
    }
    if worst > 1e-10 * scale.max(1.0) {
        return Err(Error::NumericalPairing(worst));
    }
    let eps: Vec<f64> = (0..sites)
        .map(|i| (lam[m - 1 - i] - lam[i]).max(0.0))
        .collect();
    FreeFermionSpectrum::new(sites, eps, policy)
}

impl FreeFermionSpectrum {
    /// Groups modes below the degeneracy tolerance into the ground space.
    pub fn new(sites: usize, mut epsilons: Vec<f64>, policy: DegeneracyPolicy) -> Result<Self> {
        if epsilons.iter().any(|e| !e.is_finite() || *e < -1e-12) {
            return Err(Error::InvalidModel("single-particle energies must be ≥ 0".into()));
        }
        epsilons.iter_mut().for_each(|e| *e = e.max(0.0));
        epsilons.sort_by(f64::total_cmp);
        let width: f64 = epsilons.iter().sum();
        let tol = policy.tolerance(width);
        let zero_modes = epsilons.iter().filter(|&&e| e <= tol).count();
        let const_shift = -0.5 * width;
        epsilons[..zero_modes].iter_mut().for_each(|e| *e = 0.0);
        Ok(Self {
            sites,
            epsilons,
            zero_modes,
            const_shift,
        })
    }

    /// Uses the given modes verbatim with `zero_modes` declared ground-space
    /// modes; an undeclared exact zero mode makes bulk sums diverge.
    pub fn from_parts(sites: usize, mut epsilons: Vec<f64>, zero_modes: usize) -> Self {
        epsilons.sort_by(f64::total_cmp);
        let const_shift = -0.5 * epsilons.iter().sum::<f64>();
        Self {
            sites,
            epsilons,
            zero_modes,
            const_shift,
        }
    }

    /// 2^V as a float.
    pub fn dim(&self) -> f64 {
        (self.epsilons.len() as f64).exp2()
    }

    pub fn ground_degeneracy(&self) -> f64 {
        (self.zero_modes as f64).exp2()
    }

    pub fn bulk_size(&self) -> f64 {
        self.dim() - self.ground_degeneracy()
    }

    /// E_max = Σ ε_k.
    pub fn width(&self) -> f64 {
        self.epsilons.iter().sum()
    }

    /// Mean many-body energy E_∞ = Σ ε_k / 2.
    pub fn mean_energy(&self) -> f64 {
        0.5 * self.width()
    }

    pub fn eps_infinity(&self) -> f64 {
        self.mean_energy() / self.sites as f64
    }

    /// s² = V⁻¹ Σ_k ε_k²/4 (modes are independent two-level systems).
    pub fn s2(&self) -> f64 {
        self.epsilons.iter().map(|e| 0.25 * e * e).sum::<f64>() / self.sites as f64
    }

    fn active(&self) -> &[f64] {
        &self.epsilons[self.zero_modes..]
    }

    fn check_divergence(&self) -> Result<()> {
        if self.active().first().is_some_and(|&e| e == 0.0) {
            return Err(Error::Divergent(
                "exact zero mode outside the declared ground space".into(),
            ));
        }
        if self.active().is_empty() {
            return Err(Error::Divergent("no bulk levels".into()));
        }
        Ok(())
    }

    /// Σ_{active k ≠ skip} log(1 + e^{−yε_k}).
    fn log_trace(&self, y: f64, skip: Option<usize>) -> f64 {
        self.active()
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .map(|(_, e)| log1pexp(-y * e))
            .sum()
    }

    fn scales(&self, beta: f64) -> (f64, f64) {
        let w = self.width().max(f64::MIN_POSITIVE);
        let eps_min = self.active().first().copied().unwrap_or(w);
        let inv_beta = if beta.is_finite() { 1.0 / beta } else { 0.0 };
        let scale = (1.0 / w).min(if beta.is_finite() { beta } else { f64::INFINITY });
        (scale, inv_beta + eps_min)
    }

    fn check_beta(beta: f64) -> Result<()> {
        if !(beta > 0.0) || beta.is_nan() {
            return Err(Error::InvalidBeta(beta));
        }
        Ok(())
    }

    /// Z_bulk(β) = Σ_{α∉gs} 1/(1+βE_α).
    pub fn bulk_z(&self, beta: f64) -> Result<f64> {
        Self::check_beta(beta)?;
        self.check_divergence()?;
        let (scale, rate) = self.scales(beta);
        let ng = self.ground_degeneracy();
        let i = integrate_semi_infinite(
            |y| (-y / beta).exp() * self.log_trace(y, None).exp_m1(),
            scale,
            rate,
            REL_TOL,
        )?;
        Ok(ng * i / beta)
    }

    /// Z(β) = Σ_α 1/(1+βE_α).
    pub fn stable_z(&self, beta: f64) -> Result<f64> {
        Ok(self.ground_degeneracy() + self.bulk_z(beta)?)
    }

    /// Σ_α E_α/(1+βE_α).
    pub fn stable_ze(&self, beta: f64) -> Result<f64> {
        Self::check_beta(beta)?;
        self.check_divergence()?;
        let (scale, _) = self.scales(beta);
        let ng = self.ground_degeneracy();
        let act = self.active();
        let mut total = 0.0;
        for (k, &ek) in act.iter().enumerate() {
            let others_min = act
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != k)
                .map(|(_, e)| *e)
                .next()
                .unwrap_or(0.0);
            let rate = 1.0 / beta + ek + others_min;
            let integral = if act.len() > 1 {
                integrate_semi_infinite(
                    |y| (-y * (1.0 / beta + ek)).exp() * self.log_trace(y, Some(k)).exp_m1(),
                    scale,
                    rate,
                    REL_TOL,
                )?
            } else {
                0.0
            };
            total += ek * (1.0 / (1.0 + beta * ek) + integral / beta);
        }
        Ok(ng * total)
    }

    /// Σ_{α∉gs} 1/E_α = ∫dλ (tr e^{−λH} − N_gs).
    pub fn inverse_energy_sum(&self) -> Result<f64> {
        self.check_divergence()?;
        let (scale, rate) = self.scales(f64::INFINITY);
        let ng = self.ground_degeneracy();
        let i = integrate_semi_infinite(|y| self.log_trace(y, None).exp_m1(), scale, rate, REL_TOL)?;
        Ok(ng * i)
    }

    /// E_c− = N_bulk / Σ_{α∉gs} 1/E_α.
    pub fn critical_energy(&self) -> Result<f64> {
        Ok(self.bulk_size() / self.inverse_energy_sum()?)
    }

    /// R(β) = Σ_{α∉gs} 1/(E_α(1+βE_α)).
    pub fn resolvent_remainder(&self, beta: f64) -> Result<f64> {
        Self::check_beta(beta)?;
        self.check_divergence()?;
        let (scale, rate) = self.scales(f64::INFINITY);
        let ng = self.ground_degeneracy();
        let i = integrate_semi_infinite(
            |y| self.log_trace(y, None).exp_m1() * -(-y / beta).exp_m1(),
            scale,
            rate,
            REL_TOL,
        )?;
        Ok(ng * i)
    }

    /// E_av(β)/E_c − 1 from
    /// E_av/E_c = (1 − Z_b/N_b) / (1 + (βN_gs − R)/S), which stays accurate
    /// when the offset is far below the quadrature tolerance.
    pub fn critical_offset(&self, beta: f64, inverse_sum: f64) -> Result<CriticalOffset> {
        let z_b = self.bulk_z(beta)?;
        let r = self.resolvent_remainder(beta)?;
        let ng = self.ground_degeneracy();
        let x = (beta * ng - r) / inverse_sum;
        let delta = (-z_b / self.bulk_size() - x) / (1.0 + x);
        Ok(CriticalOffset {
            beta,
            delta,
            p_gs: ng / (ng + z_b),
            z_bulk: z_b,
        })
    }

    /// All 2^V shifted many-body energies, ascending (small V only).
    pub fn many_body_energies(&self) -> Vec<f64> {
        assert!(self.sites <= 24, "enumeration limited to V ≤ 24");
        let v = self.epsilons.len();
        let mut out: Vec<f64> = (0..1usize << v)
            .map(|mask| {
                (0..v)
                    .filter(|k| mask & (1 << k) != 0)
                    .map(|k| self.epsilons[k])
                    .sum()
            })
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }
}
