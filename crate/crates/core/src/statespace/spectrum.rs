use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How eigenvalues near the extremes are grouped into (anti-)ground spaces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegeneracyPolicy {
    /// Group levels within max(1e-9·‖H‖, 1e-12) of the extreme.
    #[default]
    Tolerance,
    /// Group only levels equal to roundoff, 1e-12·‖H‖.
    ExactOnly,
}

impl DegeneracyPolicy {
    /// Grouping tolerance for a spectrum of width `width`.
    pub fn tolerance(self, width: f64) -> f64 {
        match self {
            Self::Tolerance => (1e-9 * width).max(1e-12),
            Self::ExactOnly => (1e-12 * width).max(1e-15),
        }
    }
}

/// Shifted many-body spectrum (ascending, lowest level at 0) with the sizes
/// of the ground and anti-ground spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub sites: usize,
    pub energies: Vec<f64>,
    pub ground_degeneracy: usize,
    pub anti_degeneracy: usize,
}

/// Density-of-states diagnostics in energy-density units ε = E/V.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMoments {
    pub eps_infinity: f64,
    pub s2: f64,
    /// μ_n(ε) for n = 2..=n_max, index 0 holding μ_2.
    pub central_moments: Vec<f64>,
    /// V⁻¹ Σ h_α² when a Pauli decomposition is available.
    pub pauli_s2: Option<f64>,
}

impl SpectralMoments {
    pub fn mu(&self, n: usize) -> f64 {
        assert!(n >= 2);
        self.central_moments[n - 2]
    }
}

impl Spectrum {
    /// Sorts and shifts `energies`, grouping the extremes according to
    /// `policy`.
    pub fn from_energies(sites: usize, energies: &[f64], policy: DegeneracyPolicy) -> Result<Self> {
        if energies.len() < 2 {
            return Err(Error::InvalidDimension(energies.len()));
        }
        let mut e = energies.to_vec();
        if e.iter().any(|v| !v.is_finite()) {
            return Err(Error::Eigensolver("non-finite eigenvalue".into()));
        }
        e.sort_by(f64::total_cmp);
        let e0 = e[0];
        e.iter_mut().for_each(|v| *v -= e0);
        let width = *e.last().unwrap();
        let tol = policy.tolerance(width);
        if width <= tol {
            return Err(Error::DegenerateSpectrum(width));
        }
        let g = e.iter().take_while(|&&v| v <= tol).count();
        let a = e.iter().rev().take_while(|&&v| width - v <= tol).count();
        e[..g].iter_mut().for_each(|v| *v = 0.0);
        Ok(Self {
            sites,
            energies: e,
            ground_degeneracy: g,
            anti_degeneracy: a,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn width(&self) -> f64 {
        *self.energies.last().unwrap()
    }

    /// Levels outside the ground space.
    pub fn bulk_size(&self) -> usize {
        self.dim() - self.ground_degeneracy
    }

    /// Levels outside the ground space, ascending.
    pub fn bulk(&self) -> &[f64] {
        &self.energies[self.ground_degeneracy..]
    }

    /// Spectrum of E_max − H, which swaps ground and anti-ground spaces.
    pub fn reflected(&self) -> Self {
        let w = self.width();
        let energies = self.energies.iter().rev().map(|e| (w - e).max(0.0)).collect();
        Self {
            sites: self.sites,
            energies,
            ground_degeneracy: self.anti_degeneracy,
            anti_degeneracy: self.ground_degeneracy,
        }
    }

    pub fn mean_energy(&self) -> f64 {
        crate::stats::pairwise_sum(&self.energies) / self.dim() as f64
    }

    /// Central moments of the energy density up to order `n_max`.
    pub fn moments(&self, n_max: usize) -> SpectralMoments {
        let v = self.sites as f64;
        let n = self.dim() as f64;
        let eps_inf = self.mean_energy() / v;
        let central_moments: Vec<f64> = (2..=n_max.max(2))
            .map(|k| {
                let terms: Vec<f64> = self
                    .energies
                    .iter()
                    .map(|e| (e / v - eps_inf).powi(k as i32))
                    .collect();
                crate::stats::pairwise_sum(&terms) / n
            })
            .collect();
        SpectralMoments {
            eps_infinity: eps_inf,
            s2: v * central_moments[0],
            central_moments,
            pauli_s2: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_level_moments() {
        let s = Spectrum::from_energies(1, &[0.0, 2.0], DegeneracyPolicy::Tolerance).unwrap();
        let m = s.moments(4);
        assert_relative_eq!(m.eps_infinity, 1.0);
        assert_relative_eq!(m.s2, 1.0);
        assert_relative_eq!(m.mu(2), m.s2 / 1.0, max_relative = 1e-12);
        assert_relative_eq!(m.mu(3), 0.0);
    }

    #[test]
    fn groups_extremes() {
        let s = Spectrum::from_energies(2, &[5.0, -1.0, -1.0, 3.0, 5.0 - 1e-14], DegeneracyPolicy::Tolerance)
            .unwrap();
        assert_eq!(s.energies[0], 0.0);
        assert_eq!(s.ground_degeneracy, 2);
        assert_eq!(s.anti_degeneracy, 2);
        let r = s.reflected();
        assert_eq!(r.ground_degeneracy, 2);
        assert_relative_eq!(r.energies[2], 2.0, epsilon = 1e-13);
    }

    #[test]
    fn constant_spectrum_rejected() {
        let r = Spectrum::from_energies(1, &[1.0, 1.0], DegeneracyPolicy::Tolerance);
        assert!(matches!(r, Err(Error::DegenerateSpectrum(_))));
    }
}
