//! State vectors, Hermitian operators, Haar sampling and spectral moments.

mod operator;
mod pauli;
mod spectrum;

pub use operator::{
    BuildOptions, GroundSpaceInfo, HamiltonianOperator, Representation, DENSE_LIMIT,
};
pub use pauli::{Pauli, PauliSum, PauliSumBuilder, PauliTerm};
pub use spectrum::{DegeneracyPolicy, SpectralMoments, Spectrum};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result, C64};

/// Normalized complex amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps `amps`, which must have unit norm within 1e-12.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let nrm = norm(&amps);
        if (nrm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(nrm));
        }
        Ok(Self { amps })
    }

    /// Normalizes `amps`.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let nrm = norm(&amps);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::NotNormalized(nrm));
        }
        amps.iter_mut().for_each(|a| *a /= nrm);
        Ok(Self { amps })
    }

    /// Computational (or eigen-) basis state `k`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); n];
        amps[k] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub(crate) fn from_raw(amps: Vec<C64>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> C64 {
        inner(&self.amps, &other.amps)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }
}

/// ⟨a|b⟩ = Σ conj(a_i) b_i.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Haar-random state: i.i.d. standard complex Gaussians, normalized.
pub fn haar_random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let amps = (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::normalized(amps)
}

fn check_dim(h: &HamiltonianOperator, psi: &StateVector) -> Result<()> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    Ok(())
}

/// ⟨ψ|H|ψ⟩.
pub fn energy_expectation(h: &HamiltonianOperator, psi: &StateVector) -> Result<f64> {
    check_dim(h, psi)?;
    let mut hpsi = vec![C64::new(0.0, 0.0); psi.dim()];
    h.apply(psi.amplitudes(), &mut hpsi);
    let e = inner(psi.amplitudes(), &hpsi);
    if e.im.abs() > 1e-10 * h.width().max(1.0) {
        return Err(Error::NonHermitian(e.im));
    }
    Ok(e.re)
}

/// Unit normal of the energy isosurface through ψ: (H − E)ψ, made
/// orthogonal to ψ and normalized.
pub fn energy_gradient_tangent(h: &HamiltonianOperator, psi: &StateVector) -> Result<StateVector> {
    check_dim(h, psi)?;
    let mut g = vec![C64::new(0.0, 0.0); psi.dim()];
    h.apply(psi.amplitudes(), &mut g);
    let p = psi.amplitudes();
    for _ in 0..2 {
        let c = inner(p, &g);
        for (gi, pi) in g.iter_mut().zip(p) {
            *gi -= c * pi;
        }
    }
    let nrm = norm(&g);
    if nrm < 1e-14 * h.width().max(1.0) {
        return Err(Error::DegenerateGradient(nrm));
    }
    g.iter_mut().for_each(|x| *x /= nrm);
    Ok(StateVector::from_raw(g))
}

/// Spectral moments of the shifted operator up to order `n_max`, with the
/// Pauli-coefficient s² attached when available.
pub fn spectral_moments(h: &HamiltonianOperator, n_max: usize) -> Result<SpectralMoments> {
    let mut m = h.spectrum()?.moments(n_max);
    if let Representation::Pauli(p) = h.representation() {
        m.pauli_s2 = Some(p.s2());
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_relative_eq;

    fn diag_op(e: &[f64]) -> HamiltonianOperator {
        HamiltonianOperator::new(
            "diag",
            1,
            Representation::Diagonal { energies: e.to_vec() },
            BuildOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn expectation_examples() {
        let h = diag_op(&[0.0, 1.0]);
        assert_eq!(energy_expectation(&h, &StateVector::basis(2, 0)).unwrap(), 0.0);
        let s = 0.5f64.sqrt();
        let plus = StateVector::new(vec![C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();
        assert_relative_eq!(energy_expectation(&h, &plus).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn gradient_two_level() {
        let h = diag_op(&[0.0, 1.0]);
        let s = 0.5f64.sqrt();
        let plus = StateVector::new(vec![C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();
        let n = energy_gradient_tangent(&h, &plus).unwrap();
        assert_relative_eq!(n.amplitudes()[0].re, -s, epsilon = 1e-15);
        assert_relative_eq!(n.amplitudes()[1].re, s, epsilon = 1e-15);
        let err = energy_gradient_tangent(&h, &StateVector::basis(2, 1)).unwrap_err();
        assert!(matches!(err, Error::DegenerateGradient(_)));
    }

    #[test]
    fn haar_rejects_tiny_dimension() {
        let mut r = rng::stream(1, 0);
        assert!(haar_random_state(1, &mut r).is_err());
        let psi = haar_random_state(2, &mut r).unwrap();
        assert_relative_eq!(psi.norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn reflected_swaps_spaces() {
        let h = diag_op(&[0.0, 1.0, 3.0, 3.0]);
        assert_eq!(h.anti_ground_space().degeneracy, 2);
        let r = h.reflected();
        assert_eq!(r.ground_space().degeneracy, 2);
        let psi = StateVector::basis(4, 2);
        assert_relative_eq!(energy_expectation(&r, &psi).unwrap(), 0.0, epsilon = 1e-15);
        assert_eq!(r.spectrum().unwrap().energies, vec![0.0, 0.0, 2.0, 3.0]);
    }
}
