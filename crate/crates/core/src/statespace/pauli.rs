//! Sums of Pauli strings acting on the computational basis.

use std::collections::BTreeMap;

use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// One Pauli string with a real coefficient. Bit `j` of the masks refers to
/// site `j`; Y sites carry both bits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub x_mask: u64,
    pub z_mask: u64,
}

impl PauliTerm {
    pub fn num_y(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }
}

/// Hermitian operator Σ_α h_α P_α with real coefficients.
#[derive(Clone, Debug)]
pub struct PauliSum {
    sites: usize,
    identity: f64,
    terms: Vec<PauliTerm>,
    diag: Vec<f64>,
    /// Off-diagonal strings grouped by flip mask; entries are
    /// (real coefficient including the Y phase, z mask).
    flips: Vec<(u64, Vec<(f64, u64)>)>,
}

/// Accumulates terms before the operator is finalized.
#[derive(Clone, Debug, Default)]
pub struct PauliSumBuilder {
    sites: usize,
    terms: BTreeMap<(u64, u64), f64>,
}

impl PauliSumBuilder {
    pub fn new(sites: usize) -> Self {
        Self {
            sites,
            terms: BTreeMap::new(),
        }
    }

    /// Adds `coeff · Π_j σ^{op_j}_{site_j}`. An empty product is the identity.
    pub fn add(&mut self, coeff: f64, ops: &[(usize, Pauli)]) -> &mut Self {
        let (mut x, mut z) = (0u64, 0u64);
        for &(site, p) in ops {
            assert!(site < self.sites, "site {site} out of range");
            let bit = 1u64 << site;
            assert!((x | z) & bit == 0, "site {site} repeated in Pauli string");
            match p {
                Pauli::X => x |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit
                }
                Pauli::Z => z |= bit,
            }
        }
        *self.terms.entry((x, z)).or_insert(0.0) += coeff;
        self
    }

    pub fn build(&self) -> Result<PauliSum> {
        if self.sites == 0 || self.sites > 30 {
            return Err(Error::InvalidDimension(self.sites));
        }
        let n = 1usize << self.sites;
        let mut identity = 0.0;
        let mut terms = Vec::new();
        let mut diag = vec![0.0; n];
        let mut groups: BTreeMap<u64, Vec<(f64, u64)>> = BTreeMap::new();
        for (&(x, z), &c) in &self.terms {
            if c == 0.0 {
                continue;
            }
            let term = PauliTerm {
                coeff: c,
                x_mask: x,
                z_mask: z,
            };
            if term.num_y() % 2 == 1 {
                return Err(Error::Representation(
                    "Pauli strings with an odd number of Y factors are imaginary; only real operators are supported",
                ));
            }
            let y_sign = if term.num_y() % 4 == 2 { -1.0 } else { 1.0 };
            if x == 0 && z == 0 {
                identity += c;
            } else {
                terms.push(term);
            }
            if x == 0 {
                for (b, d) in diag.iter_mut().enumerate() {
                    *d += c * parity_sign(b as u64 & z);
                }
            } else {
                groups.entry(x).or_default().push((c * y_sign, z));
            }
        }
        Ok(PauliSum {
            sites: self.sites,
            identity,
            terms,
            diag,
            flips: groups.into_iter().collect(),
        })
    }
}

#[inline]
fn parity_sign(bits: u64) -> f64 {
    if bits.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl PauliSum {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// Coefficient of the identity string, tr H / N.
    pub fn identity_coeff(&self) -> f64 {
        self.identity
    }

    /// Non-identity strings after merging duplicates.
    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Matrix element ⟨b'|H|b⟩ summed into `y[b']` for all b: `y ← H x`.
    pub fn apply_real(&self, x: &[f64], y: &mut [f64]) {
        for (b, yb) in y.iter_mut().enumerate() {
            let mut acc = self.diag[b] * x[b];
            for (flip, group) in &self.flips {
                let src = b as u64 ^ flip;
                let mut c = 0.0;
                for &(h, z) in group {
                    c += h * parity_sign(src & z);
                }
                acc += c * x[src as usize];
            }
            *yb = acc;
        }
    }

    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (b, yb) in y.iter_mut().enumerate() {
            let mut acc = x[b] * self.diag[b];
            for (flip, group) in &self.flips {
                let src = b as u64 ^ flip;
                let mut c = 0.0;
                for &(h, z) in group {
                    c += h * parity_sign(src & z);
                }
                acc += x[src as usize] * c;
            }
            *yb = acc;
        }
    }

    /// Dense row-major matrix.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let mut a = vec![0.0; n * n];
        for b in 0..n {
            a[b * n + b] = self.diag[b];
            for (flip, group) in &self.flips {
                let src = b as u64 ^ flip;
                let c: f64 = group.iter().map(|&(h, z)| h * parity_sign(src & z)).sum();
                a[b * n + src as usize] += c;
            }
        }
        a
    }

    /// s² = V⁻¹ Σ_α h_α² over the non-identity strings.
    pub fn s2(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff * t.coeff).sum::<f64>() / self.sites as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_site_matrices() {
        for (p, expect) in [
            (Pauli::X, [0.0, 1.0, 1.0, 0.0]),
            (Pauli::Z, [1.0, 0.0, 0.0, -1.0]),
        ] {
            let h = PauliSumBuilder::new(1).add(1.0, &[(0, p)]).build().unwrap();
            assert_eq!(h.to_dense(), expect.to_vec());
        }
    }

    #[test]
    fn yy_is_real() {
        // σ^y⊗σ^y = [[0,0,0,-1],[0,0,1,0],[0,1,0,0],[-1,0,0,0]]
        let h = PauliSumBuilder::new(2)
            .add(1.0, &[(0, Pauli::Y), (1, Pauli::Y)])
            .build()
            .unwrap();
        let a = h.to_dense();
        assert_eq!(a[3], -1.0);
        assert_eq!(a[6], 1.0);
        assert_eq!(a[9], 1.0);
        assert_eq!(a[12], -1.0);
    }

    #[test]
    fn odd_y_rejected() {
        let r = PauliSumBuilder::new(1).add(1.0, &[(0, Pauli::Y)]).build();
        assert!(r.is_err());
    }

    #[test]
    fn apply_matches_dense() {
        let h = PauliSumBuilder::new(3)
            .add(0.7, &[(0, Pauli::Z), (1, Pauli::Z)])
            .add(-1.3, &[(2, Pauli::X)])
            .add(0.4, &[(0, Pauli::Y), (2, Pauli::Y)])
            .add(0.2, &[(1, Pauli::X), (2, Pauli::Z)])
            .add(0.5, &[])
            .build()
            .unwrap();
        let a = h.to_dense();
        let x: Vec<f64> = (0..8).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut y = vec![0.0; 8];
        h.apply_real(&x, &mut y);
        for i in 0..8 {
            let d: f64 = (0..8).map(|j| a[i * 8 + j] * x[j]).sum();
            assert_relative_eq!(y[i], d, epsilon = 1e-14);
        }
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(a[i * 8 + j], a[j * 8 + i]);
            }
        }
        assert_relative_eq!(h.identity_coeff(), 0.5);
        assert_relative_eq!(h.s2(), (0.49 + 1.69 + 0.16 + 0.04) / 3.0, epsilon = 1e-15);
    }
}
