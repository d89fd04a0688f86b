//! The Hamiltonian catalog: transverse- and mixed-field Ising chains and
//! square lattices, the ferromagnetic Heisenberg ring, a pure paramagnet and
//! the tridiagonal Gaussian β-ensembles.

use std::collections::BTreeMap;

use rand_distr::{ChiSquared, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::statespace::{
    BuildOptions, DegeneracyPolicy, HamiltonianOperator, Pauli, PauliSum, PauliSumBuilder,
    Representation,
};
use crate::{rng, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Tfim1d,
    Tfim2d,
    Mfim1d,
    Heisenberg1d,
    Goe,
    Gue,
    Paramagnet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Declarative model description, as read from the `[model]` config table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: Family,
    #[serde(rename = "V")]
    pub sites: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Boundary>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub exact_degeneracy_only: bool,
}

/// Catalog entry for `models list`.
pub struct CatalogEntry {
    pub family: Family,
    pub name: &'static str,
    pub description: &'static str,
    /// Parameter names with defaults (`None` = required).
    pub params: &'static [(&'static str, Option<f64>)],
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        family: Family::Tfim1d,
        name: "tfim1d",
        description: "open chain  J Σ σᶻσᶻ + h_x Σ σˣ",
        params: &[("h_x", None), ("J", Some(1.0))],
    },
    CatalogEntry {
        family: Family::Tfim2d,
        name: "tfim2d",
        description: "Lx×Ly square lattice (open by default)  J Σ σᶻσᶻ + h_x Σ σˣ",
        params: &[("h_x", None), ("J", Some(1.0)), ("Lx", None), ("Ly", None)],
    },
    CatalogEntry {
        family: Family::Mfim1d,
        name: "mfim1d",
        description: "open chain  J Σ σᶻσᶻ + Σ (h_x σˣ + h_z σᶻ)",
        params: &[("h_x", Some(1.4)), ("h_z", Some(0.9045)), ("J", Some(1.0))],
    },
    CatalogEntry {
        family: Family::Heisenberg1d,
        name: "heisenberg1d",
        description: "periodic ferromagnetic ring  −J Σ σ_j·σ_{j+1}",
        params: &[("J", Some(1.0))],
    },
    CatalogEntry {
        family: Family::Goe,
        name: "goe",
        description: "tridiagonal Gaussian orthogonal ensemble, semicircle half-width V",
        params: &[],
    },
    CatalogEntry {
        family: Family::Gue,
        name: "gue",
        description: "tridiagonal Gaussian unitary ensemble, semicircle half-width V",
        params: &[],
    },
    CatalogEntry {
        family: Family::Paramagnet,
        name: "paramagnet",
        description: "uncoupled spins  h Σ σˣ",
        params: &[("h", None)],
    },
];

impl Family {
    pub fn entry(self) -> &'static CatalogEntry {
        CATALOG.iter().find(|e| e.family == self).unwrap()
    }

    pub fn is_random(self) -> bool {
        matches!(self, Family::Goe | Family::Gue)
    }

    fn default_boundary(self) -> Boundary {
        match self {
            Family::Heisenberg1d => Boundary::Periodic,
            _ => Boundary::Open,
        }
    }
}

impl ModelSpec {
    pub fn new(family: Family, sites: usize) -> Self {
        Self {
            family,
            sites,
            params: BTreeMap::new(),
            boundary: None,
            seed: 0,
            exact_degeneracy_only: false,
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn tfim1d(sites: usize, h_x: f64) -> Self {
        Self::new(Family::Tfim1d, sites).with("h_x", h_x)
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary.unwrap_or(self.family.default_boundary())
    }

    pub fn policy(&self) -> DegeneracyPolicy {
        if self.exact_degeneracy_only {
            DegeneracyPolicy::ExactOnly
        } else {
            DegeneracyPolicy::Tolerance
        }
    }

    /// Named parameter, falling back to the catalog default.
    pub fn param(&self, name: &str) -> Result<f64> {
        let entry = self.family.entry();
        let Some((_, default)) = entry.params.iter().find(|(n, _)| *n == name) else {
            return Err(Error::InvalidModel(format!(
                "{} has no parameter `{name}`",
                entry.name
            )));
        };
        match (self.params.get(name), default) {
            (Some(v), _) => Ok(*v),
            (None, Some(d)) => Ok(*d),
            (None, None) => Err(Error::InvalidModel(format!(
                "{} requires parameter `{name}`",
                entry.name
            ))),
        }
    }

    /// Checks parameter names, lattice shape and boundary conventions.
    pub fn validate(&self) -> Result<()> {
        let entry = self.family.entry();
        for k in self.params.keys() {
            if !entry.params.iter().any(|(n, _)| n == k) {
                return Err(Error::InvalidModel(format!(
                    "unknown parameter `{k}` for {}",
                    entry.name
                )));
            }
        }
        if self.sites == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if self.family == Family::Heisenberg1d && self.sites < 3 {
            return Err(Error::InvalidModel("Heisenberg ring needs V ≥ 3".into()));
        }
        if self.boundary() != self.family.default_boundary() && self.family != Family::Tfim2d {
            return Err(Error::InvalidModel(format!(
                "{} uses {:?} boundaries",
                entry.name,
                self.family.default_boundary()
            )));
        }
        if self.family == Family::Tfim2d {
            self.lattice()?;
        }
        for (_, v) in &self.params {
            if !v.is_finite() {
                return Err(Error::InvalidModel("non-finite parameter".into()));
            }
        }
        Ok(())
    }

    /// Like [`validate`](Self::validate), additionally rejecting sizes whose
    /// state vectors cannot be stored.
    pub fn validate_buildable(&self) -> Result<()> {
        self.validate()?;
        let max_sites = if self.family.is_random() { 24 } else { 26 };
        if self.sites > max_sites {
            return Err(Error::InvalidModel(format!(
                "V = {} exceeds the dense-vector limit {max_sites}",
                self.sites
            )));
        }
        Ok(())
    }

    /// (Lx, Ly) for square lattices.
    pub fn lattice(&self) -> Result<(usize, usize)> {
        let v = self.sites;
        let lx = self.params.get("Lx").copied();
        let ly = self.params.get("Ly").copied();
        let as_int = |x: f64| {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(Error::InvalidLattice(format!("lattice side {x} is not a positive integer")))
            }
        };
        let (lx, ly) = match (lx, ly) {
            (Some(a), Some(b)) => (as_int(a)?, as_int(b)?),
            (Some(a), None) => {
                let a = as_int(a)?;
                (a, v / a.max(1))
            }
            (None, Some(b)) => {
                let b = as_int(b)?;
                (v / b.max(1), b)
            }
            (None, None) => {
                let r = (v as f64).sqrt().round() as usize;
                (r, r)
            }
        };
        if lx * ly != v || lx < 2 || ly < 2 {
            return Err(Error::InvalidLattice(format!(
                "V = {v} cannot be arranged as a {lx}×{ly} lattice"
            )));
        }
        Ok((lx, ly))
    }
}

/// Pauli decomposition of the spin models (None for the random ensembles).
pub fn pauli_sum(spec: &ModelSpec) -> Result<Option<PauliSum>> {
    spec.validate_buildable()?;
    let v = spec.sites;
    let mut b = PauliSumBuilder::new(v);
    match spec.family {
        Family::Tfim1d | Family::Mfim1d => {
            let j = spec.param("J")?;
            let hx = spec.param("h_x")?;
            let hz = if spec.family == Family::Mfim1d {
                spec.param("h_z")?
            } else {
                0.0
            };
            for s in 0..v.saturating_sub(1) {
                b.add(j, &[(s, Pauli::Z), (s + 1, Pauli::Z)]);
            }
            for s in 0..v {
                b.add(hx, &[(s, Pauli::X)]);
                if hz != 0.0 {
                    b.add(hz, &[(s, Pauli::Z)]);
                }
            }
        }
        Family::Tfim2d => {
            let (lx, ly) = spec.lattice()?;
            let periodic = spec.boundary() == Boundary::Periodic;
            let j = spec.param("J")?;
            let hx = spec.param("h_x")?;
            let site = |x: usize, y: usize| y * lx + x;
            for y in 0..ly {
                for x in 0..lx {
                    if x + 1 < lx || (periodic && lx > 2) {
                        b.add(j, &[(site(x, y), Pauli::Z), (site((x + 1) % lx, y), Pauli::Z)]);
                    }
                    if y + 1 < ly || (periodic && ly > 2) {
                        b.add(j, &[(site(x, y), Pauli::Z), (site(x, (y + 1) % ly), Pauli::Z)]);
                    }
                    b.add(hx, &[(site(x, y), Pauli::X)]);
                }
            }
        }
        Family::Heisenberg1d => {
            let j = spec.param("J")?;
            for s in 0..v {
                let t = (s + 1) % v;
                for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                    b.add(-j, &[(s, p), (t, p)]);
                }
            }
        }
        Family::Paramagnet => {
            let h = spec.param("h")?;
            for s in 0..v {
                b.add(h, &[(s, Pauli::X)]);
            }
        }
        Family::Goe | Family::Gue => return Ok(None),
    }
    b.build().map(Some)
}

/// Tridiagonal β-ensemble matrix: a_j ~ N(0, 2), b_j ~ χ_{βj}, both scaled
/// by V/(2√(Nβ)) so the semicircle has half-width V.
pub fn gaussian_ensemble_tridiagonal(sites: usize, beta: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let n = 1usize << sites;
    let scale = sites as f64 / (2.0 * (n as f64 * beta).sqrt());
    let mut r = rng::stream(seed, 0x6be0 + beta as u64);
    let normal = Normal::new(0.0, 2f64.sqrt()).unwrap();
    let diag: Vec<f64> = (0..n).map(|_| normal.sample(&mut r) * scale).collect();
    let off: Vec<f64> = (1..n)
        .map(|j| {
            let chi2 = ChiSquared::new(beta * j as f64).unwrap();
            chi2.sample(&mut r).sqrt() * scale
        })
        .collect();
    (diag, off)
}

/// Orthonormalized (S⁺_tot)ⁿ|↓…↓⟩ for n = 0..=V. Bit value 1 is spin down.
pub fn ferromagnet_ground_basis(sites: usize) -> Vec<Vec<f64>> {
    let n = 1usize << sites;
    let mut v = vec![0.0; n];
    v[n - 1] = 1.0;
    let mut out = Vec::with_capacity(sites + 1);
    for _ in 0..=sites {
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(v.iter().map(|x| x / nrm).collect());
        // S⁺_tot flips one down spin (bit 1) up (bit 0)
        let mut next = vec![0.0; n];
        for (b, &amp) in v.iter().enumerate() {
            if amp == 0.0 {
                continue;
            }
            for s in 0..sites {
                if b & (1 << s) != 0 {
                    next[b & !(1 << s)] += amp;
                }
            }
        }
        v = next;
    }
    out
}

/// Builds the shifted operator with resolved ground and anti-ground spaces.
pub fn build(spec: &ModelSpec) -> Result<HamiltonianOperator> {
    spec.validate_buildable()?;
    let name = spec.family.entry().name;
    let mut options = BuildOptions {
        policy: spec.policy(),
        ground_basis: None,
        seed: spec.seed,
    };
    let repr = match spec.family {
        Family::Goe | Family::Gue => {
            let beta = if spec.family == Family::Goe { 1.0 } else { 2.0 };
            let (diag, off) = gaussian_ensemble_tridiagonal(spec.sites, beta, spec.seed);
            Representation::Tridiagonal { diag, off }
        }
        _ => {
            if spec.family == Family::Heisenberg1d {
                options.ground_basis = Some(ferromagnet_ground_basis(spec.sites));
            }
            Representation::Pauli(pauli_sum(spec)?.unwrap())
        }
    };
    HamiltonianOperator::new(name, spec.sites, repr, options)
}
