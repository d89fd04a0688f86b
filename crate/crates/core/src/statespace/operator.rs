use std::sync::OnceLock;

use serde::Serialize;

use super::pauli::PauliSum;
use super::spectrum::{DegeneracyPolicy, Spectrum};
use crate::linalg::{
    self, extremal_space, lanczos_extremal, symmetric_eigen, sturm_count, tridiagonal_eigenvalues,
    tridiagonal_eigenvector, tridiagonal_kth_eigenvalue, RealOperator,
};
use crate::{Error, Result, C64};

/// Largest dimension diagonalized densely during construction.
pub const DENSE_LIMIT: usize = 1024;

/// Storage of the unshifted operator.
#[derive(Clone, Debug)]
pub enum Representation {
    /// Sparse sum of Pauli strings in the computational basis.
    Pauli(PauliSum),
    /// Real symmetric row-major matrix.
    Dense { n: usize, matrix: Vec<f64> },
    /// Diagonal in the stored basis (usually the energy eigenbasis).
    Diagonal { energies: Vec<f64> },
    /// Real symmetric tridiagonal matrix.
    Tridiagonal { diag: Vec<f64>, off: Vec<f64> },
}

impl Representation {
    pub fn dim(&self) -> usize {
        match self {
            Self::Pauli(p) => p.dim(),
            Self::Dense { n, .. } => *n,
            Self::Diagonal { energies } => energies.len(),
            Self::Tridiagonal { diag, .. } => diag.len(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Pauli(_) => "pauli-sum",
            Self::Dense { .. } => "dense",
            Self::Diagonal { .. } => "diagonal",
            Self::Tridiagonal { .. } => "tridiagonal",
        }
    }

    fn to_dense(&self) -> Vec<f64> {
        match self {
            Self::Pauli(p) => p.to_dense(),
            Self::Dense { matrix, .. } => matrix.clone(),
            Self::Diagonal { energies } => {
                let n = energies.len();
                let mut a = vec![0.0; n * n];
                for (i, e) in energies.iter().enumerate() {
                    a[i * n + i] = *e;
                }
                a
            }
            Self::Tridiagonal { diag, off } => {
                let n = diag.len();
                let mut a = vec![0.0; n * n];
                for i in 0..n {
                    a[i * n + i] = diag[i];
                    if i + 1 < n {
                        a[i * n + i + 1] = off[i];
                        a[(i + 1) * n + i] = off[i];
                    }
                }
                a
            }
        }
    }

    fn eigenvalues(&self) -> Result<Vec<f64>> {
        match self {
            Self::Diagonal { energies } => Ok(energies.clone()),
            Self::Tridiagonal { diag, off } => tridiagonal_eigenvalues(diag, off),
            _ => Ok(symmetric_eigen(self.dim(), &self.to_dense(), false)?.values),
        }
    }
}

impl RealOperator for Representation {
    fn dim(&self) -> usize {
        Representation::dim(self)
    }

    fn apply_real(&self, x: &[f64], y: &mut [f64]) {
        match self {
            Self::Pauli(p) => p.apply_real(x, y),
            Self::Dense { n, matrix } => {
                for i in 0..*n {
                    y[i] = linalg::dot(&matrix[i * n..(i + 1) * n], x);
                }
            }
            Self::Diagonal { energies } => {
                for i in 0..x.len() {
                    y[i] = energies[i] * x[i];
                }
            }
            Self::Tridiagonal { diag, off } => {
                let n = diag.len();
                for i in 0..n {
                    let mut v = diag[i] * x[i];
                    if i > 0 {
                        v += off[i - 1] * x[i - 1];
                    }
                    if i + 1 < n {
                        v += off[i] * x[i + 1];
                    }
                    y[i] = v;
                }
            }
        }
    }
}

impl Representation {
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        match self {
            Self::Pauli(p) => p.apply(x, y),
            Self::Dense { n, matrix } => {
                for i in 0..*n {
                    let row = &matrix[i * n..(i + 1) * n];
                    y[i] = row.iter().zip(x).map(|(a, b)| b * a).sum();
                }
            }
            Self::Diagonal { energies } => {
                for i in 0..x.len() {
                    y[i] = x[i] * energies[i];
                }
            }
            Self::Tridiagonal { diag, off } => {
                let n = diag.len();
                for i in 0..n {
                    let mut v = x[i] * diag[i];
                    if i > 0 {
                        v += x[i - 1] * off[i - 1];
                    }
                    if i + 1 < n {
                        v += x[i + 1] * off[i];
                    }
                    y[i] = v;
                }
            }
        }
    }
}

/// An extremal eigenspace of a shifted operator.
#[derive(Clone, Debug, Serialize)]
pub struct GroundSpaceInfo {
    pub degeneracy: usize,
    /// Orthonormal real basis (all supported operators are real symmetric).
    #[serde(skip)]
    pub basis: Vec<Vec<f64>>,
    /// Shifted energy of the space.
    pub energy: f64,
    /// Distance to the nearest level outside the space.
    pub gap_to_next: f64,
    /// Set when the basis vectors are the unit vectors at these indices.
    #[serde(skip)]
    pub unit_indices: Option<Vec<usize>>,
}

impl GroundSpaceInfo {
    /// ⟨ψ|P|ψ⟩ for the projector P onto the space.
    pub fn weight(&self, psi: &[C64]) -> f64 {
        if let Some(idx) = &self.unit_indices {
            return idx.iter().map(|&k| psi[k].norm_sqr()).sum();
        }
        self.basis
            .iter()
            .map(|g| {
                let c: C64 = g.iter().zip(psi).map(|(a, b)| b * a).sum();
                c.norm_sqr()
            })
            .sum()
    }
}

#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    pub policy: DegeneracyPolicy,
    /// Known ground-space vectors, orthonormalized and checked on use.
    pub ground_basis: Option<Vec<Vec<f64>>>,
    pub seed: u64,
}

/// Hermitian operator `sign·H_raw + shift`, shifted so the ground energy is 0.
#[derive(Clone, Debug)]
pub struct HamiltonianOperator {
    name: String,
    sites: usize,
    repr: Representation,
    sign: f64,
    shift: f64,
    ground: GroundSpaceInfo,
    anti_ground: GroundSpaceInfo,
    spectrum: OnceLock<Spectrum>,
}

struct Extremes {
    lo: f64,
    hi: f64,
    ground: (Vec<Vec<f64>>, f64),
    anti: (Vec<Vec<f64>>, f64),
    spectrum: Option<Vec<f64>>,
}

impl HamiltonianOperator {
    pub fn new(
        name: impl Into<String>,
        sites: usize,
        repr: Representation,
        options: BuildOptions,
    ) -> Result<Self> {
        let n = repr.dim();
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        if let Representation::Dense { n, matrix } = &repr {
            if matrix.len() != n * n {
                return Err(Error::DimensionMismatch {
                    expected: n * n,
                    found: matrix.len(),
                });
            }
            let mut worst: f64 = 0.0;
            for i in 0..*n {
                for j in 0..i {
                    worst = worst.max((matrix[i * n + j] - matrix[j * n + i]).abs());
                }
            }
            if worst > 1e-12 {
                return Err(Error::NonHermitian(worst));
            }
        }
        let ext = extremes(&repr, options.policy, options.seed)?;
        let width = ext.hi - ext.lo;
        let tol = options.policy.tolerance(width);
        if width <= tol {
            return Err(Error::DegenerateSpectrum(width));
        }
        let (mut gvecs, mut gnext) = ext.ground;
        if let Some(given) = options.ground_basis {
            gvecs = orthonormalize(given)?;
            let mut hg = vec![0.0; n];
            for g in &gvecs {
                repr.apply_real(g, &mut hg);
                let res: f64 = hg
                    .iter()
                    .zip(g)
                    .map(|(a, b)| (a - ext.lo * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if res > 1e-8 * width.max(1.0) {
                    return Err(Error::InvalidModel(format!(
                        "supplied ground vector is not an eigenvector (residual {res:e})"
                    )));
                }
            }
            gnext = match &ext.spectrum {
                Some(s) => {
                    let mut sorted = s.clone();
                    sorted.sort_by(f64::total_cmp);
                    sorted.get(gvecs.len()).copied().unwrap_or(ext.hi)
                }
                None => lanczos_extremal(&repr, &gvecs, false, 1e-12, options.seed ^ 0x5eed)?.0,
            };
        }
        let (avecs, anext) = ext.anti;
        let shift = -ext.lo;
        let ground = GroundSpaceInfo {
            degeneracy: gvecs.len(),
            basis: gvecs,
            energy: 0.0,
            gap_to_next: gnext - ext.lo,
            unit_indices: None,
        };
        let anti_ground = GroundSpaceInfo {
            degeneracy: avecs.len(),
            basis: avecs,
            energy: width,
            gap_to_next: ext.hi - anext,
            unit_indices: None,
        };
        let op = Self {
            name: name.into(),
            sites,
            repr,
            sign: 1.0,
            shift,
            ground,
            anti_ground,
            spectrum: OnceLock::new(),
        };
        if let Some(values) = ext.spectrum {
            let _ = op.spectrum.set(op.make_spectrum(values)?);
        }
        Ok(op)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.repr.dim()
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    /// `+1` for H, `−1` for the reflected operator.
    pub fn sign(&self) -> f64 {
        self.sign
    }

    /// Constant E0 added after the sign.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn ground_space(&self) -> &GroundSpaceInfo {
        &self.ground
    }

    pub fn anti_ground_space(&self) -> &GroundSpaceInfo {
        &self.anti_ground
    }

    /// Spectral width E_max − E_gs, used as ‖H‖ in tolerances.
    pub fn width(&self) -> f64 {
        self.anti_ground.energy
    }

    /// `y ← H x`.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.repr.apply(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = *yi * self.sign + xi * self.shift;
        }
    }

    /// Full shifted spectrum; computed and cached on first use.
    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let values = self.repr.eigenvalues()?;
        let s = self.make_spectrum(values)?;
        Ok(self.spectrum.get_or_init(|| s))
    }

    fn make_spectrum(&self, raw: Vec<f64>) -> Result<Spectrum> {
        let shifted: Vec<f64> = raw.iter().map(|e| self.sign * e + self.shift).collect();
        let mut s = Spectrum::from_energies(self.sites, &shifted, DegeneracyPolicy::ExactOnly)?;
        s.ground_degeneracy = self.ground.degeneracy;
        s.anti_degeneracy = self.anti_ground.degeneracy;
        for e in &mut s.energies[..self.ground.degeneracy] {
            *e = 0.0;
        }
        Ok(s)
    }

    /// The operator E_max − H, whose ground space is the anti-ground space.
    pub fn reflected(&self) -> Self {
        let w = self.width();
        let mut ground = self.anti_ground.clone();
        ground.energy = 0.0;
        let mut anti_ground = self.ground.clone();
        anti_ground.energy = w;
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.reflected());
        }
        Self {
            name: format!("{}/reflected", self.name),
            sites: self.sites,
            repr: self.repr.clone(),
            sign: -self.sign,
            shift: w - self.shift,
            ground,
            anti_ground,
            spectrum,
        }
    }

    /// The same operator written in its energy eigenbasis, levels ascending.
    pub fn to_eigenbasis(&self) -> Result<Self> {
        let s = self.spectrum()?.clone();
        let n = s.dim();
        let unit = |k: usize| {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            v
        };
        let gidx: Vec<usize> = (0..s.ground_degeneracy).collect();
        let aidx: Vec<usize> = (n - s.anti_degeneracy..n).collect();
        let ground = GroundSpaceInfo {
            degeneracy: gidx.len(),
            basis: gidx.iter().map(|&k| unit(k)).collect(),
            energy: 0.0,
            gap_to_next: s.energies[s.ground_degeneracy],
            unit_indices: Some(gidx),
        };
        let anti_ground = GroundSpaceInfo {
            degeneracy: aidx.len(),
            basis: aidx.iter().map(|&k| unit(k)).collect(),
            energy: s.width(),
            gap_to_next: s.width() - s.energies[n - s.anti_degeneracy - 1],
            unit_indices: Some(aidx),
        };
        let spectrum = OnceLock::new();
        let repr = Representation::Diagonal {
            energies: s.energies.clone(),
        };
        let _ = spectrum.set(s);
        Ok(Self {
            name: format!("{}/eigenbasis", self.name),
            sites: self.sites,
            repr,
            sign: 1.0,
            shift: 0.0,
            ground,
            anti_ground,
            spectrum,
        })
    }
}

impl RealOperator for HamiltonianOperator {
    fn dim(&self) -> usize {
        self.repr.dim()
    }

    fn apply_real(&self, x: &[f64], y: &mut [f64]) {
        self.repr.apply_real(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = *yi * self.sign + xi * self.shift;
        }
    }
}

fn orthonormalize(vs: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for mut v in vs {
        for _ in 0..2 {
            linalg::project_out(&out, &mut v);
        }
        let nv = linalg::norm(&v);
        if nv < 1e-10 {
            return Err(Error::InvalidModel("ground vectors are linearly dependent".into()));
        }
        v.iter_mut().for_each(|x| *x /= nv);
        out.push(v);
    }
    Ok(out)
}

fn extremes(repr: &Representation, policy: DegeneracyPolicy, seed: u64) -> Result<Extremes> {
    let n = repr.dim();
    let dense_ok = n <= DENSE_LIMIT || matches!(repr, Representation::Diagonal { .. });
    if dense_ok {
        let (values, vectors): (Vec<f64>, Box<dyn Fn(usize) -> Vec<f64>>) = match repr {
            Representation::Diagonal { energies } => {
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
                let values = order.iter().map(|&k| energies[k]).collect();
                (
                    values,
                    Box::new(move |k| {
                        let mut v = vec![0.0; n];
                        v[order[k]] = 1.0;
                        v
                    }),
                )
            }
            _ => {
                let e = symmetric_eigen(n, &repr.to_dense(), true)?;
                let values = e.values.clone();
                (values, Box::new(move |k| e.vector(k).unwrap().to_vec()))
            }
        };
        let lo = values[0];
        let hi = values[n - 1];
        let tol = policy.tolerance(hi - lo);
        let g = values.iter().take_while(|&&v| v - lo <= tol).count();
        let a = values.iter().rev().take_while(|&&v| hi - v <= tol).count();
        return Ok(Extremes {
            lo,
            hi,
            ground: ((0..g).map(&vectors).collect(), values[g.min(n - 1)]),
            anti: ((n - a..n).map(&vectors).collect(), values[n - a - (a < n) as usize]),
            spectrum: Some(values),
        });
    }
    if let Representation::Tridiagonal { diag, off } = repr {
        let lo = tridiagonal_kth_eigenvalue(diag, off, 0);
        let hi = tridiagonal_kth_eigenvalue(diag, off, n - 1);
        let tol = policy.tolerance(hi - lo);
        let g = sturm_count(diag, off, lo + tol);
        let a = n - sturm_count(diag, off, hi - tol);
        if g == 1 && a == 1 {
            return Ok(Extremes {
                lo,
                hi,
                ground: (
                    vec![tridiagonal_eigenvector(diag, off, lo)],
                    tridiagonal_kth_eigenvalue(diag, off, 1),
                ),
                anti: (
                    vec![tridiagonal_eigenvector(diag, off, hi)],
                    tridiagonal_kth_eigenvalue(diag, off, n - 2),
                ),
                spectrum: None,
            });
        }
    }
    let (lo, _) = lanczos_extremal(repr, &[], false, 1e-10, seed)?;
    let (hi, _) = lanczos_extremal(repr, &[], true, 1e-10, seed)?;
    let tol = policy.tolerance(hi - lo);
    let g = extremal_space(repr, false, tol, seed)?;
    let a = extremal_space(repr, true, tol, seed ^ 0xa)?;
    Ok(Extremes {
        lo: g.value,
        hi: a.value,
        ground: (g.vectors, g.next.unwrap_or(a.value)),
        anti: (a.vectors, a.next.unwrap_or(g.value)),
        spectrum: None,
    })
}
