use faer::{Mat, Side};

use crate::{Error, Result, C64};

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Column-major `n × n` eigenvector matrix, column `k` pairs with
    /// `values[k]`.
    pub vectors: Option<Vec<f64>>,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> Option<&[f64]> {
        let n = self.values.len();
        self.vectors.as_deref().map(|v| &v[k * n..(k + 1) * n])
    }
}

/// Diagonalizes the row-major symmetric matrix `a` (`n × n`).
pub fn symmetric_eigen(n: usize, a: &[f64], want_vectors: bool) -> Result<SymmetricEigen> {
    assert_eq!(a.len(), n * n);
    let m = Mat::<f64>::from_fn(n, n, |i, j| a[i * n + j]);
    if !want_vectors {
        let values = m
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        return Ok(SymmetricEigen {
            values,
            vectors: None,
        });
    }
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values: Vec<f64> = (0..n).map(|k| s[k]).collect();
    let mut vectors = vec![0.0; n * n];
    for k in 0..n {
        for i in 0..n {
            vectors[k * n + i] = u[(i, k)];
        }
    }
    Ok(SymmetricEigen {
        values,
        vectors: Some(vectors),
    })
}

/// Eigenvalues (ascending) of the row-major Hermitian matrix `a`.
pub fn hermitian_eigenvalues(n: usize, a: &[C64]) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    let m = Mat::<faer::c64>::from_fn(n, n, |i, j| {
        let z = a[i * n + j];
        faer::c64::new(z.re, z.im)
    });
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))
}
