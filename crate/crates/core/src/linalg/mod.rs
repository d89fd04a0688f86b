//! Dense and iterative linear algebra used by the operators.

mod cg;
mod dense;
mod lanczos;
mod tridiag;

pub use cg::{deflated_cg, CgOutcome};
pub use dense::{hermitian_eigenvalues, symmetric_eigen, SymmetricEigen};
pub use lanczos::{extremal_space, lanczos_extremal, Extremal};
pub use tridiag::{
    sturm_count, tridiagonal_eigenvalues, tridiagonal_eigenvector, tridiagonal_kth_eigenvalue,
    tridiagonal_resolvent_trace,
};

/// Real symmetric operator available through matrix-vector products.
pub trait RealOperator: Sync {
    fn dim(&self) -> usize;
    /// `y ← A x`
    fn apply_real(&self, x: &[f64], y: &mut [f64]);
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Removes the components of `x` along each (orthonormal) vector in `basis`.
pub(crate) fn project_out(basis: &[Vec<f64>], x: &mut [f64]) {
    for g in basis {
        let c = dot(g, x);
        axpy(-c, g, x);
    }
}
