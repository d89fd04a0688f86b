use super::{axpy, dot, norm, project_out, RealOperator};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual ‖b − Ax‖/‖b‖.
    pub residual: f64,
}

/// Conjugate gradients for `(1−P) A (1−P) x = (1−P) b`, where `P` projects
/// onto the orthonormal `deflate` vectors. The solution lies in the
/// complement of `deflate`.
///
/// Fails with [`Error::NotPsd`] if a search direction has non-positive
/// curvature and with [`Error::SolverFailure`] at the iteration cap.
pub fn deflated_cg(
    op: &dyn RealOperator,
    deflate: &[Vec<f64>],
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgOutcome> {
    let n = op.dim();
    assert_eq!(b.len(), n);
    let mut r = b.to_vec();
    project_out(deflate, &mut r);
    let b_norm = norm(&r);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            solution: x,
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    for it in 1..=max_iter {
        project_out(deflate, &mut p);
        op.apply_real(&p, &mut ap);
        project_out(deflate, &mut ap);
        let curv = dot(&p, &ap);
        if curv <= 0.0 {
            return Err(Error::NotPsd(curv / dot(&p, &p)));
        }
        let alpha = rr / curv;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rr_new = dot(&r, &r);
        let res = rr_new.sqrt() / b_norm;
        if res < tol {
            project_out(deflate, &mut x);
            return Ok(CgOutcome {
                solution: x,
                iterations: it,
                residual: res,
            });
        }
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }
    Err(Error::SolverFailure {
        residual: rr.sqrt() / b_norm,
        iterations: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    struct Diag(Vec<f64>);
    impl RealOperator for Diag {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply_real(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..x.len() {
                y[i] = self.0[i] * x[i];
            }
        }
    }

    #[test]
    fn solves_deflated_system() {
        let op = Diag(vec![0.0, 1.0, 2.0, 4.0]);
        let ground = vec![vec![1.0, 0.0, 0.0, 0.0]];
        let b = [5.0, 1.0, 1.0, 1.0];
        let out = deflated_cg(&op, &ground, &b, 1e-12, 50).unwrap();
        assert_eq!(out.solution[0], 0.0);
        assert_relative_eq!(out.solution[1], 1.0, epsilon = 1e-10);
        assert_relative_eq!(out.solution[2], 0.5, epsilon = 1e-10);
        assert_relative_eq!(out.solution[3], 0.25, epsilon = 1e-10);
    }

    #[test]
    fn indefinite_is_rejected() {
        let op = Diag(vec![-1.0, 1.0]);
        let err = deflated_cg(&op, &[], &[1.0, 0.0], 1e-10, 10).unwrap_err();
        assert!(matches!(err, Error::NotPsd(_)));
    }
}
