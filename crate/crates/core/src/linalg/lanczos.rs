//! Extremal eigenpairs of large operators.

use rand::Rng;

use super::{axpy, dot, norm, project_out, symmetric_eigen, RealOperator};
use crate::{rng, Error, Result};

/// An extremal eigenvalue and an orthonormal basis of its eigenspace.
#[derive(Clone, Debug)]
pub struct Extremal {
    pub value: f64,
    pub vectors: Vec<Vec<f64>>,
    /// The nearest eigenvalue outside the space, if any.
    pub next: Option<f64>,
}

/// Lowest (or, with `highest`, largest) eigenpair of `op` restricted to the
/// complement of the orthonormal `deflate` vectors.
///
/// Lanczos with full reorthogonalization, restarted from the current Ritz
/// vector when the Krylov space reaches `max_krylov`.
pub fn lanczos_extremal(
    op: &dyn RealOperator,
    deflate: &[Vec<f64>],
    highest: bool,
    tol: f64,
    seed: u64,
) -> Result<(f64, Vec<f64>)> {
    let n = op.dim();
    let free = n - deflate.len();
    if free == 0 {
        return Err(Error::Eigensolver("no directions left after deflation".into()));
    }
    let sign = if highest { -1.0 } else { 1.0 };
    let max_krylov = free.min(120);
    let mut r = rng::stream(seed, 0x1a2c);
    let mut start: Vec<f64> = (0..n).map(|_| r.random::<f64>() - 0.5).collect();
    let mut w = vec![0.0; n];
    let mut last_residual = f64::INFINITY;
    for _restart in 0..200 {
        project_out(deflate, &mut start);
        let s = norm(&start);
        if s == 0.0 {
            return Err(Error::Eigensolver("start vector vanished".into()));
        }
        start.iter_mut().for_each(|v| *v /= s);
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        loop {
            let j = basis.len() - 1;
            op.apply_real(&basis[j], &mut w);
            w.iter_mut().for_each(|v| *v *= sign);
            project_out(deflate, &mut w);
            let a = dot(&basis[j], &w);
            alpha.push(a);
            // full reorthogonalization, twice
            for _ in 0..2 {
                project_out(&basis, &mut w);
                project_out(deflate, &mut w);
            }
            let b = norm(&w);
            let k = alpha.len();
            let (theta, y) = smallest_ritz(&alpha, &beta)?;
            let scale = alpha.iter().map(|v| v.abs()).fold(theta.abs(), f64::max).max(1e-300);
            let residual = b * y[k - 1].abs();
            last_residual = residual / scale;
            let exhausted = b <= 1e-14 * scale || k >= free;
            if residual <= tol * scale || exhausted || k >= max_krylov {
                let mut v = vec![0.0; n];
                for (c, q) in y.iter().zip(&basis) {
                    axpy(*c, q, &mut v);
                }
                project_out(deflate, &mut v);
                let nv = norm(&v);
                v.iter_mut().for_each(|x| *x /= nv);
                if residual <= tol * scale || exhausted {
                    return Ok((sign * theta, v));
                }
                start = v;
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
    }
    Err(Error::Eigensolver(format!(
        "Lanczos did not converge (relative residual {last_residual:e})"
    )))
}

fn smallest_ritz(alpha: &[f64], beta: &[f64]) -> Result<(f64, Vec<f64>)> {
    let k = alpha.len();
    let mut t = vec![0.0; k * k];
    for i in 0..k {
        t[i * k + i] = alpha[i];
        if i + 1 < k {
            t[i * k + i + 1] = beta[i];
            t[(i + 1) * k + i] = beta[i];
        }
    }
    let e = symmetric_eigen(k, &t, true)?;
    Ok((e.values[0], e.vector(0).unwrap().to_vec()))
}

/// Extremal eigenvalue of `op` with its full eigenspace. Eigenpairs are
/// peeled off by repeated deflation while they stay within `degeneracy_tol`
/// of the first.
pub fn extremal_space(
    op: &dyn RealOperator,
    highest: bool,
    degeneracy_tol: f64,
    seed: u64,
) -> Result<Extremal> {
    let tol = 1e-12;
    let (value, v0) = lanczos_extremal(op, &[], highest, tol, seed)?;
    let mut vectors = vec![v0];
    let mut outside = None;
    while vectors.len() < op.dim() {
        let (next, v) = lanczos_extremal(op, &vectors, highest, tol, seed + vectors.len() as u64)?;
        if (next - value).abs() > degeneracy_tol {
            outside = Some(next);
            break;
        }
        vectors.push(v);
    }
    Ok(Extremal {
        value,
        vectors,
        next: outside,
    })
}
