//! Symmetric tridiagonal eigenproblems.

use crate::{Error, Result, C64};

/// All eigenvalues (ascending) of the symmetric tridiagonal matrix with
/// diagonal `diag` and sub-diagonal `off` (`off.len() == diag.len() − 1`).
///
/// Implicit QL with Wilkinson shifts; eigenvalues only, O(n²).
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert!(n == 0 || off.len() + 1 == n);
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(off);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::Eigensolver(format!(
                    "tridiagonal QL did not converge at index {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = (g * g + 1.0).sqrt();
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Unit eigenvector for the (converged) eigenvalue `lambda` by inverse
/// iteration with a partially pivoted tridiagonal LU.
pub fn tridiagonal_eigenvector(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let scale = diag
        .iter()
        .chain(off)
        .fold(0.0f64, |a, b| a.max(b.abs()))
        .max(f64::MIN_POSITIVE);
    let shift = lambda + 8.0 * f64::EPSILON * scale;
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 13) as f64 * 1e-3).collect();
    normalize(&mut x);
    for _ in 0..4 {
        x = solve_shifted(diag, off, shift, &x, scale);
        normalize(&mut x);
    }
    x
}

fn normalize(x: &mut [f64]) {
    let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= nrm);
}

/// Solves (T − shift)·y = b with Gaussian elimination and partial pivoting.
/// Zero pivots are replaced by a tiny value, as usual for inverse iteration.
fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, b: &[f64], scale: f64) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        return vec![1.0];
    }
    let tiny = f64::EPSILON * scale;
    // Row i of U has entries u0[i] (diag), u1[i], u2[i] (two super-diagonals).
    let mut u0 = vec![0.0; n];
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    let mut rhs = b.to_vec();
    let mut a = diag[0] - shift;
    let mut c = off[0];
    let mut fill = 0.0;
    for i in 0..n - 1 {
        let below = off[i];
        let next_diag = diag[i + 1] - shift;
        let next_sup = if i + 2 < n { off[i + 1] } else { 0.0 };
        if a.abs() >= below.abs() {
            let piv = if a == 0.0 { tiny } else { a };
            let m = below / piv;
            u0[i] = piv;
            u1[i] = c;
            u2[i] = fill;
            rhs[i + 1] -= m * rhs[i];
            a = next_diag - m * c;
            c = next_sup - m * fill;
            fill = 0.0;
        } else {
            // swap rows i and i+1
            let m = a / below;
            u0[i] = below;
            u1[i] = next_diag;
            u2[i] = next_sup;
            rhs.swap(i, i + 1);
            rhs[i + 1] -= m * rhs[i];
            let new_a = c - m * next_diag;
            let new_c = fill - m * next_sup;
            a = new_a;
            c = new_c;
            fill = 0.0;
        }
    }
    u0[n - 1] = if a == 0.0 { tiny } else { a };
    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= u1[i] * y[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * y[i + 2];
        }
        y[i] = s / u0[i];
    }
    y
}

/// Number of eigenvalues strictly below `x` (Sturm sequence count).
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for k in 0..diag.len() {
        let e2 = if k == 0 { 0.0 } else { off[k - 1] * off[k - 1] };
        q = diag[k] - x - if q != 0.0 { e2 / q } else { e2 / f64::EPSILON };
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalue `k` (0-based, ascending) by Sturm bisection.
pub fn tridiagonal_kth_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let n = diag.len();
    assert!(k < n);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + off.get(i).map_or(0.0, |v| v.abs());
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Trace of the resolvent, `tr (T − z)⁻¹ = Σ_α 1/(E_α − z)`, for non-real `z`.
pub fn tridiagonal_resolvent_trace(diag: &[f64], off: &[f64], z: C64) -> C64 {
    // ln det(T − z) = Σ ln q_k with the LDLᵀ pivots q_k, differentiate in z.
    let mut q = C64::new(1.0, 0.0);
    let mut dq = C64::new(0.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..diag.len() {
        let (nq, ndq) = if k == 0 {
            (diag[0] - z, C64::new(-1.0, 0.0))
        } else {
            let e2 = off[k - 1] * off[k - 1];
            (diag[k] - z - e2 / q, -1.0 + e2 * dq / (q * q))
        };
        q = nq;
        dq = ndq;
        sum += dq / q;
    }
    -sum
}
