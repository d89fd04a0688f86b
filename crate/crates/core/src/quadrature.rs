//! Adaptive Gauss–Kronrod quadrature (7/15 point) on finite and
//! semi-infinite intervals.

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Segment {
        a,
        b,
        value: kron * h,
        error: ((kron - gauss) * h).abs(),
    }
}

/// ∫_a^b f with relative tolerance `rel_tol` (absolute floor `abs_tol`).
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    integrate_segments(&mut f, a, b, rel_tol, abs_tol, 2000).map(|(v, _)| v)
}

fn integrate_segments(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_segments: usize,
) -> Result<(f64, f64)> {
    let mut segs = vec![gk15(f, a, b)];
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        let target = (rel_tol * total.abs()).max(abs_tol);
        if err <= target {
            return Ok((total, err));
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .unwrap();
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if segs.len() >= max_segments || mid <= s.a || mid >= s.b {
            return Err(Error::Quadrature {
                achieved: err / total.abs().max(f64::MIN_POSITIVE),
                requested: rel_tol,
            });
        }
        segs.push(gk15(f, s.a, mid));
        segs.push(gk15(f, mid, s.b));
    }
}

/// ∫_0^∞ f for integrands that decay at least like `e^{−rate·y}` for large y
/// and vary on the scale `scale` near the origin.
///
/// The half-line is cut into the pieces [0, s], [s, 2s], [2s, 4s], …; each is
/// integrated adaptively until the remaining tail, bounded by
/// `|f(b)|/rate`, falls below a small fraction of the tolerance.
pub fn integrate_semi_infinite(
    mut f: impl FnMut(f64) -> f64,
    scale: f64,
    rate: f64,
    rel_tol: f64,
) -> Result<f64> {
    assert!(scale > 0.0 && rate > 0.0);
    let mut total: f64 = 0.0;
    let mut err_total = 0.0;
    let mut a = 0.0;
    let mut b = scale;
    for _ in 0..2000 {
        let (v, e) = integrate_segments(&mut f, a, b, 0.1 * rel_tol, 0.1 * rel_tol * total.abs(), 500)?;
        total += v;
        err_total += e;
        let tail = f(b).abs() / rate;
        if tail <= 0.01 * rel_tol * total.abs() || (tail == 0.0 && total == 0.0 && b > 1e3 * scale) {
            if err_total > rel_tol * total.abs() && err_total > 0.0 {
                return Err(Error::Quadrature {
                    achieved: err_total / total.abs(),
                    requested: rel_tol,
                });
            }
            return Ok(total);
        }
        a = b;
        // grow geometrically but never step more than a few decay lengths
        b = a + (a.max(scale)).min(8.0 / rate).max(scale);
    }
    Err(Error::Quadrature {
        achieved: f64::INFINITY,
        requested: rel_tol,
    })
}

/// ln(1 + e^w) without overflow.
pub fn log1pexp(w: f64) -> f64 {
    if w > 36.0 {
        w
    } else if w < -36.0 {
        w.exp()
    } else {
        w.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12, 0.0).unwrap();
        assert_relative_eq!(v, 8.0, epsilon = 1e-13);
    }

    #[test]
    fn peaked_integrand() {
        // ∫_{-1}^{1} 1/(1e-4 + x²) = 2·atan(100)/0.01
        let v = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-11, 0.0).unwrap();
        assert_relative_eq!(v, 200.0 * 100f64.atan(), max_relative = 1e-10);
    }

    #[test]
    fn exponential_tail() {
        for rate in [1e-3, 1.0, 1e4] {
            let v = integrate_semi_infinite(|y| (-rate * y).exp(), 1.0 / rate, rate, 1e-10).unwrap();
            assert_relative_eq!(v * rate, 1.0, max_relative = 1e-10);
        }
        // fast start, slow tail
        let v = integrate_semi_infinite(
            |y| 1e6 * (-1e3 * y).exp() + (-1e-2 * y).exp(),
            1e-3,
            1e-2,
            1e-10,
        )
        .unwrap();
        assert_relative_eq!(v, 1e3 + 1e2, max_relative = 1e-10);
    }

    #[test]
    fn log1pexp_branches() {
        assert_eq!(log1pexp(50.0), 50.0);
        assert_relative_eq!(log1pexp(0.0), 2f64.ln(), epsilon = 1e-16);
        assert_relative_eq!(log1pexp(-40.0), (-40f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(log1pexp(10.0), 10.0 + (-10f64).exp().ln_1p(), max_relative = 1e-15);
    }
}
