//! Small statistics helpers: moments, least squares, bootstrap and the
//! two-sample Kolmogorov–Smirnov test.

use rand::Rng;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// Sample standard deviation (n − 1 denominator). NaN below two samples.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let ss: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    (pairwise_sum(&ss) / (xs.len() - 1) as f64).sqrt()
}

/// Pairwise summation; keeps the reduction order fixed for reproducibility.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Weighted least-squares line through `(x, y)`.
pub fn linear_fit_weighted(x: &[f64], y: &[f64], w: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    assert_eq!(x.len(), w.len());
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for i in 0..x.len() {
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    }
    let slope = sxy / sxx;
    LinearFit {
        slope,
        intercept: my - slope * mx,
    }
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    linear_fit_weighted(x, y, &vec![1.0; x.len()])
}

/// Nonparametric bootstrap standard deviation of `stat` over resamples of
/// `values`.
pub fn bootstrap_std<R: Rng + ?Sized>(
    values: &[f64],
    resamples: usize,
    rng: &mut R,
    stat: impl Fn(&[f64]) -> f64,
) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let mut buf = vec![0.0; n];
    let stats: Vec<f64> = (0..resamples)
        .map(|_| {
            for b in buf.iter_mut() {
                *b = values[rng.random_range(0..n)];
            }
            stat(&buf)
        })
        .collect();
    std_dev(&stats)
}

/// Two-sample Kolmogorov–Smirnov statistic sup |F_a − F_b|.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic critical value of the two-sample KS statistic at level `alpha`.
pub fn ks_critical_value(n_a: usize, n_b: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    let (na, nb) = (n_a as f64, n_b as f64);
    c * ((na + nb) / (na * nb)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let f = linear_fit(&x, &y);
        assert_relative_eq!(f.slope, -0.5, epsilon = 1e-14);
        assert_relative_eq!(f.intercept, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn ks_of_identical_samples_is_zero() {
        let a = [0.3, 0.1, 0.7, 0.2];
        assert_eq!(ks_statistic(&a, &a), 0.0);
        let b = [10.0, 11.0];
        assert_eq!(ks_statistic(&a, &b), 1.0);
    }

    #[test]
    fn ks_critical_value_one_percent() {
        // c(0.01) = 1.628 for the asymptotic distribution
        let c = ks_critical_value(1, 1, 0.01) / 2f64.sqrt();
        assert_relative_eq!(c, 1.6276, epsilon = 1e-3);
    }

    #[test]
    fn std_dev_small_sample() {
        assert!(std_dev(&[1.0]).is_nan());
        assert_relative_eq!(std_dev(&[1.0, 3.0]), 2f64.sqrt(), epsilon = 1e-15);
    }
}
