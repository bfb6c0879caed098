//! Summary statistics over Monte Carlo replications.

/// Levels reported as box-plot quantiles.
pub const BOXPLOT_LEVELS: [f64; 5] = [0.025, 0.25, 0.5, 0.75, 0.975];

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population variance (divisor `n`), so that `rmse² = bias² + variance`.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64
}

/// Sample standard deviation (divisor `n − 1`).
pub fn sample_sd(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return f64::NAN;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

/// Monte Carlo standard error of the mean.
pub fn mc_standard_error(x: &[f64]) -> f64 {
    sample_sd(x) / (x.len() as f64).sqrt()
}

/// Signed bias `mean(x) − truth`.
pub fn bias(x: &[f64], truth: f64) -> f64 {
    mean(x) - truth
}

pub fn rmse(x: &[f64], truth: f64) -> f64 {
    (x.iter().map(|v| (v - truth).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
}

/// `‖E[θ̂ − θ]‖` over vector estimates.
pub fn euclid_bias(est: &[Vec<f64>], truth: &[f64]) -> f64 {
    truth
        .iter()
        .enumerate()
        .map(|(j, t)| {
            let col: Vec<f64> = est.iter().map(|e| e[j]).collect();
            bias(&col, *t).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// `(E‖θ̂ − θ‖²)^{1/2}` over vector estimates.
pub fn euclid_rmse(est: &[Vec<f64>], truth: &[f64]) -> f64 {
    let ss: f64 = est.iter().map(|e| e.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>()).sum();
    (ss / est.len() as f64).sqrt()
}

/// Linear-interpolation quantile of sorted data (type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantiles(x: &[f64], levels: &[f64]) -> Vec<f64> {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    levels.iter().map(|&p| quantile_sorted(&s, p)).collect()
}

pub fn iqr(x: &[f64]) -> f64 {
    let q = quantiles(x, &[0.25, 0.75]);
    q[1] - q[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_decomposes() {
        let x = [0.61, 0.7, 0.74, 0.8, 0.93, 0.55];
        let t = 0.75;
        let lhs = rmse(&x, t).powi(2) - bias(&x, t).powi(2);
        assert!((lhs - variance(&x)).abs() < 1e-12);
    }

    #[test]
    fn quantiles_of_uniform_grid() {
        let x: Vec<f64> = (0..=100).map(|i| i as f64).collect();
        assert_eq!(quantiles(&x, &BOXPLOT_LEVELS), vec![2.5, 25.0, 50.0, 75.0, 97.5]);
        assert_eq!(iqr(&x), 50.0);
    }

    #[test]
    fn euclid_metrics_reduce_to_scalar() {
        let est = vec![vec![1.0], vec![2.0], vec![4.0]];
        let flat = [1.0, 2.0, 4.0];
        assert!((euclid_bias(&est, &[2.0]) - bias(&flat, 2.0).abs()).abs() < 1e-15);
        assert!((euclid_rmse(&est, &[2.0]) - rmse(&flat, 2.0)).abs() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn rmse_bias_variance_identity(x in proptest::collection::vec(-5.0..5.0f64, 2..200), t in -5.0..5.0f64) {
            let lhs = rmse(&x, t).powi(2) - bias(&x, t).powi(2);
            let v = variance(&x);
            proptest::prop_assert!((lhs - v).abs() <= 1e-10 * rmse(&x, t).powi(2).max(1e-12));
            proptest::prop_assert!(rmse(&x, t).powi(2) + 1e-12 >= bias(&x, t).powi(2));
        }
    }
}
