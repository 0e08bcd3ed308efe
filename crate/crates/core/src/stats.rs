//! Statistical kernels shared by the feature extractors.
//!
//! Degenerate inputs (zero variance and the like) yield 0 rather than NaN;
//! callers use [`is_constant`] to decide whether to flag the result.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub fn mean(series: &[f64]) -> f64 {
    series.iter().sum::<f64>() / series.len() as f64
}

/// True when every value equals the first (also for empty or single-element input).
pub fn is_constant(series: &[f64]) -> bool {
    series.windows(2).all(|w| w[0] == w[1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    /// Adjusted Fisher-Pearson skewness G1 (needs n >= 3).
    pub skewness: f64,
    /// Bias-adjusted excess kurtosis G2 (needs n >= 4).
    pub kurtosis: f64,
    /// Set when skewness or kurtosis fell back to 0.
    pub degenerate: bool,
}

pub fn moments(series: &[f64]) -> Result<Moments> {
    if series.is_empty() {
        return Err(Error::Argument("moments of an empty series".into()));
    }
    let n = series.len() as f64;
    let mean = mean(series);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in series {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        min = min.min(v);
        max = max.max(v);
    }
    let std = if series.len() > 1 { (m2 / (n - 1.0)).sqrt() } else { 0.0 };
    m2 /= n;
    m3 /= n;
    m4 /= n;

    let flat = is_constant(series) || m2 <= 0.0;
    let skewness = if flat || series.len() < 3 {
        0.0
    } else {
        let g1 = m3 / m2.powf(1.5);
        g1 * (n * (n - 1.0)).sqrt() / (n - 2.0)
    };
    let kurtosis = if flat || series.len() < 4 {
        0.0
    } else {
        let g2 = m4 / (m2 * m2) - 3.0;
        ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0))
    };
    Ok(Moments {
        mean,
        std,
        min,
        max,
        skewness,
        kurtosis,
        degenerate: flat || series.len() < 4,
    })
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("series lengths {} and {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::Argument("correlation needs at least 2 observations".into()));
    }
    Ok(())
}

/// Sample Pearson correlation; 0 if either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    if is_constant(x) || is_constant(y) {
        return Ok(0.0);
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Ok(0.0);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks with ties sharing their average rank.
pub fn fractional_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson of fractional ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&fractional_ranks(x), &fractional_ranks(y))
}

/// Lag-1 autocorrelation `sum (s_t - m)(s_{t+1} - m) / sum (s_t - m)^2`.
pub fn lag1_autocorr(series: &[f64]) -> Result<f64> {
    if series.len() < 3 {
        return Err(Error::Argument(format!(
            "lag-1 autocorrelation needs at least 3 values, got {}",
            series.len()
        )));
    }
    if is_constant(series) {
        return Ok(0.0);
    }
    let m = mean(series);
    let denom: f64 = series.iter().map(|v| (v - m) * (v - m)).sum();
    if denom <= 0.0 {
        return Ok(0.0);
    }
    let num: f64 = series.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    Ok((num / denom).clamp(-1.0, 1.0))
}

/// Quantile of pre-sorted data by linear interpolation between order
/// statistics at position `(n - 1) p`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Interquartile range `Q3 - Q1`.
pub fn quartile_iqr(series: &[f64]) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::Argument("IQR of an empty series".into()));
    }
    let mut s = series.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25))
}

/// Diagnostics of an ordinary least-squares fit with intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModelDiag {
    /// `1 - (1 - R^2)(N - 1)/(N - n - 1)`; 0 when the response is constant.
    pub r2adj: f64,
    /// `max |beta_i| - min |beta_i|` over the non-intercept coefficients.
    pub coeff_range: f64,
    /// Intercept first.
    pub coefficients: Vec<f64>,
    /// Design matrix lacked full column rank; minimum-norm solution returned.
    pub rank_deficient: bool,
    /// Response had zero variance.
    pub constant_response: bool,
}

pub fn linear_model(rows: &[Vec<f64>], y: &[f64]) -> Result<LinearModelDiag> {
    let n_obs = rows.len();
    let p = rows.first().map_or(0, Vec::len);
    if y.len() != n_obs {
        return Err(Error::Shape(format!("{n_obs} rows but {} responses", y.len())));
    }
    if rows.iter().any(|r| r.len() != p) {
        return Err(Error::Shape("ragged design rows".into()));
    }
    if n_obs < p + 2 {
        return Err(Error::Argument(format!("linear model needs at least {} rows, got {n_obs}", p + 2)));
    }
    let design = DMatrix::from_fn(n_obs, p + 1, |i, j| if j == 0 { 1.0 } else { rows[i][j - 1] });
    let target = DVector::from_column_slice(y);
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * (n_obs.max(p + 1) as f64) * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let beta = svd
        .solve(&target, tol)
        .map_err(|e| Error::Argument(format!("least squares failed: {e}")))?;

    let fitted = &design * &beta;
    let ym = mean(y);
    let ss_tot: f64 = y.iter().map(|v| (v - ym) * (v - ym)).sum();
    let ss_res: f64 = y.iter().zip(fitted.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    let constant_response = is_constant(y) || ss_tot <= 0.0;
    let r2adj = if constant_response {
        0.0
    } else {
        let r2 = 1.0 - ss_res / ss_tot;
        1.0 - (1.0 - r2) * (n_obs as f64 - 1.0) / (n_obs as f64 - p as f64 - 1.0)
    };
    let abs: Vec<f64> = beta.iter().skip(1).map(|b| b.abs()).collect();
    let coeff_range = if abs.is_empty() {
        0.0
    } else {
        abs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - abs.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    Ok(LinearModelDiag {
        r2adj: r2adj.min(1.0),
        coeff_range,
        coefficients: beta.iter().copied().collect(),
        rank_deficient: rank < p + 1,
        constant_response,
    })
}

/// Yeo-Johnson power transform of a single value.
pub fn yeo_johnson(x: f64, lambda: f64) -> f64 {
    const EPS: f64 = 1e-12;
    if lambda == 1.0 {
        // both branches reduce to the identity
        return x;
    }
    if x >= 0.0 {
        if lambda.abs() < EPS {
            x.ln_1p()
        } else {
            ((x + 1.0).powf(lambda) - 1.0) / lambda
        }
    } else if (lambda - 2.0).abs() < EPS {
        -(-x).ln_1p()
    } else {
        -((1.0 - x).powf(2.0 - lambda) - 1.0) / (2.0 - lambda)
    }
}

/// Lambda grid searched by [`yeo_johnson_fit_transform`]: -5 to 5 in steps of 0.01.
pub fn lambda_grid() -> impl Iterator<Item = f64> {
    (0..=1000).map(|i| (i as f64 - 500.0) / 100.0)
}

/// Gaussian profile log-likelihood of `lambda` for the data.
pub fn yeo_johnson_log_likelihood(data: &[f64], lambda: f64) -> f64 {
    let n = data.len() as f64;
    let t: Vec<f64> = data.iter().map(|&x| yeo_johnson(x, lambda)).collect();
    let m = mean(&t);
    let var = t.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
    if !(var > 0.0) || !var.is_finite() {
        return f64::NEG_INFINITY;
    }
    let jac: f64 = data.iter().map(|&x| x.signum() * x.abs().ln_1p()).sum();
    -0.5 * n * var.ln() + (lambda - 1.0) * jac
}

/// Standardises to zero mean and unit (population) variance; constant input maps to zeros.
pub fn standardize(series: &[f64]) -> Vec<f64> {
    if series.is_empty() || is_constant(series) {
        return vec![0.0; series.len()];
    }
    let m = mean(series);
    let sd = (series.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / series.len() as f64).sqrt();
    if !(sd > 0.0) {
        return vec![0.0; series.len()];
    }
    series.iter().map(|v| (v - m) / sd).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct YeoJohnsonFit {
    pub lambda: f64,
    pub transformed: Vec<f64>,
}

/// Maximum-likelihood Yeo-Johnson over the lambda grid, then standardisation.
/// Ties keep the smallest lambda. Constant input gives `lambda = 1` and zeros.
pub fn yeo_johnson_fit_transform(series: &[f64]) -> Result<YeoJohnsonFit> {
    if series.len() < 3 {
        return Err(Error::Argument(format!(
            "Yeo-Johnson fit needs at least 3 values, got {}",
            series.len()
        )));
    }
    if let Some(i) = series.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { kind: "series", index: i });
    }
    if is_constant(series) {
        return Ok(YeoJohnsonFit {
            lambda: 1.0,
            transformed: vec![0.0; series.len()],
        });
    }
    let mut best = (1.0, f64::NEG_INFINITY);
    for lambda in lambda_grid() {
        let ll = yeo_johnson_log_likelihood(series, lambda);
        if ll > best.1 {
            best = (lambda, ll);
        }
    }
    let lambda = best.0;
    let raw: Vec<f64> = series.iter().map(|&x| yeo_johnson(x, lambda)).collect();
    Ok(YeoJohnsonFit {
        lambda,
        transformed: standardize(&raw),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn moments_examples() {
        let m = moments(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m.mean, 2.0);
        assert_eq!(m.skewness, 0.0);
        let m = moments(&[5.0; 4]).unwrap();
        assert_eq!((m.std, m.skewness, m.kurtosis), (0.0, 0.0, 0.0));
        assert!(m.degenerate);
        let m = moments(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(close(m.skewness, 2.0, 1e-12), "{}", m.skewness);
        assert!(moments(&[]).is_err());
    }

    #[test]
    fn kurtosis_matches_hand_value() {
        // [0,0,0,1]: m2 = 3/16, m4 = 21/256 -> g2 = 21/9 - 3 = -2/3,
        // G2 = (5 * (-2/3) + 6) * 3 / (2 * 1) = 4
        let m = moments(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(close(m.kurtosis, 4.0, 1e-12), "{}", m.kurtosis);
    }

    #[test]
    fn pearson_examples() {
        assert!(close(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0, 1e-15));
        assert!(close(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0, 1e-15));
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[7.0; 3]).unwrap(), 0.0);
        assert!(pearson(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn spearman_examples() {
        assert!(close(spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 10.0, 100.0, 1e4]).unwrap(), 1.0, 1e-15));
        assert!(close(spearman(&[1.0, 2.0, 3.0], &[9.0, 1.0, 5.0]).unwrap(), -0.5, 1e-15));
        assert_eq!(spearman(&[2.0; 5], &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), 0.0);
        assert_eq!(fractional_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn lag1_examples() {
        assert_eq!(lag1_autocorr(&[4.0; 10]).unwrap(), 0.0);
        let alt = lag1_autocorr(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0]).unwrap();
        assert!(close(alt, -5.0 / 6.0, 1e-15));
        let ramp: Vec<f64> = (1..=100).map(f64::from).collect();
        assert!(lag1_autocorr(&ramp).unwrap() > 0.9);
        assert!(lag1_autocorr(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn iqr_examples() {
        assert_eq!(quartile_iqr(&[1.0; 4]).unwrap(), 0.0);
        assert_eq!(quartile_iqr(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 1.5);
        assert_eq!(quartile_iqr(&[3.0]).unwrap(), 0.0);
        assert_eq!(quartile_iqr(&[4.0, 1.0, 3.0, 2.0]).unwrap(), 1.5);
        assert!(quartile_iqr(&[]).is_err());
    }

    #[test]
    fn linear_model_examples() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, ((i * 7) % 5) as f64]).collect();
        let y: Vec<f64> = rows.iter().map(|r| 2.0 + 3.0 * r[0] + 3.0 * r[1]).collect();
        let d = linear_model(&rows, &y).unwrap();
        assert!(close(d.r2adj, 1.0, 1e-12));
        assert!(close(d.coeff_range, 0.0, 1e-9));
        assert!(!d.rank_deficient);

        let y: Vec<f64> = rows.iter().map(|r| 1.0 + 0.5 * r[0] - 2.0 * r[1]).collect();
        let d = linear_model(&rows, &y).unwrap();
        assert!(close(d.coeff_range, 1.5, 1e-9));
    }

    #[test]
    fn linear_model_degenerate_cases() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let d = linear_model(&rows, &y).unwrap();
        assert!(d.rank_deficient);
        assert!(close(d.r2adj, 1.0, 1e-9));
        let d = linear_model(&rows, &[3.0; 10]).unwrap();
        assert!(d.constant_response);
        assert_eq!(d.r2adj, 0.0);
        assert!(linear_model(&rows[..3], &y[..3]).is_err());
    }

    #[test]
    fn yeo_johnson_branches() {
        assert!(close(yeo_johnson(1.0, 0.0), 2f64.ln(), 1e-15));
        assert_eq!(yeo_johnson(3.0, 1.0), 3.0);
        assert_eq!(yeo_johnson(-3.0, 1.0), -3.0);
        assert!(close(yeo_johnson(-1.0, 2.0), -(2f64.ln()), 1e-15));
        assert!(close(yeo_johnson(2.0, 2.0), 4.0, 1e-15));
        assert!(close(yeo_johnson(-2.0, 0.0), -4.0, 1e-12));
    }

    #[test]
    fn yeo_johnson_identity_lambda_standardizes() {
        let x = [-1.5, -0.3, 0.0, 0.4, 1.2, 2.0];
        let raw: Vec<f64> = x.iter().map(|&v| yeo_johnson(v, 1.0)).collect();
        assert_eq!(raw, x.to_vec());
        let s = standardize(&raw);
        let z = standardize(&x);
        assert_eq!(s, z);
    }

    #[test]
    fn yeo_johnson_constant_and_short() {
        let fit = yeo_johnson_fit_transform(&[2.0; 5]).unwrap();
        assert_eq!(fit.lambda, 1.0);
        assert_eq!(fit.transformed, vec![0.0; 5]);
        assert!(yeo_johnson_fit_transform(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn lambda_grid_is_exact() {
        let g: Vec<f64> = lambda_grid().collect();
        assert_eq!(g.len(), 1001);
        assert_eq!(g[0], -5.0);
        assert_eq!(g[500], 0.0);
        assert_eq!(g[600], 1.0);
        assert_eq!(g[700], 2.0);
        assert_eq!(g[1000], 5.0);
    }
}
