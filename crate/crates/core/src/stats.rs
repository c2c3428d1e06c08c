//! Order-fixed accumulation of Monte Carlo samples.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sample mean with its standard error `s / √N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl MeanEstimate {
    /// Accumulates in slice order, so the result is independent of how the
    /// values were produced.
    pub fn from_values(values: &[f64]) -> MeanEstimate {
        let n = values.len();
        if n == 0 {
            return MeanEstimate { mean: f64::NAN, stderr: f64::NAN, samples: 0 };
        }
        let mut s = CompensatedSum::default();
        for &v in values {
            s.add(v);
        }
        let mean = s.value() / n as f64;
        if n < 2 {
            return MeanEstimate { mean, stderr: f64::NAN, samples: n };
        }
        let mut ss = CompensatedSum::default();
        for &v in values {
            ss.add((v - mean) * (v - mean));
        }
        let var = ss.value() / (n - 1) as f64;
        MeanEstimate { mean, stderr: (var / n as f64).sqrt(), samples: n }
    }

    /// Fraction of `true` values.
    pub fn from_indicators(hits: impl IntoIterator<Item = bool>) -> MeanEstimate {
        let v: Vec<f64> = hits.into_iter().map(|b| if b { 1.0 } else { 0.0 }).collect();
        MeanEstimate::from_values(&v)
    }

    /// `|a − b|` measured in combined standard errors.
    pub fn z_distance(&self, other: &MeanEstimate) -> f64 {
        let s = (self.stderr * self.stderr + other.stderr * other.stderr).sqrt();
        (self.mean - other.mean).abs() / s
    }
}

/// Median of a non-empty slice (average of the middle pair for even lengths).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Ordinary least-squares fit `y ≈ X β`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    /// Standard errors from the residual variance; NaN when there are no
    /// residual degrees of freedom.
    pub stderr: Vec<f64>,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

/// Least squares on the design matrix `rows` (one row per observation).
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<LinearFit> {
    let n = rows.len();
    let p = rows.first().map_or(0, Vec::len);
    if n != y.len() || p == 0 || rows.iter().any(|r| r.len() != p) {
        return Err(validation("design matrix and response disagree in shape"));
    }
    if n < p {
        return Err(validation(format!("{n} observations cannot determine {p} coefficients")));
    }
    let x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    let yv = DVector::from_column_slice(y);
    let xtx = x.transpose() * &x;
    let inv = xtx
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::Numeric("collinear regressors".into()))?;
    let beta = &inv * (x.transpose() * &yv);
    let fitted = &x * &beta;
    let residuals: Vec<f64> = (0..n).map(|i| y[i] - fitted[i]).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    let r_squared = if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 1.0 };
    let stderr = if n > p {
        let sigma2 = rss / (n - p) as f64;
        (0..p).map(|j| (sigma2 * inv[(j, j)]).max(0.0).sqrt()).collect()
    } else {
        vec![f64::NAN; p]
    };
    Ok(LinearFit { coefficients: beta.iter().copied().collect(), stderr, r_squared, residuals })
}

/// Outcome of a Pearson chi-square test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

fn chi_square(statistic: f64, dof: usize) -> ChiSquareTest {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    ChiSquareTest { statistic, dof, p_value: dist.sf(statistic) }
}

/// Goodness of fit of `counts` to the uniform distribution over its cells.
pub fn chi_square_uniform(counts: &[u64]) -> Result<ChiSquareTest> {
    let total: u64 = counts.iter().sum();
    if counts.len() < 2 || total == 0 {
        return Err(validation("uniformity test needs at least two cells and one observation"));
    }
    let expected = total as f64 / counts.len() as f64;
    let stat = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    Ok(chi_square(stat, counts.len() - 1))
}

/// Independence test for an `r × c` contingency table.
pub fn chi_square_independence(table: &[Vec<u64>]) -> Result<ChiSquareTest> {
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let ncols = table.first().map_or(0, Vec::len);
    if table.len() < 2 || ncols < 2 || table.iter().any(|r| r.len() != ncols) {
        return Err(validation("contingency table must be at least 2 × 2 and rectangular"));
    }
    let cols: Vec<f64> = (0..ncols).map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let total: f64 = rows.iter().sum();
    if rows.iter().chain(&cols).any(|&m| m == 0.0) {
        return Err(validation("contingency table has an empty margin"));
    }
    let mut stat = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &o) in r.iter().enumerate() {
            let e = rows[i] * cols[j] / total;
            stat += (o as f64 - e).powi(2) / e;
        }
    }
    Ok(chi_square(stat, (table.len() - 1) * (ncols - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn mean_and_stderr() {
        let e = MeanEstimate::from_values(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.stderr - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        let c = MeanEstimate::from_values(&[0.75; 10]);
        assert_eq!(c.mean, 0.75);
        assert_eq!(c.stderr, 0.0);
    }

    #[test]
    fn median_cases() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn least_squares_recovers_plane() {
        let rows: Vec<Vec<f64>> = (0..12).map(|i| vec![1.0, i as f64, ((i * 7) % 5) as f64]).collect();
        let y: Vec<f64> = rows.iter().map(|r| 0.5 - 2.0 * r[1] + 3.0 * r[2]).collect();
        let fit = least_squares(&rows, &y).unwrap();
        for (c, want) in fit.coefficients.iter().zip([0.5, -2.0, 3.0]) {
            assert!((c - want).abs() < 1e-10);
        }
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let collinear: Vec<Vec<f64>> = (0..5).map(|i| vec![1.0, i as f64, 2.0 * i as f64]).collect();
        assert!(least_squares(&collinear, &[0.0; 5]).is_err());
    }

    #[test]
    fn chi_square_reference_values() {
        let t = chi_square_uniform(&[10, 12, 8, 10]).unwrap();
        assert!((t.statistic - 0.8).abs() < 1e-12);
        let perfect = chi_square_uniform(&[5, 5, 5, 5]).unwrap();
        assert_eq!(perfect.p_value, 1.0);
        let dep = chi_square_independence(&[vec![50, 0], vec![0, 50]]).unwrap();
        assert!(dep.p_value < 1e-10 && dep.dof == 1);
        let ind = chi_square_independence(&[vec![25, 25], vec![25, 25]]).unwrap();
        assert_eq!(ind.statistic, 0.0);
    }
}
