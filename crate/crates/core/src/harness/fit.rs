//! Log-log regression for power-law exponents.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::stats::least_squares;

/// Least-squares line through `(log n, log value)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// `None` when there are no residual degrees of freedom (two points).
    pub slope_stderr: Option<f64>,
    pub intercept_stderr: Option<f64>,
    pub r_squared: f64,
    /// `(log n, log value)`.
    pub points: Vec<(f64, f64)>,
}

impl FitResult {
    /// `slope ± k·stderr`; a missing stderr yields an empty-width band.
    pub fn band(&self, k: f64) -> (f64, f64) {
        let s = self.slope_stderr.unwrap_or(0.0);
        (self.slope - k * s, self.slope + k * s)
    }

    /// Residuals `log value − (intercept + slope · log n)`.
    pub fn residuals(&self) -> Vec<f64> {
        self.points.iter().map(|&(x, y)| y - (self.intercept + self.slope * x)).collect()
    }
}

/// Fits `value ≈ e^intercept · n^slope` by ordinary least squares in log-log
/// coordinates.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(validation("a fit needs at least two points"));
    }
    if let Some(&(n, v)) = points.iter().find(|&&(n, v)| !(n > 0.0 && v > 0.0)) {
        return Err(validation(format!("log-log fit needs positive coordinates, got ({n}, {v})")));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, v)| (n.ln(), v.ln())).collect();
    if logs.iter().all(|p| p.0 == logs[0].0) {
        return Err(validation("log-log fit needs at least two distinct abscissae"));
    }
    let rows: Vec<Vec<f64>> = logs.iter().map(|&(x, _)| vec![1.0, x]).collect();
    let y: Vec<f64> = logs.iter().map(|p| p.1).collect();
    let fit = least_squares(&rows, &y)?;
    let defined = points.len() > 2;
    Ok(FitResult {
        slope: fit.coefficients[1],
        intercept: fit.coefficients[0],
        slope_stderr: defined.then_some(fit.stderr[1]),
        intercept_stderr: defined.then_some(fit.stderr[0]),
        r_squared: fit.r_squared,
        points: logs,
    })
}
