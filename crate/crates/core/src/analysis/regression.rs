use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::ols;

/// Power-law fit `length ~ exp(intercept) * n^slope`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
}

impl ExponentFit {
    pub fn constant(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Least squares of `log length` on `log n`.
pub fn fit_exponent(records: &[(usize, f64)]) -> Result<ExponentFit> {
    if records.len() < 3 {
        return Err(Error::DegenerateRegression(format!(
            "need at least 3 records, got {}",
            records.len()
        )));
    }
    let mut distinct: Vec<usize> = records.iter().map(|r| r.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateRegression(format!(
            "need at least 3 distinct n values, got {}",
            distinct.len()
        )));
    }
    if let Some(&(n, len)) = records.iter().find(|(n, l)| *n == 0 || !(*l > 0.0)) {
        return Err(Error::DegenerateRegression(format!(
            "nonpositive record (n = {n}, length = {len})"
        )));
    }
    let xs: Vec<f64> = records.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = records.iter().map(|(_, l)| l.ln()).collect();
    let fit = ols(&xs, &ys)?;
    Ok(ExponentFit {
        slope: fit.slope,
        intercept: fit.intercept,
        stderr: fit.slope_stderr,
    })
}
