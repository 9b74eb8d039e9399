//! Augmented Dickey-Fuller test with an intercept, used to decide whether a
//! series needs differencing.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ols::ols;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    /// t-statistic of `y_{t-1}` in the test regression.
    pub statistic: f64,
    pub lags: usize,
    /// 5% critical value for the sample size.
    pub critical_value: f64,
}

impl AdfResult {
    /// True when the unit-root null is rejected at 5%.
    pub fn stationary(&self) -> bool {
        self.statistic < self.critical_value
    }
}

/// Schwert's rule `floor(12 (T/100)^(1/4))`.
pub fn schwert_lags(t: usize) -> usize {
    (12.0 * (t as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Response-surface 5% critical value for the constant-only case,
/// `-2.8621 - 2.738/T - 8.36/T^2` (MacKinnon 2010).
pub fn adf_critical_5pct(t: usize) -> f64 {
    let t = t as f64;
    -2.8621 - 2.738 / t - 8.36 / (t * t)
}

/// Regress `dy_t` on `[1, y_{t-1}, dy_{t-1}, .., dy_{t-lags}]`.
pub fn adf_test(y: &[f64], lags: usize) -> Result<AdfResult> {
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    // dy[i] = y[i+1] - y[i]; row i needs dy[i - lags ..= i]
    let rows: Vec<usize> = (lags..dy.len()).collect();
    let q = lags + 2;
    if rows.len() < q + 10 {
        return Err(Error::invalid(format!(
            "{} observations are too few for an ADF test with {lags} lags",
            y.len()
        )));
    }
    let x = DMatrix::from_fn(rows.len(), q, |r, c| {
        let i = rows[r];
        match c {
            0 => 1.0,
            1 => y[i],
            _ => dy[i - (c - 1)],
        }
    });
    let target = DVector::from_iterator(rows.len(), rows.iter().map(|&i| dy[i]));
    let fit = ols(&x, &target)?;
    Ok(AdfResult {
        statistic: fit.coef[1] / fit.std_errors[1],
        lags,
        critical_value: adf_critical_5pct(rows.len()),
    })
}
