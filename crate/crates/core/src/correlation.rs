//! Sample autocorrelation, partial autocorrelation and cross-correlation.
//!
//! All estimators use the biased (divide-by-T) autocovariance, so the implied
//! autocovariance sequence is positive semidefinite and every value lies in
//! `[-1, 1]`. Lag 0 is never stored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Critical value of the 5% two-sided band.
pub const DEFAULT_BAND_Z: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationKind {
    Acf,
    Pacf,
    Ccf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSequence {
    pub kind: CorrelationKind,
    /// `values[h - 1]` holds lag `h`.
    pub values: Vec<f64>,
    /// Half-width of the approximate null band, `z / sqrt(T)`.
    pub significance_band: f64,
}

impl CorrelationSequence {
    pub fn max_lag(&self) -> usize {
        self.values.len()
    }

    pub fn lags(&self) -> impl Iterator<Item = usize> {
        1..=self.values.len()
    }

    pub fn at(&self, lag: usize) -> f64 {
        self.values[lag - 1]
    }

    /// Values with entries inside the band replaced by exact zeros.
    pub fn masked(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|&v| if v.abs() < self.significance_band { 0.0 } else { v })
            .collect()
    }

    /// Rebuild the band for another critical value.
    pub fn with_band_z(mut self, z: f64, n: usize) -> Self {
        self.significance_band = z / (n as f64).sqrt();
        self
    }
}

fn check_lag(max_lag: usize, n: usize) -> Result<()> {
    if max_lag == 0 {
        return Err(Error::invalid("max_lag must be positive"));
    }
    if max_lag >= n {
        return Err(Error::invalid(format!(
            "max_lag {max_lag} must be below series length {n}"
        )));
    }
    Ok(())
}

/// Mean-centred copy and its biased variance; errors on constant input.
fn centred(values: &[f64], what: &str) -> Result<(Vec<f64>, f64)> {
    if values.iter().all(|&v| v == values[0]) {
        return Err(Error::DegenerateSeries(format!("{what} is constant")));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let dev: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let var = dev.iter().map(|d| d * d).sum::<f64>() / n;
    if var <= 0.0 || !var.is_finite() {
        return Err(Error::DegenerateSeries(format!("{what} has zero variance")));
    }
    Ok((dev, var))
}

/// Raw slice version of [`acf`], used internally on residual vectors.
pub fn acf_values(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = values.len();
    check_lag(max_lag, n)?;
    let (dev, var) = centred(values, "series")?;
    let nf = n as f64;
    Ok((1..=max_lag)
        .map(|h| {
            let cov = dev[..n - h]
                .iter()
                .zip(&dev[h..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / nf;
            (cov / var).clamp(-1.0, 1.0)
        })
        .collect())
}

/// Partial autocorrelations from autocorrelations `rho[0] = lag 1, ...` by the
/// Durbin-Levinson recursion.
pub fn durbin_levinson(rho: &[f64]) -> Vec<f64> {
    let m = rho.len();
    let mut out = Vec::with_capacity(m);
    if m == 0 {
        return out;
    }
    let mut phi = vec![0.0; m];
    let mut prev = vec![0.0; m];
    phi[0] = rho[0];
    out.push(rho[0]);
    let mut v = 1.0 - rho[0] * rho[0];
    for k in 1..m {
        prev[..k].copy_from_slice(&phi[..k]);
        let num = rho[k] - (0..k).map(|j| prev[j] * rho[k - 1 - j]).sum::<f64>();
        let kk = if v > 0.0 { (num / v).clamp(-1.0, 1.0) } else { 0.0 };
        for j in 0..k {
            phi[j] = prev[j] - kk * prev[k - 1 - j];
        }
        phi[k] = kk;
        v *= 1.0 - kk * kk;
        out.push(kk);
    }
    out
}

pub fn pacf_values(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    Ok(durbin_levinson(&acf_values(values, max_lag)?))
}

/// Correlation of `x_t` with `y_{t+h}` for `h = 1..=max_lag`.
pub fn ccf_values(x: &[f64], y: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "cross-correlation inputs differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    check_lag(max_lag, n)?;
    let (dx, vx) = centred(x, "first series")?;
    let (dy, vy) = centred(y, "second series")?;
    let scale = (vx * vy).sqrt();
    let nf = n as f64;
    Ok((1..=max_lag)
        .map(|h| {
            let cov = dx[..n - h]
                .iter()
                .zip(&dy[h..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / nf;
            (cov / scale).clamp(-1.0, 1.0)
        })
        .collect())
}

fn band(n: usize) -> f64 {
    DEFAULT_BAND_Z / (n as f64).sqrt()
}

pub fn acf(series: &TimeSeries, max_lag: usize) -> Result<CorrelationSequence> {
    Ok(CorrelationSequence {
        kind: CorrelationKind::Acf,
        values: acf_values(series.values(), max_lag)?,
        significance_band: band(series.len()),
    })
}

pub fn pacf(series: &TimeSeries, max_lag: usize) -> Result<CorrelationSequence> {
    Ok(CorrelationSequence {
        kind: CorrelationKind::Pacf,
        values: pacf_values(series.values(), max_lag)?,
        significance_band: band(series.len()),
    })
}

pub fn ccf(x: &TimeSeries, y: &TimeSeries, max_lag: usize) -> Result<CorrelationSequence> {
    Ok(CorrelationSequence {
        kind: CorrelationKind::Ccf,
        values: ccf_values(x.values(), y.values(), max_lag)?,
        significance_band: band(x.len()),
    })
}
