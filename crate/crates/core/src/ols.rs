//! Least-squares building blocks shared by the AR and SETAR estimators.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InformationCriterion {
    Aic,
    #[default]
    Bic,
    Hqic,
}

impl InformationCriterion {
    /// `n ln(rss / n) + penalty(params, n)`.
    pub fn value(self, n: usize, rss: f64, params: usize) -> f64 {
        let nf = n as f64;
        let fit = nf * (rss / nf).max(f64::MIN_POSITIVE).ln();
        let k = params as f64;
        let penalty = match self {
            InformationCriterion::Aic => 2.0 * k,
            InformationCriterion::Bic => k * nf.ln(),
            InformationCriterion::Hqic => 2.0 * k * nf.ln().ln(),
        };
        fit + penalty
    }

    pub fn name(self) -> &'static str {
        match self {
            InformationCriterion::Aic => "aic",
            InformationCriterion::Bic => "bic",
            InformationCriterion::Hqic => "hqic",
        }
    }
}

/// Two-sided standard-normal critical value for `level`.
pub fn critical_value(level: f64) -> f64 {
    let normal = Normal::standard();
    normal.inverse_cdf(1.0 - level / 2.0)
}

#[derive(Debug, Clone)]
pub(crate) struct OlsFit {
    pub coef: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
}

/// Lagged design `[1, y_{t-1}, .., y_{t-p}]` for every `t` in `rows`.
pub(crate) fn lag_design(y: &[f64], rows: &[usize], p: usize) -> (DMatrix<f64>, DVector<f64>) {
    let x = DMatrix::from_fn(rows.len(), p + 1, |r, c| {
        if c == 0 {
            1.0
        } else {
            y[rows[r] - c]
        }
    });
    let target = DVector::from_iterator(rows.len(), rows.iter().map(|&t| y[t]));
    (x, target)
}

/// Householder-QR least squares with the usual homoskedastic standard errors.
pub(crate) fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<OlsFit> {
    let (n, q) = x.shape();
    if n < q {
        return Err(Error::estimation(format!(
            "{n} observations cannot identify {q} coefficients"
        )));
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let scale = x
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    for i in 0..q {
        if r[(i, i)].abs() <= 1e-10 * scale {
            return Err(Error::estimation("singular design matrix"));
        }
    }
    let qty = qr.q().transpose() * y;
    let rhs = qty.rows(0, q).into_owned();
    let coef = r
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::estimation("singular design matrix"))?;
    let fitted = x * &coef;
    let residuals: Vec<f64> = y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let dof = (n - q).max(1) as f64;
    let sigma2 = rss / dof;
    let rinv = r
        .solve_upper_triangular(&DMatrix::identity(q, q))
        .ok_or_else(|| Error::estimation("singular design matrix"))?;
    let std_errors = (0..q)
        .map(|i| (sigma2 * rinv.row(i).norm_squared()).sqrt())
        .collect();
    Ok(OlsFit {
        coef: coef.iter().copied().collect(),
        std_errors,
        residuals,
        rss,
    })
}

/// Cross-product sums `X'X`, `X'y`, `y'y` over a set of rows.
#[derive(Debug, Clone)]
pub(crate) struct Gram {
    pub q: usize,
    pub xx: Vec<f64>,
    pub xy: Vec<f64>,
    pub yy: f64,
}

impl Gram {
    pub fn zeros(q: usize) -> Self {
        Self {
            q,
            xx: vec![0.0; q * q],
            xy: vec![0.0; q],
            yy: 0.0,
        }
    }

    pub fn add(&mut self, x: &[f64], y: f64) {
        let q = self.q;
        for i in 0..q {
            let xi = x[i];
            for j in 0..=i {
                self.xx[i * q + j] += xi * x[j];
            }
            self.xy[i] += xi * y;
        }
        self.yy += y * y;
    }

    /// `self - other`, the sums over the rows in `self` but not in `other`.
    pub fn minus(&self, other: &Gram) -> Gram {
        Gram {
            q: self.q,
            xx: self.xx.iter().zip(&other.xx).map(|(a, b)| a - b).collect(),
            xy: self.xy.iter().zip(&other.xy).map(|(a, b)| a - b).collect(),
            yy: self.yy - other.yy,
        }
    }

    /// Residual sum of squares of the regression these sums describe, or
    /// `None` when `X'X` is numerically singular.
    pub fn rss(&self) -> Option<f64> {
        let q = self.q;
        let mut l = self.xx.clone();
        if !cholesky_lower(&mut l, q) {
            return None;
        }
        let mut z = self.xy.clone();
        forward_substitute(&l, q, &mut z);
        let explained: f64 = z.iter().map(|v| v * v).sum();
        Some((self.yy - explained).max(0.0))
    }
}

/// Prefix sums of [`Gram`] over rows in a given order; `prefix[i]` covers the
/// first `i` rows.
pub(crate) fn prefix_grams(rows: impl Iterator<Item = (Vec<f64>, f64)>, q: usize) -> Vec<Gram> {
    let mut acc = Gram::zeros(q);
    let mut out = vec![acc.clone()];
    for (x, y) in rows {
        acc.add(&x, y);
        out.push(acc.clone());
    }
    out
}

/// In-place lower Cholesky factor of a row-major `q x q` matrix (lower
/// triangle used). Returns false when a pivot is not safely positive.
pub(crate) fn cholesky_lower(a: &mut [f64], q: usize) -> bool {
    for j in 0..q {
        let diag_orig = a[j * q + j];
        let mut d = diag_orig;
        for k in 0..j {
            d -= a[j * q + k] * a[j * q + k];
        }
        if !(d > 1e-10 * diag_orig.abs().max(f64::MIN_POSITIVE)) {
            return false;
        }
        let d = d.sqrt();
        a[j * q + j] = d;
        for i in j + 1..q {
            let mut s = a[i * q + j];
            for k in 0..j {
                s -= a[i * q + k] * a[j * q + k];
            }
            a[i * q + j] = s / d;
        }
    }
    true
}

pub(crate) fn forward_substitute(l: &[f64], q: usize, b: &mut [f64]) {
    for i in 0..q {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * q + k] * b[k];
        }
        b[i] = s / l[i * q + i];
    }
}
