//! Linear autoregressions fitted by ordinary least squares.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ols::{critical_value, lag_design, ols, InformationCriterion};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcValue {
    pub criterion: InformationCriterion,
    pub value: f64,
}

/// AR(p) with intercept: `y_t = c + sum_i phi_i y_{t-i} + e_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArModel {
    pub intercept: f64,
    /// `coefficients[i - 1]` multiplies `y_{t-i}`.
    pub coefficients: Vec<f64>,
    /// Intercept first, then one per lag.
    pub std_errors: Vec<f64>,
    /// One per `t` in `p..T`.
    pub residuals: Vec<f64>,
    pub sigma2: f64,
    pub ic: IcValue,
}

impl ArModel {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn rss(&self) -> f64 {
        self.residuals.iter().map(|e| e * e).sum()
    }

    /// t-statistics of the lag coefficients.
    pub fn t_stats(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .zip(&self.std_errors[1..])
            .map(|(c, s)| c / s)
            .collect()
    }
}

pub fn fit_ar(series: &TimeSeries, p: usize, criterion: InformationCriterion) -> Result<ArModel> {
    let y = series.values();
    if p == 0 {
        return Err(Error::invalid("AR order must be positive"));
    }
    if y.len() <= p + 2 {
        return Err(Error::invalid(format!(
            "AR({p}) needs more than {} observations, got {}",
            p + 2,
            y.len()
        )));
    }
    let rows: Vec<usize> = (p..y.len()).collect();
    let (x, target) = lag_design(y, &rows, p);
    let fit = ols(&x, &target).map_err(|e| match e {
        Error::EstimationFailure(m) => {
            Error::estimation(format!("AR({p}) for `{}`: {m}", series.display_label()))
        }
        other => other,
    })?;
    let n = rows.len();
    let sigma2 = fit.rss / (n - p - 1) as f64;
    Ok(ArModel {
        intercept: fit.coef[0],
        coefficients: fit.coef[1..].to_vec(),
        std_errors: fit.std_errors,
        ic: IcValue {
            criterion,
            value: criterion.value(n, fit.rss, p + 1),
        },
        residuals: fit.residuals,
        sigma2,
    })
}

/// Order in `1..=p_max` minimising `criterion`; every candidate is fitted on
/// the same rows (the first `p_max` observations are dropped).
pub fn select_ar_order(
    series: &TimeSeries,
    p_max: usize,
    criterion: InformationCriterion,
) -> Result<usize> {
    let y = series.values();
    if p_max == 0 {
        return Err(Error::invalid("p_max must be positive"));
    }
    if y.len() <= p_max + 2 {
        return Err(Error::invalid(format!(
            "order selection up to {p_max} needs more than {} observations, got {}",
            p_max + 2,
            y.len()
        )));
    }
    let rows: Vec<usize> = (p_max..y.len()).collect();
    let mut best = (1, f64::INFINITY);
    for p in 1..=p_max {
        let (x, target) = lag_design(y, &rows, p);
        let fit = ols(&x, &target)?;
        let value = criterion.value(rows.len(), fit.rss, p + 1);
        if value < best.1 {
            best = (p, value);
        }
    }
    Ok(best.0)
}

/// Lag coefficients with entries zeroed where `|coef / se|` falls below the
/// two-sided normal critical value at `level`. Length is always the model order.
pub fn significant_coefficients(model: &ArModel, level: f64) -> Vec<f64> {
    mask_by_t(&model.coefficients, &model.std_errors[1..], level)
}

pub(crate) fn mask_by_t(coefficients: &[f64], std_errors: &[f64], level: f64) -> Vec<f64> {
    let z = critical_value(level);
    coefficients
        .iter()
        .zip(std_errors)
        .map(|(&c, &s)| {
            let t = (c / s).abs();
            if t >= z {
                c
            } else {
                0.0
            }
        })
        .collect()
}
