//! Self-exciting threshold autoregressions.
//!
//! A SETAR(k) model switches between `k` AR regimes according to where the
//! delayed value `y_{t-d}` falls relative to ordered thresholds
//! `r_1 < .. < r_{k-1}`; regime `j` is active when `r_{j-1} < y_{t-d} <= r_j`.
//!
//! Estimation is by least squares. Thresholds and delay are chosen to minimise
//! the total RSS with every regime at the common order `p_max`; per-regime
//! orders are then picked by information criterion on each regime's rows and
//! the regimes are refitted.

mod grid;
mod hansen;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ar::{fit_ar, select_ar_order};
use crate::error::{Error, Result};
use crate::ols::{lag_design, ols, InformationCriterion};
use crate::series::TimeSeries;

use grid::{best_partition, DelayOrder};

pub use hansen::{hansen_test, ThresholdTestResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetarOptions {
    /// Largest AR order in any regime; also the order used during the
    /// threshold search.
    pub p_max: usize,
    /// Delays `1..=d_max` are searched.
    pub d_max: usize,
    pub criterion: InformationCriterion,
    /// Pick each regime's order in `1..=p_max` by `criterion`; when false all
    /// regimes keep `p_max`.
    pub select_orders: bool,
    /// Minimum share of the effective sample in every regime.
    pub min_fraction: f64,
    pub parallel: bool,
}

impl Default for SetarOptions {
    fn default() -> Self {
        Self {
            p_max: 3,
            d_max: 2,
            criterion: InformationCriterion::Bic,
            select_orders: true,
            min_fraction: 0.1,
            parallel: true,
        }
    }
}

impl SetarOptions {
    fn validate(&self) -> Result<()> {
        if self.p_max == 0 || self.d_max == 0 {
            return Err(Error::invalid("p_max and d_max must be positive"));
        }
        if !(0.0..0.5).contains(&self.min_fraction) {
            return Err(Error::invalid("min_fraction must lie in [0, 0.5)"));
        }
        Ok(())
    }

    /// First time index used by every candidate model.
    pub fn start(&self) -> usize {
        self.p_max.max(self.d_max)
    }

    /// Smallest admissible regime size for an effective sample of `n` rows.
    pub fn min_obs(&self, n: usize) -> usize {
        let frac = (self.min_fraction * n as f64).ceil() as usize;
        frac.max(self.p_max + 2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub intercept: f64,
    /// `coefficients[i - 1]` multiplies `y_{t-i}`.
    pub coefficients: Vec<f64>,
    /// Intercept first, then one per lag.
    pub std_errors: Vec<f64>,
    pub occupancy: usize,
    pub rss: f64,
}

impl Regime {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetarModel {
    pub thresholds: Vec<f64>,
    pub delay: usize,
    pub regimes: Vec<Regime>,
    /// First time index covered by `residuals`.
    pub start: usize,
    /// Active regime for every `t` in `start..T`.
    pub regime_path: Vec<usize>,
    pub residuals: Vec<f64>,
    /// Residuals divided by the whole-model residual standard deviation.
    pub standardized_residuals: Vec<f64>,
    pub rss: f64,
    /// Objective of the threshold search: total RSS with every regime at
    /// order `p_max` on the common sample `max(p_max, d_max)..T`.
    pub search_rss: f64,
}

impl SetarModel {
    pub fn k(&self) -> usize {
        self.regimes.len()
    }

    /// Regime index for a threshold-variable value.
    pub fn regime_for(&self, z: f64) -> usize {
        self.thresholds.iter().filter(|&&r| r < z).count()
    }

    pub fn occupancy(&self) -> Vec<usize> {
        self.regimes.iter().map(|r| r.occupancy).collect()
    }

    pub fn effective_len(&self) -> usize {
        self.residuals.len()
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("regime count must be at least 1"));
    }
    Ok(())
}

/// Exhaustive least-squares fit of a `k`-regime SETAR model.
pub fn fit_setar_grid(series: &TimeSeries, k: usize, opts: &SetarOptions) -> Result<SetarModel> {
    check_k(k)?;
    opts.validate()?;
    if k == 1 {
        return linear_model(series, opts);
    }
    let y = series.values();
    let start = opts.start();
    let n = sample_size(series, opts, k)?;
    let min_obs = opts.min_obs(n);

    let search = |d: usize| {
        let order = DelayOrder::new(y, start, opts.p_max, d);
        best_partition(&order, k, min_obs, opts.parallel).map(|(rss, splits)| {
            let thresholds = splits.iter().map(|&s| order.threshold_at(s)).collect();
            (d, rss, thresholds)
        })
    };
    let per_delay: Vec<Option<(usize, f64, Vec<f64>)>> = if opts.parallel {
        (1..=opts.d_max).into_par_iter().map(search).collect()
    } else {
        (1..=opts.d_max).map(search).collect()
    };
    let (delay, _, thresholds) = per_delay
        .into_iter()
        .flatten()
        .fold(None::<(usize, f64, Vec<f64>)>, |acc, cur| match acc {
            Some(a) if a.1 <= cur.1 => Some(a),
            _ => Some(cur),
        })
        .ok_or_else(|| no_admissible(series, k))?;
    build_model(series, delay, thresholds, opts)
}

/// Sequential threshold selection: starting from the linear model, add the
/// single best threshold inside any current regime as long as doing so lowers
/// the information criterion, up to `k_max` regimes.
pub fn fit_setar_sequential(
    series: &TimeSeries,
    k_max: usize,
    opts: &SetarOptions,
) -> Result<SetarModel> {
    check_k(k_max)?;
    opts.validate()?;
    if k_max == 1 {
        return linear_model(series, opts);
    }
    let y = series.values();
    let start = opts.start();
    let n = sample_size(series, opts, 2)?;
    let min_obs = opts.min_obs(n);
    let q = opts.p_max + 1;
    let ic = |rss: f64, k: usize| opts.criterion.value(n, rss, k * q + (k - 1));

    let orders: Vec<DelayOrder> = (1..=opts.d_max)
        .map(|d| DelayOrder::new(y, start, opts.p_max, d))
        .collect();
    let linear_rss = orders[0].cost(0, n);
    if !linear_rss.is_finite() {
        return Err(Error::estimation(format!(
            "linear AR({}) is singular for `{}`",
            opts.p_max,
            series.display_label()
        )));
    }

    // first threshold, over all delays
    let mut first: Option<(usize, usize, f64)> = None;
    for (di, order) in orders.iter().enumerate() {
        if let Some((s, rss)) = order.best_split_within(0, n, min_obs) {
            if first.is_none_or(|f| rss < f.2) {
                first = Some((di, s, rss));
            }
        }
    }
    let Some((di, s, rss)) = first else {
        return linear_model(series, opts);
    };
    if ic(rss, 2) >= ic(linear_rss, 1) {
        return linear_model(series, opts);
    }

    let order = &orders[di];
    let mut bounds = vec![0, s, n];
    let mut current = rss;
    while bounds.len() - 1 < k_max {
        let mut best: Option<(usize, f64)> = None;
        for w in bounds.windows(2) {
            let (a, b) = (w[0], w[1]);
            if let Some((split, seg)) = order.best_split_within(a, b, min_obs) {
                let total = current - order.cost(a, b) + seg;
                if best.is_none_or(|(_, r)| total < r) {
                    best = Some((split, total));
                }
            }
        }
        let Some((split, total)) = best else { break };
        let k = bounds.len() - 1;
        if ic(total, k + 1) >= ic(current, k) {
            break;
        }
        let pos = bounds.partition_point(|&b| b < split);
        bounds.insert(pos, split);
        current = total;
    }
    let thresholds = bounds[1..bounds.len() - 1]
        .iter()
        .map(|&b| order.threshold_at(b))
        .collect();
    build_model(series, order.delay, thresholds, opts)
}

fn sample_size(series: &TimeSeries, opts: &SetarOptions, k: usize) -> Result<usize> {
    let start = opts.start();
    let t = series.len();
    let n = t.saturating_sub(start);
    if n < k * opts.min_obs(n).max(1) {
        return Err(no_admissible(series, k));
    }
    Ok(n)
}

fn no_admissible(series: &TimeSeries, k: usize) -> Error {
    Error::estimation(format!(
        "no admissible {k}-regime threshold configuration for `{}` ({} observations)",
        series.display_label(),
        series.len()
    ))
}

/// k = 1: the AR fit at the selected order.
fn linear_model(series: &TimeSeries, opts: &SetarOptions) -> Result<SetarModel> {
    let p = if opts.select_orders {
        select_ar_order(series, opts.p_max, opts.criterion)?
    } else {
        opts.p_max
    };
    let ar = fit_ar(series, p, opts.criterion)?;
    let y = series.values();
    let start = opts.start();
    if y.len() <= start + opts.p_max + 1 {
        return Err(no_admissible(series, 1));
    }
    let rows: Vec<usize> = (start..y.len()).collect();
    let (x, target) = lag_design(y, &rows, opts.p_max);
    let search_rss = ols(&x, &target)?.rss;
    let rss = ar.rss();
    let n = ar.residuals.len();
    let standardized = standardize(&ar.residuals, rss, n.saturating_sub(p + 1));
    Ok(SetarModel {
        thresholds: Vec::new(),
        delay: 1,
        regimes: vec![Regime {
            intercept: ar.intercept,
            coefficients: ar.coefficients,
            std_errors: ar.std_errors,
            occupancy: n,
            rss,
        }],
        start: p,
        regime_path: vec![0; n],
        residuals: ar.residuals,
        standardized_residuals: standardized,
        rss,
        search_rss,
    })
}

fn standardize(residuals: &[f64], rss: f64, dof: usize) -> Vec<f64> {
    let sd = (rss / dof.max(1) as f64).sqrt();
    if sd > 0.0 {
        residuals.iter().map(|e| e / sd).collect()
    } else {
        residuals.to_vec()
    }
}

/// Refit every regime for fixed thresholds and delay.
fn build_model(
    series: &TimeSeries,
    delay: usize,
    thresholds: Vec<f64>,
    opts: &SetarOptions,
) -> Result<SetarModel> {
    let y = series.values();
    let start = opts.start();
    let k = thresholds.len() + 1;
    let regime_of = |z: f64| thresholds.iter().filter(|&&r| r < z).count();
    let regime_path: Vec<usize> = (start..y.len()).map(|t| regime_of(y[t - delay])).collect();
    let mut rows_by_regime: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &j) in regime_path.iter().enumerate() {
        rows_by_regime[j].push(start + i);
    }

    let mut residuals = vec![0.0; regime_path.len()];
    let mut regimes = Vec::with_capacity(k);
    let mut search_rss = 0.0;
    let mut params = 0;
    for rows in &rows_by_regime {
        let (x_full, target) = lag_design(y, rows, opts.p_max);
        let full = ols(&x_full, &target)?;
        search_rss += full.rss;
        let fit = if opts.select_orders {
            let mut best = (opts.p_max, f64::INFINITY, None);
            for p in 1..=opts.p_max {
                let fit = if p == opts.p_max {
                    full.clone()
                } else {
                    let (x, t) = lag_design(y, rows, p);
                    ols(&x, &t)?
                };
                let v = opts.criterion.value(rows.len(), fit.rss, p + 1);
                if v < best.1 {
                    best = (p, v, Some(fit));
                }
            }
            best.2.expect("at least one order evaluated")
        } else {
            full
        };
        for (r, &t) in rows.iter().enumerate() {
            residuals[t - start] = fit.residuals[r];
        }
        params += fit.coef.len();
        regimes.push(Regime {
            intercept: fit.coef[0],
            coefficients: fit.coef[1..].to_vec(),
            std_errors: fit.std_errors,
            occupancy: rows.len(),
            rss: fit.rss,
        });
    }
    let rss: f64 = regimes.iter().map(|r| r.rss).sum();
    let standardized_residuals = standardize(&residuals, rss, residuals.len().saturating_sub(params));
    Ok(SetarModel {
        thresholds,
        delay,
        regimes,
        start,
        regime_path,
        residuals,
        standardized_residuals,
        rss,
        search_rss,
    })
}
