//! Fixed-layout feature vectors built from SETAR, AR and correlation outputs.
//!
//! Block order, for `k` regimes, per-regime order cap `p_max`, AR order cap
//! `p_ar` and lag horizon `l`:
//!
//! ```text
//! setar coefficients   k * p_max   (regime 1 lags, regime 2 lags, ...)
//! residual acf         l
//! residual pacf        l
//! residual ccf         l           (standardized residuals vs their squares)
//! series acf           l
//! series pacf          l
//! ar coefficients      p_ar
//! ```
//!
//! Coefficients and residual correlations are significance-masked: entries
//! that fail the test are exactly zero. Shorter regime or AR orders are zero
//! padded so every series lands in the same space.

use serde::{Deserialize, Serialize};

use crate::ar::{fit_ar, mask_by_t, select_ar_order, ArModel};
use crate::config::{PipelineConfig, SetarMethod};
use crate::correlation::{acf_values, ccf_values, pacf_values};
use crate::error::{Error, Result};
use crate::ols::critical_value;
use crate::series::{stationarize, TimeSeries};
use crate::setar::{fit_setar_grid, fit_setar_sequential, SetarModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub k: usize,
    pub p_max: usize,
    pub p_ar: usize,
    pub l: usize,
}

impl FeatureLayout {
    pub fn from_config(config: &PipelineConfig) -> Self {
        Self {
            k: config.k,
            p_max: config.p_max,
            p_ar: config.p_ar_max,
            l: config.l,
        }
    }

    /// `p + 5l` with `p = k * p_max + p_ar`.
    pub fn dim(&self) -> usize {
        self.k * self.p_max + self.p_ar + 5 * self.l
    }

    /// One name per feature row, in layout order.
    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.dim());
        for j in 1..=self.k {
            out.extend((1..=self.p_max).map(|i| format!("setar_r{j}_lag{i}")));
        }
        for block in ["resid_acf", "resid_pacf", "resid_ccf_sq", "series_acf", "series_pacf"] {
            out.extend((1..=self.l).map(|h| format!("{block}_{h}")));
        }
        out.extend((1..=self.p_ar).map(|i| format!("ar_lag{i}")));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub label: String,
    pub layout: FeatureLayout,
    pub setar_coeffs: Vec<f64>,
    pub resid_acf: Vec<f64>,
    pub resid_pacf: Vec<f64>,
    pub resid_ccf_sq: Vec<f64>,
    pub series_acf: Vec<f64>,
    pub series_pacf: Vec<f64>,
    pub ar_coeffs: Vec<f64>,
}

impl FeatureVector {
    /// Concatenated blocks in layout order.
    pub fn values(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.layout.dim());
        v.extend(&self.setar_coeffs);
        v.extend(&self.resid_acf);
        v.extend(&self.resid_pacf);
        v.extend(&self.resid_ccf_sq);
        v.extend(&self.series_acf);
        v.extend(&self.series_pacf);
        v.extend(&self.ar_coeffs);
        v
    }

    pub fn dim(&self) -> usize {
        self.setar_coeffs.len()
            + self.resid_acf.len()
            + self.resid_pacf.len()
            + self.resid_ccf_sq.len()
            + self.series_acf.len()
            + self.series_pacf.len()
            + self.ar_coeffs.len()
    }
}

/// A feature vector together with the fitted models it came from.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub features: FeatureVector,
    pub setar: SetarModel,
    pub ar: ArModel,
}

fn pad(mut v: Vec<f64>, len: usize) -> Vec<f64> {
    v.resize(len, 0.0);
    v
}

fn mask_band(values: Vec<f64>, band: f64) -> Vec<f64> {
    values
        .into_iter()
        .map(|v| if v.abs() < band { 0.0 } else { v })
        .collect()
}

pub fn extract_features(series: &TimeSeries, config: &PipelineConfig) -> Result<FeatureVector> {
    extract_detailed(series, config).map(|e| e.features)
}

/// Feature extraction that also returns the SETAR and AR fits. Any failure is
/// wrapped with the series label.
pub fn extract_detailed(series: &TimeSeries, config: &PipelineConfig) -> Result<Extraction> {
    extract_inner(series, config).map_err(|e| Error::FeatureExtraction {
        label: series.display_label().to_string(),
        source: Box::new(e),
    })
}

fn extract_inner(series: &TimeSeries, config: &PipelineConfig) -> Result<Extraction> {
    config.validate()?;
    let layout = FeatureLayout::from_config(config);
    let s = stationarize(series, config.stationarize)?;
    let min_len = config.min_series_len();
    if s.len() < min_len {
        return Err(Error::invalid(format!(
            "{} observations after stationarizing; at least {min_len} required",
            s.len()
        )));
    }
    let level = config.significance_level;
    let z = critical_value(level);

    let opts = config.setar_options();
    let setar = match config.setar_method {
        SetarMethod::Grid => fit_setar_grid(&s, config.k, &opts)?,
        SetarMethod::Sequential => fit_setar_sequential(&s, config.k, &opts)?,
    };
    // regimes beyond those discovered stay zero
    let mut setar_coeffs = Vec::with_capacity(layout.k * layout.p_max);
    for j in 0..layout.k {
        let block = setar
            .regimes
            .get(j)
            .map(|r| mask_by_t(&r.coefficients, &r.std_errors[1..], level))
            .unwrap_or_default();
        setar_coeffs.extend(pad(block, layout.p_max));
    }

    let res = &setar.standardized_residuals;
    let band = z / (res.len() as f64).sqrt();
    let squared: Vec<f64> = res.iter().map(|e| e * e).collect();
    let resid_acf = mask_band(acf_values(res, layout.l)?, band);
    let resid_pacf = mask_band(pacf_values(res, layout.l)?, band);
    let resid_ccf_sq = mask_band(ccf_values(res, &squared, layout.l)?, band);

    let p = select_ar_order(&s, config.p_ar_max, config.criterion)?;
    let ar = fit_ar(&s, p, config.criterion)?;
    let ar_coeffs = pad(mask_by_t(&ar.coefficients, &ar.std_errors[1..], level), layout.p_ar);

    let series_acf = acf_values(s.values(), layout.l)?;
    let series_pacf = pacf_values(s.values(), layout.l)?;

    let features = FeatureVector {
        label: series.display_label().to_string(),
        layout,
        setar_coeffs,
        resid_acf,
        resid_pacf,
        resid_ccf_sq,
        series_acf,
        series_pacf,
        ar_coeffs,
    };
    debug_assert_eq!(features.dim(), layout.dim());
    Ok(Extraction {
        features,
        setar,
        ar,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowScaling {
    pub mean: f64,
    /// Zero for constant rows, which are mapped to 0.
    pub scale: f64,
}

/// Feature vectors as columns, with per-feature (row) standardization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub labels: Vec<String>,
    pub layout: FeatureLayout,
    /// Unscaled columns, one per series.
    pub raw: Vec<Vec<f64>>,
    /// Columns after row scaling (equal to `raw` when scaling is off).
    pub columns: Vec<Vec<f64>>,
    pub row_scaling: Option<Vec<RowScaling>>,
}

impl FeatureMatrix {
    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    /// Euclidean distances between scaled columns.
    pub fn distances(&self) -> Vec<Vec<f64>> {
        pairwise_distances(&self.columns)
    }
}

pub fn pairwise_distances(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Standardize every row (feature) across columns to mean 0 and unit
/// population standard deviation.
pub fn standardize_rows(columns: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<RowScaling>) {
    let n = columns.len();
    let dim = columns.first().map_or(0, Vec::len);
    let mut out = columns.to_vec();
    let mut scaling = Vec::with_capacity(dim);
    for r in 0..dim {
        let first = columns[0][r];
        let mean = columns.iter().map(|c| c[r]).sum::<f64>() / n as f64;
        let var = columns.iter().map(|c| (c[r] - mean).powi(2)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        let constant =
            columns.iter().all(|c| c[r] == first) || sd <= 1e-12 * mean.abs().max(1.0);
        if constant {
            for c in &mut out {
                c[r] = 0.0;
            }
            scaling.push(RowScaling { mean, scale: 0.0 });
        } else {
            for c in &mut out {
                c[r] = (c[r] - mean) / sd;
            }
            scaling.push(RowScaling { mean, scale: sd });
        }
    }
    (out, scaling)
}

pub fn assemble_matrix(vectors: &[FeatureVector], standardize: bool) -> Result<FeatureMatrix> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::invalid("no feature vectors to assemble"))?;
    let layout = first.layout;
    if let Some(bad) = vectors.iter().find(|v| v.layout != layout || v.dim() != layout.dim()) {
        return Err(Error::invalid(format!(
            "feature vector `{}` has dimension {} but {} was expected",
            bad.label,
            bad.dim(),
            layout.dim()
        )));
    }
    let raw: Vec<Vec<f64>> = vectors.iter().map(FeatureVector::values).collect();
    let (columns, row_scaling) = if standardize {
        let (c, s) = standardize_rows(&raw);
        (c, Some(s))
    } else {
        (raw.clone(), None)
    };
    Ok(FeatureMatrix {
        labels: vectors.iter().map(|v| v.label.clone()).collect(),
        layout,
        raw,
        columns,
        row_scaling,
    })
}

#[cfg(test)]
mod tests;
