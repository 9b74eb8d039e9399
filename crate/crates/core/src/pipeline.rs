//! Windowed clustering of a panel: per window, extract features for every
//! series, pick the cluster count and collect per-series model summaries.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{PipelineConfig, WindowSpec};
use crate::error::{Error, Result};
use crate::features::{assemble_matrix, extract_detailed, Extraction, FeatureMatrix};
use crate::ingest::PanelDataset;
use crate::rng::derive_seed;
use crate::series::{stationarize, TimeSeries};
use crate::setar::hansen_test;
use crate::spectral::{cluster_distances, ClusteringResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSummary {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub occupancy: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HansenSummary {
    pub null_regimes: usize,
    pub alt_regimes: usize,
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub label: String,
    pub delay: usize,
    pub thresholds: Vec<f64>,
    pub regimes: Vec<RegimeSummary>,
    pub setar_rss: f64,
    pub ar_order: usize,
    /// Threshold tests `j` against `j + 1` regimes for `j < k`; a test that
    /// could not be run is reported in `hansen_errors`.
    pub hansen: Vec<HansenSummary>,
    pub hansen_errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFailure {
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub name: String,
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    pub observations: usize,
    /// Reason the window was not clustered.
    pub skipped: Option<String>,
    /// Series that entered the clustering, in panel order.
    pub clustered: Vec<String>,
    pub failures: Vec<SeriesFailure>,
    pub clustering: Option<ClusteringResult>,
    /// Cluster id per clustered label.
    pub membership: BTreeMap<String, usize>,
    pub series: Vec<SeriesSummary>,
    #[serde(skip)]
    pub features: Option<FeatureMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub source: String,
    pub labels: Vec<String>,
    pub config: PipelineConfig,
    pub windows: Vec<WindowReport>,
}

struct Window {
    name: String,
    series: Vec<Option<TimeSeries>>,
    start: Option<NaiveDate>,
    end: Option<NaiveDate>,
}

fn windows(panel: &PanelDataset, spec: Option<&WindowSpec>) -> Vec<Window> {
    match spec {
        None => vec![Window {
            name: "full".into(),
            series: panel.series.iter().cloned().map(Some).collect(),
            start: panel.dates.first().copied(),
            end: panel.dates.last().copied(),
        }],
        Some(WindowSpec::Periods { periods }) => periods
            .iter()
            .map(|p| Window {
                name: p.name.clone(),
                series: panel.series.iter().map(|s| s.slice_dates(p.start, p.end)).collect(),
                start: Some(p.start),
                end: Some(p.end),
            })
            .collect(),
        Some(WindowSpec::Rolling { length, step }) => {
            let t = panel.dates.len();
            let mut out = Vec::new();
            let mut a = 0;
            while a + length <= t {
                out.push(Window {
                    name: format!("obs_{}_{}", a, a + length),
                    series: panel.series.iter().map(|s| s.slice(a, a + length)).collect(),
                    start: Some(panel.dates[a]),
                    end: Some(panel.dates[a + length - 1]),
                });
                a += step;
            }
            out
        }
    }
}

fn summarize_series(
    ex: &Extraction,
    series: &TimeSeries,
    config: &PipelineConfig,
    seed: u64,
) -> SeriesSummary {
    let mut hansen = Vec::new();
    let mut hansen_errors = Vec::new();
    if config.nonlinearity_test {
        let s = stationarize(series, config.stationarize);
        for j in 1..config.k {
            let r = s.as_ref().map_err(|e| e.to_string()).and_then(|s| {
                hansen_test(
                    s,
                    j,
                    j + 1,
                    config.bootstrap_reps,
                    derive_seed(seed, &[j as u64]),
                    &config.setar_options(),
                )
                .map_err(|e| e.to_string())
            });
            match r {
                Ok(t) => hansen.push(HansenSummary {
                    null_regimes: t.null_regimes,
                    alt_regimes: t.alt_regimes,
                    statistic: t.statistic,
                    p_value: t.p_value,
                }),
                Err(e) => hansen_errors.push(format!("{j} vs {}: {e}", j + 1)),
            }
        }
    }
    SeriesSummary {
        label: series.display_label().to_string(),
        delay: ex.setar.delay,
        thresholds: ex.setar.thresholds.clone(),
        regimes: ex
            .setar
            .regimes
            .iter()
            .map(|r| RegimeSummary {
                intercept: r.intercept,
                coefficients: r.coefficients.clone(),
                occupancy: r.occupancy,
            })
            .collect(),
        setar_rss: ex.setar.rss,
        ar_order: ex.ar.order(),
        hansen,
        hansen_errors,
    }
}

/// Two series cannot be scored by silhouette; each gets its own cluster.
fn pair_result(distances: &[Vec<f64>], seed: u64) -> ClusteringResult {
    ClusteringResult {
        assignments: vec![0, 1],
        c: 2,
        silhouettes: vec![0.0, 0.0],
        average_silhouette: 0.0,
        silhouette_by_c: BTreeMap::from([(2, 0.0)]),
        candidates: BTreeMap::new(),
        embedding: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        eigenvalues: Vec::new(),
        sigma: distances[0][1],
        seed,
    }
}

fn run_window(index: usize, w: Window, labels: &[String], config: &PipelineConfig) -> Result<WindowReport> {
    let observations = w.series.iter().flatten().map(TimeSeries::len).max().unwrap_or(0);
    let mut report = WindowReport {
        name: w.name.clone(),
        start: w.start,
        end: w.end,
        observations,
        skipped: None,
        clustered: Vec::new(),
        failures: Vec::new(),
        clustering: None,
        membership: BTreeMap::new(),
        series: Vec::new(),
        features: None,
    };
    // one extra observation is lost to differencing
    let needed = config.min_series_len() + 1;
    if observations < needed {
        let reason = format!("window has {observations} observations; at least {needed} required");
        log::warn!("skipping window `{}`: {reason}", w.name);
        report.failures = labels
            .iter()
            .map(|l| SeriesFailure {
                label: l.clone(),
                reason: format!("window skipped: {reason}"),
            })
            .collect();
        report.skipped = Some(reason);
        return Ok(report);
    }
    let one = |(i, s): (usize, &Option<TimeSeries>)| -> std::result::Result<(Extraction, SeriesSummary), String> {
        let s = s.as_ref().ok_or_else(|| "no observations in window".to_string())?;
        let ex = extract_detailed(s, config).map_err(|e| e.to_string())?;
        let seed = derive_seed(config.seed, &[index as u64, i as u64]);
        let summary = summarize_series(&ex, s, config, seed);
        Ok((ex, summary))
    };
    let outcomes: Vec<_> = if config.parallel {
        w.series.par_iter().enumerate().map(one).collect()
    } else {
        w.series.iter().enumerate().map(one).collect()
    };
    let mut vectors = Vec::new();
    for (label, o) in labels.iter().zip(outcomes) {
        match o {
            Ok((ex, summary)) => {
                report.clustered.push(label.clone());
                vectors.push(ex.features);
                report.series.push(summary);
            }
            Err(reason) => {
                log::warn!("window `{}`: series `{label}` failed: {reason}", w.name);
                report.failures.push(SeriesFailure {
                    label: label.clone(),
                    reason,
                });
            }
        }
    }
    if vectors.len() < 2 {
        return Err(Error::estimation(format!(
            "window `{}`: only {} series survived feature extraction",
            w.name,
            vectors.len()
        )));
    }
    let matrix = assemble_matrix(&vectors, config.standardize_features)?;
    let distances = matrix.distances();
    let n = matrix.n();
    let clustering = if n == 2 {
        pair_result(&distances, config.seed)
    } else {
        let c_max = config.c_max.min(n - 1);
        let c_min = config.c_min.min(c_max);
        let seed = derive_seed(config.seed, &[index as u64]);
        cluster_distances(&distances, c_min, c_max, &crate::spectral::SpectralOptions {
            seed,
            ..config.spectral_options()
        })?
    };
    report.membership = report
        .clustered
        .iter()
        .cloned()
        .zip(clustering.assignments.iter().copied())
        .collect();
    report.clustering = Some(clustering);
    report.features = Some(matrix);
    Ok(report)
}

/// Cluster every window of `panel`. Windows with too few observations are
/// skipped with a warning; a window in which fewer than two series survive
/// fails the run, as does a run in which every window was skipped.
pub fn cluster_panel(panel: &PanelDataset, config: &PipelineConfig) -> Result<ClusterReport> {
    config.validate()?;
    let labels: Vec<String> = panel.labels().into_iter().map(str::to_string).collect();
    if labels.len() < 2 {
        return Err(Error::estimation("clustering needs at least two series"));
    }
    let reports = windows(panel, config.windows.as_ref())
        .into_iter()
        .enumerate()
        .map(|(i, w)| run_window(i, w, &labels, config))
        .collect::<Result<Vec<_>>>()?;
    if reports.iter().all(|w| w.skipped.is_some()) {
        return Err(Error::estimation("every window was skipped for lack of data"));
    }
    Ok(ClusterReport {
        source: panel.source.clone(),
        labels,
        config: config.clone(),
        windows: reports,
    })
}
