//! Clustering of univariate time series by the similarity of their
//! generating mechanisms.
//!
//! Each series is summarised by a fixed-length feature vector built from a
//! SETAR fit, a linear AR fit and correlation statistics
//! ([`features`]). The vectors are partitioned by normalized spectral
//! clustering with the cluster count chosen by average silhouette
//! ([`spectral`]). [`simlab`] simulates labelled panels to measure recovery and
//! [`pipeline`] runs the whole chain over time windows of a CSV panel.

pub mod ar;
pub mod config;
pub mod correlation;
pub mod error;
pub mod features;
pub mod ingest;
mod ols;
pub mod pipeline;
pub mod rng;
pub mod series;
pub mod setar;
pub mod simlab;
pub mod spectral;
pub mod unit_root;

pub use ar::{fit_ar, select_ar_order, significant_coefficients, ArModel};
pub use config::{Bandwidth, Period, PipelineConfig, SetarMethod, WindowSpec};
pub use correlation::{acf, ccf, pacf, CorrelationKind, CorrelationSequence};
pub use error::{Error, IngestError, Result};
pub use features::{assemble_matrix, extract_features, FeatureLayout, FeatureMatrix, FeatureVector};
pub use ingest::{ingest_csv, PanelDataset};
pub use ols::{critical_value, InformationCriterion};
pub use pipeline::{cluster_panel, ClusterReport, WindowReport};
pub use series::{stationarize, StationarizeMode, TimeSeries};
pub use setar::{
    fit_setar_grid, fit_setar_sequential, hansen_test, SetarModel, SetarOptions,
    ThresholdTestResult,
};
pub use simlab::{
    adjusted_rand_index, exact_grouping, reference_dgm, reference_dgms, run_scenario, simulate,
    DgmKind, DgmSpec, ScenarioConfig, ScenarioResult,
};
pub use spectral::{select_cluster_count, ClusteringResult, SpectralOptions};
