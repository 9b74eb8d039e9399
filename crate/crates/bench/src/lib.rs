//! Shared fixtures for the benchmarks.

use tarclust_core::features::{assemble_matrix, extract_features};
use tarclust_core::simlab::{reference_dgms, simulate, ScenarioConfig};
use tarclust_core::{FeatureMatrix, PipelineConfig, TimeSeries};

/// `per` draws of every reference mechanism at length `t`.
pub fn reference_panel(per: usize, t: usize) -> Vec<TimeSeries> {
    reference_dgms()
        .iter()
        .enumerate()
        .flat_map(|(g, spec)| (0..per).map(move |s| simulate(spec, t, 200, (g * 1000 + s) as u64).unwrap()))
        .collect()
}

/// Pipeline settings used for simulated series.
pub fn simulation_config() -> PipelineConfig {
    ScenarioConfig::default().pipeline
}

pub fn feature_matrix(per: usize, t: usize) -> FeatureMatrix {
    let cfg = simulation_config();
    let vectors: Vec<_> = reference_panel(per, t)
        .iter()
        .map(|s| extract_features(s, &cfg).unwrap())
        .collect();
    assemble_matrix(&vectors, cfg.standardize_features).unwrap()
}
