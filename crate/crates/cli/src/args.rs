//! Command-line arguments and their application on top of config files.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::{DeserializeOwned, IntoDeserializer};
use tarclust_core::spectral::SilhouetteSpace;
use tarclust_core::{Bandwidth, InformationCriterion, PipelineConfig, SetarMethod, StationarizeMode};

#[derive(Debug, Parser)]
#[command(name = "tarclust", version, about = "Cluster time series by the similarity of their generating mechanisms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster the series of a CSV panel, per window when windows are configured.
    Cluster {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Output directory.
        #[arg(long, short, default_value = "tarclust-out")]
        out: PathBuf,
    },
    /// Write the feature matrix of every window to `features.csv`.
    Features {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long, short, default_value = "tarclust-out")]
        out: PathBuf,
    },
    /// Run the simulation scenario and report recovery statistics.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long, short, default_value = "tarclust-out")]
        out: PathBuf,
    },
    /// Bootstrap threshold tests of `j` against `j + 1` regimes for every
    /// series over the full sample.
    TestNonlinearity {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Also write `nonlinearity.json` here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file with a header row, a date column and numeric value columns.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, default_value = "date")]
    pub date_column: String,
    /// Comma-separated value columns (default: every other column).
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub n_per_dgm: Option<usize>,
    #[arg(long)]
    pub length: Option<usize>,
    /// Comma-separated reference mechanisms, e.g. `ser01,ser07`.
    #[arg(long, value_delimiter = ',')]
    pub dgms: Option<Vec<String>>,
}

/// Pipeline settings; each flag overrides the config file.
#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// TOML config file (pipeline settings, or a scenario for `simulate`).
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long)]
    pub p_ar_max: Option<usize>,
    #[arg(long)]
    pub d_max: Option<usize>,
    /// Correlation lag horizon.
    #[arg(long = "lags")]
    pub l: Option<usize>,
    #[arg(long)]
    pub significance_level: Option<f64>,
    #[arg(long, value_parser = parse_name::<InformationCriterion>)]
    pub criterion: Option<InformationCriterion>,
    #[arg(long, value_parser = parse_name::<SetarMethod>)]
    pub setar_method: Option<SetarMethod>,
    #[arg(long)]
    pub min_regime_fraction: Option<f64>,
    /// `auto` or a positive bandwidth.
    #[arg(long, value_parser = parse_sigma)]
    pub sigma: Option<Bandwidth>,
    #[arg(long, value_parser = parse_name::<SilhouetteSpace>)]
    pub silhouette_space: Option<SilhouetteSpace>,
    #[arg(long)]
    pub c_min: Option<usize>,
    #[arg(long)]
    pub c_max: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub bootstrap_reps: Option<usize>,
    #[arg(long, value_parser = parse_name::<StationarizeMode>)]
    pub stationarize: Option<StationarizeMode>,
    #[arg(long)]
    pub standardize_features: Option<bool>,
    /// Skip the per-series threshold tests in `cluster`.
    #[arg(long)]
    pub no_nonlinearity_test: bool,
    /// Run single-threaded.
    #[arg(long)]
    pub serial: bool,
}

impl PipelineArgs {
    pub fn apply(&self, cfg: &mut PipelineConfig) {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    cfg.$field = v;
                }
            )*};
        }
        set!(
            seed, k, p_max, p_ar_max, d_max, l, significance_level, criterion, setar_method,
            min_regime_fraction, sigma, silhouette_space, c_min, c_max, restarts, bootstrap_reps,
            stationarize, standardize_features
        );
        if self.no_nonlinearity_test {
            cfg.nonlinearity_test = false;
        }
        if self.serial {
            cfg.parallel = false;
        }
    }
}

/// Parse a lower-case variant name through the type's serde representation.
fn parse_name<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    T::deserialize(s.into_deserializer()).map_err(|e: serde::de::value::Error| e.to_string())
}

fn parse_sigma(s: &str) -> Result<Bandwidth, String> {
    if s == "auto" {
        return Ok(Bandwidth::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Bandwidth::Fixed(v)),
        _ => Err(format!("expected `auto` or a positive number, got `{s}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_parse_through_serde() {
        assert_eq!(parse_name::<StationarizeMode>("log_diff").unwrap(), StationarizeMode::LogDiff);
        assert_eq!(parse_name::<InformationCriterion>("hqic").unwrap(), InformationCriterion::Hqic);
        assert!(parse_name::<SetarMethod>("bogus").unwrap_err().contains("grid"));
    }

    #[test]
    fn sigma_accepts_auto_and_positive_values() {
        assert_eq!(parse_sigma("auto").unwrap(), Bandwidth::Auto);
        assert_eq!(parse_sigma("0.5").unwrap(), Bandwidth::Fixed(0.5));
        assert!(parse_sigma("-1").is_err());
        assert!(parse_sigma("wide").is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let cli = Cli::parse_from(["tarclust", "cluster", "-i", "x.csv", "--k", "2", "--serial", "--sigma", "0.3"]);
        let Command::Cluster { pipeline, .. } = cli.command else { panic!() };
        let mut cfg: PipelineConfig = toml::from_str("k = 4\nrestarts = 5").unwrap();
        pipeline.apply(&mut cfg);
        assert_eq!(cfg.k, 2);
        assert_eq!(cfg.restarts, 5);
        assert!(!cfg.parallel);
        assert_eq!(cfg.sigma, Bandwidth::Fixed(0.3));
    }
}
