//! Pipeline configuration shared by the library entry points and the CLI.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ols::InformationCriterion;
use crate::series::StationarizeMode;
use crate::setar::SetarOptions;
use crate::spectral::{SilhouetteSpace, SpectralOptions};

/// Gaussian-kernel bandwidth of the affinity matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "BandwidthRepr", into = "BandwidthRepr")]
pub enum Bandwidth {
    /// Median of the nonzero pairwise distances.
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BandwidthRepr {
    Name(String),
    Value(f64),
}

impl TryFrom<BandwidthRepr> for Bandwidth {
    type Error = String;

    fn try_from(r: BandwidthRepr) -> std::result::Result<Self, String> {
        match r {
            BandwidthRepr::Name(s) if s == "auto" => Ok(Bandwidth::Auto),
            BandwidthRepr::Name(s) => Err(format!("sigma must be \"auto\" or a number, got `{s}`")),
            BandwidthRepr::Value(v) if v > 0.0 && v.is_finite() => Ok(Bandwidth::Fixed(v)),
            BandwidthRepr::Value(v) => Err(format!("sigma must be positive, got {v}")),
        }
    }
}

impl From<Bandwidth> for BandwidthRepr {
    fn from(b: Bandwidth) -> Self {
        match b {
            Bandwidth::Auto => BandwidthRepr::Name("auto".into()),
            Bandwidth::Fixed(v) => BandwidthRepr::Value(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetarMethod {
    /// Exhaustive least-squares search with a fixed regime count.
    Grid,
    /// Sequential threshold selection up to the regime count.
    #[default]
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub name: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindowSpec {
    /// Explicit, possibly overlapping, date ranges (inclusive).
    Periods { periods: Vec<Period> },
    /// Consecutive windows of `length` observations advancing by `step`.
    Rolling { length: usize, step: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Regimes in the SETAR fit.
    pub k: usize,
    /// Largest AR order per SETAR regime.
    pub p_max: usize,
    /// Largest order of the linear AR fit.
    pub p_ar_max: usize,
    pub d_max: usize,
    /// Correlation lag horizon.
    pub l: usize,
    pub significance_level: f64,
    pub criterion: InformationCriterion,
    pub setar_method: SetarMethod,
    pub select_regime_orders: bool,
    pub min_regime_fraction: f64,
    pub sigma: Bandwidth,
    pub silhouette_space: SilhouetteSpace,
    pub c_min: usize,
    pub c_max: usize,
    pub restarts: usize,
    pub bootstrap_reps: usize,
    /// Run the threshold nonlinearity test for every series in `cluster`.
    pub nonlinearity_test: bool,
    pub seed: u64,
    pub stationarize: StationarizeMode,
    pub standardize_features: bool,
    pub windows: Option<WindowSpec>,
    pub parallel: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            k: 3,
            p_max: 3,
            p_ar_max: 12,
            d_max: 2,
            l: 12,
            significance_level: 0.05,
            criterion: InformationCriterion::Bic,
            setar_method: SetarMethod::Sequential,
            select_regime_orders: true,
            min_regime_fraction: 0.03,
            sigma: Bandwidth::Auto,
            silhouette_space: SilhouetteSpace::Embedding,
            c_min: 2,
            c_max: 15,
            restarts: 20,
            bootstrap_reps: 500,
            nonlinearity_test: true,
            seed: 1,
            stationarize: StationarizeMode::LogDiff,
            standardize_features: false,
            windows: None,
            parallel: true,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("k", self.k),
            ("p_max", self.p_max),
            ("p_ar_max", self.p_ar_max),
            ("d_max", self.d_max),
            ("l", self.l),
            ("restarts", self.restarts),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::invalid(format!("{name} must be positive")));
        }
        if !(self.significance_level > 0.0 && self.significance_level < 1.0) {
            return Err(Error::invalid("significance_level must lie in (0, 1)"));
        }
        if self.c_min < 2 || self.c_min > self.c_max {
            return Err(Error::invalid(format!(
                "cluster range [{}, {}] must satisfy 2 <= c_min <= c_max",
                self.c_min, self.c_max
            )));
        }
        if self.bootstrap_reps < 100 {
            return Err(Error::invalid("bootstrap_reps must be at least 100"));
        }
        if !(0.0..0.5).contains(&self.min_regime_fraction) {
            return Err(Error::invalid("min_regime_fraction must lie in [0, 0.5)"));
        }
        match &self.windows {
            Some(WindowSpec::Rolling { length, step }) if *length == 0 || *step == 0 => {
                return Err(Error::invalid("rolling window length and step must be positive"))
            }
            Some(WindowSpec::Periods { periods }) => {
                if periods.is_empty() {
                    return Err(Error::invalid("period list is empty"));
                }
                if let Some(p) = periods.iter().find(|p| p.start > p.end) {
                    return Err(Error::invalid(format!("period `{}` ends before it starts", p.name)));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn setar_options(&self) -> SetarOptions {
        SetarOptions {
            p_max: self.p_max,
            d_max: self.d_max,
            criterion: self.criterion,
            select_orders: self.select_regime_orders,
            min_fraction: self.min_regime_fraction,
            parallel: self.parallel,
        }
    }

    pub fn spectral_options(&self) -> SpectralOptions {
        SpectralOptions {
            sigma: self.sigma,
            restarts: self.restarts,
            seed: self.seed,
            parallel: self.parallel,
            silhouette_space: self.silhouette_space,
        }
    }

    /// Shortest stationarized series accepted for feature extraction.
    pub fn min_series_len(&self) -> usize {
        10 * self.l.max(self.p_ar_max).max(self.p_max + self.d_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_round_trip_with_windows() {
        let text = r#"
            k = 2
            sigma = 0.5
            seed = 9

            [windows]
            kind = "periods"
            periods = [
                { name = "early", start = "1990-01-01", end = "2007-12-01" },
                { name = "late", start = "2010-01-01", end = "2014-12-01" },
            ]
        "#;
        let cfg: PipelineConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.k, 2);
        assert_eq!(cfg.sigma, Bandwidth::Fixed(0.5));
        assert_eq!(cfg.p_ar_max, 12);
        let back: PipelineConfig = toml::from_str(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(toml::from_str::<PipelineConfig>("sigma = \"wide\"").is_err());
        assert!(toml::from_str::<PipelineConfig>("sigma = -1.0").is_err());
        assert!(toml::from_str::<PipelineConfig>("bogus = 1").is_err());
        let cfg = PipelineConfig {
            c_min: 1,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
