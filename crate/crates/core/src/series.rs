//! Univariate time-series container and stationarizing transforms.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::unit_root::{adf_test, schwert_lags};

/// An ordered sequence of finite observations, optionally labelled and dated.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    label: Option<String>,
    timestamps: Option<Vec<NaiveDate>>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("time series must hold at least one value"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value {} at position {pos}",
                values[pos]
            )));
        }
        Ok(Self {
            values,
            label: None,
            timestamps: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Attach dates; they must be strictly increasing and match the length.
    pub fn with_timestamps(mut self, timestamps: Vec<NaiveDate>) -> Result<Self> {
        if timestamps.len() != self.values.len() {
            return Err(Error::invalid(format!(
                "{} timestamps for {} values",
                timestamps.len(),
                self.values.len()
            )));
        }
        if let Some(w) = timestamps.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "timestamps not strictly increasing at {}",
                w[1]
            )));
        }
        self.timestamps = Some(timestamps);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Label, or `"<unnamed>"` when none was set.
    pub fn display_label(&self) -> &str {
        self.label.as_deref().unwrap_or("<unnamed>")
    }

    pub fn timestamps(&self) -> Option<&[NaiveDate]> {
        self.timestamps.as_deref()
    }

    /// Observations with dates in `[start, end]`. Undated series are returned whole.
    pub fn slice_dates(&self, start: NaiveDate, end: NaiveDate) -> Option<TimeSeries> {
        let stamps = self.timestamps.as_ref()?;
        let lo = stamps.partition_point(|d| *d < start);
        let hi = stamps.partition_point(|d| *d <= end);
        if lo >= hi {
            return None;
        }
        Some(TimeSeries {
            values: self.values[lo..hi].to_vec(),
            label: self.label.clone(),
            timestamps: Some(stamps[lo..hi].to_vec()),
        })
    }

    /// Observations at positions `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Option<TimeSeries> {
        if start >= end || end > self.values.len() {
            return None;
        }
        Some(TimeSeries {
            values: self.values[start..end].to_vec(),
            label: self.label.clone(),
            timestamps: self.timestamps.as_ref().map(|t| t[start..end].to_vec()),
        })
    }
}

/// Transform applied before feature extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StationarizeMode {
    /// First differences of natural logs; requires strictly positive data.
    #[default]
    LogDiff,
    Diff,
    /// Difference (at most twice) while an augmented Dickey-Fuller test
    /// cannot reject a unit root at 5%.
    Auto,
    None,
}

pub fn stationarize(series: &TimeSeries, mode: StationarizeMode) -> Result<TimeSeries> {
    let v = series.values();
    let diffed: Vec<f64> = match mode {
        StationarizeMode::None => return Ok(series.clone()),
        StationarizeMode::Auto => {
            let mut current = series.clone();
            for _ in 0..2 {
                let lags = schwert_lags(current.len());
                if adf_test(current.values(), lags)?.stationary() {
                    break;
                }
                current = stationarize(&current, StationarizeMode::Diff)?;
            }
            return Ok(current);
        }
        StationarizeMode::Diff => v.windows(2).map(|w| w[1] - w[0]).collect(),
        StationarizeMode::LogDiff => {
            if let Some(pos) = v.iter().position(|&x| x <= 0.0) {
                return Err(Error::invalid(format!(
                    "log-difference needs positive values; `{}` has {} at position {pos}",
                    series.display_label(),
                    v[pos]
                )));
            }
            v.windows(2).map(|w| w[1].ln() - w[0].ln()).collect()
        }
    };
    if diffed.is_empty() {
        return Err(Error::invalid("differencing needs at least two observations"));
    }
    let mut out = TimeSeries::new(diffed)?;
    out.label = series.label.clone();
    out.timestamps = series.timestamps.as_ref().map(|t| t[1..].to_vec());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(TimeSeries::new(vec![]).is_err());
        assert!(TimeSeries::new(vec![1.0, f64::NAN]).is_err());
        assert!(TimeSeries::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn timestamps_must_increase() {
        let d = |m| NaiveDate::from_ymd_opt(2000, m, 1).unwrap();
        let s = TimeSeries::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(s.clone().with_timestamps(vec![d(1), d(2)]).is_err());
        assert!(s.clone().with_timestamps(vec![d(1), d(3), d(2)]).is_err());
        assert!(s.with_timestamps(vec![d(1), d(2), d(3)]).is_ok());
    }

    #[test]
    fn log_diff_of_constant_is_zero() {
        let s = TimeSeries::new(vec![4.2; 10]).unwrap();
        let out = stationarize(&s, StationarizeMode::LogDiff).unwrap();
        assert_eq!(out.len(), 9);
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn log_diff_of_exponentials() {
        let e = std::f64::consts::E;
        let s = TimeSeries::new(vec![1.0, e, e * e]).unwrap();
        let out = stationarize(&s, StationarizeMode::LogDiff).unwrap();
        for v in out.values() {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn log_diff_rejects_nonpositive() {
        let s = TimeSeries::new(vec![1.0, 0.0, 2.0]).unwrap();
        assert!(matches!(
            stationarize(&s, StationarizeMode::LogDiff),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn none_is_identity_and_diff_shortens() {
        let s = TimeSeries::new(vec![1.0, 3.0, 6.0]).unwrap().with_label("x");
        assert_eq!(stationarize(&s, StationarizeMode::None).unwrap(), s);
        let d = stationarize(&s, StationarizeMode::Diff).unwrap();
        assert_eq!(d.values(), &[2.0, 3.0]);
        assert_eq!(d.label(), Some("x"));
    }

    #[test]
    fn slice_by_dates() {
        let dates: Vec<_> = (1..=6)
            .map(|m| NaiveDate::from_ymd_opt(2001, m, 1).unwrap())
            .collect();
        let s = TimeSeries::new((0..6).map(f64::from).collect())
            .unwrap()
            .with_timestamps(dates.clone())
            .unwrap();
        let w = s.slice_dates(dates[1], dates[3]).unwrap();
        assert_eq!(w.values(), &[1.0, 2.0, 3.0]);
        assert!(s
            .slice_dates(
                NaiveDate::from_ymd_opt(1999, 1, 1).unwrap(),
                NaiveDate::from_ymd_opt(1999, 6, 1).unwrap()
            )
            .is_none());
    }

    proptest::proptest! {
        #[test]
        fn log_diff_round_trips(values in proptest::collection::vec(0.01f64..1e4, 2..200)) {
            let s = TimeSeries::new(values.clone()).unwrap();
            let r = stationarize(&s, StationarizeMode::LogDiff).unwrap();
            let mut acc = values[0].ln();
            for (i, d) in r.values().iter().enumerate() {
                acc += d;
                let rebuilt = acc.exp();
                proptest::prop_assert!((rebuilt - values[i + 1]).abs() <= 1e-9 * values[i + 1].max(1.0));
            }
        }
    }
}
