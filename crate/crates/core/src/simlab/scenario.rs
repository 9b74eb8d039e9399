//! Replicated recovery experiments: simulate a labelled panel, cluster it and
//! score the partition against the generating mechanisms.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dgm::{reference_dgm, simulate, DgmSpec};
use super::metrics::{adjusted_rand_index, exact_grouping};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::features::{assemble_matrix, extract_features};
use crate::rng::derive_seed;
use crate::series::StationarizeMode;
use crate::spectral::select_cluster_count;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Reference mechanisms by name (`ser01` .. `ser10`).
    pub dgms: Vec<String>,
    /// Additional user-defined mechanisms.
    pub custom: Vec<DgmSpec>,
    pub n_per_dgm: usize,
    pub length: usize,
    pub replicates: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub pipeline: PipelineConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            dgms: (1..=10).map(|i| format!("ser{i:02}")).collect(),
            custom: Vec::new(),
            n_per_dgm: 10,
            length: 400,
            replicates: 30,
            burn_in: 200,
            seed: 1,
            pipeline: PipelineConfig {
                stationarize: StationarizeMode::Auto,
                ..PipelineConfig::default()
            },
        }
    }
}

impl ScenarioConfig {
    /// Resolve names and custom specs into the ordered list of mechanisms.
    pub fn specs(&self) -> Result<Vec<DgmSpec>> {
        let mut specs = self
            .dgms
            .iter()
            .map(|n| reference_dgm(n))
            .collect::<Result<Vec<_>>>()?;
        for c in &self.custom {
            c.validate()?;
            specs.push(c.clone());
        }
        let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("mechanism `{}` listed twice", w[0])));
        }
        Ok(specs)
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        let specs = self.specs()?;
        if specs.len() < 2 {
            return Err(Error::invalid("a scenario needs at least two mechanisms"));
        }
        if self.n_per_dgm == 0 || self.length == 0 {
            return Err(Error::invalid("n_per_dgm and length must be positive"));
        }
        if self.pipeline.stationarize == StationarizeMode::LogDiff {
            return Err(Error::invalid(
                "simulated series take negative values; set pipeline.stationarize to \"auto\", \"diff\" or \"none\"",
            ));
        }
        if let Some(s) = specs.iter().find(|s| self.burn_in < s.max_lag()) {
            return Err(Error::invalid(format!(
                "burn_in {} is shorter than the largest lag of `{}`",
                self.burn_in, s.name
            )));
        }
        if specs.len() * self.n_per_dgm < 3 {
            return Err(Error::invalid("a scenario needs at least three series"));
        }
        Ok(())
    }
}

/// Outcome of one replicate. Failed replicates carry `error` and no metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub replicate: usize,
    pub labels: Vec<String>,
    /// Index of the generating mechanism for each series.
    pub true_labels: Vec<usize>,
    pub assignments: Vec<usize>,
    pub chosen_c: Option<usize>,
    pub silhouette_by_c: BTreeMap<usize, f64>,
    pub exact_grouping_pct: Option<f64>,
    /// Exact grouping of the partition found with `c` fixed at the number of
    /// mechanisms, when that count is among the candidates.
    pub exact_grouping_at_true_c: Option<f64>,
    pub ari: Option<f64>,
    pub error: Option<String>,
}

/// Simulate and cluster replicate `replicate` of `config`.
pub fn run_replicate(config: &ScenarioConfig, replicate: usize) -> Result<ScenarioResult> {
    let specs = config.specs()?;
    let mut labels = Vec::new();
    let mut true_labels = Vec::new();
    let mut jobs = Vec::new();
    for (g, spec) in specs.iter().enumerate() {
        for s in 0..config.n_per_dgm {
            labels.push(format!("{}_{:02}", spec.name, s + 1));
            true_labels.push(g);
            jobs.push((spec, derive_seed(config.seed, &[replicate as u64, g as u64, s as u64])));
        }
    }
    let pipeline = &config.pipeline;
    let one = |(i, (spec, seed)): (usize, &(&DgmSpec, u64))| {
        let series = simulate(spec, config.length, config.burn_in, *seed)?.with_label(labels[i].clone());
        extract_features(&series, pipeline)
    };
    let vectors = if pipeline.parallel {
        jobs.par_iter().enumerate().map(one).collect::<Result<Vec<_>>>()?
    } else {
        jobs.iter().enumerate().map(one).collect::<Result<Vec<_>>>()?
    };
    let matrix = assemble_matrix(&vectors, pipeline.standardize_features)?;
    let n = matrix.n();
    let c_max = pipeline.c_max.min(n - 1);
    let clustering = select_cluster_count(&matrix, pipeline.c_min.min(c_max), c_max, &pipeline.spectral_options())?;
    let at_true = clustering
        .candidates
        .get(&specs.len())
        .map(|c| exact_grouping(&true_labels, &c.assignments))
        .transpose()?;
    Ok(ScenarioResult {
        replicate,
        exact_grouping_pct: Some(exact_grouping(&true_labels, &clustering.assignments)?),
        exact_grouping_at_true_c: at_true,
        ari: Some(adjusted_rand_index(&true_labels, &clustering.assignments)?),
        labels,
        true_labels,
        assignments: clustering.assignments,
        chosen_c: Some(clustering.c),
        silhouette_by_c: clustering.silhouette_by_c,
        error: None,
    })
}

/// Run every replicate. Configuration errors are returned; failures inside a
/// replicate are recorded in its result.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Vec<ScenarioResult>> {
    config.validate()?;
    Ok((0..config.replicates)
        .map(|r| {
            run_replicate(config, r).unwrap_or_else(|e| {
                log::warn!("replicate {r} failed: {e}");
                ScenarioResult {
                    replicate: r,
                    labels: Vec::new(),
                    true_labels: Vec::new(),
                    assignments: Vec::new(),
                    chosen_c: None,
                    silhouette_by_c: BTreeMap::new(),
                    exact_grouping_pct: None,
                    exact_grouping_at_true_c: None,
                    ari: None,
                    error: Some(e.to_string()),
                }
            })
        })
        .collect())
}

/// Five-number summary of the average silhouette at one candidate `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub replicates: usize,
    pub failed: usize,
    pub mechanisms: usize,
    pub series_per_replicate: usize,
    /// Mean exact grouping over successful replicates.
    pub exact_grouping_pct: Option<f64>,
    pub exact_grouping_at_true_c: Option<f64>,
    pub mean_ari: Option<f64>,
    /// How often each `c` was chosen.
    pub chosen_c: BTreeMap<usize, usize>,
    pub true_c_chosen: usize,
    pub silhouette_by_c: BTreeMap<usize, CurveStats>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

pub fn summarize(config: &ScenarioConfig, results: &[ScenarioResult]) -> ScenarioSummary {
    let mechanisms = config.dgms.len() + config.custom.len();
    let ok: Vec<&ScenarioResult> = results.iter().filter(|r| r.error.is_none()).collect();
    let mut chosen_c = BTreeMap::new();
    for r in &ok {
        if let Some(c) = r.chosen_c {
            *chosen_c.entry(c).or_insert(0) += 1;
        }
    }
    let mut curves: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in &ok {
        for (&c, &s) in &r.silhouette_by_c {
            curves.entry(c).or_default().push(s);
        }
    }
    let silhouette_by_c = curves
        .into_iter()
        .map(|(c, mut v)| {
            v.sort_by(f64::total_cmp);
            let stats = CurveStats {
                min: v[0],
                q1: quantile(&v, 0.25),
                median: quantile(&v, 0.5),
                q3: quantile(&v, 0.75),
                max: v[v.len() - 1],
                mean: v.iter().sum::<f64>() / v.len() as f64,
            };
            (c, stats)
        })
        .collect();
    ScenarioSummary {
        replicates: results.len(),
        failed: results.len() - ok.len(),
        mechanisms,
        series_per_replicate: mechanisms * config.n_per_dgm,
        exact_grouping_pct: mean(ok.iter().filter_map(|r| r.exact_grouping_pct)),
        exact_grouping_at_true_c: mean(ok.iter().filter_map(|r| r.exact_grouping_at_true_c)),
        mean_ari: mean(ok.iter().filter_map(|r| r.ari)),
        true_c_chosen: chosen_c.get(&mechanisms).copied().unwrap_or(0),
        chosen_c,
        silhouette_by_c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simlab::{DgmKind, DgmSpec};

    fn white_noise() -> DgmSpec {
        DgmSpec::linear("noise", DgmKind::Arma, &[], &[])
    }

    fn small(dgms: &[&str], custom: Vec<DgmSpec>) -> ScenarioConfig {
        ScenarioConfig {
            dgms: dgms.iter().map(|s| s.to_string()).collect(),
            custom,
            n_per_dgm: 5,
            length: 400,
            replicates: 1,
            pipeline: PipelineConfig {
                stationarize: StationarizeMode::Auto,
                bootstrap_reps: 100,
                c_max: 6,
                ..PipelineConfig::default()
            },
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn noise_versus_seasonal_is_separated() {
        let cfg = small(&["ser01"], vec![white_noise()]);
        let res = run_scenario(&cfg).unwrap();
        assert_eq!(res.len(), 1);
        assert_eq!(res[0].error, None);
        assert_eq!(res[0].exact_grouping_pct, Some(100.0));
        assert_eq!(res[0].chosen_c, Some(2));
        let summary = summarize(&cfg, &res);
        assert_eq!(summary.true_c_chosen, 1);
        assert_eq!(summary.series_per_replicate, 10);
    }

    #[test]
    fn zero_replicates_is_empty() {
        let cfg = ScenarioConfig {
            replicates: 0,
            ..small(&["ser01", "ser02"], vec![])
        };
        assert!(run_scenario(&cfg).unwrap().is_empty());
    }

    #[test]
    fn deterministic() {
        let cfg = small(&["ser03", "ser07"], vec![]);
        assert_eq!(run_replicate(&cfg, 0).unwrap(), run_replicate(&cfg, 0).unwrap());
    }

    #[test]
    fn bad_configs_are_rejected() {
        assert!(run_scenario(&small(&["ser99", "ser01"], vec![])).is_err());
        assert!(run_scenario(&small(&["ser01"], vec![])).is_err());
        assert!(run_scenario(&small(&["ser01", "ser01"], vec![])).is_err());
        let mut cfg = small(&["ser01", "ser02"], vec![]);
        cfg.pipeline.stationarize = StationarizeMode::LogDiff;
        assert!(run_scenario(&cfg).is_err());
    }

    #[test]
    fn replicate_failures_are_recorded() {
        // too short for the feature pipeline
        let cfg = ScenarioConfig {
            length: 50,
            ..small(&["ser01", "ser03"], vec![])
        };
        let res = run_scenario(&cfg).unwrap();
        assert!(res[0].error.is_some());
        assert_eq!(summarize(&cfg, &res).failed, 1);
    }
}
