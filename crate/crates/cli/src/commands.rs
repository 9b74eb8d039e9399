//! Implementation of the subcommands.

use std::path::Path;

use rayon::prelude::*;
use serde::{de::DeserializeOwned, Serialize};
use tarclust_core::pipeline::{ClusterReport, WindowReport};
use tarclust_core::rng::derive_seed;
use tarclust_core::simlab::{run_scenario, summarize, ScenarioConfig, ScenarioSummary};
use tarclust_core::{cluster_panel, hansen_test, ingest_csv, stationarize, PanelDataset, PipelineConfig};

use crate::args::{Command, InputArgs, PipelineArgs, ScenarioArgs};
use crate::error::{CliError, CliResult};
use crate::output::{features_csv, replicates_csv, OutDir};
use crate::svg;

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Cluster { input, pipeline, out } => cluster(&input, &pipeline, &out),
        Command::Features { input, pipeline, out } => features(&input, &pipeline, &out),
        Command::Simulate { scenario, pipeline, out } => simulate(&scenario, &pipeline, &out),
        Command::TestNonlinearity { input, pipeline, out } => nonlinearity(&input, &pipeline, out.as_deref()),
    }
}

fn read_toml<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn pipeline_config(args: &PipelineArgs) -> CliResult<PipelineConfig> {
    let mut cfg = match &args.config {
        Some(p) => read_toml(p)?,
        None => PipelineConfig::default(),
    };
    args.apply(&mut cfg);
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

fn load_panel(input: &InputArgs) -> CliResult<PanelDataset> {
    ingest_csv(&input.input, &input.date_column, input.columns.as_deref()).map_err(CliError::Ingest)
}

fn cluster_report(input: &InputArgs, cfg: &PipelineConfig) -> CliResult<ClusterReport> {
    let panel = load_panel(input)?;
    log::info!("loaded {} series x {} dates from {}", panel.series.len(), panel.dates.len(), panel.source);
    cluster_panel(&panel, cfg).map_err(CliError::from_run)
}

/// Compact per-window view of a cluster report.
#[derive(Serialize)]
struct WindowSummary<'a> {
    name: &'a str,
    skipped: Option<&'a str>,
    c: Option<usize>,
    average_silhouette: Option<f64>,
    membership: &'a std::collections::BTreeMap<String, usize>,
    failed: Vec<&'a str>,
}

impl<'a> From<&'a WindowReport> for WindowSummary<'a> {
    fn from(w: &'a WindowReport) -> Self {
        Self {
            name: &w.name,
            skipped: w.skipped.as_deref(),
            c: w.clustering.as_ref().map(|c| c.c),
            average_silhouette: w.clustering.as_ref().map(|c| c.average_silhouette),
            membership: &w.membership,
            failed: w.failures.iter().map(|f| f.label.as_str()).collect(),
        }
    }
}

fn cluster(input: &InputArgs, args: &PipelineArgs, out: &Path) -> CliResult<()> {
    let cfg = pipeline_config(args)?;
    let report = cluster_report(input, &cfg)?;
    let dir = OutDir::create(out)?;
    dir.write_json("report.json", &report)?;
    let windows: Vec<WindowSummary> = report.windows.iter().map(WindowSummary::from).collect();
    dir.write_json("summary.json", &serde_json::json!({ "source": report.source, "windows": windows }))?;
    dir.write("features.csv", &features_csv(&report))?;
    dir.write("silhouette.svg", svg::silhouette_curves(&report).as_bytes())?;
    dir.write("clusters.svg", svg::membership_timeline(&report).as_bytes())?;
    for w in &report.windows {
        match (&w.clustering, &w.skipped) {
            (Some(c), _) => println!(
                "{}: c = {}, average silhouette = {:.3}, {} series clustered, {} failed",
                w.name,
                c.c,
                c.average_silhouette,
                w.clustered.len(),
                w.failures.len()
            ),
            (None, Some(reason)) => println!("{}: skipped ({reason})", w.name),
            (None, None) => {}
        }
    }
    Ok(())
}

fn features(input: &InputArgs, args: &PipelineArgs, out: &Path) -> CliResult<()> {
    let cfg = PipelineConfig {
        nonlinearity_test: false,
        ..pipeline_config(args)?
    };
    let report = cluster_report(input, &cfg)?;
    let dir = OutDir::create(out)?;
    let path = dir.write("features.csv", &features_csv(&report))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn scenario_config(scenario: &ScenarioArgs, args: &PipelineArgs) -> CliResult<ScenarioConfig> {
    let mut cfg = match &args.config {
        Some(p) => read_toml(p)?,
        None => ScenarioConfig::default(),
    };
    args.apply(&mut cfg.pipeline);
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(v) = scenario.replicates {
        cfg.replicates = v;
    }
    if let Some(v) = scenario.n_per_dgm {
        cfg.n_per_dgm = v;
    }
    if let Some(v) = scenario.length {
        cfg.length = v;
    }
    if let Some(v) = &scenario.dgms {
        cfg.dgms = v.clone();
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

#[derive(Serialize)]
struct SimulationSummary<'a> {
    summary: &'a ScenarioSummary,
    config: &'a ScenarioConfig,
}

fn simulate(scenario: &ScenarioArgs, args: &PipelineArgs, out: &Path) -> CliResult<()> {
    let cfg = scenario_config(scenario, args)?;
    let mechanisms: Vec<String> = cfg
        .specs()
        .map_err(|e| CliError::Config(e.to_string()))?
        .into_iter()
        .map(|s| s.name)
        .collect();
    let results = run_scenario(&cfg).map_err(CliError::from_run)?;
    let summary = summarize(&cfg, &results);
    let dir = OutDir::create(out)?;
    dir.write_json("summary.json", &SimulationSummary { summary: &summary, config: &cfg })?;
    dir.write_json("replicates.json", &results)?;
    dir.write("replicates.csv", &replicates_csv(&results, &mechanisms))?;
    dir.write("silhouette.svg", svg::silhouette_boxes(&summary).as_bytes())?;
    dir.write("grouping.svg", svg::grouping_bars(&results).as_bytes())?;
    let pct = |v: Option<f64>| v.map_or("n/a".to_string(), |p| format!("{p:.1}%"));
    println!(
        "{} replicates ({} failed): exact grouping {}, at true c {}, true c chosen in {}",
        summary.replicates,
        summary.failed,
        pct(summary.exact_grouping_pct),
        pct(summary.exact_grouping_at_true_c),
        summary.true_c_chosen
    );
    if summary.failed == summary.replicates {
        return Err(CliError::Estimation(tarclust_core::Error::EstimationFailure(
            "every replicate failed".into(),
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct NonlinearityRow {
    label: String,
    /// `p_values[j - 1]` tests `j` against `j + 1` regimes.
    p_values: Vec<Option<f64>>,
    statistics: Vec<Option<f64>>,
    errors: Vec<String>,
}

fn nonlinearity(input: &InputArgs, args: &PipelineArgs, out: Option<&Path>) -> CliResult<()> {
    let cfg = pipeline_config(args)?;
    let panel = load_panel(input)?;
    let opts = cfg.setar_options();
    let test = |(i, series): (usize, &tarclust_core::TimeSeries)| {
        let mut row = NonlinearityRow {
            label: series.display_label().to_string(),
            p_values: Vec::new(),
            statistics: Vec::new(),
            errors: Vec::new(),
        };
        let s = match stationarize(series, cfg.stationarize) {
            Ok(s) => s,
            Err(e) => {
                row.errors.push(e.to_string());
                return row;
            }
        };
        for j in 1..cfg.k {
            let seed = derive_seed(cfg.seed, &[i as u64, j as u64]);
            match hansen_test(&s, j, j + 1, cfg.bootstrap_reps, seed, &opts) {
                Ok(t) => {
                    row.p_values.push(Some(t.p_value));
                    row.statistics.push(Some(t.statistic));
                }
                Err(e) => {
                    row.p_values.push(None);
                    row.statistics.push(None);
                    row.errors.push(format!("{j} vs {}: {e}", j + 1));
                }
            }
        }
        row
    };
    let rows: Vec<NonlinearityRow> = if cfg.parallel {
        panel.series.par_iter().enumerate().map(test).collect()
    } else {
        panel.series.iter().enumerate().map(test).collect()
    };
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(6).max(6);
    let header: Vec<String> = (1..cfg.k).map(|j| format!("{j} vs {}", j + 1)).collect();
    println!("{:width$}  {}", "series", header.iter().map(|h| format!("{h:>8}")).collect::<String>());
    for r in &rows {
        let cells: String = r
            .p_values
            .iter()
            .map(|p| p.map_or(format!("{:>8}", "-"), |p| format!("{p:>8.3}")))
            .collect();
        println!("{:width$}  {cells}", r.label);
    }
    if let Some(out) = out {
        let dir = OutDir::create(out)?;
        dir.write_json(
            "nonlinearity.json",
            &serde_json::json!({
                "source": panel.source,
                "bootstrap_reps": cfg.bootstrap_reps,
                "seed": cfg.seed,
                "series": rows,
            }),
        )?;
    }
    Ok(())
}
