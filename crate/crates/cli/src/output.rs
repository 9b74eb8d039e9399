//! Report files. JSON is pretty-printed from ordered maps so repeated runs
//! produce identical bytes.

use std::path::{Path, PathBuf};

use serde::Serialize;
use tarclust_core::pipeline::ClusterReport;
use tarclust_core::simlab::ScenarioResult;

use crate::error::{CliError, CliResult};

pub struct OutDir(PathBuf);

impl OutDir {
    pub fn create(path: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(path).map_err(|source| CliError::Output {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self(path.to_path_buf()))
    }

    pub fn write(&self, name: &str, contents: &[u8]) -> CliResult<PathBuf> {
        let path = self.0.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        })?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

fn csv_bytes(rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    rows(&mut w).expect("in-memory CSV");
    w.into_inner().expect("in-memory CSV")
}

/// One row per (window, feature); one column per series. Series that were
/// not clustered in a window leave their cells empty.
pub fn features_csv(report: &ClusterReport) -> Vec<u8> {
    csv_bytes(|w| {
        let mut header = vec!["window".to_string(), "feature".to_string()];
        header.extend(report.labels.iter().cloned());
        w.write_record(&header)?;
        for win in &report.windows {
            let Some(m) = &win.features else { continue };
            for (f, name) in m.layout.names().iter().enumerate() {
                let mut row = vec![win.name.clone(), name.clone()];
                row.extend(report.labels.iter().map(|l| {
                    m.labels
                        .iter()
                        .position(|x| x == l)
                        .map_or(String::new(), |j| m.columns[j][f].to_string())
                }));
                w.write_record(&row)?;
            }
        }
        Ok(())
    })
}

/// One row per series per replicate.
pub fn replicates_csv(results: &[ScenarioResult], mechanisms: &[String]) -> Vec<u8> {
    csv_bytes(|w| {
        w.write_record(["replicate", "series", "mechanism", "cluster", "chosen_c", "exact_grouping_pct", "error"])?;
        for r in results {
            let chosen = r.chosen_c.map_or(String::new(), |c| c.to_string());
            let pct = r.exact_grouping_pct.map_or(String::new(), |p| p.to_string());
            let err = r.error.clone().unwrap_or_default();
            if r.labels.is_empty() {
                w.write_record([r.replicate.to_string(), String::new(), String::new(), String::new(), chosen, pct, err])?;
                continue;
            }
            for (i, label) in r.labels.iter().enumerate() {
                let cluster = r.assignments.get(i).map_or(String::new(), |c| c.to_string());
                w.write_record([
                    r.replicate.to_string(),
                    label.clone(),
                    mechanisms[r.true_labels[i]].clone(),
                    cluster,
                    chosen.clone(),
                    pct.clone(),
                    err.clone(),
                ])?;
            }
        }
        Ok(())
    })
}
