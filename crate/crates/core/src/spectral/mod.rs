//! Normalized spectral clustering with silhouette-based choice of the
//! cluster count.
//!
//! For each candidate `c` the leading `c` eigenvectors of
//! `D^{-1/2} A D^{-1/2}` are row-normalized and clustered with k-means.
//! Silhouettes are measured either in that embedding (the default) or on
//! the original feature distances, see [`SilhouetteSpace`].

mod affinity;
mod embed;
mod kmeans;
mod silhouette;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use affinity::{affinity_from_distances, AffinityMatrix};
pub use embed::{normalized_affinity, sorted_eigen, spectral_embed};
pub use kmeans::{canonical_labels, kmeans, KMeansResult};
pub use silhouette::{silhouette, Silhouette};

use crate::config::Bandwidth;
use crate::error::{Error, Result};
use crate::features::{pairwise_distances, FeatureMatrix};
use crate::rng::derive_seed;

/// Distances used to score a candidate partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SilhouetteSpace {
    /// Row-normalized spectral embedding of the candidate `c`.
    #[default]
    Embedding,
    /// Original feature vectors, shared by every candidate.
    Features,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralOptions {
    pub sigma: Bandwidth,
    pub restarts: usize,
    pub seed: u64,
    pub parallel: bool,
    pub silhouette_space: SilhouetteSpace,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            sigma: Bandwidth::Auto,
            restarts: 20,
            seed: 1,
            parallel: true,
            silhouette_space: SilhouetteSpace::Embedding,
        }
    }
}

/// Partition found for one candidate cluster count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub assignments: Vec<usize>,
    pub average_silhouette: f64,
    pub inertia: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    pub assignments: Vec<usize>,
    pub c: usize,
    pub silhouettes: Vec<f64>,
    pub average_silhouette: f64,
    pub silhouette_by_c: BTreeMap<usize, f64>,
    pub candidates: BTreeMap<usize, Candidate>,
    /// Row-normalized `n x c` embedding for the chosen `c`.
    pub embedding: Vec<Vec<f64>>,
    /// Leading eigenvalues of the normalized affinity, descending.
    pub eigenvalues: Vec<f64>,
    pub sigma: f64,
    pub seed: u64,
}

/// Cluster `distances` (feature space) for every `c` in `c_min..=c_max` and
/// keep the partition with the largest average silhouette, smallest `c` on
/// ties.
pub fn cluster_distances(
    distances: &[Vec<f64>],
    c_min: usize,
    c_max: usize,
    opts: &SpectralOptions,
) -> Result<ClusteringResult> {
    let n = distances.len();
    if c_min < 2 || c_min > c_max || c_max > n.saturating_sub(1) {
        return Err(Error::invalid(format!(
            "cluster range {c_min}..={c_max} must lie within 2..={} for {n} series",
            n.saturating_sub(1)
        )));
    }
    if opts.restarts == 0 {
        return Err(Error::invalid("restarts must be positive"));
    }
    let affinity = affinity_from_distances(distances, opts.sigma)?;
    let (values, vectors) = sorted_eigen(normalized_affinity(&affinity)?);
    let embed = |c: usize| -> Vec<Vec<f64>> {
        (0..n)
            .map(|r| {
                let row: Vec<f64> = (0..c).map(|k| vectors[(r, k)]).collect();
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    row.into_iter().map(|v| v / norm).collect()
                } else {
                    row
                }
            })
            .collect()
    };
    let score = |assignments: &[usize], points: &[Vec<f64>]| match opts.silhouette_space {
        SilhouetteSpace::Embedding => silhouette(assignments, &pairwise_distances(points)),
        SilhouetteSpace::Features => silhouette(assignments, distances),
    };
    let run = |c: usize| -> Result<(usize, Candidate)> {
        let seed = derive_seed(opts.seed, &[c as u64]);
        let points = embed(c);
        let km = kmeans(&points, c, opts.restarts, seed)?;
        let s = score(&km.assignments, &points)?;
        Ok((
            c,
            Candidate {
                assignments: km.assignments,
                average_silhouette: s.average,
                inertia: km.inertia,
                seed,
            },
        ))
    };
    let cs: Vec<usize> = (c_min..=c_max).collect();
    let results: Vec<Result<(usize, Candidate)>> = if opts.parallel {
        cs.par_iter().map(|&c| run(c)).collect()
    } else {
        cs.iter().map(|&c| run(c)).collect()
    };
    let candidates: BTreeMap<usize, Candidate> = results.into_iter().collect::<Result<_>>()?;
    let (&c, best) = candidates
        .iter()
        .fold(None::<(&usize, &Candidate)>, |acc, (c, cand)| match acc {
            Some((_, b)) if cand.average_silhouette <= b.average_silhouette => acc,
            _ => Some((c, cand)),
        })
        .expect("non-empty range");
    let embedding = embed(c);
    let s = score(&best.assignments, &embedding)?;
    Ok(ClusteringResult {
        assignments: best.assignments.clone(),
        c,
        silhouettes: s.values,
        average_silhouette: s.average,
        silhouette_by_c: candidates.iter().map(|(&c, x)| (c, x.average_silhouette)).collect(),
        embedding,
        eigenvalues: values.into_iter().take(c_max).collect(),
        sigma: affinity.sigma,
        seed: opts.seed,
        candidates,
    })
}

/// [`cluster_distances`] on the (scaled) feature columns of `matrix`.
pub fn select_cluster_count(
    matrix: &FeatureMatrix,
    c_min: usize,
    c_max: usize,
    opts: &SpectralOptions,
) -> Result<ClusteringResult> {
    cluster_distances(&matrix.distances(), c_min, c_max, opts)
}
