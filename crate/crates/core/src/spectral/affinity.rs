use serde::{Deserialize, Serialize};

use crate::config::Bandwidth;
use crate::error::{Error, Result};

/// Gaussian-kernel affinities with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinityMatrix {
    pub entries: Vec<Vec<f64>>,
    pub sigma: f64,
}

impl AffinityMatrix {
    pub fn n(&self) -> usize {
        self.entries.len()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// `A_ij = exp(-d_ij^2 / (2 sigma^2))` for `i != j`, `A_ii = 0`, from a
/// symmetric distance matrix.
pub fn affinity_from_distances(distances: &[Vec<f64>], sigma: Bandwidth) -> Result<AffinityMatrix> {
    let n = distances.len();
    if n < 2 {
        return Err(Error::invalid("affinity needs at least two points"));
    }
    let sigma = match sigma {
        Bandwidth::Fixed(s) => s,
        Bandwidth::Auto => {
            let nonzero: Vec<f64> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| distances[i][j])
                .filter(|&d| d > 0.0)
                .collect();
            if nonzero.is_empty() {
                return Err(Error::DegenerateInput(
                    "all pairwise distances are zero".into(),
                ));
            }
            median(nonzero)
        }
    };
    let denom = 2.0 * sigma * sigma;
    let entries = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        (-distances[i][j].powi(2) / denom).exp()
                    }
                })
                .collect()
        })
        .collect();
    Ok(AffinityMatrix { entries, sigma })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_evaluated_triangle() {
        let s2 = 2f64.sqrt();
        let d = vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, s2],
            vec![1.0, s2, 0.0],
        ];
        let a = affinity_from_distances(&d, Bandwidth::Fixed(1.0)).unwrap();
        let h = (-0.5f64).exp();
        assert!((a.entries[0][1] - h).abs() < 1e-15);
        assert!((a.entries[0][2] - h).abs() < 1e-15);
        assert!((a.entries[1][2] - (-1.0f64).exp()).abs() < 1e-15);
        assert!((0..3).all(|i| a.entries[i][i] == 0.0));
    }

    #[test]
    fn identical_points_have_unit_affinity() {
        let d = vec![vec![0.0, 0.0, 3.0], vec![0.0, 0.0, 3.0], vec![3.0, 3.0, 0.0]];
        let a = affinity_from_distances(&d, Bandwidth::Auto).unwrap();
        assert_eq!(a.entries[0][1], 1.0);
        assert_eq!(a.sigma, 3.0);
        let far = affinity_from_distances(&[vec![0.0, 1e6], vec![1e6, 0.0]], Bandwidth::Fixed(1.0))
            .unwrap();
        assert_eq!(far.entries[0][1], 0.0);
    }

    #[test]
    fn all_zero_distances_are_degenerate() {
        let d = vec![vec![0.0; 3]; 3];
        assert!(matches!(
            affinity_from_distances(&d, Bandwidth::Auto),
            Err(Error::DegenerateInput(_))
        ));
    }
}
