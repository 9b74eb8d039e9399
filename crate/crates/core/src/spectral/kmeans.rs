use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::stream;

const MAX_ITER: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Cluster ids in order of first appearance (`assignments[0] == 0`).
    pub assignments: Vec<usize>,
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus<R: Rng>(points: &[Vec<f64>], c: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[chosen[0]])).collect();
    while chosen.len() < c {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total weight")
        } else {
            // remaining points coincide with chosen centres
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        chosen.push(next);
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &points[next]));
        }
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}

fn lloyd(points: &[Vec<f64>], mut centres: Vec<Vec<f64>>) -> (Vec<usize>, f64) {
    let n = points.len();
    let c = centres.len();
    let dim = points[0].len();
    let mut assign = vec![usize::MAX; n];
    for _ in 0..MAX_ITER {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = (0, f64::INFINITY);
            for (k, centre) in centres.iter().enumerate() {
                let d = sq_dist(p, centre);
                if d < best.1 {
                    best = (k, d);
                }
            }
            if assign[i] != best.0 {
                assign[i] = best.0;
                changed = true;
            }
        }
        // refill empty clusters with the point farthest from its centre
        let mut counts = vec![0usize; c];
        for &a in &assign {
            counts[a] += 1;
        }
        for k in 0..c {
            if counts[k] == 0 {
                let far = (0..n)
                    .filter(|&i| counts[assign[i]] > 1)
                    .max_by(|&a, &b| {
                        sq_dist(&points[a], &centres[assign[a]])
                            .total_cmp(&sq_dist(&points[b], &centres[assign[b]]))
                            .then(b.cmp(&a))
                    });
                if let Some(i) = far {
                    counts[assign[i]] -= 1;
                    assign[i] = k;
                    counts[k] = 1;
                    changed = true;
                }
            }
        }
        for (k, centre) in centres.iter_mut().enumerate() {
            let mut sum = vec![0.0; dim];
            let mut m = 0usize;
            for (p, _) in points.iter().zip(&assign).filter(|(_, &a)| a == k) {
                for (s, v) in sum.iter_mut().zip(p) {
                    *s += v;
                }
                m += 1;
            }
            if m > 0 {
                *centre = sum.into_iter().map(|s| s / m as f64).collect();
            }
        }
        if !changed {
            break;
        }
    }
    let inertia = points
        .iter()
        .zip(&assign)
        .map(|(p, &a)| sq_dist(p, &centres[a]))
        .sum();
    (assign, inertia)
}

/// Relabel cluster ids in order of first appearance.
pub fn canonical_labels(assign: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    assign
        .iter()
        .map(|&a| {
            let next = map.len();
            *map.entry(a).or_insert(next)
        })
        .collect()
}

/// Best of `restarts` k-means++ initialised Lloyd runs, by inertia.
pub fn kmeans(points: &[Vec<f64>], c: usize, restarts: usize, seed: u64) -> Result<KMeansResult> {
    let n = points.len();
    if c == 0 || c > n {
        return Err(Error::invalid(format!("cannot form {c} clusters from {n} points")));
    }
    if restarts == 0 {
        return Err(Error::invalid("restarts must be positive"));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for r in 0..restarts {
        let mut rng = stream(seed, &[r as u64]);
        let centres = plus_plus(points, c, &mut rng);
        let (assign, inertia) = lloyd(points, centres);
        if best.as_ref().is_none_or(|b| inertia < b.1) {
            best = Some((assign, inertia));
        }
    }
    let (assign, inertia) = best.expect("restarts > 0");
    Ok(KMeansResult {
        assignments: canonical_labels(&assign),
        inertia,
    })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    use super::*;

    #[test]
    fn one_cluster_and_one_per_point() {
        let pts = vec![vec![0.0, 1.0], vec![2.0, 3.0], vec![5.0, -1.0]];
        let one = kmeans(&pts, 1, 3, 0).unwrap();
        assert_eq!(one.assignments, vec![0, 0, 0]);
        let all = kmeans(&pts, 3, 3, 0).unwrap();
        assert_eq!(all.assignments, vec![0, 1, 2]);
        assert_eq!(all.inertia, 0.0);
    }

    #[test]
    fn separated_blobs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let mut pts = Vec::new();
        for centre in [0.0, 10.0] {
            for _ in 0..15 {
                pts.push(vec![centre + noise.sample(&mut rng), noise.sample(&mut rng)]);
            }
        }
        let r = kmeans(&pts, 2, 5, 11).unwrap();
        assert!(r.assignments[..15].iter().all(|&a| a == 0));
        assert!(r.assignments[15..].iter().all(|&a| a == 1));
    }

    #[test]
    fn duplicate_points_still_fill_every_cluster() {
        let pts = vec![vec![1.0], vec![1.0], vec![1.0], vec![4.0]];
        let r = kmeans(&pts, 3, 2, 5).unwrap();
        let mut ids = r.assignments.clone();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 3);
    }

    #[test]
    fn deterministic_per_seed() {
        let pts: Vec<Vec<f64>> = (0..20).map(|i| vec![(i * 7 % 13) as f64, (i % 5) as f64]).collect();
        assert_eq!(kmeans(&pts, 4, 6, 3).unwrap(), kmeans(&pts, 4, 6, 3).unwrap());
    }

    #[test]
    fn rejects_bad_cluster_counts() {
        let pts = vec![vec![0.0], vec![1.0]];
        assert!(kmeans(&pts, 0, 1, 0).is_err());
        assert!(kmeans(&pts, 3, 1, 0).is_err());
    }
}
