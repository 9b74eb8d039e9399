//! Threshold search over sorted threshold-variable order.
//!
//! For a fixed delay the regression rows are sorted by `y_{t-d}`; every
//! regime is then a contiguous run of that order and its least-squares RSS is
//! read off prefix sums of the normal equations. The exhaustive search over
//! all threshold combinations reduces to an exact dynamic program over split
//! positions because the total RSS is additive over regimes.

use rayon::prelude::*;

use crate::ols::{prefix_grams, Gram};

/// Regression rows of one delay, sorted by the threshold variable.
pub(crate) struct DelayOrder {
    pub delay: usize,
    /// Row indices (0-based, relative to `start`) in ascending `z` order.
    pub order: Vec<usize>,
    pub z_sorted: Vec<f64>,
    prefix: Vec<Gram>,
}

impl DelayOrder {
    pub fn new(y: &[f64], start: usize, p: usize, delay: usize) -> Self {
        let n = y.len() - start;
        let mut order: Vec<usize> = (0..n).collect();
        // stable: ties keep time order
        order.sort_by(|&a, &b| y[start + a - delay].total_cmp(&y[start + b - delay]));
        let z_sorted: Vec<f64> = order.iter().map(|&r| y[start + r - delay]).collect();
        let prefix = prefix_grams(
            order.iter().map(|&r| {
                let t = start + r;
                let mut x = Vec::with_capacity(p + 1);
                x.push(1.0);
                x.extend((1..=p).map(|i| y[t - i]));
                (x, y[t])
            }),
            p + 1,
        );
        Self {
            delay,
            order,
            z_sorted,
            prefix,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    /// RSS of one regression over sorted positions `[a, b)`.
    pub fn cost(&self, a: usize, b: usize) -> f64 {
        self.prefix[b]
            .minus(&self.prefix[a])
            .rss()
            .unwrap_or(f64::INFINITY)
    }

    /// Positions `i` where a threshold may sit: the value changes between
    /// `i - 1` and `i`, and both sides keep at least `min_obs` rows.
    pub fn split_candidates(&self, min_obs: usize) -> Vec<usize> {
        let n = self.len();
        if n < 2 * min_obs {
            return Vec::new();
        }
        (min_obs..=n - min_obs)
            .filter(|&i| self.z_sorted[i - 1] < self.z_sorted[i])
            .collect()
    }

    /// Threshold value for a split at sorted position `i`.
    pub fn threshold_at(&self, i: usize) -> f64 {
        self.z_sorted[i - 1]
    }

    /// Best split of `[a, b)` into two runs of at least `min_obs` rows.
    pub fn best_split_within(&self, a: usize, b: usize, min_obs: usize) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        if b < a + 2 * min_obs {
            return None;
        }
        for i in a + min_obs..=b - min_obs {
            if self.z_sorted[i - 1] >= self.z_sorted[i] {
                continue;
            }
            let rss = self.cost(a, i) + self.cost(i, b);
            if rss.is_finite() && best.is_none_or(|(_, r)| rss < r) {
                best = Some((i, rss));
            }
        }
        best
    }
}

/// Minimum-RSS partition into `k` regimes; returns `(rss, interior split
/// positions)`. Ties resolve to the lowest split positions.
pub(crate) fn best_partition(
    order: &DelayOrder,
    k: usize,
    min_obs: usize,
    parallel: bool,
) -> Option<(f64, Vec<usize>)> {
    let n = order.len();
    if k == 1 {
        let rss = order.cost(0, n);
        return rss.is_finite().then(|| (rss, Vec::new()));
    }
    let cand = order.split_candidates(min_obs);
    if cand.is_empty() {
        return None;
    }
    let m = cand.len();

    // layer 1: a single regime [0, cand[i])
    let mut best: Vec<f64> = cand.iter().map(|&c| order.cost(0, c)).collect();
    let mut back: Vec<Vec<usize>> = vec![vec![usize::MAX; m]];

    if k > 2 {
        // middle costs between candidate positions
        let row = |i: usize| -> Vec<f64> {
            (0..m)
                .map(|j| {
                    if j > i && cand[j] - cand[i] >= min_obs {
                        order.cost(cand[i], cand[j])
                    } else {
                        f64::INFINITY
                    }
                })
                .collect()
        };
        let middle: Vec<Vec<f64>> = if parallel {
            (0..m).into_par_iter().map(row).collect()
        } else {
            (0..m).map(row).collect()
        };
        for _ in 2..k {
            let mut next = vec![f64::INFINITY; m];
            let mut arg = vec![usize::MAX; m];
            for j in 0..m {
                for i in 0..j {
                    let v = best[i] + middle[i][j];
                    if v < next[j] {
                        next[j] = v;
                        arg[j] = i;
                    }
                }
            }
            best = next;
            back.push(arg);
        }
    }

    let mut total = f64::INFINITY;
    let mut last = usize::MAX;
    for j in 0..m {
        if n - cand[j] < min_obs {
            continue;
        }
        let v = best[j] + order.cost(cand[j], n);
        if v < total {
            total = v;
            last = j;
        }
    }
    if !total.is_finite() {
        return None;
    }
    let mut splits = vec![cand[last]];
    let mut j = last;
    for layer in (1..back.len()).rev() {
        j = back[layer][j];
        splits.push(cand[j]);
    }
    splits.reverse();
    Some((total, splits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    /// Brute-force enumeration of every admissible pair of splits.
    fn brute_three(order: &DelayOrder, min_obs: usize) -> (f64, Vec<usize>) {
        let n = order.len();
        let cand = order.split_candidates(min_obs);
        let mut best = (f64::INFINITY, vec![]);
        for &a in &cand {
            for &b in &cand {
                if b <= a || b - a < min_obs || n - b < min_obs {
                    continue;
                }
                let v = order.cost(0, a) + order.cost(a, b) + order.cost(b, n);
                if v < best.0 {
                    best = (v, vec![a, b]);
                }
            }
        }
        best
    }

    #[test]
    fn dynamic_program_matches_enumeration() {
        for seed in 0..5 {
            let y = noise(150, seed);
            let order = DelayOrder::new(&y, 2, 2, 1);
            let (rss, splits) = best_partition(&order, 3, 15, false).unwrap();
            let (brss, bsplits) = brute_three(&order, 15);
            assert_eq!(splits, bsplits);
            assert_eq!(rss, brss);
        }
    }

    #[test]
    fn parallel_and_serial_agree() {
        let y = noise(200, 42);
        let order = DelayOrder::new(&y, 3, 3, 2);
        assert_eq!(
            best_partition(&order, 3, 20, false),
            best_partition(&order, 3, 20, true)
        );
    }

    #[test]
    fn split_candidates_skip_ties() {
        let y = vec![0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let order = DelayOrder::new(&y, 1, 1, 1);
        for i in order.split_candidates(2) {
            assert!(order.z_sorted[i - 1] < order.z_sorted[i]);
        }
    }
}
