//! Bootstrap sup-F test of `k` against `k + 1` threshold regimes.
//!
//! The statistic is `n (RSS_0 - RSS_1) / RSS_1`, maximised over every
//! admissible additional threshold (and every delay when the null is linear).
//! Under the null, p-values come from a fixed-regressor residual bootstrap:
//! the null residuals are resampled with replacement and regressed on the
//! original regressors and threshold partitions, which is exact up to the
//! resampling because the statistic is invariant to the null fitted values.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{best_partition, DelayOrder};
use super::SetarOptions;
use crate::error::{Error, Result};
use crate::ols::{cholesky_lower, forward_substitute, ols, lag_design, Gram};
use crate::rng::stream;
use crate::series::TimeSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub bootstrap_reps: usize,
    pub null_regimes: usize,
    pub alt_regimes: usize,
    /// Delay at which the supremum was attained.
    pub delay: usize,
    /// Thresholds of the maximising alternative.
    pub thresholds: Vec<f64>,
}

/// Cholesky factor of `X'X` over a run of one delay ordering.
struct RangeFactor {
    ordering: usize,
    lo: usize,
    hi: usize,
    chol: Vec<f64>,
}

/// An alternative that splits null segment `segment` into `left` and `right`.
struct Alternative {
    ordering: usize,
    segment: usize,
    left: usize,
    right: usize,
    split: usize,
}

struct Design<'a> {
    y: &'a [f64],
    start: usize,
    p: usize,
}

impl Design<'_> {
    fn regressors(&self, row: usize, out: &mut [f64]) {
        let t = self.start + row;
        out[0] = 1.0;
        for i in 1..=self.p {
            out[i] = self.y[t - i];
        }
    }
}

fn factor(design: &Design, order: &DelayOrder, lo: usize, hi: usize) -> Option<Vec<f64>> {
    let q = design.p + 1;
    let mut g = Gram::zeros(q);
    let mut x = vec![0.0; q];
    for &row in &order.order[lo..hi] {
        design.regressors(row, &mut x);
        g.add(&x, 0.0);
    }
    let mut l = g.xx;
    cholesky_lower(&mut l, q).then_some(l)
}

/// Per-ordering prefix sums of `X'v` and `v'v` for a response vector `v`.
fn response_prefix(design: &Design, order: &DelayOrder, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let q = design.p + 1;
    let n = order.order.len();
    let mut xy = vec![0.0; (n + 1) * q];
    let mut yy = vec![0.0; n + 1];
    let mut x = vec![0.0; q];
    for (pos, &row) in order.order.iter().enumerate() {
        design.regressors(row, &mut x);
        let r = v[row];
        for c in 0..q {
            xy[(pos + 1) * q + c] = xy[pos * q + c] + x[c] * r;
        }
        yy[pos + 1] = yy[pos] + r * r;
    }
    (xy, yy)
}

fn range_rss(f: &RangeFactor, q: usize, prefix: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (xy, yy) = prefix;
    let mut z: Vec<f64> = (0..q).map(|c| xy[f.hi * q + c] - xy[f.lo * q + c]).collect();
    forward_substitute(&f.chol, q, &mut z);
    let explained: f64 = z.iter().map(|v| v * v).sum();
    (yy[f.hi] - yy[f.lo] - explained).max(0.0)
}

pub fn hansen_test(
    series: &TimeSeries,
    null_k: usize,
    alt_k: usize,
    bootstrap_reps: usize,
    seed: u64,
    opts: &SetarOptions,
) -> Result<ThresholdTestResult> {
    if null_k == 0 || alt_k != null_k + 1 {
        return Err(Error::invalid(format!(
            "threshold test needs alt_k = null_k + 1 with null_k >= 1, got {null_k} vs {alt_k}"
        )));
    }
    if bootstrap_reps < 100 {
        return Err(Error::invalid("bootstrap_reps must be at least 100"));
    }
    opts.validate()?;
    let y = series.values();
    let start = opts.start();
    let n = y.len().saturating_sub(start);
    let min_obs = opts.min_obs(n);
    if n < alt_k * min_obs {
        return Err(Error::estimation(format!(
            "`{}` is too short for a {alt_k}-regime alternative",
            series.display_label()
        )));
    }
    let p = opts.p_max;
    let q = p + 1;
    let design = Design { y, start, p };

    // null partition
    let (null_delay_idx, null_bounds): (usize, Vec<usize>) = if null_k == 1 {
        (0, vec![0, n])
    } else {
        let mut best: Option<(usize, f64, Vec<usize>)> = None;
        for d in 1..=opts.d_max {
            let order = DelayOrder::new(y, start, p, d);
            if let Some((rss, splits)) = best_partition(&order, null_k, min_obs, opts.parallel) {
                if best.as_ref().is_none_or(|b| rss < b.1) {
                    best = Some((d - 1, rss, splits));
                }
            }
        }
        let (di, _, splits) = best.ok_or_else(|| {
            Error::estimation(format!(
                "no admissible {null_k}-regime null model for `{}`",
                series.display_label()
            ))
        })?;
        let mut b = vec![0];
        b.extend(splits);
        b.push(n);
        (di, b)
    };

    let orderings: Vec<DelayOrder> = if null_k == 1 {
        (1..=opts.d_max).map(|d| DelayOrder::new(y, start, p, d)).collect()
    } else {
        vec![DelayOrder::new(y, start, p, null_delay_idx + 1)]
    };
    let null_ordering = 0;

    let mut factors: Vec<RangeFactor> = Vec::new();
    let push_factor = |ordering: usize, lo: usize, hi: usize, factors: &mut Vec<RangeFactor>| {
        factor(&design, &orderings[ordering], lo, hi).map(|chol| {
            factors.push(RangeFactor {
                ordering,
                lo,
                hi,
                chol,
            });
            factors.len() - 1
        })
    };

    let mut null_segments = Vec::new();
    for w in null_bounds.windows(2) {
        let idx = push_factor(null_ordering, w[0], w[1], &mut factors)
            .ok_or_else(|| Error::estimation("singular null regression"))?;
        null_segments.push(idx);
    }

    let mut alternatives = Vec::new();
    for (oi, order) in orderings.iter().enumerate() {
        for (si, w) in null_bounds.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            if b < a + 2 * min_obs {
                continue;
            }
            for split in a + min_obs..=b - min_obs {
                if order.z_sorted[split - 1] >= order.z_sorted[split] {
                    continue;
                }
                let Some(left) = push_factor(oi, a, split, &mut factors) else {
                    continue;
                };
                let Some(right) = push_factor(oi, split, b, &mut factors) else {
                    factors.pop();
                    continue;
                };
                alternatives.push(Alternative {
                    ordering: oi,
                    segment: si,
                    left,
                    right,
                    split,
                });
            }
        }
    }
    if alternatives.is_empty() {
        return Err(Error::estimation(format!(
            "no admissible alternative threshold for `{}`",
            series.display_label()
        )));
    }

    // sup-F for a response vector indexed by row
    let sup_f = |v: &[f64]| -> (f64, usize) {
        let prefixes: Vec<(Vec<f64>, Vec<f64>)> = orderings
            .iter()
            .map(|o| response_prefix(&design, o, v))
            .collect();
        let seg_rss: Vec<f64> = null_segments
            .iter()
            .map(|&f| range_rss(&factors[f], q, &prefixes[factors[f].ordering]))
            .collect();
        let rss0: f64 = seg_rss.iter().sum();
        let mut best = (f64::INFINITY, 0);
        for (ai, alt) in alternatives.iter().enumerate() {
            let pre = &prefixes[alt.ordering];
            let rss1 = rss0 - seg_rss[alt.segment]
                + range_rss(&factors[alt.left], q, pre)
                + range_rss(&factors[alt.right], q, pre);
            if rss1 < best.0 {
                best = (rss1, ai);
            }
        }
        let f = if best.0 > 0.0 {
            n as f64 * (rss0 - best.0) / best.0
        } else {
            f64::INFINITY
        };
        (f.max(0.0), best.1)
    };

    let observed: Vec<f64> = (0..n).map(|r| y[start + r]).collect();
    let (statistic, arg) = sup_f(&observed);

    // null residuals in row order
    let null_order = &orderings[null_ordering];
    let mut residuals = vec![0.0; n];
    for w in null_bounds.windows(2) {
        let rows: Vec<usize> = null_order.order[w[0]..w[1]].iter().map(|&r| start + r).collect();
        let (x, target) = lag_design(y, &rows, p);
        let fit = ols(&x, &target)?;
        for (i, &t) in rows.iter().enumerate() {
            residuals[t - start] = fit.residuals[i];
        }
    }
    let mean = residuals.iter().sum::<f64>() / n as f64;
    for e in &mut residuals {
        *e -= mean;
    }

    let replicate = |b: usize| -> f64 {
        let mut rng = stream(seed, &[b as u64]);
        let draw: Vec<f64> = (0..n).map(|_| residuals[rng.random_range(0..n)]).collect();
        sup_f(&draw).0
    };
    let stats: Vec<f64> = if opts.parallel {
        (0..bootstrap_reps).into_par_iter().map(replicate).collect()
    } else {
        (0..bootstrap_reps).map(replicate).collect()
    };
    let exceed = stats.iter().filter(|&&s| s >= statistic).count();
    let p_value = (1 + exceed) as f64 / (1 + bootstrap_reps) as f64;

    let alt = &alternatives[arg];
    let order = &orderings[alt.ordering];
    let mut thresholds: Vec<f64> = null_bounds[1..null_bounds.len() - 1]
        .iter()
        .map(|&b| order.threshold_at(b))
        .collect();
    thresholds.push(order.threshold_at(alt.split));
    thresholds.sort_by(f64::total_cmp);

    Ok(ThresholdTestResult {
        statistic,
        p_value,
        bootstrap_reps,
        null_regimes: null_k,
        alt_regimes: alt_k,
        delay: order.delay,
        thresholds,
    })
}
