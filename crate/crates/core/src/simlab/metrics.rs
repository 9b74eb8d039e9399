//! Agreement between a partition and known labels.

use std::collections::BTreeMap;

use pathfinding::prelude::{kuhn_munkres, Matrix};

use crate::error::{Error, Result};

/// Confusion counts: rows are distinct assignment ids, columns distinct labels,
/// both in ascending order.
fn confusion(true_labels: &[usize], assignments: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<Vec<i64>>) {
    let labels: Vec<usize> = {
        let mut v = true_labels.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    let clusters: Vec<usize> = {
        let mut v = assignments.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    let li: BTreeMap<usize, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let ci: BTreeMap<usize, usize> = clusters.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut table = vec![vec![0i64; labels.len()]; clusters.len()];
    for (&l, &c) in true_labels.iter().zip(assignments) {
        table[ci[&c]][li[&l]] += 1;
    }
    (clusters, labels, table)
}

fn check_lengths(a: &[usize], b: &[usize]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "label vectors differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::invalid("label vectors are empty"));
    }
    Ok(())
}

/// Percentage of objects whose cluster maps to their true label under the
/// one-to-one cluster-to-label matching that maximises agreement.
pub fn exact_grouping(true_labels: &[usize], assignments: &[usize]) -> Result<f64> {
    check_lengths(true_labels, assignments)?;
    let (_, _, table) = confusion(true_labels, assignments);
    let size = table.len().max(table[0].len());
    let weights = Matrix::from_fn(size, size, |(r, c)| {
        table.get(r).and_then(|row| row.get(c)).copied().unwrap_or(0)
    });
    let (matched, _) = kuhn_munkres(&weights);
    Ok(100.0 * matched as f64 / true_labels.len() as f64)
}

/// Adjusted Rand index of two partitions.
pub fn adjusted_rand_index(true_labels: &[usize], assignments: &[usize]) -> Result<f64> {
    check_lengths(true_labels, assignments)?;
    let (_, _, table) = confusion(true_labels, assignments);
    let pairs = |x: i64| (x * (x - 1)) as f64 / 2.0;
    let n = true_labels.len() as i64;
    let index: f64 = table.iter().flatten().map(|&c| pairs(c)).sum();
    let rows: f64 = table.iter().map(|r| pairs(r.iter().sum())).sum();
    let cols: f64 = (0..table[0].len())
        .map(|c| pairs(table.iter().map(|r| r[c]).sum()))
        .sum();
    let expected = rows * cols / pairs(n);
    let max = 0.5 * (rows + cols);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn renamed_partition_is_perfect() {
        let truth = [0, 0, 1, 1, 2, 2];
        let assigned = [7, 7, 3, 3, 5, 5];
        assert_eq!(exact_grouping(&truth, &assigned).unwrap(), 100.0);
        assert_eq!(adjusted_rand_index(&truth, &assigned).unwrap(), 1.0);
    }

    #[test]
    fn half_swapped_between_two_clusters() {
        let truth = [0, 0, 0, 0, 1, 1, 1, 1];
        let assigned = [0, 0, 1, 1, 1, 1, 0, 0];
        assert_eq!(exact_grouping(&truth, &assigned).unwrap(), 50.0);
    }

    #[test]
    fn more_clusters_than_labels() {
        let truth = [0, 0, 0, 1, 1, 1];
        let assigned = [0, 0, 2, 1, 1, 1];
        let pct = exact_grouping(&truth, &assigned).unwrap();
        assert!((pct - 500.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(exact_grouping(&[0, 1], &[0]).is_err());
        assert!(adjusted_rand_index(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn random_assignment_baseline() {
        // 100 objects, 10 labels, random 10-cluster assignment: mean over
        // trials should be far from perfect, in the 10-30% range.
        let truth: Vec<usize> = (0..100).map(|i| i / 10).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut total = 0.0;
        for _ in 0..50 {
            let mut a = truth.clone();
            a.shuffle(&mut rng);
            total += exact_grouping(&truth, &a).unwrap();
        }
        let mean = total / 50.0;
        assert!((10.0..30.0).contains(&mean), "{mean}");
    }

    proptest! {
        #[test]
        fn invariant_under_relabeling(
            assigned in proptest::collection::vec(0usize..5, 30),
            seed in 0u64..1000,
        ) {
            let truth: Vec<usize> = (0..30).map(|i| i % 4).collect();
            let mut perm: Vec<usize> = (0..5).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let relabelled: Vec<usize> = assigned.iter().map(|&a| perm[a] + 10).collect();
            prop_assert_eq!(
                exact_grouping(&truth, &assigned).unwrap(),
                exact_grouping(&truth, &relabelled).unwrap()
            );
            let a = adjusted_rand_index(&truth, &assigned).unwrap();
            let b = adjusted_rand_index(&truth, &relabelled).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
