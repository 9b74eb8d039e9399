use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Silhouette {
    pub values: Vec<f64>,
    pub average: f64,
}

/// `s(i) = (b(i) - a(i)) / max(a(i), b(i))` where `a(i)` is the mean distance
/// to the other members of `i`'s cluster and `b(i)` the smallest mean
/// distance to another cluster. Members of singleton clusters score 0.
pub fn silhouette(assignments: &[usize], distances: &[Vec<f64>]) -> Result<Silhouette> {
    let n = assignments.len();
    if distances.len() != n || distances.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("distance matrix does not match the assignments"));
    }
    let mut ids: Vec<usize> = assignments.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 2 {
        return Err(Error::invalid("silhouette needs at least two clusters"));
    }
    let index = |a: usize| ids.binary_search(&a).expect("id present");
    let sizes = assignments.iter().fold(vec![0usize; ids.len()], |mut acc, &a| {
        acc[index(a)] += 1;
        acc
    });
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let own = index(assignments[i]);
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; ids.len()];
            for j in 0..n {
                if j != i {
                    sums[index(assignments[j])] += distances[i][j];
                }
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..ids.len())
                .filter(|&k| k != own)
                .map(|k| sums[k] / sizes[k] as f64)
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m > 0.0 {
                (b - a) / m
            } else {
                0.0
            }
        })
        .collect();
    let average = values.iter().sum::<f64>() / n as f64;
    Ok(Silhouette { values, average })
}
