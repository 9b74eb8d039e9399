use nalgebra::{DMatrix, SymmetricEigen};

use super::AffinityMatrix;
use crate::error::{Error, Result};

/// Normalized affinity `D^{-1/2} A D^{-1/2}`.
pub fn normalized_affinity(a: &AffinityMatrix) -> Result<DMatrix<f64>> {
    let n = a.n();
    let degree: Vec<f64> = a.entries.iter().map(|r| r.iter().sum()).collect();
    if let Some(i) = degree.iter().position(|&d| d <= 0.0) {
        return Err(Error::DegenerateInput(format!(
            "point {i} has zero affinity to every other point"
        )));
    }
    let inv: Vec<f64> = degree.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut l = DMatrix::from_fn(n, n, |i, j| inv[i] * a.entries[i][j] * inv[j]);
    // exact symmetry
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (l[(i, j)] + l[(j, i)]);
            l[(i, j)] = v;
            l[(j, i)] = v;
        }
    }
    Ok(l)
}

/// Eigenpairs of a symmetric matrix sorted by descending eigenvalue (ties by
/// original index); each eigenvector's largest-magnitude entry is positive.
pub fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (c, &i) in idx.iter().enumerate() {
        let col = eig.eigenvectors.column(i);
        let pivot = (0..n).fold(0, |best, r| if col[r].abs() > col[best].abs() { r } else { best });
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            vectors[(r, c)] = sign * col[r];
        }
    }
    (values, vectors)
}

/// Row-normalized matrix of the `c` leading eigenvectors of the normalized
/// affinity, as `n` rows of length `c`.
pub fn spectral_embed(a: &AffinityMatrix, c: usize) -> Result<Vec<Vec<f64>>> {
    let n = a.n();
    if c == 0 || c > n {
        return Err(Error::invalid(format!("cannot embed {n} points in {c} dimensions")));
    }
    let l = normalized_affinity(a)?;
    let (_, vectors) = sorted_eigen(l);
    Ok((0..n)
        .map(|r| {
            let row: Vec<f64> = (0..c).map(|k| vectors[(r, k)]).collect();
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.into_iter().map(|v| v / norm).collect()
            } else {
                row
            }
        })
        .collect())
}
