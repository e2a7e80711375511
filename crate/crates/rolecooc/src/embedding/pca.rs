//! Principal component analysis via an eigendecomposition of the sample Gram
//! matrix.
//!
//! The inputs here are short and wide (tens of roles by thousands of verb
//! columns), so instead of decomposing the feature-space covariance we run a
//! cyclic Jacobi eigensolver on the n-by-n Gram matrix of the centered rows
//! and recover scores and loadings from its eigenpairs.

use super::{EmbeddingError, PerturbedMatrix};
use crate::lexicon::Role;

/// PCA output: row scores plus enough context to reconstruct.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedMatrix {
    /// Labels carried through from the perturbed matrix; empty when the
    /// reduction was built from unlabeled rows.
    pub role_order: Vec<Role>,
    /// `values[sample][component]`, components in decreasing variance order.
    pub values: Vec<Vec<f64>>,
    /// Sample variance captured by each component (eigenvalue / (n - 1)).
    pub explained_variance: Vec<f64>,
    /// `loadings[component][feature]`; orthonormal rows for components with
    /// positive variance, zero rows for the rest.
    pub loadings: Vec<Vec<f64>>,
}

impl ReducedMatrix {
    pub fn with_roles(mut self, roles: Vec<Role>) -> Self {
        self.role_order = roles;
        self
    }

    /// Rebuilds the centered data from scores and loadings. Exact (up to
    /// rounding) when all positive-variance components were kept.
    pub fn reconstruct_centered(&self) -> Vec<Vec<f64>> {
        let n = self.values.len();
        let m = self.loadings.first().map_or(0, |l| l.len());
        let d = self.loadings.len();
        let mut out = vec![vec![0.0; m]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for k in 0..d {
                let score = self.values[i][k];
                if score == 0.0 {
                    continue;
                }
                for (j, cell) in row.iter_mut().enumerate() {
                    *cell += score * self.loadings[k][j];
                }
            }
        }
        out
    }
}

/// Reduces the perturbed role rows to `d` principal components, carrying the
/// role labels along.
pub fn pca_reduce(pm: &PerturbedMatrix, d: usize) -> Result<ReducedMatrix, EmbeddingError> {
    Ok(pca_rows(&pm.values, d)?.with_roles(pm.role_order.clone()))
}

/// PCA over unlabeled rows. Keeps `min(d, samples - 1)` components.
pub fn pca_rows(rows: &[Vec<f64>], d: usize) -> Result<ReducedMatrix, EmbeddingError> {
    let n = rows.len();
    if n < 2 {
        return Err(EmbeddingError::DegenerateInput {
            detail: format!("need at least 2 samples, got {n}"),
        });
    }
    if d == 0 {
        return Err(EmbeddingError::DegenerateInput {
            detail: "requested 0 components".into(),
        });
    }
    let m = rows[0].len();
    if m == 0 {
        return Err(EmbeddingError::DegenerateInput {
            detail: "rows have no feature columns".into(),
        });
    }
    assert!(
        rows.iter().all(|r| r.len() == m),
        "all rows must have equal length"
    );

    // Center columns.
    let mut mean = vec![0.0f64; m];
    for row in rows {
        for (j, &x) in row.iter().enumerate() {
            mean[j] += x;
        }
    }
    for mj in &mut mean {
        *mj /= n as f64;
    }
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|row| row.iter().zip(&mean).map(|(&x, &mj)| x - mj).collect())
        .collect();

    // Gram matrix of the centered rows.
    let mut gram = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i..n {
            let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
            gram[i][j] = dot;
            gram[j][i] = dot;
        }
    }

    let (mut eigenvalues, eigenvectors) = jacobi_eigen(gram);
    for lam in &mut eigenvalues {
        if *lam < 0.0 {
            *lam = 0.0; // Gram matrices are PSD; negatives are rounding.
        }
    }

    let effective_d = d.min(n - 1);
    let lam_max = eigenvalues.first().copied().unwrap_or(0.0);
    let cutoff = lam_max * 1e-12;

    let mut values = vec![vec![0.0f64; effective_d]; n];
    let mut loadings = vec![vec![0.0f64; m]; effective_d];
    let mut explained_variance = vec![0.0f64; effective_d];
    for k in 0..effective_d {
        let lam = eigenvalues[k];
        explained_variance[k] = lam / (n - 1) as f64;
        if lam <= cutoff || lam == 0.0 {
            continue; // Numerically rank-deficient direction: keep zeros.
        }
        let mut u: Vec<f64> = (0..n).map(|i| eigenvectors[i][k]).collect();
        // Deterministic sign: the largest-magnitude coefficient is positive.
        let pivot = u
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        if u[pivot] < 0.0 {
            for x in &mut u {
                *x = -*x;
            }
        }
        let sigma = lam.sqrt();
        for i in 0..n {
            values[i][k] = u[i] * sigma;
        }
        for (j, cell) in loadings[k].iter_mut().enumerate() {
            let dot: f64 = (0..n).map(|i| centered[i][j] * u[i]).sum();
            *cell = dot / sigma;
        }
    }

    Ok(ReducedMatrix {
        role_order: Vec::new(),
        values,
        explained_variance,
        loadings,
    })
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues in decreasing order and the matching eigenvectors as
/// columns of the returned matrix (`v[i][k]` is component `i` of eigenvector
/// `k`).
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0f64; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= scale * 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let app = a[p][p];
                let aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[i][p];
                        let aiq = a[i][q];
                        a[i][p] = aip - s * (aiq + tau * aip);
                        a[p][i] = a[i][p];
                        a[i][q] = aiq + s * (aip - tau * aiq);
                        a[q][i] = a[i][q];
                    }
                }
                for row in v.iter_mut() {
                    let vip = row[p];
                    let viq = row[q];
                    row[p] = vip - s * (viq + tau * vip);
                    row[q] = viq + s * (vip - tau * viq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let mut vectors = vec![vec![0.0f64; n]; n];
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i][k] = v[i][src];
        }
    }
    (eigenvalues, vectors)
}
