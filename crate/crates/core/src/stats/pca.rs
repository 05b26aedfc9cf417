use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fitted principal-component model over z-scored features.
///
/// Zero-variance columns are dropped at fit time; their entries in every
/// component are zero, so components stay orthonormal in the full
/// `dimension`-sized feature space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub scales: Vec<f64>,
    /// `k` rows of length `dimension`.
    pub components: Vec<Vec<f64>>,
    /// Variance of the standardized data along each component, non-increasing.
    pub explained_variance: Vec<f64>,
    pub dropped: Vec<usize>,
}

impl PcaModel {
    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// Explained variance as a fraction of total standardized variance.
    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        let total = (self.dimension() - self.dropped.len()) as f64;
        self.explained_variance.iter().map(|v| v / total).collect()
    }

    pub fn standardize(&self, vector: &[f64]) -> Result<Vec<f64>> {
        if vector.len() != self.dimension() {
            return Err(Error::LengthMismatch {
                left: vector.len(),
                right: self.dimension(),
            });
        }
        Ok(vector
            .iter()
            .zip(self.mean.iter().zip(&self.scales))
            .enumerate()
            .map(|(j, (x, (m, s)))| {
                if self.dropped.binary_search(&j).is_ok() {
                    0.0
                } else {
                    (x - m) / s
                }
            })
            .collect())
    }

    /// Maps component scores back to standardized feature space.
    pub fn reconstruct_standardized(&self, scores: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        for (s, comp) in scores.iter().zip(&self.components) {
            for (o, c) in out.iter_mut().zip(comp) {
                *o += s * c;
            }
        }
        out
    }
}

/// Fits `k` principal components to `data` (one row per observation).
///
/// Columns are centered and scaled to unit sample variance before the
/// eigendecomposition of their covariance (i.e. the correlation matrix).
pub fn pca_fit(data: &[Vec<f64>], k: usize) -> Result<PcaModel> {
    let n = data.len();
    if n < 2 {
        return Err(Error::Insufficient(
            "PCA needs at least two observations".into(),
        ));
    }
    let d = data[0].len();
    if let Some(row) = data.iter().find(|r| r.len() != d) {
        return Err(Error::LengthMismatch {
            left: row.len(),
            right: d,
        });
    }
    if k == 0 || k > d {
        return Err(Error::invalid(format!("k = {k} must be in 1..={d}")));
    }
    let mut mean = vec![0.0; d];
    for row in data {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut scales = vec![0.0; d];
    for row in data {
        for j in 0..d {
            let dx = row[j] - mean[j];
            scales[j] += dx * dx;
        }
    }
    let mut dropped = Vec::new();
    let mut kept = Vec::new();
    for (j, s) in scales.iter_mut().enumerate() {
        *s = (*s / (n - 1) as f64).sqrt();
        let tiny = 1e-12 * mean[j].abs().max(1.0);
        if !(*s > tiny) {
            log::warn!("PCA: dropping zero-variance feature column {j}");
            dropped.push(j);
            *s = 1.0;
        } else {
            kept.push(j);
        }
    }
    if k > kept.len() {
        return Err(Error::Insufficient(format!(
            "only {} non-degenerate features for {k} components",
            kept.len()
        )));
    }
    let p = kept.len();
    let z = DMatrix::from_fn(n, p, |i, jj| {
        let j = kept[jj];
        (data[i][j] - mean[j]) / scales[j]
    });
    let cov = (z.transpose() * &z) / (n - 1) as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut components = Vec::with_capacity(k);
    let mut explained_variance = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let v = eig.eigenvectors.column(idx);
        // Sign convention: the largest-magnitude loading is positive.
        let pivot = (0..p)
            .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()).then(b.cmp(&a)))
            .unwrap_or(0);
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; d];
        for (jj, &j) in kept.iter().enumerate() {
            row[j] = sign * v[jj];
        }
        components.push(row);
        explained_variance.push(eig.eigenvalues[idx].max(0.0));
    }
    Ok(PcaModel {
        mean,
        scales,
        components,
        explained_variance,
        dropped,
    })
}

/// Standardizes `vector` with the model's statistics and projects it onto
/// the retained components.
pub fn pca_project(model: &PcaModel, vector: &[f64]) -> Result<Vec<f64>> {
    let z = model.standardize(vector)?;
    Ok(model
        .components
        .iter()
        .map(|c| c.iter().zip(&z).map(|(a, b)| a * b).sum())
        .collect())
}
