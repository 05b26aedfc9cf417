use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_K_NEIGHBORS: usize = 5;

pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Degenerate(
            "cosine similarity of a zero vector".into(),
        ));
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageDensity {
    pub coverage: f64,
    pub density: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-NN manifold coverage and density of `fake` points relative to `real` points.
///
/// Each real point owns a ball whose radius is the distance to its k-th
/// nearest other real point. Coverage is the fraction of real balls holding
/// at least one fake point; density is the mean number of balls holding each
/// fake point, divided by k. Ball membership is strict (distance < radius).
pub fn coverage_density(real: &[Vec<f64>], fake: &[Vec<f64>], k: usize) -> Result<CoverageDensity> {
    if k == 0 {
        return Err(Error::invalid("k-neighbors must be >= 1"));
    }
    if real.len() <= k {
        return Err(Error::Insufficient(format!(
            "{} real points for k = {k}",
            real.len()
        )));
    }
    if fake.is_empty() {
        return Err(Error::Insufficient("no fake points".into()));
    }
    let radii: Vec<f64> = real
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let mut d: Vec<f64> = real
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, y)| sq_dist(x, y))
                .collect();
            let (_, kth, _) = d.select_nth_unstable_by(k - 1, f64::total_cmp);
            *kth
        })
        .collect();
    let mut covered = vec![false; real.len()];
    let mut memberships = 0usize;
    for y in fake {
        for (i, x) in real.iter().enumerate() {
            if sq_dist(x, y) < radii[i] {
                covered[i] = true;
                memberships += 1;
            }
        }
    }
    Ok(CoverageDensity {
        coverage: covered.iter().filter(|&&c| c).count() as f64 / real.len() as f64,
        density: memberships as f64 / (k * fake.len()) as f64,
    })
}
