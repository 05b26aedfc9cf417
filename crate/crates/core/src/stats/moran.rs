use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Which grid neighbors receive unit weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Adjacency {
    /// Edge-sharing neighbors (4-neighborhood).
    Rook,
    /// Edge- or corner-sharing neighbors (8-neighborhood).
    Queen,
}

impl Adjacency {
    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Adjacency::Rook => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
            Adjacency::Queen => &[
                (-1, -1),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1),
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoransResult {
    pub i: f64,
    /// Randomization expectation −1/(n−1).
    pub expected: f64,
    /// Standardized statistic under the randomization null; needs n ≥ 4.
    pub z_score: Option<f64>,
    pub pass: bool,
}

/// Two-sided standard-normal bound for significance `alpha` (1.959964 at 0.05).
pub fn normal_two_sided_bound(alpha: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - alpha / 2.0)
}

/// Moran's I of a row-major `width`×`height` field with binary grid weights.
///
/// The z-score uses the randomization-null variance (kurtosis-corrected); the
/// field passes (no significant autocorrelation) when |z| is below the
/// two-sided bound at `alpha`.
pub fn morans_i(
    values: &[f64],
    width: usize,
    height: usize,
    adjacency: Adjacency,
    alpha: f64,
) -> Result<MoransResult> {
    let n = width * height;
    if values.len() != n {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: n,
        });
    }
    if n < 2 {
        return Err(Error::Insufficient(
            "Moran's I needs at least two sites".into(),
        ));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let z: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let m2: f64 = z.iter().map(|d| d * d).sum();
    if m2 <= 0.0 {
        return Err(Error::Degenerate("constant field has zero variance".into()));
    }
    let m4: f64 = z.iter().map(|d| d * d * d * d).sum();

    let mut cross = 0.0;
    let mut s0 = 0.0;
    let mut sum_deg_sq = 0.0;
    for r in 0..height {
        for c in 0..width {
            let mut deg = 0.0;
            let zi = z[r * width + c];
            for &(dr, dc) in adjacency.offsets() {
                let (rr, cc) = (r as isize + dr, c as isize + dc);
                if rr < 0 || cc < 0 || rr >= height as isize || cc >= width as isize {
                    continue;
                }
                cross += zi * z[rr as usize * width + cc as usize];
                deg += 1.0;
            }
            s0 += deg;
            sum_deg_sq += deg * deg;
        }
    }
    if s0 == 0.0 {
        return Err(Error::Degenerate("weight matrix has no links".into()));
    }
    let i = nf / s0 * cross / m2;
    let expected = -1.0 / (nf - 1.0);

    let z_score = (n >= 4).then(|| {
        // Symmetric binary weights: S1 = 2·S0, S2 = Σ (2·degᵢ)².
        let s1 = 2.0 * s0;
        let s2 = 4.0 * sum_deg_sq;
        let b2 = nf * m4 / (m2 * m2);
        let num = nf * ((nf * nf - 3.0 * nf + 3.0) * s1 - nf * s2 + 3.0 * s0 * s0)
            - b2 * ((nf * nf - nf) * s1 - 2.0 * nf * s2 + 6.0 * s0 * s0);
        let den = (nf - 1.0) * (nf - 2.0) * (nf - 3.0) * s0 * s0;
        let var = num / den - expected * expected;
        (i - expected) / var.sqrt()
    });
    let z_score = z_score.filter(|z| z.is_finite());
    let pass = z_score.is_some_and(|z| z.abs() < normal_two_sided_bound(alpha));
    Ok(MoransResult {
        i,
        expected,
        z_score,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_tile_is_degenerate() {
        assert!(matches!(
            morans_i(&[5.0; 256], 16, 16, Adjacency::Rook, 0.05),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn checkerboard_is_minus_one() {
        let r = morans_i(&[0.0, 1.0, 1.0, 0.0], 2, 2, Adjacency::Rook, 0.05).unwrap();
        assert!((r.i + 1.0).abs() < 1e-12);
        assert!((r.expected + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_for_256_sites() {
        let vals: Vec<f64> = (0..256).map(|k| ((k * 37) % 101) as f64).collect();
        let r = morans_i(&vals, 16, 16, Adjacency::Rook, 0.05).unwrap();
        assert!((r.expected + 1.0 / 255.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_gradient_is_rejected() {
        let vals: Vec<f64> = (0..256).map(|k| (k / 16 + k % 16) as f64).collect();
        let r = morans_i(&vals, 16, 16, Adjacency::Rook, 0.05).unwrap();
        assert!(r.i > 0.8);
        assert!(!r.pass);
    }

    #[test]
    fn bound_value() {
        assert!((normal_two_sided_bound(0.05) - 1.959964).abs() < 1e-6);
    }

    #[test]
    fn iid_rejection_rate_is_nominal() {
        let mut rng = crate::rng::split_rng(2024, 0);
        let trials = 10_000;
        let mut rejected = 0;
        for _ in 0..trials {
            let vals: Vec<f64> = (0..256).map(|_| rng.uniform()).collect();
            let r = morans_i(&vals, 16, 16, Adjacency::Rook, 0.05).unwrap();
            rejected += (!r.pass) as usize;
        }
        let rate = rejected as f64 / trials as f64;
        assert!((rate - 0.05).abs() <= 0.015, "rate {rate}");
    }
}
