use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::image::GrayImage;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlcmConfig {
    pub levels: usize,
    /// (dy, dx) pixel displacements.
    pub offsets: Vec<(isize, isize)>,
}

impl Default for GlcmConfig {
    fn default() -> Self {
        GlcmConfig {
            levels: 32,
            offsets: vec![(0, 1), (1, 0)],
        }
    }
}

struct Haralick {
    contrast: f64,
    correlation: Option<f64>,
    energy: f64,
    homogeneity: f64,
    entropy: f64,
}

fn cooccurrence(q: &[usize], w: usize, h: usize, levels: usize, dy: isize, dx: isize) -> Vec<f64> {
    let mut m = vec![0.0; levels * levels];
    let mut total = 0.0;
    for r in 0..h as isize {
        let rr = r + dy;
        if rr < 0 || rr >= h as isize {
            continue;
        }
        for c in 0..w as isize {
            let cc = c + dx;
            if cc < 0 || cc >= w as isize {
                continue;
            }
            let a = q[r as usize * w + c as usize];
            let b = q[rr as usize * w + cc as usize];
            m[a * levels + b] += 1.0;
            m[b * levels + a] += 1.0;
            total += 2.0;
        }
    }
    if total > 0.0 {
        m.iter_mut().for_each(|v| *v /= total);
    }
    m
}

fn haralick(p: &[f64], levels: usize) -> Haralick {
    let (mut contrast, mut energy, mut homogeneity, mut entropy, mut mu) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..levels {
        for j in 0..levels {
            let v = p[i * levels + j];
            if v == 0.0 {
                continue;
            }
            let d = i as f64 - j as f64;
            contrast += d * d * v;
            energy += v * v;
            homogeneity += v / (1.0 + d * d);
            entropy -= v * v.ln();
            mu += i as f64 * v;
        }
    }
    let (mut var, mut cov) = (0.0, 0.0);
    for i in 0..levels {
        for j in 0..levels {
            let v = p[i * levels + j];
            var += (i as f64 - mu) * (i as f64 - mu) * v;
            cov += (i as f64 - mu) * (j as f64 - mu) * v;
        }
    }
    Haralick {
        contrast,
        correlation: (var > 1e-12).then(|| cov / var),
        energy,
        homogeneity,
        entropy,
    }
}

/// Haralick texture features from symmetric, normalized grey-level
/// co-occurrence matrices, averaged over `config.offsets`.
///
/// Intensities are quantized as `v·levels/256`. Energy is the angular second
/// moment Σp²; entropy uses the natural log. Correlation is undefined (`None`)
/// when the quantized image is constant.
pub fn glcm_features(image: &GrayImage, config: &GlcmConfig) -> Result<FeatureVector> {
    let levels = config.levels;
    if !(2..=256).contains(&levels) {
        return Err(Error::invalid(format!(
            "GLCM levels {levels} must be in 2..=256"
        )));
    }
    if config.offsets.is_empty() {
        return Err(Error::invalid("GLCM needs at least one offset"));
    }
    let q: Vec<usize> = image
        .pixels()
        .iter()
        .map(|&v| v as usize * levels / 256)
        .collect();
    let feats: Vec<Haralick> = config
        .offsets
        .iter()
        .map(|&(dy, dx)| {
            haralick(
                &cooccurrence(&q, image.width(), image.height(), levels, dy, dx),
                levels,
            )
        })
        .collect();
    let n = feats.len() as f64;
    let avg = |f: fn(&Haralick) -> f64| feats.iter().map(f).sum::<f64>() / n;
    let correlation = feats
        .iter()
        .map(|h| h.correlation)
        .collect::<Option<Vec<f64>>>()
        .map(|v| v.iter().sum::<f64>() / n);
    let mut out = FeatureVector::new();
    out.push("contrast", avg(|h| h.contrast));
    out.push_opt("correlation", correlation);
    out.push("energy", avg(|h| h.energy));
    out.push("homogeneity", avg(|h| h.homogeneity));
    out.push("entropy", avg(|h| h.entropy));
    Ok(out)
}
