use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::{
    cosine_similarity, coverage_density, ks_two_sample, pca_fit, pca_project, PcaModel,
};

pub const MIN_PAIRS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSimilarity {
    pub train_train: Vec<f64>,
    pub train_gen: Vec<f64>,
    pub ks: f64,
    /// Components actually used (bounded by the non-constant feature count).
    pub components: usize,
}

fn informative_columns(rows: &[Vec<f64>]) -> usize {
    let d = rows.first().map_or(0, Vec::len);
    (0..d)
        .filter(|&j| {
            let first = rows[0][j];
            rows.iter().any(|r| r[j] != first)
        })
        .count()
}

/// Fits PCA on `train` with up to `k` components (fewer if the data has
/// fewer informative columns).
pub fn fit_projection(train: &[Vec<f64>], k: usize) -> Result<PcaModel> {
    let usable = informative_columns(train);
    if usable == 0 {
        return Err(Error::Degenerate(
            "every feature is constant over the training set".into(),
        ));
    }
    pca_fit(train, k.min(usable))
}

fn cosine_or_zero(a: &[f64], b: &[f64]) -> Result<f64> {
    match cosine_similarity(a, b) {
        Ok(s) => Ok(s),
        Err(Error::Degenerate(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Cosine similarities of random train-train pairs (distinct indices) and
/// random train-gen pairs in the training PCA space, and the KS distance
/// between the two samples. Draw order: for each pair, the train index and
/// then the partner index, all train-train pairs first.
pub fn pair_similarity_distributions(
    train: &[Vec<f64>],
    gen: &[Vec<f64>],
    pairs: usize,
    k: usize,
    rng: &mut RngStream,
) -> Result<PairSimilarity> {
    if pairs < MIN_PAIRS {
        return Err(Error::invalid(format!(
            "pairs = {pairs}, need at least {MIN_PAIRS}"
        )));
    }
    if train.len() < 2 || gen.len() < 2 {
        return Err(Error::Insufficient(format!(
            "need at least 2 train and 2 generated vectors, got {} and {}",
            train.len(),
            gen.len()
        )));
    }
    let model = fit_projection(train, k)?;
    let tp: Vec<Vec<f64>> = train
        .iter()
        .map(|v| pca_project(&model, v))
        .collect::<Result<_>>()?;
    let gp: Vec<Vec<f64>> = gen
        .iter()
        .map(|v| pca_project(&model, v))
        .collect::<Result<_>>()?;
    let mut tt = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let i = rng.below(tp.len());
        let mut j = rng.below(tp.len() - 1);
        if j >= i {
            j += 1;
        }
        tt.push(cosine_or_zero(&tp[i], &tp[j])?);
    }
    let mut tg = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let i = rng.below(tp.len());
        let j = rng.below(gp.len());
        tg.push(cosine_or_zero(&tp[i], &gp[j])?);
    }
    let ks = ks_two_sample(&tt, &tg)?;
    Ok(PairSimilarity {
        train_train: tt,
        train_gen: tg,
        ks,
        components: model.k(),
    })
}

/// Interval classifier on the F/G ratio fit to labeled training data.
///
/// Classes are ordered by median ratio; the boundary between neighbours is
/// the midpoint of the lower class's upper quantile and the upper class's
/// lower quantile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FgThresholds {
    /// Class labels in ascending order of median F/G ratio.
    pub classes: Vec<u32>,
    /// `classes.len() - 1` ascending cut points.
    pub boundaries: Vec<f64>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl FgThresholds {
    pub fn fit(ratios: &[f64], labels: &[u32], tail: f64) -> Result<FgThresholds> {
        if ratios.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: ratios.len(),
                right: labels.len(),
            });
        }
        if !(0.0..0.5).contains(&tail) {
            return Err(Error::invalid(format!(
                "quantile tail {tail} not in [0, 0.5)"
            )));
        }
        let mut by_class: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        for (&r, &l) in ratios.iter().zip(labels) {
            by_class.entry(l).or_default().push(r);
        }
        if by_class.len() < 2 {
            return Err(Error::Insufficient(
                "need at least two labeled classes".into(),
            ));
        }
        let mut stats: Vec<(f64, u32, Vec<f64>)> = by_class
            .into_iter()
            .map(|(l, mut v)| {
                v.sort_by(f64::total_cmp);
                (quantile(&v, 0.5), l, v)
            })
            .collect();
        stats.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let boundaries = stats
            .windows(2)
            .map(|w| 0.5 * (quantile(&w[0].2, 1.0 - tail) + quantile(&w[1].2, tail)))
            .collect();
        Ok(FgThresholds {
            classes: stats.iter().map(|s| s.1).collect(),
            boundaries,
        })
    }

    pub fn classify(&self, ratio: f64) -> u32 {
        let idx = self.boundaries.iter().take_while(|&&b| ratio > b).count();
        self.classes[idx]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub thresholds: FgThresholds,
    /// Fraction of generated images assigned to each class.
    pub prevalence: BTreeMap<u32, f64>,
    pub train_prevalence: BTreeMap<u32, f64>,
    pub coverage: BTreeMap<u32, f64>,
    pub density: BTreeMap<u32, f64>,
    /// Generated points in the top-two PC space (for plotting).
    pub gen_projection: Vec<[f64; 2]>,
    pub train_projection: Vec<[f64; 2]>,
}

pub const MIN_CLASSES: usize = 4;

/// Per-class coverage and density in the top-two training principal
/// components, with generated images assigned to classes by F/G-ratio
/// thresholds. A class with no generated images has coverage and density 0.
#[allow(clippy::too_many_arguments)]
pub fn class_metrics(
    train: &[Vec<f64>],
    labels: &[u32],
    train_ratios: &[f64],
    gen: &[Vec<f64>],
    gen_ratios: &[f64],
    k_neighbors: usize,
    tail: f64,
) -> Result<ClassMetrics> {
    if train.len() != labels.len() || train.len() != train_ratios.len() {
        return Err(Error::LengthMismatch {
            left: train.len(),
            right: labels.len().min(train_ratios.len()),
        });
    }
    if gen.len() != gen_ratios.len() {
        return Err(Error::LengthMismatch {
            left: gen.len(),
            right: gen_ratios.len(),
        });
    }
    let thresholds = FgThresholds::fit(train_ratios, labels, tail)?;
    if thresholds.classes.len() < MIN_CLASSES {
        return Err(Error::Insufficient(format!(
            "{} labeled classes, need {MIN_CLASSES}",
            thresholds.classes.len()
        )));
    }
    let model = fit_projection(train, 2)?;
    let to2 = |v: &Vec<f64>| -> Result<[f64; 2]> {
        let p = pca_project(&model, v)?;
        Ok([p[0], p.get(1).copied().unwrap_or(0.0)])
    };
    let tp: Vec<[f64; 2]> = train.iter().map(to2).collect::<Result<_>>()?;
    let gp: Vec<[f64; 2]> = gen.iter().map(to2).collect::<Result<_>>()?;
    let gen_classes: Vec<u32> = gen_ratios.iter().map(|&r| thresholds.classify(r)).collect();

    let mut prevalence = BTreeMap::new();
    let mut train_prevalence = BTreeMap::new();
    let mut coverage = BTreeMap::new();
    let mut density = BTreeMap::new();
    for &class in &thresholds.classes {
        let real: Vec<Vec<f64>> = tp
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == class)
            .map(|(p, _)| p.to_vec())
            .collect();
        if real.len() <= k_neighbors {
            return Err(Error::Insufficient(format!(
                "class {class} has {} training images, need more than {k_neighbors}",
                real.len()
            )));
        }
        let fake: Vec<Vec<f64>> = gp
            .iter()
            .zip(&gen_classes)
            .filter(|(_, &c)| c == class)
            .map(|(p, _)| p.to_vec())
            .collect();
        train_prevalence.insert(class, real.len() as f64 / train.len() as f64);
        prevalence.insert(
            class,
            if gen.is_empty() {
                0.0
            } else {
                fake.len() as f64 / gen.len() as f64
            },
        );
        let cd = if fake.is_empty() {
            None
        } else {
            Some(coverage_density(&real, &fake, k_neighbors)?)
        };
        coverage.insert(class, cd.map_or(0.0, |c| c.coverage));
        density.insert(class, cd.map_or(0.0, |c| c.density));
    }
    Ok(ClassMetrics {
        thresholds,
        prevalence,
        train_prevalence,
        coverage,
        density,
        gen_projection: gp,
        train_projection: tp,
    })
}
