//! Model-agnostic comparison of two image ensembles: hand-crafted feature
//! families, PCA, cosine-similarity pair distributions and KS distances,
//! plus per-class coverage, density and prevalence.

mod compare;
mod phantom;
mod tissue;

pub use compare::{
    class_metrics, fit_projection, pair_similarity_distributions, ClassMetrics, FgThresholds,
    PairSimilarity, MIN_CLASSES, MIN_PAIRS,
};
pub use phantom::{
    generate_phantom, sample_class, write_phantom_ensemble, PHANTOM_CLASS_RANGES, PHANTOM_TRAIN_MIX,
};
pub use tissue::{
    extract_features, fg_ratio, segment_tissues, Tissue, TissueConfig, TissueMasks, FAMILIES, FAT,
    GLANDULAR, LIGAMENT,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::imgproc::GlcmConfig;
use crate::rng::RngStream;
use crate::stats::{ks_two_sample, DEFAULT_K_NEIGHBORS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub tissues: TissueConfig,
    pub glcm: GlcmConfig,
    pub pairs: usize,
    pub components: usize,
    pub k_neighbors: usize,
    /// Tail probability of the quantiles that place F/G class boundaries.
    pub quantile_tail: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            tissues: TissueConfig::default(),
            glcm: GlcmConfig::default(),
            pairs: 10_000,
            components: 10,
            k_neighbors: DEFAULT_K_NEIGHBORS,
            quantile_tail: 0.025,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyKs {
    pub family: String,
    pub dimensions: usize,
    pub train_images: usize,
    pub gen_images: usize,
    /// `None` when too few images have this family defined.
    pub ks: Option<f64>,
    /// `pca-cosine` for multi-feature families, `raw` for scalar ones.
    pub method: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// `None` when fewer than two vectors on either side are complete.
    pub overall_ks: Option<f64>,
    pub overall_components: usize,
    pub families: Vec<FamilyKs>,
    pub classes: Option<ClassMetrics>,
    /// Why class metrics are absent although labels were given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes_skipped: Option<String>,
}

/// Complete rows of a feature subset, with the indices they came from.
fn complete_rows(set: &[FeatureVector], prefix: &str) -> (Vec<usize>, Vec<Vec<f64>>) {
    set.iter()
        .enumerate()
        .filter_map(|(i, f)| {
            let sel = if prefix.is_empty() {
                f.clone()
            } else {
                f.select(prefix)
            };
            sel.values().map(|v| (i, v))
        })
        .unzip()
}

/// Compares two ensembles' feature vectors.
///
/// Each family is compared on the images whose values for that family are
/// all defined; the overall distance and class metrics use fully defined
/// vectors only. Random pairs come from `rng` in a fixed order: all features
/// first, then each family. Class metrics need one label per training
/// vector; pass `None` to skip them.
pub fn compare_features(
    train: &[FeatureVector],
    labels: Option<&[u32]>,
    gen: &[FeatureVector],
    config: &EvalConfig,
    rng: &mut RngStream,
) -> Result<Comparison> {
    let names: Vec<&str> = train
        .first()
        .map(|f| f.names().collect())
        .unwrap_or_default();
    for f in train.iter().chain(gen) {
        if !f.names().eq(names.iter().copied()) {
            return Err(Error::invalid(
                "feature vectors carry different feature names",
            ));
        }
    }
    if let Some(l) = labels {
        if l.len() != train.len() {
            return Err(Error::LengthMismatch {
                left: l.len(),
                right: train.len(),
            });
        }
    }
    let (train_idx, all_train) = complete_rows(train, "");
    let (gen_idx, all_gen) = complete_rows(gen, "");
    let (overall_ks, overall_components) = if all_train.len() >= 2 && all_gen.len() >= 2 {
        let p = pair_similarity_distributions(
            &all_train,
            &all_gen,
            config.pairs,
            config.components,
            rng,
        )?;
        (Some(p.ks), p.components)
    } else {
        (None, 0)
    };

    let mut families = Vec::new();
    for family in FAMILIES {
        let (_, t) = complete_rows(train, family);
        let (_, g) = complete_rows(gen, family);
        let dims = names.iter().filter(|n| n.starts_with(family)).count();
        if dims == 0 {
            continue;
        }
        let (ks, method) = if dims == 1 {
            let a: Vec<f64> = t.iter().map(|r| r[0]).collect();
            let b: Vec<f64> = g.iter().map(|r| r[0]).collect();
            let ks = if a.is_empty() || b.is_empty() {
                None
            } else {
                Some(ks_two_sample(&a, &b)?)
            };
            (ks, "raw")
        } else {
            let ks = if t.len() >= 2 && g.len() >= 2 {
                Some(
                    pair_similarity_distributions(
                        &t,
                        &g,
                        config.pairs,
                        config.components.min(dims),
                        rng,
                    )?
                    .ks,
                )
            } else {
                None
            };
            (ks, "pca-cosine")
        };
        families.push(FamilyKs {
            family: family.to_string(),
            dimensions: dims,
            train_images: t.len(),
            gen_images: g.len(),
            ks,
            method: method.to_string(),
        });
    }

    let mut classes_skipped = None;
    let classes = match labels {
        Some(labels) => {
            let ratio = |set: &[FeatureVector], idx: &[usize]| -> Vec<f64> {
                idx.iter()
                    .map(|&i| set[i].get("fg_ratio").unwrap_or(f64::NAN))
                    .collect()
            };
            let tl: Vec<u32> = train_idx.iter().map(|&i| labels[i]).collect();
            match class_metrics(
                &all_train,
                &tl,
                &ratio(train, &train_idx),
                &all_gen,
                &ratio(gen, &gen_idx),
                config.k_neighbors,
                config.quantile_tail,
            ) {
                Ok(m) => Some(m),
                Err(Error::Insufficient(msg)) => {
                    log::warn!("class metrics skipped: {msg}");
                    classes_skipped = Some(msg);
                    None
                }
                Err(e) => return Err(e),
            }
        }
        None => None,
    };
    Ok(Comparison {
        overall_ks,
        overall_components,
        families,
        classes,
        classes_skipped,
    })
}

#[cfg(test)]
mod tests;
