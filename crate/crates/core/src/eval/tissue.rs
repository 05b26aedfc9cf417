use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::image::GrayImage;
use crate::imgproc::{
    glcm_features, morphology_features, skeleton_statistics, skeletonize, BinaryMask, GlcmConfig,
    MORPHOLOGY_FEATURES,
};

pub const FAT: &str = "fat";
pub const GLANDULAR: &str = "glandular";
pub const LIGAMENT: &str = "ligament";

/// Closed intensity interval `[lo, hi]` for one tissue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tissue {
    pub name: String,
    pub lo: u8,
    pub hi: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TissueConfig {
    pub tissues: Vec<Tissue>,
}

impl Default for TissueConfig {
    fn default() -> Self {
        let t = |name: &str, lo, hi| Tissue {
            name: name.into(),
            lo,
            hi,
        };
        TissueConfig {
            tissues: vec![
                t(FAT, 40, 120),
                t(GLANDULAR, 140, 200),
                t(LIGAMENT, 215, 255),
            ],
        }
    }
}

impl TissueConfig {
    /// Intervals must be well-formed, pairwise disjoint and include the
    /// fat, glandular and ligament tissues the features rely on.
    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.tissues.iter().enumerate() {
            if a.lo > a.hi {
                return Err(Error::invalid(format!("tissue {} has lo > hi", a.name)));
            }
            for b in &self.tissues[..i] {
                if a.name == b.name {
                    return Err(Error::invalid(format!("tissue {} listed twice", a.name)));
                }
                if a.lo <= b.hi && b.lo <= a.hi {
                    return Err(Error::invalid(format!(
                        "tissues {} and {} overlap",
                        b.name, a.name
                    )));
                }
            }
        }
        for needed in [FAT, GLANDULAR, LIGAMENT] {
            if !self.tissues.iter().any(|t| t.name == needed) {
                return Err(Error::invalid(format!("tissue config lacks {needed}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TissueMasks {
    pub masks: Vec<(String, BinaryMask)>,
}

impl TissueMasks {
    pub fn get(&self, name: &str) -> Option<&BinaryMask> {
        self.masks.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }
}

/// Global thresholding: a pixel belongs to the tissue whose interval holds it.
pub fn segment_tissues(image: &GrayImage, config: &TissueConfig) -> Result<TissueMasks> {
    config.validate()?;
    let masks = config
        .tissues
        .iter()
        .map(|t| {
            let m = BinaryMask::from_fn(image.width(), image.height(), |r, c| {
                (t.lo..=t.hi).contains(&image.get(r, c))
            });
            (t.name.clone(), m)
        })
        .collect();
    Ok(TissueMasks { masks })
}

/// Fat pixel count over glandular pixel count.
pub fn fg_ratio(masks: &TissueMasks) -> Result<f64> {
    let fat = masks
        .get(FAT)
        .ok_or_else(|| Error::invalid("no fat mask"))?
        .count();
    let gland = masks
        .get(GLANDULAR)
        .ok_or_else(|| Error::invalid("no glandular mask"))?
        .count();
    if gland == 0 {
        return Err(Error::Degenerate("empty glandular mask".into()));
    }
    Ok(fat as f64 / gland as f64)
}

/// Feature families used by the ensemble comparison, in output order.
pub const FAMILIES: [&str; 4] = ["texture", "morphology", "skeleton", "fg_ratio"];

/// Texture (GLCM of the whole image), morphology of the glandular mask,
/// skeleton statistics of the thinned ligament mask, and the F/G ratio.
/// A family that cannot be computed contributes missing values, so the
/// vector keeps the same names for every image.
pub fn extract_features(
    image: &GrayImage,
    tissues: &TissueConfig,
    glcm: &GlcmConfig,
) -> Result<FeatureVector> {
    let masks = segment_tissues(image, tissues)?;
    let mut out = FeatureVector::new();

    let texture = glcm_features(image, glcm)?;
    out.extend_prefixed("texture", texture);

    let gland = masks.get(GLANDULAR).expect("validated");
    match morphology_features(gland) {
        Ok(f) => out.extend_prefixed("morphology", f),
        Err(Error::Degenerate(_)) => {
            for name in MORPHOLOGY_FEATURES {
                out.push_opt(format!("morphology.{name}"), None);
            }
        }
        Err(e) => return Err(e),
    }

    let ligament = masks.get(LIGAMENT).expect("validated");
    out.extend_prefixed(
        "skeleton",
        skeleton_statistics(&skeletonize(ligament)).to_features(),
    );

    out.push_opt("fg_ratio", fg_ratio(&masks).ok());
    Ok(out)
}
