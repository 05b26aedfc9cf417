use serde::{Deserialize, Serialize};

use super::generate::VORONOI_CLASSES;
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::image::GrayImage;
use crate::imgproc::{
    connected_components, sauvola_threshold, skeleton_statistics, skeletonize, BinaryMask,
    Connectivity, LabelMap, SauvolaParams,
};
use crate::stats::{ks_two_sample, mean, pca_fit, pca_project, spearman_rho, std_dev, PcaModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VoronoiConfig {
    pub sauvola: SauvolaParams,
    /// Allowed distance between a recovered count and a class count.
    pub class_tolerance: usize,
    /// Components smaller than this are slivers of edge, not regions.
    pub min_region_area: usize,
    pub rank_threshold: f64,
}

impl Default for VoronoiConfig {
    fn default() -> Self {
        VoronoiConfig {
            sauvola: SauvolaParams {
                window: 3,
                k: 0.2,
                r: 128.0,
            },
            class_tolerance: 1,
            min_region_area: 5,
            rank_threshold: 0.9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Regions {
    pub labels: LabelMap,
    /// Thinned edge mask separating the regions.
    pub skeleton: BinaryMask,
    pub areas: Vec<usize>,
    pub mean_intensities: Vec<f64>,
}

impl Regions {
    pub fn count(&self) -> usize {
        self.areas.len()
    }
}

/// Region recovery: the inverted Sauvola mask marks edges, which are thinned
/// to one-pixel lines; regions are the 4-connected components of the rest.
/// Mean intensity uses only the pixels that binarized as foreground, so the
/// dark edge pixels released by thinning do not bias it.
/// Components below `min_area` pixels are discarded.
pub fn extract_regions(
    image: &GrayImage,
    params: SauvolaParams,
    min_area: usize,
) -> Result<Regions> {
    let fg = sauvola_threshold(image, params)?;
    let skeleton = skeletonize_anchored(&fg.invert());
    let labels =
        connected_components(&skeleton.invert(), Connectivity::Four).without_smaller_than(min_area);
    if labels.count() == 0 {
        return Err(Error::Degenerate("no regions found".into()));
    }
    let n = labels.count();
    let mut areas = vec![0usize; n];
    let mut sum = vec![0.0; n];
    let mut fg_n = vec![0usize; n];
    let mut all_sum = vec![0.0; n];
    for r in 0..image.height() {
        for c in 0..image.width() {
            let l = labels.get(r, c) as usize;
            if l == 0 {
                continue;
            }
            let v = image.get(r, c) as f64;
            areas[l - 1] += 1;
            all_sum[l - 1] += v;
            if fg.get(r, c) {
                sum[l - 1] += v;
                fg_n[l - 1] += 1;
            }
        }
    }
    let mean_intensities = (0..n)
        .map(|i| {
            if fg_n[i] > 0 {
                sum[i] / fg_n[i] as f64
            } else {
                all_sum[i] / areas[i] as f64
            }
        })
        .collect();
    Ok(Regions {
        labels,
        skeleton,
        areas,
        mean_intensities,
    })
}

/// Thins an edge mask without letting lines retreat from the image border:
/// the mask is thinned inside a two-pixel foreground frame, then cropped.
fn skeletonize_anchored(edges: &BinaryMask) -> BinaryMask {
    const PAD: usize = 2;
    let (w, h) = (edges.width(), edges.height());
    let framed = BinaryMask::from_fn(w + 2 * PAD, h + 2 * PAD, |r, c| {
        if r < PAD || c < PAD || r >= h + PAD || c >= w + PAD {
            true
        } else {
            edges.get(r - PAD, c - PAD)
        }
    });
    let thin = skeletonize(&framed);
    BinaryMask::from_fn(w, h, |r, c| thin.get(r + PAD, c + PAD))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionClass {
    Class(usize),
    OffClass(usize),
}

impl RegionClass {
    /// Histogram bin name: the class count or `off:<count>`.
    pub fn bin(&self) -> String {
        match self {
            RegionClass::Class(c) => c.to_string(),
            RegionClass::OffClass(n) => format!("off:{n}"),
        }
    }
}

pub fn classify_region_count(count: usize, tolerance: usize) -> RegionClass {
    let hits: Vec<usize> = VORONOI_CLASSES
        .iter()
        .copied()
        .filter(|c| c.abs_diff(count) <= tolerance)
        .collect();
    match hits.as_slice() {
        [c] => RegionClass::Class(*c),
        _ => RegionClass::OffClass(count),
    }
}

pub fn check_rank_correlation(areas: &[usize], intensities: &[f64]) -> Result<f64> {
    if areas.len() < 2 {
        return Err(Error::Insufficient(format!(
            "{} regions, need 2",
            areas.len()
        )));
    }
    let a: Vec<f64> = areas.iter().map(|&x| x as f64).collect();
    // constant input carries no ordering; count it as uncorrelated
    Ok(spearman_rho(&a, intensities)?.unwrap_or(0.0))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ImplicitContextStats {
    pub region_count: f64,
    pub junction_count: f64,
    pub junction_density: f64,
    pub edge_length_mean: f64,
    pub edge_length_std: f64,
    pub area_mean: f64,
    pub area_std: f64,
}

impl ImplicitContextStats {
    pub const NAMES: [&'static str; 7] = [
        "region_count",
        "junction_count",
        "junction_density",
        "edge_length_mean",
        "edge_length_std",
        "area_mean",
        "area_std",
    ];

    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.region_count,
            self.junction_count,
            self.junction_density,
            self.edge_length_mean,
            self.edge_length_std,
            self.area_mean,
            self.area_std,
        ]
    }

    pub fn to_features(&self) -> FeatureVector {
        let mut f = FeatureVector::new();
        for (name, v) in Self::NAMES.iter().zip(self.to_vec()) {
            f.push(*name, v);
        }
        f
    }
}

pub fn implicit_context_of(regions: &Regions) -> ImplicitContextStats {
    let sk = skeleton_statistics(&regions.skeleton);
    let areas: Vec<f64> = regions.areas.iter().map(|&a| a as f64).collect();
    ImplicitContextStats {
        region_count: regions.count() as f64,
        junction_count: sk.junction_count as f64,
        junction_density: sk.junction_density,
        edge_length_mean: sk.branch_length_mean(),
        edge_length_std: sk.branch_length_std(),
        area_mean: mean(&areas),
        area_std: std_dev(&areas),
    }
}

pub fn implicit_context(image: &GrayImage, config: &VoronoiConfig) -> Result<ImplicitContextStats> {
    Ok(implicit_context_of(&extract_regions(
        image,
        config.sauvola,
        config.min_region_area,
    )?))
}

pub const MIN_PCA_TRAIN: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct ContextPca {
    pub model: PcaModel,
    pub train: Vec<Vec<f64>>,
    pub test: Vec<Vec<f64>>,
    /// KS statistic per projected coordinate.
    pub ks: Vec<f64>,
}

pub fn implicit_context_pca(
    train: &[ImplicitContextStats],
    test: &[ImplicitContextStats],
) -> Result<ContextPca> {
    if train.len() < MIN_PCA_TRAIN {
        return Err(Error::Insufficient(format!(
            "{} training images, need {MIN_PCA_TRAIN}",
            train.len()
        )));
    }
    if test.is_empty() {
        return Err(Error::Insufficient("empty test ensemble".into()));
    }
    let rows: Vec<Vec<f64>> = train.iter().map(|s| s.to_vec()).collect();
    let model = pca_fit(&rows, 2)?;
    let project = |set: &[ImplicitContextStats]| -> Result<Vec<Vec<f64>>> {
        set.iter()
            .map(|s| pca_project(&model, &s.to_vec()))
            .collect()
    };
    let train_p = project(train)?;
    let test_p = project(test)?;
    let ks = (0..model.k())
        .map(|j| {
            let a: Vec<f64> = train_p.iter().map(|p| p[j]).collect();
            let b: Vec<f64> = test_p.iter().map(|p| p[j]).collect();
            ks_two_sample(&a, &b)
        })
        .collect::<Result<_>>()?;
    Ok(ContextPca {
        model,
        train: train_p,
        test: test_p,
        ks,
    })
}
