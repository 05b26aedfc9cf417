//! Voronoi model: four classes by region count, with region intensity
//! perfectly rank-correlated with region area.

mod analyze;
mod generate;

pub use analyze::{
    check_rank_correlation, classify_region_count, extract_regions, implicit_context,
    implicit_context_of, implicit_context_pca, ContextPca, ImplicitContextStats, RegionClass,
    Regions, VoronoiConfig, MIN_PCA_TRAIN,
};
pub use generate::{
    generate_voronoi, generate_voronoi_regions, intensity_levels, VoronoiTruth, INTENSITY_LEVELS,
    MIN_SEED_DISTANCE, VORONOI_CLASSES,
};

use crate::error::Result;
use crate::image::GrayImage;
use crate::report::{Check, ImageResult};

#[derive(Clone, Debug, PartialEq)]
pub struct VoronoiAnalysis {
    pub region_count: usize,
    pub class: RegionClass,
    /// `None` with fewer than two regions.
    pub rank_rho: Option<f64>,
    pub context: ImplicitContextStats,
}

impl VoronoiAnalysis {
    pub fn to_result(&self, file: &str, config: &VoronoiConfig) -> ImageResult {
        let mut out = ImageResult::new(file);
        out.add(
            "region_class",
            Check::new(
                self.region_count as f64,
                matches!(self.class, RegionClass::Class(_)),
            ),
        );
        out.add(
            "rank_correlation",
            match self.rank_rho {
                Some(rho) => Check::new(rho, rho >= config.rank_threshold),
                None => Check::undefined(false),
            },
        );
        out
    }
}

pub fn analyze_voronoi(image: &GrayImage, config: &VoronoiConfig) -> Result<VoronoiAnalysis> {
    let regions = extract_regions(image, config.sauvola, config.min_region_area)?;
    let count = regions.count();
    let rank_rho = (count >= 2)
        .then(|| check_rank_correlation(&regions.areas, &regions.mean_intensities))
        .transpose()?;
    Ok(VoronoiAnalysis {
        region_count: count,
        class: classify_region_count(count, config.class_tolerance),
        rank_rho,
        context: implicit_context_of(&regions),
    })
}

#[cfg(test)]
mod tests;
