use serde::{Deserialize, Serialize};

use super::{connected_components, BinaryMask, Connectivity};
use crate::features::FeatureVector;
use crate::stats::{mean, std_dev};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SkeletonStats {
    pub branch_count: usize,
    pub junction_count: usize,
    /// Junctions per skeleton pixel.
    pub junction_density: f64,
    /// Pixel counts of each branch.
    pub branch_lengths: Vec<usize>,
    pub total_length: usize,
}

impl SkeletonStats {
    pub fn branch_length_mean(&self) -> f64 {
        mean(&self.lengths_f64())
    }

    pub fn branch_length_std(&self) -> f64 {
        std_dev(&self.lengths_f64())
    }

    fn lengths_f64(&self) -> Vec<f64> {
        self.branch_lengths.iter().map(|&l| l as f64).collect()
    }

    pub fn to_features(&self) -> FeatureVector {
        let mut f = FeatureVector::new();
        f.push("branch_count", self.branch_count as f64);
        f.push("junction_count", self.junction_count as f64);
        f.push("junction_density", self.junction_density);
        f.push("branch_length_mean", self.branch_length_mean());
        f.push("branch_length_std", self.branch_length_std());
        f.push("total_length", self.total_length as f64);
        f
    }
}

/// Junction and branch census of a thin skeleton.
///
/// A junction pixel has three or more skeleton 8-neighbors; 8-adjacent
/// junction pixels form a single junction. Branches are the 8-connected
/// pieces left after removing junction pixels.
pub fn skeleton_statistics(skeleton: &BinaryMask) -> SkeletonStats {
    let (w, h) = (skeleton.width(), skeleton.height());
    let total_length = skeleton.count();
    if total_length == 0 {
        return SkeletonStats::default();
    }
    let junction_px = BinaryMask::from_fn(w, h, |r, c| {
        skeleton.get(r, c) && skeleton.neighbor_count(r, c) >= 3
    });
    let junction_count = connected_components(&junction_px, Connectivity::Eight).count();
    let branches = BinaryMask::from_fn(w, h, |r, c| skeleton.get(r, c) && !junction_px.get(r, c));
    let branch_map = connected_components(&branches, Connectivity::Eight);
    SkeletonStats {
        branch_count: branch_map.count(),
        junction_count,
        junction_density: junction_count as f64 / total_length as f64,
        branch_lengths: branch_map.areas(),
        total_length,
    }
}
