//! Image-processing primitives for recovering context from rasters.

mod components;
mod glcm;
mod mask;
mod morphology;
mod sauvola;
mod skeleton;
mod skeleton_stats;

pub use components::{connected_components, Connectivity, LabelMap};
pub use glcm::{glcm_features, GlcmConfig};
pub use mask::BinaryMask;
pub use morphology::{morphology_features, region_properties, RegionProps, MORPHOLOGY_FEATURES};
pub use sauvola::{sauvola_threshold, SauvolaParams};
pub use skeleton::skeletonize;
pub use skeleton_stats::{skeleton_statistics, SkeletonStats};

/// Neighbor offsets in ring order N, NE, E, SE, S, SW, W, NW.
pub(crate) const RING: [(isize, isize); 8] = [
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
];
