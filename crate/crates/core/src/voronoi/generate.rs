use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{GrayImage, SCM_SIZE};
use crate::rng::RngStream;

pub const VORONOI_CLASSES: [usize; 4] = [16, 32, 48, 64];
pub const INTENSITY_LEVELS: usize = 128;
pub const MIN_SEED_DISTANCE: f64 = 8.0;

const MAX_CANDIDATE_TRIES: usize = 10_000;
const MAX_RESTARTS: usize = 100;

/// The predefined region intensities: 128 evenly spaced values in [1, 254].
pub fn intensity_levels() -> [u8; INTENSITY_LEVELS] {
    std::array::from_fn(|i| (1.0 + i as f64 * 253.0 / 127.0).round() as u8)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoronoiTruth {
    /// Nominal class; equals the region count for uncorrupted images.
    pub class: usize,
    /// Seed points as (x, y) in pixel coordinates.
    pub seeds: Vec<(f64, f64)>,
    pub intensities: Vec<u8>,
    /// Non-edge pixel count per region.
    pub areas: Vec<usize>,
}

impl VoronoiTruth {
    pub fn region_count(&self) -> usize {
        self.seeds.len()
    }
}

fn sample_seeds(rng: &mut RngStream, count: usize, size: f64) -> Result<Vec<(f64, f64)>> {
    let min2 = MIN_SEED_DISTANCE * MIN_SEED_DISTANCE;
    'restart: for _ in 0..MAX_RESTARTS {
        let mut seeds: Vec<(f64, f64)> = Vec::with_capacity(count);
        while seeds.len() < count {
            let mut placed = false;
            for _ in 0..MAX_CANDIDATE_TRIES {
                let p = (rng.uniform() * size, rng.uniform() * size);
                if seeds
                    .iter()
                    .all(|q| (p.0 - q.0).powi(2) + (p.1 - q.1).powi(2) >= min2)
                {
                    seeds.push(p);
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'restart;
            }
        }
        return Ok(seeds);
    }
    Err(Error::Degenerate(format!(
        "could not place {count} seeds after {MAX_RESTARTS} restarts"
    )))
}

/// Nearest-seed label per pixel (ties to the lowest index).
pub(crate) fn rasterize(seeds: &[(f64, f64)], size: usize) -> Vec<u32> {
    let mut labels = vec![0u32; size * size];
    for r in 0..size {
        let y = r as f64 + 0.5;
        for c in 0..size {
            let x = c as f64 + 0.5;
            let mut best = (f64::INFINITY, 0);
            for (i, s) in seeds.iter().enumerate() {
                let d = (x - s.0).powi(2) + (y - s.1).powi(2);
                if d < best.0 {
                    best = (d, i);
                }
            }
            labels[r * size + c] = best.1 as u32;
        }
    }
    labels
}

/// Edge flags: a pixel is edge iff some 4-neighbor carries another label.
pub(crate) fn edge_flags(labels: &[u32], size: usize) -> Vec<bool> {
    let mut edge = vec![false; labels.len()];
    for r in 0..size {
        for c in 0..size {
            let l = labels[r * size + c];
            let differs = (r > 0 && labels[(r - 1) * size + c] != l)
                || (r + 1 < size && labels[(r + 1) * size + c] != l)
                || (c > 0 && labels[r * size + c - 1] != l)
                || (c + 1 < size && labels[r * size + c + 1] != l);
            edge[r * size + c] = differs;
        }
    }
    edge
}

pub fn generate_voronoi(rng: &mut RngStream, class: usize) -> Result<(GrayImage, VoronoiTruth)> {
    if !VORONOI_CLASSES.contains(&class) {
        return Err(Error::invalid(format!(
            "voronoi class {class} not in {VORONOI_CLASSES:?}"
        )));
    }
    generate_voronoi_regions(rng, class, class)
}

/// Same construction with an arbitrary region count; `class` is recorded as
/// the nominal label only.
pub fn generate_voronoi_regions(
    rng: &mut RngStream,
    class: usize,
    regions: usize,
) -> Result<(GrayImage, VoronoiTruth)> {
    if !(1..=INTENSITY_LEVELS).contains(&regions) {
        return Err(Error::invalid(format!(
            "region count {regions} not in 1..={INTENSITY_LEVELS}"
        )));
    }
    let size = SCM_SIZE;
    let seeds = sample_seeds(rng, regions, size as f64)?;
    let labels = rasterize(&seeds, size);
    let edge = edge_flags(&labels, size);
    let mut areas = vec![0usize; regions];
    for (l, e) in labels.iter().zip(&edge) {
        if !e {
            areas[*l as usize] += 1;
        }
    }

    let levels = intensity_levels();
    let mut pick: Vec<usize> = (0..INTENSITY_LEVELS).collect();
    rng.shuffle(&mut pick);
    let mut chosen: Vec<u8> = pick[..regions].iter().map(|&i| levels[i]).collect();
    chosen.sort_unstable();
    // area rank order, ties by seed index
    let mut order: Vec<usize> = (0..regions).collect();
    order.sort_by_key(|&i| (areas[i], i));
    let mut intensities = vec![0u8; regions];
    for (rank, &region) in order.iter().enumerate() {
        intensities[region] = chosen[rank];
    }

    let pixels = labels
        .iter()
        .zip(&edge)
        .map(|(&l, &e)| if e { 0 } else { intensities[l as usize] })
        .collect();
    let image = GrayImage::from_pixels(size, size, pixels)?;
    Ok((
        image,
        VoronoiTruth {
            class,
            seeds,
            intensities,
            areas,
        },
    ))
}
