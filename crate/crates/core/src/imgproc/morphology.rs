use serde::{Deserialize, Serialize};

use super::{connected_components, BinaryMask, Connectivity};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::stats::{mean, std_dev};

/// Shape descriptors of one 8-connected foreground component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionProps {
    pub area: usize,
    /// Crack length: pixel edges shared with background or the image border.
    pub perimeter: usize,
    /// Eccentricity of the second-moment ellipse, in [0, 1].
    pub eccentricity: f64,
    /// Area over the pixel count of the convex hull of pixel centers.
    pub solidity: f64,
    pub centroid: (f64, f64),
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone-chain convex hull, counter-clockwise, collinear points removed.
fn convex_hull(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn props(pixels: &[(usize, usize)], mask: &BinaryMask, labels: &[u32], label: u32) -> RegionProps {
    let w = mask.width();
    let area = pixels.len();
    let n = area as f64;
    let (sr, sc) = pixels
        .iter()
        .fold((0.0, 0.0), |(a, b), &(r, c)| (a + r as f64, b + c as f64));
    let (cr, cc) = (sr / n, sc / n);
    let (mut mrr, mut mcc, mut mrc) = (0.0, 0.0, 0.0);
    let mut perimeter = 0;
    for &(r, c) in pixels {
        let (dr, dc) = (r as f64 - cr, c as f64 - cc);
        mrr += dr * dr;
        mcc += dc * dc;
        mrc += dr * dc;
        for (nr, nc) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
            let (rr, cc2) = (r as isize + nr, c as isize + nc);
            let inside = rr >= 0
                && cc2 >= 0
                && (rr as usize) < mask.height()
                && (cc2 as usize) < w
                && labels[rr as usize * w + cc2 as usize] == label;
            if !inside {
                perimeter += 1;
            }
        }
    }
    let (a, b, c) = (mrr / n, mrc / n, mcc / n);
    let half_trace = (a + c) / 2.0;
    let root = (((a - c) / 2.0).powi(2) + b * b).sqrt();
    let (l1, l2) = (half_trace + root, (half_trace - root).max(0.0));
    let eccentricity = if l1 > 0.0 {
        (1.0 - l2 / l1).max(0.0).sqrt()
    } else {
        0.0
    };

    let hull = convex_hull(pixels.iter().map(|&(r, c)| (r as i64, c as i64)).collect());
    let solidity = if hull.len() < 3 {
        1.0
    } else {
        let (rmin, rmax) = pixels
            .iter()
            .fold((usize::MAX, 0), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
        let (cmin, cmax) = pixels
            .iter()
            .fold((usize::MAX, 0), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
        let mut hull_pixels = 0usize;
        for r in rmin..=rmax {
            for c in cmin..=cmax {
                let p = (r as i64, c as i64);
                let inside =
                    (0..hull.len()).all(|i| cross(hull[i], hull[(i + 1) % hull.len()], p) >= 0);
                hull_pixels += inside as usize;
            }
        }
        area as f64 / hull_pixels as f64
    };
    RegionProps {
        area,
        perimeter,
        eccentricity,
        solidity,
        centroid: (cr, cc),
    }
}

/// Per-component shape descriptors, one entry per 8-connected component.
pub fn region_properties(mask: &BinaryMask) -> Vec<RegionProps> {
    let labels = connected_components(mask, Connectivity::Eight);
    labels
        .regions()
        .iter()
        .enumerate()
        .map(|(i, px)| props(px, mask, labels.labels(), i as u32 + 1))
        .collect()
}

pub const MORPHOLOGY_FEATURES: [&str; 9] = [
    "count",
    "area_mean",
    "area_std",
    "perimeter_mean",
    "perimeter_std",
    "eccentricity_mean",
    "eccentricity_std",
    "solidity_mean",
    "solidity_std",
];

/// Component count plus mean and standard deviation of area, perimeter,
/// eccentricity, and solidity across components.
pub fn morphology_features(mask: &BinaryMask) -> Result<FeatureVector> {
    if mask.is_empty() {
        return Err(Error::Degenerate("morphology of an empty mask".into()));
    }
    let regions = region_properties(mask);
    let column = |f: fn(&RegionProps) -> f64| regions.iter().map(f).collect::<Vec<f64>>();
    let mut out = FeatureVector::new();
    out.push("count", regions.len() as f64);
    for (name, vals) in [
        ("area", column(|p| p.area as f64)),
        ("perimeter", column(|p| p.perimeter as f64)),
        ("eccentricity", column(|p| p.eccentricity)),
        ("solidity", column(|p| p.solidity)),
    ] {
        out.push(format!("{name}_mean"), mean(&vals));
        out.push(format!("{name}_std"), std_dev(&vals));
    }
    Ok(out)
}
