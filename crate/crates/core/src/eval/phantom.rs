use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::io::{write_png, LABELS_FILE};
use crate::rng::{split_rng, RngStream};

/// Glandular-fraction range of each density class, fattiest first.
pub const PHANTOM_CLASS_RANGES: [(f64, f64); 4] =
    [(0.06, 0.14), (0.20, 0.32), (0.38, 0.52), (0.60, 0.78)];

/// Class mix of the reference training ensemble.
pub const PHANTOM_TRAIN_MIX: [f64; 4] = [0.1, 0.4, 0.4, 0.1];

const BUMPS: usize = 12;

fn noisy(rng: &mut RngStream, mean: f64, sd: f64, lo: f64, hi: f64) -> u8 {
    (mean + sd * rng.standard_normal()).round().clamp(lo, hi) as u8
}

/// Procedural tissue slice used as a stand-in anatomical ensemble.
///
/// A half-ellipse body against a zero background holds fat, a glandular
/// region cut from a smooth random field at the quantile that gives the
/// class's glandular fraction, and a few thin bright ligament arcs.
pub fn generate_phantom(rng: &mut RngStream, class: usize, size: usize) -> Result<GrayImage> {
    let &(glo, ghi) = PHANTOM_CLASS_RANGES
        .get(class)
        .ok_or_else(|| Error::invalid(format!("phantom class {class} not in 0..4")))?;
    if size < 64 {
        return Err(Error::invalid(format!("phantom size {size} below 64")));
    }
    let s = size as f64;
    let (cy, cx, ry, rx) = (s / 2.0, 0.0, 0.46 * s, 0.85 * s);
    let inside = |r: usize, c: usize| {
        let dy = (r as f64 + 0.5 - cy) / ry;
        let dx = (c as f64 + 0.5 - cx) / rx;
        dy * dy + dx * dx < 1.0
    };
    let random_inside = |rng: &mut RngStream| loop {
        let r = rng.below(size);
        let c = rng.below(size);
        if inside(r, c) {
            return (r as f64, c as f64);
        }
    };

    let bumps: Vec<(f64, f64, f64, f64)> = (0..BUMPS)
        .map(|_| {
            let (r, c) = random_inside(rng);
            let sigma = s / 20.0 + rng.uniform() * (s / 8.0 - s / 20.0);
            let amp = 0.5 + rng.uniform();
            (r, c, sigma, amp)
        })
        .collect();
    let field = |r: usize, c: usize| -> f64 {
        bumps
            .iter()
            .map(|&(br, bc, sg, a)| {
                let d2 = (r as f64 - br).powi(2) + (c as f64 - bc).powi(2);
                a * (-d2 / (2.0 * sg * sg)).exp()
            })
            .sum()
    };
    let mut body_values = Vec::new();
    let mut values = vec![f64::NAN; size * size];
    for r in 0..size {
        for c in 0..size {
            if inside(r, c) {
                let v = field(r, c);
                values[r * size + c] = v;
                body_values.push(v);
            }
        }
    }
    let fraction = glo + rng.uniform() * (ghi - glo);
    body_values.sort_by(|a, b| b.total_cmp(a));
    let cut_idx = ((fraction * body_values.len() as f64) as usize).min(body_values.len() - 1);
    let cut = body_values[cut_idx];

    let mut img = GrayImage::new(size, size);
    for r in 0..size {
        for c in 0..size {
            let v = values[r * size + c];
            if v.is_nan() {
                continue;
            }
            let px = if v > cut {
                noisy(rng, 170.0, 10.0, 140.0, 200.0)
            } else {
                noisy(rng, 80.0, 12.0, 40.0, 120.0)
            };
            img.set(r, c, px);
        }
    }

    let arcs = 3 + rng.below(4);
    for _ in 0..arcs {
        let p0 = random_inside(rng);
        let p1 = random_inside(rng);
        let p2 = random_inside(rng);
        let steps = (4.0 * s) as usize;
        for t in 0..=steps {
            let t = t as f64 / steps as f64;
            let u = 1.0 - t;
            let y = u * u * p0.0 + 2.0 * u * t * p1.0 + t * t * p2.0;
            let x = u * u * p0.1 + 2.0 * u * t * p1.1 + t * t * p2.1;
            let (r, c) = (y.round() as usize, x.round() as usize);
            if r < size && c < size && inside(r, c) {
                img.set(r, c, noisy(rng, 235.0, 5.0, 215.0, 255.0));
            }
        }
    }
    Ok(img)
}

/// Draws a class from `weights` (need not be normalized).
pub fn sample_class(rng: &mut RngStream, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.uniform() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

/// Writes `count` phantom PNGs (`phantom_000000.png`, ...) and a labels file
/// into `dir`. Image `i` uses stream `i` of `seed`.
pub fn write_phantom_ensemble(
    dir: &Path,
    count: usize,
    seed: u64,
    mix: &[f64],
    size: usize,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut labels = BTreeMap::new();
    for i in 0..count {
        let mut rng = split_rng(seed, i as u64);
        let class = sample_class(&mut rng, mix);
        let name = format!("phantom_{i:06}.png");
        write_png(&dir.join(&name), &generate_phantom(&mut rng, class, size)?)?;
        labels.insert(name, class as u32);
    }
    let text = serde_json::to_string_pretty(&labels).expect("labels serialize");
    fs::write(dir.join(LABELS_FILE), text).map_err(|e| Error::io(dir.join(LABELS_FILE), e))
}
