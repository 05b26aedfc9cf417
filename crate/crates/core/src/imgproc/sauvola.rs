use serde::{Deserialize, Serialize};

use super::BinaryMask;
use crate::error::{Error, Result};
use crate::image::GrayImage;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SauvolaParams {
    /// Odd window side, ≥ 3.
    pub window: usize,
    pub k: f64,
    /// Dynamic range of the standard deviation.
    pub r: f64,
}

impl Default for SauvolaParams {
    fn default() -> Self {
        SauvolaParams {
            window: 15,
            k: 0.2,
            r: 128.0,
        }
    }
}

/// Sauvola local thresholding.
///
/// A pixel is foreground when its intensity exceeds `m·(1 + k·(s/R − 1))`,
/// where `m` and `s` are the mean and population standard deviation over the
/// window centered on it. Borders are handled by edge replication.
pub fn sauvola_threshold(image: &GrayImage, params: SauvolaParams) -> Result<BinaryMask> {
    let SauvolaParams { window, k, r } = params;
    if window < 3 || window % 2 == 0 {
        return Err(Error::invalid(format!(
            "Sauvola window {window} must be odd and >= 3"
        )));
    }
    let (w, h) = (image.width(), image.height());
    if w == 0 || h == 0 {
        return Ok(BinaryMask::new(w, h));
    }
    let rad = window / 2;
    let pw = w + 2 * rad;
    let ph = h + 2 * rad;
    // Integral images over the replicate-padded raster, with a zero guard row/column.
    let mut sum = vec![0u64; (pw + 1) * (ph + 1)];
    let mut sq = vec![0u64; (pw + 1) * (ph + 1)];
    for y in 0..ph {
        let sy = (y as isize - rad as isize).clamp(0, h as isize - 1) as usize;
        let mut row_sum = 0u64;
        let mut row_sq = 0u64;
        for x in 0..pw {
            let sx = (x as isize - rad as isize).clamp(0, w as isize - 1) as usize;
            let v = image.get(sy, sx) as u64;
            row_sum += v;
            row_sq += v * v;
            let idx = (y + 1) * (pw + 1) + (x + 1);
            sum[idx] = sum[idx - (pw + 1)] + row_sum;
            sq[idx] = sq[idx - (pw + 1)] + row_sq;
        }
    }
    let area = (window * window) as f64;
    let rect = |tab: &[u64], y0: usize, x0: usize| -> u64 {
        let (y1, x1) = (y0 + window, x0 + window);
        tab[y1 * (pw + 1) + x1] + tab[y0 * (pw + 1) + x0]
            - tab[y0 * (pw + 1) + x1]
            - tab[y1 * (pw + 1) + x0]
    };
    Ok(BinaryMask::from_fn(w, h, |row, col| {
        // padded window for (row, col) starts at (row, col)
        let s1 = rect(&sum, row, col) as f64;
        let s2 = rect(&sq, row, col) as f64;
        let m = s1 / area;
        let var = (s2 / area - m * m).max(0.0);
        let threshold = m * (1.0 + k * (var.sqrt() / r - 1.0));
        image.get(row, col) as f64 > threshold
    }))
}
