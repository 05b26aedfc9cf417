use crate::error::{Error, Result};

/// Side length of every stochastic-context-model realization.
pub const SCM_SIZE: usize = 256;

/// Single-channel 8-bit raster stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl std::fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GrayImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl GrayImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0)
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        GrayImage {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::LengthMismatch {
                left: pixels.len(),
                right: width * height,
            });
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        GrayImage {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.width + col] = value;
    }

    /// Copies the `size`×`size` block whose top-left pixel is (`row`, `col`).
    pub fn block(&self, row: usize, col: usize, size: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(size * size);
        for r in row..row + size {
            let start = r * self.width + col;
            out.extend_from_slice(&self.pixels[start..start + size]);
        }
        out
    }

    /// Writes a `size`×`size` block at (`row`, `col`).
    pub fn put_block(&mut self, row: usize, col: usize, size: usize, block: &[u8]) {
        debug_assert_eq!(block.len(), size * size);
        for (i, chunk) in block.chunks_exact(size).enumerate() {
            let start = (row + i) * self.width + col;
            self.pixels[start..start + size].copy_from_slice(chunk);
        }
    }

    pub fn is_scm_sized(&self) -> bool {
        self.width == SCM_SIZE && self.height == SCM_SIZE
    }

    pub fn mean(&self) -> f64 {
        if self.pixels.is_empty() {
            return 0.0;
        }
        self.pixels.iter().map(|&p| p as f64).sum::<f64>() / self.pixels.len() as f64
    }

    pub fn map(&self, f: impl Fn(u8) -> u8) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn flip_horizontal(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |r, c| {
            self.get(r, self.width - 1 - c)
        })
    }

    pub fn flip_vertical(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |r, c| {
            self.get(self.height - 1 - r, c)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_round_trip() {
        let img = GrayImage::from_fn(8, 8, |r, c| (r * 8 + c) as u8);
        let b = img.block(2, 4, 3);
        assert_eq!(b, vec![20, 21, 22, 28, 29, 30, 36, 37, 38]);
        let mut other = GrayImage::new(8, 8);
        other.put_block(2, 4, 3, &b);
        assert_eq!(other.get(3, 5), 29);
        assert_eq!(other.get(0, 0), 0);
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(GrayImage::from_pixels(4, 4, vec![0; 15]).is_err());
    }
}
