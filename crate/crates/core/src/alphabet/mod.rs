//! Alphabet model: an 8×8 grid of 32-px letter tiles with an exact letter
//! multiset and four ordered letter pairs (X-Y horizontal; Z-K, Z-V, Z-W
//! vertical) in every image.

mod analyze;
mod glyphs;
mod grid;

pub use analyze::{
    check_letter_prevalence, check_pair_prevalence, classify_tiles, LetterPrevalence, PairCounts,
    PairPrevalence, PairViolation, TileClassification, TileMatch,
};
pub use glyphs::{ncc, render_letter, GlyphSet, Letter, GRID, PRESCRIBED_COUNTS, TILE};
pub use grid::{random_grid, LetterGrid};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::image::GrayImage;
use crate::report::{Check, ImageResult};
use crate::rng::RngStream;

/// Draws a layout and renders it.
pub fn generate_alphabet(rng: &mut RngStream, glyphs: &GlyphSet) -> (GrayImage, LetterGrid) {
    let grid = random_grid(rng);
    (grid.render(glyphs), grid)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlphabetConfig {
    /// Minimum normalized cross-correlation for a tile to count as a letter.
    pub match_threshold: f64,
    pub alpha: f64,
}

impl Default for AlphabetConfig {
    fn default() -> Self {
        AlphabetConfig {
            match_threshold: 0.8,
            alpha: 0.05,
        }
    }
}

/// Outcome of the full analyzer chain on one image.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphabetAnalysis {
    pub unrecognized: usize,
    /// Present only when every tile was recognized.
    pub letters: Option<LetterPrevalence>,
    pub pairs: Option<PairPrevalence>,
}

impl AlphabetAnalysis {
    pub fn to_result(&self, file: &str) -> ImageResult {
        let mut out = ImageResult::new(file);
        out.add(
            "recognized",
            Check::new(self.unrecognized as f64, self.unrecognized == 0),
        );
        if let (Some(letters), Some(pairs)) = (&self.letters, &self.pairs) {
            out.add(
                "letter_chi2",
                Check::new(letters.gof.statistic, letters.gof.pass),
            );
            let off: usize = letters
                .counts
                .iter()
                .zip(PRESCRIBED_COUNTS)
                .map(|(a, b)| a.abs_diff(b))
                .sum();
            out.add(
                "letter_exact",
                Check::new((off / 2) as f64, letters.exact_match),
            );
            out.add(
                "pair_prevalence",
                Check::new(pairs.violations.len() as f64, pairs.is_prescribed()),
            );
        }
        out
    }
}

pub fn analyze_alphabet(
    image: &GrayImage,
    glyphs: &GlyphSet,
    config: &AlphabetConfig,
) -> Result<AlphabetAnalysis> {
    let tiles = classify_tiles(image, glyphs, config.match_threshold)?;
    let unrecognized = tiles.unrecognized();
    if unrecognized > 0 {
        return Ok(AlphabetAnalysis {
            unrecognized,
            letters: None,
            pairs: None,
        });
    }
    let grid = tiles.letter_grid()?;
    Ok(AlphabetAnalysis {
        unrecognized: 0,
        letters: Some(check_letter_prevalence(&grid, config.alpha)?),
        pairs: Some(check_pair_prevalence(&grid)),
    })
}
