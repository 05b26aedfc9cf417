use serde::{Deserialize, Serialize};

use super::glyphs::{ncc, GlyphSet, Letter, GRID, PRESCRIBED_COUNTS, TILE};
use super::grid::LetterGrid;
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::stats::{chi2_gof, GofResult};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileMatch {
    /// `None` when the best correlation falls below the rejection threshold.
    pub label: Option<Letter>,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TileClassification {
    pub tiles: [[TileMatch; GRID]; GRID],
}

impl TileClassification {
    pub fn unrecognized(&self) -> usize {
        self.tiles
            .iter()
            .flatten()
            .filter(|t| t.label.is_none())
            .count()
    }

    /// The recognized layout; fails if any tile is unrecognized.
    pub fn letter_grid(&self) -> Result<LetterGrid> {
        let mut cells = [[Letter::H; GRID]; GRID];
        for r in 0..GRID {
            for c in 0..GRID {
                cells[r][c] = self.tiles[r][c].label.ok_or_else(|| {
                    Error::Degenerate(format!("{} unrecognized tiles", self.unrecognized()))
                })?;
            }
        }
        Ok(LetterGrid { cells })
    }
}

/// Template matching on the 8×8 tile grid.
///
/// Each tile takes the letter with the highest normalized cross-correlation
/// (first in alphabet order on ties); tiles scoring below `threshold` are
/// left unrecognized.
pub fn classify_tiles(
    image: &GrayImage,
    glyphs: &GlyphSet,
    threshold: f64,
) -> Result<TileClassification> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(format!(
            "match threshold {threshold} not in (0,1)"
        )));
    }
    if image.width() != GRID * TILE || image.height() != GRID * TILE {
        return Err(Error::Dimension {
            name: "alphabet image".into(),
            width: image.width(),
            height: image.height(),
            expected: "256x256".into(),
        });
    }
    let blank = TileMatch {
        label: None,
        score: 0.0,
    };
    let mut tiles = [[blank; GRID]; GRID];
    for (r, row) in tiles.iter_mut().enumerate() {
        for (c, slot) in row.iter_mut().enumerate() {
            let tile = image.block(r * TILE, c * TILE, TILE);
            let (best, score) = Letter::ALL
                .iter()
                .map(|&l| (l, ncc(&tile, glyphs.template(l))))
                .fold((Letter::H, f64::NEG_INFINITY), |acc, x| {
                    if x.1 > acc.1 {
                        x
                    } else {
                        acc
                    }
                });
            *slot = TileMatch {
                label: (score >= threshold).then_some(best),
                score,
            };
        }
    }
    Ok(TileClassification { tiles })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LetterPrevalence {
    pub counts: [usize; 8],
    pub gof: GofResult,
    /// Counts equal the prescribed multiset exactly.
    pub exact_match: bool,
}

pub fn check_letter_prevalence(grid: &LetterGrid, alpha: f64) -> Result<LetterPrevalence> {
    let counts = grid.counts();
    let observed: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let expected: Vec<f64> = PRESCRIBED_COUNTS.iter().map(|&c| c as f64).collect();
    Ok(LetterPrevalence {
        counts,
        gof: chi2_gof(&observed, &expected, alpha)?,
        exact_match: counts == PRESCRIBED_COUNTS,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub xy: usize,
    pub zk: usize,
    pub zv: usize,
    pub zw: usize,
}

impl PairCounts {
    pub const PRESCRIBED: PairCounts = PairCounts {
        xy: 8,
        zk: 2,
        zv: 1,
        zw: 1,
    };

    pub fn named(&self) -> [(&'static str, usize); 4] {
        [
            ("X-Y", self.xy),
            ("Z-K", self.zk),
            ("Z-V", self.zv),
            ("Z-W", self.zw),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairViolation {
    /// X without Y to its right.
    LoneX { row: usize, col: usize },
    /// Z without K, V or W below.
    LoneZ { row: usize, col: usize },
    /// Y without X to its left.
    OrphanY { row: usize, col: usize },
    /// K, V or W without Z above.
    OrphanBelow { row: usize, col: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairPrevalence {
    pub counts: PairCounts,
    pub violations: Vec<PairViolation>,
}

impl PairPrevalence {
    /// Counts equal (8, 2, 1, 1) and no letter is left unpaired.
    pub fn is_prescribed(&self) -> bool {
        self.counts == PairCounts::PRESCRIBED && self.violations.is_empty()
    }
}

pub fn check_pair_prevalence(grid: &LetterGrid) -> PairPrevalence {
    let mut counts = PairCounts::default();
    let mut violations = Vec::new();
    let is_lower = |l: Letter| matches!(l, Letter::K | Letter::V | Letter::W);
    for r in 0..GRID {
        for c in 0..GRID {
            let here = grid.get(r, c);
            let right = (c + 1 < GRID).then(|| grid.get(r, c + 1));
            let left = (c > 0).then(|| grid.get(r, c - 1));
            let below = (r + 1 < GRID).then(|| grid.get(r + 1, c));
            let above = (r > 0).then(|| grid.get(r - 1, c));
            match here {
                Letter::X => {
                    if right == Some(Letter::Y) {
                        counts.xy += 1;
                    } else {
                        violations.push(PairViolation::LoneX { row: r, col: c });
                    }
                }
                Letter::Y if left != Some(Letter::X) => {
                    violations.push(PairViolation::OrphanY { row: r, col: c });
                }
                Letter::Z => match below {
                    Some(Letter::K) => counts.zk += 1,
                    Some(Letter::V) => counts.zv += 1,
                    Some(Letter::W) => counts.zw += 1,
                    _ => violations.push(PairViolation::LoneZ { row: r, col: c }),
                },
                l if is_lower(l) && above != Some(Letter::Z) => {
                    violations.push(PairViolation::OrphanBelow { row: r, col: c });
                }
                _ => {}
            }
        }
    }
    PairPrevalence { counts, violations }
}
