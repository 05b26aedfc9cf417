use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::io::{read_image_file, write_png};

pub const TILE: usize = 32;
pub const GRID: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    H,
    K,
    L,
    V,
    W,
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 8] = [
        Letter::H,
        Letter::K,
        Letter::L,
        Letter::V,
        Letter::W,
        Letter::X,
        Letter::Y,
        Letter::Z,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Exact per-image count of this letter.
    pub fn prescribed_count(self) -> usize {
        PRESCRIBED_COUNTS[self.index()]
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::H => 'H',
            Letter::K => 'K',
            Letter::L => 'L',
            Letter::V => 'V',
            Letter::W => 'W',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        Letter::ALL.into_iter().find(|l| l.as_char() == c)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Letter multiset every realization contains, indexed like [`Letter::ALL`].
pub const PRESCRIBED_COUNTS: [usize; 8] = [24, 2, 16, 1, 1, 8, 8, 4];

type Stroke = ((f64, f64), (f64, f64));

// (x, y) endpoints inside the 32x32 tile
fn strokes(letter: Letter) -> &'static [Stroke] {
    match letter {
        Letter::H => &[
            ((8.0, 5.0), (8.0, 27.0)),
            ((24.0, 5.0), (24.0, 27.0)),
            ((8.0, 16.0), (24.0, 16.0)),
        ],
        Letter::K => &[
            ((8.0, 5.0), (8.0, 27.0)),
            ((24.0, 5.0), (9.0, 17.0)),
            ((13.0, 14.0), (24.0, 27.0)),
        ],
        Letter::L => &[((9.0, 5.0), (9.0, 27.0)), ((9.0, 26.0), (24.0, 26.0))],
        Letter::V => &[((7.0, 5.0), (16.0, 27.0)), ((25.0, 5.0), (16.0, 27.0))],
        Letter::W => &[
            ((4.0, 5.0), (10.0, 27.0)),
            ((10.0, 27.0), (16.0, 12.0)),
            ((16.0, 12.0), (22.0, 27.0)),
            ((22.0, 27.0), (28.0, 5.0)),
        ],
        Letter::X => &[((7.0, 5.0), (25.0, 27.0)), ((25.0, 5.0), (7.0, 27.0))],
        Letter::Y => &[
            ((7.0, 5.0), (16.0, 15.0)),
            ((25.0, 5.0), (16.0, 15.0)),
            ((16.0, 15.0), (16.0, 27.0)),
        ],
        Letter::Z => &[
            ((7.0, 6.0), (25.0, 6.0)),
            ((25.0, 6.0), (7.0, 26.0)),
            ((7.0, 26.0), (25.0, 26.0)),
        ],
    }
}

fn segment_distance(p: (f64, f64), (a, b): Stroke) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Block-stroke capital letter, stroke width 4 px, white on black.
pub fn render_letter(letter: Letter) -> Vec<u8> {
    let mut out = vec![0u8; TILE * TILE];
    for y in 0..TILE {
        for x in 0..TILE {
            let p = (x as f64 + 0.5, y as f64 + 0.5);
            if strokes(letter)
                .iter()
                .any(|&s| segment_distance(p, s) <= 2.0)
            {
                out[y * TILE + x] = 255;
            }
        }
    }
    out
}

/// Zero-mean normalized cross-correlation; 0 when either input is constant.
pub fn ncc(a: &[u8], b: &[u8]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().map(|&v| v as f64).sum::<f64>() / n;
    let mb = b.iter().map(|&v| v as f64).sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x as f64 - ma, y as f64 - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

/// One 32×32 template per letter.
#[derive(Clone, Debug, PartialEq)]
pub struct GlyphSet {
    templates: Vec<Vec<u8>>,
}

impl Default for GlyphSet {
    fn default() -> Self {
        GlyphSet {
            templates: Letter::ALL.iter().map(|&l| render_letter(l)).collect(),
        }
    }
}

impl GlyphSet {
    /// Builds a set from explicit templates and checks its invariants.
    pub fn from_templates(templates: Vec<Vec<u8>>) -> Result<Self> {
        if templates.len() != 8 || templates.iter().any(|t| t.len() != TILE * TILE) {
            return Err(Error::invalid("glyph set needs eight 32x32 templates"));
        }
        let set = GlyphSet { templates };
        set.validate()?;
        Ok(set)
    }

    pub fn template(&self, letter: Letter) -> &[u8] {
        &self.templates[letter.index()]
    }

    /// Distinct templates must correlate below 0.8; each foreground fraction
    /// (pixels ≥ 128) must lie in [0.1, 0.5].
    pub fn validate(&self) -> Result<()> {
        for a in Letter::ALL {
            let t = self.template(a);
            let frac = t.iter().filter(|&&v| v >= 128).count() as f64 / t.len() as f64;
            if !(0.1..=0.5).contains(&frac) {
                return Err(Error::invalid(format!(
                    "glyph {a} foreground fraction {frac:.3}"
                )));
            }
            for b in Letter::ALL {
                if a < b {
                    let s = ncc(t, self.template(b));
                    if s >= 0.8 {
                        return Err(Error::invalid(format!(
                            "glyphs {a} and {b} correlate at {s:.3}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Loads `H.png`, `K.png`, … from `dir`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut templates = Vec::new();
        for l in Letter::ALL {
            let img = read_image_file(dir.join(format!("{l}.png")))?;
            if img.width() != TILE || img.height() != TILE {
                return Err(Error::Dimension {
                    name: format!("{l}.png"),
                    width: img.width(),
                    height: img.height(),
                    expected: "32x32".into(),
                });
            }
            templates.push(img.into_pixels());
        }
        Self::from_templates(templates)
    }

    pub fn save_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for l in Letter::ALL {
            let img = GrayImage::from_pixels(TILE, TILE, self.template(l).to_vec())?;
            write_png(&dir.join(format!("{l}.png")), &img)?;
        }
        Ok(())
    }
}
