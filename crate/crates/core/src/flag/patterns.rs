use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_text;

pub const TILES: usize = 16;
pub const TILE_PX: usize = 16;
pub const CLASSES: usize = 8;
pub const FG_TILES: usize = 80;
pub const FORBIDDEN_TILES: usize = 24;
pub const MIN_HAMMING: usize = 16;

const DEFAULT_PATTERNS: &str = include_str!("../../assets/patterns.json");
const PATTERN_SCHEMA_VERSION: u32 = 1;

/// 16×16 tile roles, `true` = foreground.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TileMap(pub [[bool; TILES]; TILES]);

impl TileMap {
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.0[row][col]
    }

    pub fn set(&mut self, row: usize, col: usize, fg: bool) {
        self.0[row][col] = fg;
    }

    /// Tile at flat index `row * 16 + col`.
    pub fn at(&self, index: usize) -> bool {
        self.0[index / TILES][index % TILES]
    }

    pub fn count(&self) -> usize {
        self.0.iter().flatten().filter(|&&b| b).count()
    }

    pub fn hamming(&self, other: &TileMap) -> usize {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Flat indices of foreground tiles.
    pub fn foreground(&self) -> Vec<usize> {
        (0..TILES * TILES).filter(|&i| self.at(i)).collect()
    }

    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<TileMap> {
        if rows.len() != TILES {
            return Err(Error::Format {
                what: "pattern mask",
                message: format!("{} rows, expected {TILES}", rows.len()),
            });
        }
        let mut map = TileMap::default();
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != TILES || !row.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::Format {
                    what: "pattern mask",
                    message: format!("row {r} must be {TILES} characters of 0/1"),
                });
            }
            for (c, b) in row.bytes().enumerate() {
                map.0[r][c] = b == b'1';
            }
        }
        Ok(map)
    }

    pub fn to_rows(&self) -> Vec<String> {
        self.0
            .iter()
            .map(|row| row.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect()
    }
}

impl fmt::Debug for TileMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_rows() {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MaskFile {
    name: String,
    rows: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct PatternFile {
    schema_version: u32,
    tiles: usize,
    foreground_tiles: usize,
    forbidden: Vec<usize>,
    masks: Vec<MaskFile>,
}

/// The eight class masks plus the tiles no class may use as foreground.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSpec {
    pub names: Vec<String>,
    pub masks: Vec<TileMap>,
    /// Flat tile indices, sorted.
    pub forbidden: Vec<usize>,
}

impl Default for PatternSpec {
    fn default() -> Self {
        PatternSpec::from_json(DEFAULT_PATTERNS).expect("shipped patterns are valid")
    }
}

impl PatternSpec {
    pub fn mask(&self, class: usize) -> Result<&TileMap> {
        self.masks
            .get(class)
            .ok_or_else(|| Error::invalid(format!("flag class {class} not in 0..{CLASSES}")))
    }

    pub fn is_forbidden(&self, index: usize) -> bool {
        self.forbidden.binary_search(&index).is_ok()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| {
            Err(Error::Format {
                what: "pattern spec",
                message,
            })
        };
        if self.masks.len() != CLASSES {
            return bad(format!("{} masks, expected {CLASSES}", self.masks.len()));
        }
        if self.forbidden.len() != FORBIDDEN_TILES
            || self.forbidden.windows(2).any(|w| w[0] >= w[1])
            || self.forbidden.iter().any(|&i| i >= TILES * TILES)
        {
            return bad(format!(
                "forbidden set must be {FORBIDDEN_TILES} sorted distinct tile indices"
            ));
        }
        for (k, m) in self.masks.iter().enumerate() {
            if m.count() != FG_TILES {
                return bad(format!(
                    "mask {k} has {} foreground tiles, expected {FG_TILES}",
                    m.count()
                ));
            }
            if let Some(i) = self.forbidden.iter().find(|&&i| m.at(i)) {
                return bad(format!("mask {k} uses forbidden tile {i}"));
            }
            for (j, other) in self.masks[..k].iter().enumerate() {
                let d = m.hamming(other);
                if d < MIN_HAMMING {
                    return bad(format!(
                        "masks {j} and {k} differ in {d} tiles, need {MIN_HAMMING}"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<PatternSpec> {
        let file: PatternFile = serde_json::from_str(text).map_err(|e| Error::Format {
            what: "pattern spec",
            message: e.to_string(),
        })?;
        if file.schema_version != PATTERN_SCHEMA_VERSION {
            return Err(Error::Format {
                what: "pattern spec",
                message: format!("unsupported schema_version {}", file.schema_version),
            });
        }
        if file.tiles != TILES || file.foreground_tiles != FG_TILES {
            return Err(Error::Format {
                what: "pattern spec",
                message: format!("grid must be {TILES}x{TILES} with {FG_TILES} foreground tiles"),
            });
        }
        let mut forbidden = file.forbidden;
        forbidden.sort_unstable();
        let spec = PatternSpec {
            names: file.masks.iter().map(|m| m.name.clone()).collect(),
            masks: file
                .masks
                .iter()
                .map(|m| TileMap::from_rows(&m.rows))
                .collect::<Result<_>>()?,
            forbidden,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        let file = PatternFile {
            schema_version: PATTERN_SCHEMA_VERSION,
            tiles: TILES,
            foreground_tiles: FG_TILES,
            forbidden: self.forbidden.clone(),
            masks: self
                .names
                .iter()
                .zip(&self.masks)
                .map(|(n, m)| MaskFile {
                    name: n.clone(),
                    rows: m.to_rows(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("pattern spec serializes")
    }

    pub fn load(path: &Path) -> Result<PatternSpec> {
        PatternSpec::from_json(&read_text(path)?)
    }
}
