//! Flag model: eight classes of 16×16 tile patterns; every tile is filled
//! with iid foreground or background intensities from two transformed Beta
//! laws.

mod intensity;
mod patterns;

pub use intensity::{IntensityLaw, BACKGROUND_LAW, FOREGROUND_LAW};
pub use patterns::{
    PatternSpec, TileMap, CLASSES, FG_TILES, FORBIDDEN_TILES, MIN_HAMMING, TILES, TILE_PX,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{GrayImage, SCM_SIZE};
use crate::report::{Check, ImageResult};
use crate::rng::RngStream;
use crate::stats::{morans_i, Adjacency, GofResult, MoransResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagTruth {
    pub class: usize,
    pub roles: TileMap,
}

impl Serialize for TileMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TileMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<String>::deserialize(d)?;
        TileMap::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Fills each tile with iid draws of its role's law, pixels in raster order.
pub fn render_roles(rng: &mut RngStream, roles: &TileMap) -> GrayImage {
    GrayImage::from_fn(SCM_SIZE, SCM_SIZE, |r, c| {
        let law = if roles.get(r / TILE_PX, c / TILE_PX) {
            FOREGROUND_LAW
        } else {
            BACKGROUND_LAW
        };
        law.sample(rng)
    })
}

pub fn generate_flag(
    rng: &mut RngStream,
    class: usize,
    patterns: &PatternSpec,
) -> Result<(GrayImage, FlagTruth)> {
    let roles = *patterns.mask(class)?;
    Ok((render_roles(rng, &roles), FlagTruth { class, roles }))
}

pub const FOREGROUND_BOUNDARY: f64 = 148.0;

/// Tile is foreground iff its mean intensity exceeds `boundary`.
pub fn infer_foreground(image: &GrayImage, boundary: f64) -> Result<TileMap> {
    if !image.is_scm_sized() {
        return Err(Error::Dimension {
            name: "flag image".into(),
            width: image.width(),
            height: image.height(),
            expected: "256x256".into(),
        });
    }
    let mut map = TileMap::default();
    for r in 0..TILES {
        for c in 0..TILES {
            let block = image.block(r * TILE_PX, c * TILE_PX, TILE_PX);
            let mean = block.iter().map(|&v| v as f64).sum::<f64>() / block.len() as f64;
            map.set(r, c, mean > boundary);
        }
    }
    Ok(map)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternMatch {
    pub class: usize,
    /// Fraction of the 256 tiles that disagree with the class mask.
    pub rmae: f64,
    /// Foreground tiles in the forbidden set (flat indices).
    pub forbidden_violations: Vec<usize>,
}

/// Nearest class mask by mean absolute error (lowest class on ties).
pub fn classify_pattern(map: &TileMap, patterns: &PatternSpec) -> PatternMatch {
    let (class, dist) = patterns
        .masks
        .iter()
        .enumerate()
        .map(|(k, m)| (k, m.hamming(map)))
        .min_by_key(|&(k, d)| (d, k))
        .expect("pattern spec has masks");
    PatternMatch {
        class,
        rmae: dist as f64 / (TILES * TILES) as f64,
        forbidden_violations: map
            .foreground()
            .into_iter()
            .filter(|&i| patterns.is_forbidden(i))
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TextureCheck {
    /// Row-major per tile; `None` for a constant tile.
    pub tiles: Vec<Option<MoransResult>>,
    pub pass_fraction: f64,
}

/// Rook-adjacency Moran's I on every 16×16 tile. Constant tiles fail.
pub fn check_tile_texture(image: &GrayImage, alpha: f64) -> Result<TextureCheck> {
    if !image.is_scm_sized() {
        return Err(Error::invalid("flag image must be 256x256"));
    }
    let mut tiles = Vec::with_capacity(TILES * TILES);
    let mut passed = 0;
    for r in 0..TILES {
        for c in 0..TILES {
            let block: Vec<f64> = image
                .block(r * TILE_PX, c * TILE_PX, TILE_PX)
                .into_iter()
                .map(f64::from)
                .collect();
            let res = match morans_i(&block, TILE_PX, TILE_PX, Adjacency::Rook, alpha) {
                Ok(m) => Some(m),
                Err(Error::Degenerate(_)) => None,
                Err(e) => return Err(e),
            };
            if res.as_ref().is_some_and(|m| m.pass) {
                passed += 1;
            }
            tiles.push(res);
        }
    }
    Ok(TextureCheck {
        tiles,
        pass_fraction: passed as f64 / (TILES * TILES) as f64,
    })
}

/// Pooled foreground and background pixels (by `map`) against their laws.
pub fn check_intensity_gof(
    image: &GrayImage,
    map: &TileMap,
    bins: usize,
    alpha: f64,
) -> Result<(GofResult, GofResult)> {
    let mut fg = Vec::new();
    let mut bg = Vec::new();
    for r in 0..image.height() {
        for c in 0..image.width() {
            let v = image.get(r, c);
            if map.get(r / TILE_PX, c / TILE_PX) {
                fg.push(v);
            } else {
                bg.push(v);
            }
        }
    }
    if fg.is_empty() || bg.is_empty() {
        return Err(Error::Insufficient(
            "foreground or background pixel set is empty".into(),
        ));
    }
    Ok((
        FOREGROUND_LAW.goodness_of_fit(&fg, bins, alpha)?,
        BACKGROUND_LAW.goodness_of_fit(&bg, bins, alpha)?,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlagConfig {
    pub foreground_boundary: f64,
    /// Largest RMAE accepted as a class match.
    pub rmae_threshold: f64,
    pub moran_alpha: f64,
    /// Fraction of tiles that must pass the Moran test for the image to pass.
    pub texture_min_pass_fraction: f64,
    pub gof_bins: usize,
    pub gof_alpha: f64,
}

impl Default for FlagConfig {
    fn default() -> Self {
        FlagConfig {
            foreground_boundary: FOREGROUND_BOUNDARY,
            rmae_threshold: 1.0 / 256.0,
            moran_alpha: 0.05,
            texture_min_pass_fraction: 0.90,
            gof_bins: 16,
            gof_alpha: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlagAnalysis {
    pub map: TileMap,
    pub pattern: PatternMatch,
    pub texture: TextureCheck,
    /// `None` when the inferred map has no foreground or no background.
    pub intensity: Option<(GofResult, GofResult)>,
}

impl FlagAnalysis {
    pub fn to_result(&self, file: &str, config: &FlagConfig) -> ImageResult {
        let mut out = ImageResult::new(file);
        let p = &self.pattern;
        out.add(
            "pattern_match",
            Check::new(p.rmae, p.rmae <= config.rmae_threshold),
        );
        out.add("pattern_exact", Check::new(p.rmae, p.rmae == 0.0));
        out.add(
            "forbidden",
            Check::new(
                p.forbidden_violations.len() as f64,
                p.forbidden_violations.is_empty(),
            ),
        );
        let t = self.texture.pass_fraction;
        out.add(
            "texture",
            Check::new(t, t >= config.texture_min_pass_fraction),
        );
        match &self.intensity {
            Some((fg, bg)) => {
                out.add("intensity_fg", Check::new(fg.statistic, fg.pass));
                out.add("intensity_bg", Check::new(bg.statistic, bg.pass));
            }
            None => {
                out.add("intensity_fg", Check::undefined(false));
                out.add("intensity_bg", Check::undefined(false));
            }
        }
        out
    }
}

/// The full analyzer chain; never consults truth.
pub fn analyze_flag(
    image: &GrayImage,
    patterns: &PatternSpec,
    config: &FlagConfig,
) -> Result<FlagAnalysis> {
    let map = infer_foreground(image, config.foreground_boundary)?;
    let pattern = classify_pattern(&map, patterns);
    let texture = check_tile_texture(image, config.moran_alpha)?;
    let intensity = match check_intensity_gof(image, &map, config.gof_bins, config.gof_alpha) {
        Ok(r) => Some(r),
        Err(Error::Insufficient(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(FlagAnalysis {
        map,
        pattern,
        texture,
        intensity,
    })
}

#[cfg(test)]
mod tests;
