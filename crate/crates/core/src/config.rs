//! Analysis configuration: every threshold in one schema-versioned JSON file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::alphabet::{AlphabetConfig, GlyphSet};
use crate::error::{Error, Result};
use crate::eval::EvalConfig;
use crate::flag::{FlagConfig, PatternSpec};
use crate::io::read_text;
use crate::voronoi::VoronoiConfig;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    pub alphabet: AlphabetConfig,
    pub voronoi: VoronoiConfig,
    pub flag: FlagConfig,
    pub eval: EvalConfig,
    /// Directory of `H.png`, `K.png`, ... replacing the built-in glyphs.
    pub glyph_dir: Option<PathBuf>,
    /// Pattern file replacing the built-in flag masks.
    pub pattern_file: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            schema_version: CONFIG_SCHEMA_VERSION,
            alphabet: AlphabetConfig::default(),
            voronoi: VoronoiConfig::default(),
            flag: FlagConfig::default(),
            eval: EvalConfig::default(),
            glyph_dir: None,
            pattern_file: None,
        }
    }
}

fn range_check(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if v > lo && v < hi {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} = {v} must lie in ({lo}, {hi})"
        )))
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Format {
            what: "config",
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config> {
        Config::from_json(&read_text(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Format {
                what: "config",
                message: format!("unsupported schema_version {}", self.schema_version),
            });
        }
        range_check(
            "alphabet.match_threshold",
            self.alphabet.match_threshold,
            0.0,
            1.0,
        )?;
        range_check("alphabet.alpha", self.alphabet.alpha, 0.0, 1.0)?;
        range_check(
            "voronoi.rank_threshold",
            self.voronoi.rank_threshold,
            -1.0,
            1.0 + 1e-12,
        )?;
        let s = self.voronoi.sauvola;
        if s.window < 3 || s.window.is_multiple_of(2) || !(s.r > 0.0) {
            return Err(Error::invalid(
                "voronoi.sauvola needs an odd window >= 3 and r > 0",
            ));
        }
        range_check("flag.moran_alpha", self.flag.moran_alpha, 0.0, 1.0)?;
        range_check("flag.gof_alpha", self.flag.gof_alpha, 0.0, 1.0)?;
        range_check(
            "flag.texture_min_pass_fraction",
            self.flag.texture_min_pass_fraction,
            -1e-12,
            1.0 + 1e-12,
        )?;
        range_check("flag.rmae_threshold", self.flag.rmae_threshold, -1e-12, 1.0)?;
        if self.flag.gof_bins < 2 {
            return Err(Error::invalid("flag.gof_bins must be >= 2"));
        }
        self.eval.tissues.validate()?;
        if self.eval.pairs < crate::eval::MIN_PAIRS
            || self.eval.components == 0
            || self.eval.k_neighbors == 0
        {
            return Err(Error::invalid(
                "eval needs pairs >= 100, components >= 1, k_neighbors >= 1",
            ));
        }
        range_check("eval.quantile_tail", self.eval.quantile_tail, -1e-12, 0.5)?;
        Ok(())
    }

    pub fn glyphs(&self) -> Result<GlyphSet> {
        match &self.glyph_dir {
            Some(dir) => GlyphSet::load_dir(dir),
            None => Ok(GlyphSet::default()),
        }
    }

    pub fn patterns(&self) -> Result<PatternSpec> {
        match &self.pattern_file {
            Some(path) => PatternSpec::load(path),
            None => Ok(PatternSpec::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trip() {
        let c = Config::default();
        c.validate().unwrap();
        assert_eq!(Config::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn partial_file_fills_defaults() {
        let c = Config::from_json(r#"{"flag": {"gof_bins": 10}}"#).unwrap();
        assert_eq!(c.flag.gof_bins, 10);
        assert_eq!(c.flag.gof_alpha, 0.05);
        assert_eq!(c.alphabet, AlphabetConfig::default());
    }

    #[test]
    fn bad_files_rejected() {
        assert!(Config::from_json(r#"{"schema_version": 2}"#).is_err());
        assert!(Config::from_json(r#"{"alphabet": {"match_threshold": 1.5}}"#).is_err());
        assert!(Config::from_json(r#"{"typo": 1}"#).is_err());
        assert!(Config::from_json("not json").is_err());
    }
}
