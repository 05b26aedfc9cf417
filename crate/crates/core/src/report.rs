use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::Comparison;
use crate::io::{read_text, write_text};
use crate::manifest::ModelId;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One named constraint check on one image. A `None` statistic is the
/// undefined marker (e.g. rank correlation of a single region).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub statistic: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn new(statistic: f64, pass: bool) -> Self {
        Check {
            statistic: statistic.is_finite().then_some(statistic),
            pass,
        }
    }

    pub fn undefined(pass: bool) -> Self {
        Check {
            statistic: None,
            pass,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ImageResult {
    pub file: String,
    pub checks: BTreeMap<String, Check>,
}

impl ImageResult {
    pub fn new(file: impl Into<String>) -> Self {
        ImageResult {
            file: file.into(),
            checks: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, name: &str, check: Check) {
        self.checks.insert(name.to_string(), check);
    }

    pub fn passed(&self, name: &str) -> Option<bool> {
        self.checks.get(name).map(|c| c.pass)
    }

    /// Every check passed (vacuously true with no checks).
    pub fn all_passed(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn statistic(&self, name: &str) -> Option<f64> {
        self.checks.get(name).and_then(|c| c.statistic)
    }
}

/// Per-image and ensemble-level context-error report for one SCM analyzer run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextReport {
    pub schema_version: u32,
    pub model_id: ModelId,
    /// The exact configuration that produced this report.
    pub run_config: serde_json::Value,
    pub images: Vec<ImageResult>,
    /// Images left out of prevalence statistics, with the reason.
    #[serde(default)]
    pub excluded: BTreeMap<String, String>,
    pub aggregates: BTreeMap<String, f64>,
    #[serde(default)]
    pub histograms: BTreeMap<String, BTreeMap<String, u64>>,
    /// Named 2-D point sets for scatter plots (e.g. PC1-PC2 projections).
    #[serde(default)]
    pub points: BTreeMap<String, Vec<[f64; 2]>>,
}

impl ContextReport {
    pub fn new(model_id: ModelId, run_config: serde_json::Value) -> Self {
        ContextReport {
            schema_version: REPORT_SCHEMA_VERSION,
            model_id,
            run_config,
            images: Vec::new(),
            excluded: BTreeMap::new(),
            aggregates: BTreeMap::new(),
            histograms: BTreeMap::new(),
            points: BTreeMap::new(),
        }
    }

    /// Fills `pass_rate.<check>` for every check name seen in the per-image list.
    pub fn finalize(&mut self) {
        let mut tally: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
        for img in &self.images {
            for (name, check) in &img.checks {
                let e = tally.entry(name.as_str()).or_default();
                e.0 += check.pass as u64;
                e.1 += 1;
            }
        }
        let rates: Vec<(String, f64)> = tally
            .into_iter()
            .map(|(name, (pass, n))| (format!("pass_rate.{name}"), pass as f64 / n as f64))
            .collect();
        self.aggregates.extend(rates);
        self.aggregates
            .insert("images".into(), self.images.len() as f64);
        self.aggregates
            .insert("excluded".into(), self.excluded.len() as f64);
    }

    pub fn pass_rate(&self, check: &str) -> Option<f64> {
        self.aggregates.get(&format!("pass_rate.{check}")).copied()
    }

    pub fn bump(&mut self, histogram: &str, bin: impl Into<String>) {
        *self
            .histograms
            .entry(histogram.to_string())
            .or_default()
            .entry(bin.into())
            .or_default() += 1;
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format {
            what: "report",
            message: e.to_string(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format {
            what: "report",
            message: e.to_string(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.to_json()?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&read_text(path.as_ref())?)
    }
}

/// Ensemble-vs-ensemble feature comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub run_config: serde_json::Value,
    pub train_images: usize,
    pub gen_images: usize,
    /// Images with undefined features, keyed `train/<file>` or `gen/<file>`.
    pub excluded: BTreeMap<String, String>,
    /// How generated images were assigned to classes.
    pub prevalence_method: String,
    pub comparison: Comparison,
}

impl ComparisonReport {
    pub fn new(
        run_config: serde_json::Value,
        train_images: usize,
        gen_images: usize,
        excluded: BTreeMap<String, String>,
        comparison: Comparison,
    ) -> Self {
        ComparisonReport {
            schema_version: REPORT_SCHEMA_VERSION,
            run_config,
            train_images,
            gen_images,
            excluded,
            prevalence_method: "F/G-ratio interval thresholds fit on labeled training images (no learned classifier)"
                .into(),
            comparison,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format {
            what: "comparison report",
            message: e.to_string(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format {
            what: "comparison report",
            message: e.to_string(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_json()?)
    }
}
