use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelId {
    Alphabet,
    Voronoi,
    Flag,
    External,
}

impl ModelId {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Alphabet => "alphabet",
            ModelId::Voronoi => "voronoi",
            ModelId::Flag => "flag",
            ModelId::External => "external",
        }
    }

    /// SCM realizations are fixed at 256×256; external images only need to be square.
    pub fn is_scm(self) -> bool {
        !matches!(self, ModelId::External)
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alphabet" => Ok(ModelId::Alphabet),
            "voronoi" => Ok(ModelId::Voronoi),
            "flag" => Ok(ModelId::Flag),
            "external" => Ok(ModelId::External),
            other => Err(Error::invalid(format!("unknown model {other:?}"))),
        }
    }
}

/// A ground-truth entry: either a scalar or a per-region list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TruthValue {
    Number(f64),
    List(Vec<f64>),
}

impl TruthValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            TruthValue::Number(x) => Some(*x),
            TruthValue::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[f64]> {
        match self {
            TruthValue::List(v) => Some(v),
            TruthValue::Number(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub file: String,
    /// Stream id under the manifest's global seed; `None` for external images.
    pub seed: Option<u64>,
    pub class: Option<u32>,
    #[serde(default)]
    pub truth: BTreeMap<String, TruthValue>,
    /// Name of the injected error, when this image was corrupted on purpose.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corruption: Option<String>,
}

impl ImageRecord {
    pub fn new(file: impl Into<String>, seed: Option<u64>, class: Option<u32>) -> Self {
        ImageRecord {
            file: file.into(),
            seed,
            class,
            truth: BTreeMap::new(),
            corruption: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleManifest {
    pub schema_version: u32,
    pub model_id: ModelId,
    pub global_seed: u64,
    pub image_count: usize,
    pub records: Vec<ImageRecord>,
}

impl EnsembleManifest {
    pub fn new(model_id: ModelId, global_seed: u64, records: Vec<ImageRecord>) -> Self {
        EnsembleManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            model_id,
            global_seed,
            image_count: records.len(),
            records,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(Error::Format {
                what: "manifest",
                message: format!("unsupported schema_version {}", self.schema_version),
            });
        }
        if self.records.len() != self.image_count {
            return Err(Error::Format {
                what: "manifest",
                message: format!(
                    "image_count {} but {} records",
                    self.image_count,
                    self.records.len()
                ),
            });
        }
        let mut seen = HashSet::new();
        for r in &self.records {
            if !seen.insert(r.file.as_str()) {
                return Err(Error::DuplicateFile(r.file.clone()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format {
            what: "manifest",
            message: e.to_string(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: EnsembleManifest = serde_json::from_str(text).map_err(|e| Error::Format {
            what: "manifest",
            message: e.to_string(),
        })?;
        m.validate()?;
        Ok(m)
    }
}

/// Conventional filename for image `index`.
pub fn image_file_name(index: usize) -> String {
    format!("img_{index:06}.png")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_record() -> impl Strategy<Value = ImageRecord> {
        (
            "[a-z]{1,8}",
            proptest::option::of(any::<u64>()),
            proptest::option::of(0u32..100),
            proptest::collection::btree_map(
                "[a-z_]{1,6}",
                prop_oneof![
                    (-1e6f64..1e6).prop_map(TruthValue::Number),
                    proptest::collection::vec(-1e6f64..1e6, 0..5).prop_map(TruthValue::List),
                ],
                0..4,
            ),
        )
            .prop_map(|(file, seed, class, truth)| ImageRecord {
                file,
                seed,
                class,
                truth,
                corruption: None,
            })
    }

    proptest! {
        #[test]
        fn json_round_trip(records in proptest::collection::vec(arb_record(), 0..6), seed in any::<u64>()) {
            let mut records = records;
            for (i, r) in records.iter_mut().enumerate() {
                r.file = format!("{}_{i}.png", r.file);
            }
            let m = EnsembleManifest::new(ModelId::Voronoi, seed, records);
            let back = EnsembleManifest::from_json(&m.to_json().unwrap()).unwrap();
            prop_assert_eq!(back, m);
        }
    }

    #[test]
    fn duplicate_names_rejected() {
        let m = EnsembleManifest::new(
            ModelId::Flag,
            1,
            vec![
                ImageRecord::new("a.png", Some(0), None),
                ImageRecord::new("a.png", Some(1), None),
            ],
        );
        assert!(matches!(m.validate(), Err(Error::DuplicateFile(_))));
    }

    #[test]
    fn count_mismatch_rejected() {
        let mut m = EnsembleManifest::new(
            ModelId::Flag,
            1,
            vec![ImageRecord::new("a.png", Some(0), None)],
        );
        m.image_count = 2;
        assert!(m.validate().is_err());
    }
}
