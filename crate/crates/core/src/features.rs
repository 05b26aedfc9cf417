use serde::{Deserialize, Serialize};

/// Ordered named features for one image. `None` marks an undefined value
/// (e.g. GLCM correlation of a constant image).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    entries: Vec<(String, Option<f64>)>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        self.entries
            .push((name.into(), value.is_finite().then_some(value)));
    }

    pub fn push_opt(&mut self, name: impl Into<String>, value: Option<f64>) {
        self.entries
            .push((name.into(), value.filter(|v| v.is_finite())));
    }

    /// Appends every entry of `other` with `prefix.` prepended to its name.
    pub fn extend_prefixed(&mut self, prefix: &str, other: FeatureVector) {
        for (name, v) in other.entries {
            self.entries.push((format!("{prefix}.{name}"), v));
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .and_then(|(_, v)| *v)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn entries(&self) -> &[(String, Option<f64>)] {
        &self.entries
    }

    /// True when every value is defined.
    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(|(_, v)| v.is_some())
    }

    /// Values in order; `None` if any is undefined.
    pub fn values(&self) -> Option<Vec<f64>> {
        self.entries.iter().map(|(_, v)| *v).collect()
    }

    /// Entries whose name starts with `prefix`.
    pub fn select(&self, prefix: &str) -> FeatureVector {
        FeatureVector {
            entries: self
                .entries
                .iter()
                .filter(|(n, _)| n.starts_with(prefix))
                .cloned()
                .collect(),
        }
    }
}
