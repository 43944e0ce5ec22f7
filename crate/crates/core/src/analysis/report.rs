use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Uniform JSON envelope for every check:
/// `{check, instance_id, violations: [...], statistics: {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub instance_id: String,
    pub violations: Vec<Value>,
    pub statistics: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(check: &str, instance_id: &str) -> Self {
        Self {
            check: check.to_string(),
            instance_id: instance_id.to_string(),
            violations: Vec::new(),
            statistics: BTreeMap::new(),
        }
    }

    pub fn stat(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.statistics.insert(key.to_string(), value.into());
        self
    }

    pub fn violations<T: Serialize>(mut self, items: &[T]) -> Self {
        self.violations = items
            .iter()
            .map(|v| serde_json::to_value(v).expect("violation serializes"))
            .collect();
        self
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that can run on an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Star,
    Packing,
    BoundChain,
    Isolation,
    LowerBound,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] = [
        CheckKind::Star,
        CheckKind::Packing,
        CheckKind::BoundChain,
        CheckKind::Isolation,
        CheckKind::LowerBound,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::Star => "star",
            CheckKind::Packing => "packing",
            CheckKind::BoundChain => "bound-chain",
            CheckKind::Isolation => "isolation",
            CheckKind::LowerBound => "lower-bound",
        }
    }
}

impl std::str::FromStr for CheckKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        CheckKind::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                crate::Error::Config(format!(
                    "unknown check '{s}' (expected one of star, packing, bound-chain, isolation, lower-bound)"
                ))
            })
    }
}

impl std::fmt::Display for CheckKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
