use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Everything that determines an output file. Written into every artifact
/// so a result can be regenerated from its own header.
///
/// The output path and `--jobs` are deliberately absent: neither changes a
/// single byte of the result.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub format: String,
    /// Subcommand-specific flags, stringified.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new(subcommand: impl Into<String>, format: impl Into<String>) -> Self {
        RunConfig {
            subcommand: subcommand.into(),
            format: format.into(),
            ..Default::default()
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}

/// Header shared by every emitted file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: RunConfig,
}

impl Provenance {
    pub fn new(config: RunConfig) -> Self {
        Provenance {
            schema_version: crate::SCHEMA_VERSION,
            tool_version: crate::TOOL_VERSION.to_string(),
            config,
        }
    }

    pub(crate) fn comment_lines(&self) -> String {
        let config = serde_json::to_string(&self.config).expect("config serializes");
        format!(
            "# schema_version={}\n# tool_version={}\n# config={}\n",
            self.schema_version, self.tool_version, config
        )
    }
}
