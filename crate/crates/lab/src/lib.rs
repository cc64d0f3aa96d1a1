//! Experiment driver for `notoc-core`: configuration, runs, artifacts and the
//! invariant suite behind the `notoc` binary.

pub mod config;
pub mod output;
pub mod run;
pub mod verify;

use serde_json::json;

pub use config::ExperimentConfig;
pub use run::{run, Command};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
    #[error("resource limit: {0}")]
    ResourceGate(String),
    #[error(transparent)]
    Core(#[from] notoc_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation { .. } => 2,
            Self::ResourceGate(_) => 3,
            Self::Core(e) if e.is_resource_gate() => 3,
            Self::Core(_) => 2,
            Self::Io { .. } => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "validation",
            3 => "resource_gate",
            _ => "io",
        }
    }

    /// Machine-readable form printed on stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        if let Self::Validation { field, .. } = self {
            v["field"] = json!(field);
        }
        v
    }
}
