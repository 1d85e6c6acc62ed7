use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// The config (or a CLI argument standing in for it) is invalid.
    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A checked inequality, drift tolerance or member invariant failed.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// The computation stopped (blowup, step limit).
    #[error("runtime stop: {0}")]
    RuntimeStop(String),
    #[error(transparent)]
    Core(#[from] warpflow_core::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        LabError::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 invariant violation, 2 config error, 3 runtime stop.
    pub fn exit_code(&self) -> u8 {
        use warpflow_core::Error as E;
        match self {
            LabError::Invariant(_) => 1,
            LabError::Config { .. } | LabError::Io { .. } => 2,
            LabError::RuntimeStop(_) => 3,
            LabError::Core(E::NonFinite(_) | E::CflViolation { .. }) => 3,
            LabError::Core(_) => 2,
            LabError::Csv(_) | LabError::Json(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            1 => "invariant_violation",
            2 => "config_error",
            _ => "runtime_stop",
        }
    }

    /// Machine-parsable record for stderr.
    pub fn record(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let LabError::Config { key, .. } = self {
            v["key"] = serde_json::Value::String(key.clone());
        }
        v
    }
}
