//! Artifact envelope and serialization.
//!
//! Every command emits one top-level object `{config, results, provenance}`.
//! JSON is canonical and carries the full report; CSV is a lossy projection
//! offered only where a flat table exists (figures and reconstruction),
//! with the config echoed in `#`-prefixed comment lines.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// Failure classes mapped to process exit codes: input errors exit 2,
/// property failures exit 1, solver non-convergence exits 3.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Property(String),
    NoConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Property(_) => 1,
            CliError::Input(_) => 2,
            CliError::NoConvergence(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Property(msg) | CliError::NoConvergence(msg) => {
                write!(f, "{msg}")
            }
        }
    }
}

impl From<hk_core::Error> for CliError {
    fn from(err: hk_core::Error) -> Self {
        match err {
            hk_core::Error::NoConvergence { .. } => CliError::NoConvergence(err.to_string()),
            _ => CliError::Input(err.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub version: &'static str,
}

/// The one top-level object every run emits.
#[derive(Debug, Serialize)]
pub struct Envelope {
    pub config: Value,
    pub results: Value,
    pub provenance: Provenance,
}

impl Envelope {
    pub fn new(config: Value, results: Value, seed: u64) -> Self {
        Envelope {
            config,
            results,
            provenance: Provenance { seed, version: env!("CARGO_PKG_VERSION") },
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// The `#`-prefixed comment block echoing the config, plus provenance.
    /// Key order is the (sorted) JSON object order, so identical configs
    /// echo identically.
    pub fn csv_header(&self) -> String {
        let mut out = String::new();
        if let Value::Object(map) = &self.config {
            for (key, value) in map {
                out.push_str(&format!("# {key}={}\n", csv_scalar(value)));
            }
        }
        out.push_str(&format!("# seed={}\n", self.provenance.seed));
        out.push_str(&format!("# version={}\n", self.provenance.version));
        out
    }
}

/// Flat rendering for config echo cells: arrays join with commas, strings
/// drop their quotes.
fn csv_scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            items.iter().map(csv_scalar).collect::<Vec<_>>().join(",")
        }
        other => other.to_string(),
    }
}

/// Shortest round-trip decimal for table cells, matching the JSON encoder.
pub fn csv_float(v: f64) -> String {
    let mut buf = ryu_free_format(v);
    if buf.is_empty() {
        buf.push('0');
    }
    buf
}

fn ryu_free_format(v: f64) -> String {
    // serde_json writes floats through ryu; routing single values through a
    // JSON number keeps the CSV cells byte-identical to the JSON artifact.
    serde_json::to_string(&v).unwrap_or_else(|_| v.to_string())
}

/// Writes the artifact to `--out` or stdout. File problems are input-class
/// errors: the run was asked to write somewhere it cannot.
pub fn deliver(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| {
            CliError::Input(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Input(format!("cannot write stdout: {e}")))
        }
    }
}
