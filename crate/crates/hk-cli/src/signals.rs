//! Built-in reconstruction test signals and the custom samples loader.

use std::fs;
use std::path::Path;

use hk_core::GridFunction;
use serde::Deserialize;

use crate::report::{CliError, CliResult};

/// Unit jump at one half; grids for the built-in study are dyadic, so the
/// jump always lands on a node and every midpoint sees a clean 0 or 1.
pub fn step(x: f64) -> f64 {
    if x < 0.5 {
        0.0
    } else {
        1.0
    }
}

/// Fixed cubic with an interior inflection; any cubic is reproduced exactly
/// by the linear operator, which is the point of the signal.
pub fn cubic(x: f64) -> f64 {
    ((x - 2.0) * x + 0.5) * x + 0.25
}

/// A built-in signal: the function and its refinement domain.
pub type Signal = (fn(f64) -> f64, (f64, f64));

/// Signal function and its refinement domain.
pub fn built_in(name: &str) -> Option<Signal> {
    match name {
        "step" => Some((step, (0.0, 1.0))),
        // Away from sin's inflection at pi, so the curvature indicators
        // stay one-signed and the guarded operator keeps full order.
        "sin" => Some((f64::sin, (0.6, 2.5))),
        "cubic" => Some((cubic, (0.0, 1.0))),
        _ => None,
    }
}

#[derive(Debug, Deserialize)]
struct SamplesFile {
    x: Vec<f64>,
    f: Vec<f64>,
}

/// Loads `{"x": [...], "f": [...]}` into a grid function. Malformed files
/// are input errors, as is a grid the operators cannot use.
pub fn load_samples(path: &Path) -> CliResult<GridFunction> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let parsed: SamplesFile = serde_json::from_str(&text).map_err(|e| {
        CliError::Input(format!(
            "malformed samples file {}: {e} (expected fields `x` and `f`)",
            path.display()
        ))
    })?;
    GridFunction::new(&parsed.x, &parsed.f).map_err(|e| {
        CliError::Input(format!("samples file {}: {e}", path.display()))
    })
}
