//! JSON run configuration, merged under the command-line flags.

use std::path::{Path, PathBuf};

use meanfield::ExtReal;
use serde::Deserialize;

/// Every field optional; reals are decimal strings so they parse losslessly at any precision.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n_components: Option<u32>,
    pub c02: Option<String>,
    pub c04: Option<String>,
    pub large_n: Option<bool>,
    pub grid: Option<Vec<String>>,
    pub f2_0: Option<String>,
    pub f4_0: Option<String>,
    pub beta0: Option<Vec<String>>,
    pub flow: Option<String>,
    pub target: Option<String>,
    pub exhaustive: Option<bool>,
    pub ranks: Option<Vec<usize>>,
    pub component_list: Option<Vec<u32>>,
    pub n_max: Option<usize>,
    pub k_max: Option<usize>,
    pub prec_bits: Option<u32>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }
}

/// Resolved global settings.
#[derive(Clone, Debug)]
pub struct Settings {
    pub prec: u32,
    pub n_max: usize,
    pub k_max: usize,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl Settings {
    pub fn real(&self, s: &str) -> Result<ExtReal, String> {
        ExtReal::parse(s, self.prec).map_err(|e| e.to_string())
    }

    pub fn reals(&self, items: &[String]) -> Result<Vec<ExtReal>, String> {
        items.iter().map(|s| self.real(s)).collect()
    }

    /// Significant decimal digits carried by the working precision.
    pub fn digits(&self) -> usize {
        (self.prec as f64 * std::f64::consts::LOG10_2).ceil() as usize
    }
}

/// Flag value, then config value, then default.
pub fn pick<T: Clone>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Splits `a,b,c` into trimmed pieces.
pub fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()
}
