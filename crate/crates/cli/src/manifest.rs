use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// Words an operation was allowed and projected to enumerate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetUse {
    pub operation: String,
    pub words: u64,
    pub cap: u64,
}

/// Bookkeeping for one run. Timestamps live here and nowhere else, so reports
/// stay byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub budgets: Vec<BudgetUse>,
    pub warnings: Vec<String>,
    pub reports: Vec<PathBuf>,
    pub exit_code: i32,
}

pub fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

/// `<dir>/<stem>.manifest.json` next to the report.
pub fn manifest_path(report: &Path) -> PathBuf {
    sibling(report, "manifest.json")
}

/// `<dir>/<stem>.<suffix>`.
pub fn sibling(report: &Path, suffix: &str) -> PathBuf {
    let stem = report
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    report.with_file_name(format!("{stem}.{suffix}"))
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }

    /// Every referenced report exists on disk.
    pub fn reports_exist(&self) -> bool {
        self.reports.iter().all(|p| p.exists())
    }
}
