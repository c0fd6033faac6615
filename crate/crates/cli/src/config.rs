use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fractalab_core::content::Region;
use fractalab_core::targets::GaugeSpec;
use fractalab_core::{gallery, IfsSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Prefix selecting a bundled system instead of a file.
pub const GALLERY_PREFIX: &str = "gallery:";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

/// One experiment: which system, which pipeline, and where the report goes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Path to an IFS JSON file, or `gallery:<name>`.
    pub ifs: String,
    pub seed: u64,
    #[serde(default)]
    pub format: OutputFormat,
    /// Report path; defaults to `<command>.<format>` in the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub task: Task,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    Dim {
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "default_certify_width")]
        certify_width: f64,
    },
    Pressure {
        s: Vec<f64>,
        #[serde(default = "default_kmax")]
        kmax: usize,
    },
    Cutset {
        r: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    Awsc {
        #[serde(default = "default_awsc_kmin")]
        kmin: usize,
        #[serde(default = "default_awsc_kmax")]
        kmax: usize,
    },
    Target(TargetParams),
    Baker(BakerParams),
    Content(ContentParams),
    FullReport {
        #[serde(default = "default_tol")]
        tol: f64,
    },
    Validate {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kmax: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetParams {
    pub x0: Vec<f64>,
    pub delta: Vec<f64>,
    #[serde(default = "default_rmax")]
    pub rmax: f64,
    /// Finest cut radius; defaults to `2^{-15/δ}`, floored at `1e-7`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rmin: Option<f64>,
    #[serde(default = "default_eps_jmin")]
    pub eps_jmin: u32,
    #[serde(default = "default_eps_jmax")]
    pub eps_jmax: u32,
    #[serde(default = "default_coverage_points")]
    pub coverage_points: usize,
    #[serde(default = "default_series_epsilon")]
    pub series_epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BakerParams {
    pub gauge: GaugeSpec,
    pub x0: Vec<f64>,
    pub delta: Vec<f64>,
    #[serde(default = "default_rmax")]
    pub rmax: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rmin: Option<f64>,
    #[serde(default = "default_eps_jmin")]
    pub eps_jmin: u32,
    #[serde(default = "default_eps_jmax")]
    pub eps_jmax: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContentParams {
    pub s: Vec<f64>,
    #[serde(default = "default_eta")]
    pub eta: Vec<f64>,
    pub grid_scale: Vec<f64>,
    #[serde(default = "default_content_samples")]
    pub samples: usize,
    #[serde(default = "default_region")]
    pub region: Region,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

pub fn default_tol() -> f64 {
    1e-10
}
pub fn default_certify_width() -> f64 {
    fractalab_core::thermo::DEFAULT_CERTIFY_WIDTH
}
pub fn default_kmax() -> usize {
    12
}
pub fn default_awsc_kmin() -> usize {
    4
}
pub fn default_awsc_kmax() -> usize {
    12
}
pub fn default_rmax() -> f64 {
    0.5
}
pub fn default_eps_jmin() -> u32 {
    6
}
pub fn default_eps_jmax() -> u32 {
    14
}
pub fn default_coverage_points() -> usize {
    20_000
}
pub fn default_series_epsilon() -> f64 {
    1e-3
}
pub fn default_eta() -> Vec<f64> {
    vec![0.0, 0.05]
}
pub fn default_content_samples() -> usize {
    100_000
}
pub fn default_region() -> Region {
    Region::Whole
}

/// Finest cut radius used when none is configured.
pub fn default_rmin(delta: f64) -> f64 {
    0.5f64.powf(15.0 / delta.max(1e-9)).max(1e-7)
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Dim { .. } => "dim",
            Task::Pressure { .. } => "pressure",
            Task::Cutset { .. } => "cutset",
            Task::Awsc { .. } => "awsc",
            Task::Target(_) => "target",
            Task::Baker(_) => "baker",
            Task::Content(_) => "content",
            Task::FullReport { .. } => "full-report",
            Task::Validate { .. } => "validate",
        }
    }
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        bail!("{}", what())
    }
}

fn check_deltas(delta: &[f64]) -> Result<()> {
    check(!delta.is_empty(), || "at least one δ is required".into())?;
    for d in delta {
        check(d.is_finite() && *d >= 0.0, || format!("δ = {d} must be ≥ 0"))?;
    }
    Ok(())
}

fn check_ladder(rmax: f64, rmin: Option<f64>, jmin: u32, jmax: u32) -> Result<()> {
    check(rmax > 0.0 && rmax.is_finite(), || format!("rmax = {rmax} must be > 0"))?;
    if let Some(r) = rmin {
        check(r > 0.0 && r <= rmax, || format!("rmin = {r} must lie in (0, rmax]"))?;
    }
    check(jmin < jmax && jmax <= 40, || format!("ε ladder 2^-{jmin}..2^-{jmax} is invalid"))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            anyhow::anyhow!("config parse error at line {}, column {}: {e}", e.line(), e.column())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    /// Parameter ranges.
    pub fn validate(&self) -> Result<()> {
        match &self.task {
            Task::Dim { tol, certify_width } => {
                check(*tol > 0.0 && *tol < 1.0, || format!("tol = {tol} must lie in (0, 1)"))?;
                check(*certify_width > 0.0, || "certify_width must be > 0".into())
            }
            Task::Pressure { s, kmax } => {
                check(!s.is_empty(), || "at least one s is required".into())?;
                check(s.iter().all(|v| v.is_finite() && *v >= 0.0), || "s values must be ≥ 0".into())?;
                check((1..=40).contains(kmax), || format!("kmax = {kmax} must lie in 1..=40"))
            }
            Task::Cutset { r, .. } => check(*r > 0.0 && r.is_finite(), || format!("r = {r} must be > 0")),
            Task::Awsc { kmin, kmax } => check(1 <= *kmin && kmin <= kmax && *kmax <= 30, || {
                format!("awsc range {kmin}..={kmax} must satisfy 1 ≤ kmin ≤ kmax ≤ 30")
            }),
            Task::Target(p) => {
                check_deltas(&p.delta)?;
                check_ladder(p.rmax, p.rmin, p.eps_jmin, p.eps_jmax)?;
                check(p.coverage_points > 0, || "coverage_points must be ≥ 1".into())?;
                check(p.series_epsilon > 0.0, || "series_epsilon must be > 0".into())
            }
            Task::Baker(p) => {
                check_deltas(&p.delta)?;
                p.gauge.validate()?;
                check_ladder(p.rmax, p.rmin, p.eps_jmin, p.eps_jmax)
            }
            Task::Content(p) => {
                check(!p.s.is_empty() && !p.grid_scale.is_empty() && !p.eta.is_empty(), || {
                    "s, eta and grid_scale must be non-empty".into()
                })?;
                check(p.s.iter().all(|v| v.is_finite() && *v >= 0.0), || "s values must be ≥ 0".into())?;
                check(p.eta.iter().all(|e| (0.0..=fractalab_core::content::MAX_ETA).contains(e)), || {
                    format!("eta values must lie in [0, {}]", fractalab_core::content::MAX_ETA)
                })?;
                check(p.grid_scale.iter().all(|h| *h > 0.0 && h.is_finite()), || {
                    "grid scales must be > 0".into()
                })?;
                check(p.samples > 0, || "samples must be ≥ 1".into())
            }
            Task::FullReport { tol } => check(*tol > 0.0 && *tol < 1.0, || format!("tol = {tol} must lie in (0, 1)")),
            Task::Validate { .. } => Ok(()),
        }
    }

    /// Canonical JSON: keys sorted, no whitespace, output location dropped.
    pub fn canonical_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = value.as_object_mut() {
            obj.remove("out");
        }
        serde_json::to_string(&value).expect("value serializes")
    }

    /// SHA-256 of [`canonical_json`](Self::canonical_json), hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn report_path(&self) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.{}", self.task.name(), self.format.extension())))
    }

    pub fn load_spec(&self) -> Result<IfsSpec> {
        load_spec(&self.ifs)
    }
}

/// Reads an IFS from a file or the bundled gallery.
pub fn load_spec(source: &str) -> Result<IfsSpec> {
    if let Some(name) = source.strip_prefix(GALLERY_PREFIX) {
        return gallery::spec_named(name).with_context(|| format!("no bundled system named {name:?}"));
    }
    IfsSpec::from_file(source).with_context(|| format!("loading {source}"))
}
