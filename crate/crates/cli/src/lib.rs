//! Experiment runner: configuration, orchestration and report persistence.

pub mod cli;
pub mod config;
pub mod manifest;
pub mod pipeline;
pub mod validate;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fractalab_core::{gallery, Error};
use serde_json::{json, Value};

use config::{ExperimentConfig, OutputFormat, Task};
use manifest::{manifest_path, sibling, unix_ms, RunManifest};
use pipeline::{execute, system_summary, Outcome, Report};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a finished run leaves behind.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub report_path: PathBuf,
    pub manifest_path: PathBuf,
    pub manifest: RunManifest,
    pub summary: Vec<String>,
    pub outcome: Outcome,
}

impl RunResult {
    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }
}

/// Executes `config`, writes the report, attachments and manifest.
///
/// Budget and inconclusive failures still produce a report (with whatever
/// partial values exist) and a manifest warning; other errors are returned.
pub fn run(config: &ExperimentConfig) -> Result<RunResult> {
    config.validate()?;
    let started = unix_ms();
    let is_validate = matches!(config.task, Task::Validate { .. });
    let (report, system) = match config.load_spec() {
        Ok(spec) => {
            let system = spec.build().ok().map(|s| system_summary(&spec, &s));
            (recover(execute(config, &spec))?, system.unwrap_or(Value::Null))
        }
        Err(_) if is_validate => {
            let kmax = match config.task {
                Task::Validate { kmax } => kmax,
                _ => None,
            };
            (
                pipeline::diagnostics_report(validate::validate_source(&config.ifs, kmax)),
                Value::Null,
            )
        }
        Err(e) => return Err(e),
    };

    let report_path = config.report_path();
    if let Some(dir) = report_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let text = match config.format {
        OutputFormat::Json => {
            let doc = json!({
                "tool": "fractalab",
                "version": TOOL_VERSION,
                "command": config.task.name(),
                "config_hash": config.hash(),
                "seed": config.seed,
                "ifs": config.ifs,
                "system": system,
                "outcome": report.outcome,
                "warnings": report.warnings,
                "result": report.result,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        OutputFormat::Csv => report.table.clone().unwrap_or_else(|| flatten_csv(&report.result)),
    };
    write(&report_path, &text)?;
    let mut reports = vec![report_path.clone()];
    for (suffix, contents) in &report.attachments {
        let path = sibling(&report_path, suffix);
        write(&path, contents)?;
        reports.push(path);
    }
    let manifest = RunManifest {
        config_hash: config.hash(),
        tool_version: TOOL_VERSION.into(),
        command: config.task.name().into(),
        seed: config.seed,
        started_unix_ms: started,
        finished_unix_ms: unix_ms(),
        budgets: report.budgets.clone(),
        warnings: report.warnings.clone(),
        reports,
        exit_code: report.outcome.exit_code(),
    };
    let manifest_path = manifest_path(&report_path);
    manifest.write(&manifest_path)?;
    Ok(RunResult {
        report_path,
        manifest_path,
        manifest,
        summary: report.summary,
        outcome: report.outcome,
    })
}

/// Turns budget and inconclusive errors into reports.
fn recover(result: Result<Report>) -> Result<Report> {
    let err = match result {
        Ok(r) => return Ok(r),
        Err(e) => e,
    };
    match err.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded {
            budget,
            requested,
            depth_reached,
            partial,
        }) => Ok(pipeline::failure_report(
            Outcome::Fail,
            json!({
                "error": "budget-exceeded",
                "budget": budget,
                "requested": requested,
                "depth_reached": depth_reached,
                "partial": partial,
            }),
            err.to_string(),
        )),
        Some(Error::Inconclusive { reason, ladder }) => Ok(pipeline::failure_report(
            Outcome::Inconclusive,
            json!({ "inconclusive": reason, "ladder": ladder }),
            err.to_string(),
        )),
        _ => Err(err),
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// `field,value` rows for every scalar leaf, paths joined with `.`.
pub fn flatten_csv(value: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, v, out);
                }
            }
            Value::Array(items) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), v, out);
                }
            }
            Value::String(s) => out.push_str(&format!("{prefix},{s}\n")),
            other => out.push_str(&format!("{prefix},{other}\n")),
        }
    }
    let mut out = String::from("field,value\n");
    walk("", value, &mut out);
    out
}

/// Writes every bundled system to `dir/<name>.json`.
pub fn export_gallery(dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    gallery::every_spec()
        .into_iter()
        .map(|spec| {
            let name = spec.name.clone().unwrap_or_else(|| "system".into());
            let path = dir.join(format!("{name}.json"));
            write(&path, &(spec.to_json() + "\n"))?;
            Ok(path)
        })
        .collect()
}
