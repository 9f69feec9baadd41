//! Correlation analysis over episode log files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use elegance_core::stats::{compare_final_elegance, correlate_logs, CorrelationMatrix, FinalEleganceComparison};
use elegance_core::EpisodeLog;
use serde::Serialize;

use crate::headless::read_log;

#[derive(Debug, Serialize)]
pub struct Report {
    pub logs: usize,
    pub correlation: CorrelationMatrix,
    /// Present when at least two logs carry a halt record.
    pub final_elegance: Option<FinalEleganceComparison>,
}

/// Expands a glob pattern into a sorted list of files.
pub fn expand(pattern: &str) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = glob::glob(pattern)
        .with_context(|| format!("bad glob pattern `{pattern}`"))?
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.is_file());
    paths.sort();
    if paths.is_empty() {
        bail!("no log files match `{pattern}`");
    }
    Ok(paths)
}

pub fn analyze_logs(logs: &[EpisodeLog]) -> Result<Report> {
    let correlation = correlate_logs(logs)?;
    let final_elegance = compare_final_elegance(logs).ok();
    Ok(Report {
        logs: logs.len(),
        correlation,
        final_elegance,
    })
}

/// JSON sidecar next to the TSV output: `report.tsv` -> `report.tsv.json`.
pub fn json_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Reads every log matching `pattern`, writes the matrix as TSV to `out` and
/// the full report as JSON beside it.
pub fn run_analyze(pattern: &str, out: &Path) -> Result<Report> {
    let logs = expand(pattern)?
        .iter()
        .map(|p| read_log(p))
        .collect::<Result<Vec<_>>>()?;
    let report = analyze_logs(&logs)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(out, report.correlation.to_tsv()).with_context(|| format!("writing {}", out.display()))?;
    let json = json_path(out);
    fs::write(&json, serde_json::to_string_pretty(&report)? + "\n")
        .with_context(|| format!("writing {}", json.display()))?;
    Ok(report)
}
