use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::commands::{execute, read_text, RunOutput};
use super::config::RunConfig;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
pub const LOG_FILE: &str = "run.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMINGS_FILE: &str = "timings.json";

/// First line of every run log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogHeader {
    pub format_version: u32,
    pub config: RunConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary<'a> {
    pub format_version: u32,
    pub config: &'a RunConfig,
    pub records: usize,
    pub result: &'a serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub format_version: u32,
    pub command: String,
    pub wall_seconds: f64,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Writes `run.jsonl`, `summary.json`, `timings.json` and any artifacts into `dir`.
///
/// The summary is byte-identical across runs of the same config; wall-clock
/// time only appears in `timings.json`.
pub fn write_run(dir: &Path, config: &RunConfig, output: &RunOutput, elapsed: Duration) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let mut log = Vec::new();
    let header = LogHeader { format_version: FORMAT_VERSION, config: config.clone() };
    serde_json::to_writer(&mut log, &header)?;
    log.push(b'\n');
    for line in &output.records {
        log.extend_from_slice(line.as_bytes());
        log.push(b'\n');
    }
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
        let p = dir.join(name);
        write_file(&p, bytes)?;
        written.push(p);
        Ok(())
    };
    put(LOG_FILE, &log)?;
    let summary =
        Summary { format_version: FORMAT_VERSION, config, records: output.records.len(), result: &output.summary };
    let mut s = serde_json::to_vec_pretty(&summary)?;
    s.push(b'\n');
    put(SUMMARY_FILE, &s)?;
    let timings = Timings {
        format_version: FORMAT_VERSION,
        command: config.command.name().to_string(),
        wall_seconds: elapsed.as_secs_f64(),
    };
    let mut t = serde_json::to_vec_pretty(&timings)?;
    t.push(b'\n');
    put(TIMINGS_FILE, &t)?;
    for a in &output.artifacts {
        put(a.name, &a.bytes)?;
    }
    Ok(written)
}

/// Where a replayed stream first differs from the log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Divergence {
    /// 1-based line number in the log file.
    pub line: usize,
    pub logged: Option<String>,
    pub replayed: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayReport {
    pub records: usize,
    pub first_divergence: Option<Divergence>,
}

impl ReplayReport {
    pub fn identical(&self) -> bool {
        self.first_divergence.is_none()
    }
}

pub fn read_header(text: &str, path: &Path) -> Result<LogHeader> {
    let first = text.lines().next().ok_or_else(|| Error::InvalidRunLog("empty log".into()))?;
    let header: LogHeader = serde_json::from_str(first).map_err(|e| Error::parse(path, e))?;
    if header.format_version != FORMAT_VERSION {
        return Err(Error::InvalidRunLog(format!(
            "format version {} is not the supported version {FORMAT_VERSION}",
            header.format_version
        )));
    }
    Ok(header)
}

/// Re-executes the embedded config and compares record streams line by line.
pub fn replay(path: &Path) -> Result<ReplayReport> {
    let text = read_text(path)?;
    let header = read_header(&text, path)?;
    let output = execute(&header.config)?;
    let logged: Vec<&str> = text.lines().skip(1).collect();
    let n = logged.len().max(output.records.len());
    let first_divergence =
        (0..n).find(|&i| logged.get(i).copied() != output.records.get(i).map(String::as_str)).map(|i| Divergence {
            line: i + 2,
            logged: logged.get(i).map(|s| s.to_string()),
            replayed: output.records.get(i).cloned(),
        });
    Ok(ReplayReport { records: output.records.len(), first_divergence })
}
