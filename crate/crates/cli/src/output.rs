//! Flow time series, event logs and run records.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use lmcf::flow1d::{Event, RunStatus, Trajectory};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const CSV_HEADER: &str = "# lmcf-flow-csv v1";
pub const CSV_COLUMNS: &str = "t,step,total_length,components,crossings,theta_min,theta_max,max_curvature,min_edge,potential_defect,obstructed,face_areas,cochain_valuations";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// One row per sample. Face areas are `id=area` pairs and cochain
/// valuations `crossing=valuation` pairs, both joined by `;`.
pub fn flow_csv(tr: &Trajectory) -> String {
    let mut out = format!("{CSV_HEADER}\n{CSV_COLUMNS}\n");
    for s in &tr.samples {
        let faces: Vec<String> = s.faces.iter().map(|f| format!("{}={}", f.id, f.area)).collect();
        let cochains: Vec<String> = s.cochains.iter().map(|(id, v)| format!("{id}={v}")).collect();
        let obstructed = match s.obstructed {
            Some(true) => "yes",
            Some(false) => "no",
            None => "",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.t,
            s.step,
            s.total_length,
            s.components,
            s.crossings,
            s.theta_min,
            s.theta_max,
            s.max_curvature,
            s.min_edge,
            s.potential_defect,
            obstructed,
            faces.join(";"),
            cochains.join(";")
        );
    }
    out
}

#[derive(Serialize)]
struct EventLog<'a> {
    format: &'static str,
    status: RunStatus,
    terminal_time: Option<f64>,
    steps: usize,
    final_time: f64,
    events: &'a [Event],
}

pub fn event_log(tr: &Trajectory) -> Result<String> {
    let log = EventLog {
        format: "lmcf-events v1",
        status: tr.status,
        terminal_time: tr.terminal_time,
        steps: tr.final_state.steps,
        final_time: tr.final_state.t,
        events: &tr.events,
    };
    Ok(serde_json::to_string_pretty(&log)? + "\n")
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputEntry {
    pub kind: String,
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub scenario: PathBuf,
    pub scenario_sha256: String,
    pub seed: u64,
    pub tool_version: String,
    pub status: Option<RunStatus>,
    pub exit_code: i32,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputEntry>,
}

/// Writes `contents` under `dir` and returns its manifest entry.
pub fn write_output(dir: &Path, name: &str, kind: &str, contents: &str) -> Result<OutputEntry> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(OutputEntry { kind: kind.into(), path, sha256: sha256_hex(contents.as_bytes()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn outputs_land_in_nested_directories() {
        let dir = tempfile::tempdir().unwrap();
        let e = write_output(dir.path(), "a/b.txt", "note", "hi\n").unwrap();
        assert_eq!(std::fs::read_to_string(&e.path).unwrap(), "hi\n");
        assert_eq!(e.sha256, sha256_hex(b"hi\n"));
    }
}
