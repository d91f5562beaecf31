//! File formats: atomic writes, JSON helpers, and the CSV schemas.
//!
//! All floats are written with Rust's shortest round-trip formatting, so
//! rereading a file reproduces the exact bit pattern and repeated runs with
//! the same seed produce byte-identical artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dwellopt_core::eval::{CompareOutcome, ModeSummary};
use dwellopt_core::moea::{ElitistArchive, Traces};
use dwellopt_core::patient::PatientCase;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::CliError;

/// Writes via a dotfile in the same directory plus rename, so interrupted
/// runs never leave a partial artifact under the final name.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| CliError::Io(format!("writing {}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Io(format!("{} has no file name", path.display())))?;
    let tmp = match dir {
        Some(d) => d.join(format!(".{}.tmp", name.to_string_lossy())),
        None => Path::new(&format!(".{}.tmp", name.to_string_lossy())).to_path_buf(),
    };
    fs::write(&tmp, bytes).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("encoding {}: {e}", path.display())))?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

/// Reads a user-supplied input file; failures are usage errors, not I/O
/// errors, because the path came from the command line.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("parsing {}: {e}", path.display())))
}

/// One row per archive member: objectives, every DVI, every dwell time.
/// Dwell columns are named by dwell id in plan-vector order.
pub fn front_csv(case: &PatientCase, dvi_slugs: &[String], archive: &ElitistArchive) -> String {
    let mut out = String::from("lci,lsi,constraint");
    for slug in dvi_slugs {
        let _ = write!(out, ",{slug}");
    }
    for dwell in &case.dwell_positions {
        let _ = write!(out, ",dwell_{}", dwell.id);
    }
    out.push('\n');
    for member in archive.members() {
        let _ = write!(
            out,
            "{},{},{}",
            member.objectives.lci, member.objectives.lsi, member.objectives.constraint
        );
        for v in &member.dvi_values {
            let _ = write!(out, ",{v}");
        }
        for t in &member.dwell_times {
            let _ = write!(out, ",{t}");
        }
        out.push('\n');
    }
    out
}

/// Per-generation best objectives, one block per run phase.
pub fn trace_csv(phases: &[(&str, &Traces)]) -> String {
    let mut out = String::from("phase,generation,best_lci,best_lsi,best_min\n");
    for (phase, traces) in phases {
        for (i, ((lci, lsi), min)) in traces
            .best_lci
            .iter()
            .zip(&traces.best_lsi)
            .zip(&traces.best_min)
            .enumerate()
        {
            let _ = writeln!(out, "{phase},{},{lci},{lsi},{min}", i + 1);
        }
    }
    out
}

/// The two-row study table: mode, satisfaction aggregates, then one
/// median/std column pair per adjustable DVI. Empty pools print as n.a.
pub fn compare_csv(outcome: &CompareOutcome) -> String {
    let mut out = String::from("mode,pct_embrace_satisfied,mean_plans");
    for slug in &outcome.adjustable_slugs {
        let _ = write!(out, ",median_{slug},std_{slug}");
    }
    out.push('\n');
    for summary in [&outcome.embrace_only, &outcome.full_adaptive] {
        push_mode_row(&mut out, summary);
    }
    out
}

fn push_mode_row(out: &mut String, summary: &ModeSummary) {
    let mode = match serde_json::to_value(summary.mode) {
        Ok(serde_json::Value::String(s)) => s,
        _ => unreachable!("RunMode serializes to a string"),
    };
    let _ = write!(
        out,
        "{mode},{},{}",
        summary.pct_embrace_satisfied, summary.mean_plans
    );
    for cell in &summary.dvi_summary {
        match cell {
            Some((median, std)) => {
                let _ = write!(out, ",{median},{std}");
            }
            None => out.push_str(",n.a.,n.a."),
        }
    }
    out.push('\n');
}
