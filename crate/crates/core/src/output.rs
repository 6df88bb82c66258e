//! File emission: CSV and JSON writers with atomic replacement and checksummed
//! manifests.
//!
//! Floats are printed in scientific notation with 12 fractional digits, so
//! identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dynamics::SimulationTrace;
use crate::error::Result;
use crate::spectral::ComplexSpectrum;
use crate::stability::SweepGrid;

/// 13 significant digits, locale-independent.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.12e}")
}

/// Writes via a temporary sibling file and an atomic rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    std::io::Write::write_all(&mut tmp, contents)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    write_atomic(path, body.as_bytes())
}

/// Spectrum CSV: header `re,im`, one eigenvalue per row.
pub fn spectrum_csv(spectrum: &ComplexSpectrum) -> String {
    let mut out = String::from("re,im\n");
    for z in spectrum.values() {
        let _ = writeln!(out, "{},{}", fmt_float(z.re), fmt_float(z.im));
    }
    out
}

/// Sweep CSV. One axis: `theta_rad,min_eig_gamma` rows. Two axes: the first
/// row carries the second axis' samples, then each row starts with its first
/// axis sample followed by the grid values.
pub fn sweep_csv(grid: &SweepGrid) -> String {
    let mut out = String::new();
    match grid.axes.len() {
        1 => {
            out.push_str("theta_rad,min_eig_gamma\n");
            for (theta, row) in grid.axes[0].iter().zip(&grid.values) {
                let _ = writeln!(out, "{},{}", fmt_float(*theta), fmt_float(row[0]));
            }
        }
        _ => {
            out.push_str("theta_first_rad\\theta_second_rad");
            for theta in &grid.axes[1] {
                let _ = write!(out, ",{}", fmt_float(*theta));
            }
            out.push('\n');
            for (theta, row) in grid.axes[0].iter().zip(&grid.values) {
                let _ = write!(out, "{}", fmt_float(*theta));
                for v in row {
                    let _ = write!(out, ",{}", fmt_float(*v));
                }
                out.push('\n');
            }
        }
    }
    out
}

/// Trace CSV: `t,z_1x,z_1y,...,delta`.
pub fn trace_csv(trace: &SimulationTrace, dim: usize) -> String {
    let coord_names = ["x", "y", "z"];
    let agents = trace.states.first().map_or(0, |s| s.len() / dim);
    let mut out = String::from("t");
    for agent in 1..=agents {
        for k in 0..dim {
            let _ = write!(out, ",z_{}{}", agent, coord_names[k]);
        }
    }
    out.push_str(",delta\n");
    for (k, t) in trace.times.iter().enumerate() {
        let _ = write!(out, "{}", fmt_float(*t));
        for v in trace.states[k].iter() {
            let _ = write!(out, ",{}", fmt_float(*v));
        }
        let delta = trace.errors.get(k).copied().unwrap_or(f64::NAN);
        let _ = writeln!(out, ",{}", fmt_float(delta));
    }
    out
}

/// One emitted file: its path (relative to the run directory), SHA-256 and
/// size.
#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

pub fn manifest_entry(relative: &str, contents: &[u8]) -> ManifestEntry {
    let digest = Sha256::digest(contents);
    let mut sha256 = String::with_capacity(64);
    for byte in digest {
        let _ = write!(sha256, "{byte:02x}");
    }
    ManifestEntry {
        path: relative.to_string(),
        sha256,
        bytes: contents.len(),
    }
}

/// Writes `contents` under `dir/name` and records it in the manifest.
pub fn emit(
    dir: &Path,
    name: &str,
    contents: &[u8],
    manifest: &mut Vec<ManifestEntry>,
) -> Result<PathBuf> {
    let path = dir.join(name);
    write_atomic(&path, contents)?;
    manifest.push(manifest_entry(name, contents));
    Ok(path)
}
