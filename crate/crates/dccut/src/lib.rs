//! Std companion to `dccut-core`: instance files, a thread-pool executor,
//! run reports, benchmark sweeps and the `dccut` command-line driver.

pub mod cli;
pub mod exec;
pub mod format;
pub mod mps;
pub mod report;
pub mod sweep;

use std::path::Path;

use dccut_core::{
    dccut_solve_with, MblpInstance, SerialExecutor, SolveError, SolveReport, SolverConfig,
};
use thiserror::Error;

pub use exec::{RayonExecutor, WallClock};
pub use format::{parse_instance, serialize_instance, FormatError};
pub use mps::{parse_mps, MpsError};
pub use report::RunRecord;

/// Instances shipped with the crate, addressable by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("ex_a", include_str!("../data/ex_a.mblp")),
    ("ex_b", include_str!("../data/ex_b.mblp")),
    (
        "sample_10_0_10",
        include_str!("../data/sample_10_0_10.mblp"),
    ),
    (
        "sample_30_0_10",
        include_str!("../data/sample_30_0_10.mblp"),
    ),
];

/// A bundled instance by name.
pub fn bundled(name: &str) -> Option<MblpInstance> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_instance(text).expect("bundled instances parse"))
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format { path: String, source: FormatError },
    #[error("{path}: {source}")]
    Mps { path: String, source: MpsError },
}

/// Loads an instance from a path (`.mps` files use the MPS reader, anything
/// else the text format) or, if no such file exists, a bundled name. Returns
/// the instance and a display name.
pub fn load_instance(name_or_path: &str) -> Result<(MblpInstance, String), LoadError> {
    let path = Path::new(name_or_path);
    if !path.exists() {
        if let Some(inst) = bundled(name_or_path) {
            return Ok((inst, name_or_path.to_string()));
        }
    }
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: name_or_path.to_string(),
        source,
    })?;
    let stem = path
        .file_stem()
        .map_or_else(|| name_or_path.to_string(), |s| s.to_string_lossy().into_owned());
    let is_mps = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("mps"));
    if is_mps {
        let (inst, name) = parse_mps(&text).map_err(|source| LoadError::Mps {
            path: name_or_path.to_string(),
            source,
        })?;
        Ok((inst, if name.is_empty() { stem } else { name }))
    } else {
        let inst = parse_instance(&text).map_err(|source| LoadError::Format {
            path: name_or_path.to_string(),
            source,
        })?;
        Ok((inst, stem))
    }
}

/// Runs the solver with wall-clock time limits, on a rayon pool of
/// `cfg.workers` threads when more than one worker is requested.
pub fn solve(inst: &MblpInstance, cfg: &SolverConfig) -> Result<SolveReport, SolveError> {
    let clock = WallClock::start();
    if cfg.workers > 1 {
        match RayonExecutor::new(cfg.workers) {
            Ok(exec) => return dccut_solve_with(inst, cfg, &clock, &exec),
            Err(e) => log::warn!(
                "could not start {} worker threads ({e}); running serially",
                cfg.workers
            ),
        }
    }
    dccut_solve_with(inst, cfg, &clock, &SerialExecutor)
}
