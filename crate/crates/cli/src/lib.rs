//! Config-file front end for `tsfloquet`: load a system, analyze it and
//! render the report as text or JSON.

pub mod config;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tsfloquet::oracle::{cross_check_report, DEFAULT_RK_TOL};
use tsfloquet::{analyze, AnalysisOptions};

pub use config::{load_config, parse_config, Config, ConfigError};
pub use report::{OracleSummary, Report};

/// Exit code for configuration, analysis and I/O errors.
pub const EXIT_ERROR: i32 = 3;

/// Absolute tolerance of the oracle comparison on top of the truncation bound.
pub const ORACLE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analysis(#[from] tsfloquet::Error),
    #[error("cannot list {path}: {source}")]
    Batch {
        path: String,
        source: std::io::Error,
    },
}

/// Command-line overrides; `None`/`false` defers to the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub oracle: bool,
    pub shi: bool,
}

pub fn run_config(cfg: &Config, opts: &RunOptions) -> Result<Report, RunError> {
    let start = Instant::now();
    let mut cfg = cfg.clone();
    if opts.tol.is_some() {
        cfg.tol = opts.tol;
    }
    let spec = cfg.to_spec()?;
    let analysis = AnalysisOptions {
        n: opts.n.or(cfg.n),
        shi: opts.shi || cfg.shi,
        ..AnalysisOptions::default()
    };
    let result = analyze(&spec, &analysis)?;
    let oracle = if opts.oracle || cfg.oracle {
        let rk_tol = cfg.rk_tol.unwrap_or(DEFAULT_RK_TOL);
        let bound = result.err_bound.value();
        Some(
            match cross_check_report(&spec, result.a_partial, result.b, bound, ORACLE_TOL, rk_tol) {
                Ok(check) => OracleSummary::from(&check),
                Err(tsfloquet::Error::CheckFailed {
                    a_oracle, b_oracle, ..
                }) => OracleSummary {
                    a_oracle,
                    b_oracle,
                    a_delta: (a_oracle - result.a_partial).abs(),
                    b_delta: (b_oracle - result.b).abs(),
                    a_allowed: bound + ORACLE_TOL,
                    passed: false,
                },
                Err(e) => return Err(e.into()),
            },
        )
    } else {
        None
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut report = Report::new(&result, spec.ts.is_discrete(), elapsed_ms);
    report.oracle = oracle;
    Ok(report)
}

pub fn run_file(path: &Path, opts: &RunOptions) -> Result<Report, RunError> {
    let cfg = load_config(path)?;
    let mut report = run_config(&cfg, opts)?;
    report.file = Some(path.display().to_string());
    Ok(report)
}

/// One file of a batch run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchEntry {
    pub file: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<Report>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub exit_code: i32,
}

/// Config files (`*.cfg`) of `dir`, sorted by name.
pub fn batch_files(dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let listing = std::fs::read_dir(dir).map_err(|source| RunError::Batch {
        path: dir.display().to_string(),
        source,
    })?;
    let mut files = Vec::new();
    for entry in listing {
        let path = entry
            .map_err(|source| RunError::Batch {
                path: dir.display().to_string(),
                source,
            })?
            .path();
        if path.is_file() && path.extension().is_some_and(|e| e == "cfg") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Analyzes every config of `dir` in parallel; entries keep file order.
pub fn run_batch(dir: &Path, opts: &RunOptions) -> Result<Vec<BatchEntry>, RunError> {
    let files = batch_files(dir)?;
    Ok(files
        .par_iter()
        .map(|path| {
            let file = path.display().to_string();
            match run_file(path, opts) {
                Ok(report) => BatchEntry {
                    file,
                    exit_code: report.exit_code(),
                    report: Some(report),
                    error: None,
                },
                Err(e) => BatchEntry {
                    file,
                    report: None,
                    error: Some(e.to_string()),
                    exit_code: EXIT_ERROR,
                },
            }
        })
        .collect())
}
