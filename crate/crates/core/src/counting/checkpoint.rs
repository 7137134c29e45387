//! Resumable progress records for long counting runs.
//!
//! The state file is JSON: format version, a SHA-256 hash identifying the
//! job, the row range, the next unprocessed row and the partial sum so far.

use std::fs;
use std::io;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{CheckpointConfig, CountError, CountJob, Counter};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint I/O: {0}")]
    Io(#[from] io::Error),
    #[error("malformed checkpoint: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("checkpoint version {found} is not supported (expected {CHECKPOINT_VERSION})")]
    Version { found: u32 },
    #[error("checkpoint belongs to a different job ({found}, expected {expected})")]
    JobMismatch { found: String, expected: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointState {
    pub version: u32,
    pub job_hash: String,
    pub rows_start: u64,
    pub rows_end: u64,
    pub next_row: u64,
    #[serde(with = "crate::serde_big::u64_str")]
    pub partial_sum: u64,
}

impl CheckpointState {
    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        let state: CheckpointState = serde_json::from_str(&fs::read_to_string(path)?)?;
        if state.version != CHECKPOINT_VERSION {
            return Err(CheckpointError::Version { found: state.version });
        }
        Ok(state)
    }

    /// Write to a sibling temporary file and rename over the target.
    pub fn store(&self, path: &Path) -> Result<(), CheckpointError> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string_pretty(self)?)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Identifies everything that influences the sum: form, field, modulus,
/// enumeration mode and row range.
pub fn job_hash(job: &CountJob, counter: &Counter, rows: &Range<u64>) -> String {
    let desc = format!(
        "mk3-count/v{CHECKPOINT_VERSION};form={};p={};n={};modulus={:?};reduced={};rows={}..{}",
        job.form,
        job.p,
        job.n,
        counter.field.ctx().modulus(),
        job.symmetry_reduction,
        rows.start,
        rows.end
    );
    format!("{:x}", Sha256::digest(desc.as_bytes()))
}

pub(super) fn run_with_checkpoints(
    job: &CountJob,
    counter: &Counter,
    rows: Range<u64>,
    cfg: &CheckpointConfig,
) -> Result<u64, CountError> {
    let hash = job_hash(job, counter, &rows);
    let mut state = if cfg.resume && cfg.path.exists() {
        let s = CheckpointState::load(&cfg.path)?;
        if s.job_hash != hash {
            return Err(CheckpointError::JobMismatch { found: s.job_hash, expected: hash }.into());
        }
        s
    } else {
        CheckpointState {
            version: CHECKPOINT_VERSION,
            job_hash: hash,
            rows_start: rows.start,
            rows_end: rows.end,
            next_row: rows.start,
            partial_sum: 0,
        }
    };
    let block = (cfg.every_fibers / counter.fibers_per_row()).max(1);
    while state.next_row < state.rows_end {
        let end = (state.next_row + block).min(state.rows_end);
        state.partial_sum += counter.block_sum(state.next_row..end);
        state.next_row = end;
        state.store(&cfg.path)?;
    }
    Ok(state.partial_sum)
}
