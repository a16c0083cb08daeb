//! Output plumbing: exit classes, metadata, atomic file writes.

use std::fmt;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::{DateTime, SecondsFormat, Utc};
use tempfile::NamedTempFile;
use tpdicke::sweep::Metadata;

use crate::config::RunConfig;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NONCONVERGENCE: u8 = 3;
pub const EXIT_INVARIANT: u8 = 4;

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl std::error::Error for Failure {}

pub fn validation(error: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(Failure { code: EXIT_VALIDATION, error: error.into() })
}

/// Exit code for an error; unclassified errors count as invariant failures.
pub fn exit_code(error: &anyhow::Error) -> u8 {
    error.downcast_ref::<Failure>().map_or(EXIT_INVARIANT, |f| f.code)
}

/// Clock for metadata; `SOURCE_DATE_EPOCH` pins it for reproducible files.
pub fn timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    now.to_rfc3339_opts(SecondsFormat::Secs, true)
}

pub fn metadata(config: &RunConfig, started: String) -> Result<Metadata> {
    Ok(Metadata {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: serde_json::to_value(config)?,
        seed: config.controls.seed,
        started,
        finished: timestamp(),
    })
}

/// A file reserved before computing: the temporary sibling is created at
/// once (so unwritable locations fail early) and renamed on commit.
pub struct PendingFile {
    target: PathBuf,
    temp: NamedTempFile,
}

impl PendingFile {
    pub fn reserve(target: &Path) -> Result<Self> {
        let dir = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut builder = tempfile::Builder::new();
        #[cfg(unix)]
        builder.permissions(std::os::unix::fs::PermissionsExt::from_mode(0o644));
        let temp = builder
            .tempfile_in(&dir)
            .with_context(|| format!("output directory {} is not writable", dir.display()))
            .map_err(validation)?;
        Ok(Self { target: target.to_path_buf(), temp })
    }

    pub fn write_with(self, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<PathBuf> {
        {
            let mut out = BufWriter::new(self.temp.as_file());
            body(&mut out).with_context(|| format!("writing {}", self.target.display()))?;
            out.flush()?;
        }
        self.temp.persist(&self.target).with_context(|| format!("renaming into {}", self.target.display()))?;
        Ok(self.target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pending_file_commits_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out.csv");
        let pending = PendingFile::reserve(&target).unwrap();
        assert!(!target.exists());
        pending.write_with(|w| w.write_all(b"a,b\n")).unwrap();
        assert_eq!(std::fs::read_to_string(&target).unwrap(), "a,b\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn unwritable_directory_is_a_validation_error() {
        let err = PendingFile::reserve(Path::new("/nonexistent-dir/x.csv")).err().unwrap();
        assert_eq!(exit_code(&err), EXIT_VALIDATION);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&validation(anyhow::anyhow!("x"))), EXIT_VALIDATION);
        assert_eq!(exit_code(&anyhow::anyhow!("x")), EXIT_INVARIANT);
    }
}
