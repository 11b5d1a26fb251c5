//! Run directories and the `run.json` record written into each of them.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::CliError;

/// Everything taken from the command line that shapes the outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub genus: u32,
    pub n: usize,
    pub rep: String,
    pub twist: String,
    pub kmax: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepInfo {
    pub construction: String,
    pub genus: u32,
    pub n: usize,
    pub source: String,
    pub relator_residual: f64,
    pub milnor_wood_bound: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ChecksFailed,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToledoSummary {
    pub value: i64,
    pub bound: i64,
    pub steps: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub run_id: String,
    pub command: String,
    pub created: String,
    pub seed: u64,
    pub workers: usize,
    pub settings: Settings,
    pub config: Config,
    pub representation: Option<RepInfo>,
    pub versions: BTreeMap<String, String>,
    pub outputs: Vec<OutputFile>,
    pub status: Status,
    pub error: Option<String>,
    pub warnings: Vec<String>,
    pub elapsed_seconds: f64,
    pub toledo: Option<ToledoSummary>,
}

pub fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("maxrep-core".to_string(), maxrep::VERSION.to_string()),
        ("maxrep-lab".to_string(), maxrep_lab::VERSION.to_string()),
        ("maxrep-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
    ])
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `<UTC timestamp>-<8 hex digits>`, the digits hashing everything that
/// determines the outputs.
pub fn run_id(created: &DateTime<Utc>, command: &str, seed: u64, settings: &Settings, config: &Config) -> String {
    let mut h = Sha256::new();
    h.update(config.to_toml().as_bytes());
    h.update(b"\0");
    h.update(command.as_bytes());
    h.update(b"\0");
    h.update(seed.to_le_bytes());
    h.update(serde_json::to_vec(settings).expect("settings serialize"));
    let digest = hex::encode(h.finalize());
    format!("{}-{}", created.format("%Y%m%dT%H%M%SZ"), &digest[..8])
}

/// Creates `out/<id>`, or `out/<id>-1`, `out/<id>-2`, ... when taken.
/// Existing run directories are never reused.
pub fn create_run_dir(out: &Path, id: &str) -> Result<(PathBuf, String), CliError> {
    fs::create_dir_all(out)?;
    for attempt in 0u32.. {
        let name = if attempt == 0 { id.to_string() } else { format!("{id}-{attempt}") };
        let dir = out.join(&name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok((dir, name)),
            Err(e) if e.kind() == ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
    unreachable!("u32 suffixes exhausted")
}

/// Writes a new file; refuses to overwrite.
pub fn write_new(dir: &Path, name: &str, bytes: &[u8]) -> Result<OutputFile, CliError> {
    let mut f = OpenOptions::new().write(true).create_new(true).open(dir.join(name))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    Ok(OutputFile {
        file: name.to_string(),
        bytes: bytes.len() as u64,
        sha256: sha256_hex(bytes),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> Settings {
        Settings {
            genus: 2,
            n: 2,
            rep: "diagonal".into(),
            twist: "a1".into(),
            kmax: 10,
        }
    }

    #[test]
    fn run_ids_hash_their_inputs() {
        let t = DateTime::parse_from_rfc3339("2026-01-02T03:04:05Z").unwrap().with_timezone(&Utc);
        let cfg = Config::default();
        let a = run_id(&t, "qi", 7, &settings(), &cfg);
        assert!(a.starts_with("20260102T030405Z-"));
        assert_eq!(a.len(), "20260102T030405Z-".len() + 8);
        assert_eq!(a, run_id(&t, "qi", 7, &settings(), &cfg));
        assert_ne!(a, run_id(&t, "qi", 8, &settings(), &cfg));
        assert_ne!(a, run_id(&t, "trlen", 7, &settings(), &cfg));
    }

    #[test]
    fn run_dirs_are_never_reused() {
        let tmp = tempfile::tempdir().unwrap();
        let (d0, n0) = create_run_dir(tmp.path(), "x").unwrap();
        let (d1, n1) = create_run_dir(tmp.path(), "x").unwrap();
        assert_eq!((n0.as_str(), n1.as_str()), ("x", "x-1"));
        assert_ne!(d0, d1);
        write_new(&d0, "a.txt", b"abc").unwrap();
        assert!(write_new(&d0, "a.txt", b"def").is_err());
        assert_eq!(fs::read(d0.join("a.txt")).unwrap(), b"abc");
    }

    // [DERIVED] FIPS 180-2 test vector.
    #[test]
    fn checksum_of_abc() {
        let out = write_new(tempfile::tempdir().unwrap().path(), "f", b"abc").unwrap();
        assert_eq!(out.sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(out.bytes, 3);
    }
}
