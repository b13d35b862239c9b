//! Append-only shard records for resumable runs.
//!
//! One JSON object per line. A run is identified by a digest over its
//! method, base size, symmetry flag and shard count; each record carries
//! the digest of its own shard, so a file from a different run is refused.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::count::BigCount;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub shard_id: usize,
    pub partial_sum: BigCount,
    pub term_count: BigCount,
    pub digest: String,
}

/// Digest of a whole run's sharding.
pub fn run_digest(method: &str, n: usize, reduce_symmetry: bool, shards: usize) -> String {
    let mut h = Sha256::new();
    h.update(format!("{method}|n={n}|reduce={reduce_symmetry}|shards={shards}"));
    hex::encode(h.finalize())
}

/// Digest of one shard within a run.
pub fn shard_digest(run: &str, shard_id: usize) -> String {
    let mut h = Sha256::new();
    h.update(run.as_bytes());
    h.update(format!("|shard={shard_id}"));
    hex::encode(&h.finalize()[..16])
}

/// Completed shards read back from a checkpoint file.
#[derive(Debug, Default)]
pub struct Resumed {
    pub records: BTreeMap<usize, CheckpointRecord>,
    /// Byte length of the valid prefix; anything after it is a torn write.
    valid_len: u64,
}

/// Read the records of `path` for the run `run`. A missing or empty file
/// yields nothing. A final line without its newline that fails to parse is
/// treated as a torn write and dropped with a warning.
pub fn load(path: &Path, run: &str, shards: usize) -> Result<Resumed> {
    let mut text = String::new();
    match File::open(path) {
        Ok(mut f) => {
            f.read_to_string(&mut text)
                .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Resumed::default()),
        Err(e) => return Err(e.into()),
    }
    let mut out = Resumed::default();
    let mut offset = 0usize;
    let mut lineno = 0usize;
    while offset < text.len() {
        lineno += 1;
        let rest = &text[offset..];
        let (line, complete) = match rest.find('\n') {
            Some(i) => (&rest[..i], true),
            None => (rest, false),
        };
        let next = offset + line.len() + usize::from(complete);
        if line.trim().is_empty() {
            offset = next;
            out.valid_len = offset as u64;
            continue;
        }
        let rec: CheckpointRecord = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(_) if !complete => {
                log::warn!(
                    "{}: ignoring torn record on line {lineno}",
                    path.display()
                );
                break;
            }
            Err(e) => {
                return Err(Error::Checkpoint(format!(
                    "{}: line {lineno}: {e}",
                    path.display()
                )))
            }
        };
        if rec.shard_id >= shards {
            return Err(Error::Checkpoint(format!(
                "line {lineno}: shard {} out of range for {shards} shards",
                rec.shard_id
            )));
        }
        if rec.digest != shard_digest(run, rec.shard_id) {
            return Err(Error::Checkpoint(format!(
                "line {lineno}: digest mismatch for shard {}; the file belongs to a different run",
                rec.shard_id
            )));
        }
        if out.records.contains_key(&rec.shard_id) {
            return Err(Error::Checkpoint(format!(
                "line {lineno}: duplicate record for shard {}",
                rec.shard_id
            )));
        }
        out.records.insert(rec.shard_id, rec);
        offset = next;
        out.valid_len = offset as u64;
    }
    Ok(out)
}

/// Appends records, one line each, flushed per record.
pub struct CheckpointWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CheckpointWriter {
    /// Open for appending after the valid prefix found by [`load`].
    pub fn open(path: &Path, resumed: &Resumed) -> Result<Self> {
        let file = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(path)?;
        file.set_len(resumed.valid_len)?;
        let mut out = BufWriter::new(file);
        use std::io::Seek;
        out.seek(std::io::SeekFrom::End(0))?;
        Ok(CheckpointWriter {
            path: path.to_path_buf(),
            out,
        })
    }

    pub fn append(&mut self, rec: &CheckpointRecord) -> Result<()> {
        let line = serde_json::to_string(rec).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(self.out, "{line}")?;
        self.out.flush()?;
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}
