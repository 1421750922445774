//! File helpers for the JSON, NDJSON and text formats used by the CLI.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::annotation::ImageId;
use crate::error::{Error, Result};
use crate::geometry::JitterOffset;
use crate::matching::MatchPair;

/// One line of a jitter samples file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JitterRecord {
    pub image_id: ImageId,
    pub dx: f64,
    pub dy: f64,
    pub score: f64,
}

impl From<&MatchPair> for JitterRecord {
    fn from(p: &MatchPair) -> Self {
        Self { image_id: p.image_id, dx: p.offset.dx, dy: p.offset.dy, score: p.score }
    }
}

impl JitterRecord {
    pub fn offset(&self) -> JitterOffset {
        JitterOffset::new(self.dx, self.dy)
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Read { path: path.to_path_buf(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Write { path: path.to_path_buf(), source })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory values serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json_string(value))
}

pub fn read_jitter_records(path: &Path) -> Result<Vec<JitterRecord>> {
    read_text(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line)
                .map_err(|e| Error::Malformed { path: path.to_path_buf(), message: format!("line {}: {e}", i + 1) })
        })
        .collect()
}

pub fn jitter_records_text(records: &[JitterRecord]) -> String {
    records.iter().map(|r| serde_json::to_string(r).expect("plain record") + "\n").collect()
}
