//! Dataset manifest: one CSV row per IQ file.
//!
//! Header: `path,label,kind,speed_mm_s,distance_mm,workflow,set_id,seed`.
//! Relative paths resolve against the manifest's directory.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write manifest {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest {path}, line {line}: {detail}")]
    Parse { path: PathBuf, line: u64, detail: String },
    #[error("manifest {0} has no rows")]
    Empty(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    Movement,
    Workflow,
}

impl fmt::Display for SampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SampleKind::Movement => "movement",
            SampleKind::Workflow => "workflow",
        })
    }
}

impl FromStr for SampleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "movement" => Ok(SampleKind::Movement),
            "workflow" => Ok(SampleKind::Workflow),
            _ => Err(format!("unknown sample kind {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub path: String,
    pub label: String,
    pub kind: SampleKind,
    pub speed_mm_s: Option<f64>,
    pub distance_mm: Option<f64>,
    pub workflow: Option<String>,
    pub set_id: Option<u8>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
    /// Directory relative paths resolve against.
    pub base_dir: PathBuf,
}

impl Manifest {
    pub fn new(rows: Vec<ManifestRow>) -> Self {
        Manifest { rows, base_dir: PathBuf::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Manifest, ManifestError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| ManifestError::Read { path: path.to_path_buf(), source })?;
        let mut reader = csv::Reader::from_reader(bytes.as_slice());
        let mut rows = Vec::new();
        for rec in reader.deserialize() {
            let row: ManifestRow = rec.map_err(|e| ManifestError::Parse {
                path: path.to_path_buf(),
                line: e.position().map(|p| p.line()).unwrap_or(0),
                detail: e.to_string(),
            })?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(ManifestError::Empty(path.to_path_buf()));
        }
        Ok(Manifest {
            rows,
            base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        })
    }

    pub fn to_csv_bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).expect("in-memory CSV write");
        }
        w.into_inner().expect("in-memory CSV flush")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), ManifestError> {
        let path = path.as_ref();
        fs::write(path, self.to_csv_bytes()).map_err(|source| ManifestError::Write { path: path.to_path_buf(), source })
    }

    pub fn resolve(&self, row: &ManifestRow) -> PathBuf {
        let p = Path::new(&row.path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// SHA-256 over the canonical CSV serialization, lowercase hex.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_csv_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn filter(&self, keep: impl Fn(&ManifestRow) -> bool) -> Manifest {
        Manifest {
            rows: self.rows.iter().filter(|r| keep(r)).cloned().collect(),
            base_dir: self.base_dir.clone(),
        }
    }

    pub fn labels(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.label.as_str()).collect()
    }
}
