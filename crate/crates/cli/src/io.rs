//! Operator files: JSON documents holding one complex matrix.
//!
//! ```json
//! { "name": "T", "rows": 2, "cols": 2, "entries": [[1, 0], [0, 0], [0, 0], [2, -1]] }
//! ```
//!
//! `entries` lists `[re, im]` pairs in row-major order.

use std::fs;
use std::path::{Path, PathBuf};

use epmod::{ComplexMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::InputError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl OperatorFile {
    pub fn from_matrix(m: &ComplexMatrix, name: Option<&str>) -> Self {
        Self {
            name: name.map(str::to_owned),
            rows: m.rows(),
            cols: m.cols(),
            entries: m.to_row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, epmod::Error> {
        let entries = self.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        ComplexMatrix::from_row_major(self.rows, self.cols, entries)
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("operator files always serialize")
    }
}

pub fn load_operator(path: &Path) -> Result<ComplexMatrix, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError::Io {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    let file = OperatorFile::parse(&text).map_err(|e| InputError::Parse {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    file.to_matrix().map_err(|e| InputError::Parse {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

pub fn save_operator(path: &Path, m: &ComplexMatrix, name: Option<&str>) -> Result<(), InputError> {
    let mut text = OperatorFile::from_matrix(m, name).to_json();
    text.push('\n');
    fs::write(path, text).map_err(|e| InputError::Io {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

/// `dir/stem.json`, creating `dir` if needed.
pub fn dump_path(dir: &Path, stem: &str) -> Result<PathBuf, InputError> {
    fs::create_dir_all(dir).map_err(|e| InputError::Io {
        path: dir.to_owned(),
        message: e.to_string(),
    })?;
    Ok(dir.join(format!("{stem}.json")))
}
