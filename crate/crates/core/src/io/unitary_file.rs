use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Unitary};

/// `{"m": m, "re": [[..]], "im": [[..]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryFile {
    pub m: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl UnitaryFile {
    pub fn from_unitary(u: &Unitary) -> Self {
        let m = u.dim();
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m).map(|i| u.matrix().row(i).iter().map(f).collect()).collect()
        };
        Self {
            m,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    /// Check shape and unitarity.
    pub fn to_unitary(&self) -> Result<Unitary> {
        let m = self.m;
        for (name, rows) in [("re", &self.re), ("im", &self.im)] {
            if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                return Err(Error::Shape(format!("\"{name}\" must be {m}x{m}")));
            }
        }
        let data = self
            .re
            .iter()
            .flatten()
            .zip(self.im.iter().flatten())
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        Unitary::new(ComplexMatrix::new(m, m, data)?)
    }
}

/// SHA-256 of the unitary's compact JSON form, as lowercase hex.
pub fn unitary_hash(u: &Unitary) -> String {
    let bytes = serde_json::to_vec(&UnitaryFile::from_unitary(u)).expect("finite entries serialise");
    hex::encode(Sha256::digest(&bytes))
}

pub fn read_unitary(path: &Path) -> Result<Unitary> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str::<UnitaryFile>(&text)?.to_unitary()
}

pub fn write_unitary(u: &Unitary, path: &Path) -> Result<()> {
    let json = serde_json::to_string(&UnitaryFile::from_unitary(u))?;
    std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}
