//! CSV tables and `key = value` metadata files.
//!
//! Reals are written as `{:.16e}` (17 significant digits), which round-trips
//! every `f64` exactly.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}:{line}: {message}")]
    Meta { path: String, line: usize, message: String },
}

pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn real<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_real(*v))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: i64,
    #[serde(serialize_with = "real")]
    pub lambda: f64,
    #[serde(serialize_with = "real")]
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRow {
    pub n: i64,
    pub j: i64,
    #[serde(serialize_with = "real")]
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionRow {
    #[serde(serialize_with = "real")]
    pub x: f64,
    #[serde(serialize_with = "real")]
    pub mu: f64,
    #[serde(serialize_with = "real")]
    pub mu_prime: f64,
    #[serde(serialize_with = "real")]
    pub v_sq: f64,
    #[serde(serialize_with = "real")]
    pub v: f64,
    #[serde(serialize_with = "real")]
    pub p: f64,
    #[serde(serialize_with = "real")]
    pub r: f64,
}

/// One line of the asymptotics report. `n` is empty for summary rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymRow {
    pub quantity: String,
    pub form: String,
    pub n: Option<i64>,
    #[serde(serialize_with = "real")]
    pub value: f64,
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), IoError> {
    let csv_err = |source| IoError::Csv { path: path.display().to_string(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| IoError::Io { path: path.display().to_string(), source })
}

pub fn read_csv<R: DeserializeOwned>(path: &Path) -> Result<Vec<R>, IoError> {
    let csv_err = |source| IoError::Csv { path: path.display().to_string(), source };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().collect::<Result<Vec<R>, _>>().map_err(csv_err)
}

/// Ordered `key = value` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Meta {
    pub entries: Vec<(String, String)>,
}

impl Meta {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn push_real(&mut self, key: &str, value: f64) {
        self.push(key, fmt_real(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_real(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        let io_err = |source| IoError::Io { path: path.display().to_string(), source };
        let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
        for (k, v) in &self.entries {
            writeln!(w, "{k} = {v}").map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        let p = path.display().to_string();
        let file = File::open(path).map_err(|source| IoError::Io { path: p.clone(), source })?;
        let mut meta = Meta::default();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| IoError::Io { path: p.clone(), source })?;
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| IoError::Meta { path: p.clone(), line: i + 1, message: "expected `key = value`".into() })?;
            meta.entries.push((k.to_string(), v.to_string()));
        }
        Ok(meta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn reals_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(fmt_real(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn tables_and_meta_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            NodeRow { n: 2, j: 0, x: std::f64::consts::FRAC_PI_3 },
            NodeRow { n: 2, j: 1, x: 2.0000000000000004 },
        ];
        let path = dir.path().join("nodes.csv");
        write_csv(&path, &rows).unwrap();
        assert_eq!(read_csv::<NodeRow>(&path).unwrap(), rows);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("n,j,x\n2,0,1.0471975511965979e0\n"), "{text}");

        let asym = vec![
            AsymRow { quantity: "eigenvalue".into(), form: "printed".into(), n: Some(10), value: 1e-3 },
            AsymRow { quantity: "eigenvalue_slope".into(), form: "printed".into(), n: None, value: -1.5 },
        ];
        let path = dir.path().join("asym.csv");
        write_csv(&path, &asym).unwrap();
        assert_eq!(read_csv::<AsymRow>(&path).unwrap(), asym);

        let mut meta = Meta::default();
        meta.push_real("theta_hat", 1.047);
        meta.push("degenerate_theta", false);
        meta.push("n_list", "50,100");
        let path = dir.path().join("x.meta");
        meta.write(&path).unwrap();
        let back = Meta::read(&path).unwrap();
        assert_eq!(back, meta);
        assert_eq!(back.get_real("theta_hat"), Some(1.047));
    }
}
