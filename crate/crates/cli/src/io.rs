//! Matrix files: JSON objects tagged with a `kind`, real entries in row-major
//! order and, for channel files, `(re, im)` pairs.
//!
//! Numbers are written with 17 significant digits and read back with a
//! correctly rounding parser, so every emitted file loads bit-exactly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use tetra_bridge::{ComplexMat, RealMat};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    StochasticMatrix,
    ProbVec,
    Generator,
    ChannelReport,
}

impl Kind {
    pub fn tag(self) -> &'static str {
        match self {
            Kind::StochasticMatrix => "stochastic_matrix",
            Kind::ProbVec => "prob_vec",
            Kind::Generator => "generator",
            Kind::ChannelReport => "channel_report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub kind: Kind,
    pub dim: usize,
    pub entries: Vec<f64>,
    #[serde(default)]
    pub complex_entries: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub label: Option<String>,
}

impl MatrixFile {
    pub fn matrix(kind: Kind, m: &RealMat, label: Option<String>) -> Self {
        Self {
            kind,
            dim: m.rows(),
            entries: m.as_slice().to_vec(),
            complex_entries: None,
            label,
        }
    }

    pub fn prob_vec(p: [f64; 4]) -> Self {
        Self {
            kind: Kind::ProbVec,
            dim: 4,
            entries: p.to_vec(),
            complex_entries: None,
            label: None,
        }
    }

    pub fn channel(m: &ComplexMat, label: &str) -> Self {
        Self {
            kind: Kind::ChannelReport,
            dim: m.rows(),
            entries: m.as_slice().iter().map(|z| z.re).collect(),
            complex_entries: Some(m.as_slice().iter().map(|z| [z.re, z.im]).collect()),
            label: Some(label.to_string()),
        }
    }

    /// Kind-specific shape checks.
    pub fn check(&self) -> Result<(), String> {
        let square = self.dim * self.dim;
        match self.kind {
            Kind::ProbVec => {
                if self.dim != 4 || self.entries.len() != 4 {
                    return Err(format!(
                        "prob_vec needs dim 4 and 4 entries, got dim {} with {}",
                        self.dim,
                        self.entries.len()
                    ));
                }
            }
            Kind::Generator if self.dim != 4 => {
                return Err(format!("generator must be 4x4, got dim {}", self.dim))
            }
            Kind::StochasticMatrix | Kind::Generator if self.dim == 0 => {
                return Err("dim must be positive".into())
            }
            Kind::ChannelReport => {
                let c = self
                    .complex_entries
                    .as_ref()
                    .ok_or("channel_report needs complex_entries")?;
                if c.len() != square || self.entries.len() != square {
                    return Err(format!(
                        "channel_report of dim {} needs {square} entries",
                        self.dim
                    ));
                }
                if c.iter()
                    .zip(&self.entries)
                    .any(|(z, re)| z[0].to_bits() != re.to_bits())
                {
                    return Err("entries must hold the real parts of complex_entries".into());
                }
            }
            _ => {}
        }
        if self.kind != Kind::ProbVec && self.entries.len() != square {
            return Err(format!(
                "dim {} needs {square} entries, got {}",
                self.dim,
                self.entries.len()
            ));
        }
        if self.complex_entries.is_some() && self.kind != Kind::ChannelReport {
            return Err(format!("{} files carry real entries only", self.kind.tag()));
        }
        if !self.entries.iter().all(|x| x.is_finite()) {
            return Err("entries must be finite".into());
        }
        Ok(())
    }

    pub fn real(&self) -> RealMat {
        RealMat::new(self.dim, self.dim, self.entries.clone()).expect("shape checked on load")
    }

    pub fn complex(&self) -> ComplexMat {
        let data = match &self.complex_entries {
            Some(c) => c.iter().map(|z| Complex64::new(z[0], z[1])).collect(),
            None => self
                .entries
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
        };
        ComplexMat::new(self.dim, self.dim, data).expect("shape checked on load")
    }

    pub fn to_json(&self) -> String {
        let mut s = String::new();
        s.push_str("{\n");
        let _ = writeln!(s, "  \"kind\": \"{}\",", self.kind.tag());
        let _ = writeln!(s, "  \"dim\": {},", self.dim);
        s.push_str("  \"entries\": [");
        write_numbers(&mut s, &self.entries);
        s.push(']');
        if let Some(c) = &self.complex_entries {
            s.push_str(",\n  \"complex_entries\": [");
            for (k, z) in c.iter().enumerate() {
                if k > 0 {
                    s.push_str(", ");
                }
                let _ = write!(s, "[{}, {}]", num17(z[0]), num17(z[1]));
            }
            s.push(']');
        }
        if let Some(label) = &self.label {
            let _ = write!(
                s,
                ",\n  \"label\": {}",
                serde_json::to_string(label).expect("string serializes")
            );
        }
        s.push_str("\n}\n");
        s
    }
}

fn write_numbers(s: &mut String, xs: &[f64]) {
    for (k, x) in xs.iter().enumerate() {
        if k > 0 {
            s.push_str(", ");
        }
        s.push_str(&num17(*x));
    }
}

/// 17 significant digits in JSON-compatible exponent form.
pub fn num17(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Loaded {
    pub file: MatrixFile,
    pub path: PathBuf,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn parse(text: &str) -> Result<MatrixFile, String> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    file.check()?;
    Ok(file)
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let file = parse(text).map_err(|message| CliError::Parse {
        path: path.to_path_buf(),
        message,
    })?;
    Ok(Loaded {
        file,
        path: path.to_path_buf(),
        sha256: sha256_hex(&bytes),
    })
}

/// Loads and insists on one of the given kinds.
pub fn load_kind(path: &Path, kinds: &[Kind]) -> Result<Loaded, CliError> {
    let loaded = load(path)?;
    if !kinds.contains(&loaded.file.kind) {
        let want: Vec<_> = kinds.iter().map(|k| k.tag()).collect();
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            message: format!(
                "expected kind {}, found {}",
                want.join(" or "),
                loaded.file.kind.tag()
            ),
        });
    }
    Ok(loaded)
}

pub fn write(path: &Path, contents: &str) -> Result<String, CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| CliError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(sha256_hex(contents.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let awkward = [
            0.1,
            1.0 / 3.0,
            -2.0f64.sqrt(),
            5e-324,
            f64::MAX,
            -0.0,
            1e-300,
            0.625,
        ];
        let m = RealMat::from_fn(3, 3, |i, j| awkward[(i * 3 + j) % awkward.len()]);
        let file = MatrixFile::matrix(
            Kind::StochasticMatrix,
            &m,
            Some("a \"quoted\" label".into()),
        );
        let back = parse(&file.to_json()).unwrap();
        assert_eq!(back.entries.len(), 9);
        for (a, b) in back.entries.iter().zip(&file.entries) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.label, file.label);
    }

    #[test]
    fn channel_round_trip() {
        let m = ComplexMat::from_fn(4, 4, |i, j| {
            Complex64::new(i as f64 / 7.0, -(j as f64) / 3.0)
        });
        let file = MatrixFile::channel(&m, "superop");
        let back = parse(&file.to_json()).unwrap();
        assert_eq!(back.complex(), m);
    }

    #[test]
    fn shape_checks() {
        assert!(parse(r#"{"kind":"prob_vec","dim":4,"entries":[1,0,0]}"#).is_err());
        assert!(parse(r#"{"kind":"generator","dim":3,"entries":[0,0,0,0,0,0,0,0,0]}"#).is_err());
        assert!(parse(r#"{"kind":"stochastic_matrix","dim":2,"entries":[1,0,0]}"#).is_err());
        assert!(parse(r#"{"kind":"channel_report","dim":1,"entries":[1]}"#).is_err());
        assert!(parse(r#"{"kind":"matrix","dim":1,"entries":[1]}"#).is_err());
        assert!(parse(r#"{"kind":"stochastic_matrix","dim":1,"entries":[1],"extra":0}"#).is_err());
        assert!(parse(r#"{"kind":"stochastic_matrix","dim":1,"entries":[1]}"#).is_ok());
    }

    #[test]
    fn number_format() {
        assert_eq!(num17(0.625), "6.2500000000000000e-1");
        assert_eq!(num17(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
