//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use octavic::embedding::Calibration;
use octavic::exactla::{PrimeField, DEFAULT_PRIMES};
use octavic::theta::TruncationBound;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Restricted versus Siegel-side theta sums.
    pub cross_sum: f64,
    /// Matrix identities such as the equivariance residual.
    pub matrix: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { cross_sum: 1e-8, matrix: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub matrix: PathBuf,
    pub report: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Paths { matrix: PathBuf::from("cusp_matrix.octt"), report: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub primes: Vec<u64>,
    pub truncation: TruncationBound,
    pub tolerances: Tolerances,
    /// Chart calibration; discovered by the embedding suite when absent.
    pub calibration: Option<Calibration>,
    pub seed: u64,
    pub paths: Paths,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            primes: DEFAULT_PRIMES.to_vec(),
            truncation: TruncationBound::default(),
            tolerances: Tolerances::default(),
            calibration: None,
            seed: 20_790_715,
            paths: Paths::default(),
        }
    }
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.primes.is_empty() {
            return Err(ConfigError::Invalid("at least one prime is required".into()));
        }
        for &p in &self.primes {
            PrimeField::new(p).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        let t = &self.tolerances;
        if !(t.cross_sum.is_finite() && t.cross_sum > 0.0 && t.matrix.is_finite() && t.matrix > 0.0) {
            return Err(ConfigError::Invalid("tolerances must be positive and finite".into()));
        }
        if self.truncation.max_norm1 == 0 || self.truncation.max_norm2 == 0 {
            return Err(ConfigError::Invalid("truncation bounds must be positive".into()));
        }
        if self.truncation.max_norm1 > 40 || self.truncation.max_norm2 > 40 {
            return Err(ConfigError::Invalid("truncation bounds above 40 are not supported".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_round_trip() {
        let cfg = Config::default();
        cfg.validate().unwrap();
        let back = Config::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(cfg.hash(), back.hash());
        assert_eq!(Config::from_toml_str("").unwrap(), cfg);
    }

    #[test]
    fn partial_files() {
        let cfg = Config::from_toml_str(
            "primes = [13]\ncalibration = \"identity\"\n[tolerances]\ncross_sum = 1e-6\nmatrix = 1e-7\n[truncation]\nmax_norm1 = 3\nmax_norm2 = 4\n",
        )
        .unwrap();
        assert_eq!(cfg.primes, vec![13]);
        assert_eq!(cfg.calibration, Some(Calibration::Identity));
        assert_eq!(cfg.truncation, TruncationBound { max_norm1: 3, max_norm2: 4 });
        assert_ne!(cfg.hash(), Config::default().hash());
    }

    #[test]
    fn rejects_bad_values() {
        for bad in [
            "primes = [7]",
            "primes = [15]",
            "primes = []",
            "seed = -1",
            "unknown = 1",
            "calibration = \"sideways\"",
            "[tolerances]\ncross_sum = 0.0\nmatrix = 1e-9",
            "[truncation]\nmax_norm1 = 0\nmax_norm2 = 6",
        ] {
            assert!(Config::from_toml_str(bad).is_err(), "{bad}");
        }
    }
}
