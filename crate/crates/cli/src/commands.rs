//! Subcommand implementations. Each returns the JSON document to print.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use octavic::cusps::{
    build_cusp_matrix, cusp_class_discrepancy, decode_octt, encode_octt, enumerate_isotropic, CuspMatrix,
};
use octavic::embedding::OrthPoint;
use octavic::exactla::{certify_rank, PrimeField, RankCertificate, RankOptions};
use octavic::octonion::ComplexOctave;
use octavic::theta::{in_h10, theta_restricted, theta_siegel, SiegelPoint, ThetaValue, TruncationBound};
use serde::Serialize;

use crate::config::{sha256_bytes, Config};
use crate::error::CliError;
use crate::report::VerifyReport;
use crate::suites::{verify, Suite};

/// Runs the suites; the report is returned even when a check fails.
pub fn cmd_verify(cfg: &Config, suite: Suite) -> VerifyReport {
    verify(suite, cfg)
}

/// Error carrying the first failing check and its counterexample.
pub fn verification_error(report: &VerifyReport) -> Option<CliError> {
    report.first_failure().map(|(suite, check)| {
        let ce = check.counterexample.as_ref().map(|v| format!("; counterexample {v}")).unwrap_or_default();
        CliError::Verification(format!("{suite}: {} failed: {}{ce}", check.name, check.detail))
    })
}

#[derive(Debug, Serialize)]
pub struct CuspMatrixSummary {
    pub path: Option<PathBuf>,
    pub rows: usize,
    pub cols: usize,
    pub isotropic_classes: usize,
    pub uncovered_classes: usize,
    pub bytes: usize,
    pub sha256: String,
    pub config_hash: String,
}

fn summarize(m: &CuspMatrix, bytes: &[u8], path: Option<PathBuf>, cfg: &Config) -> CuspMatrixSummary {
    CuspMatrixSummary {
        path,
        rows: m.rows,
        cols: m.cols,
        isotropic_classes: enumerate_isotropic().len(),
        uncovered_classes: cusp_class_discrepancy(),
        bytes: bytes.len(),
        sha256: sha256_bytes(bytes),
        config_hash: cfg.hash(),
    }
}

fn encode(m: &CuspMatrix) -> Result<Vec<u8>, CliError> {
    encode_octt(m).map_err(|e| CliError::Math(e.to_string()))
}

/// Builds the matrix and writes it to `out`, or only hashes it when `out` is `None`.
pub fn cmd_cusp_matrix(cfg: &Config, out: Option<&Path>) -> Result<CuspMatrixSummary, CliError> {
    let m = build_cusp_matrix();
    let bytes = encode(&m)?;
    if let Some(path) = out {
        std::fs::write(path, &bytes).map_err(|e| CliError::io(path, e))?;
    }
    Ok(summarize(&m, &bytes, out.map(Path::to_path_buf), cfg))
}

#[derive(Debug, Serialize)]
pub struct RankReport {
    pub matrix_source: String,
    pub matrix_sha256: String,
    pub config_hash: String,
    pub certificate: RankCertificate,
}

pub fn validate_primes(primes: &[u64]) -> Result<(), CliError> {
    if primes.is_empty() {
        return Err(CliError::Usage("at least one prime is required".into()));
    }
    for &p in primes {
        PrimeField::new(p)?;
    }
    Ok(())
}

/// Reads the matrix from `matrix`, or builds it in memory when absent.
pub fn cmd_rank(cfg: &Config, matrix: Option<&Path>, primes: &[u64]) -> Result<RankReport, CliError> {
    validate_primes(primes)?;
    let (m, bytes, source) = match matrix {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
            let m = decode_octt(&bytes).map_err(|source| CliError::Octt { path: path.to_path_buf(), source })?;
            (m, bytes, path.display().to_string())
        }
        None => {
            let m = build_cusp_matrix();
            let bytes = encode(&m)?;
            (m, bytes, "built in memory".to_string())
        }
    };
    let certificate = certify_rank(&m, primes, RankOptions::default())?;
    Ok(RankReport { matrix_source: source, matrix_sha256: sha256_bytes(&bytes), config_hash: cfg.hash(), certificate })
}

#[derive(Debug, Serialize)]
pub struct ThetaReport {
    pub characteristic: String,
    pub z1: String,
    pub z2: String,
    pub zf: String,
    pub bound: TruncationBound,
    pub restricted: ThetaValue,
    pub siegel: ThetaValue,
    pub difference: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
    pub config_hash: String,
}

pub fn cmd_eval_theta(
    cfg: &Config,
    characteristic: u16,
    z1: Complex64,
    z2: Complex64,
    zf: ComplexOctave,
    bound: Option<u64>,
) -> Result<ThetaReport, CliError> {
    let bound = match bound {
        Some(0) => return Err(CliError::Usage("--bound must be positive".into())),
        Some(n) => TruncationBound::uniform(n),
        None => cfg.truncation,
    };
    let z = OrthPoint::new(z1, z2, zf);
    if !in_h10(&z) {
        return Err(CliError::Math("point is outside the tube domain".into()));
    }
    let restricted = theta_restricted(characteristic, &z, &bound).map_err(|e| CliError::Math(e.to_string()))?;
    let siegel_point = SiegelPoint::from_orth(&z).map_err(|e| CliError::Math(e.to_string()))?;
    let siegel = theta_siegel(characteristic, &siegel_point, &bound);
    let difference = (restricted.value() - siegel.value()).norm();
    Ok(ThetaReport {
        characteristic: format!("{characteristic:04x}"),
        z1: z1.to_string(),
        z2: z2.to_string(),
        zf: zf.e.iter().map(Complex64::to_string).collect::<Vec<_>>().join(","),
        bound,
        restricted,
        siegel,
        difference,
        tolerance: cfg.tolerances.cross_sum,
        within_tolerance: difference < cfg.tolerances.cross_sum,
        config_hash: cfg.hash(),
    })
}

#[derive(Debug, Serialize)]
pub struct FullReport {
    pub config_hash: String,
    pub verification: VerifyReport,
    pub cusp_matrix: CuspMatrixSummary,
    pub rank: RankReport,
    pub dimension: Option<usize>,
    pub invariant_form_in_span: bool,
    pub passed: bool,
}

/// Every suite, the matrix summary and the rank certificate in one document.
pub fn cmd_report(cfg: &Config) -> Result<FullReport, CliError> {
    let verification = verify(Suite::All, cfg);
    let m = build_cusp_matrix();
    let bytes = encode(&m)?;
    let cusp_matrix = summarize(&m, &bytes, None, cfg);
    validate_primes(&cfg.primes)?;
    let certificate = certify_rank(&m, &cfg.primes, RankOptions::default())?;
    let dimension = certificate.rank;
    let in_span = certificate.denominator_in_span();
    let rank = RankReport {
        matrix_source: "built in memory".into(),
        matrix_sha256: cusp_matrix.sha256.clone(),
        config_hash: cfg.hash(),
        certificate,
    };
    let passed = verification.passed && dimension == Some(715) && in_span;
    Ok(FullReport {
        config_hash: cfg.hash(),
        verification,
        cusp_matrix,
        rank,
        dimension,
        invariant_form_in_span: in_span,
        passed,
    })
}
