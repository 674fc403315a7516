//! Truncated theta series on the tube domain and on the degree-16 Siegel
//! half-space, the symplectic action, and the equivariance residual.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use nalgebra::{SMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{
    generator_image, generator_orthogonal, j_point, orth_action, to_f64_32, CMatrix16, Calibration, EmbeddingError,
    GeneratorSpec, OrthPoint,
};
use crate::linalg::RatMatrix;
use crate::octonion::{enumerate_up_to_norm, gram_s, ComplexOctave, IntegralOctave};

type RMatrix16 = SMatrix<f64, 16, 16>;
pub type RMatrix32 = SMatrix<f64, 32, 32>;

#[derive(Debug, Error, PartialEq)]
pub enum ThetaError {
    #[error("point is not in the tube domain")]
    OutsideTubeDomain,
    #[error("matrix is not symmetric (deviation {0:e})")]
    NotSymmetric(f64),
    #[error("imaginary part is not positive definite")]
    NotPositiveDefinite,
    #[error("CZ + D is too ill-conditioned (estimate {0:e})")]
    IllConditioned(f64),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

const SYMMETRY_TOL: f64 = 1e-12;
const CONDITION_LIMIT: f64 = 1e12;

/// `Im z1 > 0` and `Im z1 Im z2 - N(Im zf) > 0`.
pub fn in_h10(z: &OrthPoint) -> bool {
    z.in_tube_domain()
}

/// A point of the degree-16 Siegel half-space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiegelPoint {
    z: CMatrix16,
}

impl SiegelPoint {
    pub fn new(z: CMatrix16) -> Result<Self, ThetaError> {
        let dev = (z - z.transpose()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if dev > SYMMETRY_TOL * z.iter().map(|v| v.norm()).fold(1.0, f64::max) {
            return Err(ThetaError::NotSymmetric(dev));
        }
        if z.map(|v| v.im).cholesky().is_none() {
            return Err(ThetaError::NotPositiveDefinite);
        }
        Ok(SiegelPoint { z })
    }

    pub fn from_orth(z: &OrthPoint) -> Result<Self, ThetaError> {
        if !in_h10(z) {
            return Err(ThetaError::OutsideTubeDomain);
        }
        Self::new(j_point(z)?)
    }

    pub fn matrix(&self) -> &CMatrix16 {
        &self.z
    }

    pub fn imag(&self) -> RMatrix16 {
        self.z.map(|v| v.im)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationBound {
    pub max_norm1: u64,
    pub max_norm2: u64,
}

impl TruncationBound {
    pub fn uniform(n: u64) -> Self {
        TruncationBound { max_norm1: n, max_norm2: n }
    }
}

impl Default for TruncationBound {
    fn default() -> Self {
        Self::uniform(6)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaValue {
    pub re: f64,
    pub im: f64,
    /// Upper bound for the absolute value of the omitted terms.
    pub tail_bound: f64,
    pub terms: usize,
}

impl ThetaValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Integral octaves with `N(h) <= n` in the class `bits` mod 2.
fn class_members(n: u64, bits: u8) -> Vec<IntegralOctave> {
    static CACHE: OnceLock<Mutex<HashMap<u64, std::sync::Arc<Vec<IntegralOctave>>>>> = OnceLock::new();
    let all = {
        let mut cache = CACHE.get_or_init(Default::default).lock().unwrap();
        cache.entry(n).or_insert_with(|| std::sync::Arc::new(enumerate_up_to_norm(n))).clone()
    };
    all.iter().filter(|h| h.parity_bits() == bits).copied().collect()
}

/// Coefficients of the E8 theta series: 1, 240 sigma_3(n).
fn e8_coefficient(n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let s3: u64 = (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| d * d * d).sum();
    240.0 * s3 as f64
}

/// `sigma_3(n) <= zeta(3) n^3`, so `c(n) <= 289 n^3`.
const E8_COEFFICIENT_BOUND: f64 = 289.0;

/// Head `sum over n <= b of c(n) q^n` and an upper bound for the rest.
fn e8_split(b: u64, q: f64) -> (f64, f64) {
    if q >= 1.0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let head: f64 = (0..=b).map(|n| e8_coefficient(n) * q.powi(n as i32)).sum();
    let mut tail = 0.0;
    let mut n = (b + 1) as f64;
    let mut t = E8_COEFFICIENT_BOUND * n.powi(3) * q.powf(n);
    loop {
        tail += t;
        let ratio = q * ((n + 1.0) / n).powi(3);
        n += 1.0;
        t = E8_COEFFICIENT_BOUND * n.powi(3) * q.powf(n);
        if ratio < 0.5 && t < 1e-17 * tail {
            // later terms shrink at least geometrically with ratio 1/2
            tail += 2.0 * t;
            break;
        }
        if n > 1e7 {
            return (head, f64::INFINITY);
        }
    }
    (head, tail)
}

/// Smallest `mu` with `Y >= mu diag(S, S)`.
fn relative_min_eigenvalue(y: &RMatrix16) -> Option<f64> {
    let s = gram_s();
    let sb = RMatrix16::from_fn(|r, c| if r / 8 == c / 8 { s[r % 8][c % 8] as f64 } else { 0.0 });
    let l = sb.cholesky()?.l();
    let li = l.try_inverse()?;
    let m = li * y * li.transpose();
    let m = (m + m.transpose()) * 0.5;
    let mu = SymmetricEigen::new(m).eigenvalues.min();
    (mu > 0.0).then_some(mu)
}

/// Bound on the omitted terms: each term is at most `exp(-pi mu (N1 + N2))`.
fn tail_estimate(y: &RMatrix16, bound: &TruncationBound) -> f64 {
    let Some(mu) = relative_min_eigenvalue(y) else {
        return f64::INFINITY;
    };
    let q = (-std::f64::consts::PI * mu).exp();
    let (h1, t1) = e8_split(bound.max_norm1, q);
    let (h2, t2) = e8_split(bound.max_norm2, q);
    h1 * t2 + t1 * h2 + t1 * t2
}

fn split_characteristic(a: u16) -> (u8, u8) {
    (a as u8, (a >> 8) as u8)
}

/// Sums `f(i)` per outer index in parallel, then adds in index order.
fn ordered_sum(n: usize, f: impl Fn(usize) -> Complex64 + Sync + Send) -> Complex64 {
    let parts: Vec<Complex64> = (0..n).into_par_iter().map(f).collect();
    parts.into_iter().sum()
}

/// `sum over g = a mod 2 within the bound of exp(pi i Z[g] / 2)`.
pub fn theta_siegel(a: u16, z: &SiegelPoint, bound: &TruncationBound) -> ThetaValue {
    let (a1, a2) = split_characteristic(a);
    let hs1 = class_members(bound.max_norm1, a1);
    let hs2 = class_members(bound.max_norm2, a2);
    let m = &z.z;
    let quad = |h: &IntegralOctave, off: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..8 {
            for j in 0..8 {
                acc += m[(off + i, off + j)] * (h.f[i] * h.f[j]) as f64;
            }
        }
        acc
    };
    let q2: Vec<Complex64> = hs2.iter().map(|h| quad(h, 8)).collect();
    let half_pi_i = Complex64::new(0.0, std::f64::consts::FRAC_PI_2);
    let value = ordered_sum(hs1.len(), |i| {
        let h1 = &hs1[i];
        let q1 = quad(h1, 0);
        // Z12' h1
        let v: [Complex64; 8] = std::array::from_fn(|j| (0..8).map(|k| m[(k, 8 + j)] * h1.f[k] as f64).sum());
        hs2.iter()
            .zip(&q2)
            .map(|(h2, q2)| {
                let cross: Complex64 = (0..8).map(|j| v[j] * h2.f[j] as f64).sum();
                (half_pi_i * (q1 + cross * 2.0 + q2)).exp()
            })
            .sum()
    });
    ThetaValue { re: value.re, im: value.im, tail_bound: tail_estimate(&z.imag(), bound), terms: hs1.len() * hs2.len() }
}

fn e_coords(h: &IntegralOctave) -> [f64; 8] {
    h.to_e_doubled().map(|v| v as f64 / 2.0)
}

/// `sum over h = a mod 2 within the bound of
/// exp(pi i (N(h1) z1 + N(h2) z2 + tr(conj(h1) zf h2)))`.
pub fn theta_restricted(a: u16, z: &OrthPoint, bound: &TruncationBound) -> Result<ThetaValue, ThetaError> {
    if !in_h10(z) {
        return Err(ThetaError::OutsideTubeDomain);
    }
    let (a1, a2) = split_characteristic(a);
    let hs1 = class_members(bound.max_norm1, a1);
    let hs2 = class_members(bound.max_norm2, a2);
    let e2: Vec<[f64; 8]> = hs2.iter().map(e_coords).collect();
    let pi_i = Complex64::new(0.0, std::f64::consts::PI);
    let value = ordered_sum(hs1.len(), |i| {
        let h1 = &hs1[i];
        let x = h1.to_complex().conj() * z.zf;
        // tr(x y) = 2 (x0 y0 - sum_k xk yk)
        let w: [Complex64; 8] = std::array::from_fn(|k| if k == 0 { x.e[0] * 2.0 } else { -x.e[k] * 2.0 });
        let base = z.z1 * h1.norm() as f64;
        hs2.iter()
            .zip(&e2)
            .map(|(h2, e)| {
                let tr: Complex64 = (0..8).map(|k| w[k] * e[k]).sum();
                (pi_i * (base + z.z2 * h2.norm() as f64 + tr)).exp()
            })
            .sum()
    });
    let y = j_point(z)?.map(|v| v.im);
    Ok(ThetaValue { re: value.re, im: value.im, tail_bound: tail_estimate(&y, bound), terms: hs1.len() * hs2.len() })
}

/// `(A Z + B)(C Z + D)^-1`, symmetrized.
pub fn siegel_action(m: &RMatrix32, z: &SiegelPoint) -> Result<SiegelPoint, ThetaError> {
    let blk = |r: usize, c: usize| CMatrix16::from_fn(|i, j| Complex64::new(m[(r + i, c + j)], 0.0));
    let (a, b, c, d) = (blk(0, 0), blk(0, 16), blk(16, 0), blk(16, 16));
    let num = a * z.z + b;
    let den = c * z.z + d;
    let inv = den.try_inverse().ok_or(ThetaError::IllConditioned(f64::INFINITY))?;
    let cond = den.norm() * inv.norm();
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(ThetaError::IllConditioned(cond));
    }
    let w = num * inv;
    SiegelPoint::new((w + w.transpose()) * Complex64::new(0.5, 0.0))
}

/// Float and orthogonal images of a generator, computed once.
#[derive(Clone, Debug)]
pub struct GeneratorData {
    pub spec: GeneratorSpec,
    pub symplectic: RMatrix32,
    pub orthogonal: RatMatrix,
}

impl GeneratorData {
    pub fn new(spec: GeneratorSpec) -> Result<Self, EmbeddingError> {
        Ok(GeneratorData {
            spec,
            symplectic: to_f64_32(&generator_image(&spec)?),
            orthogonal: generator_orthogonal(&spec)?,
        })
    }
}

/// Max-entry distance between `J(g) . j(chi z)` and `j(chi (g . z))`.
pub fn equivariance_residual_with(
    g: &GeneratorData,
    z: &OrthPoint,
    calibration: Calibration,
) -> Result<f64, ThetaError> {
    let lhs = siegel_action(&g.symplectic, &SiegelPoint::from_orth(&calibration.apply(z))?)?;
    let (w, _) = orth_action(&g.orthogonal, z)?;
    let rhs = j_point(&calibration.apply(&w))?;
    Ok((lhs.z - rhs).iter().map(|v| v.norm()).fold(0.0, f64::max))
}

pub fn equivariance_residual(g: &GeneratorSpec, z: &OrthPoint, calibration: Calibration) -> Result<f64, ThetaError> {
    equivariance_residual_with(&GeneratorData::new(*g)?, z, calibration)
}

/// Random point with `Im z1, Im z2` in `[0.5, 2]`, real parts in
/// `[-0.5, 0.5]`, and `Im z1 Im z2 - N(Im zf) >= 0.25`.
pub fn sample_point<R: Rng + ?Sized>(rng: &mut R) -> OrthPoint {
    sample_point_with_heights(rng, 0.5, 2.0)
}

pub fn sample_point_with_heights<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> OrthPoint {
    let y1 = rng.gen_range(lo..=hi);
    let y2 = rng.gen_range(lo..=hi);
    let z1 = Complex64::new(rng.gen_range(-0.5..=0.5), y1);
    let z2 = Complex64::new(rng.gen_range(-0.5..=0.5), y2);
    let mut dir: [f64; 8] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
    let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
    let room = (y1 * y2 - 0.25).max(0.0);
    let r = (rng.gen_range(0.0..=1.0) * room).sqrt();
    dir.iter_mut().for_each(|v| *v *= r / len);
    let re: [f64; 8] = std::array::from_fn(|_| rng.gen_range(-0.5..=0.5));
    OrthPoint::new(z1, z2, ComplexOctave::from_parts(re, dir))
}
