//! Exact values of finite theta sums at rational points.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive, Zero};
use thiserror::Error;

use super::HermitianR;
use crate::octonion::{IntegralOctave, Rational};

/// Gaussian integer `re + im i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussInt { re: re.into(), im: im.into() }
    }

    pub fn zero() -> Self {
        GaussInt::default()
    }

    pub fn one() -> Self {
        GaussInt::new(1, 0)
    }

    /// `i^k`.
    pub fn i_pow(k: u32) -> Self {
        match k % 4 {
            0 => GaussInt::new(1, 0),
            1 => GaussInt::new(0, 1),
            2 => GaussInt::new(-1, 0),
            _ => GaussInt::new(0, -1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussInt { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `self / d` when the quotient is a Gaussian integer.
    pub fn div_exact(&self, d: &GaussInt) -> Option<GaussInt> {
        let n = d.norm();
        if n.is_zero() {
            return None;
        }
        let p = self * &d.conj();
        let (qr, rr) = p.re.div_rem(&n);
        let (qi, ri) = p.im.div_rem(&n);
        (rr.is_zero() && ri.is_zero()).then_some(GaussInt { re: qr, im: qi })
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
}

impl Add for &GaussInt {
    type Output = GaussInt;
    fn add(self, rhs: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &GaussInt {
    type Output = GaussInt;
    fn sub(self, rhs: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &GaussInt {
    type Output = GaussInt;
    fn mul(self, rhs: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re * &rhs.re - &self.im * &rhs.im, im: &self.re * &rhs.im + &self.im * &rhs.re }
    }
}

impl Neg for &GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt { re: -&self.re, im: -&self.im }
    }
}

/// Coefficients (low degree first) of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    assert!(n >= 1);
    // x^n - 1 divided by every proper divisor's polynomial
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        num = div_monic(&num, &cyclotomic_polynomial(d));
    }
    num
}

fn div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut q = vec![BigInt::zero(); num.len() - dd];
    for k in (dd..num.len()).rev() {
        let c = rem[k].clone();
        if c.is_zero() {
            continue;
        }
        q[k - dd] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            rem[k - dd + j] -= &c * dj;
        }
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    q
}

/// An element of `Z[zeta_order]` in the power basis `1, zeta, .., zeta^(phi-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclotomic {
    pub order: u64,
    pub coeffs: Vec<BigInt>,
}

impl Cyclotomic {
    /// Reduces `sum counts[k] zeta^k` (with `counts.len() == order`).
    pub fn from_power_counts(order: u64, counts: &[BigInt]) -> Self {
        assert_eq!(counts.len() as u64, order);
        let phi = cyclotomic_polynomial(order);
        let deg = phi.len() - 1;
        let mut c = counts.to_vec();
        for k in (deg..c.len()).rev() {
            let top = c[k].clone();
            if top.is_zero() {
                continue;
            }
            for (j, pj) in phi.iter().enumerate() {
                c[k - deg + j] -= &top * pj;
            }
        }
        c.truncate(deg);
        Cyclotomic { order, coeffs: c }
    }

    /// `coeff * zeta^exponent`.
    pub fn monomial(order: u64, exponent: u64, coeff: impl Into<BigInt>) -> Self {
        let mut counts = vec![BigInt::zero(); order as usize];
        counts[(exponent % order) as usize] = coeff.into();
        Self::from_power_counts(order, &counts)
    }

    /// Embeds a Gaussian integer; requires `4 | order`.
    pub fn from_gauss(order: u64, g: &GaussInt) -> Self {
        assert_eq!(order % 4, 0);
        let mut counts = vec![BigInt::zero(); order as usize];
        counts[0] += &g.re;
        counts[(order / 4) as usize] += &g.im;
        Self::from_power_counts(order, &counts)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn to_complex(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), 2.0 * PI * k as f64 / self.order as f64)
            })
            .sum()
    }
}

/// `R / den` with integral numerator data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalHermitian {
    pub den: i64,
    pub r1: i64,
    pub r2: i64,
    pub r: IntegralOctave,
}

impl RationalHermitian {
    pub fn integral(r1: i64, r2: i64, r: IntegralOctave) -> Self {
        RationalHermitian { den: 1, r1, r2, r }
    }

    pub fn scaled(&self, k: i64) -> Self {
        RationalHermitian { r1: self.r1 * k, r2: self.r2 * k, r: self.r.scale(k), ..*self }
    }

    /// `den * R[g]`.
    pub fn bracket_numerator(&self, h1: &IntegralOctave, h2: &IntegralOctave) -> i64 {
        self.r1 * h1.norm() + self.r2 * h2.norm() + h1.pairing(&(self.r * *h2))
    }
}

impl From<&HermitianR> for RationalHermitian {
    fn from(r: &HermitianR) -> Self {
        RationalHermitian::integral(r.r1, r.r2, r.r)
    }
}

/// Summation domain `g = base + step * sum_k t_k e_{free[k]}`, `0 <= t_k < count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub base: [i64; 16],
    pub step: i64,
    pub free: Vec<usize>,
    pub count: i64,
}

impl Section {
    /// All residues mod `n`.
    pub fn full(n: i64) -> Self {
        Section { base: [0; 16], step: 1, free: (0..16).collect(), count: n }
    }

    pub fn terms(&self) -> Option<u64> {
        (self.count as u64).checked_pow(self.free.len() as u32)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CuspValueError {
    #[error("{terms:?} terms exceed the budget of {budget}")]
    BudgetExceeded { terms: Option<u64>, budget: u64 },
    #[error("invalid parameters: {0}")]
    InvalidInput(&'static str),
}

/// Exact sum with its rational prefactor `s^-8 N^-16`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspValue {
    pub sum: Cyclotomic,
    pub normalization: Rational,
    pub terms: u64,
}

impl CuspValue {
    pub fn to_complex(&self) -> Complex64 {
        self.sum.to_complex() * self.normalization.to_f64().unwrap_or(f64::NAN)
    }

    /// Ratio of normalized values, e.g. against the Gauss sum of `2R`.
    pub fn ratio(&self, other: &CuspValue) -> Option<Complex64> {
        let d = other.to_complex();
        (d.norm() > 0.0).then(|| self.to_complex() / d)
    }
}

/// `s^-8 N^-16 sum_g phi(g) exp(pi i s R[g])` over `section`, exactly.
///
/// `phi` receives `g` as the f-coordinates of `(h1, h2)`. Periodicity of the
/// summand mod `N` is the caller's responsibility.
pub fn cusp_value_general(
    phi: &dyn Fn(&[i64; 16]) -> i64,
    s: &Rational,
    r: &RationalHermitian,
    n: u64,
    section: &Section,
    budget: u64,
) -> Result<CuspValue, CuspValueError> {
    if s.is_zero() {
        return Err(CuspValueError::InvalidInput("s must be nonzero"));
    }
    if r.den <= 0 || n == 0 || section.count <= 0 || section.free.iter().any(|&k| k >= 16) {
        return Err(CuspValueError::InvalidInput("denominator, modulus and count must be positive"));
    }
    let terms = section.terms();
    match terms {
        Some(t) if t <= budget => {}
        _ => return Err(CuspValueError::BudgetExceeded { terms, budget }),
    }
    let p = s.numer().to_i64().ok_or(CuspValueError::InvalidInput("s too large"))?;
    let q = s.denom().to_i64().ok_or(CuspValueError::InvalidInput("s too large"))?;
    // exp(pi i p B / (q den)) = zeta_m^(p B) with m = 2 q den
    let order = 2 * q * r.den;
    let mut counts = vec![BigInt::zero(); order as usize];
    let mut t = vec![0i64; section.free.len()];
    let mut g = section.base;
    loop {
        let w = phi(&g);
        if w != 0 {
            let h1 = IntegralOctave::new(std::array::from_fn(|k| g[k]));
            let h2 = IntegralOctave::new(std::array::from_fn(|k| g[8 + k]));
            let b = r.bracket_numerator(&h1, &h2);
            let k = ((p as i128 * b as i128).rem_euclid(order as i128)) as usize;
            counts[k] += w;
        }
        // mixed-radix increment
        let mut i = 0;
        loop {
            if i == t.len() {
                let normalization = s.pow(-8i32) / Rational::from_integer(BigInt::from(n).pow(16u32));
                return Ok(CuspValue {
                    sum: Cyclotomic::from_power_counts(order as u64, &counts),
                    normalization,
                    terms: terms.unwrap_or(0),
                });
            }
            t[i] += 1;
            g[section.free[i]] += section.step;
            if t[i] < section.count {
                break;
            }
            g[section.free[i]] -= section.step * t[i];
            t[i] = 0;
            i += 1;
        }
    }
}
