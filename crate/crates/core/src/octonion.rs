//! Octaves: the 8-dimensional composition algebra with its integral order.
//!
//! Storage is always the standard basis `e0..e7` ([`Octave`]); the integral
//! basis `f0..f7` is a computed view. [`IntegralOctave`] keeps integer
//! coordinates over `f0..f7` and multiplies through precomputed structure
//! constants, which is what the lattice enumeration and the cusp tables use.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

pub type Rational = num_rational::BigRational;

/// `MUL_TABLE[i][j] = (s, k)` encodes `e_i * e_j = s * e_k`.
pub const MUL_TABLE: [[(i8, u8); 8]; 8] = [
    [(1, 0), (1, 1), (1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7)],
    [(1, 1), (-1, 0), (1, 4), (1, 7), (-1, 2), (1, 6), (-1, 5), (-1, 3)],
    [(1, 2), (-1, 4), (-1, 0), (1, 5), (1, 1), (-1, 3), (1, 7), (-1, 6)],
    [(1, 3), (-1, 7), (-1, 5), (-1, 0), (1, 6), (1, 2), (-1, 4), (1, 1)],
    [(1, 4), (1, 2), (-1, 1), (-1, 6), (-1, 0), (1, 7), (1, 3), (-1, 5)],
    [(1, 5), (-1, 6), (1, 3), (-1, 2), (-1, 7), (-1, 0), (1, 1), (1, 4)],
    [(1, 6), (1, 5), (-1, 7), (1, 4), (-1, 3), (-1, 1), (-1, 0), (1, 2)],
    [(1, 7), (1, 3), (1, 6), (-1, 1), (1, 5), (-1, 4), (-1, 2), (-1, 0)],
];

/// Rows are `2 f_i` in e-coordinates.
pub const F_DOUBLED: [[i64; 8]; 8] = [
    [2, 0, 0, 0, 0, 0, 0, 0],
    [0, 2, 0, 0, 0, 0, 0, 0],
    [0, 0, 2, 0, 0, 0, 0, 0],
    [0, 0, 0, 2, 0, 0, 0, 0],
    [0, 1, 1, 1, -1, 0, 0, 0],
    [-1, -1, 0, 0, -1, 1, 0, 0],
    [-1, 1, -1, 0, 0, 0, 1, 0],
    [-1, 0, 1, 0, 1, 0, 0, 1],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisDirection {
    EToF,
    FToE,
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn half(n: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(2))
}

/// An octave with exact rational coordinates over `e0..e7`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Octave {
    e: [Rational; 8],
}

impl fmt::Debug for Octave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.e.iter().map(|c| c.to_string()).collect();
        write!(f, "Octave[{}]", parts.join(", "))
    }
}

impl Octave {
    pub fn new(e: [Rational; 8]) -> Self {
        Octave { e }
    }

    pub fn zero() -> Self {
        Octave { e: std::array::from_fn(|_| Rational::zero()) }
    }

    pub fn one() -> Self {
        Self::basis_e(0)
    }

    pub fn from_ints(e: [i64; 8]) -> Self {
        Octave { e: e.map(rat) }
    }

    pub fn scalar(c: Rational) -> Self {
        let mut x = Self::zero();
        x.e[0] = c;
        x
    }

    pub fn basis_e(i: usize) -> Self {
        let mut x = Self::zero();
        x.e[i] = Rational::one();
        x
    }

    pub fn basis_f(i: usize) -> Self {
        Octave { e: F_DOUBLED[i].map(half) }
    }

    pub fn coords(&self) -> &[Rational; 8] {
        &self.e
    }

    pub fn coord(&self, i: usize) -> &Rational {
        &self.e[i]
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(Zero::is_zero)
    }

    pub fn conj(&self) -> Self {
        let mut e = self.e.clone();
        for c in e.iter_mut().skip(1) {
            *c = -c.clone();
        }
        Octave { e }
    }

    pub fn norm(&self) -> Rational {
        self.e.iter().fold(Rational::zero(), |acc, c| acc + c * c)
    }

    pub fn trace(&self) -> Rational {
        &self.e[0] + &self.e[0]
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Octave { e: std::array::from_fn(|i| &self.e[i] * c) }
    }

    /// `tr(conj(self) * other)`, the bilinear form attached to the norm.
    pub fn pairing(&self, other: &Octave) -> Rational {
        let dot = self.e.iter().zip(other.e.iter()).fold(Rational::zero(), |acc, (a, b)| acc + a * b);
        &dot + &dot
    }

    /// Coordinates over `f0..f7`.
    pub fn to_f(&self) -> [Rational; 8] {
        let inv = f_inverse();
        std::array::from_fn(|j| (0..8).fold(Rational::zero(), |acc, i| acc + &self.e[i] * rat(inv[i][j])))
    }

    pub fn from_f(f: &[Rational; 8]) -> Self {
        Octave {
            e: std::array::from_fn(|j| (0..8).fold(Rational::zero(), |acc, i| acc + &f[i] * half(F_DOUBLED[i][j]))),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.to_f().iter().all(|c| c.is_integer())
    }

    pub fn to_integral(&self) -> Option<IntegralOctave> {
        let f = self.to_f();
        let mut out = [0i64; 8];
        for (o, c) in out.iter_mut().zip(f.iter()) {
            if !c.is_integer() {
                return None;
            }
            *o = c.to_integer().to_i64()?;
        }
        Some(IntegralOctave { f: out })
    }

    pub fn to_f64(&self) -> [f64; 8] {
        self.e.clone().map(|c| c.to_f64().unwrap_or(f64::NAN))
    }
}

/// Change of basis between e- and f-coordinates.
pub fn basis_convert(coords: &[Rational; 8], direction: BasisDirection) -> [Rational; 8] {
    match direction {
        BasisDirection::EToF => Octave::new(coords.clone()).to_f(),
        BasisDirection::FToE => Octave::from_f(coords).e,
    }
}

impl Mul for &Octave {
    type Output = Octave;

    fn mul(self, rhs: &Octave) -> Octave {
        let mut out = Octave::zero();
        for (i, a) in self.e.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.e.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let (s, k) = MUL_TABLE[i][j];
                let p = a * b;
                if s > 0 {
                    out.e[k as usize] += p;
                } else {
                    out.e[k as usize] -= p;
                }
            }
        }
        out
    }
}

impl Mul for Octave {
    type Output = Octave;
    fn mul(self, rhs: Octave) -> Octave {
        &self * &rhs
    }
}

impl Add for &Octave {
    type Output = Octave;
    fn add(self, rhs: &Octave) -> Octave {
        Octave { e: std::array::from_fn(|i| &self.e[i] + &rhs.e[i]) }
    }
}

impl Add for Octave {
    type Output = Octave;
    fn add(self, rhs: Octave) -> Octave {
        &self + &rhs
    }
}

impl Sub for &Octave {
    type Output = Octave;
    fn sub(self, rhs: &Octave) -> Octave {
        Octave { e: std::array::from_fn(|i| &self.e[i] - &rhs.e[i]) }
    }
}

impl Sub for Octave {
    type Output = Octave;
    fn sub(self, rhs: Octave) -> Octave {
        &self - &rhs
    }
}

impl Neg for &Octave {
    type Output = Octave;
    fn neg(self) -> Octave {
        Octave { e: std::array::from_fn(|i| -self.e[i].clone()) }
    }
}

impl Neg for Octave {
    type Output = Octave;
    fn neg(self) -> Octave {
        -&self
    }
}

/// The common value of `tr((a*b)*c)` and `tr(a*(b*c))`.
pub fn triple_trace(a: &Octave, b: &Octave, c: &Octave) -> Rational {
    (&(a * b) * c).trace()
}

/// Integer inverse of the f-basis matrix: `x_f = x_e * inv` (row vectors).
pub fn f_inverse() -> &'static [[i64; 8]; 8] {
    static INV: OnceLock<[[i64; 8]; 8]> = OnceLock::new();
    INV.get_or_init(|| {
        // Gauss-Jordan on F = F_DOUBLED / 2 over the rationals.
        let mut a: Vec<Vec<Rational>> = F_DOUBLED.iter().map(|r| r.iter().map(|&v| half(v)).collect()).collect();
        let mut inv: Vec<Vec<Rational>> =
            (0..8).map(|i| (0..8).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
        for col in 0..8 {
            let piv = (col..8).find(|&r| !a[r][col].is_zero()).expect("f-basis matrix is invertible");
            a.swap(col, piv);
            inv.swap(col, piv);
            let p = a[col][col].clone();
            for j in 0..8 {
                a[col][j] = &a[col][j] / &p;
                inv[col][j] = &inv[col][j] / &p;
            }
            for r in 0..8 {
                if r != col && !a[r][col].is_zero() {
                    let m = a[r][col].clone();
                    for j in 0..8 {
                        let t = &m * &a[col][j];
                        a[r][j] -= t;
                        let t = &m * &inv[col][j];
                        inv[r][j] -= t;
                    }
                }
            }
        }
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                assert!(inv[i][j].is_integer(), "e-basis must lie in the integral order");
                inv[i][j].to_integer().to_i64().unwrap()
            })
        })
    })
}

/// The even unimodular Gram matrix `S = 2FF'`, `S_ij = tr(conj(f_i) * f_j)`.
pub fn gram_s() -> &'static [[i64; 8]; 8] {
    static S: OnceLock<[[i64; 8]; 8]> = OnceLock::new();
    S.get_or_init(|| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let dot: i64 = (0..8).map(|k| F_DOUBLED[i][k] * F_DOUBLED[j][k]).sum();
                // 2 * (F_DOUBLED/2)(F_DOUBLED/2)'
                assert_eq!(dot % 2, 0);
                dot / 2
            })
        })
    })
}

/// An integral octave with integer coordinates over `f0..f7`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, serde::Serialize, serde::Deserialize)]
pub struct IntegralOctave {
    pub f: [i64; 8],
}

struct IntegralTables {
    /// `mul[i][j]` = f-coordinates of `f_i * f_j`.
    mul: [[[i64; 8]; 8]; 8],
    /// Row `i` = f-coordinates of `conj(f_i)`.
    conj: [[i64; 8]; 8],
    /// `tr(f_i)`.
    trace: [i64; 8],
}

fn tables() -> &'static IntegralTables {
    static T: OnceLock<IntegralTables> = OnceLock::new();
    T.get_or_init(|| {
        let f: Vec<Octave> = (0..8).map(Octave::basis_f).collect();
        let to_int = |x: &Octave| x.to_integral().expect("integral order is closed").f;
        IntegralTables {
            mul: std::array::from_fn(|i| std::array::from_fn(|j| to_int(&(&f[i] * &f[j])))),
            conj: std::array::from_fn(|i| to_int(&f[i].conj())),
            trace: std::array::from_fn(|i| f[i].trace().to_integer().to_i64().unwrap()),
        }
    })
}

impl IntegralOctave {
    pub const ZERO: IntegralOctave = IntegralOctave { f: [0; 8] };

    pub fn new(f: [i64; 8]) -> Self {
        IntegralOctave { f }
    }

    pub fn basis(i: usize) -> Self {
        let mut f = [0; 8];
        f[i] = 1;
        IntegralOctave { f }
    }

    /// Reads bit `k` of `bits` as the f-coordinate `k` (a {0,1} lift).
    pub fn from_bits(bits: u8) -> Self {
        IntegralOctave { f: std::array::from_fn(|k| ((bits >> k) & 1) as i64) }
    }

    pub fn is_zero(&self) -> bool {
        self.f.iter().all(|&c| c == 0)
    }

    pub fn to_octave(&self) -> Octave {
        Octave::from_f(&self.f.map(rat))
    }

    pub fn to_e_doubled(&self) -> [i64; 8] {
        std::array::from_fn(|j| (0..8).map(|i| self.f[i] * F_DOUBLED[i][j]).sum())
    }

    pub fn to_complex(&self) -> ComplexOctave {
        let e = self.to_e_doubled();
        ComplexOctave { e: e.map(|v| Complex64::new(v as f64 / 2.0, 0.0)) }
    }

    pub fn conj(&self) -> Self {
        let t = tables();
        let mut out = [0i64; 8];
        for (i, &c) in self.f.iter().enumerate() {
            if c != 0 {
                for (o, &v) in out.iter_mut().zip(t.conj[i].iter()) {
                    *o += c * v;
                }
            }
        }
        IntegralOctave { f: out }
    }

    pub fn trace(&self) -> i64 {
        self.f.iter().zip(tables().trace.iter()).map(|(a, b)| a * b).sum()
    }

    /// `tr(conj(self) * other) = self' S other`.
    pub fn pairing(&self, other: &IntegralOctave) -> i64 {
        let s = gram_s();
        let mut acc = 0;
        for i in 0..8 {
            if self.f[i] == 0 {
                continue;
            }
            let row: i64 = (0..8).map(|j| s[i][j] * other.f[j]).sum();
            acc += self.f[i] * row;
        }
        acc
    }

    pub fn norm(&self) -> i64 {
        self.pairing(self) / 2
    }

    pub fn scale(&self, c: i64) -> Self {
        IntegralOctave { f: self.f.map(|v| v * c) }
    }

    /// True iff the octave lies in `2 O(Z)`.
    pub fn is_even(&self) -> bool {
        self.f.iter().all(|c| c % 2 == 0)
    }

    /// Bitmask of the f-coordinates mod 2.
    pub fn parity_bits(&self) -> u8 {
        self.f.iter().enumerate().fold(0u8, |acc, (k, &c)| acc | (((c & 1) as u8) << k))
    }

    /// Matrix `L` with `(self * x).f[k] = sum_j x.f[j] * L[j][k]`.
    pub fn left_mul_matrix(&self) -> [[i64; 8]; 8] {
        let t = tables();
        let mut m = [[0i64; 8]; 8];
        for (i, &a) in self.f.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, row) in m.iter_mut().enumerate() {
                for (k, v) in row.iter_mut().enumerate() {
                    *v += a * t.mul[i][j][k];
                }
            }
        }
        m
    }
}

impl Mul for IntegralOctave {
    type Output = IntegralOctave;
    fn mul(self, rhs: IntegralOctave) -> IntegralOctave {
        let t = tables();
        let mut out = [0i64; 8];
        for (i, &a) in self.f.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.f.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let ab = a * b;
                for (o, &c) in out.iter_mut().zip(t.mul[i][j].iter()) {
                    *o += ab * c;
                }
            }
        }
        IntegralOctave { f: out }
    }
}

impl Add for IntegralOctave {
    type Output = IntegralOctave;
    fn add(self, rhs: IntegralOctave) -> IntegralOctave {
        IntegralOctave { f: std::array::from_fn(|i| self.f[i] + rhs.f[i]) }
    }
}

impl Sub for IntegralOctave {
    type Output = IntegralOctave;
    fn sub(self, rhs: IntegralOctave) -> IntegralOctave {
        IntegralOctave { f: std::array::from_fn(|i| self.f[i] - rhs.f[i]) }
    }
}

impl Neg for IntegralOctave {
    type Output = IntegralOctave;
    fn neg(self) -> IntegralOctave {
        IntegralOctave { f: self.f.map(|v| -v) }
    }
}

/// `tr(a * b * c)` on integral octaves.
pub fn triple_trace_integral(a: &IntegralOctave, b: &IntegralOctave, c: &IntegralOctave) -> i64 {
    // tr(x * y) = tr(conj(conj x) * y) = pairing(conj x, y)
    let ab = *a * *b;
    ab.conj().pairing(c)
}

/// Octave with complex coordinates over `e0..e7`, used by the floating-point
/// theta evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexOctave {
    pub e: [Complex64; 8],
}

impl ComplexOctave {
    pub fn zero() -> Self {
        ComplexOctave { e: [Complex64::new(0.0, 0.0); 8] }
    }

    pub fn from_parts(re: [f64; 8], im: [f64; 8]) -> Self {
        ComplexOctave { e: std::array::from_fn(|i| Complex64::new(re[i], im[i])) }
    }

    pub fn re(&self) -> [f64; 8] {
        self.e.map(|c| c.re)
    }

    pub fn im(&self) -> [f64; 8] {
        self.e.map(|c| c.im)
    }

    pub fn conj(&self) -> Self {
        let mut e = self.e;
        for c in e.iter_mut().skip(1) {
            *c = -*c;
        }
        ComplexOctave { e }
    }

    /// Complex-bilinear norm `sum z_i^2`.
    pub fn norm(&self) -> Complex64 {
        self.e.iter().map(|c| c * c).sum()
    }

    pub fn trace(&self) -> Complex64 {
        self.e[0] * 2.0
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexOctave { e: self.e.map(|v| v * c) }
    }
}

impl Mul for ComplexOctave {
    type Output = ComplexOctave;
    fn mul(self, rhs: ComplexOctave) -> ComplexOctave {
        let mut out = [Complex64::new(0.0, 0.0); 8];
        for i in 0..8 {
            for j in 0..8 {
                let (s, k) = MUL_TABLE[i][j];
                let p = self.e[i] * rhs.e[j];
                out[k as usize] += if s > 0 { p } else { -p };
            }
        }
        ComplexOctave { e: out }
    }
}

impl Add for ComplexOctave {
    type Output = ComplexOctave;
    fn add(self, rhs: ComplexOctave) -> ComplexOctave {
        ComplexOctave { e: std::array::from_fn(|i| self.e[i] + rhs.e[i]) }
    }
}

impl Sub for ComplexOctave {
    type Output = ComplexOctave;
    fn sub(self, rhs: ComplexOctave) -> ComplexOctave {
        ComplexOctave { e: std::array::from_fn(|i| self.e[i] - rhs.e[i]) }
    }
}

impl Neg for ComplexOctave {
    type Output = ComplexOctave;
    fn neg(self) -> ComplexOctave {
        ComplexOctave { e: self.e.map(|v| -v) }
    }
}

/// Diagonal of `S^{-1}` as exact rationals.
fn gram_inverse_diagonal() -> [Rational; 8] {
    let s = gram_s();
    let mut a: Vec<Vec<Rational>> = s.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect();
    let mut inv: Vec<Vec<Rational>> =
        (0..8).map(|i| (0..8).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    for col in 0..8 {
        let piv = (col..8).find(|&r| !a[r][col].is_zero()).unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..8 {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..8 {
            if r != col && !a[r][col].is_zero() {
                let m = a[r][col].clone();
                for j in 0..8 {
                    let t = &m * &a[col][j];
                    a[r][j] -= t;
                    let t = &m * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    std::array::from_fn(|i| inv[i][i].clone())
}

/// Per-coordinate box bound for `N(x) <= n`: `|x_i| <= floor(sqrt(2n (S^-1)_ii))`.
pub fn coordinate_bound(n: u64) -> [i64; 8] {
    let diag = gram_inverse_diagonal();
    diag.map(|d| {
        let limit = &d * rat(2 * n as i64);
        let mut b = limit.to_f64().unwrap().sqrt().floor() as i64;
        // exact correction of the float estimate
        while rat((b + 1) * (b + 1)) <= limit {
            b += 1;
        }
        while b > 0 && rat(b * b) > limit {
            b -= 1;
        }
        b
    })
}

/// Upper-triangular decomposition `x'Sx = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2`.
fn fincke_pohst_form() -> [[f64; 8]; 8] {
    let s = gram_s();
    let mut q = [[0f64; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            q[i][j] = s[i][j] as f64;
        }
    }
    for i in 0..8 {
        for j in (i + 1)..8 {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in (i + 1)..8 {
            for l in k..8 {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    q
}

/// All integral octaves of norm exactly `n`, sorted lexicographically by
/// f-coordinates.
pub fn enumerate_by_norm(n: u64) -> Vec<IntegralOctave> {
    enumerate_up_to_norm(n).into_iter().filter(|x| x.norm() as u64 == n).collect()
}

/// All integral octaves of norm at most `n`, sorted lexicographically.
pub fn enumerate_up_to_norm(n: u64) -> Vec<IntegralOctave> {
    let q = fincke_pohst_form();
    let bound = coordinate_bound(n);
    let budget = 2.0 * n as f64 + 1e-6;
    let top = 7usize;
    let r = (budget / q[top][top]).sqrt();
    let lo = (-r).ceil().max(-(bound[top] as f64)) as i64;
    let hi = r.floor().min(bound[top] as f64) as i64;
    let mut out: Vec<IntegralOctave> = (lo..=hi)
        .into_par_iter()
        .flat_map_iter(|x7| {
            let mut x = [0i64; 8];
            x[top] = x7;
            let rem = budget - q[top][top] * (x7 as f64).powi(2);
            let mut found = Vec::new();
            descend(&q, &bound, &mut x, top, rem, &mut found);
            found
        })
        .filter(|v| v.norm() as u64 <= n)
        .collect();
    out.sort();
    out
}

fn descend(
    q: &[[f64; 8]; 8],
    bound: &[i64; 8],
    x: &mut [i64; 8],
    level: usize,
    rem: f64,
    out: &mut Vec<IntegralOctave>,
) {
    if level == 0 {
        out.push(IntegralOctave { f: *x });
        return;
    }
    let i = level - 1;
    let c: f64 = -((i + 1)..8).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
    let r = (rem.max(0.0) / q[i][i]).sqrt();
    let lo = ((c - r).ceil() as i64).max(-bound[i]);
    let hi = ((c + r).floor() as i64).min(bound[i]);
    for v in lo..=hi {
        x[i] = v;
        let d = v as f64 - c;
        let next = rem - q[i][i] * d * d;
        if next >= -1e-9 {
            descend(q, bound, x, i, next, out);
        }
    }
    x[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        rat(n)
    }

    #[test]
    fn table_antisymmetry_and_unit() {
        for i in 0..8 {
            assert_eq!(MUL_TABLE[0][i], (1, i as u8));
            assert_eq!(MUL_TABLE[i][0], (1, i as u8));
        }
        for i in 1..8 {
            assert_eq!(MUL_TABLE[i][i], (-1, 0));
            for j in (i + 1)..8 {
                let (s1, k1) = MUL_TABLE[i][j];
                let (s2, k2) = MUL_TABLE[j][i];
                assert_eq!(k1, k2);
                assert_eq!(s1, -s2);
            }
        }
    }

    #[test]
    fn e1_times_e2_is_e4() {
        assert_eq!(&Octave::basis_e(1) * &Octave::basis_e(2), Octave::basis_e(4));
    }

    #[test]
    fn f4_squared() {
        let f4 = Octave::basis_f(4);
        let sq = &f4 * &f4;
        assert!(sq.is_integral());
        assert_eq!(sq.norm(), r(1));
        // f4 is purely imaginary, so f4 * f4 = -N(f4) e0.
        assert_eq!(sq, Octave::scalar(r(-1)));
        assert_eq!(sq.trace(), r(-2));
    }

    #[test]
    fn conjugation() {
        assert_eq!(Octave::basis_e(0).conj(), Octave::basis_e(0));
        assert_eq!(Octave::basis_e(3).conj(), -Octave::basis_e(3));
        let x = Octave::from_ints([1, -2, 3, 0, 5, -1, 2, 7]);
        assert_eq!(x.conj().conj(), x);
    }

    #[test]
    fn norms_and_traces() {
        assert_eq!(Octave::basis_e(0).norm(), r(1));
        assert_eq!(Octave::basis_f(5).norm(), r(1));
        let x = Octave::from_ints([0, 2, 1, 0, 0, 0, 0, 0]);
        assert_eq!(x.norm(), r(5));
        assert_eq!(Octave::basis_e(0).trace(), r(2));
        assert_eq!(Octave::basis_e(4).trace(), r(0));
        assert_eq!(Octave::basis_f(6).trace(), r(-1));
    }

    #[test]
    fn triple_trace_examples() {
        let e = |i| Octave::basis_e(i);
        assert_eq!(triple_trace(&e(1), &e(2), &e(4)), r(-2));
        let x = Octave::from_ints([3, 1, 0, 0, 2, 0, 0, 1]);
        assert_eq!(triple_trace(&e(0), &e(0), &x), x.trace());
    }

    #[test]
    fn basis_conversion() {
        let f4 = Octave::basis_f(4).to_f();
        for (k, c) in f4.iter().enumerate() {
            assert_eq!(*c, r(if k == 4 { 1 } else { 0 }));
        }
        let e4 = Octave::basis_e(4).to_f();
        assert_eq!(e4.to_vec(), [0, 1, 1, 1, -2, 0, 0, 0].map(r).to_vec());
        let v = [3, -1, 4, 1, -5, 9, 2, -6].map(r);
        assert_eq!(basis_convert(&basis_convert(&v, BasisDirection::FToE), BasisDirection::EToF), v);
    }

    #[test]
    fn gram_matrix_properties() {
        let s = gram_s();
        assert_eq!(s[0][0], 2);
        for i in 0..8 {
            assert_eq!(s[i][i] % 2, 0);
            for j in 0..8 {
                assert_eq!(s[i][j], s[j][i]);
                let direct = Octave::basis_f(i).pairing(&Octave::basis_f(j));
                assert_eq!(direct, r(s[i][j]));
            }
        }
    }

    #[test]
    fn integral_ops_agree_with_rational() {
        let a = IntegralOctave::new([1, -2, 0, 3, 1, 0, -1, 2]);
        let b = IntegralOctave::new([0, 1, 1, -1, 2, 3, 0, -2]);
        assert_eq!((a * b).to_octave(), &a.to_octave() * &b.to_octave());
        assert_eq!(a.conj().to_octave(), a.to_octave().conj());
        assert_eq!(r(a.norm()), a.to_octave().norm());
        assert_eq!(r(a.trace()), a.to_octave().trace());
        let c = IntegralOctave::new([2, 0, -1, 0, 0, 1, 1, 0]);
        assert_eq!(r(triple_trace_integral(&a, &b, &c)), triple_trace(&a.to_octave(), &b.to_octave(), &c.to_octave()));
    }

    #[test]
    fn left_mul_matrix_matches_product() {
        let a = IntegralOctave::new([1, 0, 2, -1, 0, 1, 0, 3]);
        let x = IntegralOctave::new([0, 1, -1, 2, 1, 0, 0, -1]);
        let l = a.left_mul_matrix();
        let via: [i64; 8] = std::array::from_fn(|k| (0..8).map(|j| x.f[j] * l[j][k]).sum());
        assert_eq!(via, (a * x).f);
    }

    #[test]
    fn small_shells() {
        assert_eq!(enumerate_by_norm(0), vec![IntegralOctave::ZERO]);
        assert_eq!(enumerate_by_norm(1).len(), 240);
    }
}
