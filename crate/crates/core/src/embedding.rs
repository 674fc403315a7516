//! The spin group of the signature (2,10) lattice and its modular embedding
//! into the degree-16 Siegel modular group.
//!
//! Group elements are 4x4 matrices over the even Clifford algebra of the
//! negative octave space. The octave representation `P` turns each entry into
//! an 8x8 matrix, giving a 32x32 symplectic matrix (`J0`); conjugating by the
//! block matrix built from `sqrt(2) F` makes it integral (`J`).

use std::fmt;
use std::ops::{Add, Mul, Neg};
use std::sync::{Arc, OnceLock};

use nalgebra::SMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford::{CliffordElement, CliffordError, CliffordLattice, GramSpace};
use crate::linalg::{IntegerLattice, RatMatrix};
use crate::octonion::{gram_s, triple_trace, ComplexOctave, IntegralOctave, Octave, Rational, F_DOUBLED};

pub type CMatrix16 = SMatrix<Complex64, 16, 16>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("element is not even")]
    NotEven,
    #[error("element does not live over the negative octave space")]
    WrongSpace,
    #[error("matrix does not pass the spin test")]
    NotSpin,
    #[error("scaling conjugation left non-integral coefficients")]
    NonIntegral,
    #[error("constructed generator {0} failed validation")]
    InvalidGenerator(String),
    #[error("point maps to the cusp at infinity")]
    CuspAtInfinity,
    #[error("point is not in the tube domain")]
    OutsideTubeDomain,
    #[error("imaginary part of the Siegel matrix is not positive definite")]
    NotPositiveDefinite,
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// The f-basis matrix `F` (rows are `f_i` in e-coordinates).
pub fn f_matrix() -> &'static RatMatrix {
    static F: OnceLock<RatMatrix> = OnceLock::new();
    F.get_or_init(|| RatMatrix::from_fn(8, 8, |r, c| Rational::new(BigInt::from(F_DOUBLED[r][c]), BigInt::from(2))))
}

struct FBlocks {
    f: RatMatrix,
    f_inv: RatMatrix,
    ft: RatMatrix,
    ft_inv: RatMatrix,
}

fn f_blocks() -> &'static FBlocks {
    static B: OnceLock<FBlocks> = OnceLock::new();
    B.get_or_init(|| {
        let f = f_matrix().clone();
        let f_inv = f.inverse().expect("F is invertible");
        let ft = f.transpose();
        let ft_inv = f_inv.transpose();
        FBlocks { f, f_inv, ft, ft_inv }
    })
}

/// Left multiplication by `a`: column `k` holds the e-coordinates of `a * e_k`.
pub fn left_mul_matrix(a: &Octave) -> RatMatrix {
    let mut m = RatMatrix::zeros(8, 8);
    for k in 0..8 {
        let p = a * &Octave::basis_e(k);
        for i in 0..8 {
            m[(i, k)] = p.coord(i).clone();
        }
    }
    m
}

/// `P(a) = L_a - tr(a) * identity`; `P(e0) = -identity`, `P(e_i) = L_{e_i}`.
pub fn p_matrix(a: &Octave) -> RatMatrix {
    let l = left_mul_matrix(a);
    &l - &RatMatrix::identity(8).scale(&a.trace())
}

/// The entry formula `(tr(conj(e_i) * a * e_k) / 2)`, which is `L_a`. It
/// disagrees with [`p_matrix`] at `a = e0`; kept for the erratum test.
pub fn p_matrix_entry_formula(a: &Octave) -> RatMatrix {
    let two = int(2);
    RatMatrix::from_fn(8, 8, |i, k| triple_trace(&Octave::basis_e(i).conj(), a, &Octave::basis_e(k)) / &two)
}

/// `Q(a) = (tr(conj(f_i) * a * f_j))`.
pub fn q_bilinear(a: &Octave) -> RatMatrix {
    let f: Vec<Octave> = (0..8).map(Octave::basis_f).collect();
    RatMatrix::from_fn(8, 8, |i, j| triple_trace(&f[i].conj(), a, &f[j]))
}

/// `2 F P(a) F'`, the off-diagonal block produced by the group side. It
/// equals `Q(a) - tr(a) S`.
pub fn q_conjugated(a: &Octave) -> RatMatrix {
    let b = f_blocks();
    (&(&b.f * &p_matrix(a)) * &b.ft).scale(&int(2))
}

/// Integer images of the 128 even monomials of the rank-8 Clifford algebra.
fn monomial_images() -> &'static Vec<Option<RatMatrix>> {
    static IMAGES: OnceLock<Vec<Option<RatMatrix>>> = OnceLock::new();
    IMAGES.get_or_init(|| {
        let p: Vec<RatMatrix> = (0..8).map(|i| p_matrix(&Octave::basis_e(i))).collect();
        (0u16..256)
            .map(|mask| {
                if mask.count_ones() % 2 != 0 {
                    return None;
                }
                let idx: Vec<usize> = (0..8).filter(|i| mask >> i & 1 == 1).collect();
                let mut acc = RatMatrix::identity(8);
                for pair in idx.chunks(2) {
                    let (i, j) = (pair[0], pair[1]);
                    let img = if i == 0 { p[j].clone() } else { &p[i] * &p[j] };
                    acc = &acc * &img;
                }
                Some(acc)
            })
            .collect()
    })
}

/// The homomorphism from the even Clifford algebra of the negative octave
/// space to 8x8 matrices, `e0 a -> P(a)`.
pub fn even_hom_to_m8(x: &CliffordElement) -> Result<RatMatrix, EmbeddingError> {
    if x.space().rank() != 8 || **x.space() != *GramSpace::negative_octave() {
        return Err(EmbeddingError::WrongSpace);
    }
    if !x.is_even() {
        return Err(EmbeddingError::NotEven);
    }
    let images = monomial_images();
    let mut out = RatMatrix::zeros(8, 8);
    for (mask, c) in x.terms() {
        let img = images[mask as usize].as_ref().expect("even mask");
        out = &out + &img.scale(c);
    }
    Ok(out)
}

/// The grade-one Clifford element with the e-coordinates of `a`.
pub fn octave_vector(a: &Octave) -> CliffordElement {
    CliffordElement::embed_vector(&GramSpace::negative_octave(), a.coords()).expect("rank 8")
}

/// The even element `e0 * a`.
pub fn e0_times(a: &Octave) -> CliffordElement {
    let s = GramSpace::negative_octave();
    &CliffordElement::basis(&s, 0) * &octave_vector(a)
}

/// The identity and the ordered products `P(f_j1)...P(f_jm)`, `1 <= j1 < ... < jm <= 7`.
pub fn product_spanning_set() -> Vec<RatMatrix> {
    let p: Vec<RatMatrix> = (1..8).map(|j| p_matrix(&Octave::basis_f(j))).collect();
    (0u32..128)
        .map(|mask| (0..7).filter(|j| mask >> j & 1 == 1).fold(RatMatrix::identity(8), |acc, j| &acc * &p[j]))
        .collect()
}

fn flatten8(m: &RatMatrix) -> Vec<Rational> {
    (0..64).map(|k| m[(k / 8, k % 8)].clone()).collect()
}

/// Whether an 8x8 matrix is an integer combination of [`product_spanning_set`].
pub fn in_product_lattice(m: &RatMatrix) -> bool {
    static L: OnceLock<IntegerLattice> = OnceLock::new();
    let lattice = L.get_or_init(|| {
        let gens: Vec<Vec<Rational>> = product_spanning_set().iter().map(flatten8).collect();
        IntegerLattice::new(64, &gens)
    });
    lattice.contains(&flatten8(m))
}

/// The Clifford order of the integral octaves, spanned by ordered monomials in the f-basis.
pub fn octave_order() -> &'static CliffordLattice {
    static ORDER: OnceLock<CliffordLattice> = OnceLock::new();
    ORDER.get_or_init(|| {
        let basis: Vec<Vec<Rational>> = (0..8).map(|i| Octave::basis_f(i).coords().to_vec()).collect();
        CliffordLattice::new(&GramSpace::negative_octave(), &basis).expect("f-basis spans the octaves")
    })
}

/// A 4x4 matrix with entries in the Clifford algebra of the negative octave space.
#[derive(Clone, PartialEq, Eq)]
pub struct CliffordMatrix4 {
    entries: Vec<CliffordElement>,
}

impl fmt::Debug for CliffordMatrix4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in 0..4 {
            let row: Vec<String> = (0..4).map(|c| format!("{:?}", self.get(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl CliffordMatrix4 {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> CliffordElement) -> Self {
        let mut entries = Vec::with_capacity(16);
        for r in 0..4 {
            for c in 0..4 {
                entries.push(f(r, c));
            }
        }
        CliffordMatrix4 { entries }
    }

    pub fn from_ints(m: [[i64; 4]; 4]) -> Self {
        let s = GramSpace::negative_octave();
        Self::from_fn(|r, c| CliffordElement::from_int(&s, m[r][c]))
    }

    pub fn zero() -> Self {
        Self::from_ints([[0; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::from_ints([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    }

    /// `(0 e; -e 0)` in 2x2 blocks.
    pub fn symplectic_unit() -> Self {
        Self::from_ints([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    }

    pub fn get(&self, r: usize, c: usize) -> &CliffordElement {
        &self.entries[r * 4 + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: CliffordElement) {
        self.entries[r * 4 + c] = v;
    }

    pub fn is_even(&self) -> bool {
        self.entries.iter().all(CliffordElement::is_even)
    }

    /// Entries in the order spanned by monomials in `f_0, ..., f_7`.
    pub fn is_integral(&self) -> bool {
        let order = octave_order();
        self.entries.iter().all(|e| order.contains(e))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_fn(|r, col| self.get(r, col).scale(c))
    }

    /// Entrywise involution followed by transposition: `(m_ij)* = (m'_ji)`.
    pub fn star(&self) -> Self {
        Self::from_fn(|r, c| self.get(c, r).involution())
    }

    /// The main involution of the rank-12 Clifford algebra in this model:
    /// `(a b; c d) -> (d*, -b*; -c*, a*)` on 2x2 blocks.
    pub fn star_involution(&self) -> Self {
        let s = self.star();
        // s = (a* c*; b* d*) in blocks
        Self::from_fn(|r, c| {
            let (br, bc) = (r / 2, c / 2);
            let (ir, ic) = (r % 2, c % 2);
            match (br, bc) {
                (0, 0) => s.get(2 + ir, 2 + ic).clone(),
                (0, 1) => -s.get(2 + ir, ic),
                (1, 0) => -s.get(ir, 2 + ic),
                _ => s.get(ir, ic).clone(),
            }
        })
    }

    /// Whether `self - 1` has all entries in twice the integral order.
    pub fn is_one_mod2(&self) -> Result<bool, CliffordError> {
        let order = octave_order();
        let s = GramSpace::negative_octave();
        for r in 0..4 {
            for c in 0..4 {
                let shifted = if r == c { self.get(r, c).clone() } else { self.get(r, c) + &CliffordElement::one(&s) };
                if !order.is_one_mod2(&shifted)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Flattened coordinates keyed by `(entry, monomial)`.
    fn coordinates(&self) -> Vec<((usize, u16), Rational)> {
        let mut out = Vec::new();
        for (idx, e) in self.entries.iter().enumerate() {
            for (m, c) in e.terms() {
                out.push(((idx, m), c.clone()));
            }
        }
        out
    }
}

impl Mul for &CliffordMatrix4 {
    type Output = CliffordMatrix4;
    fn mul(self, rhs: &CliffordMatrix4) -> CliffordMatrix4 {
        let s = GramSpace::negative_octave();
        CliffordMatrix4::from_fn(|r, c| {
            let mut acc = CliffordElement::zero(&s);
            for k in 0..4 {
                let a = self.get(r, k);
                let b = rhs.get(k, c);
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        })
    }
}

impl Add for &CliffordMatrix4 {
    type Output = CliffordMatrix4;
    fn add(self, rhs: &CliffordMatrix4) -> CliffordMatrix4 {
        CliffordMatrix4::from_fn(|r, c| self.get(r, c) + rhs.get(r, c))
    }
}

impl Neg for &CliffordMatrix4 {
    type Output = CliffordMatrix4;
    fn neg(self) -> CliffordMatrix4 {
        CliffordMatrix4::from_fn(|r, c| -self.get(r, c))
    }
}

/// A 4x4 matrix over the even Clifford algebra; parity is checked on
/// construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CPlusMatrix4(CliffordMatrix4);

impl CPlusMatrix4 {
    pub fn new(m: CliffordMatrix4) -> Result<Self, EmbeddingError> {
        if m.is_even() {
            Ok(CPlusMatrix4(m))
        } else {
            Err(EmbeddingError::NotEven)
        }
    }

    pub fn identity() -> Self {
        CPlusMatrix4(CliffordMatrix4::identity())
    }

    pub fn inner(&self) -> &CliffordMatrix4 {
        &self.0
    }

    pub fn into_inner(self) -> CliffordMatrix4 {
        self.0
    }

    /// The group inverse `star_involution(m)`; valid for spin elements.
    pub fn group_inverse(&self) -> Self {
        CPlusMatrix4(self.0.star_involution())
    }
}

impl Mul for &CPlusMatrix4 {
    type Output = CPlusMatrix4;
    fn mul(self, rhs: &CPlusMatrix4) -> CPlusMatrix4 {
        CPlusMatrix4(&self.0 * &rhs.0)
    }
}

/// Names of the rank-12 basis, in the order used throughout.
pub const V_BASIS: [&str; 12] = ["h1", "h2", "h3", "h4", "e0", "e1", "e2", "e3", "e4", "e5", "e6", "e7"];

/// Images of `h1..h4, e0..e7` in `M4(C(V0))`.
pub fn spi_images() -> &'static [CliffordMatrix4; 12] {
    static IMAGES: OnceLock<[CliffordMatrix4; 12]> = OnceLock::new();
    IMAGES.get_or_init(|| {
        let s = GramSpace::negative_octave();
        let with = |gen: usize, pattern: [[i64; 4]; 4]| {
            let e = CliffordElement::basis(&s, gen);
            CliffordMatrix4::from_fn(|r, c| e.scale_int(pattern[r][c]))
        };
        let h1 = with(0, [[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0]]);
        let h2 = with(0, [[0, 0, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 0, 0]]);
        let h3 = with(0, [[0, 0, 0, 1], [0, 0, -1, 0], [0, 0, 0, 0], [0, 0, 0, 0]]);
        let h4 = with(0, [[0, 0, 0, 0], [0, 0, 0, 0], [0, 1, 0, 0], [-1, 0, 0, 0]]);
        let e0 = with(0, [[-1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]]);
        let id = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        let mut out = vec![h1, h2, h3, h4, e0];
        for i in 1..8 {
            out.push(with(i, id));
        }
        out.try_into().unwrap()
    })
}

/// Gram matrix of the rank-12 space in the order of [`V_BASIS`].
pub fn gram_v() -> RatMatrix {
    let g = GramSpace::signature_2_10();
    RatMatrix::from_fn(12, 12, |r, c| int(g.gram()[r][c]))
}

pub fn is_hermitian_symplectic(m: &CliffordMatrix4) -> bool {
    let i = CliffordMatrix4::symplectic_unit();
    &(&m.star() * &i) * m == i
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinCheck {
    pub is_spin: bool,
    /// Column `k` holds the coordinates of `g v_k g^{-1}` in [`V_BASIS`].
    pub orthogonal: Option<RatMatrix>,
}

impl SpinCheck {
    fn fail() -> Self {
        SpinCheck { is_spin: false, orthogonal: None }
    }
}

struct SpanSolver {
    keys: Vec<(usize, u16)>,
    matrix: RatMatrix,
}

fn span_solver() -> &'static SpanSolver {
    static S: OnceLock<SpanSolver> = OnceLock::new();
    S.get_or_init(|| {
        let images = spi_images();
        let mut keys: Vec<(usize, u16)> =
            images.iter().flat_map(|m| m.coordinates().into_iter().map(|(k, _)| k)).collect();
        keys.sort();
        keys.dedup();
        let mut matrix = RatMatrix::zeros(keys.len(), 12);
        for (j, m) in images.iter().enumerate() {
            for (k, c) in m.coordinates() {
                let row = keys.binary_search(&k).unwrap();
                matrix[(row, j)] = c;
            }
        }
        SpanSolver { keys, matrix }
    })
}

/// Coordinates of `m` in the span of the twelve images, if it lies there.
pub fn vector_coordinates(m: &CliffordMatrix4) -> Option<Vec<Rational>> {
    let solver = span_solver();
    let mut rhs = vec![Rational::zero(); solver.keys.len()];
    for (k, c) in m.coordinates() {
        let row = solver.keys.binary_search(&k).ok()?;
        rhs[row] = c;
    }
    solver.matrix.solve(&rhs)
}

/// Checks `g'g = 1` and `g V g^{-1} = V`; on success returns the orthogonal
/// image. Elements failing `g'g = 1` (including odd or singular ones) are
/// reported as not spin.
pub fn is_spin(m: &CliffordMatrix4) -> SpinCheck {
    if !m.is_even() {
        return SpinCheck::fail();
    }
    let inv = m.star_involution();
    if &inv * m != CliffordMatrix4::identity() {
        return SpinCheck::fail();
    }
    let mut orth = RatMatrix::zeros(12, 12);
    for (k, x) in spi_images().iter().enumerate() {
        let y = &(m * x) * &inv;
        let Some(coords) = vector_coordinates(&y) else {
            return SpinCheck::fail();
        };
        for (r, c) in coords.into_iter().enumerate() {
            orth[(r, k)] = c;
        }
    }
    let g = gram_v();
    if &(&orth.transpose() * &g) * &orth != g {
        return SpinCheck::fail();
    }
    SpinCheck { is_spin: true, orthogonal: Some(orth) }
}

/// Generators of the integral spin group used for the theta-group check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Identity,
    Inversion,
    TranslationUpper { h1: i64, h2: i64, oct: IntegralOctave },
    TranslationLower { oct: IntegralOctave },
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Identity => write!(f, "identity"),
            GeneratorSpec::Inversion => write!(f, "inversion"),
            GeneratorSpec::TranslationUpper { h1, h2, oct } => write!(f, "translation_upper({h1}, {h2}, {:?})", oct.f),
            GeneratorSpec::TranslationLower { oct } => write!(f, "translation_lower({:?})", oct.f),
        }
    }
}

impl GeneratorSpec {
    /// The generating system: inversion, the two integer translations, and
    /// octave translations by each `f_i` in both triangular shapes.
    pub fn standard_system() -> Vec<GeneratorSpec> {
        let mut out = vec![
            GeneratorSpec::Inversion,
            GeneratorSpec::TranslationUpper { h1: 1, h2: 0, oct: IntegralOctave::ZERO },
            GeneratorSpec::TranslationUpper { h1: 0, h2: 1, oct: IntegralOctave::ZERO },
        ];
        for i in 0..8 {
            out.push(GeneratorSpec::TranslationUpper { h1: 0, h2: 0, oct: IntegralOctave::basis(i) });
        }
        for i in 0..8 {
            out.push(GeneratorSpec::TranslationLower { oct: IntegralOctave::basis(i) });
        }
        out
    }

    /// The same shape with every parameter multiplied by `k`.
    pub fn scaled(&self, k: i64) -> GeneratorSpec {
        match *self {
            GeneratorSpec::TranslationUpper { h1, h2, oct } => {
                GeneratorSpec::TranslationUpper { h1: h1 * k, h2: h2 * k, oct: oct.scale(k) }
            }
            GeneratorSpec::TranslationLower { oct } => GeneratorSpec::TranslationLower { oct: oct.scale(k) },
            other => other,
        }
    }
}

fn assemble(spec: &GeneratorSpec, printed: bool) -> CliffordMatrix4 {
    let s = GramSpace::negative_octave();
    let zero = CliffordElement::zero(&s);
    let one = CliffordElement::one(&s);
    match *spec {
        GeneratorSpec::Identity => CliffordMatrix4::identity(),
        GeneratorSpec::Inversion => {
            if printed {
                CliffordMatrix4::from_ints([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, 0, -1, 0]])
            } else {
                CliffordMatrix4::symplectic_unit()
            }
        }
        GeneratorSpec::TranslationUpper { h1, h2, oct } => {
            let h = e0_times(&oct.to_octave());
            let hp = h.involution();
            let corner = if printed { zero.clone() } else { one.clone() };
            let rows = [
                [one.clone(), zero.clone(), CliffordElement::from_int(&s, h1), h],
                [zero.clone(), corner, hp, CliffordElement::from_int(&s, h2)],
                [zero.clone(), zero.clone(), one.clone(), zero.clone()],
                [zero.clone(), zero.clone(), zero.clone(), one.clone()],
            ];
            CliffordMatrix4::from_fn(|r, c| rows[r][c].clone())
        }
        GeneratorSpec::TranslationLower { oct } => {
            let h = e0_times(&oct.to_octave());
            let hp = h.involution();
            let rows = [
                [one.clone(), h, zero.clone(), zero.clone()],
                [zero.clone(), one.clone(), zero.clone(), zero.clone()],
                [zero.clone(), zero.clone(), one.clone(), zero.clone()],
                [zero.clone(), zero.clone(), -&hp, one.clone()],
            ];
            CliffordMatrix4::from_fn(|r, c| rows[r][c].clone())
        }
    }
}

/// The generator matrices exactly as printed, including the two slips (a row
/// `(0,0,-1,0)` in the inversion and a `0` on the diagonal of the upper
/// translation). They fail the spin test.
pub fn printed_generator(spec: &GeneratorSpec) -> CliffordMatrix4 {
    assemble(spec, true)
}

/// Builds a generator and validates it with [`is_spin`] and
/// [`is_hermitian_symplectic`].
pub fn build_generator(spec: &GeneratorSpec) -> Result<CPlusMatrix4, EmbeddingError> {
    let m = assemble(spec, false);
    if !is_spin(&m).is_spin || !is_hermitian_symplectic(&m) {
        return Err(EmbeddingError::InvalidGenerator(spec.to_string()));
    }
    CPlusMatrix4::new(m)
}

/// `N^{-1} m N` for the scaling element `N = diag(sqrt2, sqrt2, 1/sqrt2, 1/sqrt2)`:
/// the upper-right block is halved and the lower-left block doubled.
pub fn conjugate_by_scaling(m: &CPlusMatrix4) -> Result<CPlusMatrix4, EmbeddingError> {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let two = int(2);
    let out = CliffordMatrix4::from_fn(|r, c| match (r < 2, c < 2) {
        (true, false) => m.0.get(r, c).scale(&half),
        (false, true) => m.0.get(r, c).scale(&two),
        _ => m.0.get(r, c).clone(),
    });
    if !out.is_integral() {
        return Err(EmbeddingError::NonIntegral);
    }
    Ok(CPlusMatrix4(out))
}

/// Entrywise image under [`even_hom_to_m8`]: a 32x32 real symplectic matrix.
pub fn embed_j0(m: &CPlusMatrix4) -> RatMatrix {
    let mut out = RatMatrix::zeros(32, 32);
    for r in 0..4 {
        for c in 0..4 {
            let b = even_hom_to_m8(m.0.get(r, c)).expect("even entries over the octave space");
            out.set_block(8 * r, 8 * c, &b);
        }
    }
    out
}

/// `J(g)`: the `J0` image conjugated by `diag(sqrt2 F, sqrt2 F, (sqrt2 F)'^-1, (sqrt2 F)'^-1)`.
pub fn embed_j(m: &CPlusMatrix4) -> Result<RatMatrix, EmbeddingError> {
    if !is_spin(&m.0).is_spin {
        return Err(EmbeddingError::NotSpin);
    }
    Ok(conjugate_j0(&embed_j0(m)))
}

/// Applies the `sqrt2 F` block conjugation to a 32x32 matrix.
pub fn conjugate_j0(n: &RatMatrix) -> RatMatrix {
    let b = f_blocks();
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let two = int(2);
    let mut out = RatMatrix::zeros(32, 32);
    for r in 0..4 {
        for c in 0..4 {
            let blk = n.block(8 * r, 8 * c, 8, 8);
            let conj = match (r < 2, c < 2) {
                (true, true) => &(&b.f * &blk) * &b.f_inv,
                (true, false) => (&(&b.f * &blk) * &b.ft).scale(&two),
                (false, true) => (&(&b.ft_inv * &blk) * &b.f_inv).scale(&half),
                (false, false) => &(&b.ft_inv * &blk) * &b.ft,
            };
            out.set_block(8 * r, 8 * c, &conj);
        }
    }
    out
}

/// The standard symplectic form of degree `n` as an integer matrix.
pub fn standard_j(n: usize) -> Vec<Vec<i64>> {
    let mut j = vec![vec![0i64; 2 * n]; 2 * n];
    for i in 0..n {
        j[i][n + i] = 1;
        j[n + i][i] = -1;
    }
    j
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub integral_symplectic: bool,
    /// Largest `l` in {1, 2, 4} with `M = 1 mod l`; 0 when not integral symplectic.
    pub principal_level: u32,
    /// Membership in the theta group `Gamma[1,2]`.
    pub igusa_12: bool,
    pub igusa_24: bool,
}

impl LevelReport {
    pub fn theta_group(&self) -> bool {
        self.igusa_12
    }
}

fn mat_mul_i64(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![0i64; m]; n];
    for i in 0..n {
        for t in 0..k {
            let v = a[i][t];
            if v == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += v * b[t][j];
            }
        }
    }
    out
}

fn transpose_i64(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    (0..a[0].len()).map(|c| (0..a.len()).map(|r| a[r][c]).collect()).collect()
}

/// Congruence classification of a `2n x 2n` matrix.
pub fn classify_level(m: &RatMatrix) -> LevelReport {
    let not = LevelReport { integral_symplectic: false, principal_level: 0, igusa_12: false, igusa_24: false };
    let Some(mi) = m.to_i64() else {
        return not;
    };
    let size = mi.len();
    if size % 2 != 0 || mi.iter().any(|r| r.len() != size) {
        return not;
    }
    let n = size / 2;
    let j = standard_j(n);
    if mat_mul_i64(&mat_mul_i64(&transpose_i64(&mi), &j), &mi) != j {
        return not;
    }
    let congruent = |l: i64| (0..size).all(|r| (0..size).all(|c| (mi[r][c] - i64::from(r == c)).rem_euclid(l) == 0));
    let principal_level = [4, 2, 1].into_iter().find(|&l| congruent(l)).unwrap_or(1) as u32;
    let block = |r0: usize, c0: usize| -> Vec<Vec<i64>> {
        (0..n).map(|r| (0..n).map(|c| mi[r0 + r][c0 + c]).collect()).collect()
    };
    let (a, b, c, d) = (block(0, 0), block(0, n), block(n, 0), block(n, n));
    let ab = mat_mul_i64(&a, &transpose_i64(&b));
    let cd = mat_mul_i64(&c, &transpose_i64(&d));
    let even_diag = |x: &Vec<Vec<i64>>, l: i64| (0..n).all(|i| x[i][i] % l == 0 && (x[i][i] / l).rem_euclid(2) == 0);
    let igusa_12 = even_diag(&ab, 1) && even_diag(&cd, 1);
    let igusa_24 = principal_level >= 2 && even_diag(&ab, 2) && even_diag(&cd, 2);
    LevelReport { integral_symplectic: true, principal_level, igusa_12, igusa_24 }
}

/// A point `(z1, z2, zf)` of the tube domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthPoint {
    pub z1: Complex64,
    pub z2: Complex64,
    pub zf: ComplexOctave,
}

impl OrthPoint {
    pub fn new(z1: Complex64, z2: Complex64, zf: ComplexOctave) -> Self {
        OrthPoint { z1, z2, zf }
    }

    /// `Im z1 > 0` and `Im z1 Im z2 - N(Im zf) > 0`.
    pub fn in_tube_domain(&self) -> bool {
        let y = self.zf.im();
        let ny: f64 = y.iter().map(|v| v * v).sum();
        self.z1.im > 0.0 && self.z1.im * self.z2.im - ny > 0.0
    }

    /// The isotropic coordinate `* = N(zf) - z1 z2`.
    pub fn star(&self) -> Complex64 {
        self.zf.norm() - self.z1 * self.z2
    }

    /// Coordinates of the isotropic vector `(1, *, z1, z2, zf)` in
    /// [`V_BASIS`]: `h1 <- z1`, `h2 <- z2`, `h3 <- *`, `h4 <- 1`,
    /// `e_k <- -zf_k`.
    pub fn projective_vector(&self) -> [Complex64; 12] {
        let mut v = [Complex64::new(0.0, 0.0); 12];
        v[0] = self.z1;
        v[1] = self.z2;
        v[2] = self.star();
        v[3] = Complex64::new(1.0, 0.0);
        for k in 0..8 {
            v[4 + k] = -self.zf.e[k];
        }
        v
    }

    fn from_projective(v: &[Complex64; 12]) -> Result<(Self, Complex64), EmbeddingError> {
        let t = v[3];
        let scale = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if t.norm() <= 1e-14 * scale.max(1.0) {
            return Err(EmbeddingError::CuspAtInfinity);
        }
        let zf = ComplexOctave { e: std::array::from_fn(|k| -v[4 + k] / t) };
        Ok((OrthPoint { z1: v[0] / t, z2: v[1] / t, zf }, t))
    }
}

/// Chart calibration applied to the octave coordinate before `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Calibration {
    Identity,
    /// `zf -> -conj(zf)`, which flips the sign of the real part.
    #[default]
    NegConj,
}

impl Calibration {
    pub fn apply(&self, z: &OrthPoint) -> OrthPoint {
        match self {
            Calibration::Identity => *z,
            Calibration::NegConj => OrthPoint { zf: -z.zf.conj(), ..*z },
        }
    }

    pub fn other(&self) -> Calibration {
        match self {
            Calibration::Identity => Calibration::NegConj,
            Calibration::NegConj => Calibration::Identity,
        }
    }
}

impl std::str::FromStr for Calibration {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "identity" => Ok(Calibration::Identity),
            "neg_conj" => Ok(Calibration::NegConj),
            other => Err(format!("unknown calibration '{other}' (expected identity or neg_conj)")),
        }
    }
}

impl fmt::Display for Calibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Calibration::Identity => write!(f, "identity"),
            Calibration::NegConj => write!(f, "neg_conj"),
        }
    }
}

/// Applies a 12x12 orthogonal matrix to the projective vector of `z`.
/// Returns the new point and the rescaling factor `t` (the factor of
/// automorphy is `1/t`).
pub fn orth_action(o: &RatMatrix, z: &OrthPoint) -> Result<(OrthPoint, Complex64), EmbeddingError> {
    let of = o.to_f64();
    let v = z.projective_vector();
    let w: [Complex64; 12] = std::array::from_fn(|r| (0..12).map(|c| v[c] * of[r][c]).sum());
    let (p, t) = OrthPoint::from_projective(&w)?;
    if !p.in_tube_domain() {
        return Err(EmbeddingError::OutsideTubeDomain);
    }
    Ok((p, t))
}

/// `Q(e_k)` as floating matrices, for the complex-linear extension.
fn q_basis_f64() -> &'static [[[f64; 8]; 8]; 8] {
    static Q: OnceLock<[[[f64; 8]; 8]; 8]> = OnceLock::new();
    Q.get_or_init(|| {
        std::array::from_fn(|k| {
            let q = q_bilinear(&Octave::basis_e(k)).to_f64();
            std::array::from_fn(|i| std::array::from_fn(|j| q[i][j]))
        })
    })
}

/// `Q(zf)` extended complex-linearly.
pub fn q_complex(zf: &ComplexOctave) -> SMatrix<Complex64, 8, 8> {
    let qb = q_basis_f64();
    SMatrix::<Complex64, 8, 8>::from_fn(|i, j| (0..8).map(|k| zf.e[k] * qb[k][i][j]).sum())
}

/// `j(z) = (z1 S, Q(zf); Q(zf)', z2 S)`.
pub fn j_point(z: &OrthPoint) -> Result<CMatrix16, EmbeddingError> {
    let s = gram_s();
    let q = q_complex(&z.zf);
    let m = CMatrix16::from_fn(|r, c| match (r < 8, c < 8) {
        (true, true) => z.z1 * s[r][c] as f64,
        (false, false) => z.z2 * s[r - 8][c - 8] as f64,
        (true, false) => q[(r, c - 8)],
        (false, true) => q[(c, r - 8)],
    });
    let im = m.map(|v| v.im);
    if im.cholesky().is_none() {
        return Err(EmbeddingError::NotPositiveDefinite);
    }
    Ok(m)
}

/// Exact rational image of a generator in the degree-16 symplectic group.
pub fn generator_image(spec: &GeneratorSpec) -> Result<RatMatrix, EmbeddingError> {
    embed_j(&build_generator(spec)?)
}

/// Orthogonal image of a generator.
pub fn generator_orthogonal(spec: &GeneratorSpec) -> Result<RatMatrix, EmbeddingError> {
    let g = build_generator(spec)?;
    is_spin(g.inner()).orthogonal.ok_or(EmbeddingError::NotSpin)
}

/// Floating copy of a 32x32 rational matrix.
pub fn to_f64_32(m: &RatMatrix) -> SMatrix<f64, 32, 32> {
    SMatrix::<f64, 32, 32>::from_fn(|r, c| m[(r, c)].to_f64().unwrap_or(f64::NAN))
}

/// Shared handle to the negative octave space, for callers building elements.
pub fn octave_space() -> Arc<GramSpace> {
    GramSpace::negative_octave()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> Octave {
        Octave::basis_e(i)
    }

    #[test]
    fn p_of_units() {
        assert_eq!(p_matrix(&e(0)), -&RatMatrix::identity(8));
        let p1 = p_matrix(&e(1));
        assert_eq!(&p1 * &p1, -&RatMatrix::identity(8));
        assert!(p1.is_skew_symmetric());
        let p2 = p_matrix(&e(2));
        assert!((&(&p1 * &p2) + &(&p2 * &p1)).is_zero());
    }

    #[test]
    fn printed_entry_formula_differs_only_at_e0() {
        // Erratum: the entry formula gives +1 at e0, the homomorphism needs -1.
        assert_eq!(p_matrix_entry_formula(&e(0)), RatMatrix::identity(8));
        for i in 1..8 {
            assert_eq!(p_matrix_entry_formula(&e(i)), p_matrix(&e(i)));
        }
    }

    #[test]
    fn q_examples() {
        let s = RatMatrix::from_ints(gram_s());
        assert_eq!(q_bilinear(&e(0)), s);
        for i in 1..8 {
            let f = Octave::basis_f(i);
            // Q(a)' = Q(conj a), so Q(f_i) is skew exactly when tr(f_i) = 0
            assert_eq!(q_bilinear(&f).is_skew_symmetric(), f.trace().is_zero());
        }
        // the two flavours differ by tr(a) S
        let a = IntegralOctave::new([1, 2, 0, -1, 1, 0, 3, 1]).to_octave();
        assert_eq!(&q_bilinear(&a) - &q_conjugated(&a), s.scale(&a.trace()));
    }

    #[test]
    fn hom_basics() {
        let s = octave_space();
        assert_eq!(even_hom_to_m8(&CliffordElement::one(&s)).unwrap(), RatMatrix::identity(8));
        let e01 = &CliffordElement::basis(&s, 0) * &CliffordElement::basis(&s, 1);
        assert_eq!(even_hom_to_m8(&e01).unwrap(), p_matrix(&e(1)));
        assert_eq!(even_hom_to_m8(&CliffordElement::basis(&s, 1)), Err(EmbeddingError::NotEven));
        assert_eq!(even_hom_to_m8(&e0_times(&e(3))).unwrap(), p_matrix(&e(3)));
    }

    #[test]
    fn spi_relations() {
        let imgs = spi_images();
        let g = gram_v();
        for i in 0..12 {
            for j in 0..12 {
                let ac = &(&imgs[i] * &imgs[j]) + &(&imgs[j] * &imgs[i]);
                assert_eq!(ac, CliffordMatrix4::identity().scale(&g[(i, j)]), "pair {i} {j}");
            }
        }
        assert!((&imgs[0] * &imgs[0]) == CliffordMatrix4::zero());
        assert_eq!(&imgs[5] * &imgs[5], -&CliffordMatrix4::identity());
    }

    #[test]
    fn star_involution_examples() {
        let imgs = spi_images();
        assert_eq!(CliffordMatrix4::identity().star_involution(), CliffordMatrix4::identity());
        for x in imgs.iter() {
            assert_eq!(x.star_involution(), -x);
            assert_eq!(x.star_involution().star_involution(), *x);
        }
        // anti-automorphism on products of images
        let p = &imgs[0] * &imgs[6];
        assert_eq!(p.star_involution(), &imgs[6].star_involution() * &imgs[0].star_involution());
    }

    #[test]
    fn hermitian_symplectic_examples() {
        assert!(is_hermitian_symplectic(&CliffordMatrix4::identity()));
        let g = build_generator(&GeneratorSpec::TranslationLower { oct: IntegralOctave::basis(1) }).unwrap();
        assert!(is_hermitian_symplectic(g.inner()));
        let two = CliffordMatrix4::from_ints([[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]]);
        assert!(!is_hermitian_symplectic(&two));
    }

    #[test]
    fn spin_examples() {
        let id = is_spin(&CliffordMatrix4::identity());
        assert!(id.is_spin);
        assert_eq!(id.orthogonal.unwrap(), RatMatrix::identity(12));
        let h1 = is_spin(&spi_images()[0]);
        assert!(!h1.is_spin);
        assert!(h1.orthogonal.is_none());
        let lower = build_generator(&GeneratorSpec::TranslationLower { oct: IntegralOctave::basis(1) }).unwrap();
        let o = is_spin(lower.inner()).orthogonal.unwrap();
        assert!(o.is_integral());
    }

    #[test]
    fn printed_generators_fail() {
        assert!(!is_spin(&printed_generator(&GeneratorSpec::Inversion)).is_spin);
        let t = GeneratorSpec::TranslationUpper { h1: 1, h2: 0, oct: IntegralOctave::ZERO };
        assert!(!is_spin(&printed_generator(&t)).is_spin);
    }

    #[test]
    fn scaling_conjugation() {
        let id = CPlusMatrix4::identity();
        assert_eq!(conjugate_by_scaling(&id).unwrap(), id);
        let t =
            |h1| build_generator(&GeneratorSpec::TranslationUpper { h1, h2: 0, oct: IntegralOctave::ZERO }).unwrap();
        assert_eq!(conjugate_by_scaling(&t(2)).unwrap(), t(1));
        assert_eq!(conjugate_by_scaling(&conjugate_by_scaling(&t(4)).unwrap()).unwrap(), t(1));
        assert_eq!(conjugate_by_scaling(&t(1)), Err(EmbeddingError::NonIntegral));
    }

    #[test]
    fn integrality_uses_the_f_order() {
        let lower = build_generator(&GeneratorSpec::TranslationLower { oct: IntegralOctave::basis(4) }).unwrap();
        assert!(lower.inner().is_integral());
        assert!(!lower.inner().is_one_mod2().unwrap());
        let doubled =
            build_generator(&GeneratorSpec::TranslationLower { oct: IntegralOctave::basis(4).scale(2) }).unwrap();
        assert!(doubled.inner().is_one_mod2().unwrap());
        assert!(!CliffordMatrix4::identity().scale(&Rational::new(BigInt::one(), BigInt::from(2))).is_integral());
    }

    #[test]
    fn scaling_route_to_igusa_group() {
        for g in GeneratorSpec::standard_system().iter().skip(1) {
            let m = build_generator(&g.scaled(2)).unwrap();
            assert!(m.inner().is_one_mod2().unwrap(), "{g}");
            let c = conjugate_by_scaling(&m).unwrap();
            assert!(is_spin(c.inner()).is_spin);
            assert!(classify_level(&embed_j(&c).unwrap()).theta_group(), "{g}");
            assert!(classify_level(&embed_j(&m).unwrap()).igusa_24, "{g}");
        }
        // the conjugate of a doubled upper translation is the plain one, which
        // lies in the theta group but not in the Igusa group
        let t = GeneratorSpec::TranslationUpper { h1: 1, h2: 0, oct: IntegralOctave::ZERO };
        let c = conjugate_by_scaling(&build_generator(&t.scaled(2)).unwrap()).unwrap();
        assert!(!classify_level(&embed_j(&c).unwrap()).igusa_24);
    }

    #[test]
    fn image_lattice_membership() {
        let set = product_spanning_set();
        assert_eq!(set.len(), 128);
        assert_eq!(set[0], RatMatrix::identity(8));
        assert!(in_product_lattice(&p_matrix(&Octave::basis_f(5))));
        assert!(in_product_lattice(&(&p_matrix(&Octave::basis_f(0)) * &p_matrix(&Octave::basis_f(6)))));
        assert!(!in_product_lattice(&RatMatrix::identity(8).scale(&Rational::new(BigInt::one(), BigInt::from(2)))));
    }

    #[test]
    fn level_classification() {
        let id = classify_level(&RatMatrix::identity(32));
        assert!(id.integral_symplectic && id.igusa_12 && id.igusa_24);
        assert_eq!(id.principal_level, 4);
        // (1 B; 0 1) with B = diag(1, 0): symplectic, AB' has an odd diagonal
        let mut m = RatMatrix::identity(4);
        m[(0, 2)] = int(1);
        let r = classify_level(&m);
        assert!(r.integral_symplectic);
        assert!(!r.igusa_12);
        assert_eq!(r.principal_level, 1);
        let lower = GeneratorSpec::TranslationLower { oct: IntegralOctave::basis(1) };
        assert!(classify_level(&generator_image(&lower).unwrap()).igusa_12);
        let mut bad = RatMatrix::identity(4);
        bad[(0, 0)] = int(2);
        assert!(!classify_level(&bad).integral_symplectic);
    }

    #[test]
    fn identity_images() {
        let id = CPlusMatrix4::identity();
        assert_eq!(embed_j(&id).unwrap(), RatMatrix::identity(32));
        assert_eq!(embed_j0(&id), RatMatrix::identity(32));
    }

    #[test]
    fn j_point_examples() {
        let i = Complex64::new(0.0, 1.0);
        let z = OrthPoint::new(i, i, ComplexOctave::zero());
        let m = j_point(&z).unwrap();
        assert!((m - m.transpose()).norm() < 1e-15);
        for r in 0..8 {
            for c in 8..16 {
                assert_eq!(m[(r, c)], Complex64::new(0.0, 0.0));
            }
        }
        let mut im = [0.0; 8];
        im[0] = 1.0;
        let boundary = OrthPoint::new(i, i, ComplexOctave::from_parts([0.0; 8], im));
        assert!(!boundary.in_tube_domain());
        assert_eq!(j_point(&boundary).err(), Some(EmbeddingError::NotPositiveDefinite));
    }

    #[test]
    fn orth_action_identity_and_inversion() {
        let z = OrthPoint::new(
            Complex64::new(0.3, 1.2),
            Complex64::new(-0.1, 0.9),
            ComplexOctave::from_parts(
                [0.1, 0.0, 0.2, 0.0, 0.0, -0.1, 0.0, 0.0],
                [0.05, 0.1, 0.0, 0.0, 0.0, 0.0, 0.1, 0.0],
            ),
        );
        let (w, t) = orth_action(&RatMatrix::identity(12), &z).unwrap();
        assert_eq!(t, Complex64::new(1.0, 0.0));
        assert!((w.z1 - z.z1).norm() < 1e-15);
        let o = generator_orthogonal(&GeneratorSpec::Inversion).unwrap();
        let (w, t) = orth_action(&o, &z).unwrap();
        // inversion swaps the hyperbolic data: z1' = z2 / *, z2' = z1 / *
        let star = z.star();
        assert!((w.z1 - z.z2 / star).norm() < 1e-12);
        assert!((w.z2 - z.z1 / star).norm() < 1e-12);
        assert!((t + star).norm() < 1e-12);
        let v = w.projective_vector();
        let g = gram_v().to_f64();
        let q: Complex64 = (0..12).flat_map(|r| (0..12).map(move |c| (r, c))).map(|(r, c)| v[r] * v[c] * g[r][c]).sum();
        assert!(q.norm() < 1e-12);
    }
}
