//! Clifford algebras of small integral quadratic spaces.
//!
//! Elements are sparse maps from ascending-index monomials (bitmasks) to exact
//! rational coefficients. The defining relation is `ab + ba = (a, b)`, so a
//! basis vector squares to `(e_i, e_i) / 2`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::RatMatrix;
use crate::octonion::Rational;

pub const MAX_RANK: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliffordError {
    #[error("elements live over different quadratic spaces")]
    SpaceMismatch,
    #[error("coefficient {0} is not integral")]
    NonIntegral(String),
    #[error("gram matrix must be square and symmetric of rank at most {MAX_RANK}")]
    BadGram,
    #[error("vector has {got} coordinates, the space has rank {rank}")]
    BadLength { got: usize, rank: usize },
    #[error("lattice basis is not a basis of the space")]
    DegenerateBasis,
}

/// A lattice of rank at most 12 with a symmetric integer Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramSpace {
    rank: usize,
    gram: Vec<Vec<i64>>,
    diagonal: bool,
}

impl GramSpace {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Arc<Self>, CliffordError> {
        let rank = gram.len();
        if rank > MAX_RANK || gram.iter().any(|row| row.len() != rank) {
            return Err(CliffordError::BadGram);
        }
        for i in 0..rank {
            for j in 0..rank {
                if gram[i][j] != gram[j][i] {
                    return Err(CliffordError::BadGram);
                }
            }
        }
        let diagonal = (0..rank).all(|i| (0..rank).all(|j| i == j || gram[i][j] == 0));
        Ok(Arc::new(GramSpace { rank, gram, diagonal }))
    }

    /// The negative octave space: rank 8, Gram `-2 * identity`.
    pub fn negative_octave() -> Arc<Self> {
        static SPACE: OnceLock<Arc<GramSpace>> = OnceLock::new();
        SPACE
            .get_or_init(|| {
                let gram = (0..8).map(|i| (0..8).map(|j| if i == j { -2 } else { 0 }).collect()).collect();
                GramSpace::new(gram).unwrap()
            })
            .clone()
    }

    /// Two hyperbolic planes plus the negative octave space (signature (2,10)).
    pub fn signature_2_10() -> Arc<Self> {
        let mut gram = vec![vec![0i64; 12]; 12];
        gram[0][1] = 1;
        gram[1][0] = 1;
        gram[2][3] = 1;
        gram[3][2] = 1;
        for i in 4..12 {
            gram[i][i] = -2;
        }
        GramSpace::new(gram).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// `q(e_i) = (e_i, e_i) / 2`.
    fn square(&self, i: usize) -> Rational {
        Rational::new(BigInt::from(self.gram[i][i]), BigInt::from(2))
    }
}

/// Linear combination of monomials; `u16` keys hold ascending index sets.
type Terms = BTreeMap<u16, Rational>;

#[derive(Clone, PartialEq, Eq)]
pub struct CliffordElement {
    space: Arc<GramSpace>,
    terms: Terms,
}

impl fmt::Debug for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if *m == 0 {
                    c.to_string()
                } else {
                    let idx: Vec<String> = (0..16).filter(|i| m >> i & 1 == 1).map(|i| format!("e{i}")).collect();
                    format!("{}*{}", c, idx.join(""))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn insert(terms: &mut Terms, mask: u16, c: Rational) {
    if c.is_zero() {
        return;
    }
    match terms.entry(mask) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl CliffordElement {
    pub fn zero(space: &Arc<GramSpace>) -> Self {
        CliffordElement { space: space.clone(), terms: Terms::new() }
    }

    pub fn scalar(space: &Arc<GramSpace>, c: Rational) -> Self {
        let mut terms = Terms::new();
        insert(&mut terms, 0, c);
        CliffordElement { space: space.clone(), terms }
    }

    pub fn one(space: &Arc<GramSpace>) -> Self {
        Self::scalar(space, Rational::one())
    }

    pub fn from_int(space: &Arc<GramSpace>, c: i64) -> Self {
        Self::scalar(space, Rational::from_integer(BigInt::from(c)))
    }

    /// The monomial `e_{i1} ... e_{ik}` for the indices set in `mask`, times `c`.
    pub fn monomial(space: &Arc<GramSpace>, mask: u16, c: Rational) -> Self {
        debug_assert!((mask as u32) < (1u32 << space.rank));
        let mut terms = Terms::new();
        insert(&mut terms, mask, c);
        CliffordElement { space: space.clone(), terms }
    }

    pub fn basis(space: &Arc<GramSpace>, i: usize) -> Self {
        Self::monomial(space, 1 << i, Rational::one())
    }

    /// The grade-one element with the given coordinates.
    pub fn embed_vector(space: &Arc<GramSpace>, v: &[Rational]) -> Result<Self, CliffordError> {
        if v.len() != space.rank {
            return Err(CliffordError::BadLength { got: v.len(), rank: space.rank });
        }
        let mut terms = Terms::new();
        for (i, c) in v.iter().enumerate() {
            insert(&mut terms, 1 << i, c.clone());
        }
        Ok(CliffordElement { space: space.clone(), terms })
    }

    pub fn space(&self) -> &Arc<GramSpace> {
        &self.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (u16, &Rational)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coefficient(&self, mask: u16) -> Rational {
        self.terms.get(&mask).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 0)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut terms = Terms::new();
        for (m, v) in &self.terms {
            insert(&mut terms, *m, v * c);
        }
        CliffordElement { space: self.space.clone(), terms }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&Rational::from_integer(BigInt::from(c)))
    }

    fn same_space(&self, other: &Self) -> Result<(), CliffordError> {
        if Arc::ptr_eq(&self.space, &other.space) || self.space == other.space {
            Ok(())
        } else {
            Err(CliffordError::SpaceMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, CliffordError> {
        self.same_space(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            insert(&mut terms, *m, c.clone());
        }
        Ok(CliffordElement { space: self.space.clone(), terms })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, CliffordError> {
        self.same_space(other)?;
        let mut terms = Terms::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let coeff = ca * cb;
                for (m, c) in monomial_product(&self.space, *ma, *mb) {
                    insert(&mut terms, m, &coeff * c);
                }
            }
        }
        Ok(CliffordElement { space: self.space.clone(), terms })
    }

    /// The main involution: reverses products and negates vectors.
    pub fn involution(&self) -> Self {
        if self.space.diagonal {
            let mut terms = Terms::new();
            for (m, c) in &self.terms {
                let k = m.count_ones();
                // (-1)^k * (-1)^{k(k-1)/2}
                let flips = k + k * k.saturating_sub(1) / 2;
                insert(&mut terms, *m, if flips % 2 == 0 { c.clone() } else { -c.clone() });
            }
            return CliffordElement { space: self.space.clone(), terms };
        }
        // With off-diagonal Gram entries the reversed word has to be reordered.
        let mut out = CliffordElement::zero(&self.space);
        for (m, c) in &self.terms {
            let k = m.count_ones();
            let c = if k % 2 == 0 { c.clone() } else { -c.clone() };
            let mut acc = CliffordElement::scalar(&self.space, c);
            for i in (0..self.space.rank).rev().filter(|i| m >> i & 1 == 1) {
                acc = &acc * &CliffordElement::basis(&self.space, i);
            }
            out = &out + &acc;
        }
        out
    }

    /// The homogeneous component of grade `k`.
    pub fn grade(&self, k: u32) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| m.count_ones() == k).map(|(m, c)| (*m, c.clone())).collect();
        CliffordElement { space: self.space.clone(), terms }
    }

    /// True iff `self - 1` has only even coefficients.
    pub fn is_one_mod2(&self) -> Result<bool, CliffordError> {
        let two = BigInt::from(2);
        let mut ok = true;
        let mut saw_scalar = false;
        for (m, c) in &self.terms {
            if !c.is_integer() {
                return Err(CliffordError::NonIntegral(c.to_string()));
            }
            let mut v = c.to_integer();
            if *m == 0 {
                saw_scalar = true;
                v -= 1;
            }
            if !v.is_multiple_of(&two) {
                ok = false;
            }
        }
        Ok(ok && saw_scalar)
    }
}

/// Product of two sorted monomials as a combination of sorted monomials.
fn monomial_product(space: &GramSpace, a: u16, b: u16) -> Vec<(u16, Rational)> {
    if space.diagonal {
        return vec![diagonal_product(space, a, b)];
    }
    // Multiply `a` by the generators of `b` one at a time, left to right.
    let mut acc: Vec<(u16, Rational)> = vec![(a, Rational::one())];
    for k in (0..space.rank).filter(|k| b >> k & 1 == 1) {
        let mut next: Terms = Terms::new();
        for (m, c) in acc {
            for (m2, c2) in right_mul_generator(space, m, k) {
                insert(&mut next, m2, &c * c2);
            }
        }
        acc = next.into_iter().collect();
    }
    acc
}

fn diagonal_product(space: &GramSpace, a: u16, b: u16) -> (u16, Rational) {
    // Sign of moving each generator of b leftwards past the larger
    // generators of a.
    let mut swaps = 0u32;
    for k in 0..space.rank {
        if b >> k & 1 == 1 {
            swaps += (a >> (k + 1)).count_ones();
        }
    }
    let mut c = if swaps.is_multiple_of(2) { Rational::one() } else { -Rational::one() };
    let common = a & b;
    for i in 0..space.rank {
        if common >> i & 1 == 1 {
            c *= space.square(i);
        }
    }
    (a ^ b, c)
}

/// `e_m * e_k` for a sorted monomial `m`, using `e_j e_k = -e_k e_j + (e_j, e_k)`.
fn right_mul_generator(space: &GramSpace, m: u16, k: usize) -> Vec<(u16, Rational)> {
    if m == 0 {
        return vec![(1 << k, Rational::one())];
    }
    let top = 15 - m.leading_zeros() as usize;
    let prefix = m & !(1 << top);
    if top < k {
        return vec![(m | (1 << k), Rational::one())];
    }
    if top == k {
        return vec![(prefix, space.square(k))];
    }
    // prefix * e_top * e_k = -(prefix * e_k) * e_top + (e_top, e_k) prefix
    let mut out = Terms::new();
    for (m2, c2) in right_mul_generator(space, prefix, k) {
        // every index in m2 is below `top`, so appending e_top is free
        insert(&mut out, m2 | (1 << top), -c2);
    }
    let b = space.gram[top][k];
    if b != 0 {
        insert(&mut out, prefix, Rational::from_integer(BigInt::from(b)));
    }
    out.into_iter().collect()
}

impl Mul for &CliffordElement {
    type Output = CliffordElement;

    /// Panics when the operands live over different spaces; use
    /// [`CliffordElement::try_mul`] to handle that case.
    fn mul(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_mul(rhs).expect("clifford product over mismatched spaces")
    }
}

impl Add for &CliffordElement {
    type Output = CliffordElement;
    fn add(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_add(rhs).expect("clifford sum over mismatched spaces")
    }
}

impl Sub for &CliffordElement {
    type Output = CliffordElement;
    fn sub(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_add(&-rhs).expect("clifford difference over mismatched spaces")
    }
}

impl Neg for &CliffordElement {
    type Output = CliffordElement;
    fn neg(self) -> CliffordElement {
        let terms = self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect();
        CliffordElement { space: self.space.clone(), terms }
    }
}

/// The order spanned by the ordered monomials `b_i1 ... b_ik` in a lattice
/// basis `b`, with coordinates relative to those monomials.
#[derive(Clone, Debug)]
pub struct CliffordLattice {
    space: Arc<GramSpace>,
    /// Maps standard monomial coordinates to lattice monomial coordinates.
    to_lattice: RatMatrix,
}

impl CliffordLattice {
    pub fn new(space: &Arc<GramSpace>, basis: &[Vec<Rational>]) -> Result<Self, CliffordError> {
        let n = space.rank();
        if basis.len() != n {
            return Err(CliffordError::BadLength { got: basis.len(), rank: n });
        }
        let vectors = basis.iter().map(|b| CliffordElement::embed_vector(space, b)).collect::<Result<Vec<_>, _>>()?;
        let dim = 1usize << n;
        let mut m = RatMatrix::zeros(dim, dim);
        for mask in 0..dim {
            let mono =
                (0..n).filter(|i| mask >> i & 1 == 1).fold(CliffordElement::one(space), |acc, i| &acc * &vectors[i]);
            for (k, c) in mono.terms() {
                m[(k as usize, mask)] = c.clone();
            }
        }
        let to_lattice = m.inverse().ok_or(CliffordError::DegenerateBasis)?;
        Ok(CliffordLattice { space: space.clone(), to_lattice })
    }

    pub fn coordinates(&self, x: &CliffordElement) -> Result<Vec<Rational>, CliffordError> {
        if !Arc::ptr_eq(&self.space, &x.space) && *self.space != *x.space {
            return Err(CliffordError::SpaceMismatch);
        }
        let dim = 1usize << self.space.rank();
        let mut out = vec![Rational::zero(); dim];
        for (k, c) in x.terms() {
            for (r, o) in out.iter_mut().enumerate() {
                let t = &self.to_lattice[(r, k as usize)];
                if !t.is_zero() {
                    *o += t * c;
                }
            }
        }
        Ok(out)
    }

    pub fn contains(&self, x: &CliffordElement) -> bool {
        self.coordinates(x).is_ok_and(|c| c.iter().all(Rational::is_integer))
    }

    /// Whether `x - 1` lies in twice the order.
    pub fn is_one_mod2(&self, x: &CliffordElement) -> Result<bool, CliffordError> {
        let diff = x - &CliffordElement::one(&x.space);
        let two = BigInt::from(2);
        let mut ok = true;
        for c in self.coordinates(&diff)? {
            if !c.is_integer() {
                return Err(CliffordError::NonIntegral(c.to_string()));
            }
            ok &= c.to_integer().is_multiple_of(&two);
        }
        Ok(ok)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oct() -> Arc<GramSpace> {
        GramSpace::negative_octave()
    }

    fn int(c: i64) -> Rational {
        Rational::from_integer(BigInt::from(c))
    }

    #[test]
    fn basis_squares_and_anticommutes() {
        let s = oct();
        let e1 = CliffordElement::basis(&s, 1);
        let e2 = CliffordElement::basis(&s, 2);
        assert_eq!(&e1 * &e1, CliffordElement::from_int(&s, -1));
        assert!((&(&e1 * &e2) + &(&e2 * &e1)).is_zero());
        let e12 = &e1 * &e2;
        assert_eq!(&e12 * &e12, CliffordElement::from_int(&s, -1));
    }

    #[test]
    fn involution_examples() {
        let s = oct();
        let e1 = CliffordElement::basis(&s, 1);
        let e2 = CliffordElement::basis(&s, 2);
        let e12 = &e1 * &e2;
        assert_eq!(e12.involution(), &e2 * &e1);
        assert_eq!(e12.involution(), -&e12);
        let c = CliffordElement::from_int(&s, 5);
        assert_eq!(c.involution(), c);
        let x = &(&e12 + &e1) + &CliffordElement::from_int(&s, 3);
        assert_eq!(x.involution().involution(), x);
    }

    #[test]
    fn grades() {
        let s = oct();
        let e12 = &CliffordElement::basis(&s, 1) * &CliffordElement::basis(&s, 2);
        let x = &CliffordElement::from_int(&s, 3) + &e12;
        assert_eq!(x.grade(0), CliffordElement::from_int(&s, 3));
        assert_eq!(x.grade(2), e12);
        assert!(x.grade(1).is_zero());
    }

    #[test]
    fn one_mod_two() {
        let s = oct();
        let e12 = &CliffordElement::basis(&s, 1) * &CliffordElement::basis(&s, 2);
        let one = CliffordElement::one(&s);
        assert!((&one + &e12.scale_int(2)).is_one_mod2().unwrap());
        assert!(!e12.is_one_mod2().unwrap());
        assert!(!(&one + &e12).is_one_mod2().unwrap());
        let half = e12.scale(&Rational::new(BigInt::from(1), BigInt::from(2)));
        assert!(matches!(half.is_one_mod2(), Err(CliffordError::NonIntegral(_))));
    }

    #[test]
    fn embedded_vectors() {
        let s = oct();
        let v: Vec<Rational> = [1, 0, 2, 0, 0, -1, 0, 3].map(int).to_vec();
        let x = CliffordElement::embed_vector(&s, &v).unwrap();
        // q(v) = -(1 + 4 + 1 + 9)
        assert_eq!(&x * &x, CliffordElement::from_int(&s, -15));
        assert_eq!(x.involution(), -&x);
        let unit: Vec<Rational> = (0..8).map(|i| int(if i == 3 { 1 } else { 0 })).collect();
        assert_eq!(CliffordElement::embed_vector(&s, &unit).unwrap(), CliffordElement::basis(&s, 3));
        assert!(CliffordElement::embed_vector(&s, &unit[..4]).is_err());
    }

    #[test]
    fn mismatched_spaces_error() {
        let a = CliffordElement::basis(&oct(), 0);
        let b = CliffordElement::basis(&GramSpace::signature_2_10(), 0);
        assert_eq!(a.try_mul(&b), Err(CliffordError::SpaceMismatch));
    }

    #[test]
    fn hyperbolic_relations() {
        let s = GramSpace::signature_2_10();
        let h1 = CliffordElement::basis(&s, 0);
        let h2 = CliffordElement::basis(&s, 1);
        assert!((&h1 * &h1).is_zero());
        assert_eq!(&(&h1 * &h2) + &(&h2 * &h1), CliffordElement::one(&s));
        // (h1 h2)' = h2 h1
        assert_eq!((&h1 * &h2).involution(), &h2 * &h1);
    }

    #[test]
    fn even_subalgebra_dimension() {
        let s = oct();
        let evens: Vec<u16> = (0u16..256).filter(|m| m.count_ones() % 2 == 0).collect();
        assert_eq!(evens.len(), 128);
        for &a in &evens {
            for &b in &evens {
                let p = &CliffordElement::monomial(&s, a, Rational::one())
                    * &CliffordElement::monomial(&s, b, Rational::one());
                assert!(p.is_even());
                assert_eq!(p.terms().count(), 1);
            }
        }
    }

    #[test]
    fn lattice_coordinates() {
        let s = GramSpace::negative_octave();
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let std_basis: Vec<Vec<Rational>> =
            (0..8).map(|i| (0..8).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
        let lat = CliffordLattice::new(&s, &std_basis).unwrap();
        let x = &CliffordElement::basis(&s, 1) * &CliffordElement::basis(&s, 2);
        let c = lat.coordinates(&x).unwrap();
        assert_eq!(c[0b110], Rational::one());
        assert_eq!(c.iter().filter(|v| !v.is_zero()).count(), 1);
        assert!(!lat.contains(&x.scale(&half)));
        // b0 = (e0 + e1)/2 is a lattice vector but not a standard one
        let mut basis = std_basis.clone();
        basis[0] = vec![
            half.clone(),
            half.clone(),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
        ];
        let lat = CliffordLattice::new(&s, &basis).unwrap();
        let b0 = CliffordElement::embed_vector(&s, &basis[0]).unwrap();
        assert!(lat.contains(&b0));
        assert!(lat.contains(&(&b0 * &CliffordElement::basis(&s, 3))));
        assert!(lat.contains(&CliffordElement::basis(&s, 0)));
        assert!(!lat.contains(&CliffordElement::basis(&s, 1).scale(&half)));
        assert!(lat.is_one_mod2(&(&CliffordElement::one(&s) + &b0.scale_int(2))).unwrap());
        assert!(!lat.is_one_mod2(&b0).unwrap());
        basis[1] = basis[0].clone();
        assert_eq!(CliffordLattice::new(&s, &basis).unwrap_err(), CliffordError::DegenerateBasis);
    }
}
