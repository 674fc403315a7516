//! Dense exact-rational matrices.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::octonion::Rational;

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn from_ints<const R: usize, const C: usize>(m: &[[i64; C]; R]) -> Self {
        Self::from_fn(R, C, |r, c| Rational::from_integer(BigInt::from(m[r][c])))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|v| v.is_integer())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|r| (0..r).all(|c| self[(r, c)] == self[(c, r)]))
    }

    pub fn is_skew_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|r| (0..=r).all(|c| self[(r, c)] == -self[(c, r)].clone()))
    }

    /// Copy of the block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &RatMatrix) {
        for r in 0..b.rows {
            for c in 0..b.cols {
                self[(r0 + r, c0 + c)] = b[(r, c)].clone();
            }
        }
    }

    /// Integer entries, if all entries are integral and fit in `i64`.
    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| {
                        let v = &self[(r, c)];
                        if v.is_integer() {
                            v.to_integer().to_i64()
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self[(r, c)].to_f64().unwrap_or(f64::NAN)).collect()).collect()
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..self.cols {
                    self.data.swap(p * self.cols + c, row * self.cols + c);
                }
            }
            let inv = self[(row, col)].recip();
            for c in col..self.cols {
                self[(row, c)] = &self[(row, c)] * &inv;
            }
            for r in 0..self.rows {
                if r == row || self[(r, col)].is_zero() {
                    continue;
                }
                let m = self[(r, col)].clone();
                for c in col..self.cols {
                    let t = &m * &self[(row, c)];
                    self[(r, c)] -= t;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &Self::identity(n));
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(aug.block(0, n, n, n))
    }

    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
                return Rational::zero();
            };
            if p != col {
                for c in 0..n {
                    a.data.swap(p * n + c, col * n + c);
                }
                det = -det;
            }
            let piv = a[(col, col)].clone();
            det *= &piv;
            for r in (col + 1)..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let m = &a[(r, col)] / &piv;
                for c in col..n {
                    let t = &m * &a[(col, c)];
                    a[(r, c)] -= t;
                }
            }
        }
        det
    }

    /// Solves `self * x = rhs` for a single column `rhs`; `None` when the
    /// system is inconsistent. Free variables are set to zero.
    pub fn solve(&self, rhs: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        aug.set_block(0, 0, self);
        for (r, v) in rhs.iter().enumerate() {
            aug[(r, self.cols)] = v.clone();
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    pub fn max_abs(&self) -> Rational {
        self.data.iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = &rhs[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;
    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;
    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| -v.clone()).collect() }
    }
}

/// A sublattice of `Q^n` given by rational generators, kept as an echelon
/// basis of its integer multiple `scale * L`.
#[derive(Clone, Debug)]
pub struct IntegerLattice {
    dim: usize,
    scale: BigInt,
    /// Rows keyed by their leading column.
    rows: BTreeMap<usize, Vec<BigInt>>,
}

fn leading(v: &[BigInt]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

impl IntegerLattice {
    pub fn new(dim: usize, generators: &[Vec<Rational>]) -> Self {
        let scale = generators.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut lattice = IntegerLattice { dim, scale, rows: BTreeMap::new() };
        for g in generators {
            assert_eq!(g.len(), dim, "generator length");
            let v = lattice.scaled(g).expect("generators are integral after scaling");
            lattice.insert(v);
        }
        lattice
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn scaled(&self, v: &[Rational]) -> Option<Vec<BigInt>> {
        v.iter()
            .map(|x| {
                let y = x * Rational::from_integer(self.scale.clone());
                y.is_integer().then(|| y.to_integer())
            })
            .collect()
    }

    fn insert(&mut self, mut v: Vec<BigInt>) {
        while let Some(c) = leading(&v) {
            let Some(b) = self.rows.remove(&c) else {
                self.rows.insert(c, v);
                return;
            };
            // replace (b, v) by (gcd row, row with a zero at c)
            let eg = b[c].extended_gcd(&v[c]);
            let (bc, vc) = (&b[c] / &eg.gcd, &v[c] / &eg.gcd);
            let g_row: Vec<BigInt> = b.iter().zip(&v).map(|(x, y)| &eg.x * x + &eg.y * y).collect();
            let rest: Vec<BigInt> = b.iter().zip(&v).map(|(x, y)| &bc * y - &vc * x).collect();
            self.rows.insert(c, g_row);
            v = rest;
        }
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length");
        let Some(mut v) = self.scaled(v) else {
            return false;
        };
        while let Some(c) = leading(&v) {
            let Some(b) = self.rows.get(&c) else {
                return false;
            };
            if !v[c].is_multiple_of(&b[c]) {
                return false;
            }
            let q = &v[c] / &b[c];
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= &q * y);
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_determinant() {
        let m = RatMatrix::from_ints(&[[2, 1, 0], [1, 3, 1], [0, 1, 4]]);
        assert_eq!(m.determinant(), Rational::from_integer(BigInt::from(18)));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, RatMatrix::identity(3));
        let singular = RatMatrix::from_ints(&[[1, 2], [2, 4]]);
        assert!(singular.inverse().is_none());
        assert_eq!(singular.rank(), 1);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = RatMatrix::from_ints(&[[1, 0], [0, 1], [1, 1]]);
        let rhs: Vec<Rational> = [2, 3, 5].iter().map(|&v| Rational::from_integer(BigInt::from(v))).collect();
        let x = m.solve(&rhs).unwrap();
        assert_eq!(x, rhs[..2].to_vec());
        let bad: Vec<Rational> = [2, 3, 6].iter().map(|&v| Rational::from_integer(BigInt::from(v))).collect();
        assert!(m.solve(&bad).is_none());
    }
}
