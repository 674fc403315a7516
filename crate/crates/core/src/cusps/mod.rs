//! Level-two cusps, their Hermitian representatives, and the cusp-value
//! matrix of the second-kind theta series.
//!
//! Row `i` of the matrix belongs to `enumerate_cusp_r()[i]`; column `a` is the
//! delta characteristic whose low byte holds the f-coordinates of `h1` mod 2
//! and whose high byte holds those of `h2`.

mod gauss;
mod octt;

pub use gauss::{
    cusp_value_general, cyclotomic_polynomial, CuspValue, CuspValueError, Cyclotomic, GaussInt, RationalHermitian,
    Section,
};
pub use octt::{
    decode_octt, encode_octt, read_octt_file, write_octt, write_octt_file, OcttError, OCTT_MAGIC, OCTT_VERSION,
};

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::octonion::{gram_s, IntegralOctave};

/// Number of delta characteristics (columns).
pub const N_CHARACTERISTICS: usize = 1 << 16;
/// Byte marking a vanishing entry.
pub const ZERO_ENTRY: u8 = 255;

/// `a b + c d + N(x) mod 2` for `v = (a, b, c, d, x0..x7)` packed as bits 0..11.
pub fn mod2_form(v: u16) -> u8 {
    let bit = |k: u32| (v >> k) & 1;
    let hyperbolic = bit(0) * bit(1) + bit(2) * bit(3);
    let x = IntegralOctave::from_bits((v >> 4) as u8);
    ((hyperbolic as i64 + x.norm()) & 1) as u8
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IsotropicClass {
    pub v: u16,
}

/// All nonzero isotropic vectors of the quadratic form mod 2, in increasing order.
pub fn enumerate_isotropic() -> Vec<IsotropicClass> {
    (1u16..1 << 12).filter(|&v| mod2_form(v) == 0).map(|v| IsotropicClass { v }).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryType {
    ZeroTwo,
    ZeroOne,
}

/// `R = (r1, r; conj(r), r2)` with entries from {0, 2} or {0, 1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HermitianR {
    pub r1: i64,
    pub r2: i64,
    pub r: IntegralOctave,
    pub entry_type: EntryType,
}

impl HermitianR {
    /// Pattern bits: bit 0 -> r1, bit 1 -> r2, bits 2..9 -> f-coordinates of r.
    pub fn from_pattern(m: u16, entry_type: EntryType) -> Self {
        let unit = match entry_type {
            EntryType::ZeroTwo => 2,
            EntryType::ZeroOne => 1,
        };
        HermitianR {
            r1: unit * (m & 1) as i64,
            r2: unit * ((m >> 1) & 1) as i64,
            r: IntegralOctave::from_bits((m >> 2) as u8).scale(unit),
            entry_type,
        }
    }

    pub fn zero() -> Self {
        Self::from_pattern(0, EntryType::ZeroTwo)
    }

    pub fn is_zero(&self) -> bool {
        self.r1 == 0 && self.r2 == 0 && self.r.is_zero()
    }
}

/// The 1024 {0,2} matrices followed by the 1023 nonzero {0,1} matrices.
pub fn enumerate_cusp_r() -> Vec<HermitianR> {
    let two = (0u16..1024).map(|m| HermitianR::from_pattern(m, EntryType::ZeroTwo));
    let one = (1u16..1024).map(|m| HermitianR::from_pattern(m, EntryType::ZeroOne));
    two.chain(one).collect()
}

/// Isotropic classes not covered by the Hermitian representatives.
pub fn cusp_class_discrepancy() -> usize {
    enumerate_isotropic().len() - enumerate_cusp_r().len()
}

/// `R[g] = r1 N(h1) + r2 N(h2) + tr(conj(h1) r h2)`.
pub fn r_bracket(r: &HermitianR, h1: &IntegralOctave, h2: &IntegralOctave) -> i64 {
    r.r1 * h1.norm() + r.r2 * h2.norm() + h1.pairing(&(r.r * *h2))
}

/// Whether `R g = (r1 h1 + r h2, conj(r) h1 + r2 h2)` lies in `2 O(Z)^2`.
pub fn rg_even(r: &HermitianR, g: &(IntegralOctave, IntegralOctave)) -> bool {
    let (h1, h2) = g;
    let top = h1.scale(r.r1) + r.r * *h2;
    let bottom = r.r.conj() * *h1 + h2.scale(r.r2);
    top.is_even() && bottom.is_even()
}

/// Splits a characteristic into its `{0,1}` lift `(h1, h2)`.
pub fn lift_characteristic(a: u16) -> (IntegralOctave, IntegralOctave) {
    (IntegralOctave::from_bits(a as u8), IntegralOctave::from_bits((a >> 8) as u8))
}

/// `R[a] mod 4` when `R a` is even, otherwise [`ZERO_ENTRY`].
pub fn numerator_entry(r: &HermitianR, a: u16) -> u8 {
    let g = lift_characteristic(a);
    if !rg_even(r, &g) {
        return ZERO_ENTRY;
    }
    r_bracket(r, &g.0, &g.1).rem_euclid(4) as u8
}

/// `sum over g mod 2 of (-1)^R[g]`, with the `{0,1}` lift.
pub fn denominator_sum(r: &HermitianR) -> i64 {
    (0..=u16::MAX)
        .map(|a| {
            let (h1, h2) = lift_characteristic(a);
            if r_bracket(r, &h1, &h2) & 1 == 0 {
                1
            } else {
                -1
            }
        })
        .sum()
}

fn norms_mod4() -> &'static [u8; 256] {
    static N: OnceLock<[u8; 256]> = OnceLock::new();
    N.get_or_init(|| std::array::from_fn(|h| IntegralOctave::from_bits(h as u8).norm().rem_euclid(4) as u8))
}

/// Per-row lookup tables over the 256 residues of each octave component.
struct RowTables {
    r1: i64,
    r2: i64,
    /// Parity of `r * h2`.
    top: [u8; 256],
    /// Parity of `conj(r) * h1`.
    bottom: [u8; 256],
    /// `S (r h2) mod 4`, indexed by `h2`.
    s_rh2: Vec<[u8; 8]>,
}

impl RowTables {
    fn new(r: &HermitianR) -> Self {
        let s = gram_s();
        let rc = r.r.conj();
        let mut top = [0u8; 256];
        let mut bottom = [0u8; 256];
        let mut s_rh2 = vec![[0u8; 8]; 256];
        for h in 0..256usize {
            let x = IntegralOctave::from_bits(h as u8);
            let y = r.r * x;
            top[h] = y.parity_bits();
            bottom[h] = (rc * x).parity_bits();
            for j in 0..8 {
                let v: i64 = (0..8).map(|k| s[j][k] * y.f[k]).sum();
                s_rh2[h][j] = v.rem_euclid(4) as u8;
            }
        }
        RowTables { r1: r.r1, r2: r.r2, top, bottom, s_rh2 }
    }

    /// `tr(conj(h1) r h2) mod 4` for all `h1`, at fixed `h2`.
    fn pair_table(&self, h2: usize) -> [u8; 256] {
        let sy = &self.s_rh2[h2];
        let mut p = [0u8; 256];
        for h1 in 1..256usize {
            let low = h1.trailing_zeros() as usize;
            p[h1] = (p[h1 & (h1 - 1)] + sy[low]) & 3;
        }
        p
    }

    fn bracket(&self, h1: usize, h2: usize, pair: &[u8; 256]) -> u8 {
        let n = norms_mod4();
        ((self.r1 * n[h1] as i64 + self.r2 * n[h2] as i64 + pair[h1] as i64) & 3) as u8
    }

    fn is_even(&self, h1: usize, h2: usize) -> bool {
        let top = if self.r1 & 1 == 1 { h1 as u8 } else { 0 } ^ self.top[h2];
        let bottom = self.bottom[h1] ^ if self.r2 & 1 == 1 { h2 as u8 } else { 0 };
        top == 0 && bottom == 0
    }

    /// Fills one matrix row and returns the denominator.
    fn fill(&self, row: &mut [u8]) -> i64 {
        let mut den = 0i64;
        for h2 in 0..256usize {
            let pair = self.pair_table(h2);
            for h1 in 0..256usize {
                let b = self.bracket(h1, h2, &pair);
                den += if b & 1 == 0 { 1 } else { -1 };
                row[h1 | h2 << 8] = if self.is_even(h1, h2) { b } else { ZERO_ENTRY };
            }
        }
        den
    }
}

/// Byte matrix of cusp values plus one denominator per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major; `0..=3` is a power of `i`, [`ZERO_ENTRY`] is zero.
    pub entries: Vec<u8>,
    pub denominators: Vec<i64>,
}

impl CuspMatrix {
    pub fn row(&self, r: usize) -> &[u8] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.entries[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Submatrix on the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> CuspMatrix {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            entries.extend(cols.iter().map(|&c| self.get(r, c)));
        }
        CuspMatrix {
            rows: rows.len(),
            cols: cols.len(),
            entries,
            denominators: rows.iter().map(|&r| self.denominators[r]).collect(),
        }
    }
}

/// Cusp-value matrix for the given rows, built in parallel; the output does
/// not depend on the thread count.
pub fn build_cusp_matrix_for(rows: &[HermitianR]) -> CuspMatrix {
    let cols = N_CHARACTERISTICS;
    let mut entries = vec![0u8; rows.len() * cols];
    let denominators: Vec<i64> =
        entries.par_chunks_mut(cols).zip(rows.par_iter()).map(|(row, r)| RowTables::new(r).fill(row)).collect();
    CuspMatrix { rows: rows.len(), cols, entries, denominators }
}

/// The full 2047 x 65536 matrix.
pub fn build_cusp_matrix() -> CuspMatrix {
    build_cusp_matrix_for(&enumerate_cusp_r())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(m: u16) -> HermitianR {
        HermitianR::from_pattern(m, EntryType::ZeroOne)
    }

    #[test]
    fn form_examples() {
        assert_eq!(mod2_form(0), 0);
        assert_eq!(mod2_form(0b11), 1);
        assert_eq!(mod2_form(0b1_0000_0011), 0);
        assert_eq!(mod2_form(0b1_0011), 0);
    }

    #[test]
    fn isotropic_counts() {
        let iso = enumerate_isotropic();
        assert_eq!(iso.len(), 2079);
        assert_eq!(iso.iter().filter(|c| c.v & 1 == 1).count(), 1024);
        assert_eq!(iso.len() + 1, (1 << 11) + (1 << 5));
    }

    #[test]
    fn cusp_r_enumeration() {
        let rs = enumerate_cusp_r();
        assert_eq!(rs.len(), 2047);
        assert_eq!(rs.iter().filter(|r| r.is_zero()).count(), 1);
        let mut seen = std::collections::HashSet::new();
        assert!(rs.iter().all(|r| seen.insert((r.r1, r.r2, r.r))));
        assert_eq!(cusp_class_discrepancy(), 32);
    }

    #[test]
    fn bracket_examples() {
        let f0 = IntegralOctave::basis(0);
        let z = IntegralOctave::ZERO;
        assert_eq!(r_bracket(&HermitianR::zero(), &f0, &f0), 0);
        let diag20 = HermitianR::from_pattern(1, EntryType::ZeroTwo);
        assert_eq!(r_bracket(&diag20, &f0, &z), 2);
        let rf0 = one(1 << 2);
        assert_eq!(r_bracket(&rf0, &f0, &f0), 2);
    }

    #[test]
    fn evenness_examples() {
        let f0 = IntegralOctave::basis(0);
        let g = (f0, IntegralOctave::basis(5));
        assert!(rg_even(&HermitianR::zero(), &g));
        assert!(rg_even(&HermitianR::from_pattern(3, EntryType::ZeroTwo), &g));
        assert!(!rg_even(&one(1 << 2), &(f0, IntegralOctave::ZERO)));
    }

    #[test]
    fn entry_examples() {
        let rs = enumerate_cusp_r();
        assert!(rs.iter().all(|r| numerator_entry(r, 0) == 0));
        assert!((0..=u16::MAX).step_by(97).all(|a| numerator_entry(&HermitianR::zero(), a) == 0));
        assert_eq!(numerator_entry(&HermitianR::from_pattern(1, EntryType::ZeroTwo), 1), 2);
    }

    #[test]
    fn denominator_examples() {
        assert_eq!(denominator_sum(&HermitianR::zero()), 65536);
        assert_eq!(denominator_sum(&HermitianR::from_pattern(3, EntryType::ZeroTwo)), 65536);
    }

    #[test]
    fn table_rows_match_direct_formula() {
        let rs = enumerate_cusp_r();
        let picks: Vec<HermitianR> = [0usize, 1, 5, 700, 1024, 1025, 1500, 2046].iter().map(|&i| rs[i]).collect();
        let m = build_cusp_matrix_for(&picks);
        for (i, r) in picks.iter().enumerate() {
            for a in (0..=u16::MAX).step_by(251) {
                assert_eq!(m.get(i, a as usize), numerator_entry(r, a), "row {i} col {a}");
            }
            assert_eq!(m.denominators[i], denominator_sum(r));
        }
    }
}
