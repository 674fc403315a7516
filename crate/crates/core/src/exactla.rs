//! Rank and span membership of the cusp matrix over prime fields, plus a
//! fraction-free rank over the Gaussian integers for small submatrices.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cusps::{CuspMatrix, GaussInt, ZERO_ENTRY};

pub const DEFAULT_PRIMES: [u64; 2] = [10009, 1000033];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactLaError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not 1 mod 4")]
    NotOneModFour(u64),
    #[error("{0} is too large (must be below 2^31)")]
    PrimeTooLarge(u64),
    #[error("invalid entry byte {0}")]
    BadEntry(u8),
    #[error("vector length {got} does not match {expected} rows")]
    LengthMismatch { got: usize, expected: usize },
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Z/p` with `p = 1 mod 4` and a fixed square root of `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    pub p: u64,
    /// The smaller of the two square roots of `-1`.
    pub sqrt_minus_one: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, ExactLaError> {
        if p >= 1 << 31 {
            return Err(ExactLaError::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(ExactLaError::NotPrime(p));
        }
        if p % 4 != 1 {
            return Err(ExactLaError::NotOneModFour(p));
        }
        let mut field = PrimeField { p, sqrt_minus_one: 0 };
        let root = (2..p)
            .map(|c| field.pow(c, (p - 1) / 4))
            .find(|&x| field.mul(x, x) == p - 1)
            .expect("a non-residue exists");
        field.sqrt_minus_one = root.min(p - root);
        Ok(field)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a) % self.p
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero");
        self.pow(a, self.p - 2)
    }

    /// Image of `i^k` for `k = byte`, with `255 -> 0`.
    pub fn entry(&self, byte: u8) -> Result<u64, ExactLaError> {
        let s = self.sqrt_minus_one;
        match byte {
            0 => Ok(1),
            1 => Ok(s),
            2 => Ok(self.p - 1),
            3 => Ok(self.p - s),
            ZERO_ENTRY => Ok(0),
            b => Err(ExactLaError::BadEntry(b)),
        }
    }

    fn entry_table(&self) -> [u32; 256] {
        let mut t = [0u32; 256];
        for b in [0u8, 1, 2, 3] {
            t[b as usize] = self.entry(b).unwrap() as u32;
        }
        t
    }

    /// Largest number of `(p-1)^2` products that fit in a `u64` accumulator.
    fn lazy_terms(&self) -> usize {
        let sq = (self.p - 1) * (self.p - 1);
        ((u64::MAX - self.p) / sq.max(1)).min(1 << 20) as usize
    }
}

pub fn entry_mod_p(byte: u8, field: &PrimeField) -> Result<u64, ExactLaError> {
    field.entry(byte)
}

/// Distinct columns of a byte matrix with their multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DedupedColumns {
    pub rows: usize,
    pub total_columns: usize,
    /// Column bytes of each distinct column, in order of first occurrence.
    pub columns: Vec<Vec<u8>>,
    pub first_index: Vec<usize>,
    pub multiplicity: Vec<usize>,
    /// For each original column, the index of its distinct column.
    pub assignment: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DedupeStats {
    pub total_columns: usize,
    pub distinct_columns: usize,
    pub max_multiplicity: usize,
}

impl DedupedColumns {
    pub fn stats(&self) -> DedupeStats {
        DedupeStats {
            total_columns: self.total_columns,
            distinct_columns: self.columns.len(),
            max_multiplicity: self.multiplicity.iter().copied().max().unwrap_or(0),
        }
    }

    /// Original row-major byte stream.
    pub fn restore(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.rows * self.total_columns];
        for (c, &d) in self.assignment.iter().enumerate() {
            for (r, &b) in self.columns[d as usize].iter().enumerate() {
                out[r * self.total_columns + c] = b;
            }
        }
        out
    }

    /// Distinct column indices by descending multiplicity, ties by first occurrence.
    pub fn processing_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.columns.len()).collect();
        order.sort_by_key(|&d| (std::cmp::Reverse(self.multiplicity[d]), self.first_index[d]));
        order
    }
}

fn gather_columns(m: &CuspMatrix, start: usize, end: usize) -> Vec<Vec<u8>> {
    let mut cols = vec![Vec::with_capacity(m.rows); end - start];
    for r in 0..m.rows {
        let row = &m.row(r)[start..end];
        for (col, &b) in cols.iter_mut().zip(row) {
            col.push(b);
        }
    }
    cols
}

pub fn dedupe_columns(m: &CuspMatrix) -> DedupedColumns {
    const BLOCK: usize = 4096;
    let blocks: Vec<Vec<Vec<u8>>> = (0..m.cols.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| gather_columns(m, b * BLOCK, ((b + 1) * BLOCK).min(m.cols)))
        .collect();
    let mut index: HashMap<Vec<u8>, u32> = HashMap::new();
    let mut out = DedupedColumns {
        rows: m.rows,
        total_columns: m.cols,
        columns: Vec::new(),
        first_index: Vec::new(),
        multiplicity: Vec::new(),
        assignment: Vec::with_capacity(m.cols),
    };
    for (c, col) in blocks.into_iter().flatten().enumerate() {
        let next = out.columns.len() as u32;
        let d = *index.entry(col.clone()).or_insert(next);
        if d == next {
            out.columns.push(col);
            out.first_index.push(c);
            out.multiplicity.push(0);
        }
        out.multiplicity[d as usize] += 1;
        out.assignment.push(d);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankOptions {
    /// Columns reduced in parallel against one basis snapshot.
    pub batch_size: usize,
    /// Keep the change of basis so that relations can be re-derived.
    pub track_relations: bool,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions { batch_size: 256, track_relations: false }
    }
}

/// Column space of a matrix over `Z/p`, kept fully reduced: every basis
/// vector has a 1 in its own pivot row and 0 in all other pivot rows.
#[derive(Clone, Debug)]
pub struct ColumnBasis {
    field: PrimeField,
    len: usize,
    vectors: Vec<Vec<u32>>,
    pivot_rows: Vec<usize>,
    /// Labels of the columns that created each pivot.
    pivot_labels: Vec<usize>,
    /// `vectors[i] = sum_j transform[i][j] * source[j]` when tracking.
    transform: Option<Vec<Vec<u64>>>,
    sources: Vec<Vec<u32>>,
}

impl ColumnBasis {
    pub fn new(field: PrimeField, len: usize, track_relations: bool) -> Self {
        ColumnBasis {
            field,
            len,
            vectors: Vec::new(),
            pivot_rows: Vec::new(),
            pivot_labels: Vec::new(),
            transform: track_relations.then(Vec::new),
            sources: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn pivot_labels(&self) -> &[usize] {
        &self.pivot_labels
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// Reduces `v` against the current basis; returns the remainder and the
    /// coefficients used.
    pub fn reduce(&self, v: &[u32]) -> (Vec<u32>, Vec<u64>) {
        let p = self.field.p;
        let coeffs: Vec<u64> = self.pivot_rows.iter().map(|&r| v[r] as u64).collect();
        let mut acc: Vec<u64> = v.iter().map(|&x| x as u64).collect();
        let lazy = self.field.lazy_terms();
        let mut pending = 0;
        for (b, &c) in self.vectors.iter().zip(&coeffs) {
            if c == 0 {
                continue;
            }
            let m = p - c;
            for (a, &x) in acc.iter_mut().zip(b.iter()) {
                *a += m * x as u64;
            }
            pending += 1;
            if pending == lazy {
                acc.iter_mut().for_each(|a| *a %= p);
                pending = 0;
            }
        }
        (acc.into_iter().map(|a| (a % p) as u32).collect(), coeffs)
    }

    /// Inserts an already reduced, nonzero vector; `coeffs` are the
    /// reduction coefficients against the current basis.
    fn insert(&mut self, mut v: Vec<u32>, coeffs: &[u64], label: usize, source: Option<Vec<u32>>) {
        let f = self.field;
        let r = v.iter().position(|&x| x != 0).expect("nonzero vector");
        let inv = f.inv(v[r] as u64);
        v.iter_mut().for_each(|x| *x = f.mul(*x as u64, inv) as u32);
        let k = self.vectors.len();
        let mut t_new = Vec::new();
        if let Some(t) = &self.transform {
            // v = inv * (source - sum coeffs_i b_i)
            t_new = vec![0u64; k + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    for (j, &tij) in t[i].iter().enumerate() {
                        t_new[j] = f.sub(t_new[j], f.mul(c, tij));
                    }
                }
            }
            t_new[k] = 1;
            t_new.iter_mut().for_each(|x| *x = f.mul(*x, inv));
        }
        for (i, b) in self.vectors.iter_mut().enumerate() {
            let d = b[r] as u64;
            if d == 0 {
                continue;
            }
            let m = f.p - d;
            for (x, &y) in b.iter_mut().zip(v.iter()) {
                *x = ((*x as u64 + m * y as u64) % f.p) as u32;
            }
            if let Some(t) = &mut self.transform {
                t[i].resize(k + 1, 0);
                for (x, &y) in t[i].iter_mut().zip(t_new.iter()) {
                    *x = f.add(*x, f.mul(m, y));
                }
            }
        }
        self.vectors.push(v);
        self.pivot_rows.push(r);
        self.pivot_labels.push(label);
        if let Some(t) = &mut self.transform {
            t.push(t_new);
            self.sources.push(source.expect("source kept when tracking"));
        }
    }

    /// Adds a column; returns true if the rank grew.
    pub fn push(&mut self, v: &[u32], label: usize) -> bool {
        let (rem, coeffs) = self.reduce(v);
        self.push_reduced(rem, coeffs, v, label)
    }

    fn push_reduced(&mut self, mut rem: Vec<u32>, mut coeffs: Vec<u64>, source: &[u32], label: usize) -> bool {
        // account for pivots added since `rem` was computed
        let f = self.field;
        for i in coeffs.len()..self.vectors.len() {
            let c = rem[self.pivot_rows[i]] as u64;
            coeffs.push(c);
            if c != 0 {
                let m = f.p - c;
                for (x, &y) in rem.iter_mut().zip(self.vectors[i].iter()) {
                    *x = ((*x as u64 + m * y as u64) % f.p) as u32;
                }
            }
        }
        if rem.iter().all(|&x| x == 0) {
            return false;
        }
        // `coeffs` refer to the basis as it was, which later insertions
        // changed; recompute them against the current basis
        if self.transform.is_some() {
            coeffs = self.pivot_rows.iter().map(|&r| source[r] as u64).collect();
        }
        let keep = self.transform.is_some().then(|| source.to_vec());
        self.insert(rem, &coeffs, label, keep);
        true
    }

    /// Adds columns in batches reduced in parallel against a snapshot.
    pub fn extend(&mut self, columns: &[(usize, Vec<u32>)], batch_size: usize) {
        for chunk in columns.chunks(batch_size.max(1)) {
            let snapshot = &*self;
            let reduced: Vec<(Vec<u32>, Vec<u64>)> = chunk.par_iter().map(|(_, v)| snapshot.reduce(v)).collect();
            for ((label, v), (rem, coeffs)) in chunk.iter().zip(reduced) {
                self.push_reduced(rem, coeffs, v, *label);
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).0.iter().all(|&x| x == 0)
    }

    /// Coefficients over the pivot-creating columns expressing `v`, when
    /// relations are tracked and `v` lies in the span.
    pub fn express(&self, v: &[u32]) -> Option<Vec<u64>> {
        let t = self.transform.as_ref()?;
        let f = self.field;
        let (rem, coeffs) = self.reduce(v);
        if rem.iter().any(|&x| x != 0) {
            return None;
        }
        let k = self.vectors.len();
        let mut out = vec![0u64; k];
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                for (j, &tij) in t[i].iter().enumerate() {
                    out[j] = f.add(out[j], f.mul(c, tij));
                }
            }
        }
        Some(out)
    }

    /// Source columns that created the pivots (tracking only).
    pub fn sources(&self) -> &[Vec<u32>] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

fn column_mod_p(col: &[u8], table: &[u32; 256]) -> Vec<u32> {
    col.iter().map(|&b| table[b as usize]).collect()
}

/// Column basis of a deduplicated matrix, processing columns by descending
/// multiplicity. Pivot labels are original column indices.
pub fn column_basis(d: &DedupedColumns, field: PrimeField, opts: RankOptions) -> ColumnBasis {
    let table = field.entry_table();
    let mut basis = ColumnBasis::new(field, d.rows, opts.track_relations);
    let order = d.processing_order();
    for chunk in order.chunks(4 * opts.batch_size.max(1)) {
        let cols: Vec<(usize, Vec<u32>)> =
            chunk.iter().map(|&i| (d.first_index[i], column_mod_p(&d.columns[i], &table))).collect();
        basis.extend(&cols, opts.batch_size);
    }
    basis
}

fn validate_bytes(m: &CuspMatrix) -> Result<(), ExactLaError> {
    match m.entries.iter().find(|&&b| b > 3 && b != ZERO_ENTRY) {
        Some(&b) => Err(ExactLaError::BadEntry(b)),
        None => Ok(()),
    }
}

pub fn rank_mod_p(m: &CuspMatrix, field: &PrimeField) -> Result<usize, ExactLaError> {
    validate_bytes(m)?;
    Ok(column_basis(&dedupe_columns(m), *field, RankOptions::default()).rank())
}

/// Reduces a signed integer vector mod `p`.
pub fn integer_vector_mod_p(v: &[i64], field: &PrimeField) -> Vec<u32> {
    v.iter().map(|&x| x.rem_euclid(field.p as i64) as u32).collect()
}

pub fn in_span_mod_p(target: &[i64], m: &CuspMatrix, field: &PrimeField) -> Result<bool, ExactLaError> {
    validate_bytes(m)?;
    if target.len() != m.rows {
        return Err(ExactLaError::LengthMismatch { got: target.len(), expected: m.rows });
    }
    let basis = column_basis(&dedupe_columns(m), *field, RankOptions::default());
    Ok(basis.contains(&integer_vector_mod_p(target, field)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeRank {
    pub prime: u64,
    pub sqrt_minus_one: u64,
    pub rank: usize,
    pub denominator_in_span: bool,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankCertificate {
    /// Common rank, or `None` when the primes disagree.
    pub rank: Option<usize>,
    pub primes_used: Vec<u64>,
    pub per_prime: Vec<PrimeRank>,
    /// Pivot columns (original indices) from the first prime.
    pub pivot_columns: Vec<usize>,
    pub column_dedupe_stats: DedupeStats,
    pub rows: usize,
    pub cols: usize,
    pub wall_time_seconds: f64,
}

impl RankCertificate {
    pub fn ranks_agree(&self) -> bool {
        self.rank.is_some()
    }

    pub fn denominator_in_span(&self) -> bool {
        self.per_prime.iter().all(|r| r.denominator_in_span)
    }
}

/// Rank over each prime plus span membership of the denominator vector.
pub fn certify_rank(m: &CuspMatrix, primes: &[u64], opts: RankOptions) -> Result<RankCertificate, ExactLaError> {
    let start = Instant::now();
    validate_bytes(m)?;
    let fields = primes.iter().map(|&p| PrimeField::new(p)).collect::<Result<Vec<_>, _>>()?;
    let dedup = dedupe_columns(m);
    let mut per_prime = Vec::new();
    let mut pivot_columns = Vec::new();
    for (i, field) in fields.iter().enumerate() {
        let t = Instant::now();
        let basis = column_basis(&dedup, *field, opts);
        let den = integer_vector_mod_p(&m.denominators, field);
        per_prime.push(PrimeRank {
            prime: field.p,
            sqrt_minus_one: field.sqrt_minus_one,
            rank: basis.rank(),
            denominator_in_span: basis.contains(&den),
            seconds: t.elapsed().as_secs_f64(),
        });
        if i == 0 {
            pivot_columns = basis.pivot_labels().to_vec();
        }
    }
    let rank = match per_prime.first() {
        Some(first) if per_prime.iter().all(|r| r.rank == first.rank) => Some(first.rank),
        _ => None,
    };
    Ok(RankCertificate {
        rank,
        primes_used: primes.to_vec(),
        per_prime,
        pivot_columns,
        column_dedupe_stats: dedup.stats(),
        rows: m.rows,
        cols: m.cols,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Characteristic-zero rank over `Z[i]` by fraction-free elimination; meant
/// for small submatrices.
pub fn rank_gaussian(m: &CuspMatrix) -> Result<usize, ExactLaError> {
    validate_bytes(m)?;
    let mut a: Vec<Vec<GaussInt>> = (0..m.rows)
        .map(|r| {
            m.row(r)
                .iter()
                .map(|&b| if b == ZERO_ENTRY { GaussInt::zero() } else { GaussInt::i_pow(b as u32) })
                .collect()
        })
        .collect();
    let mut prev = GaussInt::one();
    let mut rank = 0;
    for col in 0..m.cols {
        if rank == m.rows {
            break;
        }
        let Some(p) = (rank..m.rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let piv = pivot_row[col].clone();
        rest.par_iter_mut().for_each(|row| {
            let lead = row[col].clone();
            for j in col + 1..m.cols {
                let v = &(&piv * &row[j]) - &(&lead * &pivot_row[j]);
                row[j] = v.div_exact(&prev).expect("Bareiss division is exact");
            }
            row[col] = GaussInt::zero();
        });
        prev = piv;
        rank += 1;
    }
    Ok(rank)
}
