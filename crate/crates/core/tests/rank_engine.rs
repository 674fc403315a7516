use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use octavic::cusps::{build_cusp_matrix_for, enumerate_cusp_r, CuspMatrix};
use octavic::exactla::{
    column_basis, dedupe_columns, in_span_mod_p, rank_gaussian, rank_mod_p, PrimeField, RankOptions,
};

fn submatrix(rows: usize, cols: usize, seed: u64) -> CuspMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rs = enumerate_cusp_r();
    rs.shuffle(&mut rng);
    rs.truncate(rows);
    let full = build_cusp_matrix_for(&rs);
    let cols: Vec<usize> = (0..cols).map(|_| rng.gen_range(0..full.cols)).collect();
    full.select(&(0..rows).collect::<Vec<_>>(), &cols)
}

#[test]
fn rank_is_permutation_invariant() {
    let m = submatrix(200, 500, 31);
    let f = PrimeField::new(10009).unwrap();
    let base = rank_mod_p(&m, &f).unwrap();
    assert!(base > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..3 {
        let mut rows: Vec<usize> = (0..m.rows).collect();
        let mut cols: Vec<usize> = (0..m.cols).collect();
        rows.shuffle(&mut rng);
        cols.shuffle(&mut rng);
        assert_eq!(rank_mod_p(&m.select(&rows, &cols), &f).unwrap(), base);
    }
    let g = PrimeField::new(1000033).unwrap();
    assert_eq!(rank_mod_p(&m, &g).unwrap(), base);
}

#[test]
fn batch_size_does_not_matter() {
    let m = submatrix(300, 800, 33);
    let d = dedupe_columns(&m);
    let f = PrimeField::new(10009).unwrap();
    let one = column_basis(&d, f, RankOptions { batch_size: 1, track_relations: false });
    let many = column_basis(&d, f, RankOptions::default());
    assert_eq!(one.rank(), many.rank());
    assert_eq!(one.pivot_labels(), many.pivot_labels());
}

#[test]
fn relations_reproduce_columns() {
    let m = submatrix(150, 400, 34);
    let d = dedupe_columns(&m);
    let f = PrimeField::new(10009).unwrap();
    let table: Vec<u32> = (0..=255u8).map(|b| f.entry(b).map(|v| v as u32).unwrap_or(0)).collect();
    let basis = column_basis(&d, f, RankOptions { batch_size: 7, track_relations: true });
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..20 {
        let c = rng.gen_range(0..m.cols);
        let col: Vec<u32> = m.column(c).iter().map(|&b| table[b as usize]).collect();
        let coeffs = basis.express(&col).expect("every column lies in the span");
        let mut acc = vec![0u64; m.rows];
        for (k, src) in basis.sources().iter().enumerate() {
            for (a, &x) in acc.iter_mut().zip(src) {
                *a = f.add(*a, f.mul(coeffs[k], x as u64));
            }
        }
        let got: Vec<u32> = acc.into_iter().map(|x| x as u32).collect();
        assert_eq!(got, col, "column {c}");
    }
}

#[test]
fn characteristic_zero_rank_agrees() {
    let m = submatrix(24, 40, 36);
    let exact = rank_gaussian(&m).unwrap();
    for p in [10009, 1000033] {
        assert_eq!(rank_mod_p(&m, &PrimeField::new(p).unwrap()).unwrap(), exact);
    }
}

#[test]
fn span_membership_on_submatrices() {
    let m = submatrix(100, 300, 37);
    let f = PrimeField::new(10009).unwrap();
    // a column and a combination of two columns lie in the span
    let col = |c: usize| -> Vec<i64> { m.column(c).iter().map(|&b| f.entry(b).unwrap() as i64).collect() };
    assert!(in_span_mod_p(&col(5), &m, &f).unwrap());
    let combo: Vec<i64> = col(1).iter().zip(col(9)).map(|(x, y)| 3 * x - 7 * y).collect();
    assert!(in_span_mod_p(&combo, &m, &f).unwrap());
}
