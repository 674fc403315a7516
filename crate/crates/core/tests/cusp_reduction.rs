use num_bigint::BigInt;
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use octavic::cusps::{
    build_cusp_matrix_for, cusp_value_general, denominator_sum, enumerate_cusp_r, lift_characteristic, numerator_entry,
    r_bracket, rg_even, Cyclotomic, HermitianR, RationalHermitian, Section, ZERO_ENTRY,
};
use octavic::octonion::{IntegralOctave, Rational};

fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

fn unit(k: usize) -> (IntegralOctave, IntegralOctave) {
    if k < 8 {
        (IntegralOctave::basis(k), IntegralOctave::ZERO)
    } else {
        (IntegralOctave::ZERO, IntegralOctave::basis(k - 8))
    }
}

fn bracket(r: &HermitianR, g: &(IntegralOctave, IntegralOctave)) -> i64 {
    r_bracket(r, &g.0, &g.1)
}

/// `R[a + b] - R[a] - R[b]`.
fn polar(r: &HermitianR, a: &(IntegralOctave, IntegralOctave), b: &(IntegralOctave, IntegralOctave)) -> i64 {
    bracket(r, &(a.0 + b.0, a.1 + b.1)) - bracket(r, a) - bracket(r, b)
}

fn coords(g: &(IntegralOctave, IntegralOctave)) -> [i64; 16] {
    std::array::from_fn(|k| if k < 8 { g.0.f[k] } else { g.1.f[k - 8] })
}

fn random_r(rng: &mut ChaCha8Rng, all: &[HermitianR]) -> HermitianR {
    *all.choose(rng).unwrap()
}

fn small_octave(rng: &mut ChaCha8Rng) -> IntegralOctave {
    IntegralOctave::new(std::array::from_fn(|_| rng.gen_range(-3..=3)))
}

#[test]
fn entries_are_independent_of_the_lift() {
    let all = enumerate_cusp_r();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10_000 {
        let r = random_r(&mut rng, &all);
        let a: u16 = rng.gen();
        let base = lift_characteristic(a);
        let g = (base.0 + small_octave(&mut rng).scale(2), base.1 + small_octave(&mut rng).scale(2));
        assert_eq!(rg_even(&r, &base), rg_even(&r, &g));
        if rg_even(&r, &base) {
            assert_eq!((bracket(&r, &g) - bracket(&r, &base)).rem_euclid(4), 0, "{r:?} {a:04x}");
        }
    }
}

#[test]
fn character_sum_dichotomy() {
    let all = enumerate_cusp_r();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..24 {
        let r = random_r(&mut rng, &all);
        let a: u16 = rng.gen();
        let base = lift_characteristic(a);
        let sum: i64 =
            (0..=u16::MAX).map(|k| if polar(&r, &base, &lift_characteristic(k)) & 1 == 0 { 1 } else { -1 }).sum();
        assert!(sum == 0 || sum == 1 << 16);
        assert_eq!(sum == 1 << 16, rg_even(&r, &base), "{r:?} {a:04x}");
    }
}

#[test]
fn four_dimensional_sections() {
    let all = enumerate_cusp_r();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..60 {
        let r = random_r(&mut rng, &all);
        let a: u16 = rng.gen();
        let base = lift_characteristic(a);
        let mut free: Vec<usize> = (0..16).collect();
        free.shuffle(&mut rng);
        free.truncate(4);
        let bits = coords(&base);
        let phi = move |g: &[i64; 16]| (0..16).all(|k| g[k].rem_euclid(2) == bits[k]) as i64;
        let section = Section { base: bits, step: 1, free: free.clone(), count: 4 };
        let v = cusp_value_general(&phi, &rat(1, 2), &RationalHermitian::from(&r), 4, &section, 1 << 10).unwrap();
        let all_even = free.iter().all(|&k| polar(&r, &base, &unit(k)) & 1 == 0);
        let expected = if all_even {
            Cyclotomic::monomial(4, bracket(&r, &base).rem_euclid(4) as u64, 16)
        } else {
            Cyclotomic::monomial(4, 0, 0)
        };
        assert_eq!(v.sum, expected, "{r:?} {a:04x} {free:?}");
        let entry = numerator_entry(&r, a);
        if entry != ZERO_ENTRY {
            assert_eq!(v.sum, Cyclotomic::monomial(4, entry as u64, 16));
        }
    }
}

#[test]
fn general_evaluator_matches_the_matrix() {
    let all = enumerate_cusp_r();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let rs: Vec<HermitianR> = (0..20).map(|_| random_r(&mut rng, &all)).collect();
    let m = build_cusp_matrix_for(&rs);
    for (i, r) in rs.iter().enumerate() {
        let rh = RationalHermitian::from(r);
        let a: u16 = rng.gen();
        let section = Section { base: coords(&lift_characteristic(a)), step: 2, free: (0..16).collect(), count: 2 };
        let v = cusp_value_general(&|_| 1, &rat(1, 2), &rh, 4, &section, 1 << 16).unwrap();
        let entry = m.get(i, a as usize);
        let expected = if entry == ZERO_ENTRY {
            Cyclotomic::monomial(4, 0, 0)
        } else {
            Cyclotomic::monomial(4, entry as u64, 1 << 16)
        };
        assert_eq!(v.sum, expected, "{r:?} {a:04x}");
        let d = cusp_value_general(&|_| 1, &rat(1, 1), &rh, 2, &Section::full(2), 1 << 16).unwrap();
        assert_eq!(d.sum, Cyclotomic::monomial(2, 0, m.denominators[i]));
        assert_eq!(m.denominators[i], denominator_sum(r));
    }
}

#[test]
fn denominators_never_vanish() {
    let m = build_cusp_matrix_for(&enumerate_cusp_r());
    assert_eq!(m.rows, 2047);
    let min = m.denominators.iter().map(|d| d.abs()).min().unwrap();
    assert_eq!(min, 256);
    assert!(m.denominators.iter().all(|d| d.unsigned_abs().is_power_of_two()));
}
