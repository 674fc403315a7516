use num_bigint::BigInt;
use proptest::prelude::*;

use octavic::clifford::{CliffordElement, GramSpace};
use octavic::embedding::{even_hom_to_m8, octave_space, octave_vector, p_matrix};
use octavic::octonion::{triple_trace_integral, IntegralOctave, Octave, Rational};

fn octave(r: i64) -> impl Strategy<Value = IntegralOctave> {
    proptest::array::uniform8(-r..=r).prop_map(IntegralOctave::new)
}

/// Sparse element with small integer coefficients over the negative octave space.
fn sparse_element() -> impl Strategy<Value = CliffordElement> {
    proptest::collection::vec((0u16..256, -3i64..=3), 1..6).prop_map(|terms| {
        let s = GramSpace::negative_octave();
        terms.into_iter().fold(CliffordElement::zero(&s), |acc, (m, c)| {
            &acc + &CliffordElement::monomial(&s, m, Rational::from_integer(BigInt::from(c)))
        })
    })
}

fn even_lattice_element() -> impl Strategy<Value = CliffordElement> {
    proptest::collection::vec((octave(2), octave(2), -3i64..=3), 1..3).prop_map(|parts| {
        let s = octave_space();
        parts.into_iter().fold(CliffordElement::zero(&s), |acc, (a, b, c)| {
            let pair = &octave_vector(&a.to_octave()) * &octave_vector(&b.to_octave());
            &acc + &pair.scale_int(c)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_is_multiplicative(x in octave(30), y in octave(30)) {
        prop_assert_eq!((x * y).norm(), x.norm() * y.norm());
    }

    #[test]
    fn conjugation_reverses_products(x in octave(5), y in octave(5)) {
        prop_assert_eq!((x * y).conj(), y.conj() * x.conj());
    }

    #[test]
    fn trace_of_triple_products_is_cyclic(a in octave(4), b in octave(4), c in octave(4)) {
        let t = triple_trace_integral(&a, &b, &c);
        prop_assert_eq!(t, triple_trace_integral(&b, &c, &a));
        let left = ((a * b) * c).trace();
        let right = (a * (b * c)).trace();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn rational_and_integral_products_agree(x in octave(6), y in octave(6)) {
        let exact: Octave = &x.to_octave() * &y.to_octave();
        prop_assert_eq!(exact.to_integral(), Some(x * y));
        prop_assert_eq!(Rational::from_integer(BigInt::from(x.pairing(&y))), x.to_octave().pairing(&y.to_octave()));
    }

    #[test]
    fn clifford_product_is_associative(x in sparse_element(), y in sparse_element(), z in sparse_element()) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn involution_reverses_products(x in sparse_element(), y in sparse_element()) {
        prop_assert_eq!((&x * &y).involution(), &y.involution() * &x.involution());
        prop_assert_eq!(x.involution().involution(), x);
    }

    #[test]
    fn vectors_square_to_minus_norm(a in octave(4)) {
        let v = octave_vector(&a.to_octave());
        let s = octave_space();
        prop_assert_eq!(&v * &v, CliffordElement::from_int(&s, -a.norm()));
    }

    #[test]
    fn hom_is_multiplicative_and_involutive(x in even_lattice_element(), y in even_lattice_element()) {
        let hx = even_hom_to_m8(&x).unwrap();
        let hy = even_hom_to_m8(&y).unwrap();
        prop_assert_eq!(even_hom_to_m8(&(&x * &y)).unwrap(), &hx * &hy);
        prop_assert_eq!(even_hom_to_m8(&x.involution()).unwrap(), hx.transpose());
    }

    #[test]
    fn p_is_linear(a in octave(3), b in octave(3)) {
        let sum = &a.to_octave() + &b.to_octave();
        prop_assert_eq!(p_matrix(&sum), &p_matrix(&a.to_octave()) + &p_matrix(&b.to_octave()));
    }
}
