mod common;

use common::{random_jet, random_real, rng};
use crsing::algebra::{cint, creal, rat};
use crsing::series::{indices_of_degree, substitute_w};
use crsing::{HoloCorrection, Jet, MultiIndex, Valuation};
use proptest::prelude::*;

fn jet(seed: u64, lo: u32, order: u32) -> Jet {
    random_jet(&mut rng(seed), 2, lo, order, order, 0.4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_commutative_and_associative(s in any::<u64>(), oa in 2u32..=5, ob in 2u32..=5, oc in 2u32..=5) {
        let (a, b, c) = (jet(s, 0, oa), jet(s ^ 1, 0, ob), jet(s ^ 2, 0, oc));
        let ab = a.mul_trunc(&b).unwrap();
        prop_assert_eq!(&ab, &b.mul_trunc(&a).unwrap());
        let left = ab.mul_trunc(&c).unwrap();
        let right = a.mul_trunc(&b.mul_trunc(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn conjugation_is_multiplicative(s in any::<u64>(), o in 1u32..=5) {
        let (a, b) = (jet(s, 0, o), jet(s.wrapping_add(7), 1, o));
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn real_and_imaginary_parts_of_real_products_are_real(s in any::<u64>()) {
        let mut r = rng(s);
        let a = random_real(&mut r, 2, 0, 4, 4, 0.5);
        let b = random_real(&mut r, 2, 1, 4, 4, 0.5);
        let ab = &a * &b;
        prop_assert!(ab.re_part().is_real());
        prop_assert!(ab.im_part().is_real());
        let i = cint(0, 1);
        prop_assert_eq!(&ab.re_part() + &ab.im_part().scale(&i), ab);
    }

    #[test]
    fn mixed_derivatives_commute(s in any::<u64>(), i in 1usize..=3, j in 1usize..=3, bi: bool, bj: bool) {
        let a = random_jet(&mut rng(s), 3, 0, 5, 5, 0.3);
        prop_assert_eq!(a.diff(i, bi).diff(j, bj), a.diff(j, bj).diff(i, bi));
    }

    #[test]
    fn leibniz_rule(s in any::<u64>(), i in 1usize..=2, bar: bool) {
        let (a, b) = (jet(s, 0, 5), jet(s ^ 9, 0, 5));
        let lhs = (&a * &b).diff(i, bar);
        let rhs = &(&a.diff(i, bar) * &b) + &(&a * &b.diff(i, bar));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn terms_json_round_trip(s in any::<u64>()) {
        let a = jet(s, 0, 4);
        let back = Jet::from_terms_json(2, 4, &a.to_terms_json()).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn index_order_is_graded_then_lex() {
    let all: Vec<MultiIndex> = (0..=3).flat_map(|d| indices_of_degree(2, d)).collect();
    assert!(all.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(indices_of_degree(2, 3).len(), 20);
    assert_eq!(indices_of_degree(3, 2).len(), 21);
}

#[test]
fn truncation_and_order_errors() {
    let z = Jet::var(2, 3, 1, false);
    let zb = Jet::var(2, 3, 1, true);
    let sq = &z * &zb;
    assert_eq!(sq.ord(), Valuation::Finite(2));
    assert_eq!(sq.order(), 3);
    // Degree 4 is beyond validity, so the product loses the term.
    let four = &sq * &sq;
    assert!(four.is_zero());
    assert_eq!(Jet::zero(2, 5).ord(), Valuation::Infinite);
    assert!(sq.coeff(&MultiIndex::new(&[4, 0], &[0, 0])).is_err());
    assert!(Jet::from_terms(2, 1, vec![(MultiIndex::new(&[2, 0], &[0, 0]), creal(rat(1, 1)))]).is_err());
}

#[test]
fn holomorphic_substitution_of_w() {
    // B = z_1^2 w at weight 4, with w = |z_1|^2: B(z, w) = z_1^3 zbar_1.
    let mut b = HoloCorrection::new(2, 4);
    b.set(&[2, 0], 1, cint(3, 0)).unwrap();
    assert!(b.set(&[1, 0], 1, cint(1, 0)).is_err());
    let w = Jet::monomial(2, 6, &[1, 0], &[1, 0], cint(1, 0));
    let got = substitute_w(&b, &w).unwrap();
    assert_eq!(got, Jet::monomial(2, 6, &[3, 0], &[1, 0], cint(3, 0)));
}
