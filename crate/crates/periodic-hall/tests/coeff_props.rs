//! Field laws of the coefficient ring on random small elements.

use num_bigint::BigInt;
use num_rational::BigRational;
use periodic_hall::coeff::CoeffElem;
use proptest::prelude::*;

fn elem(q: u32) -> impl Strategy<Value = CoeffElem> {
    prop::array::uniform4((-20i64..=20, 1i64..=6)).prop_map(move |c| {
        CoeffElem::from_coords(q, c.map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d))))
    })
}

fn any_q() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5])
}

fn pair() -> impl Strategy<Value = (CoeffElem, CoeffElem)> {
    any_q().prop_flat_map(|q| (elem(q), elem(q)))
}

fn triple() -> impl Strategy<Value = (CoeffElem, CoeffElem, CoeffElem)> {
    any_q().prop_flat_map(|q| (elem(q), elem(q), elem(q)))
}

proptest! {
    #[test]
    fn addition_and_multiplication_commute((a, b) in pair()) {
        prop_assert_eq!(a.checked_add(&b).unwrap(), b.checked_add(&a).unwrap());
        prop_assert_eq!(a.checked_mul(&b).unwrap(), b.checked_mul(&a).unwrap());
    }

    #[test]
    fn multiplication_associates_and_distributes((a, b, c) in triple()) {
        let ab = a.checked_mul(&b).unwrap();
        prop_assert_eq!(ab.checked_mul(&c).unwrap(), a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap());
        let lhs = a.checked_mul(&b.checked_add(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, ab.checked_add(&a.checked_mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn nonzero_elements_are_invertible((a, _b) in pair()) {
        prop_assume!(!a.is_zero());
        let inv = a.inv().unwrap();
        prop_assert!(a.checked_mul(&inv).unwrap().is_one());
    }

    #[test]
    fn division_undoes_multiplication((a, b) in pair()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!(a.checked_mul(&b).unwrap().checked_div(&b).unwrap(), a);
    }

    #[test]
    fn quarter_powers_add(q in any_q(), j in -12i64..=12, k in -12i64..=12) {
        let lhs = CoeffElem::w_power(q, j).checked_mul(&CoeffElem::w_power(q, k)).unwrap();
        prop_assert_eq!(lhs, CoeffElem::w_power(q, j + k));
        prop_assert_eq!(CoeffElem::w_power(q, 4 * j), CoeffElem::q_int_power(q, j));
    }

    #[test]
    fn string_form_round_trips((a, _b) in pair()) {
        let s = a.to_strings();
        prop_assert_eq!(CoeffElem::from_strings(a.q(), &s).unwrap(), a);
    }
}

#[test]
fn fourth_power_of_w_is_q() {
    for q in [2u32, 3, 5] {
        let w = CoeffElem::w(q);
        let w4 = w.checked_mul(&w).unwrap().checked_mul(&w).unwrap().checked_mul(&w).unwrap();
        assert_eq!(w4, CoeffElem::from_int(q, q as i64));
        assert_eq!(w.checked_mul(&w).unwrap(), CoeffElem::v(q));
    }
}

#[test]
fn different_fields_do_not_mix() {
    assert!(CoeffElem::one(2).checked_add(&CoeffElem::one(3)).is_err());
    assert!(CoeffElem::zero(5).inv().is_err());
}
