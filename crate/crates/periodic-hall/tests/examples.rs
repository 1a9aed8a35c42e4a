//! Small worked values, each first recomputed by the brute-force routines.

use num_bigint::BigInt;
use num_rational::BigRational;
use periodic_hall::coeff::CoeffElem;
use periodic_hall::complex::{derived_hom_count, ext1_cardinality, GradedComplex};
use periodic_hall::rep::Quiver;
use periodic_hall::sdh::{SdhAlgebra, SdhElement};
use periodic_hall::table::CategoryTable;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn a2_counts() {
    let table = CategoryTable::build(Quiver::a2(), 2, 3).unwrap();
    let [s1, s2, p1] = ["S1", "S2", "P1"].map(|n| table.find_by_name(n).unwrap());
    assert_eq!(table.len(), 13);
    assert_eq!(table.ext_count(s1, s2, p1), ratio(1, 1));
    assert_eq!(table.hom_count(p1, s1), 2);
    assert_eq!(table.hom_count(p1, s2), 1);
    assert_eq!(table.hom_count(s2, p1), 2);
}

#[test]
fn a1_counts() {
    let table = CategoryTable::build(Quiver::a1(), 2, 2).unwrap();
    let s = table.find_by_name("S").unwrap();
    let ss = table.find_by_name("S⊕S").unwrap();
    assert_eq!(table.hall_constant(s, s, ss), ratio(1, 2));
    assert_eq!(table.gamma_count(s, s, s, s).unwrap(), ratio(1, 1));
    assert_eq!(table.gamma_count(0, 0, s, s).unwrap(), ratio(1, 1));
    let t3 = CategoryTable::build(Quiver::a1(), 3, 2).unwrap();
    let s = t3.find_by_name("S").unwrap();
    assert_eq!(t3.gamma_count(0, 0, s, s).unwrap(), ratio(1, 2));
}

#[test]
fn zero_bound_has_only_the_zero_class() {
    let table = CategoryTable::build(Quiver::a2(), 2, 0).unwrap();
    assert_eq!(table.len(), 1);
}

#[test]
fn shifted_hom_of_three_periodic_stalks() {
    let table = CategoryTable::build(Quiver::a2(), 2, 3).unwrap();
    let quiver = &table.quiver;
    let [s1, s2] = ["S1", "S2"].map(|n| table.find_by_name(n).unwrap());
    let a = GradedComplex::stalk(quiver, table.rep(s1), 0, 3).unwrap();
    let b2 = GradedComplex::stalk(quiver, table.rep(s2), 2, 3).unwrap();
    let ext = table.ext1_count(s1, s2);
    assert_eq!(ext, 2);
    assert_eq!(derived_hom_count(quiver, &a, &b2, 0, 2).unwrap(), ext);
    let b1 = GradedComplex::stalk(quiver, table.rep(s2), 1, 3).unwrap();
    assert_eq!(ext1_cardinality(quiver, &a, &b1, 2), derived_hom_count(quiver, &a, &b1, 1, 2).unwrap());
}

#[test]
fn wrong_order_adjacent_stalks_commute_without_homs() {
    let table = CategoryTable::build(Quiver::a2(), 2, 4).unwrap();
    let sdh = SdhAlgebra::new(&table, 3).unwrap();
    let [s1, s2] = ["S1", "S2"].map(|n| table.find_by_name(n).unwrap());
    let x = SdhElement::stalk(&table, 3, s2, 0).unwrap();
    let y = SdhElement::stalk(&table, 3, s1, 1).unwrap();
    let brute = sdh.mul_bruteforce(&x, &y).unwrap();
    assert_eq!(brute.render(&table), "U[S1@1]⋄U[S2@0]");
    assert_eq!(sdh.mul_rewrite(&x, &y).unwrap(), brute);
}

#[test]
fn one_periodic_square_of_simple() {
    let table = CategoryTable::build(Quiver::a1(), 2, 4).unwrap();
    let sdh = SdhAlgebra::new(&table, 1).unwrap();
    let s = table.find_by_name("S").unwrap();
    let u = SdhElement::stalk(&table, 1, s, 0).unwrap();
    let brute = sdh.mul_bruteforce(&u, &u).unwrap();
    let mut expected = SdhElement::stalk(&table, 1, table.find_by_name("S⊕S").unwrap(), 0).unwrap();
    expected = expected.add(&SdhElement::k_generator(1, 2, &[1], 0).unwrap());
    assert_eq!(brute, expected.scale(&CoeffElem::from_ratio(2, 1, 2)));
}
