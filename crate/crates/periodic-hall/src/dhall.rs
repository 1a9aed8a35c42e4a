//! The derived Hall algebra of the odd-periodic derived category.
//!
//! Every object is isomorphic to a sum of shifted stalks, so iso classes are
//! stalk tuples `(A^0, ..., A^{t-1})`. Elements are written in the tuple basis,
//! where a tuple stands for the ordered product
//! `Z_{A^{t-1}}^{[t-1]} ⋯ Z_{A^0}^{[0]}`. The product is computed in the basis of
//! iso classes by counting extensions of stalk-sum complexes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coeff::CoeffElem;
use crate::complex::{derived_hom_dim, extension_census, ext1_cardinality, GradedComplex, DEFAULT_EXT_CAP};
use crate::error::{HallError, Result};
use crate::sdh::{lin_add, one_periodic_extension_counts, Lin, StalkTuple};
use crate::table::{ClassId, CategoryTable};
use crate::torus::quarter_power;

/// An element of the derived Hall algebra in the tuple basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DhElement {
    pub t: usize,
    pub q: u32,
    pub terms: Lin<StalkTuple>,
}

impl DhElement {
    pub fn zero(t: usize, q: u32) -> Self {
        DhElement { t, q, terms: BTreeMap::new() }
    }

    pub fn one(t: usize, q: u32) -> Self {
        Self::basis(t, q, vec![0; t])
    }

    pub fn basis(t: usize, q: u32, tuple: StalkTuple) -> Self {
        let mut e = Self::zero(t, q);
        e.terms.insert(tuple, CoeffElem::one(q));
        e
    }

    /// `Z_A^{[i]}`.
    pub fn generator(table: &CategoryTable, t: usize, a: ClassId, i: usize) -> Result<Self> {
        table.check_id(a)?;
        if i >= t {
            return Err(HallError::Domain(format!("degree {} out of range for t={}", i, t)));
        }
        let mut tuple = vec![0; t];
        tuple[i] = a;
        Ok(Self::basis(t, table.q, tuple))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: StalkTuple, c: CoeffElem) {
        lin_add(&mut self.terms, k, c);
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&CoeffElem::from_int(self.q, -1)))
    }

    pub fn scale(&self, c: &CoeffElem) -> Self {
        let mut out = Self::zero(self.t, self.q);
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x * c);
        }
        out
    }

    /// Text form such as `v·Z[S1@1]⋄Z[S2@0]`.
    pub fn render(&self, table: &CategoryTable) -> String {
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            let factors: Vec<String> = (0..self.t)
                .rev()
                .filter(|&i| k[i] != 0)
                .map(|i| {
                    if self.t == 1 {
                        format!("Z[{}]", table.name(k[i]))
                    } else {
                        format!("Z[{}@{}]", table.name(k[i]), i)
                    }
                })
                .collect();
            parts.push(crate::sdh::render_term(c, &factors.join("⋄")));
        }
        crate::sdh::join_terms(&parts)
    }
}

/// `X[s]`: the tuple with component `j` equal to `X^{j+s}`.
pub fn shift_tuple(x: &[ClassId], s: usize) -> StalkTuple {
    let t = x.len();
    (0..t).map(|j| x[(j + s) % t]).collect()
}

/// Rotate all degrees by `r`: component `j` moves to `j + r`.
pub fn rotate_tuple(x: &[ClassId], r: usize) -> StalkTuple {
    let t = x.len();
    let mut out = vec![0; t];
    for j in 0..t {
        out[(j + r) % t] = x[j];
    }
    out
}

/// Products in the derived Hall algebra for a fixed odd period.
pub struct DhAlgebra<'a> {
    table: &'a CategoryTable,
    t: usize,
    ext_cap: u128,
    class_memo: RefCell<BTreeMap<(StalkTuple, StalkTuple), Lin<StalkTuple>>>,
    to_class_memo: RefCell<BTreeMap<StalkTuple, Lin<StalkTuple>>>,
    to_tuple_memo: RefCell<BTreeMap<StalkTuple, Lin<StalkTuple>>>,
}

impl<'a> DhAlgebra<'a> {
    pub fn new(table: &'a CategoryTable, t: usize) -> Result<Self> {
        if t % 2 == 0 {
            return Err(HallError::Domain(format!("the derived Hall algebra needs an odd period, got t={}", t)));
        }
        Ok(DhAlgebra {
            table,
            t,
            ext_cap: DEFAULT_EXT_CAP,
            class_memo: RefCell::new(BTreeMap::new()),
            to_class_memo: RefCell::new(BTreeMap::new()),
            to_tuple_memo: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn with_ext_cap(mut self, cap: u128) -> Self {
        self.ext_cap = cap;
        self
    }

    pub fn table(&self) -> &'a CategoryTable {
        self.table
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn q(&self) -> u32 {
        self.table.q
    }

    pub fn zero(&self) -> DhElement {
        DhElement::zero(self.t, self.q())
    }

    pub fn one(&self) -> DhElement {
        DhElement::one(self.t, self.q())
    }

    pub fn generator(&self, a: ClassId, i: usize) -> Result<DhElement> {
        DhElement::generator(self.table, self.t, a, i)
    }

    fn check_tuple(&self, x: &[ClassId]) -> Result<()> {
        if x.len() != self.t {
            return Err(HallError::Domain("stalk tuple has the wrong length".into()));
        }
        for &a in x {
            self.table.check_id(a)?;
        }
        Ok(())
    }

    fn check_element(&self, x: &DhElement) -> Result<()> {
        if x.t != self.t || x.q != self.q() {
            return Err(HallError::Domain("element belongs to a different algebra".into()));
        }
        for k in x.terms.keys() {
            self.check_tuple(k)?;
        }
        Ok(())
    }

    fn stalks(&self, x: &[ClassId]) -> GradedComplex {
        GradedComplex::stalk_sum(self.table, x)
    }

    /// `sum_s (-1)^s dim Hom_D(X[s], Y)`.
    pub fn alternating_hom_exponent(&self, x: &[ClassId], y: &[ClassId]) -> Result<i64> {
        self.check_tuple(x)?;
        self.check_tuple(y)?;
        let quiver = &self.table.quiver;
        let yc = self.stalks(y);
        let mut acc = 0i64;
        for s in 0..self.t {
            let xs = self.stalks(&shift_tuple(x, s));
            let d = derived_hom_dim(quiver, &xs, &yc, 0, self.q())? as i64;
            acc += if s % 2 == 0 { d } else { -d };
        }
        Ok(acc)
    }

    /// `√(∏_s |Hom_D(X[s], Y)|^{(-1)^s})`.
    pub fn alternating_hom_denominator(&self, x: &[ClassId], y: &[ClassId]) -> Result<CoeffElem> {
        Ok(quarter_power(self.q(), 2 * self.alternating_hom_exponent(x, y)?))
    }

    /// `|Ext^1_T(X, Y)_L|` for every `L`, counted on stalk-sum complexes and
    /// grouped by the homology tuple of the middle term.
    pub fn structure_counts(&self, x: &[ClassId], y: &[ClassId]) -> Result<Vec<(StalkTuple, u128)>> {
        self.check_tuple(x)?;
        self.check_tuple(y)?;
        let census = extension_census(self.table, &self.stalks(x), &self.stalks(y), self.ext_cap)?;
        let mut by_h: BTreeMap<StalkTuple, u128> = BTreeMap::new();
        for (inv, c) in census.counts {
            *by_h.entry(inv.homology).or_insert(0) += c;
        }
        Ok(by_h.into_iter().collect())
    }

    /// `[X][Y]` in the basis of iso classes.
    pub fn class_product(&self, x: &[ClassId], y: &[ClassId]) -> Result<Lin<StalkTuple>> {
        let key = (x.to_vec(), y.to_vec());
        if let Some(r) = self.class_memo.borrow().get(&key) {
            return Ok(r.clone());
        }
        let q = self.q();
        let den = quarter_power(q, -2 * self.alternating_hom_exponent(x, y)?);
        let mut out = BTreeMap::new();
        for (l, c) in self.structure_counts(x, y)? {
            let c = CoeffElem::from_rational(q, BigRational::from_integer(BigInt::from(c)));
            lin_add(&mut out, l, &c * &den);
        }
        self.class_memo.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    fn class_mul(&self, x: &Lin<StalkTuple>, y: &Lin<StalkTuple>) -> Result<Lin<StalkTuple>> {
        let mut out = BTreeMap::new();
        for (a, c1) in x {
            for (b, c2) in y {
                for (l, c3) in self.class_product(a, b)? {
                    lin_add(&mut out, l, &(c1 * c2) * &c3);
                }
            }
        }
        Ok(out)
    }

    fn single_class(&self, a: ClassId, i: usize) -> Lin<StalkTuple> {
        let mut tuple = vec![0; self.t];
        tuple[i] = a;
        let mut out = BTreeMap::new();
        out.insert(tuple, CoeffElem::one(self.q()));
        out
    }

    /// The ordered product `Z^{[t-1]} ⋯ Z^{[0]}` of a tuple in the class basis.
    fn tuple_to_class(&self, tuple: &[ClassId]) -> Result<Lin<StalkTuple>> {
        if let Some(r) = self.to_class_memo.borrow().get(tuple) {
            return Ok(r.clone());
        }
        let mut acc: Option<Lin<StalkTuple>> = None;
        for i in (0..self.t).rev() {
            if tuple[i] == 0 {
                continue;
            }
            let f = self.single_class(tuple[i], i);
            acc = Some(match acc {
                None => f,
                Some(a) => self.class_mul(&a, &f)?,
            });
        }
        let out = acc.unwrap_or_else(|| self.single_class(0, 0));
        self.to_class_memo.borrow_mut().insert(tuple.to_vec(), out.clone());
        Ok(out)
    }

    fn tuple_dim(&self, tuple: &[ClassId]) -> usize {
        tuple.iter().map(|&a| self.table.total_dim(a)).sum()
    }

    /// The class `[X]` in the tuple basis, by triangular inversion.
    fn class_to_tuple(&self, tuple: &[ClassId]) -> Result<Lin<StalkTuple>> {
        if let Some(r) = self.to_tuple_memo.borrow().get(tuple) {
            return Ok(r.clone());
        }
        let p = self.tuple_to_class(tuple)?;
        let lead = p
            .get(tuple)
            .cloned()
            .ok_or_else(|| HallError::Inconsistent(format!("ordered product {:?} lacks its own class", tuple)))?;
        let inv = lead.inv()?;
        let dim = self.tuple_dim(tuple);
        let mut out = BTreeMap::new();
        out.insert(tuple.to_vec(), inv.clone());
        for (k, c) in &p {
            if k.as_slice() == tuple {
                continue;
            }
            if self.tuple_dim(k) >= dim {
                return Err(HallError::Inconsistent(format!(
                    "non-principal class {:?} in the ordered product {:?} is not smaller",
                    k, tuple
                )));
            }
            for (k2, c2) in self.class_to_tuple(k)? {
                lin_add(&mut out, k2, -(&(c * &c2) * &inv));
            }
        }
        self.to_tuple_memo.borrow_mut().insert(tuple.to_vec(), out.clone());
        Ok(out)
    }

    pub fn to_class_basis(&self, x: &DhElement) -> Result<Lin<StalkTuple>> {
        self.check_element(x)?;
        let mut out = BTreeMap::new();
        for (k, c) in &x.terms {
            for (k2, c2) in self.tuple_to_class(k)? {
                lin_add(&mut out, k2, c * &c2);
            }
        }
        Ok(out)
    }

    pub fn from_class_basis(&self, x: &Lin<StalkTuple>) -> Result<DhElement> {
        let mut out = self.zero();
        for (k, c) in x {
            self.check_tuple(k)?;
            for (k2, c2) in self.class_to_tuple(k)? {
                out.add_term(k2, c * &c2);
            }
        }
        Ok(out)
    }

    /// The iso class `[X]` as an element.
    pub fn class_element(&self, tuple: &[ClassId]) -> Result<DhElement> {
        self.check_tuple(tuple)?;
        let mut lin = BTreeMap::new();
        lin.insert(tuple.to_vec(), CoeffElem::one(self.q()));
        self.from_class_basis(&lin)
    }

    pub fn dh_mul(&self, x: &DhElement, y: &DhElement) -> Result<DhElement> {
        let cx = self.to_class_basis(x)?;
        let cy = self.to_class_basis(y)?;
        self.from_class_basis(&self.class_mul(&cx, &cy)?)
    }

    /// `|Ext^1_C(X, Y)|` and `|Hom_D(X, Y[1])|` for stalk sums.
    pub fn ext_vs_shifted_hom(&self, x: &[ClassId], y: &[ClassId]) -> Result<(u128, u128)> {
        self.check_tuple(x)?;
        self.check_tuple(y)?;
        let (a, b) = (self.stalks(x), self.stalks(y));
        let ext = ext1_cardinality(&self.table.quiver, &a, &b, self.q());
        let hom = crate::complex::derived_hom_count(&self.table.quiver, &a, &b, 1 % self.t, self.q())?;
        Ok((ext, hom))
    }

    // ----- relations assembled from table constants -----

    fn rat(&self, r: BigRational) -> CoeffElem {
        CoeffElem::from_rational(self.q(), r)
    }

    fn half_power(&self, k: i64) -> CoeffElem {
        quarter_power(self.q(), 2 * k)
    }

    /// Right side of `Z_A Z_B = sum_C |Ext^1_D(Z_A,Z_B)_{Z_C}| / √|Hom_D(Z_A,Z_B)| Z_C` (t = 1).
    pub fn one_periodic_rhs(&self, a: ClassId, b: ClassId) -> Result<DhElement> {
        let table = self.table;
        let mut out = self.zero();
        let hom_d = table.hom[a][b] as i64 + table.ext1[a][b] as i64;
        let den = self.half_power(-hom_d);
        for (c, _beta, count) in one_periodic_extension_counts(table, a, b)? {
            out.add_term(vec![c], &self.rat(count) * &den);
        }
        Ok(out)
    }

    /// Right side of `Z_A^{[i]} Z_B^{[i]} = sum_C |Ext^1(A,B)_C| / √(|Hom(A,B)||Ext^1(A,B)|) Z_C^{[i]}`.
    pub fn same_degree_rhs(&self, a: ClassId, b: ClassId, i: usize) -> Result<DhElement> {
        let table = self.table;
        let mut out = self.zero();
        let den = self.half_power(-(table.hom[a][b] as i64 + table.ext1[a][b] as i64));
        for c in table.middle_terms(a, b) {
            let mut k = vec![0; self.t];
            k[i] = c;
            out.add_term(k, &self.rat(table.ext_count(a, b, c)) * &den);
        }
        Ok(out)
    }

    /// Right side of
    /// `Z_B^{[i]} Z_A^{[i+1]} = sum γ^{MN}_{AB} (a_A a_B / a_M a_N) / √(<B,A><N,M>) Z_N^{[i+1]} Z_M^{[i]}`,
    /// with the products on the right evaluated by `dh_mul` when they are out of order.
    pub fn adjacent_rhs(&self, a: ClassId, b: ClassId, i: usize) -> Result<DhElement> {
        let table = self.table;
        let t = self.t;
        let j = (i + 1) % t;
        let mut out = self.zero();
        let ba = table.euler_additive(&table.class_vec(b), &table.class_vec(a));
        for (m, n, g) in table.gamma_terms(a, b)? {
            let nm = table.euler_additive(&table.class_vec(n), &table.class_vec(m));
            let ratio = BigRational::new(
                BigInt::from(table.aut(a)) * BigInt::from(table.aut(b)),
                BigInt::from(table.aut(m)) * BigInt::from(table.aut(n)),
            );
            let coef = &self.rat(g * ratio) * &self.half_power(-(ba + nm));
            let prod = self.dh_mul(&self.generator(n, j)?, &self.generator(m, i)?)?;
            out = out.add(&prod.scale(&coef));
        }
        Ok(out)
    }

    /// Right side of `Z_A^{[i]} Z_B^{[j]} = √((A,B)^{(-1)^{j-i}}) Z_B^{[j]} Z_A^{[i]}`.
    pub fn distant_rhs(&self, a: ClassId, b: ClassId, i: usize, j: usize) -> Result<DhElement> {
        let table = self.table;
        let (av, bv) = (table.class_vec(a), table.class_vec(b));
        let sym = table.euler_additive(&av, &bv) + table.euler_additive(&bv, &av);
        let sign = if (j as i64 - i as i64).rem_euclid(2) == 0 { 1 } else { -1 };
        let prod = self.dh_mul(&self.generator(b, j)?, &self.generator(a, i)?)?;
        Ok(prod.scale(&self.half_power(sign * sym)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::Quiver;

    #[test]
    fn one_periodic_square() {
        let table = CategoryTable::build(Quiver::a1(), 2, 2).unwrap();
        let dh = DhAlgebra::new(&table, 1).unwrap();
        let s = table.find_by_name("S").unwrap();
        let s2 = table.direct_sum(s, s).unwrap();
        let z = dh.generator(s, 0).unwrap();
        let p = dh.dh_mul(&z, &z).unwrap();
        let inv_v = CoeffElem::w_power(2, -2);
        let mut e = dh.zero();
        e.add_term(vec![s2], inv_v.clone());
        e.add_term(vec![0], inv_v);
        assert_eq!(p, e);
        assert_eq!(dh.alternating_hom_denominator(&[s], &[s]).unwrap(), CoeffElem::v(2));
    }

    #[test]
    fn three_periodic_wrong_order_pair() {
        let table = CategoryTable::build(Quiver::a2(), 2, 3).unwrap();
        let dh = DhAlgebra::new(&table, 3).unwrap();
        let s1 = table.find_by_name("S1").unwrap();
        let s2 = table.find_by_name("S2").unwrap();
        let p = dh.dh_mul(&dh.generator(s2, 0).unwrap(), &dh.generator(s1, 1).unwrap()).unwrap();
        let e = DhElement::basis(3, 2, vec![s2, s1, 0]).scale(&CoeffElem::v(2));
        assert_eq!(p, e);
    }

    #[test]
    fn even_period_rejected() {
        let table = CategoryTable::build(Quiver::a1(), 2, 1).unwrap();
        assert!(DhAlgebra::new(&table, 2).is_err());
    }
}
