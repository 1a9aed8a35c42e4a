//! The algebra map from the odd-periodic derived Hall algebra into the
//! extended semi-derived Hall algebra.
//!
//! For `t = 1`: `Z_A ↦ <A,A>^{-1/2} √K_{-A} ⊗ U_A`. For `t > 1`:
//! `Z_A^{[i]} ↦ <A,A>^{-1/4} √K_{-A,i+1} ⋄ √K_{A,i+2} ⋄ ... ⋄ √K_{A,i+t-1} ⋄ √K_{-A,i+t} ⊗ U_{A,i}`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::dhall::{DhAlgebra, DhElement};
use crate::error::{HallError, Result};
use crate::sdh::{SdhAlgebra, SdhElement, SdhKey, StalkTuple};
use crate::table::{ClassId, CategoryTable};
use crate::torus::{quarter_power, single_degree};

/// Signs of the torus factors in degrees `i+2, ..., i+t-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MiddleSigns {
    /// `+A` in every middle degree.
    Positive,
    /// `+A` and `-A` alternating, starting with `+A` in degree `i+2`.
    Alternating,
}

/// The embedding together with the two algebras it connects.
pub struct Embedding<'a> {
    pub sdh: SdhAlgebra<'a>,
    pub dh: DhAlgebra<'a>,
    signs: MiddleSigns,
    memo: RefCell<BTreeMap<StalkTuple, SdhElement>>,
}

impl<'a> Embedding<'a> {
    pub fn new(table: &'a CategoryTable, t: usize) -> Result<Self> {
        let dh = DhAlgebra::new(table, t)?;
        let sdh = SdhAlgebra::new(table, t)?;
        Ok(Embedding { sdh, dh, signs: MiddleSigns::Positive, memo: RefCell::new(BTreeMap::new()) })
    }

    /// Choose the middle torus signs; the default is [`MiddleSigns::Positive`].
    /// Both choices agree for `t <= 3`.
    pub fn with_middle_signs(mut self, signs: MiddleSigns) -> Self {
        self.signs = signs;
        self.memo.borrow_mut().clear();
        self
    }

    pub fn table(&self) -> &'a CategoryTable {
        self.sdh.table()
    }

    pub fn t(&self) -> usize {
        self.sdh.t()
    }

    /// Image of the generator `Z_A^{[i]}`.
    pub fn iota_generator(&self, a: ClassId, i: usize) -> Result<SdhElement> {
        let table = self.table();
        let (t, q) = (self.t(), table.q);
        table.check_id(a)?;
        if i >= t {
            return Err(HallError::Domain(format!("degree {} out of range for t={}", i, t)));
        }
        if a == 0 {
            return Ok(self.sdh.one());
        }
        let av = table.class_vec(a);
        let neg: Vec<i64> = av.iter().map(|x| -x).collect();
        let aa = table.euler_additive(&av, &av);
        let u = SdhElement::stalk(table, t, a, i)?;
        if t == 1 {
            let k = SdhElement::torus_monomial(1, q, single_degree(1, 0, &neg));
            return Ok(self.sdh.mul_extended(&k, &u)?.scale(&quarter_power(q, -2 * aa)));
        }
        let mut acc = self.sdh.one();
        for step in 1..=t {
            let d = (i + step) % t;
            let negative = match self.signs {
                MiddleSigns::Positive => step == 1 || step == t,
                MiddleSigns::Alternating => step % 2 == 1,
            };
            let v = if negative { &neg } else { &av };
            let k = SdhElement::torus_monomial(t, q, single_degree(t, d, v));
            acc = self.sdh.mul_extended(&acc, &k)?;
        }
        Ok(self.sdh.mul_extended(&acc, &u)?.scale(&quarter_power(q, -aa)))
    }

    /// Image of the ordered product `Z^{[t-1]} ⋯ Z^{[0]}` of a tuple.
    pub fn iota_tuple(&self, tuple: &[ClassId]) -> Result<SdhElement> {
        if let Some(r) = self.memo.borrow().get(tuple) {
            return Ok(r.clone());
        }
        if tuple.len() != self.t() {
            return Err(HallError::Domain("stalk tuple has the wrong length".into()));
        }
        let mut acc = self.sdh.one();
        for i in (0..self.t()).rev() {
            if tuple[i] != 0 {
                acc = self.sdh.mul_extended(&acc, &self.iota_generator(tuple[i], i)?)?;
            }
        }
        self.memo.borrow_mut().insert(tuple.to_vec(), acc.clone());
        Ok(acc)
    }

    pub fn iota(&self, z: &DhElement) -> Result<SdhElement> {
        if z.t != self.t() {
            return Err(HallError::Domain("element has a different period".into()));
        }
        let mut out = self.sdh.zero();
        for (k, c) in &z.terms {
            out = out.add(&self.iota_tuple(k)?.scale(c));
        }
        Ok(out)
    }

    /// `ι(x) ⋄ ι(y)` and `ι(x y)`.
    pub fn homomorphism_sides(&self, x: &DhElement, y: &DhElement) -> Result<(SdhElement, SdhElement)> {
        let lhs = self.sdh.mul_extended(&self.iota(x)?, &self.iota(y)?)?;
        let rhs = self.iota(&self.dh.dh_mul(x, y)?)?;
        Ok((lhs, rhs))
    }

    /// Leading key of an image: largest total stalk dimension, then largest key.
    pub fn leading_key(&self, x: &SdhElement) -> Option<SdhKey> {
        let table = self.table();
        x.terms
            .keys()
            .max_by_key(|k| (k.stalks.iter().map(|&a| table.total_dim(a)).sum::<usize>(), (*k).clone()))
            .cloned()
    }

    /// Tuples whose images do not have pairwise distinct leading keys, or whose
    /// leading stalks differ from the tuple itself.
    pub fn injectivity_witnesses(&self, tuples: &[StalkTuple]) -> Result<Vec<String>> {
        let mut seen: BTreeSet<SdhKey> = BTreeSet::new();
        let mut bad = Vec::new();
        for tuple in tuples {
            let img = self.iota_tuple(tuple)?;
            match self.leading_key(&img) {
                None => bad.push(format!("{:?} maps to zero", tuple)),
                Some(k) => {
                    if &k.stalks != tuple {
                        bad.push(format!("{:?} has leading stalks {:?}", tuple, k.stalks));
                    }
                    if !seen.insert(k) {
                        bad.push(format!("{:?} shares its leading key", tuple));
                    }
                }
            }
        }
        Ok(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffElem;
    use crate::rep::Quiver;

    #[test]
    fn one_periodic_image() {
        let table = CategoryTable::build(Quiver::a1(), 2, 2).unwrap();
        let emb = Embedding::new(&table, 1).unwrap();
        let s = table.find_by_name("S").unwrap();
        let img = emb.iota_generator(s, 0).unwrap();
        let mut e = SdhElement::zero(1, 1, 2);
        e.add_term(SdhKey { torus: alloc::vec![alloc::vec![-1]], stalks: alloc::vec![s] }, CoeffElem::w_power(2, -2));
        assert_eq!(img, e);
    }

    #[test]
    fn one_periodic_square_is_multiplicative() {
        let table = CategoryTable::build(Quiver::a1(), 2, 2).unwrap();
        let emb = Embedding::new(&table, 1).unwrap();
        let s = table.find_by_name("S").unwrap();
        let z = emb.dh.generator(s, 0).unwrap();
        let (l, r) = emb.homomorphism_sides(&z, &z).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn three_periodic_pair() {
        let table = CategoryTable::build(Quiver::a2(), 2, 3).unwrap();
        let emb = Embedding::new(&table, 3).unwrap();
        let s1 = table.find_by_name("S1").unwrap();
        let s2 = table.find_by_name("S2").unwrap();
        let x = emb.dh.generator(s1, 0).unwrap();
        let y = emb.dh.generator(s2, 1).unwrap();
        let (l, r) = emb.homomorphism_sides(&x, &y).unwrap();
        assert_eq!(l, r);
        let (l, r) = emb.homomorphism_sides(&y, &x).unwrap();
        assert_eq!(l, r);
    }
}
