//! The semi-derived Hall algebra of `Z/t`-graded complexes and its extension by
//! square roots of acyclic classes.
//!
//! Elements live in the ordered basis
//! `√K_{α⁰,0} ⋄ ... ⋄ √K_{α^{t-1},t-1} ⊗ U_{A^{t-1},t-1} ⋄ ... ⋄ U_{A⁰,0}`.
//! Two independent products are provided: rewriting with the defining
//! relations, and the Hall product of explicit stalk-sum complexes followed by
//! reduction of every middle term.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::coeff::CoeffElem;
use crate::complex::{complex_euler_exponent, extension_census, ComplexInvariants, GradedComplex, DEFAULT_EXT_CAP};
use crate::error::{HallError, Result};
use crate::rep::{k0_sub, K0Vector, Representation};
use crate::table::{ClassId, CategoryTable};
use crate::torus::{
    complex_past_torus_quarters, exponent_add, exponent_is_integral, exponent_is_zero, ordered_quarters,
    product_scalar, quarter_power, single_degree, stalk_past_torus_quarters, zero_exponent, TorusExponent,
};

/// Iso classes `(A^0, ..., A^{t-1})` of the stalk factors.
pub type StalkTuple = Vec<ClassId>;

/// Torus exponent (doubled, per degree) and stalk tuple of a basis element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SdhKey {
    pub torus: TorusExponent,
    pub stalks: StalkTuple,
}

/// Finite linear combination with exact coefficients.
pub type Lin<K> = BTreeMap<K, CoeffElem>;

/// Add `c` to the coefficient of `k`, dropping zeros.
pub fn lin_add<K: Ord>(map: &mut Lin<K>, k: K, c: CoeffElem) {
    if c.is_zero() {
        return;
    }
    match map.entry(k) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            let s = e.get() + &c;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

/// Rewriting state: stalk factors `(class, degree)` from left to right.
type Word = Vec<(ClassId, usize)>;

/// An element of the (extended) semi-derived Hall algebra in normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdhElement {
    pub t: usize,
    pub n: usize,
    pub q: u32,
    pub terms: Lin<SdhKey>,
}

impl SdhElement {
    pub fn zero(t: usize, n: usize, q: u32) -> Self {
        SdhElement { t, n, q, terms: BTreeMap::new() }
    }

    pub fn one(t: usize, n: usize, q: u32) -> Self {
        Self::basis(t, n, q, SdhKey { torus: zero_exponent(t, n), stalks: vec![0; t] })
    }

    pub fn basis(t: usize, n: usize, q: u32, key: SdhKey) -> Self {
        let mut e = Self::zero(t, n, q);
        e.terms.insert(key, CoeffElem::one(q));
        e
    }

    /// `U_{a,i}`.
    pub fn stalk(table: &CategoryTable, t: usize, a: ClassId, i: usize) -> Result<Self> {
        table.check_id(a)?;
        if i >= t {
            return Err(HallError::Domain(format!("degree {} out of range for t={}", i, t)));
        }
        let mut stalks = vec![0; t];
        stalks[i] = a;
        Ok(Self::basis(t, table.n(), table.q, SdhKey { torus: zero_exponent(t, table.n()), stalks }))
    }

    /// The basis element `√K_E` with doubled exponent `E`.
    pub fn torus_monomial(t: usize, q: u32, e: TorusExponent) -> Self {
        let n = e.first().map(|x| x.len()).unwrap_or(0);
        Self::basis(t, n, q, SdhKey { torus: e, stalks: vec![0; t] })
    }

    /// `K_{α,i}`.
    pub fn k_generator(t: usize, q: u32, alpha: &[i64], i: usize) -> Result<Self> {
        if i >= t {
            return Err(HallError::Domain(format!("degree {} out of range for t={}", i, t)));
        }
        let doubled: Vec<i64> = alpha.iter().map(|x| 2 * x).collect();
        Ok(Self::torus_monomial(t, q, single_degree(t, i, &doubled)))
    }

    /// `√K_{α,i}`.
    pub fn sqrt_k_generator(t: usize, q: u32, alpha: &[i64], i: usize) -> Result<Self> {
        if i >= t {
            return Err(HallError::Domain(format!("degree {} out of range for t={}", i, t)));
        }
        Ok(Self::torus_monomial(t, q, single_degree(t, i, alpha)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &SdhKey) -> CoeffElem {
        self.terms.get(key).cloned().unwrap_or_else(|| CoeffElem::zero(self.q))
    }

    pub fn add_term(&mut self, key: SdhKey, c: CoeffElem) {
        lin_add(&mut self.terms, key, c);
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
        let mut out = Self::zero(self.t, self.n, self.q);
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x * c);
        }
        out
    }

    /// Whether the element lies in the plain algebra: integral torus exponents
    /// and coefficients in `Q[v]`.
    pub fn is_plain(&self) -> bool {
        self.terms.iter().all(|(k, c)| {
            exponent_is_integral(&k.torus) && c.coords()[1].is_zero() && c.coords()[3].is_zero()
        })
    }
}

/// `c·factors`, omitting a unit coefficient.
pub fn render_term(c: &CoeffElem, factors: &str) -> String {
    if factors.is_empty() {
        return format!("{}", c);
    }
    if c.is_one() {
        return String::from(factors);
    }
    if (-c).is_one() {
        return format!("-{}", factors);
    }
    format!("{}·{}", c, factors)
}

pub fn join_terms(parts: &[String]) -> String {
    if parts.is_empty() {
        return String::from("0");
    }
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        match p.strip_prefix('-') {
            Some(rest) => {
                out.push_str(" - ");
                out.push_str(rest);
            }
            None => {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
    }
    out
}

fn render_vector(v: &[i64]) -> String {
    let inner: Vec<String> = v.iter().map(|x| format!("{}", x)).collect();
    format!("({})", inner.join(","))
}

impl SdhElement {
    /// Text form such as `1/2·U[S⊕S] + 1/2·K[(1)]`.
    pub fn render(&self, table: &CategoryTable) -> String {
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            let mut factors = Vec::new();
            for (i, e) in k.torus.iter().enumerate() {
                if e.iter().all(|&x| x == 0) {
                    continue;
                }
                let at = if self.t == 1 { String::new() } else { format!("@{}", i) };
                if e.iter().all(|&x| x % 2 == 0) {
                    let half: Vec<i64> = e.iter().map(|x| x / 2).collect();
                    factors.push(format!("K[{}{}]", render_vector(&half), at));
                } else {
                    factors.push(format!("sqrtK[{}{}]", render_vector(e), at));
                }
            }
            for i in (0..self.t).rev() {
                let a = k.stalks[i];
                if a == 0 {
                    continue;
                }
                if self.t == 1 {
                    factors.push(format!("U[{}]", table.name(a)));
                } else {
                    factors.push(format!("U[{}@{}]", table.name(a), i));
                }
            }
            parts.push(render_term(c, &factors.join("⋄")));
        }
        join_terms(&parts)
    }
}

/// Which product to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Rewriting with the generators-and-relations presentation.
    Rewrite,
    /// Hall product of explicit complexes.
    Bruteforce,
}

/// Reduction of a single complex: `[M] = scalar · m(E) ⋄ [⊕ U_H]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectReduction {
    pub scalar: CoeffElem,
    pub torus: TorusExponent,
    pub homology: StalkTuple,
}

/// Multiplication engines over a fixed category table and period.
///
/// Internally the torus part of a key is read as the monomial `m(E)` with
/// `m(E) m(F) = q^{-P(E,F)/4} m(E+F)`; public elements use the ordered product
/// `√K_{E_0,0} ⋄ ... ⋄ √K_{E_{t-1},t-1}`, which is `q^{k/4} m(E)` for
/// `k = ordered_quarters(E)`.
pub struct SdhAlgebra<'a> {
    table: &'a CategoryTable,
    t: usize,
    ext_cap: u128,
    reduce_memo: RefCell<BTreeMap<ComplexInvariants, (TorusExponent, i64)>>,
    product_memo: RefCell<BTreeMap<(StalkTuple, StalkTuple), Lin<SdhKey>>>,
    to_obj_memo: RefCell<BTreeMap<StalkTuple, Lin<SdhKey>>>,
    to_nf_memo: RefCell<BTreeMap<StalkTuple, Lin<SdhKey>>>,
    word_memo: RefCell<BTreeMap<Word, Lin<SdhKey>>>,
    euler_memo: RefCell<BTreeMap<(TorusExponent, Vec<K0Vector>, bool), i64>>,
}

impl<'a> SdhAlgebra<'a> {
    pub fn new(table: &'a CategoryTable, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(HallError::Domain("the period t must be at least 1".into()));
        }
        Ok(SdhAlgebra {
            table,
            t,
            ext_cap: DEFAULT_EXT_CAP,
            reduce_memo: RefCell::new(BTreeMap::new()),
            product_memo: RefCell::new(BTreeMap::new()),
            to_obj_memo: RefCell::new(BTreeMap::new()),
            to_nf_memo: RefCell::new(BTreeMap::new()),
            word_memo: RefCell::new(BTreeMap::new()),
            euler_memo: RefCell::new(BTreeMap::new()),
        })
    }

    /// Cap on the number of extension classes enumerated per product.
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

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn zero(&self) -> SdhElement {
        SdhElement::zero(self.t, self.n(), self.q())
    }

    pub fn one(&self) -> SdhElement {
        SdhElement::one(self.t, self.n(), self.q())
    }

    fn zero_exp(&self) -> TorusExponent {
        zero_exponent(self.t, self.n())
    }

    fn zero_tuple(&self) -> StalkTuple {
        vec![0; self.t]
    }

    fn check_element(&self, x: &SdhElement) -> Result<()> {
        if x.t != self.t || x.q != self.q() {
            return Err(HallError::Domain(format!(
                "element with t={}, q={} used in an algebra with t={}, q={}",
                x.t,
                x.q,
                self.t,
                self.q()
            )));
        }
        for k in x.terms.keys() {
            if k.torus.len() != self.t || k.stalks.len() != self.t || k.torus.iter().any(|v| v.len() != self.n()) {
                return Err(HallError::Domain("basis key has the wrong shape".into()));
            }
            for &s in &k.stalks {
                self.table.check_id(s)?;
            }
        }
        Ok(())
    }

    /// `q^{k/4}` with `√K_{E_0,0} ⋄ ... ⋄ √K_{E_{t-1},t-1} = q^{k/4} m(E)`.
    pub fn key_scalar(&self, e: &TorusExponent) -> CoeffElem {
        quarter_power(self.q(), ordered_quarters(&self.table.quiver, e))
    }

    fn to_m(&self, x: &SdhElement) -> Lin<SdhKey> {
        let mut out = BTreeMap::new();
        for (k, c) in &x.terms {
            lin_add(&mut out, k.clone(), c * &self.key_scalar(&k.torus));
        }
        out
    }

    fn from_m(&self, lin: Lin<SdhKey>) -> SdhElement {
        let mut out = self.zero();
        for (k, c) in lin {
            let s = quarter_power(self.q(), -ordered_quarters(&self.table.quiver, &k.torus));
            out.add_term(k, &c * &s);
        }
        out
    }

    fn ps(&self, e: &TorusExponent, f: &TorusExponent) -> CoeffElem {
        product_scalar(&self.table.quiver, self.q(), e, f)
    }

    /// `m(E) ⋄ x` where `x` is a combination in either internal basis.
    fn torus_left(&self, e: &TorusExponent, x: &Lin<SdhKey>) -> Lin<SdhKey> {
        let mut out = BTreeMap::new();
        for (k, c) in x {
            let key = SdhKey { torus: exponent_add(e, &k.torus), stalks: k.stalks.clone() };
            lin_add(&mut out, key, c * &self.ps(e, &k.torus));
        }
        out
    }

    fn tuple_classes(&self, tuple: &[ClassId]) -> Vec<K0Vector> {
        tuple.iter().map(|&a| self.table.class_vec(a)).collect()
    }

    /// Quarter exponent for moving the stalks of `tuple` to the right of `m(E)`.
    fn past_quarters(&self, e: &TorusExponent, tuple: &[ClassId]) -> i64 {
        complex_past_torus_quarters(&self.table.quiver, e, &self.tuple_classes(tuple))
    }

    fn total_class(&self, tuple: &[ClassId]) -> K0Vector {
        let mut acc = vec![0; self.n()];
        for &a in tuple {
            acc = crate::rep::k0_add(&acc, &self.table.class_vec(a));
        }
        acc
    }

    fn tuple_dim(&self, tuple: &[ClassId]) -> usize {
        tuple.iter().map(|&a| self.table.total_dim(a)).sum()
    }

    // ----- reduction of complexes -----

    /// The acyclic complex `⊕_i K_{β_i, i}` whose image in degree `i-1` has class `β_i`.
    pub fn acyclic_with_images(&self, images: &[K0Vector]) -> Result<GradedComplex> {
        let quiver = &self.table.quiver;
        let mut acc = GradedComplex::zero(quiver, self.t);
        for (i, b) in images.iter().enumerate() {
            if b.iter().any(|&x| x < 0) {
                return Err(HallError::Domain("acyclic complexes need nonnegative image classes".into()));
            }
            if b.iter().all(|&x| x == 0) {
                continue;
            }
            let dims: Vec<usize> = b.iter().map(|&x| x as usize).collect();
            let x = Representation::with_dims(quiver, dims);
            acc = acc.direct_sum(&GradedComplex::acyclic_k(quiver, &x, i, self.t)?);
        }
        Ok(acc)
    }

    /// Counted `(E, log_q <K_M, U_H>)` for a complex with the given invariants.
    fn reduce_invariants(&self, inv: &ComplexInvariants) -> Result<(TorusExponent, i64)> {
        if let Some(r) = self.reduce_memo.borrow().get(inv) {
            return Ok(r.clone());
        }
        let t = self.t;
        let images: Vec<K0Vector> = (0..t).map(|i| inv.image_class((i + t - 1) % t)).collect();
        let e: TorusExponent = images.iter().map(|b| b.iter().map(|x| 2 * x).collect()).collect();
        let k = self.acyclic_with_images(&images)?;
        let u = GradedComplex::stalk_sum(self.table, &inv.homology);
        let ex = complex_euler_exponent(&self.table.quiver, &k, &u, self.q());
        self.reduce_memo.borrow_mut().insert(inv.clone(), (e.clone(), ex));
        Ok((e, ex))
    }

    /// `[M] = <K_M, U_H> [K_M] ⋄ [⊕U_H]` with the Euler value counted from explicit complexes.
    pub fn reduce_object_counted(&self, m: &GradedComplex) -> Result<ObjectReduction> {
        self.check_complex(m)?;
        let inv = m.invariants(self.table)?;
        let (torus, ex) = self.reduce_invariants(&inv)?;
        Ok(ObjectReduction { scalar: CoeffElem::q_int_power(self.q(), ex), torus, homology: inv.homology })
    }

    /// The same decomposition with the closed-form scalar
    /// `<Im d^{t-1}, Im d^{t-2}> ∏_i <Im d^i, H^i>` (for `t = 1`, `<Im d, H>`),
    /// rewritten from the ordered product of the `K_{Im d^{i-1}, i}` to `m(E)`.
    pub fn reduce_object_printed(&self, m: &GradedComplex) -> Result<ObjectReduction> {
        self.check_complex(m)?;
        let t = self.t;
        let table = self.table;
        let inv = m.invariants(table)?;
        let mut ex = 0i64;
        for i in 0..t {
            ex += table.euler_additive(&inv.image_class(i), &table.class_vec(inv.homology[i]));
        }
        if t >= 2 {
            ex += table.euler_additive(&inv.image_class(t - 1), &inv.image_class(t - 2));
        }
        let torus: TorusExponent =
            (0..t).map(|i| inv.image_class((i + t - 1) % t).iter().map(|x| 2 * x).collect()).collect();
        let ordered = self.key_scalar(&torus);
        let scalar = &CoeffElem::q_int_power(self.q(), ex) * &ordered;
        Ok(ObjectReduction { scalar, torus, homology: inv.homology })
    }

    fn check_complex(&self, m: &GradedComplex) -> Result<()> {
        if m.t != self.t {
            return Err(HallError::Domain(format!("complex has period {} but the algebra has {}", m.t, self.t)));
        }
        Ok(())
    }

    fn object_to_element(&self, r: &ObjectReduction) -> Result<SdhElement> {
        let nf = self.obj_to_nf(&r.homology)?;
        let lin = self.torus_left(&r.torus, &nf);
        let mut out = BTreeMap::new();
        for (k, c) in lin {
            lin_add(&mut out, k, &c * &r.scalar);
        }
        Ok(self.from_m(out))
    }

    /// Normal form of `[M]`, using the closed-form reduction scalar.
    pub fn reduce_complex(&self, m: &GradedComplex) -> Result<SdhElement> {
        let r = self.reduce_object_printed(m)?;
        self.object_to_element(&r)
    }

    /// Normal form of `[M]`, using Euler values counted in the category of complexes.
    pub fn reduce_counted(&self, m: &GradedComplex) -> Result<SdhElement> {
        let r = self.reduce_object_counted(m)?;
        self.object_to_element(&r)
    }

    /// Normal form of `[⊕_i U_{A^i,i}]`.
    pub fn stalk_sum_class(&self, tuple: &[ClassId]) -> Result<SdhElement> {
        if tuple.len() != self.t {
            return Err(HallError::Domain("stalk tuple has the wrong length".into()));
        }
        Ok(self.from_m(self.obj_to_nf(tuple)?))
    }

    /// Re-express a normal form through the object basis and back.
    pub fn renormalize(&self, x: &SdhElement) -> Result<SdhElement> {
        self.check_element(x)?;
        let obj = self.m_nf_to_obj(&self.to_m(x))?;
        Ok(self.from_m(self.m_obj_to_nf(&obj)?))
    }

    // ----- brute-force products in the object basis -----

    /// `[⊕U_{S1}] ⋄ [⊕U_{S2}]` in the object basis.
    fn obj_product(&self, s1: &StalkTuple, s2: &StalkTuple) -> Result<Lin<SdhKey>> {
        let key = (s1.clone(), s2.clone());
        if let Some(r) = self.product_memo.borrow().get(&key) {
            return Ok(r.clone());
        }
        let q = self.q();
        let a = GradedComplex::stalk_sum(self.table, s1);
        let b = GradedComplex::stalk_sum(self.table, s2);
        let census = extension_census(self.table, &a, &b, self.ext_cap)?;
        let denom = CoeffElem::q_int_power(q, -(census.hom_dim as i64));
        let mut out = BTreeMap::new();
        for (inv, count) in &census.counts {
            let (e, ex) = self.reduce_invariants(inv)?;
            let c = &CoeffElem::from_rational(q, BigRational::from_integer(BigInt::from(*count))) * &denom;
            let c = &c * &CoeffElem::q_int_power(q, ex);
            lin_add(&mut out, SdhKey { torus: e, stalks: inv.homology.clone() }, c);
        }
        self.product_memo.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    fn obj_mul(&self, x: &Lin<SdhKey>, y: &Lin<SdhKey>) -> Result<Lin<SdhKey>> {
        let q = self.q();
        let mut out = BTreeMap::new();
        for (k1, c1) in x {
            for (k2, c2) in y {
                let past = quarter_power(q, self.past_quarters(&k2.torus, &k1.stalks));
                let e = exponent_add(&k1.torus, &k2.torus);
                let base = &(&(c1 * c2) * &past) * &self.ps(&k1.torus, &k2.torus);
                let prod = self.obj_product(&k1.stalks, &k2.stalks)?;
                for (k3, c3) in &prod {
                    let key = SdhKey { torus: exponent_add(&e, &k3.torus), stalks: k3.stalks.clone() };
                    let c = &(&base * c3) * &self.ps(&e, &k3.torus);
                    lin_add(&mut out, key, c);
                }
            }
        }
        Ok(out)
    }

    fn single_obj(&self, a: ClassId, i: usize) -> Lin<SdhKey> {
        let mut stalks = self.zero_tuple();
        stalks[i] = a;
        let mut out = BTreeMap::new();
        out.insert(SdhKey { torus: self.zero_exp(), stalks }, CoeffElem::one(self.q()));
        out
    }

    /// `U_{A^{t-1},t-1} ⋄ ... ⋄ U_{A^0,0}` in the object basis.
    fn nf_to_obj(&self, tuple: &[ClassId]) -> Result<Lin<SdhKey>> {
        if let Some(r) = self.to_obj_memo.borrow().get(tuple) {
            return Ok(r.clone());
        }
        let mut acc: Option<Lin<SdhKey>> = None;
        for i in (0..self.t).rev() {
            if tuple[i] == 0 {
                continue;
            }
            let f = self.single_obj(tuple[i], i);
            acc = Some(match acc {
                None => f,
                Some(a) => self.obj_mul(&a, &f)?,
            });
        }
        let out = acc.unwrap_or_else(|| self.single_obj(0, 0));
        self.to_obj_memo.borrow_mut().insert(tuple.to_vec(), out.clone());
        Ok(out)
    }

    /// `[⊕U_A]` in the internal normal-form basis, by triangular inversion.
    fn obj_to_nf(&self, tuple: &[ClassId]) -> Result<Lin<SdhKey>> {
        if let Some(r) = self.to_nf_memo.borrow().get(tuple) {
            return Ok(r.clone());
        }
        let q = self.q();
        let principal = SdhKey { torus: self.zero_exp(), stalks: tuple.to_vec() };
        let p = self.nf_to_obj(tuple)?;
        if p.get(&principal).map(|c| c.is_one()) != Some(true) {
            return Err(HallError::Inconsistent(format!(
                "ordered stalk product {:?} does not have principal coefficient 1",
                tuple
            )));
        }
        let mut out = BTreeMap::new();
        out.insert(principal.clone(), CoeffElem::one(q));
        let total = self.total_class(tuple);
        let dim = self.tuple_dim(tuple);
        for (k, c) in &p {
            if *k == principal {
                continue;
            }
            let lower = self.total_class(&k.stalks);
            if self.tuple_dim(&k.stalks) >= dim || k0_sub(&total, &lower).iter().any(|&x| x < 0) {
                return Err(HallError::Inconsistent(format!(
                    "non-principal term {:?} of {:?} is not strictly smaller",
                    k.stalks, tuple
                )));
            }
            let sub = self.obj_to_nf(&k.stalks)?;
            for (k2, c2) in self.torus_left(&k.torus, &sub) {
                lin_add(&mut out, k2, -(c * &c2));
            }
        }
        self.to_nf_memo.borrow_mut().insert(tuple.to_vec(), out.clone());
        Ok(out)
    }

    fn m_nf_to_obj(&self, x: &Lin<SdhKey>) -> Result<Lin<SdhKey>> {
        let mut out = BTreeMap::new();
        for (k, c) in x {
            let obj = self.nf_to_obj(&k.stalks)?;
            for (k2, c2) in self.torus_left(&k.torus, &obj) {
                lin_add(&mut out, k2, c * &c2);
            }
        }
        Ok(out)
    }

    fn m_obj_to_nf(&self, x: &Lin<SdhKey>) -> Result<Lin<SdhKey>> {
        let mut out = BTreeMap::new();
        for (k, c) in x {
            let nf = self.obj_to_nf(&k.stalks)?;
            for (k2, c2) in self.torus_left(&k.torus, &nf) {
                lin_add(&mut out, k2, c * &c2);
            }
        }
        Ok(out)
    }

    /// Hall product of explicit complexes followed by reduction of every middle term.
    pub fn mul_bruteforce(&self, x: &SdhElement, y: &SdhElement) -> Result<SdhElement> {
        self.check_element(x)?;
        self.check_element(y)?;
        let ox = self.m_nf_to_obj(&self.to_m(x))?;
        let oy = self.m_nf_to_obj(&self.to_m(y))?;
        let prod = self.obj_mul(&ox, &oy)?;
        Ok(self.from_m(self.m_obj_to_nf(&prod)?))
    }

    /// `[M₁] ⋄ [M₂]` for arbitrary complexes, as a normal form.
    pub fn hall_product_of_complexes(&self, m1: &GradedComplex, m2: &GradedComplex) -> Result<SdhElement> {
        self.check_complex(m1)?;
        self.check_complex(m2)?;
        let q = self.q();
        let census = extension_census(self.table, m1, m2, self.ext_cap)?;
        let denom = CoeffElem::q_int_power(q, -(census.hom_dim as i64));
        let mut obj = BTreeMap::new();
        for (inv, count) in &census.counts {
            let (e, ex) = self.reduce_invariants(inv)?;
            let c = &CoeffElem::from_rational(q, BigRational::from_integer(BigInt::from(*count))) * &denom;
            lin_add(&mut obj, SdhKey { torus: e, stalks: inv.homology.clone() }, &c * &CoeffElem::q_int_power(q, ex));
        }
        Ok(self.from_m(self.m_obj_to_nf(&obj)?))
    }

    // ----- rewriting -----

    fn word_of(&self, tuple: &[ClassId]) -> Word {
        (0..self.t).rev().filter(|&i| tuple[i] != 0).map(|i| (tuple[i], i)).collect()
    }

    /// Normal form of a word of stalks, in the internal basis.
    fn normalize(&self, word: &[(ClassId, usize)]) -> Result<Lin<SdhKey>> {
        let word: Word = word.iter().copied().filter(|&(a, _)| a != 0).collect();
        if let Some(r) = self.word_memo.borrow().get(&word) {
            return Ok(r.clone());
        }
        let q = self.q();
        let pos = (0..word.len().saturating_sub(1)).find(|&p| word[p].1 <= word[p + 1].1);
        let out = match pos {
            None => {
                let mut stalks = self.zero_tuple();
                for &(a, i) in &word {
                    stalks[i] = a;
                }
                let mut out = BTreeMap::new();
                out.insert(SdhKey { torus: self.zero_exp(), stalks }, CoeffElem::one(q));
                out
            }
            Some(p) => {
                let mut out = BTreeMap::new();
                for (c, f, repl) in self.rewrite_pair(word[p], word[p + 1])? {
                    let prefix = &word[..p];
                    let mut past = 0i64;
                    for &(b, j) in prefix {
                        past += stalk_past_torus_quarters(&self.table.quiver, &f, &self.table.class_vec(b), j);
                    }
                    let mut next: Word = prefix.to_vec();
                    next.extend_from_slice(&repl);
                    next.extend_from_slice(&word[p + 2..]);
                    let sub = self.normalize(&next)?;
                    let coef = &c * &quarter_power(q, past);
                    for (k, c2) in self.torus_left(&f, &sub) {
                        lin_add(&mut out, k, &coef * &c2);
                    }
                }
                out
            }
        };
        self.word_memo.borrow_mut().insert(word, out.clone());
        Ok(out)
    }

    fn rat(&self, r: &BigRational) -> CoeffElem {
        CoeffElem::from_rational(self.q(), r.clone())
    }

    fn aut_ratio(&self, a: ClassId, b: ClassId, m: ClassId, n: ClassId) -> BigRational {
        let t = self.table;
        BigRational::new(
            BigInt::from(t.aut(a)) * BigInt::from(t.aut(b)),
            BigInt::from(t.aut(m)) * BigInt::from(t.aut(n)),
        )
    }

    /// One rewriting step for the adjacent factors `x ⋄ y` that are out of order.
    /// Returns `(coefficient, torus exponent pulled to the left, replacement)`.
    fn rewrite_pair(&self, x: (ClassId, usize), y: (ClassId, usize)) -> Result<Vec<(CoeffElem, TorusExponent, Word)>> {
        let (t, q, table) = (self.t, self.q(), self.table);
        let (a, i) = x;
        let (b, j) = y;
        let mut out = Vec::new();
        if t == 1 {
            for (c, beta, coef) in self.one_periodic_merge(a, b)? {
                let ex = table.euler_additive(&beta, &table.class_vec(c));
                let f = vec![beta.iter().map(|v| 2 * v).collect()];
                out.push((&coef * &CoeffElem::q_int_power(q, ex), f, vec![(c, 0)]));
            }
            return Ok(out);
        }
        if t == 2 {
            return Err(HallError::Unsupported(
                "no generators-and-relations presentation is available for t = 2".into(),
            ));
        }
        if i == j {
            for c in table.middle_terms(a, b) {
                out.push((self.rat(&table.hall_constant(a, b, c)), self.zero_exp(), vec![(c, i)]));
            }
        } else if j == i + 1 {
            // U_{B,i} ⋄ U_{A,i+1} with B = a, A = b
            for (m, n, g) in table.gamma_terms(b, a)? {
                let bm = k0_sub(&table.class_vec(a), &table.class_vec(m));
                let ex = table.euler_additive(&bm, &table.class_vec(m));
                let coef = &self.rat(&(g * self.aut_ratio(b, a, m, n))) * &CoeffElem::q_int_power(q, ex);
                let f = single_degree(t, j, &bm.iter().map(|v| 2 * v).collect::<Vec<_>>());
                out.push((coef, f, vec![(n, j), (m, i)]));
            }
        } else if i == 0 && j == t - 1 {
            // U_{X,0} ⋄ U_{Y,t-1} from U_{Y,t-1} ⋄ U_{X,0} = sum over (M, N)
            let (xx, yy) = (a, b);
            let size = table.total_dim(xx) + table.total_dim(yy);
            let mut principal = false;
            for (m, n, g) in table.gamma_terms(xx, yy)? {
                let ym = k0_sub(&table.class_vec(yy), &table.class_vec(m));
                let ex = table.euler_additive(&ym, &table.class_vec(m));
                let coef = &self.rat(&(g * self.aut_ratio(xx, yy, m, n))) * &CoeffElem::q_int_power(q, ex);
                if m == yy && n == xx {
                    if !coef.is_one() {
                        return Err(HallError::Inconsistent(format!(
                            "principal term of the wrap relation for ({}, {}) is {}",
                            table.name(xx),
                            table.name(yy),
                            coef
                        )));
                    }
                    principal = true;
                    out.push((CoeffElem::one(q), self.zero_exp(), vec![(yy, t - 1), (xx, 0)]));
                    continue;
                }
                if table.total_dim(m) + table.total_dim(n) >= size {
                    return Err(HallError::Inconsistent(format!(
                        "wrap rewriting of ({}, {}) does not decrease",
                        table.name(xx),
                        table.name(yy)
                    )));
                }
                let f = single_degree(t, 0, &ym.iter().map(|v| 2 * v).collect::<Vec<_>>());
                out.push((-coef, f, vec![(n, 0), (m, t - 1)]));
            }
            if !principal {
                return Err(HallError::Inconsistent("wrap relation has no principal term".into()));
            }
        } else {
            out.push((CoeffElem::one(q), self.zero_exp(), vec![y, x]));
        }
        Ok(out)
    }

    /// `U_A ⋄ U_B` for `t = 1` as `(C, β, c)`, meaning `c · K_β ⋄ U_C` up to the
    /// factor `<β, C>`, where `β` is the image class of the differential and `C = H`.
    fn one_periodic_merge(&self, a: ClassId, b: ClassId) -> Result<Vec<(ClassId, K0Vector, CoeffElem)>> {
        let table = self.table;
        let hom = BigRational::from_integer(BigInt::from(table.hom_count(a, b)));
        Ok(one_periodic_extension_counts(table, a, b)?
            .into_iter()
            .map(|(c, beta, v)| (c, beta, CoeffElem::from_rational(table.q, v / &hom)))
            .collect())
    }

    /// Product of two stalk tuples by rewriting, in the internal basis.
    fn stalk_words(&self, s1: &[ClassId], s2: &[ClassId]) -> Result<Lin<SdhKey>> {
        let mut w = self.word_of(s1);
        w.extend(self.word_of(s2));
        self.normalize(&w)
    }

    /// Product by rewriting with the generators-and-relations presentation.
    pub fn mul_rewrite(&self, x: &SdhElement, y: &SdhElement) -> Result<SdhElement> {
        self.check_element(x)?;
        self.check_element(y)?;
        let q = self.q();
        let (mx, my) = (self.to_m(x), self.to_m(y));
        let mut out = BTreeMap::new();
        for (k1, c1) in &mx {
            for (k2, c2) in &my {
                let past = quarter_power(q, self.past_quarters(&k2.torus, &k1.stalks));
                let e = exponent_add(&k1.torus, &k2.torus);
                let base = &(&(c1 * c2) * &past) * &self.ps(&k1.torus, &k2.torus);
                let words = self.stalk_words(&k1.stalks, &k2.stalks)?;
                for (k3, c3) in self.torus_left(&e, &words) {
                    lin_add(&mut out, k3, &base * &c3);
                }
            }
        }
        Ok(self.from_m(out))
    }

    /// `log_q <K, M>` (`left = true`) or `log_q <M, K>` for the acyclic complex
    /// `K` with images `P` and the stalk sum `M` with component classes `comps`,
    /// counted from explicit complexes.
    fn acyclic_stalk_euler(&self, p: &TorusExponent, comps: &[K0Vector], left: bool) -> Result<i64> {
        let key = (p.clone(), comps.to_vec(), left);
        if let Some(&v) = self.euler_memo.borrow().get(&key) {
            return Ok(v);
        }
        let k = self.acyclic_with_images(p)?;
        let quiver = &self.table.quiver;
        let mut m = GradedComplex::zero(quiver, self.t);
        for (i, c) in comps.iter().enumerate() {
            let dims: Vec<usize> = c.iter().map(|&x| x as usize).collect();
            let rep = Representation::with_dims(quiver, dims);
            m = m.direct_sum(&GradedComplex::stalk(quiver, &rep, i, self.t)?);
        }
        let v = if left {
            complex_euler_exponent(quiver, &k, &m, self.q())
        } else {
            complex_euler_exponent(quiver, &m, &k, self.q())
        };
        self.euler_memo.borrow_mut().insert(key, v);
        Ok(v)
    }

    /// Product in the extended algebra: torus halves are moved past the stalk part
    /// with `√<K₂,M₁> √<M₁,K₂'> / (√<M₁,K₂> √<K₂',M₁>)`, then stalks are multiplied
    /// by rewriting (by the Hall product when t = 2).
    pub fn mul_extended(&self, x: &SdhElement, y: &SdhElement) -> Result<SdhElement> {
        self.check_element(x)?;
        self.check_element(y)?;
        let q = self.q();
        let (mx, my) = (self.to_m(x), self.to_m(y));
        let mut out = BTreeMap::new();
        for (k1, c1) in &mx {
            let comps = self.tuple_classes(&k1.stalks);
            for (k2, c2) in &my {
                let pos: TorusExponent = k2.torus.iter().map(|v| v.iter().map(|&x| x.max(0)).collect()).collect();
                let neg: TorusExponent = k2.torus.iter().map(|v| v.iter().map(|&x| (-x).max(0)).collect()).collect();
                let sum = self.acyclic_stalk_euler(&pos, &comps, true)? + self.acyclic_stalk_euler(&neg, &comps, false)?
                    - self.acyclic_stalk_euler(&pos, &comps, false)?
                    - self.acyclic_stalk_euler(&neg, &comps, true)?;
                // each Euler value enters under a square root
                let ratio = quarter_power(q, 2 * sum);
                let e = exponent_add(&k1.torus, &k2.torus);
                let base = &(&(c1 * c2) * &ratio) * &self.ps(&k1.torus, &k2.torus);
                let prod = if self.t == 2 {
                    let s1 = SdhElement::basis(self.t, self.n(), q, SdhKey { torus: self.zero_exp(), stalks: k1.stalks.clone() });
                    let s2 = SdhElement::basis(self.t, self.n(), q, SdhKey { torus: self.zero_exp(), stalks: k2.stalks.clone() });
                    self.to_m(&self.mul_bruteforce(&s1, &s2)?)
                } else {
                    self.stalk_words(&k1.stalks, &k2.stalks)?
                };
                for (k3, c3) in self.torus_left(&e, &prod) {
                    lin_add(&mut out, k3, &base * &c3);
                }
            }
        }
        Ok(self.from_m(out))
    }

    pub fn mul(&self, x: &SdhElement, y: &SdhElement, engine: Engine) -> Result<SdhElement> {
        match engine {
            Engine::Rewrite => self.mul_rewrite(x, y),
            Engine::Bruteforce => self.mul_bruteforce(x, y),
        }
    }

    /// Multiply by a torus monomial on the left; the result must be a single basis
    /// element with a nonzero coefficient.
    pub fn torus_shift(&self, e: &TorusExponent, key: &SdhKey) -> Result<(SdhKey, CoeffElem)> {
        let x = SdhElement::torus_monomial(self.t, self.q(), e.clone());
        let y = SdhElement::basis(self.t, self.n(), self.q(), key.clone());
        let p = self.mul_extended(&x, &y)?;
        if p.terms.len() != 1 {
            return Err(HallError::Inconsistent("torus multiple of a basis element is not a basis element".into()));
        }
        let (k, c) = p.terms.into_iter().next().unwrap();
        Ok((k, c))
    }

    /// Whether a key has a trivial torus part.
    pub fn is_stalk_key(key: &SdhKey) -> bool {
        exponent_is_zero(&key.torus)
    }
}

/// `sum |Ext^1(U_A, U_B)_L|` over one-periodic middle terms `L` with homology `C`
/// and image class `β`, as `(C, β, count)`, assembled from table constants:
/// `|Ext^1(A,B)| sum_h |Ext^1(Ker h, Coker h)_C| / |Ext^1(Ker h, Coker h)|`
/// over `h in Hom(A, B)`, with `β = A - Ker h`.
pub fn one_periodic_extension_counts(table: &CategoryTable, a: ClassId, b: ClassId) -> Result<Vec<(ClassId, K0Vector, BigRational)>> {
    let mut acc: BTreeMap<(ClassId, K0Vector), BigRational> = BTreeMap::new();
    for (m, n, g) in table.gamma_terms(b, a)? {
        let maps = g * BigRational::new(
            BigInt::from(table.aut(a)) * BigInt::from(table.aut(b)),
            BigInt::from(table.aut(m)) * BigInt::from(table.aut(n)),
        );
        let beta = k0_sub(&table.class_vec(a), &table.class_vec(m));
        let ext_mn = BigRational::from_integer(BigInt::from(table.ext1_count(m, n)));
        for c in table.middle_terms(m, n) {
            let v = &maps * table.ext_count(m, n, c) / &ext_mn;
            *acc.entry((c, beta.clone())).or_insert_with(BigRational::zero) += v;
        }
    }
    let pre = BigRational::from_integer(BigInt::from(table.ext1_count(a, b)));
    Ok(acc
        .into_iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|((c, beta), v)| (c, beta, v * &pre))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::Quiver;

    fn a1(bound: usize) -> CategoryTable {
        CategoryTable::build(Quiver::a1(), 2, bound).unwrap()
    }

    fn key(torus: TorusExponent, stalks: StalkTuple) -> SdhKey {
        SdhKey { torus, stalks }
    }

    fn expected_square(table: &CategoryTable) -> SdhElement {
        let s = table.find_by_name("S").unwrap();
        let s2 = table.direct_sum(s, s).unwrap();
        let mut e = SdhElement::zero(1, 1, 2);
        e.add_term(key(vec![vec![0]], vec![s2]), CoeffElem::from_ratio(2, 1, 2));
        e.add_term(key(vec![vec![2]], vec![0]), CoeffElem::from_ratio(2, 1, 2));
        e
    }

    #[test]
    fn one_periodic_square_bruteforce() {
        let table = a1(2);
        let alg = SdhAlgebra::new(&table, 1).unwrap();
        let s = table.find_by_name("S").unwrap();
        let u = SdhElement::stalk(&table, 1, s, 0).unwrap();
        assert_eq!(alg.mul_bruteforce(&u, &u).unwrap(), expected_square(&table));
    }

    #[test]
    fn one_periodic_square_rewrite() {
        let table = a1(2);
        let alg = SdhAlgebra::new(&table, 1).unwrap();
        let s = table.find_by_name("S").unwrap();
        let u = SdhElement::stalk(&table, 1, s, 0).unwrap();
        assert_eq!(alg.mul_rewrite(&u, &u).unwrap(), expected_square(&table));
    }

    #[test]
    fn unit_is_neutral() {
        let table = a1(2);
        let alg = SdhAlgebra::new(&table, 3).unwrap();
        let s = table.find_by_name("S").unwrap();
        let u = SdhElement::stalk(&table, 3, s, 1).unwrap();
        assert_eq!(alg.mul_bruteforce(&alg.one(), &u).unwrap(), u);
        assert_eq!(alg.mul_rewrite(&u, &alg.one()).unwrap(), u);
    }

    #[test]
    fn contractible_one_periodic_reduces_to_torus() {
        let table = a1(2);
        let alg = SdhAlgebra::new(&table, 1).unwrap();
        let s = table.rep(table.find_by_name("S").unwrap()).clone();
        let k = GradedComplex::acyclic_k(&table.quiver, &s, 0, 1).unwrap();
        let r = alg.reduce_complex(&k).unwrap();
        assert_eq!(r, SdhElement::torus_monomial(1, 2, vec![vec![2]]));
        assert_eq!(alg.reduce_counted(&k).unwrap(), r);
    }

    #[test]
    fn two_periodic_contractible() {
        let table = a1(2);
        let alg = SdhAlgebra::new(&table, 2).unwrap();
        let s = table.rep(table.find_by_name("S").unwrap()).clone();
        let k = GradedComplex::acyclic_k(&table.quiver, &s, 1, 2).unwrap();
        let r = alg.reduce_complex(&k).unwrap();
        assert_eq!(r, SdhElement::torus_monomial(2, 2, single_degree(2, 1, &[2])));
    }

    #[test]
    fn engines_agree_on_three_periodic_a2() {
        let table = CategoryTable::build(Quiver::a2(), 2, 4).unwrap();
        let alg = SdhAlgebra::new(&table, 3).unwrap();
        let ids: Vec<ClassId> = table.classes_up_to(2).into_iter().filter(|&x| x != 0).collect();
        for &a in &ids {
            for &b in &ids {
                for i in 0..3 {
                    for j in 0..3 {
                        let x = SdhElement::stalk(&table, 3, a, i).unwrap();
                        let y = SdhElement::stalk(&table, 3, b, j).unwrap();
                        let r = alg.mul_rewrite(&x, &y).unwrap();
                        let bf = alg.mul_bruteforce(&x, &y).unwrap();
                        assert_eq!(r, bf, "{}@{} * {}@{}", table.name(a), i, table.name(b), j);
                    }
                }
            }
        }
    }

    #[test]
    fn printed_and_counted_reductions_agree_on_products() {
        let table = a1(3);
        for t in [1usize, 2, 3, 4] {
            let alg = SdhAlgebra::new(&table, t).unwrap();
            let s = table.rep(table.find_by_name("S").unwrap()).clone();
            let k = GradedComplex::acyclic_k(&table.quiver, &s, 0, t).unwrap();
            let u = GradedComplex::stalk(&table.quiver, &s, t - 1, t).unwrap();
            let m = k.direct_sum(&u);
            assert_eq!(
                alg.reduce_object_printed(&m).unwrap(),
                alg.reduce_object_counted(&m).unwrap(),
                "t = {}",
                t
            );
        }
    }
}
