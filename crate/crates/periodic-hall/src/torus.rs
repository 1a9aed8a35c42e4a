//! The quantum torus of acyclic complexes and its square-root extension.
//!
//! An exponent `E` assigns a vector `E_i` in `K_0` to each degree and stands
//! for the monomial `√K_E`, the square root of the class of an acyclic complex
//! whose image in degree `i-1` has class `E_i`. The plain generator `K_{α,i}`
//! is the monomial with `2α` in degree `i`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::coeff::CoeffElem;
use crate::rep::{K0Vector, Quiver};

/// Per-degree exponent vectors of a torus monomial.
pub type TorusExponent = Vec<K0Vector>;

pub fn zero_exponent(t: usize, n: usize) -> TorusExponent {
    vec![vec![0; n]; t]
}

pub fn exponent_add(a: &TorusExponent, b: &TorusExponent) -> TorusExponent {
    a.iter().zip(b.iter()).map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| p + q).collect()).collect()
}

pub fn exponent_neg(a: &TorusExponent) -> TorusExponent {
    a.iter().map(|x| x.iter().map(|p| -p).collect()).collect()
}

pub fn exponent_is_zero(a: &TorusExponent) -> bool {
    a.iter().all(|x| x.iter().all(|&p| p == 0))
}

/// Whether every entry is even, i.e. the monomial lies in the plain torus.
pub fn exponent_is_integral(a: &TorusExponent) -> bool {
    a.iter().all(|x| x.iter().all(|&p| p % 2 == 0))
}

/// Exponent concentrated in one degree.
pub fn single_degree(t: usize, i: usize, v: &[i64]) -> TorusExponent {
    let mut e = zero_exponent(t, v.len());
    e[i] = v.to_vec();
    e
}

/// `4 * log_q <√K_E, √K_F>`, i.e. `sum_i <E_i, F_i + F_{i-1}>`.
///
/// With `t = 1` the two summands coincide and give `2 <E, F>`.
pub fn pairing_quarters(quiver: &Quiver, e: &TorusExponent, f: &TorusExponent) -> i64 {
    let t = e.len();
    let mut acc = 0;
    for i in 0..t {
        let prev = (i + t - 1) % t;
        acc += quiver.euler_additive(&e[i], &f[i]);
        acc += quiver.euler_additive(&e[i], &f[prev]);
    }
    acc
}

/// `q^(k/4)`.
pub fn quarter_power(q: u32, k: i64) -> CoeffElem {
    CoeffElem::w_power(q, k)
}

/// `c` with `√K_E ⋄ √K_F = c · √K_{E+F}`.
pub fn product_scalar(quiver: &Quiver, q: u32, e: &TorusExponent, f: &TorusExponent) -> CoeffElem {
    quarter_power(q, -pairing_quarters(quiver, e, f))
}

/// `c` with `√K_E ⋄ √K_F = c · √K_F ⋄ √K_E`.
pub fn torus_commutator(quiver: &Quiver, q: u32, e: &TorusExponent, f: &TorusExponent) -> CoeffElem {
    quarter_power(q, pairing_quarters(quiver, f, e) - pairing_quarters(quiver, e, f))
}

/// Quarter exponent of `c` with `U_{B,j} ⋄ √K_E = c · √K_E ⋄ U_{B,j}`:
/// `2 (<E_{j+1}, B> - <B, E_j>)`.
pub fn stalk_past_torus_quarters(quiver: &Quiver, e: &TorusExponent, b: &[i64], j: usize) -> i64 {
    let t = e.len();
    let next = (j + 1) % t;
    2 * (quiver.euler_additive(&e[next], b) - quiver.euler_additive(b, &e[j]))
}

/// Quarter exponent for moving a complex whose degree-`j` components have classes
/// `comps[j]` to the right of `√K_E`.
pub fn complex_past_torus_quarters(quiver: &Quiver, e: &TorusExponent, comps: &[K0Vector]) -> i64 {
    comps.iter().enumerate().map(|(j, b)| stalk_past_torus_quarters(quiver, e, b, j)).sum()
}

/// Quarter exponent converting `√K_E` to the ordered product
/// `√K_{E_0,0} ⋄ √K_{E_1,1} ⋄ ... ⋄ √K_{E_{t-1},t-1}`: the ordered product equals
/// `q^(k/4) √K_E` for the returned `k`.
pub fn ordered_quarters(quiver: &Quiver, e: &TorusExponent) -> i64 {
    let t = e.len();
    let mut acc = 0;
    for a in 0..t {
        for b in (a + 1)..t {
            acc -= pairing_quarters(quiver, &single_degree(t, a, &e[a]), &single_degree(t, b, &e[b]));
        }
    }
    acc
}

/// A finite linear combination of torus monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusElem {
    pub q: u32,
    pub terms: BTreeMap<TorusExponent, CoeffElem>,
}

impl TorusElem {
    pub fn zero(q: u32) -> Self {
        TorusElem { q, terms: BTreeMap::new() }
    }

    pub fn monomial(q: u32, e: TorusExponent) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(e, CoeffElem::one(q));
        TorusElem { q, terms }
    }

    pub fn add_term(&mut self, e: TorusExponent, c: CoeffElem) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(|| CoeffElem::zero(c.q()));
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &CoeffElem) -> Self {
        let mut out = TorusElem::zero(self.q);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }
}

/// Product in the (extended) quantum torus.
pub fn torus_mul(quiver: &Quiver, a: &TorusElem, b: &TorusElem) -> TorusElem {
    let q = a.q;
    let mut out = TorusElem::zero(q);
    for (e, x) in &a.terms {
        for (f, y) in &b.terms {
            let c = &(x * y) * &product_scalar(quiver, q, e, f);
            out.add_term(exponent_add(e, f), c);
        }
    }
    out
}

/// `torus_pairing` as a rational exponent of `q`: `(numerator, 4)`.
pub fn torus_pairing(quiver: &Quiver, e: &TorusExponent, f: &TorusExponent) -> (i64, i64) {
    (pairing_quarters(quiver, e, f), 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_periodic_cross_pairing() {
        let quiver = Quiver::a1();
        let e = single_degree(2, 0, &[2]);
        let f = single_degree(2, 1, &[2]);
        // <K_{S,0}, K_{S,1}> = <S, S>
        assert_eq!(pairing_quarters(&quiver, &e, &f), 4);
    }

    #[test]
    fn one_periodic_pairing_doubles() {
        let quiver = Quiver::a1();
        let e = vec![vec![2]];
        assert_eq!(pairing_quarters(&quiver, &e, &e), 8);
    }

    #[test]
    fn inverse_monomial() {
        let quiver = Quiver::a2();
        let e = single_degree(3, 1, &[2, 0]);
        let a = TorusElem::monomial(2, e.clone());
        let b = TorusElem::monomial(2, exponent_neg(&e));
        let p = torus_mul(&quiver, &a, &b);
        assert_eq!(p.terms.len(), 1);
        let c = p.terms.get(&zero_exponent(3, 2)).unwrap();
        // K_{α,i} ⋄ K_{-α,i} = 1/<α,-α> = <α,α>
        assert_eq!(*c, CoeffElem::q_int_power(2, 1));
    }

    #[test]
    fn three_periodic_commutation() {
        let quiver = Quiver::a1();
        let kb0 = single_degree(3, 0, &[2]);
        let ka1 = single_degree(3, 1, &[2]);
        assert_eq!(torus_commutator(&quiver, 2, &kb0, &ka1), CoeffElem::q_int_power(2, 1));
    }
}
