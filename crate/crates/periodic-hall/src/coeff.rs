//! Exact arithmetic in `Q[w]/(w^4 - q)`.
//!
//! `w` stands for the fourth root of the prime `q`, so `v = w^2` is the
//! square root of `q`. Every element is stored as four reduced rationals.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{HallError, Result};

/// Primes accepted as the ground field size.
pub const SUPPORTED_PRIMES: [u32; 3] = [2, 3, 5];

/// `c0 + c1 w + c2 w^2 + c3 w^3` with `w^4 = q`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoeffElem {
    q: u32,
    c: [BigRational; 4],
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Whether `q` is one of the supported primes.
pub fn is_supported_prime(q: u32) -> bool {
    SUPPORTED_PRIMES.contains(&q)
}

impl CoeffElem {
    pub fn zero(q: u32) -> Self {
        CoeffElem {
            q,
            c: [BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()],
        }
    }

    pub fn one(q: u32) -> Self {
        Self::from_rational(q, BigRational::one())
    }

    pub fn from_int(q: u32, n: i64) -> Self {
        Self::from_rational(q, rat(n))
    }

    pub fn from_ratio(q: u32, num: i64, den: i64) -> Self {
        Self::from_rational(q, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(q: u32, r: BigRational) -> Self {
        let mut e = Self::zero(q);
        e.c[0] = r;
        e
    }

    pub fn from_coords(q: u32, c: [BigRational; 4]) -> Self {
        CoeffElem { q, c }
    }

    /// The element `w`.
    pub fn w(q: u32) -> Self {
        let mut e = Self::zero(q);
        e.c[1] = BigRational::one();
        e
    }

    /// The element `v = w^2`.
    pub fn v(q: u32) -> Self {
        let mut e = Self::zero(q);
        e.c[2] = BigRational::one();
        e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn coords(&self) -> &[BigRational; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(|x| x.is_zero())
    }

    /// The rational part when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Some(&self.c[0])
        } else {
            None
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.q != other.q {
            return Err(HallError::FieldMismatch { left: self.q, right: other.q });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for i in 0..4 {
            out.c[i] += &other.c[i];
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for i in 0..4 {
            out.c[i] -= &other.c[i];
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut prod: [BigRational; 7] = Default::default();
        for i in 0..4 {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                if other.c[j].is_zero() {
                    continue;
                }
                prod[i + j] += &self.c[i] * &other.c[j];
            }
        }
        let qr = rat(self.q as i64);
        let mut out = Self::zero(self.q);
        for k in 0..7 {
            if prod[k].is_zero() {
                continue;
            }
            if k < 4 {
                out.c[k] += &prod[k];
            } else {
                out.c[k - 4] += &prod[k] * &qr;
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse through the norm down to `Q`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(HallError::DivisionByZero);
        }
        // a(w) a(-w) lies in Q[v]; multiply by its conjugate to land in Q.
        let mut flip = self.clone();
        flip.c[1] = -flip.c[1].clone();
        flip.c[3] = -flip.c[3].clone();
        let p = self.checked_mul(&flip)?;
        let mut pbar = p.clone();
        pbar.c[2] = -pbar.c[2].clone();
        let n = p.checked_mul(&pbar)?;
        let norm = n.c[0].clone();
        if norm.is_zero() {
            return Err(HallError::Inconsistent("zero norm of a nonzero element".into()));
        }
        let num = flip.checked_mul(&pbar)?;
        Ok(num.scale(&(BigRational::one() / norm)))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.inv()?)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut out = self.clone();
        for x in out.c.iter_mut() {
            *x *= r;
        }
        out
    }

    /// `q^e` for `e = num/den` with `den` dividing 4.
    pub fn q_power(q: u32, num: i64, den: i64) -> Result<Self> {
        if den == 0 || 4 % den.abs() != 0 {
            return Err(HallError::Domain(format!(
                "exponent {}/{} does not have denominator dividing 4",
                num, den
            )));
        }
        let k = num * (4 / den);
        Ok(Self::w_power(q, k))
    }

    /// `w^k` for any integer `k`.
    pub fn w_power(q: u32, k: i64) -> Self {
        let m = k.div_euclid(4);
        let r = k.rem_euclid(4) as usize;
        let qb = BigInt::from(q);
        let scal = if m >= 0 {
            BigRational::from_integer(num_traits::pow(qb, m as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(qb, (-m) as usize))
        };
        let mut out = Self::zero(q);
        out.c[r] = scal;
        out
    }

    /// `q^n` for an integer exponent.
    pub fn q_int_power(q: u32, n: i64) -> Self {
        Self::w_power(q, 4 * n)
    }

    /// If the element is `r * w^k` for one `k`, return `(r, k)`.
    pub fn as_monomial(&self) -> Option<(BigRational, usize)> {
        let nz: Vec<usize> = (0..4).filter(|&i| !self.c[i].is_zero()).collect();
        if nz.len() == 1 {
            Some((self.c[nz[0]].clone(), nz[0]))
        } else {
            None
        }
    }

    /// Four `"num/den"` strings.
    pub fn to_strings(&self) -> [String; 4] {
        [0, 1, 2, 3].map(|i| rational_string(&self.c[i]))
    }

    pub fn from_strings(q: u32, s: &[String]) -> Result<Self> {
        if s.len() != 4 {
            return Err(HallError::Domain(format!("expected 4 coordinates, got {}", s.len())));
        }
        let mut out = Self::zero(q);
        for (i, item) in s.iter().enumerate() {
            out.c[i] = parse_rational(item)?;
        }
        Ok(out)
    }
}

/// `"num/den"` with a positive denominator.
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || HallError::Domain(format!("bad rational {:?}", s));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CoeffElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "w", "v", "v·w"];
        let mut parts: Vec<String> = Vec::new();
        for i in 0..4 {
            let c = &self.c[i];
            if c.is_zero() {
                continue;
            }
            let s = if i == 0 {
                fmt_rational(c)
            } else if c.is_one() {
                String::from(names[i])
            } else if (-c.clone()).is_one() {
                format!("-{}", names[i])
            } else {
                format!("{}·{}", fmt_rational(c), names[i])
            };
            parts.push(s);
        }
        match parts.len() {
            0 => write!(f, "0"),
            1 => write!(f, "{}", parts[0]),
            _ => {
                let mut out = String::new();
                for (k, p) in parts.iter().enumerate() {
                    if k == 0 {
                        out.push_str(p);
                    } else if let Some(rest) = p.strip_prefix('-') {
                        out.push_str(" - ");
                        out.push_str(rest);
                    } else {
                        out.push_str(" + ");
                        out.push_str(p);
                    }
                }
                write!(f, "({})", out)
            }
        }
    }
}

impl fmt::Debug for CoeffElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [q={}]", self, self.q)
    }
}

impl Add for &CoeffElem {
    type Output = CoeffElem;
    fn add(self, rhs: &CoeffElem) -> CoeffElem {
        self.checked_add(rhs).expect("coefficient field mismatch")
    }
}

impl Sub for &CoeffElem {
    type Output = CoeffElem;
    fn sub(self, rhs: &CoeffElem) -> CoeffElem {
        self.checked_sub(rhs).expect("coefficient field mismatch")
    }
}

impl Mul for &CoeffElem {
    type Output = CoeffElem;
    fn mul(self, rhs: &CoeffElem) -> CoeffElem {
        self.checked_mul(rhs).expect("coefficient field mismatch")
    }
}

impl Neg for &CoeffElem {
    type Output = CoeffElem;
    fn neg(self) -> CoeffElem {
        let mut out = self.clone();
        for x in out.c.iter_mut() {
            *x = -x.clone();
        }
        out
    }
}

impl Add for CoeffElem {
    type Output = CoeffElem;
    fn add(self, rhs: CoeffElem) -> CoeffElem {
        &self + &rhs
    }
}

impl Sub for CoeffElem {
    type Output = CoeffElem;
    fn sub(self, rhs: CoeffElem) -> CoeffElem {
        &self - &rhs
    }
}

impl Mul for CoeffElem {
    type Output = CoeffElem;
    fn mul(self, rhs: CoeffElem) -> CoeffElem {
        &self * &rhs
    }
}

impl Neg for CoeffElem {
    type Output = CoeffElem;
    fn neg(self) -> CoeffElem {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_rules() {
        let q = 2;
        let w = CoeffElem::w(q);
        let w2 = &w * &w;
        let w3 = &w2 * &w;
        assert_eq!(&w2 * &w3, &CoeffElem::from_int(q, 2) * &w);
        assert_eq!(&CoeffElem::v(q) * &CoeffElem::v(q), CoeffElem::from_int(q, 2));
        assert_eq!(&w * &w3, CoeffElem::from_int(q, 2));
    }

    #[test]
    fn inverses() {
        for q in SUPPORTED_PRIMES {
            let w = CoeffElem::w(q);
            let w3 = CoeffElem::w_power(q, 3);
            assert_eq!(w.inv().unwrap(), w3.scale(&BigRational::new(1.into(), (q as i64).into())));
            assert_eq!(CoeffElem::one(q).inv().unwrap(), CoeffElem::one(q));
            let v = CoeffElem::v(q);
            assert_eq!(v.inv().unwrap(), v.scale(&BigRational::new(1.into(), (q as i64).into())));
            assert_eq!(CoeffElem::zero(q).inv(), Err(HallError::DivisionByZero));
        }
    }

    #[test]
    fn quarter_powers() {
        let q = 3;
        assert_eq!(CoeffElem::q_power(q, 1, 1).unwrap(), CoeffElem::from_int(q, 3));
        assert_eq!(CoeffElem::q_power(q, 1, 2).unwrap(), CoeffElem::v(q));
        assert_eq!(CoeffElem::q_power(q, -1, 4).unwrap(), CoeffElem::w(q).inv().unwrap());
        assert!(CoeffElem::q_power(q, 1, 3).is_err());
    }

    #[test]
    fn mismatch_is_reported() {
        let a = CoeffElem::one(2);
        let b = CoeffElem::one(3);
        assert_eq!(a.checked_add(&b), Err(HallError::FieldMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn display() {
        let q = 2;
        assert_eq!(format!("{}", CoeffElem::from_ratio(q, 1, 2)), "1/2");
        assert_eq!(format!("{}", CoeffElem::v(q).inv().unwrap()), "1/2·v");
        let e = &CoeffElem::one(q) + &CoeffElem::w(q);
        assert_eq!(format!("{}", e), "(1 + w)");
    }
}
