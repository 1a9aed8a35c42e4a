//! The enumerated category: iso classes of representations up to a total
//! dimension bound, with Hom/Ext dimensions, automorphism counts, Hall
//! numbers and four-term sequence counts.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::coeff::{is_supported_prime, CoeffElem};
use crate::error::{HallError, Result};
use crate::fq::{gl_generators, gl_order, qpow, subspaces, FqMatrix, SpanIter};
use crate::rep::{
    combine, ext1_dim, full_spaces, hom_basis, hom_dim, image_spaces, is_subrep, kernel_spaces, subquotient,
    zero_spaces, K0Vector, Quiver, Representation, Subspaces,
};

/// Class id inside a [`CategoryTable`].
pub type ClassId = usize;

/// Default cap on the number of arrow-matrix tuples visited during enumeration.
pub const DEFAULT_TUPLE_BUDGET: u128 = 4_000_000;

#[derive(Clone, Debug)]
pub struct IsoClass {
    pub id: ClassId,
    pub rep: Representation,
    pub aut: u128,
}

impl IsoClass {
    pub fn dims(&self) -> &[usize] {
        &self.rep.dims
    }
}

/// Immutable model of the category of representations with total
/// dimension at most `bound`.
#[derive(Clone, Debug)]
pub struct CategoryTable {
    pub quiver: Quiver,
    pub q: u32,
    pub bound: usize,
    pub classes: Vec<IsoClass>,
    pub hom: Vec<Vec<usize>>,
    pub ext1: Vec<Vec<usize>>,
    /// `(c, a, b) -> g^C_{AB}`: subobjects of `C` isomorphic to `B` with quotient `A`.
    pub hall: BTreeMap<(ClassId, ClassId, ClassId), u64>,
    /// `(m, n, a, b) -> gamma^{MN}_{AB}`, for `dim A + dim B <= bound`.
    pub gamma: BTreeMap<(ClassId, ClassId, ClassId, ClassId), BigRational>,
    names: Vec<String>,
    dsum: BTreeMap<(ClassId, ClassId), ClassId>,
    lookup: BTreeMap<Vec<usize>, Vec<u32>>,
}

fn dim_vectors(n: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for d in 0..=left {
            cur[i] = d;
            rec(i + 1, left - d, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, bound, &mut cur, &mut out);
    out.sort_by(|a, b| {
        let ta: usize = a.iter().sum();
        let tb: usize = b.iter().sum();
        ta.cmp(&tb).then_with(|| b.cmp(a))
    });
    out
}

fn tuple_len(quiver: &Quiver, d: &[usize]) -> usize {
    quiver.arrows.iter().map(|&(s, t)| d[s] * d[t]).sum()
}

fn decode_tuple(quiver: &Quiver, d: &[usize], mut code: u128, q: u32) -> Representation {
    let mut mats = Vec::with_capacity(quiver.arrows.len());
    let mut digits = Vec::new();
    for _ in 0..tuple_len(quiver, d) {
        digits.push((code % q as u128) as u8);
        code /= q as u128;
    }
    let mut pos = 0;
    for &(s, t) in &quiver.arrows {
        let len = d[s] * d[t];
        mats.push(FqMatrix::from_vec(d[t], d[s], digits[pos..pos + len].to_vec()));
        pos += len;
    }
    Representation { dims: d.to_vec(), mats }
}

fn encode_tuple(rep: &Representation, q: u32) -> u128 {
    let mut code: u128 = 0;
    let mut mult: u128 = 1;
    for m in &rep.mats {
        for &x in &m.data {
            code += x as u128 * mult;
            mult *= q as u128;
        }
    }
    code
}

struct Orbit {
    min_code: u128,
    size: u128,
}

impl CategoryTable {
    pub fn build(quiver: Quiver, q: u32, bound: usize) -> Result<Self> {
        Self::build_with_budget(quiver, q, bound, DEFAULT_TUPLE_BUDGET)
    }

    pub fn build_with_budget(quiver: Quiver, q: u32, bound: usize, budget: u128) -> Result<Self> {
        if !is_supported_prime(q) {
            return Err(HallError::Domain(format!("q={} is not a supported prime (2, 3, 5)", q)));
        }
        if !quiver.is_acyclic() {
            return Err(HallError::Domain("quiver has an oriented cycle".into()));
        }
        let dvs = dim_vectors(quiver.n, bound);
        let mut spent: u128 = 0;
        let mut classes: Vec<IsoClass> = Vec::new();
        let mut lookup: BTreeMap<Vec<usize>, Vec<u32>> = BTreeMap::new();
        for d in &dvs {
            let len = tuple_len(&quiver, d);
            let count = qpow(q, len);
            spent += count;
            if spent > budget {
                return Err(HallError::Resource(format!(
                    "enumeration budget {} exceeded at dimension vector {:?}",
                    budget, d
                )));
            }
            let (orbit_of, orbits) = Self::orbits(&quiver, d, q, count);
            let mut order: Vec<usize> = (0..orbits.len()).collect();
            order.sort_by_key(|&o| {
                let r = decode_tuple(&quiver, d, orbits[o].min_code, q);
                r.entries()
            });
            let mut new_id = vec![0u32; orbits.len()];
            let group: u128 = d.iter().map(|&k| gl_order(k, q)).product();
            for &o in &order {
                let id = classes.len();
                new_id[o] = id as u32;
                let rep = decode_tuple(&quiver, d, orbits[o].min_code, q);
                if group % orbits[o].size != 0 {
                    return Err(HallError::Inconsistent("orbit size does not divide group order".into()));
                }
                classes.push(IsoClass { id, rep, aut: group / orbits[o].size });
            }
            let table: Vec<u32> = orbit_of.iter().map(|&o| new_id[o as usize]).collect();
            lookup.insert(d.clone(), table);
        }
        let k = classes.len();
        let mut hom = vec![vec![0usize; k]; k];
        let mut ext1 = vec![vec![0usize; k]; k];
        for x in 0..k {
            for y in 0..k {
                hom[x][y] = hom_dim(&quiver, &classes[x].rep, &classes[y].rep, q);
                ext1[x][y] = ext1_dim(&quiver, &classes[x].rep, &classes[y].rep, q);
            }
        }
        let mut table = CategoryTable {
            quiver,
            q,
            bound,
            classes,
            hom,
            ext1,
            hall: BTreeMap::new(),
            gamma: BTreeMap::new(),
            names: Vec::new(),
            dsum: BTreeMap::new(),
            lookup,
        };
        table.fill_direct_sums();
        table.fill_names();
        table.fill_hall()?;
        table.fill_gamma()?;
        table.check_ext_mass()?;
        Ok(table)
    }

    fn orbits(quiver: &Quiver, d: &[usize], q: u32, count: u128) -> (Vec<u32>, Vec<Orbit>) {
        const UNSEEN: u32 = u32::MAX;
        let mut orbit_of = vec![UNSEEN; count as usize];
        let mut orbits: Vec<Orbit> = Vec::new();
        // generators acting at each vertex, with inverses
        let mut gens: Vec<(usize, FqMatrix, FqMatrix)> = Vec::new();
        for v in 0..quiver.n {
            for g in gl_generators(d[v], q) {
                let gi = g.inverse(q).expect("generator is invertible");
                gens.push((v, g, gi));
            }
        }
        for start in 0..count {
            if orbit_of[start as usize] != UNSEEN {
                continue;
            }
            let oid = orbits.len() as u32;
            let mut stack = vec![start];
            orbit_of[start as usize] = oid;
            let mut size: u128 = 0;
            let mut min_code = start;
            while let Some(c) = stack.pop() {
                size += 1;
                if c < min_code {
                    min_code = c;
                }
                let rep = decode_tuple(quiver, d, c, q);
                for (v, g, gi) in &gens {
                    let mut moved = rep.clone();
                    for (a, &(s, t)) in quiver.arrows.iter().enumerate() {
                        if t == *v {
                            moved.mats[a] = g.mul(&moved.mats[a], q);
                        }
                        if s == *v {
                            moved.mats[a] = moved.mats[a].mul(gi, q);
                        }
                    }
                    let nc = encode_tuple(&moved, q);
                    if orbit_of[nc as usize] == UNSEEN {
                        orbit_of[nc as usize] = oid;
                        stack.push(nc);
                    }
                }
            }
            orbits.push(Orbit { min_code, size });
        }
        (orbit_of, orbits)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn n(&self) -> usize {
        self.quiver.n
    }

    pub fn zero_id(&self) -> ClassId {
        0
    }

    pub fn check_id(&self, x: ClassId) -> Result<()> {
        if x < self.classes.len() {
            Ok(())
        } else {
            Err(HallError::Lookup(format!("unknown class id {}", x)))
        }
    }

    pub fn rep(&self, x: ClassId) -> &Representation {
        &self.classes[x].rep
    }

    pub fn dims(&self, x: ClassId) -> &[usize] {
        &self.classes[x].rep.dims
    }

    pub fn class_vec(&self, x: ClassId) -> K0Vector {
        self.classes[x].rep.class()
    }

    pub fn total_dim(&self, x: ClassId) -> usize {
        self.classes[x].rep.total_dim()
    }

    pub fn aut(&self, x: ClassId) -> u128 {
        self.classes[x].aut
    }

    /// Iso class of an arbitrary representation within the bound.
    pub fn classify(&self, rep: &Representation) -> Result<ClassId> {
        let table = self.lookup.get(&rep.dims).ok_or_else(|| {
            HallError::Resource(format!("dimension vector {:?} exceeds the table bound {}", rep.dims, self.bound))
        })?;
        Ok(table[encode_tuple(rep, self.q) as usize] as usize)
    }

    /// Class of `X ⊕ Y`, when within the bound.
    pub fn direct_sum(&self, x: ClassId, y: ClassId) -> Option<ClassId> {
        if x == 0 {
            return Some(y);
        }
        if y == 0 {
            return Some(x);
        }
        self.dsum.get(&(x.min(y), x.max(y))).copied()
    }

    fn fill_direct_sums(&mut self) {
        let k = self.classes.len();
        for x in 1..k {
            for y in x..k {
                if self.total_dim(x) + self.total_dim(y) > self.bound {
                    continue;
                }
                let s = self.rep(x).direct_sum(self.rep(y));
                let id = self.classify(&s).expect("within bound");
                self.dsum.insert((x, y), id);
            }
        }
    }

    /// Indecomposable summands with multiplicity, in id order.
    pub fn decomposition(&self, x: ClassId) -> Vec<ClassId> {
        if x == 0 {
            return Vec::new();
        }
        for a in 1..x {
            for b in a..x {
                if self.dsum.get(&(a, b)) == Some(&x) {
                    let mut out = self.decomposition(a);
                    out.extend(self.decomposition(b));
                    out.sort();
                    return out;
                }
            }
        }
        vec![x]
    }

    pub fn is_indecomposable(&self, x: ClassId) -> bool {
        x != 0 && self.decomposition(x).len() == 1
    }

    fn fill_names(&mut self) {
        let k = self.classes.len();
        let mut names = vec![String::new(); k];
        names[0] = String::from("0");
        let is_a2 = self.quiver == Quiver::a2();
        for x in 1..k {
            let parts = self.decomposition(x);
            if parts.len() == 1 {
                let d = self.dims(x);
                let ones: Vec<usize> = (0..d.len()).filter(|&v| d[v] > 0).collect();
                names[x] = if ones.len() == 1 && d[ones[0]] == 1 {
                    if self.quiver.n == 1 {
                        String::from("S")
                    } else {
                        format!("S{}", ones[0] + 1)
                    }
                } else if is_a2 && d == [1, 1] {
                    String::from("P1")
                } else {
                    format!("M{}", x)
                };
            } else {
                let pieces: Vec<&str> = parts.iter().map(|&p| names[p].as_str()).collect();
                names[x] = pieces.join("⊕");
            }
        }
        self.names = names;
    }

    pub fn name(&self, x: ClassId) -> &str {
        &self.names[x]
    }

    /// Class with the given name; summands may be separated by `⊕` or `+`.
    pub fn find_by_name(&self, name: &str) -> Result<ClassId> {
        let name = name.trim();
        if let Some(rest) = name.strip_prefix('#') {
            let id: usize = rest.parse().map_err(|_| HallError::Lookup(format!("bad class id {:?}", name)))?;
            self.check_id(id)?;
            return Ok(id);
        }
        if name == "0" {
            return Ok(0);
        }
        let mut acc = 0;
        for part in name.split(|c| c == '⊕' || c == '+') {
            let part = part.trim();
            let ind = (1..self.len())
                .find(|&x| self.is_indecomposable(x) && self.names[x] == part)
                .ok_or_else(|| HallError::Lookup(format!("no indecomposable named {:?}", part)))?;
            acc = self
                .direct_sum(acc, ind)
                .ok_or_else(|| HallError::Resource(format!("{:?} exceeds the table bound", name)))?;
        }
        Ok(acc)
    }

    /// Ids of all classes with total dimension at most `d`.
    pub fn classes_up_to(&self, d: usize) -> Vec<ClassId> {
        (0..self.len()).filter(|&x| self.total_dim(x) <= d).collect()
    }

    /// Ids of all classes with the given dimension vector.
    pub fn classes_with_dims(&self, d: &[usize]) -> Vec<ClassId> {
        (0..self.len()).filter(|&x| self.dims(x) == d).collect()
    }

    /// Enumerate all arrow-stable subspace families of `rep`.
    pub fn for_each_subrep(&self, rep: &Representation, f: &mut dyn FnMut(&Subspaces)) {
        let n = self.quiver.n;
        let per_vertex: Vec<Vec<FqMatrix>> = (0..n)
            .map(|v| (0..=rep.dims[v]).flat_map(|k| subspaces(rep.dims[v], k, self.q)).collect())
            .collect();
        let mut choice = vec![0usize; n];
        loop {
            let sub: Subspaces = (0..n).map(|v| per_vertex[v][choice[v]].clone()).collect();
            if is_subrep(&self.quiver, rep, &sub, self.q) {
                f(&sub);
            }
            let mut i = 0;
            loop {
                if i == n {
                    return;
                }
                choice[i] += 1;
                if choice[i] == per_vertex[i].len() {
                    choice[i] = 0;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }

    fn fill_hall(&mut self) -> Result<()> {
        let mut hall: BTreeMap<(ClassId, ClassId, ClassId), u64> = BTreeMap::new();
        for c in 0..self.len() {
            let rep = self.rep(c).clone();
            let full = full_spaces(&rep);
            let zero = zero_spaces(&rep);
            let mut err = None;
            self.for_each_subrep(&rep, &mut |sub| {
                let b = subquotient(&self.quiver, &rep, &zero, sub, self.q);
                let a = subquotient(&self.quiver, &rep, sub, &full, self.q);
                match (self.classify(&a), self.classify(&b)) {
                    (Ok(a), Ok(b)) => *hall.entry((c, a, b)).or_insert(0) += 1,
                    (Err(e), _) | (_, Err(e)) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        self.hall = hall;
        Ok(())
    }

    fn fill_gamma(&mut self) -> Result<()> {
        let mut gamma: BTreeMap<(ClassId, ClassId, ClassId, ClassId), BigRational> = BTreeMap::new();
        let q = self.q;
        for a in 0..self.len() {
            for b in 0..self.len() {
                if self.total_dim(a) + self.total_dim(b) > self.bound {
                    continue;
                }
                let ra = self.rep(a);
                let rb = self.rep(b);
                let basis = hom_basis(&self.quiver, rb, ra, q);
                let flat: Vec<Vec<u8>> = (0..basis.len())
                    .map(|i| {
                        let mut e = vec![0u8; basis.len()];
                        e[i] = 1;
                        e
                    })
                    .collect();
                let mut counts: BTreeMap<(ClassId, ClassId), u128> = BTreeMap::new();
                for coeffs in SpanIter::new(&flat, basis.len(), q) {
                    let g = combine(&basis, &coeffs, rb, ra, q);
                    let ker = subquotient(&self.quiver, rb, &zero_spaces(rb), &kernel_spaces(&g, rb, q), q);
                    let coker = subquotient(&self.quiver, ra, &image_spaces(&g, ra, q), &full_spaces(ra), q);
                    let m = self.classify(&ker)?;
                    let n = self.classify(&coker)?;
                    *counts.entry((m, n)).or_insert(0) += self.aut(m) * self.aut(n);
                }
                let den = BigInt::from(self.aut(a)) * BigInt::from(self.aut(b));
                for ((m, n), c) in counts {
                    gamma.insert((m, n, a, b), BigRational::new(BigInt::from(c), den.clone()));
                }
            }
        }
        self.gamma = gamma;
        Ok(())
    }

    /// Sum over middle terms of the extension counts must recover `|Ext^1|`.
    fn check_ext_mass(&self) -> Result<()> {
        for a in 0..self.len() {
            for b in 0..self.len() {
                if self.total_dim(a) + self.total_dim(b) > self.bound {
                    continue;
                }
                let mut acc = BigRational::zero();
                for c in self.classes_with_dims(&add_dims(self.dims(a), self.dims(b))) {
                    acc += self.ext_count(a, b, c);
                }
                let expect = BigRational::from_integer(BigInt::from(qpow(self.q, self.ext1[a][b])));
                if acc != expect {
                    return Err(HallError::Inconsistent(format!(
                        "extension mass of ({}, {}) is {} but |Ext^1| = {}",
                        self.name(a),
                        self.name(b),
                        acc,
                        expect
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn hom_count(&self, x: ClassId, y: ClassId) -> u128 {
        qpow(self.q, self.hom[x][y])
    }

    pub fn ext1_count(&self, x: ClassId, y: ClassId) -> u128 {
        qpow(self.q, self.ext1[x][y])
    }

    /// `g^C_{AB}`.
    pub fn hall_number(&self, c: ClassId, a: ClassId, b: ClassId) -> u64 {
        self.hall.get(&(c, a, b)).copied().unwrap_or(0)
    }

    /// `|Ext^1(A, B)_C| = g^C_{AB} a_A a_B |Hom(A, B)| / a_C`.
    pub fn ext_count(&self, a: ClassId, b: ClassId, c: ClassId) -> BigRational {
        self.hall_constant(a, b, c) * BigRational::from_integer(BigInt::from(self.hom_count(a, b)))
    }

    /// Hall structure constant `|Ext^1(A, B)_C| / |Hom(A, B)| = g^C_{AB} a_A a_B / a_C`.
    pub fn hall_constant(&self, a: ClassId, b: ClassId, c: ClassId) -> BigRational {
        let g = self.hall_number(c, a, b);
        if g == 0 {
            return BigRational::zero();
        }
        BigRational::new(
            BigInt::from(g) * BigInt::from(self.aut(a)) * BigInt::from(self.aut(b)),
            BigInt::from(self.aut(c)),
        )
    }

    /// Middle terms `C` with a nonzero Hall number for `(A, B)`.
    pub fn middle_terms(&self, a: ClassId, b: ClassId) -> Vec<ClassId> {
        self.classes_with_dims(&add_dims(self.dims(a), self.dims(b)))
            .into_iter()
            .filter(|&c| self.hall_number(c, a, b) > 0)
            .collect()
    }

    /// `gamma^{MN}_{AB}`; requires `dim A + dim B <= bound`.
    pub fn gamma_count(&self, m: ClassId, n: ClassId, a: ClassId, b: ClassId) -> Result<BigRational> {
        if self.total_dim(a) + self.total_dim(b) > self.bound {
            return Err(HallError::Resource(format!(
                "four-term counts for ({}, {}) are not tabulated at bound {}",
                self.name(a),
                self.name(b),
                self.bound
            )));
        }
        Ok(self.gamma.get(&(m, n, a, b)).cloned().unwrap_or_else(BigRational::zero))
    }

    /// All `(M, N, gamma)` with nonzero `gamma^{MN}_{AB}`.
    pub fn gamma_terms(&self, a: ClassId, b: ClassId) -> Result<Vec<(ClassId, ClassId, BigRational)>> {
        if self.total_dim(a) + self.total_dim(b) > self.bound {
            return Err(HallError::Resource(format!(
                "four-term counts for ({}, {}) are not tabulated at bound {}",
                self.name(a),
                self.name(b),
                self.bound
            )));
        }
        Ok(self
            .gamma
            .range((0, 0, a, b)..)
            .filter(|(k, _)| k.2 == a && k.3 == b)
            .map(|(k, g)| (k.0, k.1, g.clone()))
            .collect())
    }

    pub fn euler_additive(&self, a: &[i64], b: &[i64]) -> i64 {
        self.quiver.euler_additive(a, b)
    }

    /// `<a, b> = q^{<a,b>_add}`.
    pub fn euler_form(&self, a: &[i64], b: &[i64]) -> CoeffElem {
        CoeffElem::q_int_power(self.q, self.euler_additive(a, b))
    }

    /// `(a, b) = <a, b><b, a>`.
    pub fn symmetric_euler(&self, a: &[i64], b: &[i64]) -> CoeffElem {
        CoeffElem::q_int_power(self.q, self.euler_additive(a, b) + self.euler_additive(b, a))
    }

    pub fn zero_class(&self) -> K0Vector {
        vec![0; self.quiver.n]
    }

    /// Rebuild from stored classes, re-deriving every table.
    pub fn verify_against(&self, other: &CategoryTable) -> Vec<String> {
        let mut diffs = Vec::new();
        if self.len() != other.len() {
            diffs.push(format!("class count {} vs {}", self.len(), other.len()));
            return diffs;
        }
        for x in 0..self.len() {
            if self.classes[x].rep != other.classes[x].rep {
                diffs.push(format!("class {} representative differs", x));
            }
            if self.classes[x].aut != other.classes[x].aut {
                diffs.push(format!("class {} automorphism count {} vs {}", x, self.classes[x].aut, other.classes[x].aut));
            }
        }
        if self.hom != other.hom {
            diffs.push(String::from("hom table differs"));
        }
        if self.ext1 != other.ext1 {
            diffs.push(String::from("ext1 table differs"));
        }
        if self.hall != other.hall {
            diffs.push(String::from("hall numbers differ"));
        }
        if self.gamma != other.gamma {
            diffs.push(String::from("four-term counts differ"));
        }
        diffs
    }
}

pub fn add_dims(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a1_small() {
        let t = CategoryTable::build(Quiver::a1(), 2, 2).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.name(1), "S");
        assert_eq!(t.name(2), "S⊕S");
        assert_eq!(t.aut(2), 6);
        assert_eq!(t.hall_number(2, 1, 1), 3);
    }

    #[test]
    fn a2_small() {
        let t = CategoryTable::build(Quiver::a2(), 2, 2).unwrap();
        assert_eq!(t.len(), 7);
        let p1 = t.find_by_name("P1").unwrap();
        assert_eq!(t.aut(p1), 1);
        let s1 = t.find_by_name("S1").unwrap();
        let s2 = t.find_by_name("S2").unwrap();
        assert_eq!(t.hall_number(p1, s1, s2), 1);
        assert_eq!(t.hom_count(s1, s2), 1);
    }

    #[test]
    fn a2_bound_three_has_thirteen_classes() {
        let t = CategoryTable::build(Quiver::a2(), 2, 3).unwrap();
        assert_eq!(t.len(), 13);
    }

    #[test]
    fn budget_is_enforced() {
        let err = CategoryTable::build_with_budget(Quiver::a2(), 2, 4, 10).unwrap_err();
        assert!(matches!(err, HallError::Resource(_)));
    }
}
