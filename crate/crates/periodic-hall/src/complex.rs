//! `Z/t`-graded complexes of representations: constructors, homology,
//! chain maps, and exact extension counting.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{HallError, Result};
use crate::fq::{complement_in, qpow, BlockSystem, FqMatrix, SpanIter, Term};
use crate::rep::{
    combine, full_spaces, hom_basis, hom_dim, ext1_dim, image_spaces, induced_map, is_subrep, kernel_spaces, subquotient, zero_spaces,
    K0Vector, Quiver, RepMorphism, Representation, Subspaces,
};
use crate::table::{CategoryTable, ClassId};

/// Default cap on the number of chain maps tried in iso and automorphism searches.
pub const DEFAULT_MAP_CAP: u128 = 1 << 16;

/// Default cap on the number of extension classes enumerated for one pair.
pub const DEFAULT_EXT_CAP: u128 = 1 << 22;

/// A `Z/t`-graded complex `M^0 -> M^1 -> ... -> M^{t-1} -> M^0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GradedComplex {
    pub t: usize,
    pub comps: Vec<Representation>,
    /// `diffs[k]: comps[k] -> comps[k + 1 mod t]`.
    pub diffs: Vec<RepMorphism>,
}

/// Homology classes and image dimension vectors, per degree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComplexInvariants {
    pub homology: Vec<ClassId>,
    /// `images[k]` is the dimension vector of `Im d^k`.
    pub images: Vec<Vec<usize>>,
}

impl ComplexInvariants {
    pub fn image_class(&self, k: usize) -> K0Vector {
        self.images[k].iter().map(|&x| x as i64).collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology.iter().all(|&h| h == 0)
    }
}

fn zero_morphism(x: &Representation, y: &Representation) -> RepMorphism {
    x.dims.iter().zip(y.dims.iter()).map(|(&a, &b)| FqMatrix::zeros(b, a)).collect()
}

impl GradedComplex {
    pub fn zero(quiver: &Quiver, t: usize) -> Self {
        let comps = vec![Representation::zero(quiver); t];
        let diffs = (0..t).map(|k| zero_morphism(&comps[k], &comps[(k + 1) % t])).collect();
        GradedComplex { t, comps, diffs }
    }

    /// Build and validate a complex.
    pub fn new(quiver: &Quiver, comps: Vec<Representation>, diffs: Vec<RepMorphism>, q: u32) -> Result<Self> {
        let t = comps.len();
        if t == 0 || diffs.len() != t {
            return Err(HallError::Domain("a complex needs t >= 1 components and t differentials".into()));
        }
        let c = GradedComplex { t, comps, diffs };
        c.validate(quiver, q)?;
        Ok(c)
    }

    pub fn validate(&self, quiver: &Quiver, q: u32) -> Result<()> {
        let t = self.t;
        for k in 0..t {
            let (x, y) = (&self.comps[k], &self.comps[(k + 1) % t]);
            let d = &self.diffs[k];
            if d.len() != quiver.n {
                return Err(HallError::Domain(format!("differential {} has the wrong vertex count", k)));
            }
            for v in 0..quiver.n {
                if d[v].rows != y.dims[v] || d[v].cols != x.dims[v] {
                    return Err(HallError::Domain(format!("differential {} has the wrong shape", k)));
                }
            }
            for (a, &(s, tt)) in quiver.arrows.iter().enumerate() {
                if d[tt].mul(&x.mats[a], q) != y.mats[a].mul(&d[s], q) {
                    return Err(HallError::Domain(format!("differential {} is not a morphism", k)));
                }
            }
            let d2 = &self.diffs[(k + 1) % t];
            for v in 0..quiver.n {
                if !d2[v].mul(&d[v], q).is_zero() {
                    return Err(HallError::Domain(format!("d∘d is nonzero at degree {}", k)));
                }
            }
        }
        Ok(())
    }

    /// Stalk complex with `x` in degree `i`.
    pub fn stalk(quiver: &Quiver, x: &Representation, i: usize, t: usize) -> Result<Self> {
        if i >= t {
            return Err(HallError::Domain(format!("degree {} out of range for t={}", i, t)));
        }
        let mut c = Self::zero(quiver, t);
        c.comps[i] = x.clone();
        c.reset_zero_diffs();
        Ok(c)
    }

    /// The contractible complex `K_{x,i}`: `x` in degrees `i-1` and `i` joined by the identity;
    /// for `t = 1` it is `(x ⊕ x, [[0, 1], [0, 0]])`.
    pub fn acyclic_k(quiver: &Quiver, x: &Representation, i: usize, t: usize) -> Result<Self> {
        if i >= t {
            return Err(HallError::Domain(format!("degree {} out of range for t={}", i, t)));
        }
        if t == 1 {
            let comp = x.direct_sum(x);
            let d = x
                .dims
                .iter()
                .map(|&n| {
                    let mut m = FqMatrix::zeros(2 * n, 2 * n);
                    m.put_block(0, n, &FqMatrix::identity(n));
                    m
                })
                .collect();
            return Ok(GradedComplex { t, comps: vec![comp], diffs: vec![d] });
        }
        let prev = (i + t - 1) % t;
        let mut c = Self::zero(quiver, t);
        c.comps[prev] = x.clone();
        c.comps[i] = x.clone();
        c.reset_zero_diffs();
        c.diffs[prev] = x.identity();
        Ok(c)
    }

    /// `⊕_i U_{tuple[i], i}`.
    pub fn stalk_sum(table: &CategoryTable, tuple: &[ClassId]) -> Self {
        let t = tuple.len();
        let comps: Vec<Representation> = tuple.iter().map(|&x| table.rep(x).clone()).collect();
        let mut c = GradedComplex { t, comps, diffs: Vec::new() };
        c.reset_zero_diffs();
        c
    }

    fn reset_zero_diffs(&mut self) {
        let t = self.t;
        self.diffs = (0..t).map(|k| zero_morphism(&self.comps[k], &self.comps[(k + 1) % t])).collect();
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        assert_eq!(self.t, other.t);
        let comps = self.comps.iter().zip(other.comps.iter()).map(|(a, b)| a.direct_sum(b)).collect();
        let diffs = self
            .diffs
            .iter()
            .zip(other.diffs.iter())
            .map(|(f, g)| f.iter().zip(g.iter()).map(|(a, b)| FqMatrix::direct_sum(a, b)).collect())
            .collect();
        GradedComplex { t: self.t, comps, diffs }
    }

    pub fn has_zero_differentials(&self) -> bool {
        self.diffs.iter().all(|d| d.iter().all(|m| m.is_zero()))
    }

    pub fn total_dim(&self) -> usize {
        self.comps.iter().map(|c| c.total_dim()).sum()
    }

    pub fn degree_dims(&self) -> Vec<Vec<usize>> {
        self.comps.iter().map(|c| c.dims.clone()).collect()
    }

    /// `C_t`: repeat a 1-periodic complex in every degree.
    pub fn inflate(&self, t: usize) -> Result<Self> {
        if self.t != 1 {
            return Err(HallError::Domain("only 1-periodic complexes can be inflated".into()));
        }
        if t <= 1 {
            return Err(HallError::Domain("inflation needs a target period t > 1".into()));
        }
        Ok(GradedComplex { t, comps: vec![self.comps[0].clone(); t], diffs: vec![self.diffs[0].clone(); t] })
    }

    /// `C_1`: total object with the cyclic differential.
    pub fn collapse(&self) -> Self {
        let n = self.comps[0].dims.len();
        let mut comp = self.comps[0].clone();
        for c in &self.comps[1..] {
            comp = comp.direct_sum(c);
        }
        let mut d = Vec::with_capacity(n);
        for v in 0..n {
            let offs: Vec<usize> = self
                .comps
                .iter()
                .scan(0, |acc, c| {
                    let o = *acc;
                    *acc += c.dims[v];
                    Some(o)
                })
                .collect();
            let total = comp.dims[v];
            let mut m = FqMatrix::zeros(total, total);
            for k in 0..self.t {
                let k1 = (k + 1) % self.t;
                let blk = &self.diffs[k][v];
                if self.t == 1 {
                    m.put_block(0, 0, blk);
                } else {
                    m.put_block(offs[k1], offs[k], blk);
                }
            }
            d.push(m);
        }
        GradedComplex { t: 1, comps: vec![comp], diffs: vec![d] }
    }

    /// `M[s]`: component `j` is `M^{j+s}`, differentials negated for odd `s`.
    pub fn shift(&self, s: usize, q: u32) -> Self {
        let t = self.t;
        let comps = (0..t).map(|j| self.comps[(j + s) % t].clone()).collect();
        let diffs = (0..t)
            .map(|j| {
                let d = &self.diffs[(j + s) % t];
                if s % 2 == 1 {
                    d.iter().map(|m| m.neg(q)).collect()
                } else {
                    d.clone()
                }
            })
            .collect();
        GradedComplex { t, comps, diffs }
    }

    /// `H^k = Ker d^k / Im d^{k-1}`.
    pub fn homology(&self, quiver: &Quiver, k: usize, q: u32) -> Representation {
        let t = self.t;
        let prev = (k + t - 1) % t;
        let x = &self.comps[k];
        let ker = kernel_spaces(&self.diffs[k], x, q);
        let im = image_spaces(&self.diffs[prev], x, q);
        subquotient(quiver, x, &im, &ker, q)
    }

    pub fn image_dims(&self, k: usize, q: u32) -> Vec<usize> {
        self.diffs[k].iter().map(|m| m.rank(q)).collect()
    }

    pub fn is_acyclic(&self, quiver: &Quiver, q: u32) -> bool {
        (0..self.t).all(|k| self.homology(quiver, k, q).is_zero())
    }

    pub fn invariants(&self, table: &CategoryTable) -> Result<ComplexInvariants> {
        let q = table.q;
        let mut homology = Vec::with_capacity(self.t);
        let mut images = Vec::with_capacity(self.t);
        for k in 0..self.t {
            homology.push(table.classify(&self.homology(&table.quiver, k, q))?);
            images.push(self.image_dims(k, q));
        }
        Ok(ComplexInvariants { homology, images })
    }
}

/// `invariants_of`.
pub fn invariants_of(table: &CategoryTable, m: &GradedComplex) -> Result<ComplexInvariants> {
    m.invariants(table)
}

/// Basis of the chain maps `m -> n`, each given per degree and vertex.
pub fn chain_map_basis(quiver: &Quiver, m: &GradedComplex, n: &GradedComplex, q: u32) -> Vec<Vec<RepMorphism>> {
    let t = m.t;
    let nv = quiver.n;
    let var = |k: usize, v: usize| k * nv + v;
    let mut shapes = Vec::with_capacity(t * nv);
    for k in 0..t {
        for v in 0..nv {
            shapes.push((n.comps[k].dims[v], m.comps[k].dims[v]));
        }
    }
    let mut sys = BlockSystem::new(q, shapes);
    for k in 0..t {
        let (x, y) = (&m.comps[k], &n.comps[k]);
        for (a, &(s, tt)) in quiver.arrows.iter().enumerate() {
            let it = FqMatrix::identity(y.dims[tt]);
            let is = FqMatrix::identity(x.dims[s]);
            sys.equation(
                y.dims[tt],
                x.dims[s],
                &[
                    Term { left: &it, var: var(k, tt), right: &x.mats[a], negate: false },
                    Term { left: &y.mats[a], var: var(k, s), right: &is, negate: true },
                ],
            );
        }
        let k1 = (k + 1) % t;
        for v in 0..nv {
            // d_N^k f^k = f^{k+1} d_M^k
            let rows = n.comps[k1].dims[v];
            let cols = m.comps[k].dims[v];
            let ir = FqMatrix::identity(n.comps[k1].dims[v]);
            let ic = FqMatrix::identity(m.comps[k].dims[v]);
            sys.equation(
                rows,
                cols,
                &[
                    Term { left: &n.diffs[k][v], var: var(k, v), right: &ic, negate: false },
                    Term { left: &ir, var: var(k1, v), right: &m.diffs[k][v], negate: true },
                ],
            );
        }
    }
    sys.solve()
        .iter()
        .map(|sol| {
            let blocks = sys.decode(sol);
            (0..t).map(|k| (0..nv).map(|v| blocks[var(k, v)].clone()).collect()).collect()
        })
        .collect()
}

pub fn complex_hom_dim(quiver: &Quiver, m: &GradedComplex, n: &GradedComplex, q: u32) -> usize {
    chain_map_basis(quiver, m, n, q).len()
}

/// `|Hom(m, n)|` in the category of `Z/t`-graded complexes.
pub fn complex_hom_count(quiver: &Quiver, m: &GradedComplex, n: &GradedComplex, q: u32) -> u128 {
    qpow(q, complex_hom_dim(quiver, m, n, q))
}

fn combine_chain(basis: &[Vec<RepMorphism>], coeffs: &[u8], m: &GradedComplex, n: &GradedComplex, q: u32) -> Vec<RepMorphism> {
    let mut out: Vec<RepMorphism> = (0..m.t).map(|k| zero_morphism(&m.comps[k], &n.comps[k])).collect();
    for (b, &c) in basis.iter().zip(coeffs.iter()) {
        if c == 0 {
            continue;
        }
        for k in 0..m.t {
            for v in 0..out[k].len() {
                let mut scaled = b[k][v].clone();
                for e in scaled.data.iter_mut() {
                    *e = ((*e as u32 * c as u32) % q) as u8;
                }
                out[k][v] = out[k][v].add(&scaled, q);
            }
        }
    }
    out
}

fn unit_vectors(n: usize) -> Vec<Vec<u8>> {
    (0..n)
        .map(|i| {
            let mut e = vec![0u8; n];
            e[i] = 1;
            e
        })
        .collect()
}

fn chain_is_iso(f: &[RepMorphism], q: u32) -> bool {
    f.iter().all(|per| per.iter().all(|m| m.rows == m.cols && m.is_invertible(q)))
}

/// Whether two complexes are isomorphic, by searching the chain maps.
pub fn complexes_isomorphic(quiver: &Quiver, m: &GradedComplex, n: &GradedComplex, q: u32, cap: u128) -> Result<bool> {
    if m.t != n.t || m.degree_dims() != n.degree_dims() {
        return Ok(false);
    }
    for k in 0..m.t {
        if m.image_dims(k, q) != n.image_dims(k, q) {
            return Ok(false);
        }
    }
    let basis = chain_map_basis(quiver, m, n, q);
    let size = qpow(q, basis.len());
    if size > cap {
        return Err(HallError::Resource(format!("chain iso search over {} maps exceeds the cap {}", size, cap)));
    }
    let units = unit_vectors(basis.len());
    for coeffs in SpanIter::new(&units, basis.len(), q) {
        if chain_is_iso(&combine_chain(&basis, &coeffs, m, n, q), q) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `|Aut(m)|` by testing every chain endomorphism for invertibility.
pub fn complex_aut_count(quiver: &Quiver, m: &GradedComplex, q: u32, cap: u128) -> Result<u128> {
    let basis = chain_map_basis(quiver, m, m, q);
    let size = qpow(q, basis.len());
    if size > cap {
        return Err(HallError::Resource(format!("automorphism search over {} maps exceeds the cap {}", size, cap)));
    }
    let units = unit_vectors(basis.len());
    let mut count = 0u128;
    for coeffs in SpanIter::new(&units, basis.len(), q) {
        if chain_is_iso(&combine_chain(&basis, &coeffs, m, m, q), q) {
            count += 1;
        }
    }
    Ok(count)
}

/// The linear data of extensions `0 -> b -> L -> a -> 0` on the fixed space `L = b ⊕ a`.
///
/// Unknowns are the off-diagonal arrow blocks `eps^k_arrow: a^k_s -> b^k_t` and
/// differential blocks `h^k_v: a^k_v -> b^{k+1}_v`.
pub struct ExtensionSpace<'a> {
    quiver: &'a Quiver,
    q: u32,
    pub a: &'a GradedComplex,
    pub b: &'a GradedComplex,
    sys: BlockSystem,
    /// Basis of the cocycles.
    pub cocycles: Vec<Vec<u8>>,
    /// Basis of a complement of the coboundaries inside the cocycles.
    pub classes: Vec<Vec<u8>>,
    pub hom_dim: usize,
    pub gauge_dim: usize,
}

impl<'a> ExtensionSpace<'a> {
    pub fn new(quiver: &'a Quiver, a: &'a GradedComplex, b: &'a GradedComplex, q: u32) -> Self {
        let t = a.t;
        let nv = quiver.n;
        let na = quiver.arrows.len();
        let eps = |k: usize, ar: usize| k * na + ar;
        let hv = |k: usize, v: usize| t * na + k * nv + v;
        let mut shapes = Vec::new();
        for k in 0..t {
            for &(s, tt) in &quiver.arrows {
                shapes.push((b.comps[k].dims[tt], a.comps[k].dims[s]));
            }
        }
        for k in 0..t {
            let k1 = (k + 1) % t;
            for v in 0..nv {
                shapes.push((b.comps[k1].dims[v], a.comps[k].dims[v]));
            }
        }
        let mut sys = BlockSystem::new(q, shapes);
        for k in 0..t {
            let k1 = (k + 1) % t;
            for (ar, &(s, tt)) in quiver.arrows.iter().enumerate() {
                // d2^k_t eps^k + h^k_t alpha^k - beta^{k+1} h^k_s - eps^{k+1} d1^k_s = 0
                let rows = b.comps[k1].dims[tt];
                let cols = a.comps[k].dims[s];
                let ir = FqMatrix::identity(rows);
                let ic = FqMatrix::identity(cols);
                sys.equation(
                    rows,
                    cols,
                    &[
                        Term { left: &b.diffs[k][tt], var: eps(k, ar), right: &ic, negate: false },
                        Term { left: &ir, var: hv(k, tt), right: &a.comps[k].mats[ar], negate: false },
                        Term { left: &b.comps[k1].mats[ar], var: hv(k, s), right: &ic, negate: true },
                        Term { left: &ir, var: eps(k1, ar), right: &a.diffs[k][s], negate: true },
                    ],
                );
            }
            let k2 = (k + 2) % t;
            for v in 0..nv {
                // d2^{k+1} h^k + h^{k+1} d1^k = 0
                let rows = b.comps[k2].dims[v];
                let cols = a.comps[k].dims[v];
                let ir = FqMatrix::identity(rows);
                let ic = FqMatrix::identity(cols);
                sys.equation(
                    rows,
                    cols,
                    &[
                        Term { left: &b.diffs[k1][v], var: hv(k, v), right: &ic, negate: false },
                        Term { left: &ir, var: hv(k1, v), right: &a.diffs[k][v], negate: false },
                    ],
                );
            }
        }
        let cocycles = sys.solve();
        // coboundaries of the gauge maps phi^k_v: a^k_v -> b^k_v
        let mut coboundaries: Vec<Vec<u8>> = Vec::new();
        let mut gauge_dim = 0;
        for k in 0..t {
            let kp = (k + t - 1) % t;
            for v in 0..nv {
                let (r, c) = (b.comps[k].dims[v], a.comps[k].dims[v]);
                gauge_dim += r * c;
                for i in 0..r {
                    for j in 0..c {
                        let mut phi = FqMatrix::zeros(r, c);
                        phi.set(i, j, 1);
                        let mut blocks: Vec<FqMatrix> =
                            (0..sys_shapes_len(t, na, nv)).map(|_| FqMatrix::zeros(0, 0)).collect();
                        // eps' = beta phi_s - phi_t alpha, for arrows touching v in degree k
                        for kk in 0..t {
                            for (ar, &(s, tt)) in quiver.arrows.iter().enumerate() {
                                let mut m = FqMatrix::zeros(b.comps[kk].dims[tt], a.comps[kk].dims[s]);
                                if kk == k {
                                    if s == v {
                                        m = m.add(&b.comps[k].mats[ar].mul(&phi, q), q);
                                    }
                                    if tt == v {
                                        m = m.sub(&phi.mul(&a.comps[k].mats[ar], q), q);
                                    }
                                }
                                blocks[eps(kk, ar)] = m;
                            }
                        }
                        // h'^k = d2^k phi^k - phi^{k+1} d1^k
                        for kk in 0..t {
                            let kk1 = (kk + 1) % t;
                            for w in 0..nv {
                                let mut m = FqMatrix::zeros(b.comps[kk1].dims[w], a.comps[kk].dims[w]);
                                if w == v {
                                    if kk == k {
                                        m = m.add(&b.diffs[k][v].mul(&phi, q), q);
                                    }
                                    if kk == kp {
                                        m = m.sub(&phi.mul(&a.diffs[kp][v], q), q);
                                    }
                                }
                                blocks[hv(kk, w)] = m;
                            }
                        }
                        coboundaries.push(sys.encode(&blocks));
                    }
                }
            }
        }
        let n = sys.num_unknowns();
        let z = FqMatrix::from_columns(n, &cocycles);
        let bnd = FqMatrix::from_columns(n, &coboundaries).column_basis(q);
        let comp = complement_in(&bnd, &z, q);
        let classes = (0..comp.cols).map(|j| comp.column(j)).collect();
        let hom_dim = complex_hom_dim(quiver, a, b, q);
        ExtensionSpace { quiver, q, a, b, sys, cocycles, classes, hom_dim, gauge_dim }
    }

    /// `dim Ext^1(a, b)`.
    pub fn ext_dim(&self) -> usize {
        self.classes.len()
    }

    /// The middle term determined by a point of the cocycle space.
    pub fn middle_term(&self, z: &[u8]) -> GradedComplex {
        let (a, b) = (self.a, self.b);
        let t = a.t;
        let na = self.quiver.arrows.len();
        let nv = self.quiver.n;
        let blocks = self.sys.decode(z);
        let mut comps = Vec::with_capacity(t);
        for k in 0..t {
            let dims: Vec<usize> = (0..nv).map(|v| b.comps[k].dims[v] + a.comps[k].dims[v]).collect();
            let mats = (0..na)
                .map(|ar| {
                    FqMatrix::block2(
                        &b.comps[k].mats[ar],
                        &blocks[k * na + ar],
                        &FqMatrix::zeros(a.comps[k].mats[ar].rows, b.comps[k].mats[ar].cols),
                        &a.comps[k].mats[ar],
                    )
                })
                .collect();
            comps.push(Representation { dims, mats });
        }
        let diffs = (0..t)
            .map(|k| {
                (0..nv)
                    .map(|v| {
                        let db = &b.diffs[k][v];
                        let da = &a.diffs[k][v];
                        FqMatrix::block2(db, &blocks[t * na + k * nv + v], &FqMatrix::zeros(da.rows, db.cols), da)
                    })
                    .collect()
            })
            .collect();
        GradedComplex { t, comps, diffs }
    }

    pub fn class_count(&self) -> u128 {
        qpow(self.q, self.classes.len())
    }

    /// Representatives of all extension classes, one per class.
    pub fn class_points(&self) -> SpanIter<'_> {
        SpanIter::new(&self.classes, self.sys.num_unknowns(), self.q)
    }
}

fn sys_shapes_len(t: usize, na: usize, nv: usize) -> usize {
    t * na + t * nv
}

/// `|Ext^1(a, b)|` in the category of complexes.
pub fn ext1_cardinality(quiver: &Quiver, a: &GradedComplex, b: &GradedComplex, q: u32) -> u128 {
    ExtensionSpace::new(quiver, a, b, q).class_count()
}

pub fn complex_ext1_dim(quiver: &Quiver, a: &GradedComplex, b: &GradedComplex, q: u32) -> usize {
    ExtensionSpace::new(quiver, a, b, q).ext_dim()
}

/// Additive exponent of `|Hom(a, b)| / |Ext^1(a, b)|`.
pub fn complex_euler_exponent(quiver: &Quiver, a: &GradedComplex, b: &GradedComplex, q: u32) -> i64 {
    let e = ExtensionSpace::new(quiver, a, b, q);
    e.hom_dim as i64 - e.ext_dim() as i64
}

/// Number of extension classes of `a` by `b`, grouped by the invariants of the middle term.
#[derive(Clone, Debug)]
pub struct ExtensionCensus {
    pub hom_dim: usize,
    pub ext_dim: usize,
    pub counts: BTreeMap<ComplexInvariants, u128>,
}

pub fn extension_census(table: &CategoryTable, a: &GradedComplex, b: &GradedComplex, cap: u128) -> Result<ExtensionCensus> {
    let space = ExtensionSpace::new(&table.quiver, a, b, table.q);
    if space.class_count() > cap {
        return Err(HallError::Resource(format!(
            "{} extension classes exceed the cap {}",
            space.class_count(),
            cap
        )));
    }
    let mut counts = BTreeMap::new();
    for z in space.class_points() {
        let inv = space.middle_term(&z).invariants(table)?;
        *counts.entry(inv).or_insert(0u128) += 1;
    }
    Ok(ExtensionCensus { hom_dim: space.hom_dim, ext_dim: space.ext_dim(), counts })
}

/// Middle terms up to chain isomorphism with `|Ext^1(a, b)_L|`.
pub fn complex_ext_structure(
    table: &CategoryTable,
    a: &GradedComplex,
    b: &GradedComplex,
    cap: u128,
) -> Result<Vec<(GradedComplex, u128)>> {
    let q = table.q;
    let space = ExtensionSpace::new(&table.quiver, a, b, q);
    if space.class_count() > cap {
        return Err(HallError::Resource(format!(
            "{} extension classes exceed the cap {}",
            space.class_count(),
            cap
        )));
    }
    let mut groups: BTreeMap<ComplexInvariants, Vec<(GradedComplex, u128)>> = BTreeMap::new();
    for z in space.class_points() {
        let l = space.middle_term(&z);
        let inv = l.invariants(table)?;
        let bucket = groups.entry(inv).or_default();
        let mut found = false;
        for (rep, count) in bucket.iter_mut() {
            if complexes_isomorphic(&table.quiver, rep, &l, q, DEFAULT_MAP_CAP)? {
                *count += 1;
                found = true;
                break;
            }
        }
        if !found {
            bucket.push((l, 1));
        }
    }
    Ok(groups.into_values().flatten().collect())
}

/// Per-degree subspace families of a complex.
pub type GradedSubspaces = Vec<Subspaces>;

fn for_each_subcomplex(table: &CategoryTable, l: &GradedComplex, f: &mut dyn FnMut(&GradedSubspaces) -> Result<()>) -> Result<()> {
    let q = table.q;
    let t = l.t;
    let mut per_degree: Vec<Vec<Subspaces>> = Vec::with_capacity(t);
    for k in 0..t {
        let mut subs = Vec::new();
        table.for_each_subrep(&l.comps[k], &mut |s| subs.push(s.clone()));
        per_degree.push(subs);
    }
    let mut choice = vec![0usize; t];
    loop {
        let pick: GradedSubspaces = (0..t).map(|k| per_degree[k][choice[k]].clone()).collect();
        let stable = (0..t).all(|k| {
            let k1 = (k + 1) % t;
            (0..table.quiver.n).all(|v| {
                let img = l.diffs[k][v].mul(&pick[k][v], q);
                let target = &pick[k1][v];
                let mut joined = FqMatrix::zeros(target.rows, target.cols + img.cols);
                joined.put_block(0, 0, target);
                joined.put_block(0, target.cols, &img);
                joined.rank(q) == target.cols
            })
        });
        if stable {
            f(&pick)?;
        }
        let mut i = 0;
        loop {
            if i == t {
                return Ok(());
            }
            choice[i] += 1;
            if choice[i] == per_degree[i].len() {
                choice[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

/// The graded subquotient `w / u` of a complex.
pub fn complex_subquotient(quiver: &Quiver, l: &GradedComplex, u: &GradedSubspaces, w: &GradedSubspaces, q: u32) -> GradedComplex {
    let t = l.t;
    let comps = (0..t).map(|k| subquotient(quiver, &l.comps[k], &u[k], &w[k], q)).collect();
    let diffs = (0..t)
        .map(|k| {
            let k1 = (k + 1) % t;
            (0..quiver.n)
                .map(|v| induced_map(&l.diffs[k][v], &u[k][v], &w[k][v], &u[k1][v], &w[k1][v], q))
                .collect()
        })
        .collect();
    GradedComplex { t, comps, diffs }
}

/// `g^L_{a b}`: subcomplexes of `l` isomorphic to `b` with quotient isomorphic to `a`.
pub fn subcomplex_count(table: &CategoryTable, l: &GradedComplex, a: &GradedComplex, b: &GradedComplex) -> Result<u64> {
    let q = table.q;
    let quiver = &table.quiver;
    let zero: GradedSubspaces = l.comps.iter().map(zero_spaces).collect();
    let full: GradedSubspaces = l.comps.iter().map(full_spaces).collect();
    let mut count = 0u64;
    let bd = b.degree_dims();
    for_each_subcomplex(table, l, &mut |sub| {
        let dims: Vec<Vec<usize>> = sub.iter().map(|s| s.iter().map(|m| m.cols).collect()).collect();
        if dims != bd {
            return Ok(());
        }
        for k in 0..l.t {
            debug_assert!(is_subrep(quiver, &l.comps[k], &sub[k], q));
        }
        let s = complex_subquotient(quiver, l, &zero, sub, q);
        let quo = complex_subquotient(quiver, l, sub, &full, q);
        if complexes_isomorphic(quiver, &s, b, q, DEFAULT_MAP_CAP)? && complexes_isomorphic(quiver, &quo, a, q, DEFAULT_MAP_CAP)? {
            count += 1;
        }
        Ok(())
    })?;
    Ok(count)
}

/// `|Hom_D(a, b[s])|` for complexes with zero differentials.
///
/// Degree `k` contributes `|Hom(a^k, b^{k+s})| * |Ext^1(a^k, b^{k+s-1})|`;
/// for `t = 1` the single degree contributes `|Hom| * |Ext^1|`.
pub fn derived_hom_count(quiver: &Quiver, a: &GradedComplex, b: &GradedComplex, s: usize, q: u32) -> Result<u128> {
    Ok(qpow(q, derived_hom_dim(quiver, a, b, s, q)?))
}

pub fn derived_hom_dim(quiver: &Quiver, a: &GradedComplex, b: &GradedComplex, s: usize, q: u32) -> Result<usize> {
    if !a.has_zero_differentials() || !b.has_zero_differentials() {
        return Err(HallError::Domain("derived Hom is computed for complexes with zero differentials".into()));
    }
    if a.t != b.t {
        return Err(HallError::Domain("periods differ".into()));
    }
    let t = a.t;
    let mut dim = 0;
    for k in 0..t {
        let x = &a.comps[k];
        dim += hom_dim(quiver, x, &b.comps[(k + s) % t], q);
        dim += ext1_dim(quiver, x, &b.comps[(k + s + t - 1) % t], q);
    }
    Ok(dim)
}

/// Visit every complex whose components are table representatives of total
/// dimension at most `max_total`, once per choice of differentials.
///
/// Fails with a resource error after `budget` differential assignments.
pub fn for_each_complex(
    table: &CategoryTable,
    t: usize,
    max_total: usize,
    budget: u128,
    f: &mut dyn FnMut(&GradedComplex) -> Result<()>,
) -> Result<()> {
    if t == 0 {
        return Err(HallError::Domain("the period t must be at least 1".into()));
    }
    let classes = table.classes_up_to(max_total.min(table.bound));
    let mut tried = 0u128;
    let mut tuple = vec![0usize; t];
    for_each_tuple(table, &classes, &mut tuple, 0, max_total, &mut |tuple| {
        complexes_on(table, tuple, budget, &mut tried, f)
    })
}

fn for_each_tuple(
    table: &CategoryTable,
    classes: &[ClassId],
    tuple: &mut Vec<ClassId>,
    k: usize,
    left: usize,
    f: &mut dyn FnMut(&[ClassId]) -> Result<()>,
) -> Result<()> {
    if k == tuple.len() {
        return f(tuple);
    }
    for &c in classes {
        let d = table.total_dim(c);
        if d > left {
            continue;
        }
        tuple[k] = c;
        for_each_tuple(table, classes, tuple, k + 1, left - d, f)?;
    }
    Ok(())
}

fn complexes_on(
    table: &CategoryTable,
    tuple: &[ClassId],
    budget: u128,
    tried: &mut u128,
    f: &mut dyn FnMut(&GradedComplex) -> Result<()>,
) -> Result<()> {
    let (quiver, q) = (&table.quiver, table.q);
    let t = tuple.len();
    let comps: Vec<Representation> = tuple.iter().map(|&c| table.rep(c).clone()).collect();
    let bases: Vec<Vec<RepMorphism>> =
        (0..t).map(|k| hom_basis(quiver, &comps[k], &comps[(k + 1) % t], q)).collect();
    let lens: Vec<usize> = bases.iter().map(|b| b.len()).collect();
    let total: usize = lens.iter().sum();
    let mut coeffs = vec![0u8; total];
    loop {
        *tried += 1;
        if *tried > budget {
            return Err(HallError::Resource(format!("more than {} differential assignments", budget)));
        }
        let mut off = 0;
        let diffs: Vec<RepMorphism> = (0..t)
            .map(|k| {
                let d = combine(&bases[k], &coeffs[off..off + lens[k]], &comps[k], &comps[(k + 1) % t], q);
                off += lens[k];
                d
            })
            .collect();
        let square_zero = (0..t).all(|k| {
            let next = &diffs[(k + 1) % t];
            diffs[k].iter().zip(next.iter()).all(|(a, b)| b.mul(a, q).is_zero())
        });
        if square_zero {
            f(&GradedComplex { t, comps: comps.clone(), diffs })?;
        }
        let mut i = 0;
        loop {
            if i == total {
                return Ok(());
            }
            coeffs[i] += 1;
            if coeffs[i] as u32 == q {
                coeffs[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

/// `Im d^k` as a representation.
pub fn image_rep(quiver: &Quiver, m: &GradedComplex, k: usize, q: u32) -> Representation {
    let y = &m.comps[(k + 1) % m.t];
    subquotient(quiver, y, &zero_spaces(y), &image_spaces(&m.diffs[k], y, q), q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1_table() -> CategoryTable {
        CategoryTable::build(Quiver::a1(), 2, 3).unwrap()
    }

    #[test]
    fn stalk_homology() {
        let table = a1_table();
        let s = table.find_by_name("S").unwrap();
        let u = GradedComplex::stalk(&table.quiver, table.rep(s), 1, 3).unwrap();
        let inv = u.invariants(&table).unwrap();
        assert_eq!(inv.homology, vec![0, s, 0]);
        assert!(inv.images.iter().all(|d| d.iter().all(|&x| x == 0)));
    }

    #[test]
    fn k_complex_is_acyclic() {
        let table = a1_table();
        let s = table.rep(table.find_by_name("S").unwrap()).clone();
        for t in 1..=3 {
            for i in 0..t {
                let k = GradedComplex::acyclic_k(&table.quiver, &s, i, t).unwrap();
                k.validate(&table.quiver, 2).unwrap();
                let inv = k.invariants(&table).unwrap();
                assert!(inv.is_acyclic());
                let prev = (i + t - 1) % t;
                assert_eq!(inv.images[prev], vec![1]);
            }
        }
    }

    #[test]
    fn one_periodic_stalk_self_extensions() {
        let table = a1_table();
        let s = table.rep(table.find_by_name("S").unwrap()).clone();
        let u = GradedComplex::stalk(&table.quiver, &s, 0, 1).unwrap();
        let st = complex_ext_structure(&table, &u, &u, DEFAULT_EXT_CAP).unwrap();
        assert_eq!(st.len(), 2);
        assert!(st.iter().all(|(_, c)| *c == 1));
        assert_eq!(ext1_cardinality(&table.quiver, &u, &u, 2), 2);
        assert_eq!(derived_hom_count(&table.quiver, &u, &u, 1, 2).unwrap(), 2);
    }

    #[test]
    fn two_periodic_stalk_extensions() {
        let table = a1_table();
        let s = table.rep(table.find_by_name("S").unwrap()).clone();
        let u0 = GradedComplex::stalk(&table.quiver, &s, 0, 2).unwrap();
        let u1 = GradedComplex::stalk(&table.quiver, &s, 1, 2).unwrap();
        let st = complex_ext_structure(&table, &u0, &u1, DEFAULT_EXT_CAP).unwrap();
        assert_eq!(st.len(), 2);
        let k1 = GradedComplex::acyclic_k(&table.quiver, &s, 1, 2).unwrap();
        assert!(st.iter().any(|(l, _)| complexes_isomorphic(&table.quiver, l, &k1, 2, DEFAULT_MAP_CAP).unwrap()));
    }

    #[test]
    fn k_to_stalk_hom() {
        let table = a1_table();
        let s = table.rep(table.find_by_name("S").unwrap()).clone();
        let k = GradedComplex::acyclic_k(&table.quiver, &s, 0, 1).unwrap();
        let u = GradedComplex::stalk(&table.quiver, &s, 0, 1).unwrap();
        assert_eq!(complex_hom_count(&table.quiver, &k, &u, 2), 2);
    }

    #[test]
    fn enumerates_one_periodic_a1_complexes() {
        let table = CategoryTable::build(Quiver::a1(), 2, 2).unwrap();
        let mut count = 0;
        let mut acyclic = 0;
        for_each_complex(&table, 1, 2, 1 << 20, &mut |m| {
            count += 1;
            if m.is_acyclic(&table.quiver, 2) {
                acyclic += 1;
            }
            Ok(())
        })
        .unwrap();
        // zero, S with d = 0, and the 2x2 matrices over F_2 squaring to zero
        assert_eq!(count, 1 + 1 + 4);
        assert_eq!(acyclic, 1 + 3);
    }

    #[test]
    fn collapse_and_inflate() {
        let table = a1_table();
        let s = table.rep(table.find_by_name("S").unwrap()).clone();
        let k = GradedComplex::acyclic_k(&table.quiver, &s, 0, 1).unwrap();
        let k3 = k.inflate(3).unwrap();
        k3.validate(&table.quiver, 2).unwrap();
        assert!(k3.is_acyclic(&table.quiver, 2));
        let u = GradedComplex::stalk(&table.quiver, &s, 0, 2).unwrap();
        let c = u.collapse();
        assert_eq!(c.invariants(&table).unwrap().homology, vec![table.find_by_name("S").unwrap()]);
        assert!(GradedComplex::zero(&table.quiver, 2).collapse().total_dim() == 0);
        assert!(k.inflate(1).is_err());
    }
}
