//! Quivers, their representations over `F_q`, and morphism spaces.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{HallError, Result};
use crate::fq::{complement_in, coordinates, BlockSystem, FqMatrix, Term};

/// A finite quiver given by its vertex count and arrow list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub n: usize,
    pub arrows: Vec<(usize, usize)>,
}

impl Quiver {
    pub fn new(n: usize, arrows: Vec<(usize, usize)>) -> Result<Self> {
        let quiver = Quiver { n, arrows };
        for &(s, t) in &quiver.arrows {
            if s >= n || t >= n {
                return Err(HallError::Domain(format!("arrow {}->{} out of range", s, t)));
            }
        }
        if !quiver.is_acyclic() {
            return Err(HallError::Domain("quiver has an oriented cycle".into()));
        }
        Ok(quiver)
    }

    /// One vertex, no arrows.
    pub fn a1() -> Self {
        Quiver { n: 1, arrows: Vec::new() }
    }

    /// Two vertices with one arrow `0 -> 1`.
    pub fn a2() -> Self {
        Quiver { n: 2, arrows: vec![(0, 1)] }
    }

    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm
        let mut indeg = vec![0usize; self.n];
        for &(_, t) in &self.arrows {
            indeg[t] += 1;
        }
        let mut stack: Vec<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &(s, t) in &self.arrows {
                if s == v {
                    indeg[t] -= 1;
                    if indeg[t] == 0 {
                        stack.push(t);
                    }
                }
            }
        }
        seen == self.n
    }

    /// `sum_i a_i b_i - sum_{s->t} a_s b_t`.
    pub fn euler_additive(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut acc: i64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
        for &(s, t) in &self.arrows {
            acc -= a[s] * b[t];
        }
        acc
    }
}

/// Integer vector in the Grothendieck group.
pub type K0Vector = Vec<i64>;

pub fn k0_add(a: &[i64], b: &[i64]) -> K0Vector {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

pub fn k0_sub(a: &[i64], b: &[i64]) -> K0Vector {
    a.iter().zip(b.iter()).map(|(x, y)| x - y).collect()
}

pub fn k0_scale(a: &[i64], k: i64) -> K0Vector {
    a.iter().map(|x| x * k).collect()
}

pub fn k0_is_zero(a: &[i64]) -> bool {
    a.iter().all(|&x| x == 0)
}

pub fn dims_to_k0(d: &[usize]) -> K0Vector {
    d.iter().map(|&x| x as i64).collect()
}

/// A representation: one vector space per vertex, one matrix per arrow.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Representation {
    pub dims: Vec<usize>,
    pub mats: Vec<FqMatrix>,
}

/// A morphism of representations: one matrix per vertex.
pub type RepMorphism = Vec<FqMatrix>;

impl Representation {
    pub fn zero(quiver: &Quiver) -> Self {
        Self::with_dims(quiver, vec![0; quiver.n])
    }

    /// All arrow matrices zero.
    pub fn with_dims(quiver: &Quiver, dims: Vec<usize>) -> Self {
        let mats = quiver.arrows.iter().map(|&(s, t)| FqMatrix::zeros(dims[t], dims[s])).collect();
        Representation { dims, mats }
    }

    pub fn new(quiver: &Quiver, dims: Vec<usize>, mats: Vec<FqMatrix>) -> Result<Self> {
        if dims.len() != quiver.n || mats.len() != quiver.arrows.len() {
            return Err(HallError::Domain("representation shape does not match quiver".into()));
        }
        for (m, &(s, t)) in mats.iter().zip(quiver.arrows.iter()) {
            if m.rows != dims[t] || m.cols != dims[s] {
                return Err(HallError::Domain("arrow matrix has the wrong shape".into()));
            }
        }
        Ok(Representation { dims, mats })
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn class(&self) -> K0Vector {
        dims_to_k0(&self.dims)
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let dims = self.dims.iter().zip(other.dims.iter()).map(|(a, b)| a + b).collect();
        let mats = self
            .mats
            .iter()
            .zip(other.mats.iter())
            .map(|(a, b)| FqMatrix::direct_sum(a, b))
            .collect();
        Representation { dims, mats }
    }

    /// Flattened arrow-matrix entries; identifies the representation
    /// among those with the same dimension vector.
    pub fn entries(&self) -> Vec<u8> {
        self.mats.iter().flat_map(|m| m.data.iter().copied()).collect()
    }

    pub fn identity(&self) -> RepMorphism {
        self.dims.iter().map(|&d| FqMatrix::identity(d)).collect()
    }
}

/// Basis of `Hom(x, y)` as per-vertex matrix families.
pub fn hom_basis(quiver: &Quiver, x: &Representation, y: &Representation, q: u32) -> Vec<RepMorphism> {
    let shapes: Vec<(usize, usize)> = (0..quiver.n).map(|v| (y.dims[v], x.dims[v])).collect();
    let mut sys = BlockSystem::new(q, shapes);
    for (a, &(s, t)) in quiver.arrows.iter().enumerate() {
        // f_t X_a = Y_a f_s
        let it = FqMatrix::identity(y.dims[t]);
        let is = FqMatrix::identity(x.dims[s]);
        sys.equation(
            y.dims[t],
            x.dims[s],
            &[
                Term { left: &it, var: t, right: &x.mats[a], negate: false },
                Term { left: &y.mats[a], var: s, right: &is, negate: true },
            ],
        );
    }
    sys.solve().iter().map(|v| sys.decode(v)).collect()
}

pub fn hom_dim(quiver: &Quiver, x: &Representation, y: &Representation, q: u32) -> usize {
    hom_basis(quiver, x, y, q).len()
}

/// `dim Ext^1(x, y)` from the standard projective resolution of a path algebra.
pub fn ext1_dim(quiver: &Quiver, x: &Representation, y: &Representation, q: u32) -> usize {
    let h = hom_dim(quiver, x, y, q) as i64;
    let e = h - quiver.euler_additive(&x.class(), &y.class());
    debug_assert!(e >= 0);
    e as usize
}

/// Sum of basis morphisms with the given coefficients.
pub fn combine(basis: &[RepMorphism], coeffs: &[u8], x: &Representation, y: &Representation, q: u32) -> RepMorphism {
    let mut out: RepMorphism = x.dims.iter().zip(y.dims.iter()).map(|(&dx, &dy)| FqMatrix::zeros(dy, dx)).collect();
    for (b, &c) in basis.iter().zip(coeffs.iter()) {
        if c == 0 {
            continue;
        }
        for v in 0..out.len() {
            let mut scaled = b[v].clone();
            for e in scaled.data.iter_mut() {
                *e = ((*e as u32 * c as u32) % q) as u8;
            }
            out[v] = out[v].add(&scaled, q);
        }
    }
    out
}

pub fn is_iso(f: &RepMorphism, q: u32) -> bool {
    f.iter().all(|m| m.is_invertible(q))
}

/// Per-vertex subspaces given by column bases.
pub type Subspaces = Vec<FqMatrix>;

/// Whether the subspaces are stable under every arrow.
pub fn is_subrep(quiver: &Quiver, v: &Representation, sub: &Subspaces, q: u32) -> bool {
    for (a, &(s, t)) in quiver.arrows.iter().enumerate() {
        let img = v.mats[a].mul(&sub[s], q);
        let mut joined = FqMatrix::zeros(v.dims[t], sub[t].cols + img.cols);
        joined.put_block(0, 0, &sub[t]);
        joined.put_block(0, sub[t].cols, &img);
        if joined.rank(q) != sub[t].cols {
            return false;
        }
    }
    true
}

/// The subquotient `w / u` for arrow-stable subspaces `u <= w`.
/// Both are given by independent column bases.
pub fn subquotient(quiver: &Quiver, v: &Representation, u: &Subspaces, w: &Subspaces, q: u32) -> Representation {
    let n = quiver.n;
    let ext: Vec<FqMatrix> = (0..n).map(|i| complement_in(&u[i], &w[i], q)).collect();
    let full: Vec<FqMatrix> = (0..n)
        .map(|i| {
            let mut m = FqMatrix::zeros(v.dims[i], u[i].cols + ext[i].cols);
            m.put_block(0, 0, &u[i]);
            m.put_block(0, u[i].cols, &ext[i]);
            m
        })
        .collect();
    let dims: Vec<usize> = ext.iter().map(|e| e.cols).collect();
    let mats = quiver
        .arrows
        .iter()
        .enumerate()
        .map(|(a, &(s, t))| {
            let mut m = FqMatrix::zeros(dims[t], dims[s]);
            for j in 0..dims[s] {
                let img = v.mats[a].mul_vec(&ext[s].column(j), q);
                let c = coordinates(&full[t], &img, q).expect("subspace is arrow-stable");
                for i in 0..dims[t] {
                    m.set(i, j, c[u[t].cols + i]);
                }
            }
            m
        })
        .collect();
    Representation { dims, mats }
}

/// Matrix of the map `w/u -> w'/u'` induced by `f`, in the complement bases
/// used by [`subquotient`].
pub fn induced_map(f: &FqMatrix, u: &FqMatrix, w: &FqMatrix, u2: &FqMatrix, w2: &FqMatrix, q: u32) -> FqMatrix {
    let ext = complement_in(u, w, q);
    let ext2 = complement_in(u2, w2, q);
    let mut full = FqMatrix::zeros(f.rows, u2.cols + ext2.cols);
    full.put_block(0, 0, u2);
    full.put_block(0, u2.cols, &ext2);
    let mut m = FqMatrix::zeros(ext2.cols, ext.cols);
    for j in 0..ext.cols {
        let img = f.mul_vec(&ext.column(j), q);
        let c = coordinates(&full, &img, q).expect("map preserves the subspaces");
        for i in 0..ext2.cols {
            m.set(i, j, c[u2.cols + i]);
        }
    }
    m
}

/// Column bases of the kernel of `f: x -> y`.
pub fn kernel_spaces(f: &RepMorphism, x: &Representation, q: u32) -> Subspaces {
    f.iter()
        .enumerate()
        .map(|(i, m)| {
            let k = m.kernel_basis(q);
            FqMatrix::from_columns(x.dims[i], &(0..k.cols).map(|j| k.column(j)).collect::<Vec<_>>())
        })
        .collect()
}

/// Column bases of the image of `f: x -> y`.
pub fn image_spaces(f: &RepMorphism, y: &Representation, q: u32) -> Subspaces {
    f.iter()
        .enumerate()
        .map(|(i, m)| {
            let b = m.column_basis(q);
            FqMatrix::from_columns(y.dims[i], &(0..b.cols).map(|j| b.column(j)).collect::<Vec<_>>())
        })
        .collect()
}

pub fn zero_spaces(x: &Representation) -> Subspaces {
    x.dims.iter().map(|&d| FqMatrix::zeros(d, 0)).collect()
}

pub fn full_spaces(x: &Representation) -> Subspaces {
    x.dims.iter().map(|&d| FqMatrix::identity(d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> Representation {
        let q = Quiver::a2();
        Representation::new(&q, vec![1, 1], vec![FqMatrix::identity(1)]).unwrap()
    }

    #[test]
    fn hom_dims_on_a2() {
        let qv = Quiver::a2();
        let s1 = Representation::with_dims(&qv, vec![1, 0]);
        let s2 = Representation::with_dims(&qv, vec![0, 1]);
        assert_eq!(hom_dim(&qv, &s1, &s2, 2), 0);
        assert_eq!(hom_dim(&qv, &p1(), &s1, 2), 1);
        assert_eq!(hom_dim(&qv, &p1(), &s2, 2), 0);
        assert_eq!(hom_dim(&qv, &s2, &p1(), 2), 1);
        assert_eq!(ext1_dim(&qv, &s1, &s2, 2), 1);
        assert_eq!(ext1_dim(&qv, &s2, &s1, 2), 0);
    }

    #[test]
    fn acyclicity() {
        assert!(Quiver::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Quiver::new(3, vec![(0, 1), (1, 2), (0, 2)]).is_ok());
    }

    #[test]
    fn subquotient_of_p1() {
        let qv = Quiver::a2();
        let p = p1();
        // socle is the line at vertex 1
        let sub = vec![FqMatrix::zeros(1, 0), FqMatrix::identity(1)];
        assert!(is_subrep(&qv, &p, &sub, 2));
        let quot = subquotient(&qv, &p, &sub, &full_spaces(&p), 2);
        assert_eq!(quot.dims, vec![1, 0]);
        let bad = vec![FqMatrix::identity(1), FqMatrix::zeros(1, 0)];
        assert!(!is_subrep(&qv, &p, &bad, 2));
    }
}
