//! Dense matrices and linear algebra over a prime field `F_q`.

use alloc::vec;
use alloc::vec::Vec;

/// Row-major matrix with entries reduced mod `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u8>,
}

pub fn inv_mod(a: u32, q: u32) -> u32 {
    debug_assert!(a % q != 0);
    (1..q).find(|&x| (x * a) % q == 1).expect("q prime")
}

impl FqMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FqMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[&[u32]], q: u32) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, (x % q) as u8);
            }
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), rows * cols);
        FqMatrix { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u8) {
        self.data[i * self.cols + j] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &FqMatrix, q: u32) -> FqMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = FqMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u32;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j) as u32;
                    if b != 0 {
                        let idx = i * out.cols + j;
                        out.data[idx] = ((out.data[idx] as u32 + a * b) % q) as u8;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &FqMatrix, q: u32) -> FqMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(&a, &b)| ((a as u32 + b as u32) % q) as u8)
            .collect();
        FqMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self, q: u32) -> FqMatrix {
        let data = self.data.iter().map(|&a| ((q - a as u32) % q) as u8).collect();
        FqMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &FqMatrix, q: u32) -> FqMatrix {
        self.add(&other.neg(q), q)
    }

    pub fn transpose(&self) -> FqMatrix {
        let mut out = FqMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Sub-block `[r0, r0+nr) x [c0, c0+nc)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> FqMatrix {
        let mut out = FqMatrix::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                out.set(i, j, self.get(r0 + i, c0 + j));
            }
        }
        out
    }

    pub fn put_block(&mut self, r0: usize, c0: usize, b: &FqMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block2(a: &FqMatrix, b: &FqMatrix, c: &FqMatrix, d: &FqMatrix) -> FqMatrix {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut out = FqMatrix::zeros(a.rows + c.rows, a.cols + b.cols);
        out.put_block(0, 0, a);
        out.put_block(0, a.cols, b);
        out.put_block(a.rows, 0, c);
        out.put_block(a.rows, a.cols, d);
        out
    }

    pub fn direct_sum(a: &FqMatrix, b: &FqMatrix) -> FqMatrix {
        Self::block2(
            a,
            &FqMatrix::zeros(a.rows, b.cols),
            &FqMatrix::zeros(b.rows, a.cols),
            b,
        )
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn from_columns(rows: usize, cols: &[Vec<u8>]) -> FqMatrix {
        let mut out = FqMatrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for i in 0..rows {
                out.set(i, j, c[i]);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u8], q: u32) -> Vec<u8> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u32;
                for j in 0..self.cols {
                    acc += self.get(i, j) as u32 * v[j] as u32;
                }
                (acc % q) as u8
            })
            .collect()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, q: u32) -> (FqMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    let t = m.get(p, j);
                    m.set(p, j, m.get(r, j));
                    m.set(r, j, t);
                }
            }
            let inv = inv_mod(m.get(r, c) as u32, q);
            for j in 0..m.cols {
                m.set(r, j, ((m.get(r, j) as u32 * inv) % q) as u8);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c) as u32;
                if f == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let x = (m.get(i, j) as u32 + q * q - f * m.get(r, j) as u32) % q;
                    m.set(i, j, x as u8);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, q: u32) -> usize {
        self.rref(q).1.len()
    }

    /// Basis of `{x : self * x = 0}`.
    pub fn nullspace(&self, q: u32) -> Vec<Vec<u8>> {
        let (r, pivots) = self.rref(q);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut x = vec![0u8; self.cols];
            x[free] = 1;
            for (row, &p) in pivots.iter().enumerate() {
                let val = r.get(row, free) as u32;
                x[p] = ((q - val) % q) as u8;
            }
            basis.push(x);
        }
        basis
    }

    pub fn inverse(&self, q: u32) -> Option<FqMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = FqMatrix::block2(self, &FqMatrix::identity(n), &FqMatrix::zeros(0, n), &FqMatrix::zeros(0, n));
        let (r, pivots) = aug.rref(q);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.block(0, n, n, n))
    }

    pub fn is_invertible(&self, q: u32) -> bool {
        self.rows == self.cols && self.rank(q) == self.rows
    }

    /// Columns forming a basis of the column space.
    pub fn column_basis(&self, q: u32) -> FqMatrix {
        let (_, pivots) = self.rref(q);
        let cols: Vec<Vec<u8>> = pivots.iter().map(|&j| self.column(j)).collect();
        FqMatrix::from_columns(self.rows, &cols)
    }

    /// Basis (as columns) of the kernel of `self`.
    pub fn kernel_basis(&self, q: u32) -> FqMatrix {
        let ns = self.nullspace(q);
        FqMatrix::from_columns(self.cols, &ns)
    }
}

/// Solve `basis * x = v` for `x`, with `basis` of full column rank.
pub fn coordinates(basis: &FqMatrix, v: &[u8], q: u32) -> Option<Vec<u8>> {
    let n = basis.rows;
    let k = basis.cols;
    let mut aug = FqMatrix::zeros(n, k + 1);
    aug.put_block(0, 0, basis);
    for i in 0..n {
        aug.set(i, k, v[i]);
    }
    let (r, pivots) = aug.rref(q);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut x = vec![0u8; k];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r.get(row, k);
    }
    Some(x)
}

/// Extend the independent columns of `sub` to a basis of the span of `sub | sup`,
/// returning only the added columns.
pub fn complement_in(sub: &FqMatrix, sup: &FqMatrix, q: u32) -> FqMatrix {
    assert_eq!(sub.rows, sup.rows);
    let n = sub.rows;
    let mut joined = FqMatrix::zeros(n, sub.cols + sup.cols);
    joined.put_block(0, 0, sub);
    joined.put_block(0, sub.cols, sup);
    let (_, pivots) = joined.rref(q);
    let cols: Vec<Vec<u8>> = pivots
        .iter()
        .filter(|&&j| j >= sub.cols)
        .map(|&j| joined.column(j))
        .collect();
    FqMatrix::from_columns(n, &cols)
}

/// `q^k` as u128.
pub fn qpow(q: u32, k: usize) -> u128 {
    (q as u128).pow(k as u32)
}

/// All linear combinations of the given basis vectors, in a fixed order.
pub struct SpanIter<'a> {
    basis: &'a [Vec<u8>],
    len: usize,
    q: u32,
    counter: Vec<u8>,
    done: bool,
}

impl<'a> SpanIter<'a> {
    pub fn new(basis: &'a [Vec<u8>], len: usize, q: u32) -> Self {
        SpanIter { basis, len, q, counter: vec![0; basis.len()], done: false }
    }
}

impl Iterator for SpanIter<'_> {
    type Item = Vec<u8>;
    fn next(&mut self) -> Option<Vec<u8>> {
        if self.done {
            return None;
        }
        let mut v = vec![0u32; self.len];
        for (c, b) in self.counter.iter().zip(self.basis.iter()) {
            if *c != 0 {
                for i in 0..self.len {
                    v[i] += *c as u32 * b[i] as u32;
                }
            }
        }
        let out = v.into_iter().map(|x| (x % self.q) as u8).collect();
        // advance
        let mut i = 0;
        loop {
            if i == self.counter.len() {
                self.done = true;
                break;
            }
            self.counter[i] += 1;
            if self.counter[i] as u32 == self.q {
                self.counter[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
        Some(out)
    }
}

/// Every `k`-dimensional subspace of `F_q^n`, as an `n x k` matrix whose
/// columns are the rows of the reduced echelon basis.
pub fn subspaces(n: usize, k: usize, q: u32) -> Vec<FqMatrix> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut pivots = Vec::with_capacity(k);
    choose_pivots(n, k, 0, &mut pivots, &mut |piv| {
        // free positions: (row r, col c) with c > piv[r], c not a pivot
        let mut free = Vec::new();
        for (r, &p) in piv.iter().enumerate() {
            for c in (p + 1)..n {
                if !piv.contains(&c) {
                    free.push((r, c));
                }
            }
        }
        let total = qpow(q, free.len());
        for code in 0..total {
            let mut m = FqMatrix::zeros(n, k);
            for (r, &p) in piv.iter().enumerate() {
                m.set(p, r, 1);
            }
            let mut x = code;
            for &(r, c) in &free {
                m.set(c, r, (x % q as u128) as u8);
                x /= q as u128;
            }
            out.push(m);
        }
    });
    out
}

fn choose_pivots(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for p in start..n {
        if n - p < k - cur.len() {
            break;
        }
        cur.push(p);
        choose_pivots(n, k, p + 1, cur, f);
        cur.pop();
    }
}

/// `|GL_n(F_q)|`.
pub fn gl_order(n: usize, q: u32) -> u128 {
    let qn = qpow(q, n);
    let mut acc: u128 = 1;
    for i in 0..n {
        acc *= qn - qpow(q, i);
    }
    acc
}

/// Generators of `GL_n(F_q)`: transvections and one diagonal scaling per slot.
pub fn gl_generators(n: usize, q: u32) -> Vec<FqMatrix> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut m = FqMatrix::identity(n);
                m.set(i, j, 1);
                gens.push(m);
            }
        }
    }
    if q > 2 {
        let g = primitive_root(q);
        for i in 0..n {
            let mut m = FqMatrix::identity(n);
            m.set(i, i, g as u8);
            gens.push(m);
        }
    }
    gens
}

fn primitive_root(q: u32) -> u32 {
    (2..q)
        .find(|&g| {
            let mut x = 1;
            for k in 1..q - 1 {
                x = x * g % q;
                if x == 1 && k < q - 1 {
                    return false;
                }
            }
            true
        })
        .unwrap_or(1)
}

/// A homogeneous linear system whose unknowns are matrix blocks and whose
/// equations are sums of terms `P * X * Q`.
pub struct BlockSystem {
    q: u32,
    shapes: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    total: usize,
    rows: Vec<Vec<u8>>,
}

/// One term `coef * left * X[var] * right`.
pub struct Term<'a> {
    pub left: &'a FqMatrix,
    pub var: usize,
    pub right: &'a FqMatrix,
    pub negate: bool,
}

impl BlockSystem {
    pub fn new(q: u32, shapes: Vec<(usize, usize)>) -> Self {
        let mut offsets = Vec::with_capacity(shapes.len());
        let mut total = 0;
        for &(r, c) in &shapes {
            offsets.push(total);
            total += r * c;
        }
        BlockSystem { q, shapes, offsets, total, rows: Vec::new() }
    }

    pub fn num_unknowns(&self) -> usize {
        self.total
    }

    /// Add the matrix equation `sum of terms = 0` of shape `rows x cols`.
    pub fn equation(&mut self, rows: usize, cols: usize, terms: &[Term<'_>]) {
        let q = self.q;
        let mut eqs = vec![vec![0u32; self.total]; rows * cols];
        for t in terms {
            let (xr, xc) = self.shapes[t.var];
            assert_eq!(t.left.rows, rows);
            assert_eq!(t.left.cols, xr);
            assert_eq!(t.right.rows, xc);
            assert_eq!(t.right.cols, cols);
            let off = self.offsets[t.var];
            for i in 0..rows {
                for a in 0..xr {
                    let l = t.left.get(i, a) as u32;
                    if l == 0 {
                        continue;
                    }
                    for b in 0..xc {
                        for j in 0..cols {
                            let r = t.right.get(b, j) as u32;
                            if r == 0 {
                                continue;
                            }
                            let mut c = l * r % q;
                            if t.negate {
                                c = (q - c) % q;
                            }
                            let e = &mut eqs[i * cols + j][off + a * xc + b];
                            *e = (*e + c) % q;
                        }
                    }
                }
            }
        }
        for e in eqs {
            if e.iter().any(|&x| x != 0) {
                self.rows.push(e.into_iter().map(|x| x as u8).collect());
            }
        }
    }

    /// Basis of the solution space as flat vectors.
    pub fn solve(&self) -> Vec<Vec<u8>> {
        if self.total == 0 {
            return Vec::new();
        }
        if self.rows.is_empty() {
            return (0..self.total)
                .map(|i| {
                    let mut v = vec![0u8; self.total];
                    v[i] = 1;
                    v
                })
                .collect();
        }
        let data: Vec<u8> = self.rows.iter().flatten().copied().collect();
        let m = FqMatrix::from_vec(self.rows.len(), self.total, data);
        m.nullspace(self.q)
    }

    /// Flatten blocks into the unknown vector; inverse of [`decode`](Self::decode).
    pub fn encode(&self, blocks: &[FqMatrix]) -> Vec<u8> {
        let mut v = vec![0u8; self.total];
        for (b, &off) in blocks.iter().zip(self.offsets.iter()) {
            v[off..off + b.data.len()].copy_from_slice(&b.data);
        }
        v
    }

    /// Split a flat vector into its blocks.
    pub fn decode(&self, v: &[u8]) -> Vec<FqMatrix> {
        self.shapes
            .iter()
            .zip(self.offsets.iter())
            .map(|(&(r, c), &off)| FqMatrix::from_vec(r, c, v[off..off + r * c].to_vec()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_and_nullspace() {
        let q = 3;
        let m = FqMatrix::from_rows(&[&[1, 2, 0], &[2, 1, 0]], q);
        assert_eq!(m.rank(q), 1);
        let ns = m.nullspace(q);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v, q).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let q = 5;
        let m = FqMatrix::from_rows(&[&[1, 2], &[3, 4]], q);
        let inv = m.inverse(q).unwrap();
        assert_eq!(m.mul(&inv, q), FqMatrix::identity(2));
        let s = FqMatrix::from_rows(&[&[1, 2], &[2, 4]], q);
        assert!(s.inverse(q).is_none());
    }

    #[test]
    fn subspace_counts_are_gaussian_binomials() {
        // [4 choose 2]_2 = 35, [3 choose 1]_3 = 13
        assert_eq!(subspaces(4, 2, 2).len(), 35);
        assert_eq!(subspaces(3, 1, 3).len(), 13);
        assert_eq!(subspaces(3, 0, 3).len(), 1);
        assert_eq!(subspaces(2, 2, 5).len(), 1);
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(2, 2), 6);
        assert_eq!(gl_order(2, 3), 48);
        assert_eq!(gl_order(0, 3), 1);
    }

    #[test]
    fn span_iter_counts() {
        let b = vec![vec![1, 0, 1], vec![0, 1, 1]];
        assert_eq!(SpanIter::new(&b, 3, 3).count(), 9);
        let empty: Vec<Vec<u8>> = Vec::new();
        assert_eq!(SpanIter::new(&empty, 3, 3).count(), 1);
    }
}
