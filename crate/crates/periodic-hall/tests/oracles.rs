//! Naive oracles for the category table: every count is recomputed by listing
//! vectors, matrices and subspaces explicitly, with iso classes of A1 and A2
//! representations told apart by dimension vector and arrow ranks.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use periodic_hall::fq::FqMatrix;
use periodic_hall::rep::{Quiver, Representation};
use periodic_hall::table::{CategoryTable, ClassId};

type Vector = Vec<u8>;
type Space = BTreeSet<Vector>;
/// Dimension vector and arrow ranks.
type Key = (Vec<usize>, Vec<usize>);

fn vectors(d: usize, q: u32) -> Vec<Vector> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out.into_iter().flat_map(|v| (0..q as u8).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn apply(m: &FqMatrix, v: &[u8], q: u32) -> Vector {
    (0..m.rows).map(|i| ((0..m.cols).map(|j| m.get(i, j) as u32 * v[j] as u32).sum::<u32>() % q) as u8).collect()
}

fn matmul(a: &FqMatrix, b: &FqMatrix, q: u32) -> FqMatrix {
    let mut data = Vec::new();
    for i in 0..a.rows {
        for j in 0..b.cols {
            data.push(((0..a.cols).map(|k| a.get(i, k) as u32 * b.get(k, j) as u32).sum::<u32>() % q) as u8);
        }
    }
    FqMatrix::from_vec(a.rows, b.cols, data)
}

fn all_matrices(rows: usize, cols: usize, q: u32) -> Vec<FqMatrix> {
    vectors(rows * cols, q).into_iter().map(|d| FqMatrix::from_vec(rows, cols, d)).collect()
}

fn log_q(n: usize, q: u32) -> usize {
    let (mut k, mut m) = (0, 1usize);
    while m < n {
        m *= q as usize;
        k += 1;
    }
    assert_eq!(m, n, "not a power of q");
    k
}

fn image(m: &FqMatrix, s: &Space, q: u32) -> Space {
    s.iter().map(|v| apply(m, v, q)).collect()
}

fn sum(a: &Space, b: &Space, q: u32) -> Space {
    a.iter().flat_map(|x| b.iter().map(move |y| x.iter().zip(y).map(|(p, r)| ((p + r) as u32 % q) as u8).collect())).collect()
}

fn span(gens: &[Vector], d: usize, q: u32) -> Space {
    let mut s: Space = [vec![0; d]].into_iter().collect();
    for g in gens {
        let line: Space = (0..q).map(|c| g.iter().map(|&x| ((x as u32 * c) % q) as u8).collect()).collect();
        s = sum(&s, &line, q);
    }
    s
}

/// Every subspace of `F_q^d`, as the set of its vectors.
fn subspaces(d: usize, q: u32) -> Vec<Space> {
    let all = vectors(d, q);
    let mut out: BTreeSet<Space> = BTreeSet::new();
    let mut tuples: Vec<Vec<Vector>> = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for t in &tuples {
            out.insert(span(t, d, q));
            for v in &all {
                next.push([t.clone(), vec![v.clone()]].concat());
            }
        }
        tuples = next;
    }
    for t in &tuples {
        out.insert(span(t, d, q));
    }
    out.into_iter().collect()
}

fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![vec![]];
    for l in lists {
        out = out.into_iter().flat_map(|p: Vec<T>| l.iter().map(move |x| [p.clone(), vec![x.clone()]].concat())).collect();
    }
    out
}

fn homs(quiver: &Quiver, x: &Representation, y: &Representation, q: u32) -> Vec<Vec<FqMatrix>> {
    let per_vertex: Vec<Vec<FqMatrix>> = (0..quiver.n).map(|v| all_matrices(y.dims[v], x.dims[v], q)).collect();
    cartesian(&per_vertex)
        .into_iter()
        .filter(|f| {
            quiver.arrows.iter().enumerate().all(|(k, &(s, t))| matmul(&y.mats[k], &f[s], q) == matmul(&f[t], &x.mats[k], q))
        })
        .collect()
}

fn bijective(m: &FqMatrix, q: u32) -> bool {
    m.rows == m.cols && image(m, &vectors(m.cols, q).into_iter().collect(), q).len() == (q as usize).pow(m.cols as u32)
}

fn aut(quiver: &Quiver, x: &Representation, q: u32) -> u128 {
    homs(quiver, x, x, q).iter().filter(|f| f.iter().all(|m| bijective(m, q))).count() as u128
}

fn full(d: usize, q: u32) -> Space {
    vectors(d, q).into_iter().collect()
}

fn key(quiver: &Quiver, x: &Representation, q: u32) -> Key {
    let ranks = quiver.arrows.iter().enumerate().map(|(k, &(s, _))| log_q(image(&x.mats[k], &full(x.dims[s], q), q).len(), q)).collect();
    (x.dims.clone(), ranks)
}

/// Key of the subrepresentation `u` of `x`.
fn sub_key(quiver: &Quiver, x: &Representation, u: &[Space], q: u32) -> Key {
    let dims = u.iter().map(|s| log_q(s.len(), q)).collect();
    let ranks = quiver.arrows.iter().enumerate().map(|(k, &(s, _))| log_q(image(&x.mats[k], &u[s], q).len(), q)).collect();
    (dims, ranks)
}

/// Key of the quotient `x / u`.
fn quotient_key(quiver: &Quiver, x: &Representation, u: &[Space], q: u32) -> Key {
    let dims = (0..quiver.n).map(|v| x.dims[v] - log_q(u[v].len(), q)).collect();
    let ranks = quiver
        .arrows
        .iter()
        .enumerate()
        .map(|(k, &(s, t))| {
            let img = image(&x.mats[k], &full(x.dims[s], q), q);
            log_q(sum(&img, &u[t], q).len(), q) - log_q(u[t].len(), q)
        })
        .collect();
    (dims, ranks)
}

fn subreps(quiver: &Quiver, x: &Representation, q: u32) -> Vec<Vec<Space>> {
    let per_vertex: Vec<Vec<Space>> = (0..quiver.n).map(|v| subspaces(x.dims[v], q)).collect();
    cartesian(&per_vertex)
        .into_iter()
        .filter(|u| quiver.arrows.iter().enumerate().all(|(k, &(s, t))| image(&x.mats[k], &u[s], q).is_subset(&u[t])))
        .collect()
}

fn class_of(table: &CategoryTable, k: &Key) -> ClassId {
    (0..table.len()).find(|&c| &key(&table.quiver, table.rep(c), table.q) == k).expect("class in table")
}

fn tables() -> Vec<CategoryTable> {
    vec![
        CategoryTable::build(Quiver::a1(), 2, 4).unwrap(),
        CategoryTable::build(Quiver::a1(), 3, 3).unwrap(),
        CategoryTable::build(Quiver::a2(), 2, 3).unwrap(),
        CategoryTable::build(Quiver::a2(), 3, 2).unwrap(),
    ]
}

#[test]
fn class_keys_are_distinct() {
    for table in tables() {
        let keys: BTreeSet<Key> = (0..table.len()).map(|c| key(&table.quiver, table.rep(c), table.q)).collect();
        assert_eq!(keys.len(), table.len());
    }
}

#[test]
fn class_list_is_complete() {
    // A1 and A2 classes are exactly the rank-feasible dimension vectors
    for table in tables() {
        let mut expected = 0;
        let n = table.quiver.n;
        for total in 0..=table.bound {
            expected += if n == 1 { 1 } else { (0..=total).map(|d0| d0.min(total - d0) + 1).sum::<usize>() };
        }
        assert_eq!(table.len(), expected, "quiver n={} q={}", n, table.q);
    }
}

#[test]
fn hom_and_aut_match_enumeration() {
    for table in tables() {
        let (quiver, q) = (&table.quiver, table.q);
        for x in 0..table.len() {
            assert_eq!(aut(quiver, table.rep(x), q), table.aut(x), "aut {}", table.name(x));
            for y in 0..table.len() {
                let n = homs(quiver, table.rep(x), table.rep(y), q).len() as u128;
                assert_eq!(n, table.hom_count(x, y), "hom {} {}", table.name(x), table.name(y));
            }
        }
    }
}

#[test]
fn hall_numbers_match_subrepresentation_count() {
    for table in tables() {
        let (quiver, q) = (&table.quiver, table.q);
        for c in 0..table.len() {
            let mut counts = std::collections::BTreeMap::new();
            for u in subreps(quiver, table.rep(c), q) {
                let b = class_of(&table, &sub_key(quiver, table.rep(c), &u, q));
                let a = class_of(&table, &quotient_key(quiver, table.rep(c), &u, q));
                *counts.entry((a, b)).or_insert(0u64) += 1;
            }
            for a in 0..table.len() {
                for b in 0..table.len() {
                    let naive = counts.get(&(a, b)).copied().unwrap_or(0);
                    assert_eq!(table.hall_number(c, a, b), naive, "g^{}_{{{},{}}}", table.name(c), table.name(a), table.name(b));
                }
            }
        }
    }
}

#[test]
fn extension_mass_and_euler_form() {
    for table in tables() {
        let (quiver, q) = (&table.quiver, table.q);
        for a in 0..table.len() {
            for b in 0..table.len() {
                if table.total_dim(a) + table.total_dim(b) > table.bound {
                    continue;
                }
                let mut mass = BigRational::zero();
                for c in 0..table.len() {
                    let u = subreps(quiver, table.rep(c), q);
                    let g = u
                        .iter()
                        .filter(|u| {
                            class_of(&table, &sub_key(quiver, table.rep(c), u, q)) == b
                                && class_of(&table, &quotient_key(quiver, table.rep(c), u, q)) == a
                        })
                        .count();
                    mass += BigRational::new(
                        BigInt::from(g as u128 * table.aut(a) * table.aut(b) * table.hom_count(a, b)),
                        BigInt::from(table.aut(c)),
                    );
                }
                assert_eq!(mass, BigRational::from_integer(BigInt::from(table.ext1_count(a, b))));
                let euler = table.euler_additive(&table.class_vec(a), &table.class_vec(b));
                assert_eq!(table.hom[a][b] as i64 - table.ext1[a][b] as i64, euler);
            }
        }
    }
}

#[test]
fn four_term_counts_match_enumeration() {
    for table in tables() {
        let (quiver, q) = (&table.quiver, table.q);
        for a in 0..table.len() {
            for b in 0..table.len() {
                if table.total_dim(a) + table.total_dim(b) > table.bound {
                    continue;
                }
                let (ra, rb) = (table.rep(a), table.rep(b));
                let mut naive = std::collections::BTreeMap::new();
                for g in homs(quiver, rb, ra, q) {
                    let ker: Vec<Space> = (0..quiver.n)
                        .map(|v| full(rb.dims[v], q).into_iter().filter(|x| apply(&g[v], x, q).iter().all(|&c| c == 0)).collect())
                        .collect();
                    let img: Vec<Space> = (0..quiver.n).map(|v| image(&g[v], &full(rb.dims[v], q), q)).collect();
                    let m = class_of(&table, &sub_key(quiver, rb, &ker, q));
                    let n = class_of(&table, &quotient_key(quiver, ra, &img, q));
                    *naive.entry((m, n)).or_insert(BigRational::zero()) += BigRational::new(
                        BigInt::from(table.aut(m) * table.aut(n)),
                        BigInt::from(table.aut(a) * table.aut(b)),
                    );
                }
                let tabulated: std::collections::BTreeMap<_, _> =
                    table.gamma_terms(a, b).unwrap().into_iter().map(|(m, n, g)| ((m, n), g)).collect();
                assert_eq!(tabulated, naive, "gamma for A={} B={}", table.name(a), table.name(b));
            }
        }
    }
}

#[test]
fn subspace_counts_are_gaussian_binomials() {
    // F_2^3 has 1 + 7 + 7 + 1 subspaces, F_3^2 has 1 + 4 + 1
    assert_eq!(subspaces(3, 2).len(), 16);
    assert_eq!(subspaces(2, 3).len(), 6);
}
