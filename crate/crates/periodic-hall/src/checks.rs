//! Verification suites: every identity is evaluated along two independent
//! routes and the results are compared exactly.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::CoeffElem;
use crate::complex::{complex_euler_exponent, for_each_complex, image_rep, GradedComplex};
use crate::dhall::{rotate_tuple, DhAlgebra, DhElement};
use crate::embed::{Embedding, MiddleSigns};
use crate::error::{HallError, Result};
use crate::report::Report;
use crate::rep::{k0_add, k0_scale, k0_sub, K0Vector};
use crate::sdh::{one_periodic_extension_counts, Lin, SdhAlgebra, SdhElement, SdhKey, StalkTuple};
use crate::table::{CategoryTable, ClassId};
use crate::torus::{single_degree, TorusExponent};

/// Default seed of the randomized suites.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Default cap on differential assignments visited by complex enumeration.
pub const DEFAULT_COMPLEX_BUDGET: u128 = 1 << 24;

/// A generator `U_{A,i}` or `K_{α,i}` of the semi-derived Hall algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    Stalk(ClassId, usize),
    Torus(K0Vector, usize),
}

impl Generator {
    pub fn degree(&self) -> usize {
        match self {
            Generator::Stalk(_, i) | Generator::Torus(_, i) => *i,
        }
    }

    pub fn element(&self, table: &CategoryTable, t: usize) -> Result<SdhElement> {
        match self {
            Generator::Stalk(a, i) => SdhElement::stalk(table, t, *a, *i),
            Generator::Torus(alpha, i) => SdhElement::k_generator(t, table.q, alpha, *i),
        }
    }

    pub fn label(&self, table: &CategoryTable, t: usize) -> String {
        let at = |i: &usize| if t == 1 { String::new() } else { format!("@{}", i) };
        match self {
            Generator::Stalk(a, i) => format!("U[{}{}]", table.name(*a), at(i)),
            Generator::Torus(alpha, i) => format!("K[{:?}{}]", alpha, at(i)),
        }
    }
}

/// Nonzero classes of total dimension at most `max_dim`.
pub fn small_classes(table: &CategoryTable, max_dim: usize) -> Vec<ClassId> {
    table.classes_up_to(max_dim).into_iter().filter(|&a| a != 0).collect()
}

/// `±` the class vectors of the nonzero classes of dimension at most `max_dim`.
pub fn small_weights(table: &CategoryTable, max_dim: usize) -> Vec<K0Vector> {
    let mut set = BTreeSet::new();
    for a in small_classes(table, max_dim) {
        let v = table.class_vec(a);
        set.insert(k0_scale(&v, -1));
        set.insert(v);
    }
    set.into_iter().collect()
}

/// All stalk generators `U_{A,i}` and torus generators `K_{α,i}` with `dim A, |α| <= max_dim`.
pub fn sdh_generators(table: &CategoryTable, t: usize, max_dim: usize) -> Vec<Generator> {
    let mut out = Vec::new();
    for i in 0..t {
        for a in small_classes(table, max_dim) {
            out.push(Generator::Stalk(a, i));
        }
        for alpha in small_weights(table, max_dim) {
            out.push(Generator::Torus(alpha, i));
        }
    }
    out
}

/// Stalk tuples of total dimension at most `max_dim`.
pub fn small_tuples(table: &CategoryTable, t: usize, max_dim: usize) -> Vec<StalkTuple> {
    let classes = table.classes_up_to(max_dim);
    let mut out = Vec::new();
    let mut cur = vec![0; t];
    fn go(table: &CategoryTable, classes: &[ClassId], cur: &mut Vec<ClassId>, k: usize, left: usize, out: &mut Vec<StalkTuple>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for &c in classes {
            let d = table.total_dim(c);
            if d <= left {
                cur[k] = c;
                go(table, classes, cur, k + 1, left - d, out);
            }
        }
        cur[k] = 0;
    }
    go(table, &classes, &mut cur, 0, max_dim, &mut out);
    out
}

fn qint(table: &CategoryTable, k: i64) -> CoeffElem {
    CoeffElem::q_int_power(table.q, k)
}

fn rat(table: &CategoryTable, r: BigRational) -> CoeffElem {
    CoeffElem::from_rational(table.q, r)
}

fn euler(table: &CategoryTable, a: &[i64], b: &[i64]) -> i64 {
    table.euler_additive(a, b)
}

fn delta(a: usize, b: usize) -> i64 {
    (a == b) as i64
}

fn show_i64(x: &i64) -> String {
    format!("{}", x)
}

// ----- Euler form -----

/// Whether an acyclic complex is not a direct sum of contractible pieces:
/// some component differs from `Im d^{i-1} ⊕ Im d^i`.
pub fn is_nonsplit_acyclic(table: &CategoryTable, m: &GradedComplex) -> Result<bool> {
    let (quiver, q, t) = (&table.quiver, table.q, m.t);
    if !m.is_acyclic(quiver, q) {
        return Ok(false);
    }
    for i in 0..t {
        let before = table.classify(&image_rep(quiver, m, (i + t - 1) % t, q))?;
        let after = table.classify(&image_rep(quiver, m, i, q))?;
        let comp = table.classify(&m.comps[i])?;
        if table.direct_sum(before, after) != Some(comp) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Pairings of contractible complexes with stalks and with each other, and the
/// factorization of pairings with non-split acyclic complexes through their images.
pub fn euler_suite(table: &CategoryTable, t: usize, max_dim: usize, max_total: usize, budget: u128) -> Report {
    let suite = "euler";
    let mut report = Report::new();
    let (quiver, q) = (&table.quiver, table.q);
    let classes = small_classes(table, max_dim);
    let stalk = |a: ClassId, i: usize| GradedComplex::stalk(quiver, table.rep(a), i, t);
    let kgen = |a: ClassId, i: usize| GradedComplex::acyclic_k(quiver, table.rep(a), i, t);
    for &x in &classes {
        for &y in &classes {
            let xy = euler(table, &table.class_vec(x), &table.class_vec(y));
            for i in 0..t {
                for j in 0..t {
                    let case = format!("t={} X={} i={} Y={} j={}", t, table.name(x), i, table.name(y), j);
                    let (eku, euk, ekk) = if t == 1 {
                        (xy, xy, 2 * xy)
                    } else {
                        let prev = (i + t - 1) % t;
                        (xy * delta(j, prev), xy * delta(j, i), xy * (delta(j, i) + delta(j, prev)))
                    };
                    let (kx, ux) = (kgen(x, i), stalk(x, i));
                    let (ky, uy) = (kgen(y, j), stalk(y, j));
                    match (kx, ux, ky, uy) {
                        (Ok(kx), Ok(ux), Ok(ky), Ok(uy)) => {
                            let c = complex_euler_exponent(quiver, &kx, &uy, q);
                            report.check_eq(suite, "euler-contractible-stalk", case.clone(), true, &c, &eku, &show_i64);
                            let c = complex_euler_exponent(quiver, &ux, &ky, q);
                            report.check_eq(suite, "euler-stalk-contractible", case.clone(), true, &c, &euk, &show_i64);
                            let c = complex_euler_exponent(quiver, &kx, &ky, q);
                            report.check_eq(suite, "euler-contractible-contractible", case, true, &c, &ekk, &show_i64);
                        }
                        _ => report.record_error(suite, "euler-contractible-stalk", case, true, &HallError::Domain("construction failed".into())),
                    }
                }
            }
        }
    }

    let mut nonsplit = Vec::new();
    let res = for_each_complex(table, t, max_total, budget, &mut |m| {
        if is_nonsplit_acyclic(table, m)? {
            nonsplit.push(m.clone());
        }
        Ok(())
    });
    if let Err(e) = res {
        report.record_error(suite, "euler-factorization-left", format!("t={} enumeration", t), true, &e);
    }
    let mut probes: Vec<(String, GradedComplex)> = Vec::new();
    for &y in &classes {
        for j in 0..t {
            if let Ok(u) = stalk(y, j) {
                probes.push((format!("U[{}@{}]", table.name(y), j), u));
            }
            if let Ok(k) = kgen(y, j) {
                probes.push((format!("K[{}@{}]", table.name(y), j), k));
            }
        }
    }
    for (n, m) in nonsplit.iter().enumerate() {
        probes.push((format!("N{}", n), m.clone()));
    }
    for (n, k) in nonsplit.iter().enumerate() {
        let pieces: Vec<GradedComplex> = (0..t)
            .filter_map(|i| GradedComplex::acyclic_k(quiver, &image_rep(quiver, k, i, q), (i + 1) % t, t).ok())
            .collect();
        for (label, m) in &probes {
            let case = format!("t={} N{}={:?} M={}", t, n, k.degree_dims(), label);
            let lhs = complex_euler_exponent(quiver, k, m, q);
            let rhs: i64 = pieces.iter().map(|p| complex_euler_exponent(quiver, p, m, q)).sum();
            report.check_eq(suite, "euler-factorization-left", case.clone(), true, &lhs, &rhs, &show_i64);
            let lhs = complex_euler_exponent(quiver, m, k, q);
            let rhs: i64 = pieces.iter().map(|p| complex_euler_exponent(quiver, m, p, q)).sum();
            report.check_eq(suite, "euler-factorization-right", case, true, &lhs, &rhs, &show_i64);
        }
    }
    report
}

/// Total dimension used when searching for non-split acyclic complexes: at
/// `t = 1` and `q > 2` dimension 4 has too many differentials to visit.
pub fn factorization_total(q: u32, t: usize) -> usize {
    if t == 1 && q > 2 {
        3
    } else {
        4
    }
}

/// Number of non-split acyclic complexes of total dimension at most `max_total`.
pub fn count_nonsplit_acyclic(table: &CategoryTable, t: usize, max_total: usize, budget: u128) -> Result<usize> {
    let mut n = 0;
    for_each_complex(table, t, max_total, budget, &mut |m| {
        if is_nonsplit_acyclic(table, m)? {
            n += 1;
        }
        Ok(())
    })?;
    Ok(n)
}

// ----- semi-derived relations -----

/// Which displayed relation governs the ordered pair `(x, y)` and its right side,
/// with `x ⋄ y` on the left. Products on the right are evaluated by the brute-force engine.
fn relation_rhs(sdh: &SdhAlgebra<'_>, x: &Generator, y: &Generator) -> Result<Option<(&'static str, SdhElement)>> {
    let table = sdh.table();
    let t = sdh.t();
    let bf = |a: &SdhElement, b: &SdhElement| sdh.mul_bruteforce(a, b);
    let gen = |g: &Generator| g.element(table, t);
    let stalk = |a: ClassId, i: usize| -> Result<SdhElement> {
        if a == 0 {
            Ok(sdh.one())
        } else {
            SdhElement::stalk(table, t, a, i)
        }
    };
    let kg = |alpha: &[i64], i: usize| SdhElement::k_generator(t, table.q, alpha, i);
    let plus = |i: usize| (i + 1) % t;
    if t == 1 {
        return Ok(Some(match (x, y) {
            (Generator::Stalk(a, _), Generator::Stalk(b, _)) => {
                let hom = table.hom[*a][*b] as i64;
                let mut out = sdh.zero();
                for (c, beta, count) in one_periodic_extension_counts(table, *a, *b)? {
                    let coef = &(&rat(table, count) * &qint(table, -hom)) * &qint(table, euler(table, &beta, &table.class_vec(c)));
                    out = out.add(&bf(&kg(&beta, 0)?, &stalk(c, 0)?)?.scale(&coef));
                }
                ("sdh-one-periodic-merge", out)
            }
            (Generator::Stalk(a, _), Generator::Torus(alpha, _)) => {
                let av = table.class_vec(*a);
                let c = qint(table, euler(table, alpha, &av) - euler(table, &av, alpha));
                ("sdh-one-periodic-stalk-torus", bf(&gen(y)?, &gen(x)?)?.scale(&c))
            }
            (Generator::Torus(alpha, _), Generator::Torus(beta, _)) => {
                let c = qint(table, -2 * euler(table, alpha, beta));
                ("sdh-one-periodic-torus-torus", kg(&k0_add(alpha, beta), 0)?.scale(&c))
            }
            _ => return Ok(None),
        }));
    }
    let (i, j) = (x.degree(), y.degree());
    let distant = j != i && j != plus(i) && i != plus(j);
    Ok(Some(match (x, y) {
        (Generator::Stalk(a, _), Generator::Stalk(b, _)) if i == j => {
            let mut out = sdh.zero();
            let hom = table.hom_count(*a, *b);
            for c in table.middle_terms(*a, *b) {
                let coef = rat(table, table.ext_count(*a, *b, c) / BigRational::from_integer(BigInt::from(hom)));
                out = out.add(&stalk(c, i)?.scale(&coef));
            }
            ("sdh-same-degree", out)
        }
        (Generator::Stalk(bb, _), Generator::Stalk(aa, _)) if j == plus(i) => {
            let (a, b) = (*aa, *bb);
            let bv = table.class_vec(b);
            let mut out = sdh.zero();
            for (m, n, g) in table.gamma_terms(a, b)? {
                let mv = table.class_vec(m);
                let diff = k0_sub(&bv, &mv);
                let ratio = BigRational::new(
                    BigInt::from(table.aut(a)) * BigInt::from(table.aut(b)),
                    BigInt::from(table.aut(m)) * BigInt::from(table.aut(n)),
                );
                let coef = &rat(table, g * ratio) * &qint(table, euler(table, &diff, &mv));
                let prod = bf(&bf(&kg(&diff, j)?, &stalk(n, j)?)?, &stalk(m, i)?)?;
                out = out.add(&prod.scale(&coef));
            }
            ("sdh-adjacent-stalks", out)
        }
        (Generator::Torus(alpha, _), Generator::Stalk(b, _)) if i == j => {
            let c = qint(table, euler(table, &table.class_vec(*b), alpha));
            ("sdh-torus-stalk-same-degree", bf(&gen(y)?, &gen(x)?)?.scale(&c))
        }
        (Generator::Torus(alpha, _), Generator::Torus(beta, _)) if i == j => {
            let c = qint(table, -euler(table, alpha, beta));
            ("sdh-torus-torus-same-degree", kg(&k0_add(alpha, beta), i)?.scale(&c))
        }
        (Generator::Stalk(b, _), Generator::Torus(alpha, _)) if j == plus(i) => {
            let c = qint(table, euler(table, alpha, &table.class_vec(*b)));
            ("sdh-stalk-torus-next-degree", bf(&gen(y)?, &gen(x)?)?.scale(&c))
        }
        (Generator::Torus(_, _), Generator::Stalk(_, _)) if j == plus(i) => {
            ("sdh-torus-stalk-next-degree", bf(&gen(y)?, &gen(x)?)?)
        }
        (Generator::Torus(beta, _), Generator::Torus(alpha, _)) if j == plus(i) => {
            let c = qint(table, euler(table, alpha, beta));
            ("sdh-torus-torus-next-degree", bf(&gen(y)?, &gen(x)?)?.scale(&c))
        }
        (Generator::Stalk(_, _), Generator::Stalk(_, _)) if distant => ("sdh-distant-stalks", bf(&gen(y)?, &gen(x)?)?),
        (Generator::Torus(_, _), Generator::Stalk(_, _)) if distant => ("sdh-distant-torus-stalk", bf(&gen(y)?, &gen(x)?)?),
        (Generator::Torus(_, _), Generator::Torus(_, _)) if distant => ("sdh-distant-torus", bf(&gen(y)?, &gen(x)?)?),
        _ => return Ok(None),
    }))
}

/// Every displayed relation on all generator pairs, left side by the brute-force engine.
pub fn relation_suite(table: &CategoryTable, t: usize, max_dim: usize) -> Report {
    let suite = "relations";
    let mut report = Report::new();
    let sdh = match SdhAlgebra::new(table, t) {
        Ok(s) => s,
        Err(e) => {
            report.record_error(suite, "setup", format!("t={}", t), true, &e);
            return report;
        }
    };
    let gens = sdh_generators(table, t, max_dim);
    for x in &gens {
        for y in &gens {
            let case = format!("t={} {}⋄{}", t, x.label(table, t), y.label(table, t));
            let res = (|| {
                let Some((tag, rhs)) = relation_rhs(&sdh, x, y)? else { return Ok(None) };
                let lhs = sdh.mul_bruteforce(&x.element(table, t)?, &y.element(table, t)?)?;
                Ok(Some((tag, lhs, rhs)))
            })();
            match res {
                Ok(Some((tag, lhs, rhs))) => {
                    report.check_eq(suite, tag, case, true, &lhs, &rhs, &|e: &SdhElement| e.render(table));
                }
                Ok(None) => {}
                Err(e) => report.record_error(suite, "relation", case, true, &e),
            }
        }
    }
    report
}

/// Both engines on all ordered generator pairs.
pub fn engine_suite(table: &CategoryTable, t: usize, max_dim: usize) -> Report {
    let suite = "engines";
    let mut report = Report::new();
    let sdh = match SdhAlgebra::new(table, t) {
        Ok(s) => s,
        Err(e) => {
            report.record_error(suite, "setup", format!("t={}", t), true, &e);
            return report;
        }
    };
    let gens = sdh_generators(table, t, max_dim);
    for x in &gens {
        for y in &gens {
            let case = format!("t={} {}⋄{}", t, x.label(table, t), y.label(table, t));
            let res = (|| {
                let (a, b) = (x.element(table, t)?, y.element(table, t)?);
                Ok((sdh.mul_rewrite(&a, &b)?, sdh.mul_bruteforce(&a, &b)?))
            })();
            match res {
                Ok((r, b)) => {
                    report.check_eq(suite, "engine-agreement", case, true, &r, &b, &|e: &SdhElement| e.render(table));
                }
                Err(e) => report.record_error(suite, "engine-agreement", case, true, &e),
            }
        }
    }
    report
}

// ----- associativity -----

fn random_coeff(rng: &mut ChaCha8Rng, q: u32) -> CoeffElem {
    let num: i64 = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let den: i64 = rng.gen_range(1..=2);
    CoeffElem::from_ratio(q, num, den)
}

/// A random combination of one or two generators and the largest stalk dimension used.
fn random_sdh_element(rng: &mut ChaCha8Rng, table: &CategoryTable, t: usize, gens: &[Generator], max_stalk: usize) -> Result<(SdhElement, usize)> {
    let pool: Vec<&Generator> = gens
        .iter()
        .filter(|g| match g {
            Generator::Stalk(a, _) => table.total_dim(*a) <= max_stalk,
            Generator::Torus(_, _) => true,
        })
        .collect();
    let terms = rng.gen_range(1..=2);
    let mut out = SdhElement::zero(t, table.n(), table.q);
    let mut used = 0;
    for _ in 0..terms {
        let g = pool[rng.gen_range(0..pool.len())];
        if let Generator::Stalk(a, _) = g {
            used = used.max(table.total_dim(*a));
        }
        out = out.add(&g.element(table, t)?.scale(&random_coeff(rng, table.q)));
    }
    Ok((out, used))
}

/// Seeded random triples; each factor gets a stalk dimension budget so that the
/// triple product stays within the table bound.
fn budgets(rng: &mut ChaCha8Rng, total: usize) -> [usize; 3] {
    let mut b = [0usize; 3];
    let mut left = total;
    for slot in b.iter_mut() {
        let x = rng.gen_range(0..=left.min(2));
        *slot = x;
        left -= x;
    }
    b
}

/// `(x y) z = x (y z)` on seeded random triples under each available engine.
pub fn assoc_suite(table: &CategoryTable, t: usize, trials: usize, seed: u64, max_dim: usize) -> Report {
    let suite = "assoc";
    let mut report = Report::new();
    let sdh = match SdhAlgebra::new(table, t) {
        Ok(s) => s,
        Err(e) => {
            report.record_error(suite, "setup", format!("t={}", t), true, &e);
            return report;
        }
    };
    let gens = sdh_generators(table, t, max_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (t as u64) << 32);
    let engines: &[(&str, crate::sdh::Engine)] = if t == 2 {
        &[("bruteforce", crate::sdh::Engine::Bruteforce)]
    } else {
        &[("rewrite", crate::sdh::Engine::Rewrite), ("bruteforce", crate::sdh::Engine::Bruteforce)]
    };
    for n in 0..trials {
        let b = budgets(&mut rng, table.bound.min(3 * max_dim));
        let triple = (|| {
            Ok::<_, HallError>((
                random_sdh_element(&mut rng, table, t, &gens, b[0])?.0,
                random_sdh_element(&mut rng, table, t, &gens, b[1])?.0,
                random_sdh_element(&mut rng, table, t, &gens, b[2])?.0,
            ))
        })();
        let (x, y, z) = match triple {
            Ok(v) => v,
            Err(e) => {
                report.record_error(suite, "sdh-associativity", format!("t={} trial {}", t, n), true, &e);
                continue;
            }
        };
        for (name, engine) in engines {
            let case = format!("t={} trial {} {}", t, n, name);
            let res = (|| {
                let l = sdh.mul(&sdh.mul(&x, &y, *engine)?, &z, *engine)?;
                let r = sdh.mul(&x, &sdh.mul(&y, &z, *engine)?, *engine)?;
                Ok((l, r))
            })();
            match res {
                Ok((l, r)) => {
                    report.check_eq(suite, "sdh-associativity", case, true, &l, &r, &|e: &SdhElement| e.render(table));
                }
                Err(e) => report.record_error(suite, "sdh-associativity", case, true, &e),
            }
        }
    }
    report
}

// ----- basis and normal form -----

fn stalk_dim(table: &CategoryTable, key: &SdhKey) -> usize {
    key.stalks.iter().map(|&a| table.total_dim(a)).sum()
}

/// Reduction of every enumerated complex: closed-form scalar against counted
/// Euler values, leading term against the invariants, and idempotence of the
/// normal form. With `gated = false` disagreements are findings.
pub fn basis_suite(table: &CategoryTable, t: usize, max_total: usize, budget: u128, gated: bool) -> Report {
    let suite = "basis";
    let mut report = Report::new();
    let sdh = match SdhAlgebra::new(table, t) {
        Ok(s) => s,
        Err(e) => {
            report.record_error(suite, "setup", format!("t={}", t), true, &e);
            return report;
        }
    };
    let mut seen: BTreeSet<crate::complex::ComplexInvariants> = BTreeSet::new();
    let mut n = 0usize;
    let mut scalar_mismatch: Option<String> = None;
    let res = for_each_complex(table, t, max_total, budget, &mut |m| {
        n += 1;
        let case = format!("t={} #{} dims={:?}", t, n, m.degree_dims());
        let inv = m.invariants(table)?;
        let printed = sdh.reduce_object_printed(m)?;
        let counted = sdh.reduce_object_counted(m)?;
        let ok = report.check_eq(suite, "reduction-scalar", case.clone(), gated, &printed.scalar, &counted.scalar, &|c| format!("{}", c));
        if !ok && scalar_mismatch.is_none() {
            scalar_mismatch = Some(format!("{} printed {} counted {}", case, printed.scalar, counted.scalar));
        }
        let expected_torus: TorusExponent =
            (0..t).map(|i| inv.image_class((i + t - 1) % t).iter().map(|x| 2 * x).collect()).collect();
        let shape_ok = counted.homology == inv.homology && counted.torus == expected_torus;
        let elem = sdh.reduce_counted(m)?;
        let lead = SdhKey { torus: expected_torus.clone(), stalks: inv.homology.clone() };
        let lead_dim = stalk_dim(table, &lead);
        let lead_ok = !elem.coefficient(&lead).is_zero()
            && elem.terms.keys().all(|k| k == &lead || stalk_dim(table, k) < lead_dim);
        report.record(suite, "reduction-invariants", case.clone(), shape_ok && lead_ok, true, elem.render(table), format!("{:?}", inv));
        if seen.insert(inv) {
            let again = sdh.renormalize(&elem)?;
            report.check_eq(suite, "normal-form-idempotence", case, true, &again, &elem, &|e: &SdhElement| e.render(table));
        }
        Ok(())
    });
    if let Err(e) = res {
        report.record_error(suite, "reduction-scalar", format!("t={} enumeration", t), true, &e);
    }
    if let Some(w) = scalar_mismatch {
        report.finding(format!("closed-form reduction scalar differs from the counted value at t={}; first witness: {}", t, w));
    }
    report
}

/// Multiplying basis elements by torus monomials permutes the basis up to nonzero scalars.
pub fn free_module_suite(table: &CategoryTable, t: usize, max_dim: usize) -> Report {
    let suite = "basis";
    let mut report = Report::new();
    let sdh = match SdhAlgebra::new(table, t) {
        Ok(s) => s,
        Err(e) => {
            report.record_error(suite, "setup", format!("t={}", t), true, &e);
            return report;
        }
    };
    let n = table.n();
    let mut monomials: Vec<TorusExponent> = Vec::new();
    for i in 0..t {
        for w in small_weights(table, max_dim.min(1)) {
            monomials.push(single_degree(t, i, &w));
            monomials.push(single_degree(t, i, &k0_scale(&w, 2)));
        }
    }
    let mut keys: Vec<SdhKey> = Vec::new();
    for tuple in small_tuples(table, t, max_dim) {
        keys.push(SdhKey { torus: crate::torus::zero_exponent(t, n), stalks: tuple.clone() });
        keys.push(SdhKey { torus: single_degree(t, 0, &vec![1; n]), stalks: tuple });
    }
    for (ei, e) in monomials.iter().enumerate() {
        let mut images = BTreeSet::new();
        let mut ok = true;
        let mut detail = String::new();
        for key in &keys {
            match sdh.torus_shift(e, key) {
                Ok((k, c)) => {
                    if c.is_zero() || !images.insert(k) {
                        ok = false;
                        detail = format!("{:?}", key);
                    }
                }
                Err(err) => {
                    ok = false;
                    detail = format!("{}", err);
                }
            }
        }
        report.record(suite, "torus-free-module", format!("t={} monomial {} {:?}", t, ei, e), ok, true, detail, String::new());
    }
    report
}

// ----- derived Hall algebra -----

fn show_dh(table: &CategoryTable) -> impl Fn(&DhElement) -> String + '_ {
    move |e: &DhElement| e.render(table)
}

fn random_dh_element(rng: &mut ChaCha8Rng, dh: &DhAlgebra<'_>, classes: &[ClassId], max_stalk: usize) -> Result<DhElement> {
    let table = dh.table();
    let pool: Vec<ClassId> = classes.iter().copied().filter(|&a| table.total_dim(a) <= max_stalk).collect();
    let mut out = dh.zero();
    if pool.is_empty() {
        return Ok(dh.one().scale(&random_coeff(rng, table.q)));
    }
    for _ in 0..rng.gen_range(1..=2) {
        let a = pool[rng.gen_range(0..pool.len())];
        let i = rng.gen_range(0..dh.t());
        out = out.add(&dh.generator(a, i)?.scale(&random_coeff(rng, table.q)));
    }
    Ok(out)
}

fn rotate_lin(x: &Lin<StalkTuple>, r: usize) -> Lin<StalkTuple> {
    x.iter().map(|(k, c)| (rotate_tuple(k, r), c.clone())).collect()
}

/// The derived relations, associativity, the Ext/shifted-Hom identity and
/// rotation invariance of the structure constants.
pub fn derived_suite(table: &CategoryTable, t: usize, max_dim: usize, trials: usize, seed: u64) -> Report {
    let suite = "derived";
    let mut report = Report::new();
    let dh = match DhAlgebra::new(table, t) {
        Ok(d) => d,
        Err(e) => {
            report.record_error(suite, "setup", format!("t={}", t), true, &e);
            return report;
        }
    };
    let show = show_dh(table);
    let classes = small_classes(table, max_dim);
    for &a in &classes {
        for &b in &classes {
            let names = format!("A={} B={}", table.name(a), table.name(b));
            if t == 1 {
                let case = format!("t=1 {}", names);
                let res = (|| Ok::<_, HallError>((dh.dh_mul(&dh.generator(a, 0)?, &dh.generator(b, 0)?)?, dh.one_periodic_rhs(a, b)?)))();
                match res {
                    Ok((l, r)) => {
                        report.check_eq(suite, "dh-one-periodic-merge", case, true, &l, &r, &show);
                    }
                    Err(e) => report.record_error(suite, "dh-one-periodic-merge", case, true, &e),
                }
                continue;
            }
            for i in 0..t {
                let j = (i + 1) % t;
                let case = format!("t={} {} i={}", t, names, i);
                let res = (|| Ok::<_, HallError>((dh.dh_mul(&dh.generator(a, i)?, &dh.generator(b, i)?)?, dh.same_degree_rhs(a, b, i)?)))();
                match res {
                    Ok((l, r)) => {
                        report.check_eq(suite, "dh-same-degree", case.clone(), true, &l, &r, &show);
                    }
                    Err(e) => report.record_error(suite, "dh-same-degree", case.clone(), true, &e),
                }
                let res = (|| Ok::<_, HallError>((dh.dh_mul(&dh.generator(b, i)?, &dh.generator(a, j)?)?, dh.adjacent_rhs(a, b, i)?)))();
                match res {
                    Ok((l, r)) => {
                        report.check_eq(suite, "dh-adjacent", case.clone(), true, &l, &r, &show);
                    }
                    Err(e) => report.record_error(suite, "dh-adjacent", case.clone(), true, &e),
                }
                for jj in (i + 2)..t {
                    if i == 0 && jj == t - 1 {
                        continue;
                    }
                    let case = format!("t={} {} i={} j={}", t, names, i, jj);
                    let res = (|| Ok::<_, HallError>((dh.dh_mul(&dh.generator(a, i)?, &dh.generator(b, jj)?)?, dh.distant_rhs(a, b, i, jj)?)))();
                    match res {
                        Ok((l, r)) => {
                            report.check_eq(suite, "dh-distant", case, true, &l, &r, &show);
                        }
                        Err(e) => report.record_error(suite, "dh-distant", case, true, &e),
                    }
                }
            }
            match table.gamma_terms(a, b) {
                Ok(terms) => {
                    let top = table.total_dim(a) + table.total_dim(b);
                    let ok = terms
                        .iter()
                        .all(|(m, n, _)| (*m, *n) == (b, a) || table.total_dim(*m) + table.total_dim(*n) < top);
                    let principal = terms.iter().any(|(m, n, _)| (*m, *n) == (b, a));
                    report.record(suite, "dh-order-decrease", format!("t={} {}", t, names), ok && principal, true, format!("{:?}", terms), String::new());
                }
                Err(e) => report.record_error(suite, "dh-order-decrease", format!("t={} {}", t, names), true, &e),
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (t as u64) << 40);
    for n in 0..trials {
        let case = format!("t={} trial {}", t, n);
        let b = budgets(&mut rng, table.bound.min(3 * max_dim));
        let res = (|| {
            let x = random_dh_element(&mut rng, &dh, &classes, b[0])?;
            let y = random_dh_element(&mut rng, &dh, &classes, b[1])?;
            let z = random_dh_element(&mut rng, &dh, &classes, b[2])?;
            Ok::<_, HallError>((dh.dh_mul(&dh.dh_mul(&x, &y)?, &z)?, dh.dh_mul(&x, &dh.dh_mul(&y, &z)?)?))
        })();
        match res {
            Ok((l, r)) => {
                report.check_eq(suite, "dh-associativity", case, true, &l, &r, &show);
            }
            Err(e) => report.record_error(suite, "dh-associativity", case, true, &e),
        }
    }

    let tuples = small_tuples(table, t, max_dim);
    for x in &tuples {
        for y in &tuples {
            let dims: usize = x.iter().chain(y.iter()).map(|&a| table.total_dim(a)).sum();
            if dims > table.bound {
                continue;
            }
            let case = format!("t={} {:?} {:?}", t, x, y);
            match dh.ext_vs_shifted_hom(x, y) {
                Ok((e, h)) => {
                    report.check_eq(suite, "ext-equals-shifted-hom", case.clone(), true, &e, &h, &|v| format!("{}", v));
                }
                Err(err) => report.record_error(suite, "ext-equals-shifted-hom", case.clone(), true, &err),
            }
            if t > 1 && !(x.iter().all(|&a| a == 0) || y.iter().all(|&a| a == 0)) {
                let res = (|| {
                    let p = dh.class_product(x, y)?;
                    let rp = dh.class_product(&rotate_tuple(x, 1), &rotate_tuple(y, 1))?;
                    Ok::<_, HallError>((rp, rotate_lin(&p, 1)))
                })();
                match res {
                    Ok((l, r)) => {
                        report.check_eq(suite, "dh-rotation-invariance", case, true, &l, &r, &|v| format!("{:?}", v));
                    }
                    Err(err) => report.record_error(suite, "dh-rotation-invariance", case, true, &err),
                }
            }
        }
    }
    report
}

// ----- embedding -----

/// Image of an element under the degree rotation `j ↦ j + r`, applied factor by
/// factor to the ordered normal form.
pub fn rotate_sdh(sdh: &SdhAlgebra<'_>, x: &SdhElement, r: usize) -> Result<SdhElement> {
    let (t, q) = (sdh.t(), sdh.q());
    let table = sdh.table();
    let mut out = sdh.zero();
    for (key, c) in &x.terms {
        let mut acc = sdh.one();
        for j in 0..t {
            if key.torus[j].iter().any(|&v| v != 0) {
                let m = SdhElement::torus_monomial(t, q, single_degree(t, (j + r) % t, &key.torus[j]));
                acc = sdh.mul_extended(&acc, &m)?;
            }
        }
        for j in (0..t).rev() {
            if key.stalks[j] != 0 {
                acc = sdh.mul_extended(&acc, &SdhElement::stalk(table, t, key.stalks[j], (j + r) % t)?)?;
            }
        }
        out = out.add(&acc.scale(c));
    }
    Ok(out)
}

/// Multiplicativity on generator pairs, injectivity on small basis tuples and
/// compatibility with degree rotation.
pub fn embedding_suite(table: &CategoryTable, t: usize, max_dim: usize, gated: bool) -> Report {
    embedding_suite_with(table, t, max_dim, gated, MiddleSigns::Positive)
}

/// [`embedding_suite`] with a chosen sign pattern for the middle torus factors.
pub fn embedding_suite_with(table: &CategoryTable, t: usize, max_dim: usize, gated: bool, signs: MiddleSigns) -> Report {
    let suite = match signs {
        MiddleSigns::Positive => "embedding",
        MiddleSigns::Alternating => "embedding-alternating",
    };
    let mut report = Report::new();
    let emb = match Embedding::new(table, t).map(|e| e.with_middle_signs(signs)) {
        Ok(e) => e,
        Err(e) => {
            report.record_error(suite, "setup", format!("t={}", t), gated, &e);
            return report;
        }
    };
    let show = |e: &SdhElement| e.render(table);
    let classes = small_classes(table, max_dim);
    let mut first_failure: Option<String> = None;
    for &a in &classes {
        for i in 0..t {
            for &b in &classes {
                for j in 0..t {
                    let case = format!("t={} Z[{}@{}]·Z[{}@{}]", t, table.name(a), i, table.name(b), j);
                    let res = (|| emb.homomorphism_sides(&emb.dh.generator(a, i)?, &emb.dh.generator(b, j)?))();
                    match res {
                        Ok((l, r)) => {
                            if !report.check_eq(suite, "embedding-multiplicative", case.clone(), gated, &l, &r, &show)
                                && first_failure.is_none()
                            {
                                first_failure = Some(case);
                            }
                        }
                        Err(e) => report.record_error(suite, "embedding-multiplicative", case, gated, &e),
                    }
                }
            }
        }
    }
    let tuples = small_tuples(table, t, max_dim);
    match emb.injectivity_witnesses(&tuples) {
        Ok(bad) => {
            let ok = bad.is_empty();
            report.record(suite, "embedding-injective", format!("t={} {} tuples", t, tuples.len()), ok, gated, bad.join("; "), String::new());
        }
        Err(e) => report.record_error(suite, "embedding-injective", format!("t={}", t), gated, &e),
    }
    if t > 1 {
        for x in &tuples {
            let case = format!("t={} {:?}", t, x);
            let res = (|| {
                let img = emb.iota(&emb.dh.class_element(x)?)?;
                let rotated = emb.iota(&emb.dh.class_element(&rotate_tuple(x, 1))?)?;
                Ok::<_, HallError>((rotated, rotate_sdh(&emb.sdh, &img, 1)?))
            })();
            match res {
                Ok((l, r)) => {
                    report.check_eq(suite, "embedding-rotation", case, gated, &l, &r, &show);
                }
                Err(e) => report.record_error(suite, "embedding-rotation", case, gated, &e),
            }
        }
    }
    if let Some(w) = first_failure {
        if !gated {
            report.finding(format!("{}: not multiplicative at t={}; first witness: {}", suite, t, w));
        }
    }
    report
}

/// Group a report's cases by identity: `(identity, passed, total)`.
pub fn summarize(report: &Report) -> Vec<(String, usize, usize)> {
    let mut map: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for c in &report.cases {
        let e = map.entry(c.identity.clone()).or_insert((0, 0));
        e.1 += 1;
        if c.passed {
            e.0 += 1;
        }
    }
    map.into_iter().map(|(k, (p, n))| (k, p, n)).collect()
}
