//! Germ builders and random generators shared by the integration tests.
#![allow(dead_code)]

use crforge_core::manifold::{Biholomorphism, DefiningEquations};
use crforge_core::series::{MultiIndex, Signature};
use crforge_core::{Mode, Scalar, TruncatedSeries};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

pub const E: Mode = Mode::Exact;

pub fn q(p: i64, r: i64) -> Scalar {
    Scalar::ratio(p, r, E)
}

pub fn g(re: i64, im: i64) -> Scalar {
    Scalar::gaussian(re, im, E)
}

/// A series over the real `(z, z̄, u)` alphabet.
pub fn series(n: usize, c: usize, order: i32, terms: &[(&[u32], Scalar)]) -> TruncatedSeries {
    TruncatedSeries::from_exponents(Signature::real(n, c), order, E, terms)
}

pub fn germ(n: usize, c: usize, order: i32, phis: &[&[(&[u32], Scalar)]]) -> DefiningEquations {
    DefiningEquations::new(n, c, phis.iter().map(|t| series(n, c, order, t)).collect()).unwrap()
}

fn small_rational(rng: &mut impl Rng, den: i64) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(-3i64..=3)), BigInt::from(den))
}

pub fn small_scalar(rng: &mut impl Rng, den: i64) -> Scalar {
    Scalar::exact(small_rational(rng, den), small_rational(rng, den))
}

/// Exponent vectors of total degree `d` over `k` variables.
pub fn exponents(d: u32, k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    (0..=d)
        .flat_map(|first| {
            exponents(d - first, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Random real germ: each monomial of degree `2..=max_degree` is present with
/// probability `density`, paired with its conjugate partner.
pub fn random_germ(rng: &mut impl Rng, n: usize, c: usize, order: i32, max_degree: u32, density: f64) -> DefiningEquations {
    let sig = Signature::real(n, c);
    let nv = 2 * n + c;
    let mut phi = Vec::new();
    for _ in 0..c {
        let mut terms: Vec<(MultiIndex, Scalar)> = Vec::new();
        for d in 2..=max_degree {
            for e in exponents(d, nv) {
                if !rng.gen_bool(density) {
                    continue;
                }
                let mut bar = e.clone();
                for k in 0..n {
                    bar.swap(k, n + k);
                }
                let v = small_scalar(rng, 4);
                if bar == e {
                    terms.push((MultiIndex::new(&e), v.re()));
                } else {
                    terms.push((MultiIndex::new(&e), v.clone()));
                    terms.push((MultiIndex::new(&bar), v.conj()));
                }
            }
        }
        phi.push(TruncatedSeries::from_terms(sig.clone(), order, E, terms));
    }
    DefiningEquations::new(n, c, phi).unwrap()
}

/// Identity plus small random linear and quadratic terms. The transverse
/// block of the linear part stays real so the image stays graphed nearby.
pub fn random_degree_two_map(rng: &mut impl Rng, n: usize, c: usize, order: i32) -> Biholomorphism {
    let sig = Signature::holomorphic(n, c);
    let nv = n + c;
    let maps = (0..nv)
        .map(|i| {
            let mut terms = vec![(MultiIndex::unit(i, 1), Scalar::one(E))];
            for j in 0..nv {
                let v = small_scalar(rng, 16);
                let v = if i >= n && j >= n { v.re() } else { v };
                terms.push((MultiIndex::unit(j, 1), v));
            }
            for e in exponents(2, nv) {
                terms.push((MultiIndex::new(&e), small_scalar(rng, 8)));
            }
            TruncatedSeries::from_terms(sig.clone(), order, E, terms)
        })
        .collect();
    Biholomorphism::new(n, c, maps).unwrap()
}

/// Laplace expansion along the first row.
pub fn det(rows: &[Vec<TruncatedSeries>]) -> TruncatedSeries {
    if rows.len() == 1 {
        return rows[0][0].clone();
    }
    let mut acc: Option<TruncatedSeries> = None;
    for (col, entry) in rows[0].iter().enumerate() {
        let minor: Vec<Vec<TruncatedSeries>> = rows[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, s)| s.clone()).collect())
            .collect();
        let term = entry.mul(&det(&minor)).unwrap();
        acc = Some(match acc {
            None => term,
            Some(a) if col % 2 == 1 => a.sub(&term).unwrap(),
            Some(a) => a.add(&term).unwrap(),
        });
    }
    acc.unwrap()
}

/// `A_{k,l}` as determinant quotients: the matrix `i·I + [φ_{j,u_l}]` with
/// column `l` replaced by `−[φ_{j,z_k}]`, over the matrix itself.
pub fn cramer_coefficients(m: &DefiningEquations) -> Vec<Vec<TruncatedSeries>> {
    let (n, c) = (m.n(), m.c());
    let sig = m.sig().clone();
    let i = TruncatedSeries::constant(sig.clone(), crforge_core::series::EXACT_ORDER, Scalar::i(m.mode()));
    let jac: Vec<Vec<TruncatedSeries>> = (0..c)
        .map(|j| {
            (0..c)
                .map(|l| {
                    let d = m.phi()[j].partial_derivative(sig.u(l));
                    if j == l {
                        d.add(&i).unwrap()
                    } else {
                        d
                    }
                })
                .collect()
        })
        .collect();
    let denominator = det(&jac);
    (0..n)
        .map(|k| {
            (0..c)
                .map(|l| {
                    let mut num = jac.clone();
                    for (j, row) in num.iter_mut().enumerate() {
                        row[l] = m.phi()[j].partial_derivative(sig.z(k)).neg();
                    }
                    det(&num).div(&denominator).unwrap()
                })
                .collect()
        })
        .collect()
}

/// The four `(n, c)` shapes with `2n + c ≤ 5`.
pub const SHAPES: [(usize, usize); 4] = [(1, 1), (1, 2), (1, 3), (2, 1)];
