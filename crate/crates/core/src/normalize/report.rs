//! Structural checks of the boxed normal forms.
//!
//! Every class requires all monomials to be mixed and prescribes the pure
//! `(z, z̄)` part of each `φ_j` through a class degree `D`: listed monomials
//! carry the listed coefficients, all others vanish. Free coefficients are
//! reported as witnesses.

use super::ClassTag;
use crate::frames::{class32_determinant, class32_determinant_scale, levi_determinant};
use crate::manifold::{is_mixed, DefiningEquations};
use crate::scalar::{Mode, Scalar};
use crate::series::{MultiIndex, TruncatedSeries};

/// Outcome of [`assert_normal_form`].
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormReport {
    pub class: ClassTag,
    pub satisfied: bool,
    /// Named coefficients and invariants read off the germ.
    pub witnesses: Vec<(String, Scalar)>,
    pub violations: Vec<String>,
    /// Reliable order of the checked germ.
    pub order: i32,
}

/// A prescribed coefficient `(z exponents, z̄ exponents, value)`.
type Prescribed = (Vec<u32>, Vec<u32>, Scalar);

struct Shape {
    degree: u32,
    /// Per component: prescribed monomials.
    prescribed: Vec<Vec<Prescribed>>,
    /// Per component: pure monomials left free.
    free: Vec<Vec<(Vec<u32>, Vec<u32>, &'static str)>>,
    /// Smallest total degree of a monomial containing `u`.
    min_u_degree: u32,
}

fn shape(tag: ClassTag, s: i32) -> Shape {
    let q = |p, r| Scalar::ratio(p, r, Mode::Exact);
    let one = || q(1, 1);
    let i = Scalar::i(Mode::Exact);
    let n1 = |pairs: &[(u32, u32, Scalar)]| -> Vec<Prescribed> {
        pairs.iter().map(|(a, b, v)| (vec![*a], vec![*b], v.clone())).collect()
    };
    let cubic = || n1(&[(2, 1, one()), (1, 2, one())]);
    match tag {
        ClassTag::I => Shape { degree: 2, prescribed: vec![n1(&[(1, 1, one())])], free: vec![vec![]], min_u_degree: 3 },
        ClassTag::II => Shape {
            degree: 3,
            prescribed: vec![n1(&[(1, 1, one())]), cubic()],
            free: vec![vec![], vec![]],
            min_u_degree: 3,
        },
        ClassTag::III1 => Shape {
            degree: 3,
            prescribed: vec![n1(&[(1, 1, one())]), cubic(), n1(&[(2, 1, i.clone()), (1, 2, -i)])],
            free: vec![vec![], vec![], vec![]],
            min_u_degree: 3,
        },
        ClassTag::III2 => Shape {
            degree: 4,
            prescribed: vec![
                n1(&[(1, 1, one())]),
                cubic(),
                n1(&[(3, 1, q(2, 1)), (1, 3, q(2, 1)), (2, 2, q(3, 1))]),
            ],
            free: vec![vec![(vec![2], vec![2], "c1")], vec![], vec![]],
            min_u_degree: 4,
        },
        ClassTag::IV1 => Shape {
            degree: 2,
            prescribed: vec![vec![(vec![1, 0], vec![1, 0], one()), (vec![0, 1], vec![0, 1], q(s as i64, 1))]],
            free: vec![vec![]],
            min_u_degree: 3,
        },
        ClassTag::IV2 => Shape {
            degree: 3,
            prescribed: vec![vec![
                (vec![1, 0], vec![1, 0], one()),
                (vec![2, 0], vec![0, 1], q(1, 2)),
                (vec![0, 1], vec![2, 0], q(1, 2)),
            ]],
            free: vec![vec![]],
            min_u_degree: 3,
        },
    }
}

/// Exponent vectors of total degree `d` over `k` variables.
fn compositions(d: u32, k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    (0..=d)
        .rev()
        .flat_map(|first| {
            compositions(d - first, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn full_exponents(zs: &[u32], zbs: &[u32], c: usize) -> Vec<u32> {
    let mut e = zs.to_vec();
    e.extend_from_slice(zbs);
    e.extend(std::iter::repeat(0).take(c));
    e
}

fn monomial_name(e: &[u32], m: &DefiningEquations) -> String {
    let labels = m.sig().labels();
    let parts: Vec<String> = e
        .iter()
        .zip(labels)
        .filter(|(k, _)| **k > 0)
        .map(|(k, l)| if *k == 1 { l.clone() } else { format!("{l}^{k}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Degree of the first coefficient above `tol`, within the reliable order.
pub(crate) fn first_nonvanishing(s: &TruncatedSeries, tol: f64) -> Option<u32> {
    s.terms().filter(|(_, v)| !v.is_zero_tol(tol)).map(|(k, _)| k.degree()).filter(|d| (*d as i32) <= s.order()).min()
}

/// Like [`first_nonvanishing`], with each degree's tolerance multiplied by the
/// largest coefficient of `scale` in that degree (at least 1).
pub(crate) fn first_nonvanishing_scaled(s: &TruncatedSeries, scale: &TruncatedSeries, tol: f64) -> Option<u32> {
    if tol == 0.0 {
        return first_nonvanishing(s, tol);
    }
    let mut by_degree = std::collections::BTreeMap::<u32, f64>::new();
    for (k, v) in scale.terms() {
        let e = by_degree.entry(k.degree()).or_insert(1.0);
        *e = e.max(v.abs());
    }
    s.terms()
        .filter(|(k, v)| v.abs() > tol * by_degree.get(&k.degree()).copied().unwrap_or(1.0))
        .map(|(k, _)| k.degree())
        .filter(|d| (*d as i32) <= s.order())
        .min()
}

/// [`assert_normal_form_with_tol`] at the germ's own tolerance.
pub fn assert_normal_form(m: &DefiningEquations, tag: ClassTag) -> NormalFormReport {
    assert_normal_form_with_tol(m, tag, m.mode().tol())
}

/// Checks the boxed normal form of `tag`; coefficients compare within `tol`
/// (exactly when `tol = 0` and the germ is exact).
pub fn assert_normal_form_with_tol(m: &DefiningEquations, tag: ClassTag, tol: f64) -> NormalFormReport {
    let mut report = NormalFormReport { class: tag, satisfied: false, witnesses: Vec::new(), violations: Vec::new(), order: m.order() };
    let (n, c) = (m.n(), m.c());
    if (n, c) != tag.shape() {
        report.violations.push(format!("shape (n, c) = {:?}, class {tag} needs {:?}", (n, c), tag.shape()));
        return report;
    }
    let s = if tag == ClassTag::IV1 {
        let v = m.phi()[0].coeff_of(&[0, 1, 0, 1, 0]).re();
        report.witnesses.push(("s".into(), v.clone()));
        v.re_sign(tol)
    } else {
        0
    };
    let shape = shape(tag, s);
    for (j, phi) in m.phi().iter().enumerate() {
        for (k, v) in phi.terms() {
            if v.is_zero_tol(tol) {
                continue;
            }
            let e = k.exponents(2 * n + c);
            if !is_mixed(k, n) {
                report.violations.push(format!("phi{}: non-mixed monomial {} = {v}", j + 1, monomial_name(&e, m)));
            } else if k.degree_in(2 * n..2 * n + c) > 0 && k.degree() < shape.min_u_degree {
                report.violations.push(format!("phi{}: transverse monomial {} = {v} below degree {}", j + 1, monomial_name(&e, m), shape.min_u_degree));
            }
        }
        for d in 2..=shape.degree.min(m.order().max(0) as u32) {
            for zz in compositions(d, 2 * n) {
                let (zs, zbs) = zz.split_at(n);
                if zs.iter().sum::<u32>() == 0 || zbs.iter().sum::<u32>() == 0 {
                    continue;
                }
                let e = full_exponents(zs, zbs, c);
                let got = phi.coeff(&MultiIndex::new(&e));
                if let Some((_, _, name)) = shape.free[j].iter().find(|(a, b, _)| a == zs && b == zbs) {
                    report.witnesses.push((name.to_string(), got));
                    continue;
                }
                let want = shape.prescribed[j]
                    .iter()
                    .find(|(a, b, _)| a == zs && b == zbs)
                    .map_or_else(|| Scalar::zero(Mode::Exact), |(_, _, v)| v.clone());
                if !got.approx_eq(&want, tol) {
                    report.violations.push(format!("phi{}: coefficient of {} is {got}, expected {want}", j + 1, monomial_name(&e, m)));
                }
            }
        }
    }
    match tag {
        ClassTag::III2 => match class32_determinant(m).and_then(|det| Ok((det, class32_determinant_scale(m)?))) {
            Ok((det, scale)) => {
                report.witnesses.push(("degeneracy determinant order".into(), Scalar::from_int(det.order() as i64, Mode::Exact)));
                if let Some(d) = first_nonvanishing_scaled(&det, &scale, tol) {
                    report.violations.push(format!("degeneracy determinant is nonzero in degree {d}"));
                }
            }
            Err(e) => report.violations.push(format!("degeneracy determinant: {e}")),
        },
        ClassTag::IV2 => match levi_determinant(&m.phi()[0]) {
            Ok(det) => {
                report.witnesses.push(("Levi determinant order".into(), Scalar::from_int(det.order() as i64, Mode::Exact)));
                if let Some(d) = first_nonvanishing(&det, tol) {
                    report.violations.push(format!("Levi determinant is nonzero in degree {d}"));
                }
            }
            Err(e) => report.violations.push(format!("Levi determinant: {e}")),
        },
        ClassTag::IV1 if s == 0 => report.violations.push("Levi form is degenerate (s = 0)".into()),
        _ => {}
    }
    report.satisfied = report.violations.is_empty();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::{model, model_iv1};

    #[test]
    fn models_satisfy_their_forms() {
        for tag in ClassTag::ALL {
            let order = if tag == ClassTag::III2 { 8 } else { 6 };
            let r = assert_normal_form(&model(tag, order), tag);
            assert!(r.satisfied, "{tag}: {:?}", r.violations);
        }
        let r = assert_normal_form(&model_iv1(-1, 5), ClassTag::IV1);
        assert!(r.satisfied, "{:?}", r.violations);
        assert_eq!(r.witnesses[0].1, Scalar::from_int(-1, Mode::Exact));
    }

    #[test]
    fn wrong_shape_is_a_violation() {
        let r = assert_normal_form(&model(ClassTag::II, 5), ClassTag::III1);
        assert!(!r.satisfied);
        assert!(r.violations[0].starts_with("shape"));
    }

    #[test]
    fn model_iii1_fails_the_iii2_form() {
        let r = assert_normal_form(&model(ClassTag::III1, 5), ClassTag::III2);
        assert!(!r.satisfied);
        assert!(r.violations.iter().any(|v| v.contains("phi3")), "{:?}", r.violations);
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(3, 2).len(), 4);
        assert_eq!(compositions(2, 4).len(), 10);
    }
}
