//! Congruence normalization of 2×2 Hermitian matrices.

use super::Condition;
use crate::frames::HermitianForm2;
use crate::linalg::Matrix;
use crate::scalar::{Mode, Scalar};

/// `P*·H·P = 2·sign·diag(1, s)` with `s ∈ {1, −1}` for rank 2 and `s = 0`
/// for rank 1. `sign = −1` when the first pivot is negative; a germ absorbs
/// it with `w ↦ −w`.
#[derive(Clone, Debug, PartialEq)]
pub struct Congruence {
    pub p: Matrix,
    pub s: i32,
    pub sign: i32,
}

impl Congruence {
    /// `P*·H·P`.
    pub fn apply(&self, h: &HermitianForm2) -> Matrix {
        let e = h.entries();
        let hm = Matrix::from_rows(e.into_iter().map(Vec::from).collect());
        self.p.adjoint().mul(&hm).mul(&self.p)
    }
}

/// Pivots on a nonzero diagonal entry, completes the square and rescales.
/// When both diagonal entries vanish, the first column `(1, β̄)` creates the
/// positive pivot `2|β|²`.
pub fn hermitian_congruence_normalize(h: &HermitianForm2, target_rank: usize) -> Result<Congruence, Condition> {
    let exact = h.a.is_exact() && h.beta.is_exact() && h.c.is_exact();
    let mode = if exact { Mode::Exact } else { Mode::float() };
    let tol = mode.tol();
    let rank = h.rank(tol);
    if rank != target_rank {
        return Err(Condition::LeviRank { expected: target_rank, got: rank });
    }
    let zero = Scalar::zero(mode);
    let one = Scalar::one(mode);
    let m2 = |a: Scalar, b: Scalar, c: Scalar, d: Scalar| Matrix::from_rows(vec![vec![a, b], vec![c, d]]);
    let p0 = if !h.a.is_zero_tol(tol) {
        Matrix::identity(2, mode)
    } else if !h.c.is_zero_tol(tol) {
        m2(zero.clone(), one.clone(), one.clone(), zero.clone())
    } else {
        m2(one.clone(), zero.clone(), h.beta.conj().to_mode(mode), one.clone())
    };
    let h1 = Congruence { p: p0.clone(), s: 0, sign: 1 }.apply(h);
    let (a1, b1) = (h1.get(0, 0).re(), h1.get(0, 1).clone());
    let p1 = m2(one.clone(), -(&b1 / &a1), zero.clone(), one.clone());
    let d = &h1.get(1, 1).re() - &(&(&b1 * &b1.conj()) / &a1);
    let sign = a1.re_sign(tol);
    let flip = Scalar::from_int(sign as i64, mode);
    let (a1, d) = (&a1 * &flip, &d * &flip);
    let two = Scalar::from_int(2, mode);
    let r1 = (&two / &a1).sqrt_real(tol);
    let s = d.re_sign(tol);
    let r2 = if s == 0 { one.clone() } else { (&two / &(&d * &Scalar::from_int(s as i64, mode))).sqrt_real(tol) };
    let scale = m2(r1, zero.clone(), zero, r2);
    let p = p0.mul(&p1).mul(&scale);
    let out_mode = if (0..2).all(|i| p.row(i).iter().all(Scalar::is_exact)) { mode } else { Mode::float() };
    let p = Matrix::from_rows(p.to_rows().into_iter().map(|r| r.iter().map(|x| x.to_mode(out_mode)).collect()).collect());
    Ok(Congruence { p, s, sign })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> Scalar {
        Scalar::gaussian(re, im, Mode::Exact)
    }

    /// `2·sign·diag(1, s)` entrywise, within `tol`.
    fn check(h: &HermitianForm2, target: usize, s: i32, sign: i32, tol: f64) -> Congruence {
        let cg = hermitian_congruence_normalize(h, target).unwrap();
        assert_eq!((cg.s, cg.sign), (s, sign));
        let out = cg.apply(h);
        let want = [[2 * sign, 0], [0, 2 * sign * s]];
        for i in 0..2 {
            for j in 0..2 {
                let w = Scalar::from_int(want[i][j] as i64, Mode::Exact);
                assert!(out.get(i, j).approx_eq(&w, tol), "entry ({i},{j}) = {}", out.get(i, j));
            }
        }
        cg
    }

    #[test]
    fn identity_form_is_fixed() {
        let h = HermitianForm2::new(g(2, 0), g(0, 0), g(2, 0));
        let cg = check(&h, 2, 1, 1, 0.0);
        assert_eq!(cg.p, Matrix::identity(2, Mode::Exact));
    }

    #[test]
    fn off_diagonal_form_is_indefinite() {
        check(&HermitianForm2::new(g(0, 0), g(2, 0), g(0, 0)), 2, -1, 1, 1e-12);
        check(&HermitianForm2::new(g(0, 0), g(0, 2), g(0, 0)), 2, -1, 1, 1e-12);
    }

    #[test]
    fn rank_one_form() {
        check(&HermitianForm2::new(g(2, 0), g(2, 0), g(2, 0)), 1, 0, 1, 0.0);
        check(&HermitianForm2::new(g(0, 0), g(0, 0), g(8, 0)), 1, 0, 1, 0.0);
    }

    #[test]
    fn negative_pivot_is_reported() {
        check(&HermitianForm2::new(g(-2, 0), g(1, 1), g(-8, 0)), 2, 1, -1, 1e-12);
        check(&HermitianForm2::new(g(-2, 0), g(0, 0), g(8, 0)), 2, -1, -1, 0.0);
    }

    #[test]
    fn rank_mismatch_is_named() {
        let h = HermitianForm2::new(g(2, 0), g(0, 0), g(0, 0));
        assert_eq!(hermitian_congruence_normalize(&h, 2), Err(Condition::LeviRank { expected: 2, got: 1 }));
    }
}
