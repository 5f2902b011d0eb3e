//! Tangent frames of a germ: intrinsic generators, Lie brackets, origin
//! ranks, the Levi matrix and the invariants built from it.
//!
//! Fields are written on the ordered basis `(∂z_•, ∂z̄_•, ∂u_•)`, which is the
//! variable order of [`Signature::real`]: direction `d` acts as `∂/∂x_d`.
//! Exact constant coefficients carry [`EXACT_ORDER`].

use std::sync::Arc;

use crate::linalg::rank_of_rows;
use crate::manifold::DefiningEquations;
use crate::scalar::{Mode, Scalar};
use crate::series::maps::{solve_linear, MapError};
use crate::series::{SeriesError, Signature, TruncatedSeries, EXACT_ORDER};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrameError {
    #[error("operation needs (n, c) = {expected:?}, got {got:?}")]
    Shape { expected: (usize, usize), got: (usize, usize) },
    #[error("Levi entry [L1, L1bar] vanishes at the origin")]
    DegenerateDenominator,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// `Σ_d X_d ∂_d` over the real signature of an `(n, c)` germ.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentFrameField {
    n: usize,
    c: usize,
    coeffs: Vec<TruncatedSeries>,
}

impl TangentFrameField {
    /// Panics unless there are `2n + c` coefficients over `(z, z̄, u)`.
    pub fn new(n: usize, c: usize, coeffs: Vec<TruncatedSeries>) -> TangentFrameField {
        assert_eq!(coeffs.len(), 2 * n + c, "one coefficient per basis direction");
        let sig = Signature::real(n, c);
        assert!(coeffs.iter().all(|s| s.sig().same_shape(&sig)), "coefficients over (z, zbar, u)");
        TangentFrameField { n, c, coeffs }
    }

    pub fn zero(n: usize, c: usize, mode: Mode) -> TangentFrameField {
        let sig = Signature::real(n, c);
        let coeffs = (0..2 * n + c).map(|_| TruncatedSeries::zero(sig.clone(), EXACT_ORDER, mode)).collect();
        TangentFrameField { n, c, coeffs }
    }

    /// The coordinate field `∂_d`.
    pub fn coordinate(n: usize, c: usize, d: usize, mode: Mode) -> TangentFrameField {
        let mut f = TangentFrameField::zero(n, c, mode);
        let sig = f.sig().clone();
        f.coeffs[d] = TruncatedSeries::constant(sig, EXACT_ORDER, Scalar::one(mode));
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn sig(&self) -> &Arc<Signature> {
        self.coeffs[0].sig()
    }

    pub fn mode(&self) -> Mode {
        self.coeffs.iter().fold(Mode::Exact, |m, s| m.join(s.mode()))
    }

    pub fn coeffs(&self) -> &[TruncatedSeries] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> &TruncatedSeries {
        &self.coeffs[d]
    }

    /// Coefficient of `∂/∂u_l`.
    pub fn u_coeff(&self, l: usize) -> &TruncatedSeries {
        &self.coeffs[2 * self.n + l]
    }

    /// Minimum coefficient order.
    pub fn order(&self) -> i32 {
        self.coeffs.iter().map(TruncatedSeries::order).min().unwrap_or(EXACT_ORDER)
    }

    /// The derivation `f ↦ Σ_d X_d ∂_d f`.
    pub fn apply(&self, f: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        let mut acc: Option<TruncatedSeries> = None;
        for (d, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() && x.order() >= EXACT_ORDER {
                continue;
            }
            let t = x.mul(&f.partial_derivative(d))?;
            acc = Some(match acc {
                Some(a) => a.add(&t)?,
                None => t,
            });
        }
        Ok(acc.unwrap_or_else(|| TruncatedSeries::zero(f.sig().clone(), EXACT_ORDER, f.mode())))
    }

    pub fn scale(&self, s: &Scalar) -> TangentFrameField {
        TangentFrameField { coeffs: self.coeffs.iter().map(|x| x.scale(s)).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &TangentFrameField) -> Result<TangentFrameField, SeriesError> {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect::<Result<_, _>>()?;
        Ok(TangentFrameField { coeffs, ..self.clone() })
    }

    pub fn sub(&self, other: &TangentFrameField) -> Result<TangentFrameField, SeriesError> {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect::<Result<_, _>>()?;
        Ok(TangentFrameField { coeffs, ..self.clone() })
    }

    pub fn truncate(&self, order: i32) -> TangentFrameField {
        TangentFrameField { coeffs: self.coeffs.iter().map(|x| x.truncate(order)).collect(), ..self.clone() }
    }
}

/// Solves `(i·I + φ_u)·A_k = −φ_{z_k}` for each `k` and returns
/// `L_k = ∂/∂z_k + Σ_l A_{k,l} ∂/∂u_l`.
pub fn tangent_generators(m: &DefiningEquations) -> Result<Vec<TangentFrameField>, FrameError> {
    let (n, c) = (m.n(), m.c());
    let sig = m.sig().clone();
    let mode = m.mode();
    let i = TruncatedSeries::constant(sig.clone(), EXACT_ORDER, Scalar::i(mode));
    let jac: Vec<Vec<TruncatedSeries>> = m
        .phi()
        .iter()
        .enumerate()
        .map(|(j, phi)| {
            (0..c)
                .map(|l| {
                    let d = phi.partial_derivative(sig.u(l));
                    if l == j {
                        d.add(&i).expect("same signature")
                    } else {
                        d
                    }
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let rhs: Vec<TruncatedSeries> = m.phi().iter().map(|phi| phi.partial_derivative(sig.z(k)).neg()).collect();
        let a = if c == 1 { vec![rhs[0].div(&jac[0][0])?] } else { solve_linear(&jac, &rhs)? };
        let mut field = TangentFrameField::coordinate(n, c, sig.z(k), mode);
        for (l, al) in a.into_iter().enumerate() {
            field.coeffs[sig.u(l)] = al;
        }
        out.push(field);
    }
    Ok(out)
}

/// Conjugates every coefficient and swaps `∂z_k ↔ ∂z̄_k`.
pub fn conjugate_field(x: &TangentFrameField) -> TangentFrameField {
    let n = x.n;
    let swap = |d: usize| match d {
        d if d < n => d + n,
        d if d < 2 * n => d - n,
        d => d,
    };
    let mut coeffs = x.coeffs.clone();
    for (d, s) in x.coeffs.iter().enumerate() {
        coeffs[swap(d)] = s.swap_bar().expect("real signature is paired");
    }
    TangentFrameField { coeffs, ..x.clone() }
}

/// `[X, Y] = Σ_d (X(Y_d) − Y(X_d)) ∂_d`.
pub fn lie_bracket(x: &TangentFrameField, y: &TangentFrameField) -> Result<TangentFrameField, SeriesError> {
    let coeffs = x
        .coeffs
        .iter()
        .zip(&y.coeffs)
        .map(|(xd, yd)| x.apply(yd)?.sub(&y.apply(xd)?))
        .collect::<Result<_, _>>()?;
    Ok(TangentFrameField { coeffs, ..x.clone() })
}

/// Constant terms in the ordered basis.
pub fn eval_at_origin(x: &TangentFrameField) -> Vec<Scalar> {
    x.coeffs.iter().map(TruncatedSeries::constant_term).collect()
}

/// Rows of origin values, one per field.
#[derive(Clone, Debug, PartialEq)]
pub struct OriginFrameMatrix {
    pub rows: Vec<Vec<Scalar>>,
}

impl OriginFrameMatrix {
    pub fn of(fields: &[TangentFrameField]) -> OriginFrameMatrix {
        OriginFrameMatrix { rows: fields.iter().map(eval_at_origin).collect() }
    }

    pub fn rank(&self, tol: f64) -> usize {
        rank_of_rows(&self.rows, tol)
    }
}

/// Complex rank of the fields at the origin, with the fields' tolerance.
pub fn rank_at_origin(fields: &[TangentFrameField]) -> usize {
    let mode = fields.iter().fold(Mode::Exact, |m, f| m.join(f.mode()));
    OriginFrameMatrix::of(fields).rank(mode.tol())
}

/// The Hermitian matrix `[[a, β], [β̄, c]]` with `a, c` real.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianForm2 {
    pub a: Scalar,
    pub beta: Scalar,
    pub c: Scalar,
}

impl HermitianForm2 {
    /// Takes real parts of the diagonal.
    pub fn new(a: Scalar, beta: Scalar, c: Scalar) -> HermitianForm2 {
        HermitianForm2 { a: a.re(), beta, c: c.re() }
    }

    /// Hermitian part of an arbitrary 2×2 matrix.
    pub fn from_entries(m: [[Scalar; 2]; 2]) -> HermitianForm2 {
        let [[m00, m01], [m10, m11]] = m;
        let two = Scalar::from_int(2, Mode::Exact);
        let beta = &(&m01 + &m10.conj()) * &two.inv();
        HermitianForm2::new(m00, beta, m11)
    }

    pub fn entries(&self) -> [[Scalar; 2]; 2] {
        [[self.a.clone(), self.beta.clone()], [self.beta.conj(), self.c.clone()]]
    }

    /// `a·c − |β|²`.
    pub fn det(&self) -> Scalar {
        &(&self.a * &self.c) - &(&self.beta * &self.beta.conj())
    }

    pub fn rank(&self, tol: f64) -> usize {
        let rows = self.entries().into_iter().map(Vec::from).collect::<Vec<_>>();
        rank_of_rows(&rows, tol)
    }
}

/// Entry `(j, i)` is `i·(L_i(Ā_j) − L̄_j(A_i))`.
#[derive(Clone, Debug)]
pub struct LeviMatrix {
    pub series: [[TruncatedSeries; 2]; 2],
    pub origin: HermitianForm2,
}

fn require_shape(m: &DefiningEquations, n: usize, c: usize) -> Result<(), FrameError> {
    if (m.n(), m.c()) != (n, c) {
        return Err(FrameError::Shape { expected: (n, c), got: (m.n(), m.c()) });
    }
    Ok(())
}

/// `L_1, L_2, L̄_1, L̄_2` of an `n = 2, c = 1` germ.
fn generators_2_1(m: &DefiningEquations) -> Result<[TangentFrameField; 4], FrameError> {
    require_shape(m, 2, 1)?;
    let l = tangent_generators(m)?;
    let lb: Vec<TangentFrameField> = l.iter().map(conjugate_field).collect();
    Ok([l[0].clone(), l[1].clone(), lb[0].clone(), lb[1].clone()])
}

/// `L_i(Ā_j) − L̄_j(A_i)`, the `∂u` coefficient of `[L_i, L̄_j]`.
fn levi_bracket(l: &[TangentFrameField; 4], i: usize, j: usize) -> Result<TruncatedSeries, SeriesError> {
    let (li, lbj) = (&l[i], &l[2 + j]);
    li.apply(lbj.u_coeff(0))?.sub(&lbj.apply(li.u_coeff(0))?)
}

pub fn levi_matrix(m: &DefiningEquations) -> Result<LeviMatrix, FrameError> {
    let l = generators_2_1(m)?;
    let i = Scalar::i(m.mode());
    let entry = |row: usize, col: usize| -> Result<TruncatedSeries, FrameError> {
        Ok(levi_bracket(&l, col, row)?.scale(&i))
    };
    let series = [[entry(0, 0)?, entry(0, 1)?], [entry(1, 0)?, entry(1, 1)?]];
    let origin = HermitianForm2::from_entries([
        [series[0][0].constant_term(), series[0][1].constant_term()],
        [series[1][0].constant_term(), series[1][1].constant_term()],
    ]);
    Ok(LeviMatrix { series, origin })
}

/// `k = (−L₂(Ā₁) + L̄₁(A₂)) / (L₁(Ā₁) − L̄₁(A₁))`.
pub fn k_function(m: &DefiningEquations) -> Result<TruncatedSeries, FrameError> {
    let l = generators_2_1(m)?;
    k_from_generators(&l)
}

fn k_from_generators(l: &[TangentFrameField; 4]) -> Result<TruncatedSeries, FrameError> {
    let num = levi_bracket(l, 1, 0)?.neg();
    let den = levi_bracket(l, 0, 0)?;
    if den.constant_term().is_zero_tol(den.tol()) {
        return Err(FrameError::DegenerateDenominator);
    }
    Ok(num.div(&den)?)
}

/// Constant term of `L̄₁(k)`.
pub fn freeman_value(m: &DefiningEquations) -> Result<Scalar, FrameError> {
    let l = generators_2_1(m)?;
    let k = k_from_generators(&l)?;
    Ok(l[2].apply(&k)?.constant_term())
}

// Variable slots of the (z1, z2, z̄1, z̄2, u) alphabet.
const Z1: usize = 0;
const Z2: usize = 1;
const ZB1: usize = 2;
const ZB2: usize = 3;
const U: usize = 4;

type Factor = &'static [usize];

/// Signed quartic and quadratic products of the closed form; the quadratic
/// pair is the `φ_u⁰` part of the Levi determinant.
const LEVI_DET_TERMS: &[(i64, &[Factor])] = &[
    (1, &[&[Z2, ZB2], &[Z1, ZB1]]),
    (-1, &[&[Z2, ZB1], &[Z1, ZB2]]),
    (1, &[&[Z2, ZB1], &[ZB2], &[Z1, U], &[U]]),
    (-1, &[&[Z2, ZB1], &[ZB2], &[Z1], &[U, U]]),
    (-1, &[&[ZB1], &[Z2, U], &[Z1], &[ZB2, U]]),
    (1, &[&[ZB1], &[Z2, U], &[U], &[Z1, ZB2]]),
    (-1, &[&[Z2], &[ZB1, U], &[ZB2], &[Z1, U]]),
    (-1, &[&[Z2], &[ZB1], &[U, U], &[Z1, ZB2]]),
    (1, &[&[Z2], &[ZB1, U], &[U], &[Z1, ZB2]]),
    (-1, &[&[Z2, ZB2], &[ZB1], &[Z1, U], &[U]]),
    (1, &[&[Z2, ZB2], &[Z1], &[ZB1], &[U, U]]),
    (-1, &[&[Z2, ZB2], &[Z1], &[ZB1, U], &[U]]),
    (1, &[&[Z2, ZB1], &[Z1], &[ZB2, U], &[U]]),
    (1, &[&[Z2], &[ZB2, U], &[ZB1], &[Z1, U]]),
    (-1, &[&[Z2], &[ZB2, U], &[Z1, ZB1], &[U]]),
    (1, &[&[ZB2], &[Z2, U], &[Z1], &[ZB1, U]]),
    (-1, &[&[ZB2], &[Z2, U], &[U], &[Z1, ZB1]]),
    (1, &[&[ZB2], &[Z2], &[U, U], &[Z1, ZB1]]),
    (-1, &[&[Z2, ZB1], &[Z1, ZB2], &[U], &[U]]),
    (1, &[&[Z2, ZB2], &[Z1, ZB1], &[U], &[U]]),
];

/// Cubic products multiplied by `+i`.
const LEVI_DET_PLUS_I: &[&[Factor]] = &[
    &[&[Z2, ZB2], &[Z1], &[ZB1, U]],
    &[&[ZB1], &[Z2, U], &[Z1, ZB2]],
    &[&[Z2, ZB1], &[ZB2], &[Z1, U]],
    &[&[Z2], &[ZB2, U], &[Z1, ZB1]],
];

/// Cubic products multiplied by `−i`.
const LEVI_DET_MINUS_I: &[&[Factor]] = &[
    &[&[ZB2], &[Z2, U], &[Z1, ZB1]],
    &[&[Z2, ZB1], &[Z1], &[ZB2, U]],
    &[&[Z2], &[ZB1, U], &[Z1, ZB2]],
    &[&[Z2, ZB2], &[ZB1], &[Z1, U]],
];

/// Closed-form Levi determinant of `v = φ(z₁, z₂, z̄₁, z̄₂, u)`:
/// `4/((i + φ_u)³(i − φ_u)³)` times the brace of derivative products.
pub fn levi_determinant(phi: &TruncatedSeries) -> Result<TruncatedSeries, FrameError> {
    let sig = Signature::real(2, 1);
    if !phi.sig().same_shape(&sig) {
        return Err(FrameError::Shape { expected: (2, 1), got: (phi.sig().n(), phi.sig().c()) });
    }
    let mode = phi.mode();
    let mut cache: std::collections::HashMap<&'static [usize], TruncatedSeries> = Default::default();
    let mut product = |factors: &[Factor]| -> Result<TruncatedSeries, SeriesError> {
        let mut acc: Option<TruncatedSeries> = None;
        for f in factors {
            let d = cache.entry(f).or_insert_with(|| phi.derivative(f)).clone();
            acc = Some(match acc {
                Some(a) => a.mul(&d)?,
                None => d,
            });
        }
        Ok(acc.expect("nonempty product"))
    };
    let mut brace = TruncatedSeries::zero(phi.sig().clone(), EXACT_ORDER, mode);
    for (sign, factors) in LEVI_DET_TERMS {
        brace = brace.add(&product(factors)?.scale(&Scalar::from_int(*sign, mode)))?;
    }
    for (unit, group) in [(Scalar::i(mode), LEVI_DET_PLUS_I), (-Scalar::i(mode), LEVI_DET_MINUS_I)] {
        for factors in group {
            brace = brace.add(&product(factors)?.scale(&unit))?;
        }
    }
    let phi_u = phi.partial_derivative(U);
    let i = Scalar::i(mode);
    let plus = phi_u.add_constant(&i);
    let minus = phi_u.neg().add_constant(&i);
    let denom = plus.mul(&minus)?.pow(3);
    let prefactor = denom.reciprocal()?.scale(&Scalar::from_int(4, mode));
    Ok(prefactor.mul(&brace)?)
}

/// `L`, `L̄`, `[L, L̄]`, `[L, [L, L̄]]`, `[L̄, [L, L̄]]` of an `n = 1` germ.
pub fn cubic_brackets(m: &DefiningEquations) -> Result<[TangentFrameField; 5], FrameError> {
    if m.n() != 1 {
        return Err(FrameError::Shape { expected: (1, m.c()), got: (m.n(), m.c()) });
    }
    let l = tangent_generators(m)?.remove(0);
    let lb = conjugate_field(&l);
    let b1 = lie_bracket(&l, &lb)?;
    let b2 = lie_bracket(&l, &b1)?;
    let b3 = lie_bracket(&lb, &b1)?;
    Ok([l, lb, b1, b2, b3])
}

/// Determinant of the `∂u` coefficients of `[L, L̄]`, `[L, [L, L̄]]`,
/// `[L̄, [L, L̄]]` for `n = 1, c = 3`.
pub fn class32_determinant(m: &DefiningEquations) -> Result<TruncatedSeries, FrameError> {
    require_shape(m, 1, 3)?;
    let [_, _, b1, b2, b3] = cubic_brackets(m)?;
    let rows: Vec<&[TruncatedSeries]> = [&b1, &b2, &b3].iter().map(|b| &b.coeffs()[2..5]).collect();
    Ok(det3(&rows)?)
}

/// Permanent of the entrywise absolute values of the determinant's matrix.
/// Bounds every coefficient of [`class32_determinant`] and sets the scale of
/// its rounding error.
pub fn class32_determinant_scale(m: &DefiningEquations) -> Result<TruncatedSeries, FrameError> {
    require_shape(m, 1, 3)?;
    let [_, _, b1, b2, b3] = cubic_brackets(m)?;
    let abs = |s: &TruncatedSeries| s.to_mode(Mode::float()).map_coeffs(|_, v| Scalar::float(v.abs(), 0.0));
    let r: Vec<Vec<TruncatedSeries>> = [&b1, &b2, &b3].iter().map(|b| b.coeffs()[2..5].iter().map(abs).collect()).collect();
    let minor = |a: &TruncatedSeries, b: &TruncatedSeries, c: &TruncatedSeries, d: &TruncatedSeries| a.mul(d)?.add(&b.mul(c)?);
    let t0 = r[0][0].mul(&minor(&r[1][1], &r[1][2], &r[2][1], &r[2][2])?)?;
    let t1 = r[0][1].mul(&minor(&r[1][0], &r[1][2], &r[2][0], &r[2][2])?)?;
    let t2 = r[0][2].mul(&minor(&r[1][0], &r[1][1], &r[2][0], &r[2][1])?)?;
    Ok(t0.add(&t1)?.add(&t2)?)
}

fn det3(r: &[&[TruncatedSeries]]) -> Result<TruncatedSeries, SeriesError> {
    let minor = |a: &TruncatedSeries, b: &TruncatedSeries, c: &TruncatedSeries, d: &TruncatedSeries| {
        a.mul(d)?.sub(&b.mul(c)?)
    };
    let t0 = r[0][0].mul(&minor(&r[1][1], &r[1][2], &r[2][1], &r[2][2])?)?;
    let t1 = r[0][1].mul(&minor(&r[1][0], &r[1][2], &r[2][0], &r[2][2])?)?;
    let t2 = r[0][2].mul(&minor(&r[1][0], &r[1][1], &r[2][0], &r[2][1])?)?;
    t0.sub(&t1)?.add(&t2)
}

/// Named fields whose origin ranks decide the class of an `(n, c)` germ.
pub fn standard_fields(m: &DefiningEquations) -> Result<Vec<(String, TangentFrameField)>, FrameError> {
    let named = |pairs: Vec<(&str, TangentFrameField)>| pairs.into_iter().map(|(s, f)| (s.to_string(), f)).collect();
    match (m.n(), m.c()) {
        (1, c) => {
            let [l, lb, b1, b2, b3] = cubic_brackets(m)?;
            let mut out = vec![("L", l.clone()), ("Lbar", lb), ("[L,Lbar]", b1)];
            if c >= 2 {
                out.push(("[L,[L,Lbar]]", b2.clone()));
                out.push(("[Lbar,[L,Lbar]]", b3));
            }
            if c == 3 {
                out.push(("[L,[L,[L,Lbar]]]", lie_bracket(&l, &b2)?));
            }
            Ok(named(out))
        }
        (2, 1) => {
            let [l1, l2, lb1, lb2] = generators_2_1(m)?;
            let b11 = lie_bracket(&l1, &lb1)?;
            let b12 = lie_bracket(&l1, &lb2)?;
            let b21 = lie_bracket(&l2, &lb1)?;
            let b22 = lie_bracket(&l2, &lb2)?;
            Ok(named(vec![
                ("L1", l1),
                ("L2", l2),
                ("L1bar", lb1),
                ("L2bar", lb2),
                ("[L1,L1bar]", b11),
                ("[L1,L2bar]", b12),
                ("[L2,L1bar]", b21),
                ("[L2,L2bar]", b22),
            ]))
        }
        (n, c) => Err(FrameError::Shape { expected: (1, c), got: (n, c) }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: Mode = Mode::Exact;

    fn g(re: i64, im: i64) -> Scalar {
        Scalar::gaussian(re, im, E)
    }

    fn series(n: usize, c: usize, order: i32, terms: &[(&[u32], Scalar)]) -> TruncatedSeries {
        TruncatedSeries::from_exponents(Signature::real(n, c), order, E, terms)
    }

    fn germ(n: usize, c: usize, order: i32, phis: &[&[(&[u32], Scalar)]]) -> DefiningEquations {
        DefiningEquations::new(n, c, phis.iter().map(|t| series(n, c, order, t)).collect()).unwrap()
    }

    fn model_ii(order: i32) -> DefiningEquations {
        germ(1, 2, order, &[&[(&[1, 1, 0, 0], g(1, 0))], &[(&[2, 1, 0, 0], g(1, 0)), (&[1, 2, 0, 0], g(1, 0))]])
    }

    fn model_iii1(order: i32) -> DefiningEquations {
        germ(
            1,
            3,
            order,
            &[
                &[(&[1, 1, 0, 0, 0], g(1, 0))],
                &[(&[2, 1, 0, 0, 0], g(1, 0)), (&[1, 2, 0, 0, 0], g(1, 0))],
                &[(&[2, 1, 0, 0, 0], g(0, 1)), (&[1, 2, 0, 0, 0], g(0, -1))],
            ],
        )
    }

    fn model_iii2(order: i32) -> DefiningEquations {
        germ(
            1,
            3,
            order,
            &[
                &[(&[1, 1, 0, 0, 0], g(1, 0))],
                &[(&[2, 1, 0, 0, 0], g(1, 0)), (&[1, 2, 0, 0, 0], g(1, 0))],
                &[(&[3, 1, 0, 0, 0], g(2, 0)), (&[1, 3, 0, 0, 0], g(2, 0)), (&[2, 2, 0, 0, 0], g(3, 0))],
            ],
        )
    }

    #[test]
    fn generator_of_the_sphere_quadric() {
        let m = germ(1, 1, 6, &[&[(&[1, 1, 0], g(1, 0))]]);
        let l = tangent_generators(&m).unwrap().remove(0);
        assert!(l.u_coeff(0).eq_to_shared_order(&series(1, 1, 5, &[(&[0, 1, 0], g(0, 1))])));
        assert_eq!(eval_at_origin(&l), vec![g(1, 0), g(0, 0), g(0, 0)]);
        let lb = conjugate_field(&l);
        assert!(lb.u_coeff(0).eq_to_shared_order(&series(1, 1, 5, &[(&[1, 0, 0], g(0, -1))])));
        let b = lie_bracket(&l, &lb).unwrap();
        assert_eq!(eval_at_origin(&b), vec![g(0, 0), g(0, 0), g(0, -2)]);
        assert_eq!(b.u_coeff(0).lowest_degree_within(b.order()), Some(0));
        assert_eq!(b.u_coeff(0).filter(|k| k.degree() > 0).lowest_degree_within(b.order()), None);
        assert_eq!(rank_at_origin(&[l, lb, b]), 3);
    }

    #[test]
    fn flat_germ_has_coordinate_generators() {
        let m = germ(2, 1, 5, &[&[]]);
        for (k, l) in tangent_generators(&m).unwrap().iter().enumerate() {
            assert_eq!(eval_at_origin(l), eval_at_origin(&TangentFrameField::coordinate(2, 1, k, E)));
            assert!(l.u_coeff(0).is_zero());
        }
        assert_eq!(rank_at_origin(&[]), 0);
    }

    #[test]
    fn model_ii_second_coefficient_and_double_bracket() {
        let m = model_ii(6);
        let l = tangent_generators(&m).unwrap().remove(0);
        let expected = series(1, 2, 5, &[(&[1, 1, 0, 0], g(0, 2)), (&[0, 2, 0, 0], g(0, 1))]);
        assert!(l.u_coeff(1).eq_to_shared_order(&expected));
        let [_, _, b1, b2, _] = cubic_brackets(&m).unwrap();
        assert_eq!(eval_at_origin(&b1), vec![g(0, 0), g(0, 0), g(0, -2), g(0, 0)]);
        assert_eq!(eval_at_origin(&b2), vec![g(0, 0), g(0, 0), g(0, 0), g(0, -4)]);
    }

    #[test]
    fn model_iii1_brackets_and_determinant() {
        let m = model_iii1(6);
        let fields = cubic_brackets(&m).unwrap();
        let z = g(0, 0);
        assert_eq!(eval_at_origin(&fields[3]), vec![z.clone(), z.clone(), z.clone(), g(0, -4), g(4, 0)]);
        assert_eq!(eval_at_origin(&fields[4]), vec![z.clone(), z.clone(), z.clone(), g(0, -4), g(-4, 0)]);
        assert_eq!(rank_at_origin(&fields), 5);
        assert_eq!(class32_determinant(&m).unwrap().constant_term(), g(64, 0));
    }

    #[test]
    fn model_iii2_ranks_and_vanishing_determinant() {
        let m = model_iii2(8);
        let fields = cubic_brackets(&m).unwrap();
        assert_eq!(rank_at_origin(&fields), 4);
        let triple = lie_bracket(&fields[0], &fields[3]).unwrap();
        assert_eq!(eval_at_origin(&triple)[4], g(0, -24));
        let mut five = fields[..4].to_vec();
        five.push(triple);
        assert_eq!(rank_at_origin(&five), 5);
        let det = class32_determinant(&m).unwrap();
        assert!(det.order() >= 2, "order {}", det.order());
        assert_eq!(det.lowest_degree_within(det.order()), None);
    }

    #[test]
    fn class32_determinant_of_single_equation_is_zero() {
        let m = germ(1, 3, 6, &[&[(&[1, 1, 0, 0, 0], g(1, 0)), (&[2, 2, 1, 0, 0], g(1, 0))], &[], &[]]);
        assert!(class32_determinant(&m).unwrap().is_zero());
    }

    #[test]
    fn bracket_properties_on_small_fields() {
        let m = germ(1, 2, 6, &[&[(&[1, 1, 0, 0], g(1, 0)), (&[2, 1, 1, 0], g(1, 1)), (&[1, 2, 1, 0], g(1, -1))], &[(&[1, 1, 0, 1], g(2, 0))]]);
        let [l, lb, b1, _, _] = cubic_brackets(&m).unwrap();
        let self_bracket = lie_bracket(&l, &l).unwrap();
        assert!(self_bracket.coeffs().iter().all(|s| s.lowest_degree_within(s.order()).is_none()));
        let lhs = conjugate_field(&lie_bracket(&l, &b1).unwrap());
        let rhs = lie_bracket(&lb, &conjugate_field(&b1)).unwrap();
        for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            assert!(a.eq_to_shared_order(b));
        }
    }

    #[test]
    fn levi_matrix_of_quadrics() {
        for sign in [1, -1] {
            let m = germ(2, 1, 5, &[&[(&[1, 0, 1, 0, 0], g(1, 0)), (&[0, 1, 0, 1, 0], g(sign, 0))]]);
            let levi = levi_matrix(&m).unwrap();
            assert_eq!(levi.origin, HermitianForm2::new(g(2, 0), g(0, 0), g(2 * sign, 0)));
            let det = levi_determinant(&m.phi()[0]).unwrap();
            // prefactor −4 at the origin; brace constant is ±1
            assert_eq!(det.constant_term(), g(-4 * sign, 0));
            let origin_det = levi.origin.det();
            assert_eq!(&origin_det * &Scalar::ratio(-1, 1, E), det.constant_term());
        }
        let flat = germ(2, 1, 5, &[&[]]);
        assert_eq!(levi_matrix(&flat).unwrap().origin.rank(0.0), 0);
    }

    #[test]
    fn levi_off_diagonal_reads_z2_zbar1_coefficient() {
        let m = germ(2, 1, 5, &[&[(&[1, 0, 1, 0, 0], g(1, 0)), (&[0, 1, 1, 0, 0], g(1, 2)), (&[1, 0, 0, 1, 0], g(1, -2))]]);
        let levi = levi_matrix(&m).unwrap();
        assert_eq!(levi.origin.beta, g(2, 4));
        assert_eq!(levi.origin.rank(0.0), 2);
    }

    #[test]
    fn k_function_and_freeman_value() {
        // v = z1 z̄1 + z1² z̄2 + z2 z̄1²
        let m = germ(2, 1, 6, &[&[(&[1, 0, 1, 0, 0], g(1, 0)), (&[2, 0, 0, 1, 0], g(1, 0)), (&[0, 1, 2, 0, 0], g(1, 0))]]);
        let k = k_function(&m).unwrap();
        assert_eq!(k.coeff_of(&[0, 0, 1, 0, 0]), g(-2, 0));
        assert_eq!(k.constant_term(), g(0, 0));
        assert_eq!(freeman_value(&m).unwrap(), g(-2, 0));
        assert_eq!(levi_matrix(&m).unwrap().origin.rank(0.0), 1);

        let degenerate = germ(2, 1, 6, &[&[(&[1, 0, 1, 0, 0], g(1, 0))]]);
        assert!(k_function(&degenerate).unwrap().is_zero());
        assert_eq!(freeman_value(&degenerate).unwrap(), g(0, 0));

        let slanted = germ(2, 1, 6, &[&[(&[1, 0, 1, 0, 0], g(1, 0)), (&[0, 1, 1, 0, 0], g(1, 0)), (&[1, 0, 0, 1, 0], g(1, 0))]]);
        assert_eq!(k_function(&slanted).unwrap().constant_term(), g(-1, 0));

        let no_pivot = germ(2, 1, 6, &[&[(&[0, 1, 0, 1, 0], g(1, 0))]]);
        assert_eq!(k_function(&no_pivot), Err(FrameError::DegenerateDenominator));
    }

    #[test]
    fn levi_determinant_vanishes_on_degenerate_quadric() {
        let m = germ(2, 1, 6, &[&[(&[1, 0, 1, 0, 0], g(1, 0)), (&[1, 0, 1, 0, 1], g(3, 0))]]);
        assert!(levi_determinant(&m.phi()[0]).unwrap().is_zero());
    }

    #[test]
    fn shape_errors() {
        let m = model_ii(4);
        assert!(matches!(levi_matrix(&m), Err(FrameError::Shape { .. })));
        assert!(matches!(class32_determinant(&m), Err(FrameError::Shape { .. })));
        let bad = series(1, 1, 4, &[]);
        assert!(matches!(levi_determinant(&bad), Err(FrameError::Shape { .. })));
    }
}
