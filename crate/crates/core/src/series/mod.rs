//! Truncated multivariate power series over a declared variable signature.
//!
//! A [`TruncatedSeries`] stores finitely many monomials together with a
//! reliable order `N`: every coefficient of total degree `≤ N` is exact (or
//! float-accurate), nothing of degree `> N` is stored, and no stored
//! coefficient is zero (exact) or of modulus `≤ ε` (float).
//!
//! Order bookkeeping:
//! - `add`: `min(N_a, N_b)`.
//! - `mul`: `min(N_a + v_b, N_b + v_a, max(N_a, N_b))` with `v` the
//!   effective valuation; the last bound caps growth.
//! - `partial_derivative`: `N − 1`.
//! - `compose`: bounded by `N_i + (d_i − 1)·v` per used image `i` (with `d_i`
//!   the lowest degree of a monomial containing `x_i`) and by `(N_a + 1)·v − 1`.
//! - `reciprocal`: `N`.
//!
//! The effective valuation of a series is `min(lowest stored degree, N + 1)`,
//! so a series known to vanish through order `N` multiplies like `O(N + 1)`.

mod compose;
mod dense;
mod index;
pub mod maps;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use compose::{Substitution, EXACT_ORDER};
pub use index::{MultiIndex, Signature, MAX_VARS};

use crate::scalar::{Mode, Scalar};

/// Failures of series operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("signature mismatch: {0:?} vs {1:?}")]
    SignatureMismatch(Vec<String>, Vec<String>),
    #[error("substituted series for variable {var} has a nonzero constant term")]
    NonzeroConstant { var: usize },
    #[error("series has a zero constant term and cannot be inverted")]
    ZeroConstant,
    #[error("signature does not pair every z with a barred partner")]
    Unpaired,
    #[error("expected {expected} substituted series, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

/// Sparse truncated power series.
#[derive(Clone, PartialEq)]
pub struct TruncatedSeries {
    sig: Arc<Signature>,
    mode: Mode,
    order: i32,
    terms: BTreeMap<MultiIndex, Scalar>,
}

pub(crate) fn check_sig(a: &Arc<Signature>, b: &Arc<Signature>) -> Result<(), SeriesError> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(SeriesError::SignatureMismatch(a.labels().to_vec(), b.labels().to_vec()))
    }
}

/// Truncated product of two term maps, keeping degrees `≤ max_deg`.
pub(crate) fn mul_terms(
    a: &BTreeMap<MultiIndex, Scalar>,
    b: &BTreeMap<MultiIndex, Scalar>,
    max_deg: i32,
) -> BTreeMap<MultiIndex, Scalar> {
    if b.len() == 1 {
        let (kb, cb) = b.iter().next().expect("one term");
        if cb.is_one() {
            let room = max_deg - kb.degree() as i32;
            return a.iter().take_while(|(k, _)| k.degree() as i32 <= room).map(|(k, v)| (k.mul(kb), v.clone())).collect();
        }
    }
    let mut out: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
    for (ka, ca) in a {
        let room = max_deg - ka.degree() as i32;
        if room < 0 {
            break;
        }
        for (kb, cb) in b {
            if kb.degree() as i32 > room {
                break;
            }
            let p = ca * cb;
            match out.entry(ka.mul(kb)) {
                std::collections::btree_map::Entry::Occupied(mut e) => e.get_mut().add_assign_ref(&p),
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(p);
                }
            }
        }
    }
    out
}

impl TruncatedSeries {
    /// The zero series known through `order`.
    pub fn zero(sig: Arc<Signature>, order: i32, mode: Mode) -> TruncatedSeries {
        TruncatedSeries { sig, mode, order, terms: BTreeMap::new() }
    }

    pub fn constant(sig: Arc<Signature>, order: i32, value: Scalar) -> TruncatedSeries {
        let mode = if value.is_exact() { Mode::Exact } else { Mode::float() };
        TruncatedSeries::from_terms(sig, order, mode, [(MultiIndex::ZERO, value)])
    }

    /// The coordinate function of variable `var`.
    pub fn var(sig: Arc<Signature>, var: usize, order: i32, mode: Mode) -> TruncatedSeries {
        assert!(var < sig.nvars(), "variable index out of range");
        TruncatedSeries::from_terms(sig, order, mode, [(MultiIndex::unit(var, 1), Scalar::one(mode))])
    }

    /// Builds a series from terms; repeated monomials accumulate, and terms
    /// above `order` are dropped.
    pub fn from_terms(
        sig: Arc<Signature>,
        order: i32,
        mode: Mode,
        terms: impl IntoIterator<Item = (MultiIndex, Scalar)>,
    ) -> TruncatedSeries {
        let mut map: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
        for (k, v) in terms {
            if k.degree() as i32 > order {
                continue;
            }
            let v = v.to_mode(mode);
            match map.entry(k) {
                std::collections::btree_map::Entry::Occupied(mut e) => e.get_mut().add_assign_ref(&v),
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(v);
                }
            }
        }
        TruncatedSeries::from_map(sig, order, mode, map)
    }

    pub(crate) fn from_map(
        sig: Arc<Signature>,
        order: i32,
        mode: Mode,
        mut terms: BTreeMap<MultiIndex, Scalar>,
    ) -> TruncatedSeries {
        let tol = mode.tol();
        terms.retain(|k, v| k.degree() as i32 <= order && !v.is_zero_tol(tol));
        if !mode.is_exact() {
            for v in terms.values_mut() {
                if v.is_exact() {
                    *v = v.to_mode(mode);
                }
            }
        }
        TruncatedSeries { sig, mode, order, terms }
    }

    /// Builds a series from `(exponents, coefficient)` pairs.
    pub fn from_exponents(
        sig: Arc<Signature>,
        order: i32,
        mode: Mode,
        terms: &[(&[u32], Scalar)],
    ) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            sig,
            order,
            mode,
            terms.iter().map(|(e, v)| (MultiIndex::new(e), v.clone())),
        )
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn tol(&self) -> f64 {
        self.mode.tol()
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// No stored monomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.terms.iter()
    }

    pub(crate) fn term_map(&self) -> &BTreeMap<MultiIndex, Scalar> {
        &self.terms
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Scalar {
        self.terms.get(idx).cloned().unwrap_or_else(|| Scalar::zero(self.mode))
    }

    /// Coefficient of the monomial with the given exponent vector.
    pub fn coeff_of(&self, exps: &[u32]) -> Scalar {
        self.coeff(&MultiIndex::new(exps))
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&MultiIndex::ZERO)
    }

    /// Lowest stored total degree; `None` for the zero series (the `+∞`
    /// sentinel).
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().next().map(|k| k.degree())
    }

    /// `min(valuation, order + 1)`.
    pub fn effective_valuation(&self) -> i32 {
        match self.valuation() {
            Some(v) => (v as i32).min(self.order + 1),
            None => self.order + 1,
        }
    }

    /// Minimum weighted degree over stored monomials; `None` is `+∞`.
    pub fn weighted_order(&self, weights: &[u32]) -> Option<u32> {
        assert_eq!(weights.len(), self.sig.nvars(), "one weight per variable");
        assert!(weights.iter().all(|&w| w >= 1), "weights must be positive");
        self.terms.keys().map(|k| k.weighted_degree(weights)).min()
    }

    /// Drops monomials of weighted degree above `max`; the reliable order is
    /// unchanged, so the result is only meaningful for weighted reasoning.
    pub fn truncate_weighted(&self, weights: &[u32], max: u32) -> TruncatedSeries {
        let mut out = self.clone();
        out.terms.retain(|k, _| k.weighted_degree(weights) <= max);
        out
    }

    /// Lowers the reliable order to `order` (no-op if already lower).
    pub fn truncate(&self, order: i32) -> TruncatedSeries {
        if order >= self.order {
            return self.clone();
        }
        let mut out = self.clone();
        out.order = order;
        out.terms.retain(|k, _| k.degree() as i32 <= order);
        out
    }

    /// Asserts a larger reliable order; valid only when the stored terms are
    /// known to be the complete series (e.g. a polynomial).
    pub fn with_order_unchecked(&self, order: i32) -> TruncatedSeries {
        let mut out = self.truncate(order);
        out.order = order;
        out
    }

    /// Part of total degree exactly `d`.
    pub fn homogeneous(&self, d: u32) -> TruncatedSeries {
        let mut out = self.clone();
        out.terms.retain(|k, _| k.degree() == d);
        out
    }

    /// Converts every coefficient into `mode`.
    pub fn to_mode(&self, mode: Mode) -> TruncatedSeries {
        let mode = if self.mode.is_exact() { mode } else { self.mode.join(mode) };
        TruncatedSeries::from_map(self.sig.clone(), self.order, mode, self.terms.clone())
    }

    /// Same coefficients under a same-shaped signature.
    pub fn relabel(&self, sig: Arc<Signature>) -> TruncatedSeries {
        assert!(self.sig.same_shape(&sig), "relabel requires identical shape");
        TruncatedSeries { sig, ..self.clone() }
    }

    /// Re-indexes into `sig` through the variable map `old var i ↦ new var map[i]`.
    pub fn remap(&self, sig: Arc<Signature>, map: &[usize]) -> TruncatedSeries {
        assert_eq!(map.len(), self.sig.nvars());
        assert!(map.iter().all(|&j| j < sig.nvars()));
        let terms = self.terms.iter().map(|(k, v)| (k.remap(map), v.clone()));
        TruncatedSeries::from_terms(sig, self.order, self.mode, terms)
    }

    fn sweep(mut self) -> TruncatedSeries {
        let tol = self.mode.tol();
        let order = self.order;
        self.terms.retain(|k, v| k.degree() as i32 <= order && !v.is_zero_tol(tol));
        self
    }

    fn zip(
        &self,
        other: &TruncatedSeries,
        f: impl Fn(&mut Scalar, &Scalar),
        fresh: impl Fn(&Scalar) -> Scalar,
    ) -> Result<TruncatedSeries, SeriesError> {
        check_sig(&self.sig, &other.sig)?;
        let mode = self.mode.join(other.mode);
        let order = self.order.min(other.order);
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            match terms.entry(*k) {
                std::collections::btree_map::Entry::Occupied(mut e) => f(e.get_mut(), v),
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(fresh(v));
                }
            }
        }
        Ok(TruncatedSeries::from_map(self.sig.clone(), order, mode, terms))
    }

    /// Coefficientwise sum; order is the smaller of the two.
    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        self.zip(other, |a, b| a.add_assign_ref(b), |b| b.clone())
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        self.zip(other, |a, b| *a = &*a - b, |b| -b)
    }

    pub fn neg(&self) -> TruncatedSeries {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = -&*v;
        }
        out
    }

    /// Multiplies every coefficient by `s`.
    pub fn scale(&self, s: &Scalar) -> TruncatedSeries {
        let mode = if s.is_exact() { self.mode } else { self.mode.join(Mode::float()) };
        let terms = self.terms.iter().map(|(k, v)| (*k, v * s)).collect();
        TruncatedSeries::from_map(self.sig.clone(), self.order, mode, terms)
    }

    /// Adds the constant `s`.
    pub fn add_constant(&self, s: &Scalar) -> TruncatedSeries {
        let mut terms = self.terms.clone();
        terms.entry(MultiIndex::ZERO).or_insert_with(|| Scalar::zero(self.mode)).add_assign_ref(s);
        let mode = if s.is_exact() { self.mode } else { self.mode.join(Mode::float()) };
        TruncatedSeries::from_map(self.sig.clone(), self.order, mode, terms)
    }

    /// Truncated product.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        check_sig(&self.sig, &other.sig)?;
        let order = (self.order + other.effective_valuation())
            .min(other.order + self.effective_valuation())
            .min(self.order.max(other.order));
        let mode = self.mode.join(other.mode);
        let terms = if !mode.is_exact() && order >= 0 && self.terms.len() * other.terms.len() > dense::DENSE_THRESHOLD {
            let l = dense::Layout::get(self.sig.nvars(), order as u32);
            let deg = order as u32;
            l.to_terms(&l.mul(&l.to_dense(&self.terms, deg), &l.to_dense(&other.terms, deg), deg))
        } else {
            mul_terms(&self.terms, &other.terms, order)
        };
        Ok(TruncatedSeries::from_map(self.sig.clone(), order, mode, terms))
    }

    /// `self^k` by repeated squaring; `self^0` is the constant 1 at `self`'s order.
    pub fn pow(&self, k: u32) -> TruncatedSeries {
        let mut acc = TruncatedSeries::constant(self.sig.clone(), self.order, Scalar::one(self.mode))
            .to_mode(self.mode);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same signature");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same signature");
            }
        }
        acc
    }

    /// Formal partial derivative in `var`; order drops by one.
    pub fn partial_derivative(&self, var: usize) -> TruncatedSeries {
        assert!(var < self.sig.nvars(), "variable index out of range");
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            let e = k.get(var);
            if let Some(lower) = k.lower(var) {
                terms.insert(lower, v * &Scalar::from_int(e as i64, self.mode));
            }
        }
        TruncatedSeries::from_map(self.sig.clone(), self.order - 1, self.mode, terms)
    }

    /// Iterated partial derivative along `vars`.
    pub fn derivative(&self, vars: &[usize]) -> TruncatedSeries {
        vars.iter().fold(self.clone(), |acc, &v| acc.partial_derivative(v))
    }

    /// The series `b` with `self·b = 1` through `self.order`.
    pub fn reciprocal(&self) -> Result<TruncatedSeries, SeriesError> {
        let c0 = self.constant_term();
        if c0.is_zero_tol(self.tol()) {
            return Err(SeriesError::ZeroConstant);
        }
        let inv0 = c0.inv();
        // self = c0·(1 − t) with t = O(1); 1/self = inv0·Σ t^k.
        let t = self.scale(&inv0).neg().add_constant(&Scalar::one(self.mode));
        let one = TruncatedSeries::constant(self.sig.clone(), self.order, Scalar::one(self.mode))
            .to_mode(self.mode.join(inv0_mode(&inv0)));
        let mut acc = one.clone();
        for _ in 0..self.order.max(0) {
            acc = one.add(&t.mul(&acc)?)?;
        }
        let mut out = acc.scale(&inv0);
        out.order = self.order;
        Ok(out.sweep())
    }

    /// `self / other` through `min` of the orders.
    pub fn div(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        self.mul(&other.reciprocal()?)
    }

    /// Conjugates coefficients only.
    pub fn conjugate_coeffs(&self) -> TruncatedSeries {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.conj();
        }
        out
    }

    /// Overall conjugation: conjugated coefficients with each `z_k` exponent
    /// exchanged with its barred partner; transverse exponents fixed.
    pub fn swap_bar(&self) -> Result<TruncatedSeries, SeriesError> {
        if !self.sig.is_paired() {
            return Err(SeriesError::Unpaired);
        }
        let n = self.sig.n();
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (k.swap_pairs((0..n).map(|j| (j, n + j))), v.conj()))
            .collect();
        Ok(TruncatedSeries { terms, ..self.clone() })
    }

    /// Lowest degree `≤ bound` carrying a nonzero coefficient of `self − other`.
    pub fn first_difference(&self, other: &TruncatedSeries, bound: i32) -> Option<u32> {
        let tol = self.tol().max(other.tol());
        let keys = self.terms.keys().chain(other.terms.keys()).filter(|k| k.degree() as i32 <= bound);
        keys.filter(|k| !(&self.coeff(k) - &other.coeff(k)).is_zero_tol(tol))
            .map(|k| k.degree())
            .min()
    }

    /// Coefficients of degree `≤ min(N₁, N₂)` agree.
    pub fn eq_to_shared_order(&self, other: &TruncatedSeries) -> bool {
        self.first_difference(other, self.order.min(other.order)).is_none()
    }

    /// Like [`eq_to_shared_order`](Self::eq_to_shared_order) with an explicit tolerance.
    pub fn approx_eq(&self, other: &TruncatedSeries, tol: f64, bound: i32) -> bool {
        let keys = self.terms.keys().chain(other.terms.keys()).filter(|k| k.degree() as i32 <= bound);
        keys.into_iter().all(|k| (&self.coeff(k) - &other.coeff(k)).is_zero_tol(tol))
    }

    /// Lowest degree `≤ bound` with a stored (nonzero) coefficient.
    pub fn lowest_degree_within(&self, bound: i32) -> Option<u32> {
        self.terms.keys().map(|k| k.degree()).find(|&d| d as i32 <= bound)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::abs).fold(0.0, f64::max)
    }

    /// Applies `f` to every coefficient and re-sweeps.
    pub fn map_coeffs(&self, f: impl Fn(&MultiIndex, &Scalar) -> Scalar) -> TruncatedSeries {
        let terms = self.terms.iter().map(|(k, v)| (*k, f(k, v))).collect();
        TruncatedSeries::from_map(self.sig.clone(), self.order, self.mode, terms)
    }

    /// Keeps only monomials satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&MultiIndex) -> bool) -> TruncatedSeries {
        let mut out = self.clone();
        out.terms.retain(|k, _| keep(k));
        out
    }

    /// Substitutes the listed variables; unlisted variables map to themselves.
    pub fn compose(&self, assignments: &[(usize, TruncatedSeries)]) -> Result<TruncatedSeries, SeriesError> {
        let target = match assignments.first() {
            Some((_, s)) => s.sig.clone(),
            None => return Ok(self.clone()),
        };
        check_sig(&self.sig, &target)?;
        let mode = assignments.iter().fold(self.mode, |m, (_, s)| m.join(s.mode));
        let mut images: Vec<Option<TruncatedSeries>> = vec![None; self.sig.nvars()];
        for (var, s) in assignments {
            images[*var] = Some(s.clone());
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.unwrap_or_else(|| TruncatedSeries::identity_var(target.clone(), i, mode)))
            .collect();
        Substitution::new(target, images)?.apply(self)
    }

    /// Coordinate function with an unbounded reliable order.
    pub(crate) fn identity_var(sig: Arc<Signature>, var: usize, mode: Mode) -> TruncatedSeries {
        TruncatedSeries::var(sig, var, compose::EXACT_ORDER, mode)
    }
}

fn inv0_mode(s: &Scalar) -> Mode {
    if s.is_exact() {
        Mode::Exact
    } else {
        Mode::float()
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({})", self, self.order + 1)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let labels = self.sig.labels();
        let mut first = true;
        for (k, v) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{v}")?;
            for (i, label) in labels.iter().enumerate() {
                match k.get(i) {
                    0 => {}
                    1 => write!(f, "*{label}")?,
                    e => write!(f, "*{label}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig1() -> Arc<Signature> {
        Signature::real(1, 1)
    }

    fn s(terms: &[(&[u32], Scalar)]) -> TruncatedSeries {
        TruncatedSeries::from_exponents(sig1(), 6, Mode::Exact, terms)
    }

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d, Mode::Exact)
    }

    fn g(re: i64, im: i64) -> Scalar {
        Scalar::gaussian(re, im, Mode::Exact)
    }

    #[test]
    fn add_identity_and_cancellation() {
        let zzb = s(&[(&[1, 1, 0], g(1, 0))]);
        let zero = TruncatedSeries::zero(sig1(), 6, Mode::Exact);
        assert_eq!(zzb.add(&zero).unwrap(), zzb);
        let neg = zzb.neg().truncate(4);
        let sum = zzb.add(&neg).unwrap();
        assert!(sum.is_zero());
        assert_eq!(sum.order(), 4);
    }

    #[test]
    fn add_builds_second_model_quadric() {
        let a = s(&[(&[2, 1, 0], g(1, 0))]);
        let b = s(&[(&[1, 2, 0], g(1, 0))]);
        let sum = a.add(&b).unwrap();
        assert_eq!(sum, s(&[(&[2, 1, 0], g(1, 0)), (&[1, 2, 0], g(1, 0))]));
    }

    #[test]
    fn mul_examples() {
        let zzb = s(&[(&[1, 1, 0], g(1, 0))]);
        let sq = zzb.mul(&zzb).unwrap();
        assert_eq!(sq.terms().count(), 1);
        assert_eq!(sq.coeff_of(&[2, 2, 0]), g(1, 0));
        let p = s(&[(&[1, 0, 0], g(1, 0)), (&[0, 1, 0], g(1, 0))]);
        let m = s(&[(&[1, 0, 0], g(1, 0)), (&[0, 1, 0], g(-1, 0))]);
        let prod = p.mul(&m).unwrap();
        assert_eq!(prod, s(&[(&[2, 0, 0], g(1, 0)), (&[0, 2, 0], g(-1, 0))]));
    }

    #[test]
    fn mul_order_rule() {
        let a = s(&[(&[1, 1, 0], g(1, 0))]).truncate(5);
        let b = s(&[(&[0, 0, 1], g(1, 0))]).truncate(3);
        // min(5 + 1, 3 + 2, 5)
        assert_eq!(a.mul(&b).unwrap().order(), 5);
        let c = s(&[(&[1, 1, 0], g(1, 0))]).truncate(2);
        // min(2 + 2, 2 + 2, 2)
        assert_eq!(c.mul(&c).unwrap().order(), 2);
    }

    #[test]
    fn mul_rejects_signature_mismatch() {
        let a = s(&[(&[1, 1, 0], g(1, 0))]);
        let b = TruncatedSeries::zero(Signature::real(1, 2), 6, Mode::Exact);
        assert!(matches!(a.mul(&b), Err(SeriesError::SignatureMismatch(..))));
    }

    #[test]
    fn derivative_examples() {
        let zzb = s(&[(&[1, 1, 0], g(1, 0))]);
        let d = zzb.partial_derivative(0);
        assert_eq!(d.coeff_of(&[0, 1, 0]), g(1, 0));
        assert_eq!(d.order(), 5);
        let c = s(&[(&[0, 0, 0], g(3, 0))]);
        assert!(c.partial_derivative(2).is_zero());
    }

    #[test]
    fn reciprocal_examples() {
        let one = s(&[(&[0, 0, 0], g(1, 0))]);
        assert_eq!(one.reciprocal().unwrap(), one);
        let i = s(&[(&[0, 0, 0], g(0, 1))]);
        assert_eq!(i.reciprocal().unwrap(), s(&[(&[0, 0, 0], g(0, -1))]));
        let zero = s(&[(&[1, 0, 0], g(1, 0))]);
        assert_eq!(zero.reciprocal(), Err(SeriesError::ZeroConstant));
    }

    #[test]
    fn reciprocal_of_geometric_denominator() {
        let sig = Signature::real(2, 1);
        let den = TruncatedSeries::from_exponents(
            sig.clone(),
            8,
            Mode::Exact,
            &[(&[0, 0, 0, 0, 0], g(1, 0)), (&[0, 1, 0, 1, 0], g(-1, 0))],
        );
        let r = den.reciprocal().unwrap();
        for k in 0..=4u32 {
            assert_eq!(r.coeff_of(&[0, k, 0, k, 0]), g(1, 0));
        }
        assert_eq!(r.len(), 5);
    }

    #[test]
    fn conjugations() {
        let iz = s(&[(&[1, 0, 0], g(0, 1))]);
        assert_eq!(iz.conjugate_coeffs(), s(&[(&[1, 0, 0], g(0, -1))]));
        let z = s(&[(&[1, 0, 0], g(1, 0))]);
        assert_eq!(z.swap_bar().unwrap(), s(&[(&[0, 1, 0], g(1, 0))]));
        let t = s(&[(&[2, 1, 0], g(0, 1))]);
        assert_eq!(t.swap_bar().unwrap(), s(&[(&[1, 2, 0], g(0, -1))]));
        let a = g(2, 3);
        let pair = s(&[(&[2, 1, 0], a.clone()), (&[1, 2, 0], a.conj())]);
        assert_eq!(
            pair.conjugate_coeffs(),
            s(&[(&[2, 1, 0], a.conj()), (&[1, 2, 0], a.clone())])
        );
        assert_eq!(pair.swap_bar().unwrap(), pair);
        let unpaired = TruncatedSeries::zero(Signature::holomorphic(1, 1), 4, Mode::Exact);
        assert_eq!(unpaired.swap_bar(), Err(SeriesError::Unpaired));
    }

    #[test]
    fn weighted_order_examples() {
        let sig = Signature::real(1, 2);
        let w = [1, 1, 2, 3];
        let t = TruncatedSeries::from_exponents(sig.clone(), 6, Mode::Exact, &[(&[1, 1, 0, 1], g(1, 0))]);
        assert_eq!(t.weighted_order(&w), Some(5));
        assert_eq!(TruncatedSeries::zero(sig.clone(), 6, Mode::Exact).weighted_order(&w), None);
        let t = TruncatedSeries::from_exponents(
            sig,
            6,
            Mode::Exact,
            &[(&[3, 0, 0, 0], g(1, 0)), (&[0, 0, 1, 0], g(1, 0))],
        );
        assert_eq!(t.weighted_order(&w), Some(2));
    }

    #[test]
    fn compose_examples() {
        let zzb = s(&[(&[1, 1, 0], g(1, 0))]);
        let two_z = s(&[(&[1, 0, 0], g(2, 0))]);
        let two_zb = s(&[(&[0, 1, 0], g(2, 0))]);
        let out = zzb.compose(&[(0, two_z), (1, two_zb)]).unwrap();
        assert_eq!(out, s(&[(&[1, 1, 0], g(4, 0))]));

        let zz = s(&[(&[1, 0, 0], g(1, 0)), (&[2, 0, 0], g(1, 0))]);
        let bb = s(&[(&[0, 1, 0], g(1, 0)), (&[0, 2, 0], g(1, 0))]);
        let out = zzb.compose(&[(0, zz), (1, bb)]).unwrap();
        let expect = s(&[
            (&[1, 1, 0], g(1, 0)),
            (&[2, 1, 0], g(1, 0)),
            (&[1, 2, 0], g(1, 0)),
            (&[2, 2, 0], g(1, 0)),
        ]);
        assert_eq!(out, expect);
    }

    #[test]
    fn compose_dilation_law() {
        // λ = 1/2 + i/2: λ²λ̄ = (1 + i)/4, so z²z̄ picks up λ²λ̄ and zz̄² picks up λλ̄².
        let lam = &q(1, 2) + &(&g(0, 1) * &q(1, 2));
        let quad = s(&[(&[2, 1, 0], g(1, 0)), (&[1, 2, 0], g(1, 0))]);
        let zl = s(&[(&[1, 0, 0], lam.clone())]);
        let zbl = s(&[(&[0, 1, 0], lam.conj())]);
        let out = quad.compose(&[(0, zl), (1, zbl)]).unwrap();
        let l2lb = &(&lam * &lam) * &lam.conj();
        let llb2 = &(&lam * &lam.conj()) * &lam.conj();
        assert_eq!(out.coeff_of(&[2, 1, 0]), l2lb);
        assert_eq!(out.coeff_of(&[1, 2, 0]), llb2);
    }

    #[test]
    fn compose_rejects_constant_term() {
        let zzb = s(&[(&[1, 1, 0], g(1, 0))]);
        let bad = s(&[(&[0, 0, 0], g(1, 0)), (&[1, 0, 0], g(1, 0))]);
        assert_eq!(zzb.compose(&[(0, bad)]), Err(SeriesError::NonzeroConstant { var: 0 }));
    }

    #[test]
    fn float_sweep_drops_small_coefficients() {
        let m = Mode::Float { tol: 1e-9 };
        let t = TruncatedSeries::from_exponents(
            sig1(),
            4,
            m,
            &[(&[1, 1, 0], Scalar::float(1e-12, 0.0)), (&[2, 0, 0], Scalar::float(1.0, 0.0))],
        );
        assert_eq!(t.len(), 1);
    }
}
