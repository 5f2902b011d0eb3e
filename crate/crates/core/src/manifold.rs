//! Graphing data of generic CR germs and the transformations acting on it.
//!
//! A germ `M ⊂ ℂ^{n+c}` is `v_j = φ_j(z, z̄, u)` with `w = u + i·v`. Its
//! complexification is solved as `w = Θ(z, z̲, w̲)`; the conjugate solve is
//! `Θ̄`, obtained by [`TruncatedSeries::swap_bar`] with `w̲` standing in as the
//! partner of `w`.

use std::sync::Arc;

use crate::linalg::Matrix;
use crate::scalar::{Mode, Scalar};
use crate::series::maps::{apply_matrix, invert_map, linear_part, MapError};
use crate::series::{MultiIndex, SeriesError, Signature, Substitution, TruncatedSeries};

/// Failures when building or transforming defining equations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ManifoldError {
    #[error("dimensions n = {n}, c = {c} violate 2n + c <= 5 with n, c >= 1")]
    Dimension { n: usize, c: usize },
    #[error("expected {expected} graphing series, got {got}")]
    Count { expected: usize, got: usize },
    #[error("graphing series {j} is not over the (z, zbar, u) alphabet")]
    Alphabet { j: usize },
    #[error("graphing series {j} has a nonzero constant term")]
    ConstantTerm { j: usize },
    #[error("graphing series {j} is not real: coefficient at {exponents:?} is not the conjugate of its barred partner")]
    Reality { j: usize, exponents: Vec<u32> },
    #[error("graphing series {j} has a nonzero linear part")]
    NotAffineNormalized { j: usize },
    #[error("biholomorphism has a singular linear part")]
    NotInvertible,
    #[error("image is not graphed over (z', u'): the new transverse Jacobian is singular")]
    GraphingDegeneracy,
    #[error("biholomorphism is for (n, c) = {got:?}, manifold has {expected:?}")]
    Shape { expected: (usize, usize), got: (usize, usize) },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl From<MapError> for ManifoldError {
    fn from(e: MapError) -> Self {
        match e {
            MapError::Series(s) => ManifoldError::Series(s),
            _ => ManifoldError::NotInvertible,
        }
    }
}

/// `v_j = φ_j(z, z̄, u)`, `j = 1..c`.
///
/// Constructed values satisfy `2n + c ≤ 5`, zero constant terms and the
/// reality symmetry `coeff(α, β, γ) = conj(coeff(β, α, γ))`.
#[derive(Clone, Debug, PartialEq)]
pub struct DefiningEquations {
    n: usize,
    c: usize,
    phi: Vec<TruncatedSeries>,
}

fn check_dims(n: usize, c: usize) -> Result<(), ManifoldError> {
    if n == 0 || c == 0 || 2 * n + c > 5 {
        return Err(ManifoldError::Dimension { n, c });
    }
    Ok(())
}

/// First monomial where `s` and its overall conjugate differ.
fn reality_defect(s: &TruncatedSeries) -> Option<MultiIndex> {
    let bar = s.swap_bar().ok()?;
    let tol = s.tol();
    let found = s
        .terms()
        .chain(bar.terms())
        .map(|(k, _)| *k)
        .find(|k| !(&s.coeff(k) - &bar.coeff(k)).is_zero_tol(tol));
    found
}

impl DefiningEquations {
    /// Validated constructor.
    pub fn new(n: usize, c: usize, phi: Vec<TruncatedSeries>) -> Result<DefiningEquations, ManifoldError> {
        let m = DefiningEquations::from_raw(n, c, phi)?;
        for (j, s) in m.phi.iter().enumerate() {
            if let Some(k) = reality_defect(s) {
                return Err(ManifoldError::Reality { j, exponents: k.exponents(s.sig().nvars()) });
            }
        }
        Ok(m)
    }

    /// Checks dimensions, alphabet and constant terms but not reality.
    pub fn from_raw(n: usize, c: usize, phi: Vec<TruncatedSeries>) -> Result<DefiningEquations, ManifoldError> {
        check_dims(n, c)?;
        if phi.len() != c {
            return Err(ManifoldError::Count { expected: c, got: phi.len() });
        }
        let sig = Signature::real(n, c);
        for (j, s) in phi.iter().enumerate() {
            if !s.sig().same_shape(&sig) {
                return Err(ManifoldError::Alphabet { j });
            }
            if !s.constant_term().is_zero_tol(s.tol()) {
                return Err(ManifoldError::ConstantTerm { j });
            }
        }
        let mode = phi.iter().fold(Mode::Exact, |m, s| m.join(s.mode()));
        let phi = phi.into_iter().map(|s| s.relabel(sig.clone()).to_mode(mode)).collect();
        Ok(DefiningEquations { n, c, phi })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn phi(&self) -> &[TruncatedSeries] {
        &self.phi
    }

    pub fn sig(&self) -> &Arc<Signature> {
        self.phi[0].sig()
    }

    /// Minimum reliable order over the graphing series.
    pub fn order(&self) -> i32 {
        self.phi.iter().map(TruncatedSeries::order).min().unwrap_or(0)
    }

    pub fn mode(&self) -> Mode {
        self.phi[0].mode()
    }

    pub fn to_mode(&self, mode: Mode) -> DefiningEquations {
        DefiningEquations { phi: self.phi.iter().map(|s| s.to_mode(mode)).collect(), ..self.clone() }
    }

    pub fn truncate(&self, order: i32) -> DefiningEquations {
        DefiningEquations { phi: self.phi.iter().map(|s| s.truncate(order)).collect(), ..self.clone() }
    }

    /// No linear terms: `T_0 M = {v = 0}`.
    pub fn is_affine_normalized(&self) -> bool {
        self.phi.iter().all(|s| s.terms().all(|(k, _)| k.degree() >= 2))
    }

    /// Every monomial has positive degree in `z` and in `z̄`.
    pub fn is_pluriharmonic_free(&self) -> bool {
        let n = self.n;
        self.phi.iter().all(|s| s.terms().all(|(k, _)| is_mixed(k, n)))
    }
}

/// Positive degree in both the `z` and the `z̄` block.
pub fn is_mixed(k: &MultiIndex, n: usize) -> bool {
    k.degree_in(0..n) > 0 && k.degree_in(n..2 * n) > 0
}

/// Reality symmetry of every graphing series.
pub fn check_reality(m: &DefiningEquations) -> bool {
    m.phi.iter().all(|s| reality_defect(s).is_none())
}

/// `φ(z, z̲, ν)`: same coefficients over the complexified alphabet.
pub fn complexify(m: &DefiningEquations) -> Result<Vec<TruncatedSeries>, ManifoldError> {
    if let Some((j, k)) = m.phi.iter().enumerate().find_map(|(j, s)| reality_defect(s).map(|k| (j, k))) {
        return Err(ManifoldError::Reality { j, exponents: k.exponents(m.sig().nvars()) });
    }
    let sig = Signature::complexified(m.n, m.c);
    Ok(m.phi.iter().map(|s| s.relabel(sig.clone())).collect())
}

/// Restriction of complexified series to the antiholomorphic diagonal
/// `z̲ = z̄`, `ν = u`.
pub fn restrict_to_diagonal(series: &[TruncatedSeries], n: usize, c: usize) -> Vec<TruncatedSeries> {
    let sig = Signature::real(n, c);
    series.iter().map(|s| s.relabel(sig.clone())).collect()
}

/// Solved complexification `w_j = Θ_j(z, z̲, w̲)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexGraph {
    n: usize,
    c: usize,
    theta: Vec<TruncatedSeries>,
}

impl ComplexGraph {
    /// Wraps series over the `(z, z̲, w̲)` alphabet.
    pub fn new(n: usize, c: usize, theta: Vec<TruncatedSeries>) -> ComplexGraph {
        let sig = Signature::theta(n, c);
        let theta = theta.into_iter().map(|s| s.relabel(sig.clone())).collect();
        ComplexGraph { n, c, theta }
    }

    pub fn theta(&self) -> &[TruncatedSeries] {
        &self.theta
    }

    pub fn order(&self) -> i32 {
        self.theta.iter().map(TruncatedSeries::order).min().unwrap_or(0)
    }

    /// `Θ̄(z̲, z, w)` over the `(z, z̲, w)` alphabet.
    pub fn conjugate(&self) -> Vec<TruncatedSeries> {
        let sig = Signature::theta_bar(self.n, self.c);
        self.theta
            .iter()
            .map(|s| s.swap_bar().expect("paired alphabet").relabel(sig.clone()))
            .collect()
    }
}

/// Fixed-point solve of `w = rhs(w)` where the `k`-th pass is exact through
/// degree `k + 1`. `start` supplies the transverse slot variables.
fn fixed_point(
    phi: &[TruncatedSeries],
    sig: &Arc<Signature>,
    n: usize,
    c: usize,
    order: i32,
    sign: i64,
) -> Result<Vec<TruncatedSeries>, ManifoldError> {
    let mode = phi.iter().fold(Mode::Exact, |m, s| m.join(s.mode()));
    let slot = |l: usize| TruncatedSeries::var(sig.clone(), sig.u(l), order, mode);
    let phi: Vec<TruncatedSeries> = phi.iter().map(|s| s.relabel(sig.clone())).collect();
    let half = Scalar::ratio(1, 2, mode);
    let two_i = Scalar::gaussian(0, 2 * sign, mode);
    let mut w: Vec<TruncatedSeries> = (0..c).map(slot).collect();
    for pass in 1..order {
        let cap = (pass + 1).min(order);
        let mut images: Vec<TruncatedSeries> =
            (0..2 * n).map(|i| TruncatedSeries::var(sig.clone(), i, order, mode)).collect();
        for (l, wl) in w.iter().enumerate() {
            images.push(wl.add(&slot(l))?.scale(&half));
        }
        let sub = Substitution::new(sig.clone(), images)?;
        let pushed = sub.apply_all(&phi, Some(cap))?;
        w = pushed
            .iter()
            .enumerate()
            .map(|(l, p)| slot(l).truncate(cap).add(&p.scale(&two_i)))
            .collect::<Result<_, _>>()?;
    }
    Ok(w)
}

/// Solves `(w − w̲)/(2i) = φ(z, z̲, (w + w̲)/2)` for `w` by fixed-point
/// iteration from `w = w̲`.
pub fn solve_theta(m: &DefiningEquations) -> Result<ComplexGraph, ManifoldError> {
    let sig = Signature::theta(m.n, m.c);
    let theta = fixed_point(&complexify(m)?, &sig, m.n, m.c, m.order(), 1)?;
    Ok(ComplexGraph { n: m.n, c: m.c, theta })
}

/// Solves the same relation for `w̲` as a series over `(z, z̲, w)`.
pub fn solve_theta_conjugate(m: &DefiningEquations) -> Result<Vec<TruncatedSeries>, ManifoldError> {
    let sig = Signature::theta_bar(m.n, m.c);
    fixed_point(&complexify(m)?, &sig, m.n, m.c, m.order(), -1)
}

/// Lowest degree of a nonzero residual in the two identities
/// `w ≡ Θ(z, z̲, Θ̄(z̲, z, w))` and `w̲ ≡ Θ̄(z̲, z, Θ(z, z̲, w̲))`, searched
/// through the reliable order; `None` when both vanish.
pub fn verify_theta_identities(g: &ComplexGraph) -> Result<Option<u32>, ManifoldError> {
    let (n, c) = (g.n, g.c);
    let bar = g.conjugate();
    let theta_sig = Signature::theta(n, c);
    let bar_sig = Signature::theta_bar(n, c);
    let mode = g.theta.iter().fold(Mode::Exact, |m, s| m.join(s.mode()));
    let order = g.order();
    let residual = |outer: &[TruncatedSeries],
                    inner: &[TruncatedSeries],
                    target: &Arc<Signature>|
     -> Result<Option<u32>, ManifoldError> {
        let mut images: Vec<TruncatedSeries> =
            (0..2 * n).map(|i| TruncatedSeries::var(target.clone(), i, order, mode)).collect();
        images.extend(inner.iter().cloned());
        let sub = Substitution::new(target.clone(), images)?;
        let pushed = sub.apply_all(outer, None)?;
        let mut low: Option<u32> = None;
        for (l, p) in pushed.iter().enumerate() {
            let id = TruncatedSeries::var(target.clone(), target.u(l), order, mode);
            let r = p.sub(&id)?;
            if let Some(d) = r.lowest_degree_within(r.order()) {
                low = Some(low.map_or(d, |x| x.min(d)));
            }
        }
        Ok(low)
    };
    let first = residual(&g.theta, &bar, &bar_sig)?;
    let second = residual(&bar, &g.theta, &theta_sig)?;
    Ok(match (first, second) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    })
}

/// Holomorphic change of coordinates `(z, w) ↦ (z', w')` fixing the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Biholomorphism {
    n: usize,
    c: usize,
    maps: Vec<TruncatedSeries>,
}

impl Biholomorphism {
    /// Validates the alphabet, the origin and the linear part.
    pub fn new(n: usize, c: usize, maps: Vec<TruncatedSeries>) -> Result<Biholomorphism, ManifoldError> {
        check_dims(n, c)?;
        if maps.len() != n + c {
            return Err(ManifoldError::Count { expected: n + c, got: maps.len() });
        }
        let sig = Signature::holomorphic(n, c);
        for (j, s) in maps.iter().enumerate() {
            if !s.sig().same_shape(&sig) {
                return Err(ManifoldError::Alphabet { j });
            }
            if !s.constant_term().is_zero_tol(s.tol()) {
                return Err(ManifoldError::ConstantTerm { j });
            }
        }
        let mode = maps.iter().fold(Mode::Exact, |m, s| m.join(s.mode()));
        let maps: Vec<TruncatedSeries> = maps.into_iter().map(|s| s.relabel(sig.clone()).to_mode(mode)).collect();
        if linear_part(&maps).inverse(mode.tol()).is_none() {
            return Err(ManifoldError::NotInvertible);
        }
        Ok(Biholomorphism { n, c, maps })
    }

    pub fn identity(n: usize, c: usize, order: i32, mode: Mode) -> Biholomorphism {
        let sig = Signature::holomorphic(n, c);
        let maps = (0..n + c).map(|i| TruncatedSeries::var(sig.clone(), i, order, mode)).collect();
        Biholomorphism { n, c, maps }
    }

    /// Linear map `x' = A·x`.
    pub fn linear(n: usize, c: usize, a: &Matrix, order: i32) -> Result<Biholomorphism, ManifoldError> {
        let sig = Signature::holomorphic(n, c);
        let mode = if (0..a.rows()).all(|i| a.row(i).iter().all(Scalar::is_exact)) { Mode::Exact } else { Mode::float() };
        let coords: Vec<TruncatedSeries> =
            (0..n + c).map(|i| TruncatedSeries::var(sig.clone(), i, order, mode)).collect();
        Biholomorphism::new(n, c, apply_matrix(a, &coords))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn maps(&self) -> &[TruncatedSeries] {
        &self.maps
    }

    pub fn order(&self) -> i32 {
        self.maps.iter().map(TruncatedSeries::order).min().unwrap_or(0)
    }

    pub fn mode(&self) -> Mode {
        self.maps.iter().fold(Mode::Exact, |m, s| m.join(s.mode()))
    }

    pub fn linear_part(&self) -> Matrix {
        linear_part(&self.maps)
    }

    /// Every component is the matching coordinate through the order.
    pub fn is_identity(&self) -> bool {
        let sig = Signature::holomorphic(self.n, self.c);
        self.maps.iter().enumerate().all(|(i, s)| {
            let id = TruncatedSeries::var(sig.clone(), i, s.order(), s.mode());
            s.approx_eq(&id, s.tol(), s.order())
        })
    }

    pub fn inverse(&self) -> Result<Biholomorphism, ManifoldError> {
        let maps = invert_map(&self.maps, Signature::holomorphic(self.n, self.c))?;
        Ok(Biholomorphism { maps, ..self.clone() })
    }

    /// `self` first, then `next`: `x ↦ next(self(x))`.
    pub fn then(&self, next: &Biholomorphism) -> Result<Biholomorphism, ManifoldError> {
        let sig = Signature::holomorphic(self.n, self.c);
        let sub = Substitution::new(sig, self.maps.clone())?;
        let maps = sub.apply_all(&next.maps, None)?;
        Ok(Biholomorphism { maps, ..self.clone() })
    }

    pub fn to_mode(&self, mode: Mode) -> Biholomorphism {
        Biholomorphism { maps: self.maps.iter().map(|s| s.to_mode(mode)).collect(), ..self.clone() }
    }
}

/// Graphing equations of `h(M)`.
///
/// `M` is parametrized by `t = (z, z̄, u)` through `w = u + i·φ(t)`; the
/// pushed-forward `(z', z̄', u')(t)` is inverted order by order and `v'(t)` is
/// composed with that inverse.
pub fn transform_defining(m: &DefiningEquations, h: &Biholomorphism) -> Result<DefiningEquations, ManifoldError> {
    let (n, c) = (m.n, m.c);
    if (h.n, h.c) != (n, c) {
        return Err(ManifoldError::Shape { expected: (n, c), got: (h.n, h.c) });
    }
    match transform_split(m, h)? {
        Some(fast) => Ok(fast),
        None => transform_parametric(m, h),
    }
}

fn transform_parametric(m: &DefiningEquations, h: &Biholomorphism) -> Result<DefiningEquations, ManifoldError> {
    let (n, c) = (m.n, m.c);
    let sig = Signature::real(n, c);
    let mode = m.mode().join(h.mode());
    let order = m.order().min(h.order());
    let i = Scalar::i(mode);
    let mut param: Vec<TruncatedSeries> = (0..n).map(|k| TruncatedSeries::var(sig.clone(), k, order, mode)).collect();
    for (l, phi) in m.phi.iter().enumerate() {
        let u = TruncatedSeries::var(sig.clone(), sig.u(l), order, mode);
        param.push(u.add(&phi.scale(&i))?);
    }
    let pushed = Substitution::new(sig.clone(), param)?.apply_all(&h.maps, Some(order))?;
    let (zs, ws) = pushed.split_at(n);
    let half = Scalar::ratio(1, 2, mode);
    let half_over_i = &(-Scalar::i(mode)) * &half;
    let mut chart: Vec<TruncatedSeries> = zs.to_vec();
    for z in zs {
        chart.push(z.swap_bar()?);
    }
    let mut vs = Vec::with_capacity(c);
    for w in ws {
        let wb = w.swap_bar()?;
        chart.push(w.add(&wb)?.scale(&half));
        vs.push(w.sub(&wb)?.scale(&half_over_i));
    }
    let inverse = match invert_map(&chart, sig.clone()) {
        Ok(g) => g,
        Err(MapError::SingularLinearPart) => return Err(ManifoldError::GraphingDegeneracy),
        Err(e) => return Err(e.into()),
    };
    let phi = Substitution::new(sig, inverse)?.apply_all(&vs, None)?;
    finish_real(n, c, phi)
}

/// Drops float noise in the reality symmetry and validates.
fn finish_real(n: usize, c: usize, phi: Vec<TruncatedSeries>) -> Result<DefiningEquations, ManifoldError> {
    let phi = phi
        .into_iter()
        .map(|s| {
            if s.mode().is_exact() {
                Ok(s)
            } else {
                let half = Scalar::float(0.5, 0.0);
                Ok(s.add(&s.swap_bar()?)?.scale(&half))
            }
        })
        .collect::<Result<Vec<_>, ManifoldError>>()?;
    DefiningEquations::new(n, c, phi)
}

/// Direct route for maps `z' = f(z)`, `w' = B·w` with `B` real: then
/// `φ' = B·φ(f⁻¹(z'), conj f⁻¹(z̄'), B⁻¹u')`. Returns `None` otherwise.
fn transform_split(m: &DefiningEquations, h: &Biholomorphism) -> Result<Option<DefiningEquations>, ManifoldError> {
    let (n, c) = (m.n, m.c);
    let tol = h.mode().tol();
    let z_only = h.maps[..n].iter().all(|s| s.terms().all(|(k, _)| k.degree_in(n..n + c) == 0));
    let w_linear_real = h.maps[n..].iter().all(|s| {
        s.terms().all(|(k, v)| k.degree() == 1 && k.degree_in(0..n) == 0 && v.is_real_tol(tol))
    });
    if !(z_only && w_linear_real) {
        return Ok(None);
    }
    let order = m.order().min(h.order());
    let mode = m.mode().join(h.mode());
    let hol = Signature::holomorphic(n, c);
    // Inverse of z ↦ f(z) in the z-block, padded with identity on w.
    let mut zmap: Vec<TruncatedSeries> = h.maps[..n].to_vec();
    for l in 0..c {
        zmap.push(TruncatedSeries::var(hol.clone(), n + l, order, mode));
    }
    let finv = invert_map(&zmap, hol.clone())?;
    let b = linear_part(&h.maps[n..]).to_rows();
    let b = Matrix::from_rows(b.into_iter().map(|row| row[n..].to_vec()).collect());
    let binv = b.inverse(tol).ok_or(ManifoldError::NotInvertible)?;
    let sig = Signature::real(n, c);
    let mut hol_to_z = Vec::with_capacity(n + c);
    for k in 0..n {
        hol_to_z.push(k);
    }
    for l in 0..c {
        hol_to_z.push(2 * n + l);
    }
    let mut hol_to_bar = Vec::with_capacity(n + c);
    for k in 0..n {
        hol_to_bar.push(n + k);
    }
    for l in 0..c {
        hol_to_bar.push(2 * n + l);
    }
    let mut images = Vec::with_capacity(2 * n + c);
    for g in &finv[..n] {
        images.push(g.remap(sig.clone(), &hol_to_z));
    }
    for g in &finv[..n] {
        images.push(g.conjugate_coeffs().remap(sig.clone(), &hol_to_bar));
    }
    let us: Vec<TruncatedSeries> =
        (0..c).map(|l| TruncatedSeries::var(sig.clone(), sig.u(l), order, mode)).collect();
    images.extend(apply_matrix(&binv, &us));
    let pulled = Substitution::new(sig, images)?.apply_all(&m.phi, Some(order))?;
    let phi = apply_matrix(&b, &pulled);
    Ok(Some(finish_real(n, c, phi)?))
}

/// Transformation by the parametrization route only, bypassing the direct
/// route for split maps.
pub fn transform_defining_general(
    m: &DefiningEquations,
    h: &Biholomorphism,
) -> Result<DefiningEquations, ManifoldError> {
    if (h.n, h.c) != (m.n, m.c) {
        return Err(ManifoldError::Shape { expected: (m.n, m.c), got: (h.n, h.c) });
    }
    transform_parametric(m, h)
}

/// Output of [`remove_pluriharmonic`].
#[derive(Clone, Debug)]
pub struct PluriharmonicRemoval {
    pub result: DefiningEquations,
    /// `w' = w − i·φ(0, 0, w) + …`, the inverse of `w = w' + i·φ(0, 0, w')`.
    pub step_one: Biholomorphism,
    /// `w' = Θ̄(0, z, w)` of the intermediate germ.
    pub step_two: Biholomorphism,
    /// `step_one` then `step_two`.
    pub composite: Biholomorphism,
}

/// Removes every monomial not divisible by some `z_k` and some `z̄_k`.
pub fn remove_pluriharmonic(m: &DefiningEquations) -> Result<PluriharmonicRemoval, ManifoldError> {
    let (n, c) = (m.n, m.c);
    for (j, s) in m.phi.iter().enumerate() {
        if s.terms().any(|(k, _)| k.degree() < 2) {
            return Err(ManifoldError::NotAffineNormalized { j });
        }
    }
    let order = m.order();
    let mode = m.mode();
    let hol = Signature::holomorphic(n, c);
    let i = Scalar::i(mode);
    // Step I: w = w' + i·φ(0, 0, w').
    let to_hol: Vec<usize> = (0..n).chain(0..n).chain((0..c).map(|l| n + l)).collect();
    let mut old_of_new: Vec<TruncatedSeries> =
        (0..n).map(|k| TruncatedSeries::var(hol.clone(), k, order, mode)).collect();
    for (l, s) in m.phi.iter().enumerate() {
        let pure_u = s.filter(|k| k.degree_in(0..2 * n) == 0).remap(hol.clone(), &to_hol);
        let w = TruncatedSeries::var(hol.clone(), n + l, order, mode);
        old_of_new.push(w.add(&pure_u.scale(&i))?);
    }
    let step_one = Biholomorphism::new(n, c, old_of_new)?.inverse()?;
    let m1 = transform_defining(m, &step_one)?;
    // Step II: w' = Θ̄(0, z, w).
    let bar = solve_theta(&m1)?.conjugate();
    let bar_to_hol: Vec<usize> = (0..n).chain(0..n).chain((0..c).map(|l| n + l)).collect();
    let mut maps: Vec<TruncatedSeries> =
        (0..n).map(|k| TruncatedSeries::var(hol.clone(), k, order, mode)).collect();
    for b in &bar {
        maps.push(b.filter(|k| k.degree_in(n..2 * n) == 0).remap(hol.clone(), &bar_to_hol).truncate(order));
    }
    let step_two = Biholomorphism::new(n, c, maps)?;
    let m2 = transform_defining(&m1, &step_two)?;
    let result = strip_pluriharmonic_noise(m2);
    let composite = step_one.then(&step_two)?;
    Ok(PluriharmonicRemoval { result, step_one, step_two, composite })
}

/// In float mode, drops non-mixed monomials at rounding level relative to the
/// largest coefficient of their component.
pub fn strip_pluriharmonic_noise(m: DefiningEquations) -> DefiningEquations {
    if m.mode().is_exact() {
        return m;
    }
    let n = m.n;
    let tol = m.mode().tol();
    let phi = m
        .phi
        .iter()
        .map(|s| {
            let cut = tol * s.terms().map(|(_, v)| v.abs()).fold(1.0, f64::max);
            s.map_coeffs(|k, v| if !is_mixed(k, n) && v.abs() <= cut { Scalar::float(0.0, 0.0) } else { v.clone() })
        })
        .collect();
    DefiningEquations { phi, ..m }
}
