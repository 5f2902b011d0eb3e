//! The six class pipelines.
//!
//! For `n = 1`, `a_j`, `α_j`, `β_j`, `c_j` are the coefficients of `zz̄`,
//! `z²z̄`, `z³z̄`, `z²z̄²` in `φ_j`.

use super::congruence::hermitian_congruence_normalize;
use super::pipeline::{Chart, Pipeline};
use super::{ClassTag, Condition, NormalizationTrace, NormalizeError, TraceStep};
use crate::frames::HermitianForm2;
use crate::linalg::Matrix;
use crate::manifold::{strip_pluriharmonic_noise, transform_defining, Biholomorphism, DefiningEquations};
use crate::scalar::{Mode, Scalar};

/// Dispatches on `tag`.
pub fn normalize(tag: ClassTag, m: &DefiningEquations) -> Result<NormalizationTrace, NormalizeError> {
    match tag {
        ClassTag::I => normalize_class_i(m),
        ClassTag::II => normalize_class_ii(m),
        ClassTag::III1 => normalize_class_iii1(m),
        ClassTag::III2 => normalize_class_iii2(m),
        ClassTag::IV1 => normalize_class_iv1(m),
        ClassTag::IV2 => normalize_class_iv2(m),
    }
}

/// Exponents of `z^p z̄^q` over `(z, z̄, u_1..u_c)`.
fn zz(c: usize, p: u32, q: u32) -> Vec<u32> {
    let mut e = vec![0; 2 + c];
    e[0] = p;
    e[1] = q;
    e
}

/// Exponents of `z z̄ u_l`.
fn zzu(c: usize, l: usize) -> Vec<u32> {
    let mut e = zz(c, 1, 1);
    e[2 + l] = 1;
    e
}

/// Exponents over `(z₁, z₂, z̄₁, z̄₂, u)`.
fn z2(z1: u32, z2: u32, zb1: u32, zb2: u32, u: u32) -> Vec<u32> {
    vec![z1, z2, zb1, zb2, u]
}

/// `w_l ↦ factor·w_l`.
fn scale_w(p: &Pipeline, l: usize, factor: &Scalar) -> Result<Biholomorphism, NormalizeError> {
    let ch = p.chart(&[factor]);
    let mut maps = ch.identity();
    maps[1 + l] = ch.w(l).scale(&ch.k(factor));
    ch.build(maps)
}

/// `z ↦ factor·z` for `n = 1`.
fn scale_z(p: &Pipeline, factor: &Scalar) -> Result<Biholomorphism, NormalizeError> {
    let ch = p.chart(&[factor]);
    let mut maps = ch.identity();
    maps[0] = ch.z(0).scale(&ch.k(factor));
    ch.build(maps)
}

/// `w_target ↦ w_target − factor·w_source`.
fn shear_w(p: &Pipeline, target: usize, source: usize, factor: &Scalar) -> Result<Biholomorphism, NormalizeError> {
    let ch = p.chart(&[factor]);
    let mut maps = ch.identity();
    maps[1 + target] = ch.w(target).sub(&ch.w(source).scale(&ch.k(factor)))?;
    ch.build(maps)
}

/// `w_a ↔ w_b`.
fn swap_w(p: &Pipeline, a: usize, b: usize) -> Result<Biholomorphism, NormalizeError> {
    let ch = p.chart(&[]);
    let mut maps = ch.identity();
    maps.swap(1 + a, 1 + b);
    ch.build(maps)
}

/// `z ↦ z + t·z^power` for `n = 1`.
fn z_power_shift(p: &Pipeline, t: &Scalar, power: u32) -> Result<Biholomorphism, NormalizeError> {
    let ch = p.chart(&[t]);
    let mut maps = ch.identity();
    let c = p.current().c();
    let mut e = vec![0; 1 + c];
    e[0] = power;
    maps[0] = maps[0].add(&ch.poly(&[(&e, t.clone())]))?;
    ch.build(maps)
}

/// `a₁ > 0` and `z ↦ √a₁·z` on an `n = 1` germ with `a₁ ≠ 0`.
fn normalize_first_levi(p: &mut Pipeline) -> Result<(), NormalizeError> {
    let c = p.current().c();
    let a1 = p.coeff(0, &zz(c, 1, 1)).re();
    if a1.re_sign(p.tol()) < 0 {
        let h = scale_w(p, 0, &Scalar::from_int(-1, p.current().mode()))?;
        p.apply("w1 -> -w1 (make the Levi coefficient positive)", h)?;
    }
    let a1 = p.coeff(0, &zz(c, 1, 1)).re();
    let root = a1.sqrt_real(p.tol());
    let h = scale_z(p, &root)?;
    p.apply("z -> sqrt(a1) z", h)
}

/// Pivot choice, `a₁ = 1` and `a_j = 0` for `j ≥ 2`.
fn levi_prelude(p: &mut Pipeline) -> Result<(), NormalizeError> {
    let c = p.current().c();
    let pivot = (0..c).find(|&j| !p.is_zero(&p.coeff(j, &zz(c, 1, 1)).re()));
    let Some(j) = pivot else { return Err(p.fail(Condition::LeviFormZero)) };
    if j != 0 {
        let h = swap_w(p, 0, j)?;
        p.apply(&format!("w1 <-> w{} (first nonzero Levi coefficient)", j + 1), h)?;
    }
    normalize_first_levi(p)?;
    for j in 1..c {
        let aj = p.coeff(j, &zz(c, 1, 1)).re();
        let h = shear_w(p, j, 0, &aj)?;
        p.apply(&format!("w{0} -> w{0} - a{0} w1", j + 1), h)?;
    }
    Ok(())
}

/// `z ↦ z + α₁z²`, removing `z²z̄` from `φ₁`.
fn remove_alpha1(p: &mut Pipeline) -> Result<(), NormalizeError> {
    let c = p.current().c();
    let alpha1 = p.coeff(0, &zz(c, 2, 1));
    let h = z_power_shift(p, &alpha1, 2)?;
    p.apply("z -> z + alpha1 z^2", h)
}

/// `z ↦ z/λ`, `w₁ ↦ w₁/(λλ̄)` with `α₂λ²λ̄ = 1`, i.e. `λ = ᾱ₂ / |α₂|^{4/3}`.
fn dilate_alpha2(p: &mut Pipeline) -> Result<(), NormalizeError> {
    let c = p.current().c();
    let alpha2 = p.coeff(1, &zz(c, 2, 1));
    if p.is_zero(&alpha2) {
        return Err(p.fail(Condition::Alpha2Zero));
    }
    let q = &alpha2 * &alpha2.conj();
    let r = q.real_root(3);
    let lambda = &alpha2.conj() / &(&r * &r);
    let mod2 = &lambda * &lambda.conj();
    let (zf, wf) = (lambda.inv(), mod2.inv());
    let ch = p.chart(&[&zf, &wf]);
    let mut maps = ch.identity();
    maps[0] = ch.z(0).scale(&ch.k(&zf));
    maps[1] = ch.w(0).scale(&ch.k(&wf));
    let h = ch.build(maps)?;
    p.apply("z -> z/lambda, w1 -> w1/|lambda|^2 with alpha2 lambda^2 conj(lambda) = 1", h)
}

/// Prescribes `zz̄ = 1`; see [`assert_normal_form`](super::assert_normal_form).
pub fn normalize_class_i(m: &DefiningEquations) -> Result<NormalizationTrace, NormalizeError> {
    let mut p = Pipeline::start(ClassTag::I, m, 2)?;
    let a = p.coeff(0, &zz(1, 1, 1)).re();
    if p.is_zero(&a) {
        return Err(p.fail(Condition::LeviFormZero));
    }
    normalize_first_levi(&mut p)?;
    p.finish()
}

/// Prescribes `v₁ = zz̄ + …`, `v₂ = z²z̄ + zz̄² + …`.
pub fn normalize_class_ii(m: &DefiningEquations) -> Result<NormalizationTrace, NormalizeError> {
    let mut p = Pipeline::start(ClassTag::II, m, 3)?;
    levi_prelude(&mut p)?;
    remove_alpha1(&mut p)?;
    dilate_alpha2(&mut p)?;
    p.finish()
}

/// Class II normalization of `(φ₁, φ₂)`, then `v₃` leading term
/// `i(z²z̄ − zz̄²)`.
pub fn normalize_class_iii1(m: &DefiningEquations) -> Result<NormalizationTrace, NormalizeError> {
    let mut p = Pipeline::start(ClassTag::III1, m, 3)?;
    levi_prelude(&mut p)?;
    remove_alpha1(&mut p)?;
    dilate_alpha2(&mut p)?;
    let alpha3 = p.coeff(2, &zz(3, 2, 1));
    let h = shear_w(&p, 2, 1, &alpha3.re())?;
    p.apply("w3 -> w3 - Re(alpha3) w2", h)?;
    let b3 = p.coeff(2, &zz(3, 2, 1)).im();
    if p.is_zero(&b3) {
        return Err(p.fail(Condition::B3Zero));
    }
    let h = scale_w(&p, 2, &b3.inv())?;
    p.apply("w3 -> w3/b3", h)?;
    p.finish()
}

/// Removes the nine `zz̄u_l` coefficients `d_j, e_j, f_j` of `φ_j` through
/// `w = w' + (d/2)w'₁² + e·w'₁w'₂ + f·w'₁w'₃`.
fn quadratic_shear(p: &mut Pipeline) -> Result<(), NormalizeError> {
    let coeffs: Vec<[Scalar; 3]> =
        (0..3).map(|j| [0, 1, 2].map(|l| p.coeff(j, &zzu(3, l)).re())).collect();
    if coeffs.iter().flatten().all(|s| p.is_zero(s)) {
        return Ok(());
    }
    let all: Vec<&Scalar> = coeffs.iter().flatten().collect();
    let ch = p.chart(&all);
    let half = Scalar::ratio(1, 2, ch.mode());
    let mut old_of_new = ch.identity();
    for (j, [d, e, f]) in coeffs.iter().enumerate() {
        let w1 = ch.w(0);
        let quad = w1
            .mul(&w1)?
            .scale(&ch.k(&(d * &half)))
            .add(&w1.mul(&ch.w(1))?.scale(&ch.k(e)))?
            .add(&w1.mul(&ch.w(2))?.scale(&ch.k(f)))?;
        old_of_new[1 + j] = old_of_new[1 + j].add(&quad)?;
    }
    let h = ch.build(old_of_new)?.inverse()?;
    p.apply("w -> w' with w = w' + (d/2) w1'^2 + e w1' w2' + f w1' w3' (removes zzbar u terms)", h)
}

/// One pass of class III₂: nine-constant shear, `z ↦ z + α₁z²`, `α₃ = 0`,
/// `α₂`-dilation, `c₃ = 3` (so `β₃ = 2`), `3 Re β₂ = 2c₂` through
/// `z ↦ z + sz²`, `w₁ ↦ w₁ + sw₂`, `z ↦ z + β₁z³`, then `c₂ = Re β₂ = 0`.
fn iii2_pass(m: &DefiningEquations) -> Result<NormalizationTrace, NormalizeError> {
    let mut p = Pipeline::start(ClassTag::III2, m, 4)?;
    levi_prelude(&mut p)?;
    quadratic_shear(&mut p)?;
    remove_alpha1(&mut p)?;

    let (alpha2, alpha3) = (p.coeff(1, &zz(3, 2, 1)), p.coeff(2, &zz(3, 2, 1)));
    if p.is_zero(&alpha2) && p.is_zero(&alpha3) {
        return Err(p.fail(Condition::Alpha2Zero));
    }
    let cross = &(&alpha2.re() * &alpha3.im()) - &(&alpha2.im() * &alpha3.re());
    if !p.is_zero(&cross) {
        return Err(p.fail(Condition::DegeneracyNonvanishing { degree: 0 }));
    }
    if p.is_zero(&alpha2) {
        let h = swap_w(&p, 1, 2)?;
        p.apply("w2 <-> w3 (alpha2 = 0)", h)?;
    }
    let (alpha2, alpha3) = (p.coeff(1, &zz(3, 2, 1)), p.coeff(2, &zz(3, 2, 1)));
    let h = shear_w(&p, 2, 1, &(&alpha3 / &alpha2).re())?;
    p.apply("w3 -> w3 - (alpha3/alpha2) w2", h)?;
    dilate_alpha2(&mut p)?;

    let (beta3, c3) = (p.coeff(2, &zz(3, 3, 1)), p.coeff(2, &zz(3, 2, 2)).re());
    let mode = p.current().mode();
    let (two, three) = (Scalar::from_int(2, mode), Scalar::from_int(3, mode));
    if !p.is_zero(&(&(&three * &beta3) - &(&two * &c3))) {
        return Err(p.fail(Condition::DegeneracyNonvanishing { degree: 1 }));
    }
    if p.is_zero(&c3) {
        return Err(p.fail(Condition::C3Zero));
    }
    let h = scale_w(&p, 2, &(&three / &c3))?;
    p.apply("w3 -> (3/c3) w3 (so c3 = 3, beta3 = 2)", h)?;

    let (beta2, c2) = (p.coeff(1, &zz(3, 3, 1)), p.coeff(1, &zz(3, 2, 2)).re());
    // Shifts β₂ and c₂ by −2s each and keeps the lower normalizations.
    let s = &(&(&three * &beta2.re()) - &(&two * &c2)) / &two;
    if !p.is_zero(&s) {
        let ch = p.chart(&[&s]);
        let mut maps = ch.identity();
        maps[0] = maps[0].add(&ch.poly(&[(&[2, 0, 0, 0], s.clone())]))?;
        maps[1] = maps[1].add(&ch.w(1).scale(&ch.k(&s)))?;
        let h = ch.build(maps)?;
        p.apply("z -> z + s z^2, w1 -> w1 + s w2 with s = (3 beta2 - 2 c2)/2", h)?;
    }
    let beta1 = p.coeff(0, &zz(3, 3, 1));
    let h = z_power_shift(&p, &beta1, 3)?;
    p.apply("z -> z + beta1 z^3", h)?;
    let c2 = p.coeff(1, &zz(3, 2, 2)).re();
    let h = shear_w(&p, 1, 2, &(&c2 / &three))?;
    p.apply("w2 -> w2 - (c2/3) w3", h)?;
    p.finish()
}

/// `z ↦ z + iy·z² + (y/2)·w₁`, `w₁ ↦ w₁ + iy·z·w₁`: after renormalization
/// this shifts `Im β₂` by `−y`.
fn imaginary_beta2_map(m: &DefiningEquations, y: &Scalar) -> Result<Biholomorphism, NormalizeError> {
    let mode = if y.is_exact() { m.mode() } else { m.mode().join(Mode::float()) };
    let ch = Chart::new(1, 3, m.order(), mode);
    let iy = &Scalar::i(mode) * &ch.k(y);
    let half_y = &ch.k(y) * &Scalar::ratio(1, 2, mode);
    let mut maps = ch.identity();
    maps[0] = maps[0].add(&ch.poly(&[(&[2, 0, 0, 0], iy.clone()), (&[0, 1, 0, 0], half_y)]))?;
    maps[1] = maps[1].add(&ch.poly(&[(&[1, 1, 0, 0], iy)]))?;
    ch.build(maps)
}

/// Class III₂. A pass leaves `Im β₂` free; a second pass after
/// [`imaginary_beta2_map`] removes it.
pub fn normalize_class_iii2(m: &DefiningEquations) -> Result<NormalizationTrace, NormalizeError> {
    let mut trace = iii2_pass(m)?;
    for _ in 0..MAX_III2_PASSES {
        let f = &trace.final_form;
        let y = f.phi()[1].coeff_of(&zz(3, 3, 1)).im();
        if y.is_zero_tol(f.mode().tol()) {
            return Ok(trace);
        }
        let h = imaginary_beta2_map(f, &y)?;
        let shifted = strip_pluriharmonic_noise(transform_defining(f, &h)?);
        let next = iii2_pass(&shifted)?;
        trace.steps.push(TraceStep { description: "z -> z + i y z^2 + (y/2) w1, w1 -> w1 + i y z w1 with y = Im beta2".into(), map: h });
        trace.steps.extend(next.steps);
        trace.final_form = next.final_form;
    }
    Err(NormalizeError::NotInClass { class: ClassTag::III2, condition: Condition::DegeneracyNonvanishing { degree: 2 } })
}

/// Passes after the first; each removes `Im β₂` up to higher-order terms.
const MAX_III2_PASSES: usize = 3;

/// Origin Levi form `[[2a, 2β], [2β̄, 2c]]` from the quadratic coefficients
/// of an `n = 2, c = 1` germ.
fn quadratic_levi_form(p: &Pipeline) -> HermitianForm2 {
    let two = Scalar::from_int(2, p.current().mode());
    let a = p.coeff(0, &z2(1, 0, 1, 0, 0));
    let beta = p.coeff(0, &z2(0, 1, 1, 0, 0));
    let c = p.coeff(0, &z2(0, 1, 0, 1, 0));
    HermitianForm2::new(&two * &a, &two * &beta, &two * &c)
}

/// `z ↦ P⁻¹z`, `w ↦ sign·w` from the congruence of the origin Levi form.
fn congruence_step(p: &mut Pipeline, target_rank: usize) -> Result<i32, NormalizeError> {
    let form = quadratic_levi_form(p);
    let cg = hermitian_congruence_normalize(&form, target_rank).map_err(|c| p.fail(c))?;
    let pinv = cg.p.inverse(p.tol()).expect("congruence matrices are invertible");
    let entries: Vec<&Scalar> = (0..2).flat_map(|i| pinv.row(i).iter()).collect();
    let ch = p.chart(&entries);
    let mode = ch.mode();
    let mut a = Matrix::identity(3, mode);
    for i in 0..2 {
        for j in 0..2 {
            a.set(i, j, pinv.get(i, j).to_mode(mode));
        }
    }
    a.set(2, 2, Scalar::from_int(cg.sign as i64, mode));
    let h = ch.linear(&a)?;
    p.apply("z -> P^-1 z, w -> sign w (Hermitian congruence of the Levi form)", h)?;
    Ok(cg.s)
}

/// Prescribes quadratic part `z₁z̄₁ + s·z₂z̄₂`.
pub fn normalize_class_iv1(m: &DefiningEquations) -> Result<NormalizationTrace, NormalizeError> {
    let mut p = Pipeline::start(ClassTag::IV1, m, 2)?;
    congruence_step(&mut p, 2)?;
    p.finish()
}

/// Rank-one congruence, vanishing of the `z₂z̄₂`-divisible cubic terms,
/// `z₁ ↦ z₁ + αz₁² + γz₁z₂ + δz₂²`, then `z₂ ↦ 2β̄·z₂`.
pub fn normalize_class_iv2(m: &DefiningEquations) -> Result<NormalizationTrace, NormalizeError> {
    let mut p = Pipeline::start(ClassTag::IV2, m, 3)?;
    congruence_step(&mut p, 1)?;
    let divisible = [z2(1, 1, 0, 1, 0), z2(0, 2, 0, 1, 0), z2(0, 1, 0, 1, 1)];
    if divisible.iter().any(|e| !p.is_zero(&p.coeff(0, e))) {
        return Err(p.fail(Condition::LeviDeterminantNonvanishing { degree: 1 }));
    }
    let alpha = p.coeff(0, &z2(2, 0, 1, 0, 0));
    let gamma = p.coeff(0, &z2(1, 1, 1, 0, 0));
    let delta = p.coeff(0, &z2(0, 2, 1, 0, 0));
    let ch = p.chart(&[&alpha, &gamma, &delta]);
    let mut maps = ch.identity();
    maps[0] = maps[0].add(&ch.poly(&[(&[2, 0, 0], alpha.clone()), (&[1, 1, 0], gamma.clone()), (&[0, 2, 0], delta.clone())]))?;
    let h = ch.build(maps)?;
    p.apply("z1 -> z1 + alpha z1^2 + gamma z1 z2 + delta z2^2", h)?;

    let beta = p.coeff(0, &z2(2, 0, 0, 1, 0));
    if p.is_zero(&beta) {
        return Err(p.fail(Condition::FreemanDegenerate));
    }
    let factor = &beta.conj() * &Scalar::from_int(2, p.current().mode());
    let ch = p.chart(&[&factor]);
    let mut maps = ch.identity();
    maps[1] = ch.z(1).scale(&ch.k(&factor));
    let h = ch.build(maps)?;
    p.apply("z2 -> 2 conj(beta) z2", h)?;
    p.finish()
}
