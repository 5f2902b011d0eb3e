//! Class decision procedure over origin bracket ranks, the Levi form, the
//! Freeman value and the two identically vanishing determinants.
//!
//! Rank and Freeman conditions are read at the origin. The vanishing
//! conditions are checked as series through their reliable order. With
//! [`ClassifyOptions::sample_points`] set, the open conditions of the found
//! class are re-checked at nearby recentered base points.

use crate::frames::{
    class32_determinant, class32_determinant_scale, freeman_value, levi_determinant, levi_matrix, rank_at_origin,
    standard_fields, FrameError, TangentFrameField,
};
use crate::linalg::Matrix;
use crate::manifold::{check_reality, transform_defining, Biholomorphism, DefiningEquations, ManifoldError};
use crate::normalize::{
    affine_normalization, first_nonvanishing, first_nonvanishing_scaled, hermitian_congruence_normalize, ClassTag,
    Condition, NormalizeError,
};
use crate::scalar::{Mode, Scalar};
use crate::series::{SeriesError, TruncatedSeries};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("reality violated in phi{} at exponents {exponents:?}", j + 1)]
    Reality { j: usize, exponents: Vec<u32> },
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
}

impl From<SeriesError> for ClassifyError {
    fn from(e: SeriesError) -> Self {
        ClassifyError::Manifold(ManifoldError::Series(e))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Recentered base points at which the open conditions are re-checked.
    pub sample_points: usize,
}

/// Origin rank of a named list of fields.
#[derive(Clone, Debug, PartialEq)]
pub struct RankEvidence {
    pub fields: Vec<String>,
    pub rank: usize,
}

/// A series that must vanish identically.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminantEvidence {
    pub name: String,
    /// Degrees through this order were checked.
    pub reliable_order: i32,
    /// Lowest degree with a coefficient above tolerance.
    pub first_nonzero: Option<u32>,
}

/// Failed open conditions at one recentered base point `(z₀, u₀)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleCheck {
    pub z: Vec<Scalar>,
    pub u: Vec<Scalar>,
    pub failed: Vec<Condition>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassReport {
    /// `None` iff `failed` is nonempty or some sample check failed.
    pub class: Option<ClassTag>,
    pub n: usize,
    pub c: usize,
    pub ranks: Vec<RankEvidence>,
    pub levi_rank: Option<usize>,
    pub freeman_value: Option<Scalar>,
    pub determinant: Option<DeterminantEvidence>,
    pub failed: Vec<Condition>,
    pub samples: Vec<SampleCheck>,
    pub order_used: i32,
    pub note: String,
}

pub fn classify(m: &DefiningEquations) -> Result<ClassReport, ClassifyError> {
    classify_with(m, &ClassifyOptions::default())
}

pub fn classify_with(m: &DefiningEquations, opts: &ClassifyOptions) -> Result<ClassReport, ClassifyError> {
    if !check_reality(m) {
        let (j, exponents) = reality_defect(m);
        return Err(ClassifyError::Reality { j, exponents });
    }
    let base = affine_normalized(m)?;
    let v = origin_verdict(&base)?;
    let mut report = ClassReport {
        class: v.class,
        n: m.n(),
        c: m.c(),
        ranks: v.ranks,
        levi_rank: v.levi_rank,
        freeman_value: v.freeman,
        determinant: v.determinant,
        failed: v.failed,
        samples: Vec::new(),
        order_used: m.order(),
        note: String::new(),
    };
    if let Some(tag) = report.class {
        for k in 1..=opts.sample_points {
            let (z, u) = sample_point(m.n(), m.c(), k);
            let shifted = affine_normalized(&recenter(&base, &z, &u)?)?;
            let failed = open_conditions(tag, &shifted)?;
            if !failed.is_empty() {
                report.class = None;
            }
            report.samples.push(SampleCheck { z, u, failed });
        }
    }
    report.note = if opts.sample_points == 0 {
        "rank, Levi and Freeman conditions certified at the origin only; vanishing conditions checked as series through their reliable order".into()
    } else {
        format!(
            "rank, Levi and Freeman conditions certified at the origin and re-checked at {} recentered points; vanishing conditions checked as series through their reliable order",
            opts.sample_points
        )
    };
    Ok(report)
}

fn reality_defect(m: &DefiningEquations) -> (usize, Vec<u32>) {
    for (j, s) in m.phi().iter().enumerate() {
        if let Ok(bar) = s.swap_bar() {
            let tol = s.tol();
            if let Some(k) = s.terms().chain(bar.terms()).map(|(k, _)| *k).find(|k| !(&s.coeff(k) - &bar.coeff(k)).is_zero_tol(tol)) {
                return (j, k.exponents(s.sig().nvars()));
            }
        }
    }
    (0, Vec::new())
}

fn affine_normalized(m: &DefiningEquations) -> Result<DefiningEquations, ClassifyError> {
    if m.is_affine_normalized() {
        return Ok(m.clone());
    }
    Ok(transform_defining(m, &affine_normalization(m)?)?)
}

#[derive(Default)]
struct Verdict {
    class: Option<ClassTag>,
    ranks: Vec<RankEvidence>,
    levi_rank: Option<usize>,
    freeman: Option<Scalar>,
    determinant: Option<DeterminantEvidence>,
    failed: Vec<Condition>,
}

impl Verdict {
    fn rank(&mut self, fields: &[(String, TangentFrameField)], names: &[&str]) -> usize {
        let picked: Vec<TangentFrameField> =
            names.iter().map(|n| fields.iter().find(|(k, _)| k == n).expect("standard field").1.clone()).collect();
        let rank = rank_at_origin(&picked);
        self.ranks.push(RankEvidence { fields: names.iter().map(|s| s.to_string()).collect(), rank });
        rank
    }

    fn conclude(mut self, tag: ClassTag) -> Verdict {
        if self.failed.is_empty() {
            self.class = Some(tag);
        }
        self
    }
}

const FIRST: [&str; 3] = ["L", "Lbar", "[L,Lbar]"];
const SECOND: [&str; 4] = ["L", "Lbar", "[L,Lbar]", "[L,[L,Lbar]]"];
const CONJ: [&str; 5] = ["L", "Lbar", "[L,Lbar]", "[L,[L,Lbar]]", "[Lbar,[L,Lbar]]"];
const TRIPLE: [&str; 5] = ["L", "Lbar", "[L,Lbar]", "[L,[L,Lbar]]", "[L,[L,[L,Lbar]]]"];
const LEVI_FRAME: [&str; 5] = ["L1", "L2", "L1bar", "L2bar", "[L1,L1bar]"];

/// Full decision tree at the origin.
fn origin_verdict(m: &DefiningEquations) -> Result<Verdict, ClassifyError> {
    let mut v = Verdict::default();
    match (m.n(), m.c()) {
        (1, c) => {
            let fields = standard_fields(m)?;
            if v.rank(&fields, &FIRST) < 3 {
                v.failed.push(Condition::LeviFormZero);
                return Ok(v);
            }
            if c == 1 {
                return Ok(v.conclude(ClassTag::I));
            }
            if v.rank(&fields, &SECOND) < 4 {
                v.failed.push(Condition::Alpha2Zero);
                return Ok(v);
            }
            if c == 2 {
                return Ok(v.conclude(ClassTag::II));
            }
            if v.rank(&fields, &CONJ) == 5 {
                return Ok(v.conclude(ClassTag::III1));
            }
            let det = class32_determinant(m)?;
            let scale = class32_determinant_scale(m)?;
            let first_nonzero = first_nonvanishing_scaled(&det, &scale, m.mode().tol());
            if let Some(degree) = first_nonzero {
                v.failed.push(Condition::DegeneracyNonvanishing { degree });
            }
            v.determinant = Some(DeterminantEvidence { name: "degeneracy determinant".into(), reliable_order: det.order(), first_nonzero });
            if v.rank(&fields, &TRIPLE) < 5 {
                v.failed.push(Condition::C3Zero);
            }
            Ok(v.conclude(ClassTag::III2))
        }
        (2, 1) => {
            let origin = levi_matrix(m)?.origin;
            let tol = m.mode().tol();
            let levi_rank = origin.rank(tol);
            v.levi_rank = Some(levi_rank);
            if levi_rank == 0 {
                v.rank(&standard_fields(m)?, &LEVI_FRAME);
                v.failed.push(Condition::LeviFormZero);
                return Ok(v);
            }
            let g = levi_congruence(m, levi_rank)?;
            v.rank(&standard_fields(&g)?, &LEVI_FRAME);
            if levi_rank == 2 {
                return Ok(v.conclude(ClassTag::IV1));
            }
            let det = levi_determinant(&g.phi()[0])?;
            let first_nonzero = first_nonvanishing(&det, tol);
            if let Some(degree) = first_nonzero {
                v.failed.push(Condition::LeviDeterminantNonvanishing { degree });
            }
            v.determinant = Some(DeterminantEvidence { name: "Levi determinant".into(), reliable_order: det.order(), first_nonzero });
            let f = freeman_value(&g)?;
            if f.is_zero_tol(tol) {
                v.failed.push(Condition::FreemanDegenerate);
            }
            v.freeman = Some(f);
            Ok(v.conclude(ClassTag::IV2))
        }
        (n, c) => Err(FrameError::Shape { expected: (1, c), got: (n, c) }.into()),
    }
}

/// `z ↦ P⁻¹z`, `w ↦ sign·w` bringing the origin Levi form to `2·diag(1, s)`.
fn levi_congruence(m: &DefiningEquations, rank: usize) -> Result<DefiningEquations, ClassifyError> {
    let origin = levi_matrix(m)?.origin;
    let cg = hermitian_congruence_normalize(&origin, rank).map_err(|condition| {
        NormalizeError::NotInClass { class: if rank == 2 { ClassTag::IV1 } else { ClassTag::IV2 }, condition }
    })?;
    let pinv = cg.p.inverse(m.mode().tol()).expect("congruence matrices are invertible");
    let exact = (0..2).all(|i| pinv.row(i).iter().all(Scalar::is_exact));
    let mode = if exact { Mode::Exact } else { m.mode().join(Mode::float()) };
    let mut a = Matrix::identity(3, mode);
    for i in 0..2 {
        for j in 0..2 {
            a.set(i, j, pinv.get(i, j).to_mode(mode));
        }
    }
    a.set(2, 2, Scalar::from_int(cg.sign as i64, mode));
    let h = Biholomorphism::linear(2, 1, &a, m.order())?;
    Ok(transform_defining(m, &h)?)
}

/// Open conditions of `tag`: the maximal ranks and the Freeman value.
fn open_conditions(tag: ClassTag, m: &DefiningEquations) -> Result<Vec<Condition>, ClassifyError> {
    let mut v = Verdict::default();
    match tag {
        ClassTag::I | ClassTag::II | ClassTag::III1 | ClassTag::III2 => {
            let fields = standard_fields(m)?;
            if v.rank(&fields, &FIRST) < 3 {
                v.failed.push(Condition::LeviFormZero);
            }
            if tag != ClassTag::I && v.rank(&fields, &SECOND) < 4 {
                v.failed.push(Condition::Alpha2Zero);
            }
            if tag == ClassTag::III1 && v.rank(&fields, &CONJ) < 5 {
                v.failed.push(Condition::B3Zero);
            }
            if tag == ClassTag::III2 && v.rank(&fields, &TRIPLE) < 5 {
                v.failed.push(Condition::C3Zero);
            }
        }
        ClassTag::IV1 | ClassTag::IV2 => {
            let rank = levi_matrix(m)?.origin.rank(m.mode().tol());
            let expected = if tag == ClassTag::IV1 { 2 } else { 1 };
            if rank < expected {
                v.failed.push(Condition::LeviRank { expected, got: rank });
            } else if tag == ClassTag::IV2 {
                // Truncation may lift the rank slightly; the Freeman value
                // is read in the frame of the measured rank.
                let g = levi_congruence(m, rank)?;
                if freeman_value(&g)?.is_zero_tol(m.mode().tol()) {
                    v.failed.push(Condition::FreemanDegenerate);
                }
            }
        }
    }
    Ok(v.failed)
}

/// Deterministic small base point number `k ≥ 1`.
fn sample_point(n: usize, c: usize, k: usize) -> (Vec<Scalar>, Vec<Scalar>) {
    let r = 0.02 * k as f64;
    let z = (0..n).map(|j| {
        let t = 1.3 * (k + 2 * j) as f64;
        Scalar::float(r * t.cos(), r * t.sin())
    });
    let u = (0..c).map(|l| Scalar::float(0.5 * r * (0.7 * (k + l) as f64).cos(), 0.0));
    (z.collect(), u.collect())
}

/// The germ at the point over `(z₀, u₀)`, in coordinates centered there.
/// The shift costs one order of reliability.
fn recenter(m: &DefiningEquations, z0: &[Scalar], u0: &[Scalar]) -> Result<DefiningEquations, ClassifyError> {
    let m = m.to_mode(m.mode().join(Mode::float()));
    let (n, c) = (m.n(), m.c());
    let offsets: Vec<Scalar> = z0.iter().cloned().chain(z0.iter().map(Scalar::conj)).chain(u0.iter().cloned()).collect();
    let order = m.order();
    let sig = m.sig().clone();
    let mode = m.mode();
    let shifted_vars: Vec<TruncatedSeries> =
        (0..2 * n + c).map(|i| TruncatedSeries::var(sig.clone(), i, order, mode).add_constant(&offsets[i])).collect();
    let mut phi = Vec::with_capacity(c);
    for s in m.phi() {
        let mut acc = TruncatedSeries::zero(sig.clone(), order, mode);
        for (k, v) in s.terms() {
            let mut term = TruncatedSeries::constant(sig.clone(), order, v.clone());
            for (i, e) in k.exponents(2 * n + c).iter().enumerate() {
                if *e > 0 {
                    term = term.mul(&shifted_vars[i].pow(*e))?;
                }
            }
            acc = acc.add(&term)?;
        }
        let v0 = acc.constant_term();
        phi.push(acc.add_constant(&-v0).truncate(order - 1));
    }
    Ok(DefiningEquations::new(n, c, phi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::model;

    #[test]
    fn recentering_the_quadric_keeps_it_a_quadric() {
        let m = model(ClassTag::I, 4);
        let z0 = Scalar::float(0.1, 0.2);
        let g = recenter(&m, &[z0.clone()], &[Scalar::float(0.05, 0.0)]).unwrap();
        // v + v₀ = (z + z₀)(z̄ + z̄₀): linear part z̄₀z + z₀z̄, same quadratic part.
        let phi = &g.phi()[0];
        assert!(phi.coeff_of(&[1, 0, 0]).approx_eq(&z0.conj(), 1e-15));
        assert!(phi.coeff_of(&[1, 1, 0]).approx_eq(&Scalar::one(Mode::Exact), 1e-15));
        assert_eq!(phi.order(), 3);
    }

    #[test]
    fn models_survive_sampling() {
        let opts = ClassifyOptions { sample_points: 2 };
        for tag in ClassTag::ALL {
            let r = classify_with(&model(tag, 6), &opts).unwrap();
            assert_eq!(r.class, Some(tag), "{:?}", r.samples);
            assert_eq!(r.samples.len(), 2);
        }
    }
}
