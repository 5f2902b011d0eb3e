//! Shared machinery of the class pipelines: coordinate charts for building
//! maps and the recording pipeline itself.

use std::sync::Arc;

use super::{ClassTag, Condition, NormalizationTrace, NormalizeError, TraceStep};
use crate::linalg::Matrix;
use crate::manifold::{
    remove_pluriharmonic, strip_pluriharmonic_noise, transform_defining, Biholomorphism, DefiningEquations,
};
use crate::scalar::{Mode, Scalar};
use crate::series::{MultiIndex, Signature, TruncatedSeries};

/// Holomorphic coordinates `(z, w)` at a fixed order and mode.
pub(crate) struct Chart {
    n: usize,
    c: usize,
    order: i32,
    mode: Mode,
    sig: Arc<Signature>,
}

impl Chart {
    pub(crate) fn new(n: usize, c: usize, order: i32, mode: Mode) -> Chart {
        Chart { n, c, order, mode, sig: Signature::holomorphic(n, c) }
    }

    pub(crate) fn mode(&self) -> Mode {
        self.mode
    }

    pub(crate) fn coord(&self, i: usize) -> TruncatedSeries {
        TruncatedSeries::var(self.sig.clone(), i, self.order, self.mode)
    }

    pub(crate) fn z(&self, k: usize) -> TruncatedSeries {
        self.coord(k)
    }

    pub(crate) fn w(&self, l: usize) -> TruncatedSeries {
        self.coord(self.n + l)
    }

    pub(crate) fn identity(&self) -> Vec<TruncatedSeries> {
        (0..self.n + self.c).map(|i| self.coord(i)).collect()
    }

    pub(crate) fn k(&self, s: &Scalar) -> Scalar {
        s.to_mode(self.mode)
    }

    /// `Σ coeff · x^exps` in the chart.
    pub(crate) fn poly(&self, terms: &[(&[u32], Scalar)]) -> TruncatedSeries {
        let terms: Vec<(MultiIndex, Scalar)> =
            terms.iter().map(|(e, v)| (MultiIndex::new(e), v.to_mode(self.mode))).collect();
        TruncatedSeries::from_terms(self.sig.clone(), self.order, self.mode, terms)
    }

    pub(crate) fn build(&self, maps: Vec<TruncatedSeries>) -> Result<Biholomorphism, NormalizeError> {
        Ok(Biholomorphism::new(self.n, self.c, maps)?)
    }

    /// `x' = A·x` with every entry brought to the chart mode.
    pub(crate) fn linear(&self, a: &Matrix) -> Result<Biholomorphism, NormalizeError> {
        let rows = a.to_rows().into_iter().map(|r| r.iter().map(|s| self.k(s)).collect()).collect();
        Ok(Biholomorphism::linear(self.n, self.c, &Matrix::from_rows(rows), self.order)?)
    }
}

/// Records biholomorphisms while driving a germ toward a normal form.
///
/// Class steps read coefficients of degree at most `work_degree`, so they act
/// on a truncated working copy; [`Pipeline::finish`] applies their composite
/// once to the full-order germ.
pub(crate) struct Pipeline {
    class: ClassTag,
    initial: DefiningEquations,
    /// Full-order germ after the affine and pluriharmonic prelude.
    base: DefiningEquations,
    prelude_steps: usize,
    work: DefiningEquations,
    steps: Vec<TraceStep>,
}

impl Pipeline {
    /// Checks the shape, then removes linear and pluriharmonic terms at full
    /// order.
    pub(crate) fn start(class: ClassTag, m: &DefiningEquations, work_degree: i32) -> Result<Pipeline, NormalizeError> {
        let expected = class.shape();
        if (m.n(), m.c()) != expected {
            return Err(NormalizeError::NotInClass {
                class,
                condition: Condition::Shape { expected, got: (m.n(), m.c()) },
            });
        }
        let mut steps = Vec::new();
        let mut base = m.clone();
        if !base.is_affine_normalized() {
            let h = affine_normalization(&base)?;
            base = strip_pluriharmonic_noise(transform_defining(&base, &h)?);
            steps.push(TraceStep { description: "affine normalization: w -> (I - iB) w - 2i b z".into(), map: h });
        }
        if !base.is_pluriharmonic_free() {
            let removal = remove_pluriharmonic(&base)?;
            base = removal.result;
            steps.push(TraceStep { description: "pluriharmonic removal".into(), map: removal.composite });
        }
        let work = base.truncate(work_degree.min(base.order()));
        Ok(Pipeline { class, initial: m.clone(), prelude_steps: steps.len(), base, work, steps })
    }

    pub(crate) fn current(&self) -> &DefiningEquations {
        &self.work
    }

    pub(crate) fn tol(&self) -> f64 {
        self.work.mode().tol()
    }

    /// Full-order chart; exact when the germ and every constant are exact.
    pub(crate) fn chart(&self, constants: &[&Scalar]) -> Chart {
        let mode = if constants.iter().all(|s| s.is_exact()) { self.work.mode() } else { self.float_mode() };
        Chart::new(self.work.n(), self.work.c(), self.base.order(), mode)
    }

    fn float_mode(&self) -> Mode {
        match self.work.mode() {
            Mode::Exact => Mode::float(),
            m => m,
        }
    }

    /// Coefficient of `x^exps` in `φ_j`.
    pub(crate) fn coeff(&self, j: usize, exps: &[u32]) -> Scalar {
        self.work.phi()[j].coeff_of(exps)
    }

    pub(crate) fn is_zero(&self, s: &Scalar) -> bool {
        s.is_zero_tol(self.tol())
    }

    pub(crate) fn fail(&self, condition: Condition) -> NormalizeError {
        NormalizeError::NotInClass { class: self.class, condition }
    }

    /// Records `h` unless it is the identity. A float map applied to an exact
    /// germ is preceded by a recorded switch to float arithmetic.
    pub(crate) fn apply(&mut self, description: &str, h: Biholomorphism) -> Result<(), NormalizeError> {
        if h.is_identity() {
            return Ok(());
        }
        if self.work.mode().is_exact() && !h.mode().is_exact() {
            let (n, c) = (self.work.n(), self.work.c());
            let switch = Biholomorphism::identity(n, c, self.base.order(), h.mode());
            self.work = self.work.to_mode(h.mode());
            self.steps.push(TraceStep { description: "switch to float arithmetic".into(), map: switch });
        }
        self.work = strip_pluriharmonic_noise(transform_defining(&self.work, &h)?);
        self.steps.push(TraceStep { description: description.to_string(), map: h });
        Ok(())
    }

    /// Transforms the full-order germ by the composite of the class steps.
    pub(crate) fn finish(self) -> Result<NormalizationTrace, NormalizeError> {
        let class_steps = &self.steps[self.prelude_steps..];
        let mut final_form = self.base.clone();
        if let Some((first, rest)) = class_steps.split_first() {
            let mode = self.work.mode();
            let mut composite = first.map.to_mode(mode);
            for step in rest {
                composite = composite.then(&step.map.to_mode(mode))?;
            }
            final_form = self.base.to_mode(mode);
            if !composite.is_identity() {
                final_form = strip_pluriharmonic_noise(transform_defining(&final_form, &composite)?);
            }
        }
        Ok(NormalizationTrace { class: self.class, initial: self.initial, steps: self.steps, final_form })
    }
}

/// `w' = (I − iB)·w − 2i·b·z` where `B` and `b` are the `u` and `z`
/// coefficients of the linear part; the image has no linear terms.
pub(crate) fn affine_normalization(m: &DefiningEquations) -> Result<Biholomorphism, NormalizeError> {
    let (n, c) = (m.n(), m.c());
    let mode = m.mode();
    let i = Scalar::i(mode);
    let two_i = &i * &Scalar::from_int(2, mode);
    let mut a = Matrix::identity(n + c, mode);
    for (j, s) in m.phi().iter().enumerate() {
        for k in 0..n {
            let b = s.coeff(&MultiIndex::unit(k, 1));
            a.set(n + j, k, -(&two_i * &b));
        }
        for l in 0..c {
            let b = s.coeff(&MultiIndex::unit(2 * n + l, 1));
            let v = a.get(n + j, n + l) - &(&i * &b);
            a.set(n + j, n + l, v);
        }
    }
    Ok(Biholomorphism::linear(n, c, &a, m.order())?)
}
