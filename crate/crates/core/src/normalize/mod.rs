//! Elementary normal forms of the six general classes.
//!
//! Each pipeline is a recorded sequence of biholomorphisms applied through
//! [`transform_defining`]; the trace replays from its initial germ. Inputs are
//! first affine normalized and stripped of pluriharmonic terms.

mod classes;
mod congruence;
mod models;
mod pipeline;
mod report;

use std::fmt;
use std::str::FromStr;

use crate::frames::FrameError;
use crate::manifold::{strip_pluriharmonic_noise, transform_defining, Biholomorphism, DefiningEquations, ManifoldError};
use crate::series::SeriesError;

pub use classes::{
    normalize, normalize_class_i, normalize_class_ii, normalize_class_iii1, normalize_class_iii2,
    normalize_class_iv1, normalize_class_iv2,
};
pub use congruence::{hermitian_congruence_normalize, Congruence};
pub use models::{model, model_iv1};
pub use report::{assert_normal_form, assert_normal_form_with_tol, NormalFormReport};
pub(crate) use pipeline::affine_normalization;
pub(crate) use report::{first_nonvanishing, first_nonvanishing_scaled};

/// The six general classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassTag {
    I,
    II,
    III1,
    III2,
    IV1,
    IV2,
}

impl ClassTag {
    pub const ALL: [ClassTag; 6] = [ClassTag::I, ClassTag::II, ClassTag::III1, ClassTag::III2, ClassTag::IV1, ClassTag::IV2];

    /// `(n, c)` of germs in the class.
    pub fn shape(self) -> (usize, usize) {
        match self {
            ClassTag::I => (1, 1),
            ClassTag::II => (1, 2),
            ClassTag::III1 | ClassTag::III2 => (1, 3),
            ClassTag::IV1 | ClassTag::IV2 => (2, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::I => "I",
            ClassTag::II => "II",
            ClassTag::III1 => "III1",
            ClassTag::III2 => "III2",
            ClassTag::IV1 => "IV1",
            ClassTag::IV2 => "IV2",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Truncation order used when none is given: 8 for `(n, c) = (1, 3)`, whose
/// class-III₂ conditions reach weighted degree 4, and 6 otherwise.
pub fn default_order(n: usize, c: usize) -> i32 {
    if (n, c) == (1, 3) {
        8
    } else {
        6
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown class tag {0:?}")]
pub struct UnknownClassTag(pub String);

impl FromStr for ClassTag {
    type Err = UnknownClassTag;

    /// Accepts `III1`, `III_1`, `III₁` and lower case.
    fn from_str(s: &str) -> Result<ClassTag, UnknownClassTag> {
        let key: String = s
            .trim()
            .chars()
            .filter(|ch| *ch != '_' && *ch != '(' && *ch != ')')
            .map(|ch| match ch {
                '₁' => '1',
                '₂' => '2',
                other => other.to_ascii_uppercase(),
            })
            .collect();
        ClassTag::ALL
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| UnknownClassTag(s.to_string()))
    }
}

/// A failed defining condition of a class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    /// The germ has the wrong `(n, c)`.
    Shape { expected: (usize, usize), got: (usize, usize) },
    /// Every `zz̄` coefficient vanishes: `[L, L̄]` is tangent at the origin.
    LeviFormZero,
    /// `[L, [L, L̄]]` adds no direction at the origin.
    Alpha2Zero,
    /// `[L̄, [L, L̄]]` adds no direction at the origin: the 3×3 bracket
    /// determinant vanishes.
    B3Zero,
    /// The class-III₂ degeneracy determinant is nonzero at this degree.
    DegeneracyNonvanishing { degree: u32 },
    /// `[L, [L, [L, L̄]]]` adds no direction at the origin.
    C3Zero,
    /// The Levi matrix at the origin has the wrong rank.
    LeviRank { expected: usize, got: usize },
    /// The Levi determinant is nonzero at this degree.
    LeviDeterminantNonvanishing { degree: u32 },
    /// The Freeman value vanishes.
    FreemanDegenerate,
}

impl Condition {
    /// Stable machine-readable name.
    pub fn key(&self) -> &'static str {
        match self {
            Condition::Shape { .. } => "shape",
            Condition::LeviFormZero => "levi-form-zero",
            Condition::Alpha2Zero => "second-bracket-dependent",
            Condition::B3Zero => "bracket-determinant-zero",
            Condition::DegeneracyNonvanishing { .. } => "degeneracy-determinant-nonvanishing",
            Condition::C3Zero => "third-bracket-dependent",
            Condition::LeviRank { .. } => "levi-rank",
            Condition::LeviDeterminantNonvanishing { .. } => "levi-determinant-nonvanishing",
            Condition::FreemanDegenerate => "freeman-degenerate",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Shape { expected, got } => write!(f, "shape: (n, c) = {got:?}, class needs {expected:?}"),
            Condition::LeviFormZero => write!(f, "levi-form-zero: [L, Lbar] is tangent at the origin"),
            Condition::Alpha2Zero => write!(f, "second-bracket-dependent: [L, [L, Lbar]] adds no direction"),
            Condition::B3Zero => write!(f, "bracket-determinant-zero: [Lbar, [L, Lbar]] adds no direction"),
            Condition::DegeneracyNonvanishing { degree } => {
                write!(f, "degeneracy-determinant-nonvanishing: nonzero in degree {degree}")
            }
            Condition::C3Zero => write!(f, "third-bracket-dependent: [L, [L, [L, Lbar]]] adds no direction"),
            Condition::LeviRank { expected, got } => write!(f, "levi-rank: rank {got} at the origin, expected {expected}"),
            Condition::LeviDeterminantNonvanishing { degree } => {
                write!(f, "levi-determinant-nonvanishing: nonzero in degree {degree}")
            }
            Condition::FreemanDegenerate => write!(f, "freeman-degenerate: Freeman value vanishes"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum NormalizeError {
    #[error("not in class {class}: {condition}")]
    NotInClass { class: ClassTag, condition: Condition },
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

impl From<SeriesError> for NormalizeError {
    fn from(e: SeriesError) -> Self {
        NormalizeError::Manifold(ManifoldError::Series(e))
    }
}

impl NormalizeError {
    /// The failed class condition, if that is the cause.
    pub fn condition(&self) -> Option<&Condition> {
        match self {
            NormalizeError::NotInClass { condition, .. } => Some(condition),
            _ => None,
        }
    }
}

/// One recorded change of coordinates.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub description: String,
    pub map: Biholomorphism,
}

/// Steps applied in order to `initial` produce `final_form`.
#[derive(Clone, Debug)]
pub struct NormalizationTrace {
    pub class: ClassTag,
    pub initial: DefiningEquations,
    pub steps: Vec<TraceStep>,
    pub final_form: DefiningEquations,
}

impl NormalizationTrace {
    /// Replays the steps from `initial`. An identity step whose mode differs
    /// from the current germ switches arithmetic.
    pub fn replay(&self) -> Result<DefiningEquations, ManifoldError> {
        let mut m = self.initial.clone();
        for step in &self.steps {
            m = if step.map.is_identity() {
                m.to_mode(m.mode().join(step.map.mode()))
            } else {
                strip_pluriharmonic_noise(transform_defining(&m, &step.map)?)
            };
        }
        Ok(m)
    }

    /// `true` if the trace performs no change of coordinates.
    pub fn is_identity(&self) -> bool {
        self.steps.iter().all(|s| s.map.is_identity())
    }

    /// The composite `initial → final_form` map.
    pub fn composite(&self) -> Result<Biholomorphism, ManifoldError> {
        let (n, c) = (self.initial.n(), self.initial.c());
        let mut acc = Biholomorphism::identity(n, c, self.final_form.order(), self.initial.mode());
        for step in &self.steps {
            acc = acc.then(&step.map)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_aliases_parse() {
        assert_eq!("III1".parse(), Ok(ClassTag::III1));
        assert_eq!("iii_2".parse(), Ok(ClassTag::III2));
        assert_eq!("IV₂".parse(), Ok(ClassTag::IV2));
        assert_eq!("(II)".parse(), Ok(ClassTag::II));
        assert!("V".parse::<ClassTag>().is_err());
    }

    #[test]
    fn condition_display_starts_with_key() {
        let all = [
            Condition::Shape { expected: (1, 1), got: (2, 1) },
            Condition::LeviFormZero,
            Condition::Alpha2Zero,
            Condition::B3Zero,
            Condition::DegeneracyNonvanishing { degree: 1 },
            Condition::C3Zero,
            Condition::LeviRank { expected: 2, got: 1 },
            Condition::LeviDeterminantNonvanishing { degree: 1 },
            Condition::FreemanDegenerate,
        ];
        for c in all {
            assert!(c.to_string().starts_with(c.key()), "{c}");
        }
    }
}
