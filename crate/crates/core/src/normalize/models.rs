//! The six model germs.

use super::ClassTag;
use crate::manifold::DefiningEquations;
use crate::scalar::{Mode, Scalar};
use crate::series::{MultiIndex, Signature, TruncatedSeries};

const E: Mode = Mode::Exact;

fn germ(n: usize, c: usize, order: i32, phis: &[&[(&[u32], Scalar)]]) -> DefiningEquations {
    let sig = Signature::real(n, c);
    let phi = phis.iter().map(|t| TruncatedSeries::from_exponents(sig.clone(), order, E, t)).collect();
    DefiningEquations::new(n, c, phi).expect("models are real")
}

/// `Σ coeff · z^p z̄^q` over the `n = 1` alphabet with `c` transverse slots.
fn zz_poly(c: usize, order: i32, terms: &[(u32, u32, Scalar)]) -> TruncatedSeries {
    let sig = Signature::real(1, c);
    let terms = terms.iter().map(|(p, q, v)| {
        let mut e = vec![0; 2 + c];
        e[0] = *p;
        e[1] = *q;
        (MultiIndex::new(&e), v.clone())
    });
    TruncatedSeries::from_terms(sig, order, E, terms)
}

/// The model of `tag` as exact graphing series through `order`. Class IV₁
/// uses the positive sign; see [`model_iv1`].
pub fn model(tag: ClassTag, order: i32) -> DefiningEquations {
    let int = |k| Scalar::from_int(k, E);
    let levi = |c| zz_poly(c, order, &[(1, 1, int(1))]);
    let cubic = |c| zz_poly(c, order, &[(2, 1, int(1)), (1, 2, int(1))]);
    let n1 = |phi: Vec<TruncatedSeries>| DefiningEquations::new(1, phi.len(), phi).expect("models are real");
    match tag {
        ClassTag::I => n1(vec![levi(1)]),
        ClassTag::II => n1(vec![levi(2), cubic(2)]),
        ClassTag::III1 => {
            let i = Scalar::i(E);
            n1(vec![levi(3), cubic(3), zz_poly(3, order, &[(2, 1, i.clone()), (1, 2, -i)])])
        }
        ClassTag::III2 => n1(vec![levi(3), cubic(3), zz_poly(3, order, &[(3, 1, int(2)), (1, 3, int(2)), (2, 2, int(3))])]),
        ClassTag::IV1 => model_iv1(1, order),
        ClassTag::IV2 => model_iv2(order),
    }
}

/// `v = z₁z̄₁ + sign·z₂z̄₂`.
pub fn model_iv1(sign: i32, order: i32) -> DefiningEquations {
    let s = if sign < 0 { -1 } else { 1 };
    germ(2, 1, order, &[&[(&[1, 0, 1, 0, 0], Scalar::one(E)), (&[0, 1, 0, 1, 0], Scalar::from_int(s, E))]])
}

/// `(z₁z̄₁ + ½z₁²z̄₂ + ½z₂z̄₁²) / (1 − z₂z̄₂)` expanded through `order`.
fn model_iv2(order: i32) -> DefiningEquations {
    let sig = Signature::real(2, 1);
    let half = Scalar::ratio(1, 2, E);
    let num = TruncatedSeries::from_exponents(
        sig.clone(),
        order,
        E,
        &[(&[1, 0, 1, 0, 0], Scalar::one(E)), (&[2, 0, 0, 1, 0], half.clone()), (&[0, 1, 2, 0, 0], half)],
    );
    let den = TruncatedSeries::from_exponents(
        sig,
        order,
        E,
        &[(&[0, 0, 0, 0, 0], Scalar::one(E)), (&[0, 1, 0, 1, 0], Scalar::from_int(-1, E))],
    );
    let phi = num.div(&den).expect("unit denominator").truncate(order);
    DefiningEquations::new(2, 1, vec![phi]).expect("model is real")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_match_tags() {
        for tag in ClassTag::ALL {
            let m = model(tag, 6);
            assert_eq!((m.n(), m.c()), tag.shape());
            assert!(m.is_pluriharmonic_free());
            assert_eq!(m.order(), 6);
        }
    }

    #[test]
    fn iii2_third_component() {
        let m = model(ClassTag::III2, 8);
        let v3 = &m.phi()[2];
        assert_eq!(v3.coeff_of(&[3, 1, 0, 0, 0]), Scalar::from_int(2, E));
        assert_eq!(v3.coeff_of(&[2, 2, 0, 0, 0]), Scalar::from_int(3, E));
        assert_eq!(v3.len(), 3);
    }

    #[test]
    fn iv2_geometric_expansion() {
        // Series-division oracle: the numerator times Σ (z₂z̄₂)^k.
        let m = model(ClassTag::IV2, 6);
        let phi = &m.phi()[0];
        let half = Scalar::ratio(1, 2, E);
        let one = Scalar::one(E);
        let expected: &[(&[u32], Scalar)] = &[
            (&[1, 0, 1, 0, 0], one.clone()),
            (&[2, 0, 0, 1, 0], half.clone()),
            (&[0, 1, 2, 0, 0], half.clone()),
            (&[1, 1, 1, 1, 0], one.clone()),
            (&[2, 1, 0, 2, 0], half.clone()),
            (&[0, 2, 2, 1, 0], half.clone()),
            (&[1, 2, 1, 2, 0], one),
        ];
        for (e, v) in expected {
            assert_eq!(&phi.coeff_of(e), v, "{e:?}");
        }
        assert_eq!(phi.len(), expected.len());
    }

    #[test]
    fn iv1_signs() {
        let m = model_iv1(-1, 4);
        assert_eq!(m.phi()[0].coeff_of(&[0, 1, 0, 1, 0]), Scalar::from_int(-1, E));
    }
}
