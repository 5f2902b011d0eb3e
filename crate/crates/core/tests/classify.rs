mod common;

use common::{germ, q};
use crforge_core::classify::{classify, classify_with, ClassifyError, ClassifyOptions};
use crforge_core::linalg::Matrix;
use crforge_core::manifold::{transform_defining, Biholomorphism};
use crforge_core::normalize::{model, model_iv1, Condition};
use crforge_core::{ClassTag, Mode, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn models_classify_as_themselves() {
    for order in [5, 6, 8] {
        for tag in ClassTag::ALL {
            let r = classify(&model(tag, order)).unwrap();
            assert_eq!(r.class, Some(tag), "order {order}: {:?}", r.failed);
            assert_eq!(r.order_used, order);
        }
    }
    assert_eq!(classify(&model_iv1(-1, 6)).unwrap().class, Some(ClassTag::IV1));
}

#[test]
fn evidence_of_the_models() {
    let r = classify(&model(ClassTag::III2, 8)).unwrap();
    let ranks: Vec<usize> = r.ranks.iter().map(|e| e.rank).collect();
    assert_eq!(ranks, [3, 4, 4, 5]);
    let det = r.determinant.unwrap();
    assert_eq!((det.first_nonzero, det.reliable_order), (None, 5));

    let r = classify(&model(ClassTag::IV2, 6)).unwrap();
    assert_eq!(r.levi_rank, Some(1));
    assert_eq!(r.freeman_value, Some(q(-1, 1)));
    assert!(r.note.contains("origin only"));
}

#[test]
fn levi_degenerate_hypersurface() {
    let r = classify(&germ(1, 1, 6, &[&[(&[2, 2, 0], q(1, 1))]])).unwrap();
    assert_eq!(r.class, None);
    assert_eq!(r.failed, [Condition::LeviFormZero]);
}

#[test]
fn cubic_truncation_of_the_freeman_model() {
    // Freeman nondegenerate, but without the adapted remainder the Levi
    // determinant is nonzero in degree 2.
    let m = germ(2, 1, 6, &[&[(&[1, 0, 1, 0, 0], q(1, 1)), (&[2, 0, 0, 1, 0], q(1, 1)), (&[0, 1, 2, 0, 0], q(1, 1))]]);
    let r = classify(&m).unwrap();
    assert_eq!(r.freeman_value, Some(q(-2, 1)));
    assert_eq!(r.class, None);
    assert_eq!(r.failed, [Condition::LeviDeterminantNonvanishing { degree: 2 }]);
}

#[test]
fn freeman_degenerate_hypersurface() {
    let r = classify(&germ(2, 1, 6, &[&[(&[1, 0, 1, 0, 0], q(1, 1))]])).unwrap();
    assert_eq!(r.class, None);
    assert_eq!(r.failed, [Condition::FreemanDegenerate]);
}

#[test]
fn off_diagonal_levi_form_is_iv1() {
    let r = classify(&germ(2, 1, 6, &[&[(&[1, 0, 0, 1, 0], q(1, 1)), (&[0, 1, 1, 0, 0], q(1, 1))]])).unwrap();
    assert_eq!((r.class, r.levi_rank), (Some(ClassTag::IV1), Some(2)));
}

#[test]
fn duplicated_cubic_components() {
    let cubic: &[(&[u32], Scalar)] = &[(&[2, 1, 0, 0, 0], q(1, 1)), (&[1, 2, 0, 0, 0], q(1, 1))];
    let m = germ(1, 3, 6, &[&[(&[1, 1, 0, 0, 0], q(1, 1))], cubic, cubic]);
    let r = classify(&m).unwrap();
    assert_eq!(r.class, None);
    assert_eq!(r.failed, [Condition::C3Zero]);
}

#[test]
fn linear_terms_are_normalized_first() {
    let m = germ(1, 1, 6, &[&[(&[1, 0, 0], q(1, 1)), (&[0, 1, 0], q(1, 1)), (&[1, 1, 0], q(1, 1))]]);
    assert_eq!(classify(&m).unwrap().class, Some(ClassTag::I));
}

#[test]
fn reality_violation_is_an_error() {
    let sig = crforge_core::Signature::real(1, 1);
    let phi = crforge_core::TruncatedSeries::from_exponents(sig, 6, Mode::Exact, &[(&[2, 0, 0], q(1, 1))]);
    let m = crforge_core::DefiningEquations::from_raw(1, 1, vec![phi]).unwrap();
    assert!(matches!(classify(&m), Err(ClassifyError::Reality { j: 0, .. })));
}

fn random_real_w_map(rng: &mut impl Rng, n: usize, c: usize, order: i32) -> Biholomorphism {
    loop {
        let mut a = Matrix::identity(n + c, Mode::Exact);
        for i in n..n + c {
            for j in n..n + c {
                a.set(i, j, q(rng.gen_range(-3..=3), 2));
            }
        }
        if let Ok(h) = Biholomorphism::linear(n, c, &a, order) {
            if !a.det(Mode::Exact).is_zero_tol(0.0) {
                return h;
            }
        }
    }
}

#[test]
fn tag_is_invariant_under_real_linear_w_changes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for tag in ClassTag::ALL {
        let order = if tag == ClassTag::III2 { 8 } else { 6 };
        let (n, c) = tag.shape();
        for _ in 0..3 {
            let h = random_real_w_map(&mut rng, n, c, order);
            let m = transform_defining(&model(tag, order), &h).unwrap();
            assert_eq!(classify(&m).unwrap().class, Some(tag));
        }
    }
}

#[test]
fn sampled_points_keep_the_tag_of_perturbed_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let opts = ClassifyOptions { sample_points: 3 };
    for tag in ClassTag::ALL {
        let order = if tag == ClassTag::III2 { 8 } else { 6 };
        let (n, c) = tag.shape();
        let h = common::random_degree_two_map(&mut rng, n, c, order).to_mode(Mode::float());
        let m = transform_defining(&model(tag, order).to_mode(Mode::float()), &h).unwrap();
        let r = classify_with(&m, &opts).unwrap();
        assert_eq!(r.class, Some(tag), "{:?} {:?}", r.failed, r.samples);
        assert!(r.samples.iter().all(|s| s.failed.is_empty()));
    }
}
