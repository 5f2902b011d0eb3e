mod common;

use common::{cramer_coefficients, q, random_germ, SHAPES};
use crforge_core::frames::{
    class32_determinant, eval_at_origin, levi_determinant, levi_matrix, tangent_generators,
};
use crforge_core::normalize::model;
use crforge_core::ClassTag;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn linear_solve_matches_determinant_quotients() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (n, c) in SHAPES {
        for _ in 0..10 {
            let m = random_germ(&mut rng, n, c, 5, 3, 0.3);
            let oracle = cramer_coefficients(&m);
            for (k, field) in tangent_generators(&m).unwrap().iter().enumerate() {
                for l in 0..c {
                    let a = field.u_coeff(l);
                    assert_eq!(a.first_difference(&oracle[k][l], m.order() - 1), None, "({n}, {c}) k={k} l={l}");
                }
            }
        }
    }
}

#[test]
fn origin_levi_matrix_is_the_constant_term_of_the_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..10 {
        let m = random_germ(&mut rng, 2, 1, 5, 3, 0.4);
        let l = levi_matrix(&m).unwrap();
        let entries = l.origin.entries();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(l.series[a][b].constant_term(), entries[a][b]);
            }
        }
    }
}

#[test]
fn identical_vanishings_of_the_models() {
    let det = levi_determinant(&model(ClassTag::IV2, 8).phi()[0]).unwrap();
    assert!(det.order() >= 5);
    assert_eq!(det.lowest_degree_within(5), None);
    let det = class32_determinant(&model(ClassTag::III2, 8)).unwrap();
    assert_eq!(det.lowest_degree_within(det.order()), None);
    assert_eq!(class32_determinant(&model(ClassTag::III1, 6)).unwrap().constant_term(), q(64, 1));
}

#[test]
fn generators_have_unit_holomorphic_coefficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for (n, c) in SHAPES {
        let m = random_germ(&mut rng, n, c, 5, 3, 0.3);
        for (k, field) in tangent_generators(&m).unwrap().iter().enumerate() {
            let origin = eval_at_origin(field);
            for (d, v) in origin.iter().enumerate().take(2 * n) {
                assert_eq!(*v, q((d == k) as i64, 1));
            }
        }
    }
}
