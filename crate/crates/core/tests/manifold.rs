mod common;

use common::{random_degree_two_map, random_germ, SHAPES};
use crforge_core::manifold::{
    check_reality, is_mixed, remove_pluriharmonic, solve_theta, solve_theta_conjugate, transform_defining,
    verify_theta_identities,
};
use crforge_core::Mode;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn theta_identities_and_conjugate_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (n, c) in SHAPES {
        for _ in 0..8 {
            let m = random_germ(&mut rng, n, c, 5, 3, 0.3);
            let g = solve_theta(&m).unwrap();
            assert_eq!(verify_theta_identities(&g).unwrap(), None, "({n}, {c})");
            let under = solve_theta_conjugate(&m).unwrap();
            for (a, b) in under.iter().zip(g.conjugate()) {
                assert!(a.eq_to_shared_order(&b));
            }
        }
    }
}

#[test]
fn pluriharmonic_removal_is_exact_and_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for (n, c) in SHAPES {
        for _ in 0..6 {
            let m = random_germ(&mut rng, n, c, 5, 3, 0.3);
            let out = remove_pluriharmonic(&m).unwrap();
            assert!(out.result.phi().iter().all(|s| s.terms().all(|(k, _)| is_mixed(k, n))));
            assert!(check_reality(&out.result));
            let replayed = transform_defining(&m, &out.composite).unwrap();
            for (a, b) in replayed.phi().iter().zip(out.result.phi()) {
                assert!(a.eq_to_shared_order(b), "({n}, {c})");
            }
            assert_eq!(remove_pluriharmonic(&out.result).unwrap().result, out.result);
        }
    }
}

#[test]
fn transform_then_inverse_returns_the_germ() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for (n, c) in SHAPES {
        for _ in 0..3 {
            // Exact rationals grow quickly under composition; float keeps this fast.
            let m = random_germ(&mut rng, n, c, 5, 3, 0.3).to_mode(Mode::float());
            let h = random_degree_two_map(&mut rng, n, c, 5).to_mode(Mode::float());
            let there = transform_defining(&m, &h).unwrap();
            assert!(check_reality(&there));
            let back = transform_defining(&there, &h.inverse().unwrap()).unwrap();
            for (a, b) in back.phi().iter().zip(m.phi()) {
                assert!(a.approx_eq(b, 1e-9, m.order() - 1), "({n}, {c})");
            }
        }
    }
}
