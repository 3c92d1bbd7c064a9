use gale_core::betti::{g_poly, g_poly_recursive, h_poly, h_poly_recursive};
use gale_core::lattice::{fiber_poincare, is_generic, random_generic_theta, FiberEngine, StanleyEngine};
use gale_core::poly::g_from_h;
use gale_core::ringstr::compare_to_g;
use gale_core::{Budget, Error, IntPoly, MultMatrix, SubMultigraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance() -> impl Strategy<Value = MultMatrix> {
    (2usize..=4).prop_flat_map(|k| {
        proptest::collection::vec(1u32..=3, k * (k - 1) / 2).prop_map(move |u| MultMatrix::from_upper(k, &u).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn methods_agree(r in instance()) {
        let b = Budget::DEFAULT;
        let engine = StanleyEngine::new(b);
        let g = g_poly(&r, b).unwrap();
        let h = h_poly(&r, b).unwrap();
        prop_assert_eq!(&g_poly_recursive(&r), &g);
        prop_assert_eq!(&engine.g_instance(&r).unwrap(), &g);
        prop_assert_eq!(&g_from_h(&h, r.dim()).unwrap(), &g);
        prop_assert_eq!(&h_poly_recursive(&r), &h);
        prop_assert_eq!(&engine.h_instance(&r).unwrap(), &h);
        prop_assert!(h.is_palindromic());
        prop_assert_eq!(h.degree(), Some(r.n() - r.k()));
        prop_assert!(g.has_nonnegative_coeffs() && h.has_nonnegative_coeffs());
    }

    #[test]
    fn polytope_fiber_is_g_in_t_squared(r in instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = random_generic_theta(&r, 5, &mut rng);
        let rep = fiber_poincare(&r, &SubMultigraph::empty(r.k()), &theta, Budget::DEFAULT).unwrap();
        prop_assert_eq!(rep.poincare.as_ref(), &g_poly_recursive(&r).in_t_squared());
        prop_assert!(rep.small_ok);
    }

    #[test]
    fn polynomial_json_round_trip(c in proptest::collection::vec(-50i64..50, 0..8)) {
        let p = IntPoly::from_i64s(&c);
        let s = serde_json::to_string(&p).unwrap();
        let back: IntPoly = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn hilbert_function_small_instances() {
    for upper in [[1, 1, 3], [3, 1, 1], [2, 3, 1]] {
        let r = MultMatrix::from_upper(3, &upper).unwrap();
        assert!(compare_to_g(&r, Budget::DEFAULT).unwrap().matches_g, "{r}");
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(matches!(MultMatrix::from_upper(0, &[]), Err(Error::InvalidInput(_))));
    assert!(matches!(MultMatrix::from_upper(3, &[1, 1]), Err(Error::InvalidInput(_))));
    assert!(matches!(MultMatrix::from_upper(2, &[0]), Err(Error::InvalidInput(_))));
    let r = MultMatrix::all_ones(3);
    assert!(matches!(is_generic(&r, &[1, -1]), Err(Error::InvalidInput(_))));
    assert!(matches!(is_generic(&r, &[1, 1, 1]), Err(Error::InvalidInput(_))));
    let wall = is_generic(&r, &[1, -1, 0]).unwrap();
    assert!(!wall.is_generic());
    assert!(matches!(FiberEngine::new(&r, &wall, Budget::DEFAULT), Err(Error::NonGeneric(_))));
    assert!(matches!(g_poly(&MultMatrix::all_ones(5), Budget(10)), Err(Error::BudgetExceeded { .. })));
}
