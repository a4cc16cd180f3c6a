mod common;

use common::*;
use npk_core::catalog;
use npk_core::curvature::curvature_suite;
use npk_core::frame::random_isometry;
use npk_core::homogeneous::HomogeneousPoint;
use npk_core::linalg;
use npk_core::report::Report;
use npk_core::scalar::{rat, Backend, Rational};
use npk_core::threeform::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn config() -> Config {
    Config { cases: 100, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

fn signs(n: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], n)
}

fn nonzero() -> impl Strategy<Value = Rational> {
    (1i64..=9, 1i64..=5, any::<bool>()).prop_map(|(n, d, neg)| rat(if neg { -n } else { n }, d))
}

fn random_signs(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<i8> {
    (0..n).map(|_| if rng.gen_bool(p) { 1 } else { -1 }).collect()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn r_commutes_with_j_and_is_self_adjoint(half in 3usize..=5, seed in any::<u64>(), density in 0.2f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps = random_signs(&mut rng, half, 0.7);
        let f = random_type_form(&mut rng, &eps, density);
        let sp = r_from_threeform(&f, TOL).unwrap();
        prop_assert!(linalg::is_zero_mat(&linalg::commutator(&f.j, &sp.r)));
        let gr = linalg::mat_mul(&f.g, &sp.r);
        prop_assert_eq!(gr.clone(), gr.transpose());
        prop_assert_eq!(sp.symmetry_residual, 0.0);
        prop_assert_eq!(sp.j_residual, 0.0);
    }

    #[test]
    fn support_is_complex_and_at_least_three_dimensional(half in 3usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps = random_signs(&mut rng, half, 0.6);
        let f = random_type_form(&mut rng, &eps, 0.3);
        prop_assume!(!f.is_zero());
        let s = support_kernel(&f, TOL).unwrap();
        prop_assert!(s.j_invariant);
        prop_assert_eq!(s.dim_support % 2, 0);
        prop_assert!(s.dim_support >= 6);
    }

    #[test]
    fn normal_form_round_trip_is_exact(
        eps in signs(5),
        a in nonzero(),
        b in nonzero(),
        second in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let mut e5 = [0i8; 5];
        e5.copy_from_slice(&eps);
        if second {
            e5[2] = -e5[0];
        }
        let shape = if second { second_shape(e5, a, b) } else { first_shape(e5, a, b) };
        prop_assume!(form_length(&shape).unwrap() != rat(0, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (frame, _) = phase_frame(&mut rng, &e5);
        let f = shape.in_frame(&frame, TOL).unwrap();
        let nf = normal_form_dim10_auto(&f, TOL).unwrap();
        prop_assert_eq!(nf.backend(), Backend::Exact);
        prop_assert!(nf.reconstruction().pass);
        prop_assert_eq!(nf.reconstruction().residual, 0.0);
        let Dim10NormalForm::Exact(x) = nf else { unreachable!() };
        let rebuilt = ThreeForm::from_assignments(&x.eps, f.j.clone(), &x.assignments()).unwrap();
        let back = rebuilt.in_frame(&linalg::inverse(&x.basis, 0.0).unwrap(), TOL).unwrap();
        prop_assert!(back.eta.sub(&f.eta).is_zero());
    }

    #[test]
    fn residuals_are_invariant_under_frame_isometries(model in 0usize..3, seed in any::<u64>()) {
        let id = ["su3-flag", "gxg-su2", "gxg-sl2r"][model];
        let hp = HomogeneousPoint::<f64>::new(&catalog::load(id).unwrap().model).unwrap();
        let b = random_isometry(&hp.point.g, &hp.point.j, seed).unwrap();
        let moved = hp.point.change_basis(&b).unwrap();
        let mut r0 = Report::new(id, Backend::Float);
        let mut r1 = Report::new(id, Backend::Float);
        curvature_suite(&hp.point, TOL, &mut r0);
        curvature_suite(&moved, TOL, &mut r1);
        prop_assert_eq!(r0.checks.len(), r1.checks.len());
        for (c0, c1) in r0.checks.iter().zip(&r1.checks) {
            prop_assert!((c0.residual - c1.residual).abs() <= 1e-12, "{}: {} vs {}", c0.name, c0.residual, c1.residual);
            prop_assert_eq!(c0.pass, c1.pass);
        }
    }
}
