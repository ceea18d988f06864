#![allow(clippy::needless_range_loop)]

use freebeta_core::distributions::{cauchy_eval, exact_moments, fbp_closed_form_moments, standardize_to_meixner, Family};
use freebeta_core::fock::{build_operator, vacuum_moments};
use freebeta_core::ncl::{fbp_moment, gamma_closed_series, gamma_poly, gamma_quadratic_residual, GammaRoute};
use freebeta_core::randmat::{ks_distance, symmetric_eigenvalues, SquareMatrix};
use freebeta_core::rational::{rat, Rational};
use num_complex::Complex64;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_rational(lo: i64, hi: i64) -> impl Strategy<Value = Rational> {
    (lo..=hi, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn fbp_params() -> impl Strategy<Value = (Rational, Rational)> {
    (small_rational(1, 12), small_rational(5, 16)).prop_filter("b > 1", |(_, b)| *b > Rational::one())
}

fn upper_half_plane() -> impl Strategy<Value = Complex64> {
    (-6.0f64..6.0, 0.01f64..6.0).prop_map(|(x, y)| Complex64::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn partition_sum_matches_closed_form((a, b) in fbp_params()) {
        let closed = fbp_closed_form_moments(&a, &b, 6).unwrap();
        for n in 1..=6 {
            prop_assert_eq!(&fbp_moment(&a, &b, n).unwrap(), closed.get(n));
        }
    }

    #[test]
    fn fock_vacuum_moments_count_weighted_partitions(
        al in small_rational(-4, 6), be in small_rational(-4, 6), ga in small_rational(-4, 6)
    ) {
        let m = vacuum_moments(&build_operator(&al, &be, &ga, 6).unwrap(), 6).unwrap();
        for n in 1..=6 {
            prop_assert_eq!(&m[n], &gamma_poly(n, &al, &be, &ga, GammaRoute::ContinuedFraction).unwrap());
        }
    }

    #[test]
    fn closed_generating_function_solves_quadratic(
        al in small_rational(-4, 6), be in small_rational(-4, 6), ga in small_rational(-4, 6)
    ) {
        let g = gamma_closed_series(7, &al, &be, &ga).unwrap();
        prop_assert!(gamma_quadratic_residual(&g, &al, &be, &ga).is_zero());
        prop_assert_eq!(g.coeff(5), &gamma_poly(5, &al, &be, &ga, GammaRoute::Brute).unwrap());
    }

    #[test]
    fn meixner_discriminant((a, b) in fbp_params()) {
        let p = standardize_to_meixner(&a, &b).unwrap();
        let one = Rational::one();
        prop_assert_eq!(p.discriminant, (&b - &one) / (&a * (&a + &b - &one)));
        prop_assert!(p.theta > 0.0 && p.tau > 0.0);
    }

    #[test]
    fn cauchy_transforms_are_nevanlinna((a, b) in fbp_params(), z in upper_half_plane()) {
        for f in [
            Family::free_beta_prime(a.clone(), b.clone()).unwrap(),
            Family::free_f(a.clone(), b.clone()).unwrap(),
            Family::free_t(b.clone()).unwrap(),
            Family::free_poisson(a.clone()).unwrap(),
            Family::inverse_free_poisson(b.clone()).unwrap(),
        ] {
            let g = cauchy_eval(&f, z).unwrap();
            prop_assert!(g.im < 0.0, "{} at {}: {}", f, z, g);
            prop_assert!(g.norm() <= 1.0 / z.im * (1.0 + 1e-12), "{} at {}: {}", f, z, g);
        }
    }

    #[test]
    fn free_t_is_symmetric((_, m) in fbp_params()) {
        let mo = exact_moments(&Family::free_t(m).unwrap(), 7).unwrap();
        for k in (1..=7).step_by(2) {
            prop_assert!(mo.get(k).is_zero());
        }
    }

    #[test]
    fn eigenvalues_preserve_trace_and_frobenius(entries in proptest::collection::vec(-5.0f64..5.0, 36)) {
        let mut sym = vec![0.0; 36];
        for i in 0..6 {
            for j in 0..6 {
                sym[i * 6 + j] = entries[i * 6 + j] + entries[j * 6 + i];
            }
        }
        let m = SquareMatrix::from_rows(6, sym.clone());
        let ev = symmetric_eigenvalues(&m);
        let trace: f64 = (0..6).map(|i| sym[i * 7]).sum();
        let frob: f64 = sym.iter().map(|x| x * x).sum();
        prop_assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-10);
        prop_assert!((ev.iter().map(|x| x * x).sum::<f64>() - frob).abs() < 1e-9 * (1.0 + frob));
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn ks_distance_is_a_probability(sample in proptest::collection::vec(-1.0f64..8.0, 1..40)) {
        let f = Family::free_f(rat(2, 1), rat(3, 1)).unwrap();
        let d = ks_distance(&sample, &f).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }
}
