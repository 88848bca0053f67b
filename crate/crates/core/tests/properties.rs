//! Property tests for the invariants the spec guarantees over whole
//! parameter ranges rather than at example points.

use polsqueeze::*;
use proptest::prelude::*;

const PI: f64 = std::f64::consts::PI;

fn angle() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn squeezing() -> impl Strategy<Value = f64> {
    0.0..0.8f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn composite_is_unitary_with_normalized_coefficients(q in angle(), h in angle()) {
        let m = jones_hwp(h).unwrap().compose(&jones_qwp(q).unwrap());
        prop_assert!(m.unitarity_defect() < 1e-12);
        let s = compose_setting(q, h).unwrap();
        prop_assert!((s.tau.norm_sqr() + s.rho.norm_sqr() - 1.0).abs() < 1e-12);
        let e = s.direction;
        prop_assert!((e[0] * e[0] + e[1] * e[1] + e[2] * e[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hwp_squares_to_minus_identity(theta in angle()) {
        let h = jones_hwp(theta).unwrap();
        let sq = h.compose(&h).entries;
        prop_assert!((sq[0][0].re + 1.0).abs() < 1e-12 && sq[0][0].im.abs() < 1e-12);
        prop_assert!((sq[1][1].re + 1.0).abs() < 1e-12 && sq[1][1].im.abs() < 1e-12);
        prop_assert!(sq[0][1].norm() < 1e-12 && sq[1][0].norm() < 1e-12);
    }

    #[test]
    fn direction_has_hwp_period(q in angle(), h in angle()) {
        let a = compose_setting(q, h).unwrap().direction;
        let b = compose_setting(q, h + PI).unwrap().direction;
        for i in 0..3 {
            prop_assert!((a[i] - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn expectation_normalized_and_monotone(
        lam in squeezing(),
        phi in 0.0..(2.0 * PI),
        q in angle(),
        h in angle(),
        eta in 0.0..1.0f64,
    ) {
        let state = BellStateParams::from_real(lam, phi).unwrap();
        let det = DetectorConfig::new(8, eta).unwrap();
        let s = compose_setting(q, h).unwrap();
        prop_assert!((nexp_expectation(&state, &s, &det, 0, 0).unwrap() - 1.0).abs() < 1e-12);
        let mut prev_row = vec![1.0; 9];
        for ma in 0..=8 {
            let mut prev = f64::INFINITY;
            for mb in 0..=8 {
                let e = nexp_expectation(&state, &s, &det, ma, mb).unwrap();
                prop_assert!((0.0..=1.0).contains(&e));
                prop_assert!(e <= prev + 1e-15);
                prop_assert!(e <= prev_row[mb] + 1e-15);
                prev = e;
                prev_row[mb] = e;
            }
        }
    }

    #[test]
    fn expectation_exchange_symmetric(
        lam in squeezing(),
        phi in 0.0..(2.0 * PI),
        q in angle(),
        h in angle(),
        xa in 0.0..1.0f64,
        xd in 0.0..1.0f64,
    ) {
        let state = BellStateParams::from_real(lam, phi).unwrap();
        let s = compose_setting(q, h).unwrap();
        let a = nexp_expectation_general(&state, &s, xa, xd).unwrap();
        let b = nexp_expectation_general(&state, &s, xd, xa).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn click_tables_normalize(
        lam in squeezing(),
        phi in 0.0..(2.0 * PI),
        q in angle(),
        h in angle(),
        eta in 0.0..1.0f64,
    ) {
        let state = BellStateParams::from_real(lam, phi).unwrap();
        let det = DetectorConfig::new(8, eta).unwrap();
        let s = compose_setting(q, h).unwrap();
        let c = click_probabilities_analytic(&state, &s, &det).unwrap();
        prop_assert!((c.sum() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn round_trip_moments(
        lam in squeezing(),
        phi in 0.0..(2.0 * PI),
        q in angle(),
        h in angle(),
    ) {
        let state = BellStateParams::from_real(lam, phi).unwrap();
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let s = compose_setting(q, h).unwrap();
        let direct = pi_moments_analytic(&state, &s, &det).unwrap();
        let via = moments_from_statistics(
            &click_probabilities_analytic(&state, &s, &det).unwrap(),
            &det,
        )
        .unwrap();
        for ja in 0..=8 {
            for jb in 0..=8 {
                prop_assert!((direct.moment(ja, jb) - via.moment(ja, jb)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn coherent_states_stay_classical(mu_a in 0.0..6.0f64, mu_b in 0.0..6.0f64) {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let stats = coherent_click_statistics(mu_a, mu_b, &det).unwrap();
        let m = moments_from_statistics(&stats, &det).unwrap();
        prop_assert!(second_order_witness(&m, &det).unwrap().value >= -1e-10);
        prop_assert!(moment_matrix_m(&m, &det).unwrap().min_eigenvalue >= -1e-10);
        prop_assert!(moment_matrix_mprime(&m, &det).unwrap().min_eigenvalue >= -1e-10);
    }

    #[test]
    fn click_response_is_a_distribution(eta in 0.0..1.0f64, n in 0usize..150) {
        let det = DetectorConfig::new(8, eta).unwrap();
        let total: f64 = (0..=8).map(|k| click_response(k, n, &det)).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn beam_splitter_blocks_unitary(q in angle(), h in angle(), m in 0usize..8, n in 0usize..8) {
        let s = compose_setting(q, h).unwrap();
        let c = fock::beam_splitter_coefficients(s.tau, s.rho, m, n);
        let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sampling_is_deterministic_and_conserving(
        mu_a in 0.1..4.0f64,
        mu_b in 0.1..4.0f64,
        seed in any::<u64>(),
    ) {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let table = coherent_click_statistics(mu_a, mu_b, &det).unwrap();
        let a = sample(&table, 10_000, seed).unwrap();
        let b = sample(&table, 10_000, seed).unwrap();
        prop_assert_eq!(a.counts(), b.counts());
        prop_assert_eq!(a.counts().iter().sum::<u64>(), 10_000u64);
    }

    #[test]
    fn odd_moments_vanish_for_bell_states(
        lam in squeezing(),
        antisymmetric in any::<bool>(),
        q in angle(),
        h in angle(),
    ) {
        let phi = if antisymmetric { PI } else { 0.0 };
        let state = BellStateParams::from_real(lam, phi).unwrap();
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let s = compose_setting(q, h).unwrap();
        let m = pi_moments_analytic(&state, &s, &det).unwrap();
        let snl = s_nl_moments(&m, &det, 8).unwrap();
        for k in [1usize, 3, 5, 7] {
            prop_assert!(snl[k].abs() < 1e-9, "k={}: {}", k, snl[k]);
        }
    }
}
