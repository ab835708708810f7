use core::f64::consts::{PI, TAU};

use proptest::prelude::*;
use ramsey_core::squeezing::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn analytic_moments_match_state_vector(n in 2usize..=200, mu in -1.5f64..1.5) {
        let a = oat_moments(n as f64, mu).unwrap();
        let b = dicke_oracle(n, &oat_sequence(mu)).unwrap().moments();
        let j = n as f64 / 2.0;
        let tol = 1e-8 * j * (j + 1.0);
        prop_assert!((a.mean_x - b.mean_x).abs() <= tol);
        prop_assert!((a.var_y - b.var_y).abs() <= tol);
        prop_assert!((a.var_z - b.var_z).abs() <= tol);
        prop_assert!((a.cov_yz - b.cov_yz).abs() <= tol);
        prop_assert!((a.var_x - b.var_x).abs() <= tol);
    }

    #[test]
    fn untwisted_state_sits_at_sql(n in 2.0f64..1e8, phi in -PI..PI) {
        let m = oat_moments(n, 0.0).unwrap();
        prop_assert!((m.mean_x - n / 2.0).abs() <= 1e-12 * n);
        prop_assert!((m.var_z - n / 4.0).abs() <= 1e-12 * n);
        // Normalised to the SQL, so the floor is one.
        prop_assert!(m.normalized_sensitivity(phi) >= 1.0 - 1e-9);
    }

    #[test]
    fn sensitivity_is_periodic(n in 10.0f64..1e7, mu in 0.0f64..0.01, phi in -PI..PI) {
        let m = oat_moments(n, mu).unwrap();
        let a = m.normalized_sensitivity(phi);
        let b = m.normalized_sensitivity(phi + TAU);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0) || (a.is_infinite() && b.is_infinite()));
    }

    #[test]
    fn never_beats_heisenberg(n in 10.0f64..1e7, s in 0.0f64..20.0) {
        // Fixed μ√N as N grows.
        let mu = s / n.sqrt();
        let m = oat_moments(n, mu).unwrap();
        let (small, _, phi) = m.principal_variances();
        prop_assert!(small >= 0.0);
        let dphi = m.normalized_sensitivity(phi) / n.sqrt();
        prop_assert!(dphi >= 1.0 / n * (1.0 - 1e-9));
    }
}

#[test]
fn sql_equality_at_best_angle() {
    let cfg = OatConfig { n: 1e4, chi: 0.0, prep_time: 0.02, phases: vec![0.0, 0.5, 1.0] };
    let c = phase_sensitivity(&cfg).unwrap();
    assert!((c.min_value - 1.0).abs() < 1e-12);
    assert!((sql(1e4).unwrap() - 0.01).abs() < 1e-15);
}
