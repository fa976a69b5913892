//! Kernels against an independent statistics implementation.

use credal_cfr::numeric::{
    beta_cdf, beta_quantile, chi_square_cdf, chi_square_quantile, normal_cdf, normal_quantile,
};
use proptest::prelude::*;
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF, Normal};

proptest! {
    #[test]
    fn beta_cdf_matches(a in 0.2f64..60.0, b in 0.2f64..60.0, x in 0.0f64..=1.0) {
        let oracle = Beta::new(a, b).unwrap().cdf(x);
        prop_assert!((beta_cdf(a, b, x).unwrap() - oracle).abs() < 1e-10);
    }

    #[test]
    fn beta_quantile_matches(a in 0.5f64..60.0, b in 0.5f64..60.0, p in 0.001f64..0.999) {
        let x = beta_quantile(a, b, p).unwrap();
        prop_assert!((Beta::new(a, b).unwrap().cdf(x) - p).abs() < 1e-9);
    }

    #[test]
    fn chi_square_matches(k in 0.5f64..200.0, p in 0.001f64..0.999) {
        let d = ChiSquared::new(k).unwrap();
        let x = chi_square_quantile(k, p).unwrap();
        prop_assert!((d.cdf(x) - p).abs() < 1e-9);
        prop_assert!((chi_square_cdf(k, x).unwrap() - d.cdf(x)).abs() < 1e-10);
    }

    #[test]
    fn normal_matches(p in 1e-8f64..(1.0 - 1e-8), z in -8.0f64..8.0) {
        let d = Normal::new(0.0, 1.0).unwrap();
        prop_assert!((normal_quantile(p).unwrap() - d.inverse_cdf(p)).abs() < 1e-8);
        // The reference erf is good to about 1e-11.
        prop_assert!((normal_cdf(z) - d.cdf(z)).abs() < 1e-10);
    }
}

#[test]
fn normal_cdf_against_erfc_values() {
    for (z, want) in [
        (-0.9728132133826292, 0.16532307217809988),
        (-3.0, 0.0013498980316300957),
        (1.0, 0.8413447460685429),
        (-8.0, 6.220960574271819e-16),
    ] {
        let got = normal_cdf(z);
        assert!(
            (got - want).abs() <= 1e-15 + 1e-13 * want,
            "z={z}: {got} vs {want}"
        );
    }
}

#[test]
fn domain_errors() {
    assert!(beta_cdf(0.0, 1.0, 0.5).is_err());
    assert!(beta_cdf(1.0, 1.0, 1.5).is_err());
    assert!(beta_quantile(1.0, -1.0, 0.5).is_err());
    assert!(chi_square_quantile(0.0, 0.5).is_err());
    assert!(normal_quantile(1.5).is_err());
}
