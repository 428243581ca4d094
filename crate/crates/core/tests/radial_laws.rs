mod common;

use common::ks_statistic;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, LogNormal};
use tubetail_core::radial_laws::{g_beta, r_beta, Family, RadialLaw, TailBranch};
use tubetail_core::special_functions::ChebyshevTable;

const KS_CRIT_001: f64 = 1.949;


fn ks_passes(law: &RadialLaw, cdf: impl Fn(f64) -> f64, seed: u64) {
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
    let d = ks_statistic(xs, cdf);
    assert!(d * (n as f64).sqrt() < KS_CRIT_001, "{}: D = {d}", law.describe());
}

#[test]
fn tails_match_statrs() {
    let chi2 = ChiSquared::new(3.0).unwrap();
    let f = FisherSnedecor::new(3.0, 5.0).unwrap();
    let ln = LogNormal::new(0.0, 1.0).unwrap();
    let l_chi2 = RadialLaw::chi_square(3.0).unwrap();
    let l_chi = RadialLaw::chi(3.0).unwrap();
    let l_f = RadialLaw::f_dist(3.0, 5.0).unwrap();
    let l_ln = RadialLaw::log_normal();
    for k in 1..200 {
        let x = k as f64 * 0.1;
        assert!((l_chi2.tail(x).unwrap() - chi2.sf(x)).abs() < 1e-12, "chi2 x={x}");
        assert!((l_chi.tail(x).unwrap() - chi2.sf(x * x)).abs() < 1e-12, "chi x={x}");
        assert!((l_f.tail(x).unwrap() - f.sf(x)).abs() < 1e-12, "f x={x}");
        // statrs' erfc is good to a few 1e-12 here
        assert!((l_ln.tail(x).unwrap() - ln.sf(x)).abs() < 1e-10, "lognormal x={x}");
    }
    // mpmath, 30 digits
    assert!((l_ln.tail(0.2).unwrap() - 0.946_239_689_548_336_8).abs() < 1e-15);
}

#[test]
fn tail_examples_and_domain() {
    assert!((RadialLaw::f_dist(3.0, 3.0).unwrap().tail(1.0).unwrap() - 0.5).abs() < 1e-14);
    assert!((RadialLaw::log_normal().tail(1.0).unwrap() - 0.5).abs() < 1e-15);
    assert!((RadialLaw::chi_square(1.0).unwrap().tail(4.0).unwrap() - 0.045_500_263_896_358_4).abs() < 1e-12);
    for law in all_laws() {
        assert!(law.tail(-1.0).is_err());
        assert_eq!(law.tail(0.0).unwrap(), 1.0);
        assert_eq!(law.tail(f64::INFINITY).unwrap(), 0.0);
    }
    assert!(RadialLaw::chi_square(0.0).is_err());
    assert!(RadialLaw::bessel(3.0, -1.0).is_err());
    assert!(RadialLaw::log_normal().with_scale(0.0).is_err());
}

fn all_laws() -> Vec<RadialLaw> {
    vec![
        RadialLaw::chi_square(3.0).unwrap(),
        RadialLaw::chi(5.0).unwrap(),
        RadialLaw::f_dist(3.0, 3.0).unwrap(),
        RadialLaw::log_normal(),
        RadialLaw::bessel(3.0, 4.0).unwrap(),
    ]
}

#[test]
fn samplers_pass_ks() {
    let laws = [
        RadialLaw::chi_square(3.0).unwrap(),
        RadialLaw::chi(5.0).unwrap(),
        RadialLaw::f_dist(3.0, 3.0).unwrap(),
        RadialLaw::log_normal().with_scale(3.0 * (-0.5f64).exp()).unwrap(),
    ];
    for (i, law) in laws.iter().enumerate() {
        ks_passes(law, |x| 1.0 - law.tail(x).unwrap(), 100 + i as u64);
    }
}

#[test]
fn bessel_sampler_passes_ks() {
    // Tabulate the convolution CDF in log x rather than integrating at every sample.
    let law = RadialLaw::bessel(3.0, 4.0).unwrap().with_scale(0.25).unwrap();
    let (lo, hi) = (-12.0, 7.0);
    let table = ChebyshevTable::build(|s| law.tail(s.exp()), lo, hi, 1e-12).unwrap();
    let cdf = |x: f64| {
        let s = x.ln();
        if s <= lo {
            0.0
        } else if s >= hi {
            1.0 - law.tail(x).unwrap()
        } else {
            1.0 - table.eval(s)
        }
    };
    ks_passes(&law, cdf, 7);
}

#[test]
fn sample_means() {
    let cases = [
        (RadialLaw::chi_square(3.0).unwrap(), 0.01),
        (RadialLaw::log_normal().with_scale(3.0 * (-0.5f64).exp()).unwrap(), 0.03),
        (RadialLaw::bessel(3.0, 4.0).unwrap().with_scale(0.25).unwrap(), 0.03),
    ];
    for (law, tol) in cases {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mean = (0..1_000_000).map(|_| law.sample(&mut rng)).sum::<f64>() / 1e6;
        assert!((mean - 3.0).abs() < tol, "{}: {mean}", law.describe());
    }
}

#[test]
fn class_descriptors() {
    let c = RadialLaw::f_dist(3.0, 3.0).unwrap().class_descriptor();
    assert_eq!((c.beta, c.gamma), (1.0, 1.5));
    assert!(c.is_regularly_varying());
    let c = RadialLaw::bessel(3.0, 4.0).unwrap().class_descriptor();
    assert_eq!((c.beta, c.gamma), (0.5, 0.5));
    assert_eq!(c.ell0(123.0), 0.5);
    let c = RadialLaw::chi(5.0).unwrap().class_descriptor();
    assert_eq!((c.beta, c.gamma), (-1.0, 1.0));
    assert_eq!(c.ell0(7.0), 1.0);
    let c = RadialLaw::chi_square(3.0).unwrap().class_descriptor();
    assert_eq!((c.beta, c.gamma), (0.0, 0.5));
    assert_eq!(c.branch(), TailBranch::LightTailed);
    let c = RadialLaw::log_normal().with_scale(2.0).unwrap().class_descriptor();
    assert_eq!(c.beta, 1.0);
    assert!(c.gamma.is_infinite());
    assert!(!c.is_regularly_varying());
    assert_eq!(c.branch(), TailBranch::Subexponential);
    assert!((c.ell0(10.0) - 10f64.ln()).abs() < 1e-15);
    assert_eq!(c.scale, 2.0);
}

#[test]
fn regular_variation_ratio_f33() {
    let law = RadialLaw::f_dist(3.0, 3.0).unwrap();
    for &lambda in &[2.0f64, 5.0, 10.0] {
        let want = lambda.powf(-1.5);
        let residuals: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&x| (law.tail(lambda * x).unwrap() / law.tail(x).unwrap() - want).abs())
            .collect();
        assert!(residuals.windows(2).all(|w| w[1] < w[0]), "λ={lambda}: {residuals:?}");
        assert!(residuals[2] < 1e-2 * want);
    }
}

#[test]
fn non_rv_ratio_vanishes() {
    for law in [RadialLaw::log_normal(), RadialLaw::bessel(3.0, 4.0).unwrap()] {
        let r = |x: f64| law.tail(2.0 * x).unwrap() / law.tail(x).unwrap();
        assert!(r(1e4) < r(1e2), "{}", law.describe());
    }
}

#[test]
fn long_tail_ratio_tends_to_one() {
    for law in [RadialLaw::log_normal(), RadialLaw::bessel(3.0, 4.0).unwrap(), RadialLaw::f_dist(3.0, 3.0).unwrap()] {
        let dev: Vec<f64> = [1e1, 1e2, 1e3, 1e4]
            .iter()
            .map(|&x| (law.tail(x - 1.0).unwrap() / law.tail(x).unwrap() - 1.0).abs())
            .collect();
        assert!(dev.windows(2).all(|w| w[1] < w[0]), "{}: {dev:?}", law.describe());
        assert!(dev[3] < 0.02, "{}: {dev:?}", law.describe());
    }
    // light tails are not long-tailed
    let chi2 = RadialLaw::chi_square(3.0).unwrap();
    assert!(chi2.tail(999.0).unwrap() / chi2.tail(1000.0).unwrap() > 1.6);
    assert!(chi2.class_descriptor().beta <= 0.0);
    assert!(RadialLaw::chi(5.0).unwrap().class_descriptor().beta <= 0.0);
}

#[test]
fn g_and_r_examples() {
    assert_eq!(g_beta(0.3, 1.0).unwrap(), 0.0);
    assert!((g_beta(0.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
    assert!((g_beta(0.5, 0.25).unwrap() - 2.0).abs() < 1e-15);
    assert!(g_beta(0.5, 0.0).is_err());
    for &y in &[0.01, 0.3, 0.625, 0.99] {
        assert!((g_beta(1.0 - 1e-8, y).unwrap() + y.ln()).abs() < 1e-6);
        assert!((g_beta(1.0, y).unwrap() + y.ln()).abs() < 1e-15);
    }
    let y: f64 = 0.4;
    assert!((r_beta(&RadialLaw::chi_square(3.0).unwrap(), 5.0, y).unwrap() - 0.5 * y.ln()).abs() < 1e-15);
    assert!((r_beta(&RadialLaw::bessel(3.0, 4.0).unwrap(), 50.0, y).unwrap() - y.ln()).abs() < 1e-15);
    assert_eq!(r_beta(&RadialLaw::log_normal(), 9.0, 1.0).unwrap(), 0.0);
    assert!((r_beta(&RadialLaw::log_normal(), 9.0, y).unwrap() - 0.5 * y.ln().powi(2)).abs() < 1e-15);
    assert!(r_beta(&RadialLaw::f_dist(3.0, 3.0).unwrap(), 9.0, y).is_err());
}

#[test]
fn serde_roundtrip() {
    for law in all_laws() {
        let law = law.with_scale(0.75).unwrap();
        let json = serde_json::to_string(&law).unwrap();
        let back: RadialLaw = serde_json::from_str(&json).unwrap();
        assert_eq!(back, law);
    }
    let law: RadialLaw = serde_json::from_str(r#"{"family": "bessel", "nu1": 3, "nu2": 4, "scale": 0.25}"#).unwrap();
    assert_eq!(law.family(), Family::Bessel { nu1: 3.0, nu2: 4.0 });
    assert!(serde_json::from_str::<RadialLaw>(r#"{"family": "chi_square"}"#).is_err());
    assert!(serde_json::from_str::<RadialLaw>(r#"{"family": "chi_square", "nu": -1}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scale_identity(a in 0.05f64..20.0, x in 0.0f64..50.0) {
        for law in all_laws() {
            let scaled = law.with_scale(a).unwrap();
            prop_assert_eq!(scaled.tail(x).unwrap(), law.tail(x / a).unwrap());
        }
    }

    #[test]
    fn tails_nonincreasing(x in 0.0f64..100.0, dx in 0.0f64..10.0) {
        for law in all_laws() {
            let a = law.tail(x).unwrap();
            let b = law.tail(x + dx).unwrap();
            prop_assert!(b <= a * (1.0 + 1e-12) + 1e-300);
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }
}
