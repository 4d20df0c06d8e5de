use ckn_lab::extremal::{extremal, s_r_closed};
use ckn_lab::params::validate;
use ckn_lab::profile::{AlgebraicProfile, AlgebraicTerm, GaussianProfile, RadialProfile};
use ckn_lab::quadrature::{integrate_semiinfinite, quotient_radial};
use ckn_lab::specfun::beta_fn;
use proptest::prelude::*;

mod common;
use common::rel;

#[test]
fn frozen_integral() {
    // ∫ s^{3/2} (1+s²)^{-4} ds = B(5/4, 11/4)/2
    let r = integrate_semiinfinite(|s| s.powf(1.5) * (1.0 + s * s).powi(-4), 1e-12).unwrap();
    assert!(rel(r.value, 0.121_485_080_340_267_83) < 1e-12);
}

#[test]
fn quotient_is_scale_invariant() {
    for (n, a, b) in [(5, 1.0, 1.0), (6, -1.0, -2.0), (8, 0.5, 0.6)] {
        let p = validate(n, a, b).unwrap();
        let s_r = s_r_closed(&p);
        let base = quotient_radial(&extremal(&p, 1.0).unwrap(), &p).unwrap();
        for lambda in [0.5, 2.0, 10.0] {
            let q = quotient_radial(&extremal(&p, lambda).unwrap(), &p).unwrap();
            assert!((q - base).abs() <= 1e-8 * s_r, "{n} {a} {b} lambda={lambda}");
        }
    }
}

/// Admissible at every point used below: all decay at least like `r^{-4}`.
fn competitors() -> Vec<Box<dyn RadialProfile>> {
    let alg =
        |g: f64, k: f64| Box::new(AlgebraicProfile::single(1.0, 0.0, 1.0, g, k).unwrap()) as Box<dyn RadialProfile>;
    vec![
        alg(2.0, 2.0),
        alg(2.0, 2.5),
        alg(2.0, 4.0),
        alg(4.0, 1.5),
        alg(3.0, 2.0),
        alg(1.5, 3.0),
        Box::new(GaussianProfile::new(1.0, 0.0, 1.0).unwrap()),
        Box::new(GaussianProfile::new(2.0, 0.0, 0.3).unwrap()),
        Box::new(
            AlgebraicProfile::new(vec![
                AlgebraicTerm::new(1.0, 0.0, 1.0, 2.0, 2.0),
                AlgebraicTerm::new(0.5, 0.0, 3.0, 2.0, 2.0),
            ])
            .unwrap(),
        ),
        Box::new(
            AlgebraicProfile::new(vec![
                AlgebraicTerm::new(1.0, 0.0, 1.0, 2.0, 2.5),
                AlgebraicTerm::new(-0.3, 2.0, 1.0, 2.0, 3.5),
            ])
            .unwrap(),
        ),
    ]
}

#[test]
fn no_radial_profile_beats_the_extremal() {
    for (n, a, b) in [(5, 1.0, 1.0), (5, 0.0, 0.0), (7, 2.0, 1.0)] {
        let p = validate(n, a, b).unwrap();
        let s_r = s_r_closed(&p);
        for (i, u) in competitors().iter().enumerate() {
            let q = quotient_radial(u.as_ref(), &p).unwrap();
            assert!(q >= s_r * (1.0 - 1e-8), "profile {i} at ({n}, {a}, {b}): {q} < {s_r}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn matches_beta_function(a in -0.9f64..6.0, excess in 0.1f64..6.0) {
        // b chosen so that the tail 2b - a > 1 converges
        let b = (a + 1.0) / 2.0 + excess;
        let r = integrate_semiinfinite(|s| s.powf(a) * (1.0 + s * s).powf(-b), 1e-12).unwrap();
        let want = 0.5 * beta_fn((a + 1.0) / 2.0, b - (a + 1.0) / 2.0).unwrap();
        prop_assert!(rel(r.value, want) < 1e-10, "a={a} b={b}: {} vs {want}", r.value);
    }
}
