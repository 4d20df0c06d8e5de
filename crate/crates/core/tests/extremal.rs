use ckn_lab::emden_fowler::{emden_fowler, ClosedFormPhi};
use ckn_lab::extremal::{
    b_closed, default_samples, extremal, kernel_mode, pwh_residual, s_0_closed, s_r_closed, KernelKind,
};
use ckn_lab::params::validate;
use ckn_lab::profile::{RadialProfile, Scaled};
use ckn_lab::quadrature::quotient_radial;
use proptest::prelude::*;

mod common;
use common::{rel, valid_params};

#[test]
fn frozen_constants() {
    // high-precision evaluations of the closed forms
    let s0 = [
        102.383_273_440_582_93,
        247.284_447_366_160_2,
        431.532_664_678_659_56,
        653.824_711_826_447,
        913.533_844_779_994,
        1_210.323_629_826_227,
    ];
    for (i, want) in s0.iter().enumerate() {
        let n = 5 + i as u32;
        assert!(rel(s_0_closed(n).unwrap(), *want) < 1e-13, "S_0({n})");
        let p = validate(n, 0.0, 0.0).unwrap();
        assert!(rel(s_r_closed(&p), s_0_closed(n).unwrap()) < 1e-12, "N={n}");
    }
    assert!(rel(b_closed(6.0).unwrap(), 25.055_152_903_480_727) < 1e-13);
    assert!(rel(b_closed(4.5).unwrap(), 2.783_717_552_701_041_4) < 1e-13);
    let cases = [
        ((5, 1.0, 1.0), 221.688_267_419_792_82),
        ((5, 1.0, 0.3), 138.162_993_846_002_53),
        ((6, 2.0, 2.0), 638.920_793_085_209_5),
        ((7, -3.0, -4.5), 9.133_760_787_249_539),
        ((8, 0.5, 0.6), 836.159_125_802_896_4),
        ((12, 6.0, 7.2), 10_727.062_059_975_045),
    ];
    for ((n, a, b), want) in cases {
        let p = validate(n, a, b).unwrap();
        assert!(rel(s_r_closed(&p), want) < 1e-12, "({n}, {a}, {b})");
    }
}

#[test]
fn scaled_extremal_is_not_a_solution() {
    let p = validate(5, 1.0, 1.0).unwrap();
    let u = Scaled {
        inner: extremal(&p, 1.0).unwrap(),
        factor: 1.1,
    };
    assert!(pwh_residual(&u, &p, &default_samples()) >= 0.01);
}

#[test]
fn z0_changes_sign_once() {
    for (n, a, b) in [(5, 1.0, 1.0), (6, -1.0, -2.0), (9, 3.0, 2.0)] {
        let p = validate(n, a, b).unwrap();
        let z = kernel_mode(&p, KernelKind::Z0);
        let mut flips = 0;
        let mut prev = z.eval(1e-4).signum();
        for i in 1..=800 {
            let r = 10f64.powf(-4.0 + 8.0 * i as f64 / 800.0);
            let s = z.eval(r).signum();
            if s != prev && s != 0.0 {
                flips += 1;
                prev = s;
            }
        }
        assert_eq!(flips, 1, "({n}, {a}, {b})");
        assert!(z.eval(1.0).abs() < 1e-14);
        let z1 = kernel_mode(&p, KernelKind::Z1Radial);
        assert!(z1.eval(0.3) > 0.0 && z1.eval(30.0) > 0.0);
    }
}

#[test]
fn closed_form_phi_solves_the_ode() {
    for m in [4.5, 5.0, 6.0, 8.0] {
        let phi = ClosedFormPhi::new(m).unwrap();
        for t in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            assert!(phi.residual(t) < 1e-6, "M={m} t={t}");
        }
    }
}

#[test]
fn translated_profile_still_solves() {
    // U_λ transforms to φ*(t − t0) with t0 = ln(λ)/q
    let p = validate(5, 1.0, 1.0).unwrap();
    let q = p.derive().q;
    let t0 = 0.7;
    let ef = emden_fowler(extremal(&p, (q * t0).exp()).unwrap(), &p);
    let phi = ClosedFormPhi::new(6.0).unwrap();
    for t in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        assert!(ef.residual(t) < 1e-6);
        assert!(rel(ef.phi(t), phi.jet(t - t0)[0]) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn extremal_attains_the_radial_constant(p in valid_params()) {
        let s_r = s_r_closed(&p);
        for lambda in [1.0, 2.0] {
            let u = extremal(&p, lambda).unwrap();
            let q = quotient_radial(&u, &p).unwrap();
            prop_assert!(rel(q, s_r) < 1e-6, "{p:?} lambda={lambda}: {q} vs {s_r}");
        }
        let r = pwh_residual(&extremal(&p, 1.0).unwrap(), &p, &default_samples());
        prop_assert!(r < 1e-8, "{p:?}: residual {r}");
    }
}
