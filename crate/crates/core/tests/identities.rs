use ckn_lab::identities::{
    battery, battery_params, check_equality_case, check_expansion, check_gradient_identity, check_hardy_identity,
    check_laplacian_comparison, check_rellich_sobolev, check_substitution, rellich_sobolev_constants,
    rellich_sobolev_extremal,
};
use ckn_lab::params::validate;
use ckn_lab::profile::{AlgebraicProfile, GaussianProfile, RadialProfile};

#[test]
fn battery_defects() {
    for p in battery_params() {
        for u in battery() {
            let c = check_laplacian_comparison(&u, &p).unwrap();
            assert!(c.pass && c.ratio <= c.bound + 1e-10, "{p:?} {u:?}");
            assert!(check_hardy_identity(&u, &p).unwrap() < 1e-8, "{p:?} {u:?}");
            assert!(check_expansion(&u, &p).unwrap() < 1e-8, "{p:?} {u:?}");
            assert!(check_gradient_identity(&u, p.n()).unwrap() < 1e-8, "{u:?}");
        }
    }
}

#[test]
fn comparison_is_an_equality_without_weight() {
    for (n, b) in [(5, -0.5), (6, -1.5), (8, -1.0)] {
        let p = validate(n, 0.0, b).unwrap();
        for u in battery() {
            let c = check_laplacian_comparison(&u, &p).unwrap();
            assert!((c.ratio - 1.0).abs() < 1e-12, "{p:?} {u:?}: {}", c.ratio);
        }
    }
}

#[test]
fn reference_comparison_bound() {
    // at (5, 1, 1) the comparison constant is 1 + 1 + E(1 + 1) with E = 1
    let p = validate(5, 1.0, 1.0).unwrap();
    let u = battery().into_iter().find(|u| u.label == "(1+r^2)^-3").unwrap();
    let c = check_laplacian_comparison(&u, &p).unwrap();
    assert_eq!(c.bound, 4.0);
    assert!(c.ratio <= 4.0);
}

#[test]
fn substitution_defects() {
    for u in battery().into_iter().filter(|u| u.mode_k == 0) {
        for (n, a) in [(5, -1.0), (6, -0.5), (8, -2.0), (7, -0.3)] {
            assert!(check_substitution(&u, n, a).unwrap() < 1e-8, "N={n} alpha={a} {u:?}");
        }
    }
}

#[test]
fn equality_case_consistency() {
    for n in [5, 6, 8] {
        for a in [-0.5, -1.0, -2.0] {
            let c = check_equality_case(n, a).unwrap();
            assert!(c.defect < 1e-6, "N={n} alpha={a}: {c:?}");
            assert!(c.closed_form_defect < 1e-10, "N={n} alpha={a}: {c:?}");
        }
    }
}

#[test]
fn rellich_sobolev_constants_vanish_with_mu() {
    let c = rellich_sobolev_constants(7, -1e-9).unwrap();
    assert!(c.c_mu1.abs() < 1e-6 && c.c_mu2.abs() < 1e-6);
}

#[test]
fn rellich_sobolev_extremals_are_sharp() {
    for (n, a) in [(5, -1.0), (6, -0.5), (8, -2.0)] {
        let mu = rellich_sobolev_constants(n, a).unwrap().mu;
        for (amp, nu) in [(1.0, 1.0), (2.0, 0.5), (0.3, 4.0)] {
            let v = rellich_sobolev_extremal(n, mu, amp, nu).unwrap();
            let r = check_rellich_sobolev(&v, n, mu).unwrap();
            assert!((r.lhs / r.rhs - 1.0).abs() < 1e-6, "N={n} mu={mu} nu={nu}: {r:?}");
        }
    }
}

#[test]
fn rellich_sobolev_never_violated() {
    let alg =
        |g: f64, k: f64| Box::new(AlgebraicProfile::single(1.0, 0.0, 1.0, g, k).unwrap()) as Box<dyn RadialProfile>;
    let profiles: Vec<Box<dyn RadialProfile>> = vec![
        alg(2.0, 2.0),
        alg(2.0, 3.0),
        alg(2.0, 5.0),
        alg(4.0, 1.5),
        alg(3.0, 2.5),
        alg(1.5, 4.0),
        alg(2.5, 3.0),
        Box::new(GaussianProfile::new(1.0, 0.0, 1.0).unwrap()),
        Box::new(GaussianProfile::new(1.0, 2.0, 0.5).unwrap()),
        Box::new(AlgebraicProfile::single(1.0, 2.0, 1.0, 2.0, 4.0).unwrap()),
    ];
    for (n, a) in [(5, -1.0), (6, -0.5), (8, -2.0)] {
        let mu = rellich_sobolev_constants(n, a).unwrap().mu;
        for (i, v) in profiles.iter().enumerate() {
            let r = check_rellich_sobolev(v.as_ref(), n, mu).unwrap();
            assert!(r.pass && r.lhs >= r.rhs * (1.0 - 1e-10), "profile {i} N={n}: {r:?}");
        }
    }
}
