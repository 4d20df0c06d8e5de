//! The invariant battery behind `verify-all`.

use serde::Serialize;

use crate::emden_fowler::{emden_fowler, ClosedFormPhi};
use crate::error::Result;
use crate::extremal::{default_samples, extremal, pwh_residual, s_0_closed, s_r_closed, x1_profile};
use crate::identities::{
    battery, battery_params, check_equality_case, check_expansion, check_gradient_identity, check_hardy_identity,
    check_laplacian_comparison, check_rellich_sobolev, check_substitution, rellich_sobolev_constants,
    rellich_sobolev_extremal,
};
use crate::params::{beta_fs, beta_upper, classify, fs_correspondence, validate, Params, RegionClass};
use crate::quadrature::{quotient_radial, QuadConfig};
use crate::spectral::{fs_locate, mode_quadratic_form, ritz_min_eig};
use crate::variation::{certify, second_variation, second_variation_direct, second_variation_quadrature, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub full: bool,
    /// Perturbs the closed-form reference constant by one part in a thousand.
    pub inject_fault: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// One parameter point per region class, plus a few extra valid points.
pub fn reference_points() -> Vec<Params> {
    [
        (5, 0.0, 0.0),
        (5, 1.0, 1.0),
        (5, 1.0, 0.3),
        (5, -1.0, -5.0 / 3.0),
        (5, 1.0, 5.0 / 3.0),
        (5, 1.0, -0.9),
        (6, 2.0, 2.0),
        (7, -3.0, -4.5),
        (12, 6.0, 7.2),
        (8, 0.5, 0.6),
    ]
    .iter()
    .map(|&(n, a, b)| validate(n, a, b).expect("valid reference point"))
    .collect()
}

/// 20 points straddling the curve `β = β_FS(α)` at `N = 5`.
pub fn sign_law_grid() -> Vec<Params> {
    let mut out = Vec::new();
    for alpha in [0.5, 1.0, 1.5, 2.0, 3.0] {
        let fs = beta_fs(5, alpha).expect("alpha > 0");
        let lo = alpha - 2.0;
        let hi = beta_upper(5, alpha);
        for t in [0.3, 0.9] {
            out.push(validate(5, alpha, lo + t * (fs - lo)).expect("below curve"));
            out.push(validate(5, alpha, fs + t * (hi - fs)).expect("above curve"));
        }
    }
    out
}

struct Tally {
    worst: f64,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            worst: 0.0,
            failures: Vec::new(),
        }
    }

    fn err(&mut self, x: f64, limit: f64, what: impl FnOnce() -> String) {
        if x > self.worst || x.is_nan() {
            self.worst = if x.is_nan() { f64::INFINITY } else { x };
        }
        if !(x <= limit) {
            self.failures.push(format!("{} ({x:.3e} > {limit:.0e})", what()));
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self) -> (bool, String) {
        if self.failures.is_empty() {
            (true, format!("worst {:.3e}", self.worst))
        } else {
            let shown: Vec<_> = self.failures.iter().take(4).cloned().collect();
            (
                false,
                format!("{} failure(s): {}", self.failures.len(), shown.join("; ")),
            )
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn tag(p: &Params) -> String {
    format!("({}, {}, {})", p.n(), p.alpha(), p.beta())
}

fn closed_forms(o: &VerifyOptions) -> Result<(bool, String)> {
    let mut t = Tally::new();
    let top = if o.full { 16 } else { 10 };
    for n in 5..=top {
        let p = validate(n, 0.0, 0.0)?;
        t.err(rel(s_r_closed(&p), s_0_closed(n)?), 1e-12, || format!("N={n}"));
    }
    Ok(t.finish())
}

fn extremality(o: &VerifyOptions) -> Result<(bool, String)> {
    let mut t = Tally::new();
    let bump = if o.inject_fault { 1.0 + 1e-3 } else { 1.0 };
    let mut pts = reference_points();
    if o.full {
        for n in [5, 7, 9] {
            for i in 1..6 {
                let a = (2.0 - n as f64) + (n as f64) * i as f64 / 6.0;
                let (lo, hi) = (a - 2.0, beta_upper(n, a));
                for j in 1..6 {
                    pts.push(validate(n, a, lo + (hi - lo) * j as f64 / 5.0)?);
                }
            }
        }
    }
    for p in &pts {
        let q = quotient_radial(&extremal(p, 1.0)?, p)?;
        t.err(rel(q, bump * s_r_closed(p)), 1e-6, || tag(p));
    }
    Ok(t.finish())
}

fn euler_lagrange(o: &VerifyOptions) -> Result<(bool, String)> {
    let mut t = Tally::new();
    let mut pts = reference_points();
    if o.full {
        pts.extend(sign_law_grid());
    }
    for p in &pts {
        for lambda in [1.0, 2.5] {
            let r = pwh_residual(&extremal(p, lambda)?, p, &default_samples());
            t.err(r, 1e-8, || format!("{} lambda={lambda}", tag(p)));
        }
    }
    Ok(t.finish())
}

fn emden_fowler_chain(o: &VerifyOptions) -> Result<(bool, String)> {
    let mut t = Tally::new();
    let steps = if o.full { 201 } else { 41 };
    for m in [4.5, 5.0, 6.0, 8.0] {
        let phi = ClosedFormPhi::new(m)?;
        for i in 0..steps {
            let s = -5.0 + 10.0 * i as f64 / (steps - 1) as f64;
            t.err(phi.residual(s), 1e-6, || format!("M={m} t={s}"));
        }
    }
    // the transformed extremal is the closed form, translated by ln(λ)/q
    for p in [validate(5, 1.0, 1.0)?, validate(7, 2.0, 1.0)?] {
        let d = p.derive();
        let phi = ClosedFormPhi::new(d.m)?;
        let lambda = 1.7;
        let ef = emden_fowler(extremal(&p, lambda)?, &p);
        let t0 = lambda.ln() / d.q;
        for s in [-2.0, -0.5, 0.0, 1.0, 3.0] {
            t.err(rel(ef.phi(s), phi.jet(s - t0)[0]), 1e-10, || {
                format!("{} t={s}", tag(&p))
            });
            t.err(ef.residual(s), 1e-8, || format!("{} residual t={s}", tag(&p)));
        }
    }
    Ok(t.finish())
}

fn fs_curve(o: &VerifyOptions) -> Result<(bool, String)> {
    let mut t = Tally::new();
    let ns: &[u32] = if o.full { &[5, 6, 7, 8] } else { &[5, 6] };
    for &n in ns {
        for alpha in [0.5, 1.0, 2.0] {
            let closed = beta_fs(n, alpha)?;
            let c = fs_correspondence(n, alpha)?;
            t.err((c.beta_mapped - closed).abs(), 1e-10, || {
                format!("correspondence N={n} alpha={alpha}")
            });
            let located = fs_locate(n, alpha, 1e-6)?;
            t.err((located - closed).abs(), 1e-4, || {
                format!("spectral N={n} alpha={alpha}")
            });
        }
    }
    Ok(t.finish())
}

fn second_variation_law(_o: &VerifyOptions) -> Result<(bool, String)> {
    let mut t = Tally::new();
    let cfg = QuadConfig::default();
    for p in sign_law_grid() {
        let sv = second_variation(&p)?;
        let d = p.derive();
        let law = (d.q * d.q * (p.nf() - 1.0) - (d.m - 1.0)).signum();
        t.require(sv.value.signum() == law && sv.exact.signum() == law, || {
            format!("sign at {}", tag(&p))
        });
        let quad = second_variation_quadrature(&p, &cfg)?;
        t.err(rel(quad.i1, sv.i1).max(rel(quad.i2, sv.i2)), 1e-9, || {
            format!("Beta vs quadrature {}", tag(&p))
        });
        let direct = second_variation_direct(&p, &cfg)?;
        t.err(rel(direct, sv.exact), 1e-8, || format!("direct form {}", tag(&p)));
    }
    let sv = second_variation(&validate(5, 1.0, 1.0)?)?;
    t.err(rel(sv.value, -5.859), 1e-2, || "value at (5, 1, 1)".into());
    Ok(t.finish())
}

fn certificate(_o: &VerifyOptions) -> Result<(bool, String)> {
    let mut t = Tally::new();
    let fs = beta_fs(5, 1.0)?;
    for (b, want) in [
        (1.0, Verdict::Breaking),
        (0.3, Verdict::NotBreaking),
        (fs, Verdict::Boundary),
    ] {
        let p = validate(5, 1.0, b)?;
        let c = certify(&p, 0.01)?;
        t.require(c.passed() && c.verdict == want, || {
            format!("{}: {} ({})", tag(&p), c.verdict, c.discrepancies.join(", "))
        });
    }
    let c = certify(&validate(5, 1.0, 1.0)?, 0.01)?;
    t.require(
        c.directional_quotient < c.s_r && c.ritz_rho1 < 0.0 && c.second_variation < 0.0,
        || "three negative witnesses at (5, 1, 1)".into(),
    );
    Ok(t.finish())
}

fn kernel(o: &VerifyOptions) -> Result<(bool, String)> {
    let mut t = Tally::new();
    let alphas: &[f64] = if o.full { &[0.5, 1.0, 2.0] } else { &[1.0] };
    for &alpha in alphas {
        let fs = beta_fs(5, alpha)?;
        let p = validate(5, alpha, fs)?;
        let q = mode_quadratic_form(&x1_profile(p.derive().m), 1, &p)?;
        t.err(q.value.abs() / q.kinetic, 1e-8, || format!("Q1(X1) alpha={alpha}"));
        t.require(ritz_min_eig(2, &p, 16)?.min_eigenvalue > 0.0, || {
            format!("rho2 alpha={alpha}")
        });
        let below = ritz_min_eig(1, &validate(5, alpha, fs - 0.05)?, 16)?.min_eigenvalue;
        let above = ritz_min_eig(1, &validate(5, alpha, fs + 0.05)?, 16)?.min_eigenvalue;
        t.require(below > 0.0 && above < 0.0, || format!("rho1 sign change alpha={alpha}"));
    }
    Ok(t.finish())
}

fn identity_suite(_o: &VerifyOptions) -> Result<(bool, String)> {
    let mut t = Tally::new();
    for p in battery_params() {
        for u in battery() {
            let c = check_laplacian_comparison(&u, &p)?;
            t.require(c.pass, || format!("comparison {} {:?}", tag(&p), u));
            t.err(check_hardy_identity(&u, &p)?, 1e-8, || {
                format!("Hardy {} {:?}", tag(&p), u)
            });
            t.err(check_expansion(&u, &p)?, 1e-8, || {
                format!("expansion {} {:?}", tag(&p), u)
            });
            t.err(check_gradient_identity(&u, p.n())?, 1e-8, || {
                format!("gradient {:?}", u)
            });
        }
    }
    let p0 = validate(5, 0.0, -0.5)?;
    for u in battery() {
        let c = check_laplacian_comparison(&u, &p0)?;
        t.err((c.ratio - 1.0).abs(), 1e-12, || format!("alpha=0 ratio {:?}", u));
    }
    for u in battery().into_iter().filter(|u| u.mode_k == 0) {
        for (n, a) in [(5, -1.0), (6, -0.5), (8, -2.0)] {
            t.err(check_substitution(&u, n, a)?, 1e-8, || {
                format!("substitution N={n} alpha={a} {:?}", u)
            });
        }
    }
    Ok(t.finish())
}

fn equality_case(_o: &VerifyOptions) -> Result<(bool, String)> {
    let mut t = Tally::new();
    for (n, a) in [(5, -1.0), (6, -0.5), (8, -2.0)] {
        let c = check_equality_case(n, a)?;
        t.err(c.defect, 1e-6, || format!("quotient N={n} alpha={a}"));
        t.err(c.closed_form_defect, 1e-10, || format!("closed form N={n} alpha={a}"));
        let mu = rellich_sobolev_constants(n, a)?.mu;
        for nu in [1.0, 3.0] {
            let v = rellich_sobolev_extremal(n, mu, 1.0, nu)?;
            let r = check_rellich_sobolev(&v, n, mu)?;
            t.err((r.lhs / r.rhs - 1.0).abs(), 1e-6, || {
                format!("Rellich-Sobolev N={n} mu={mu} nu={nu}")
            });
        }
    }
    Ok(t.finish())
}

fn classification(_o: &VerifyOptions) -> Result<(bool, String)> {
    let mut t = Tally::new();
    let want = [
        RegionClass::Classical,
        RegionClass::SymmetryBreaking,
        RegionClass::ConjecturedSymmetry,
        RegionClass::ProvenSymmetryBoundary,
        RegionClass::NotAttainedBoundary,
        RegionClass::ConjecturedSymmetry,
        RegionClass::SymmetryBreaking,
        RegionClass::ConjecturedSymmetry,
        RegionClass::NotAttainedBoundary,
        RegionClass::SymmetryBreaking,
    ];
    for (p, w) in reference_points().iter().zip(want) {
        let got = classify(p.n(), p.alpha(), p.beta());
        t.require(got == w, || format!("{}: {got}, expected {w}", tag(p)));
    }
    t.require(classify(5, 1.0, -1.0) == RegionClass::RellichDegenerate, || {
        "Rellich line".into()
    });
    t.require(classify(4, 0.0, 0.0) == RegionClass::Invalid, || "N = 4".into());
    Ok(t.finish())
}

type Check = fn(&VerifyOptions) -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 11] = [
    ("classification", classification),
    ("closed_forms", closed_forms),
    ("extremality", extremality),
    ("euler_lagrange", euler_lagrange),
    ("emden_fowler", emden_fowler_chain),
    ("fs_curve", fs_curve),
    ("second_variation", second_variation_law),
    ("certificate", certificate),
    ("kernel", kernel),
    ("identities", identity_suite),
    ("equality_case", equality_case),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs every check; an error inside a check counts as a failure.
pub fn verify_all(o: &VerifyOptions) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|&(name, f)| {
            let (pass, detail) = match f(o) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckOutcome { name, pass, detail }
        })
        .collect()
}
