//! Integral identities and inequalities behind the main inequality, checked on
//! spherical-harmonic test functions `f(|x|) Y_k(x/|x|)` with `∫ Y_k² = 1`.
//! Every integral reduces to one radial quadrature.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::extremal::{extremal, s_0_closed, s_r_closed};
use crate::params::{beta_upper, hardy_constants, validate, Params};
use crate::profile::{AlgebraicProfile, AlgebraicTerm, GaussianProfile, PowerWeighted, RadialProfile};
use crate::quadrature::{check_exponents, integrate_vec, mode_radial_energy, quotient_radial_with, QuadConfig};

/// `f(|x|) Y_k(x/|x|)`; `mode_k = 0` is a radial function.
#[derive(Clone)]
pub struct TestFunction {
    pub radial_part: Arc<dyn RadialProfile>,
    pub mode_k: u32,
    pub label: String,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TestFunction({}, k={})", self.label, self.mode_k)
    }
}

impl TestFunction {
    pub fn new(radial_part: impl RadialProfile + 'static, mode_k: u32, label: impl Into<String>) -> Self {
        Self {
            radial_part: Arc::new(radial_part),
            mode_k,
            label: label.into(),
        }
    }

    fn lambda(&self, n: u32) -> f64 {
        (self.mode_k * (n - 2 + self.mode_k)) as f64
    }
}

/// Five analytic profiles; each enters as a radial function and, multiplied by
/// `r`, as a mode-one function.
pub fn battery() -> Vec<TestFunction> {
    let alg = |power: f64, gamma: f64, kappa: f64| {
        AlgebraicProfile::single(1.0, power, 1.0, gamma, kappa).expect("finite terms")
    };
    let gauss = |power: f64| GaussianProfile::new(1.0, power, 1.0).expect("finite terms");
    let mut out = Vec::new();
    for (shift, k) in [(0.0, 0), (1.0, 1)] {
        let tag = if k == 0 { "" } else { "r*" };
        out.push(TestFunction::new(alg(shift, 2.0, 2.0), k, format!("{tag}(1+r^2)^-2")));
        out.push(TestFunction::new(alg(shift, 2.0, 3.0), k, format!("{tag}(1+r^2)^-3")));
        out.push(TestFunction::new(gauss(shift), k, format!("{tag}exp(-r^2)")));
        out.push(TestFunction::new(
            alg(shift + 2.0, 2.0, 4.0),
            k,
            format!("{tag}r^2(1+r^2)^-4"),
        ));
        out.push(TestFunction::new(alg(shift, 4.0, 1.5), k, format!("{tag}(1+r^4)^-1.5")));
    }
    out
}

/// Parameter points used with [`battery`].
pub fn battery_params() -> Vec<Params> {
    [
        (5, 1.0, 1.0),
        (5, 1.0, 0.5),
        (6, -1.0, -2.0),
        (7, 2.0, 1.5),
        (5, -0.5, -1.0),
    ]
    .iter()
    .map(|&(n, a, b)| validate(n, a, b).expect("valid battery point"))
    .collect()
}

fn rel_defect(a: f64, b: f64) -> f64 {
    let s = a.abs() + b.abs();
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Leading power of `f^{(order)}` at the origin (upper bound on the singularity).
fn origin_power(f: &dyn RadialProfile, order: usize) -> f64 {
    let e = f.origin_exponent();
    if order == 0 {
        e
    } else if e == 0.0 {
        f.origin_increment_exponent() - order as f64
    } else {
        e - order as f64
    }
}

/// `d` with `|f^{(order)}| ≲ r^{−d}` at infinity.
fn decay_power(f: &dyn RadialProfile, order: usize) -> f64 {
    if order == 0 {
        f.decay_exponent()
    } else {
        f.slope_decay_exponent() + order as f64
    }
}

/// Convergence pre-check of `∫ f^{(a)} f^{(b)} r^w dr`.
fn check_term(what: &str, f: &dyn RadialProfile, a: usize, b: usize, w: f64) -> Result<()> {
    check_exponents(
        what,
        origin_power(f, a) + origin_power(f, b) + w,
        -decay_power(f, a) - decay_power(f, b) + w,
    )
}

/// Convergence pre-check of `∫ |f|^p r^w dr`.
fn check_power(what: &str, f: &dyn RadialProfile, p: f64, w: f64) -> Result<()> {
    check_exponents(what, p * f.origin_exponent() + w, -p * f.decay_exponent() + w)
}

/// `∫_0^∞ g(r, jet) dr` for several integrands at once.
fn radial_integrals<F>(f: &dyn RadialProfile, dim: usize, mut g: F, cfg: &QuadConfig) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64; 5], &mut [f64]),
{
    Ok(integrate_vec(dim, |r, out| g(r, &f.jet(r), out), cfg)?
        .into_iter()
        .map(|q| q.value)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonCheck {
    /// `∫|x|^{2α−β}|Δu|² / ‖u‖²`.
    pub ratio: f64,
    /// `C = 1 + |α| + E(|α| + α²)`.
    pub bound: f64,
    pub pass: bool,
}

/// Compares the unweighted-operator energy with `‖u‖²`.
pub fn check_laplacian_comparison(u: &TestFunction, p: &Params) -> Result<ComparisonCheck> {
    check_laplacian_comparison_with(u, p, &QuadConfig::default())
}

pub fn check_laplacian_comparison_with(u: &TestFunction, p: &Params, cfg: &QuadConfig) -> Result<ComparisonCheck> {
    let f = &*u.radial_part;
    let den = mode_radial_energy(f, u.mode_k, p, cfg)?;
    // |x|^{2α−β}|Δu|² is the same energy with α = 0 inside the operator
    let lam = u.lambda(p.n());
    let nf = p.nf();
    let w = nf + 2.0 * p.alpha() - p.beta() - 1.0;
    check_term("Laplacian energy", f, 2, 2, w)?;
    let num = radial_integrals(
        f,
        1,
        |r, j, out| {
            let l = (j[2] + (nf - 1.0) * j[1] / r - lam * j[0] / (r * r)) * r.powf(0.5 * w);
            out[0] = l * l;
        },
        cfg,
    )?[0];
    if !(den > 0.0) {
        return domain("comparison on the zero function");
    }
    let ratio = num / den;
    let bound = hardy_constants(p).c;
    Ok(ComparisonCheck {
        ratio,
        bound,
        pass: ratio <= bound + 1e-10,
    })
}

/// Relative defect of
/// `∫ |x|^{α−β/2−2} w u = γ(N+2α−β−4)/2 ∫ |x|^{2α−β−4} u² + ∫ |x|^{2α−β−2} |∇u|²`
/// with `w = −|x|^{−β/2} div(|x|^α ∇u)` and `γ = 2 + β − α`.
pub fn check_hardy_identity(u: &TestFunction, p: &Params) -> Result<f64> {
    check_hardy_identity_with(u, p, &QuadConfig::default())
}

pub fn check_hardy_identity_with(u: &TestFunction, p: &Params, cfg: &QuadConfig) -> Result<f64> {
    let f = &*u.radial_part;
    let (nf, a, b) = (p.nf(), p.alpha(), p.beta());
    let lam = u.lambda(p.n());
    let c = nf + 2.0 * a - b - 3.0;
    check_term("Hardy identity, left side", f, 0, 2, c)?;
    check_term("Hardy identity, potential", f, 0, 0, c - 2.0)?;
    check_term("Hardy identity, gradient", f, 1, 1, c)?;
    let v = radial_integrals(
        f,
        3,
        |r, j, out| {
            let sc = r.powf(0.5 * c);
            let (f0, f1) = (j[0] * sc, j[1] * sc);
            let div = j[2] * sc + (nf - 1.0 + a) * f1 / r - lam * f0 / (r * r);
            out[0] = -div * f0;
            out[1] = f0 * f0 / (r * r);
            out[2] = f1 * f1 + lam * f0 * f0 / (r * r);
        },
        cfg,
    )?;
    let k = p.gamma_exp() * (nf + 2.0 * a - b - 4.0) / 2.0;
    Ok(rel_defect(v[0], k * v[1] + v[2]))
}

/// Relative defect of the expansion
/// `‖u‖² = ∫|x|^{2α−β}|Δu|² + α(N−4+2α−β)∫|x|^{2α−β−2}|∇u|² + α(2β−3α+4)∫|x|^{2α−β−4}(x·∇u)²`.
pub fn check_expansion(u: &TestFunction, p: &Params) -> Result<f64> {
    check_expansion_with(u, p, &QuadConfig::default())
}

pub fn check_expansion_with(u: &TestFunction, p: &Params, cfg: &QuadConfig) -> Result<f64> {
    let f = &*u.radial_part;
    let (nf, a, b) = (p.nf(), p.alpha(), p.beta());
    let lam = u.lambda(p.n());
    let lhs = mode_radial_energy(f, u.mode_k, p, cfg)?;
    let w = nf + 2.0 * a - b - 1.0;
    check_term("expansion, Laplacian", f, 2, 2, w)?;
    check_term("expansion, gradient", f, 1, 1, w - 2.0)?;
    check_term("expansion, angular gradient", f, 0, 0, w - 4.0)?;
    let v = radial_integrals(
        f,
        3,
        |r, j, out| {
            let sw = r.powf(0.5 * w);
            let r2 = r * r;
            let (f0, f1) = (j[0] * sw, j[1] * sw);
            let l = j[2] * sw + (nf - 1.0) * f1 / r - lam * f0 / r2;
            out[0] = l * l;
            out[1] = (f1 * f1 + lam * f0 * f0 / r2) / r2;
            out[2] = f1 * f1 / r2;
        },
        cfg,
    )?;
    let rhs = v[0] + a * (nf - 4.0 + 2.0 * a - b) * v[1] + a * (2.0 * b - 3.0 * a + 4.0) * v[2];
    Ok(rel_defect(lhs, rhs))
}

/// Relative defect of `(N−4)∫|x|^{−2}|∇v|² = 2∫(x·∇v) div(|x|^{−2}∇v)`.
pub fn check_gradient_identity(v: &TestFunction, n: u32) -> Result<f64> {
    check_gradient_identity_with(v, n, &QuadConfig::default())
}

pub fn check_gradient_identity_with(v: &TestFunction, n: u32, cfg: &QuadConfig) -> Result<f64> {
    if n < 5 {
        return domain(format!("gradient identity needs N >= 5, got {n}"));
    }
    let f = &*v.radial_part;
    let nf = n as f64;
    let lam = v.lambda(n);
    check_term("gradient identity, gradient", f, 1, 1, nf - 3.0)?;
    check_term("gradient identity, angular part", f, 0, 0, nf - 5.0)?;
    check_term("gradient identity, right side", f, 1, 2, nf - 2.0)?;
    let x = radial_integrals(
        f,
        2,
        |r, j, out| {
            let r2 = r * r;
            let sn = r.powf(0.5 * (nf - 3.0));
            let (f0, f1, f2) = (j[0] * sn, j[1] * sn, j[2] * sn);
            out[0] = f1 * f1 + lam * f0 * f0 / r2;
            out[1] = r * f1 * (f2 + (nf - 3.0) * f1 / r - lam * f0 / r2);
        },
        cfg,
    )?;
    Ok(rel_defect((nf - 4.0) * x[0], 2.0 * x[1]))
}

/// Constants of the Rellich–Sobolev inequality at `μ = (N−4)α/(2−N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RellichSobolevConstants {
    pub mu: f64,
    pub c_mu1: f64,
    pub c_mu2: f64,
    /// Exponent of the substitution `u = |x|^η v`, `η = −(N−4)α/(2(N−2))`.
    pub eta: f64,
}

fn constants_from_mu(n: u32, mu: f64) -> (f64, f64) {
    let nf = n as f64;
    let d = nf - 4.0;
    let t = mu * (2.0 * d - mu);
    let c1 = (nf * nf - 4.0 * nf + 8.0) / (2.0 * d * d) * t;
    let c2 = nf * nf / (16.0 * d * d) * t * t - (nf - 2.0) / 2.0 * t;
    (c1, c2)
}

pub fn rellich_sobolev_constants(n: u32, alpha: f64) -> Result<RellichSobolevConstants> {
    let nf = n as f64;
    if n < 5 || !(alpha > 2.0 - nf && alpha < 0.0) {
        return domain(format!("need N >= 5 and 2 - N < alpha < 0, got N={n}, alpha={alpha}"));
    }
    let mu = (nf - 4.0) * alpha / (2.0 - nf);
    let (c_mu1, c_mu2) = constants_from_mu(n, mu);
    Ok(RellichSobolevConstants {
        mu,
        c_mu1,
        c_mu2,
        eta: -(nf - 4.0) * alpha / (2.0 * (nf - 2.0)),
    })
}

/// For `u = |x|^η v` and `β = Nα/(N−2)`: the larger relative defect of
/// `∫|x|^β|u|^{2N/(N−4)} = ∫|v|^{2N/(N−4)}` and of
/// `‖u‖² = ∫[Δv + (2η+α)|x|^{−2}(x·∇v) + η(N+α+η−2)|x|^{−2}v]²`.
pub fn check_substitution(v: &TestFunction, n: u32, alpha: f64) -> Result<f64> {
    check_substitution_with(v, n, alpha, &QuadConfig::default())
}

pub fn check_substitution_with(v: &TestFunction, n: u32, alpha: f64, cfg: &QuadConfig) -> Result<f64> {
    if v.mode_k != 0 {
        return domain("substitution check takes a radial function");
    }
    let c = rellich_sobolev_constants(n, alpha)?;
    let nf = n as f64;
    let p = validate(n, alpha, beta_upper(n, alpha))?;
    let f = &*v.radial_part;
    let u = PowerWeighted { inner: f, power: c.eta };
    let ss = 2.0 * nf / (nf - 4.0);
    let beta = p.beta();
    check_power("substituted norm", &u, ss, beta + nf - 1.0)?;
    check_power("substituted norm, original", f, ss, nf - 1.0)?;
    check_term("substituted energy", f, 2, 2, nf - 1.0)?;
    check_term("substituted energy, potential", f, 0, 0, nf - 5.0)?;
    let b1 = 2.0 * c.eta + alpha;
    let b0 = c.eta * (nf + alpha + c.eta - 2.0);
    let x = radial_integrals(
        f,
        3,
        |r, j, out| {
            let w = r.powf(nf - 1.0);
            let uv = u.eval(r);
            out[0] = uv.abs().powf(ss) * r.powf(beta) * w;
            out[1] = j[0].abs().powf(ss) * w;
            let l = j[2] + (nf - 1.0) * j[1] / r + b1 * j[1] / r + b0 * j[0] / (r * r);
            out[2] = l * l * w;
        },
        cfg,
    )?;
    let energy = mode_radial_energy(&u, 0, &p, cfg)?;
    Ok(rel_defect(x[0], x[1]).max(rel_defect(energy, x[2])))
}

/// `A r^{−μ/2} (ν + r^{2(1−μ/(N−4))})^{−(N−4)/2}`.
pub fn rellich_sobolev_extremal(n: u32, mu: f64, a: f64, nu: f64) -> Result<AlgebraicProfile> {
    let d = n as f64 - 4.0;
    if n < 5 || !(mu > 0.0 && mu < d) || !(nu > 0.0) {
        return domain(format!(
            "need N >= 5, 0 < mu < N - 4, nu > 0; got N={n}, mu={mu}, nu={nu}"
        ));
    }
    let g = 2.0 * (1.0 - mu / d);
    let kappa = d / 2.0;
    // (ν + r^g)^{−κ} = ν^{−κ} (1 + (ν^{−1/g} r)^g)^{−κ}
    AlgebraicProfile::new(vec![AlgebraicTerm::new(
        a * nu.powf(-kappa),
        -mu / 2.0,
        nu.powf(-1.0 / g),
        g,
        kappa,
    )])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RellichSobolevCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Both sides of the Rellich–Sobolev inequality for radial `v`.
pub fn check_rellich_sobolev<P: RadialProfile + ?Sized>(v: &P, n: u32, mu: f64) -> Result<RellichSobolevCheck> {
    check_rellich_sobolev_with(v, n, mu, &QuadConfig::default())
}

pub fn check_rellich_sobolev_with<P: RadialProfile + ?Sized>(
    v: &P,
    n: u32,
    mu: f64,
    cfg: &QuadConfig,
) -> Result<RellichSobolevCheck> {
    let nf = n as f64;
    if n < 5 || !(mu > 0.0 && mu < nf - 4.0) {
        return domain(format!("need N >= 5 and 0 < mu < N - 4, got N={n}, mu={mu}"));
    }
    let (c1, c2) = constants_from_mu(n, mu);
    let ss = 2.0 * nf / (nf - 4.0);
    let w = nf - 1.0;
    let f: &dyn RadialProfile = &DynRef(v);
    check_term("Rellich-Sobolev, Laplacian", f, 2, 2, w)?;
    check_term("Rellich-Sobolev, gradient", f, 1, 1, w - 2.0)?;
    check_term("Rellich-Sobolev, potential", f, 0, 0, w - 4.0)?;
    check_power("Rellich-Sobolev, Lebesgue norm", f, ss, w)?;
    let x = radial_integrals(
        f,
        4,
        |r, j, out| {
            let rw = r.powf(w);
            let r2 = r * r;
            let l = j[2] + (nf - 1.0) * j[1] / r;
            out[0] = l * l * rw;
            out[1] = j[1] * j[1] * rw / r2;
            out[2] = j[0] * j[0] * rw / (r2 * r2);
            out[3] = j[0].abs().powf(ss) * rw;
        },
        cfg,
    )?;
    let omega = crate::params::sphere_area(n);
    let lhs = omega * (x[0] - c1 * x[1] + c2 * x[2]);
    let rhs = (1.0 - mu / (nf - 4.0)).powf(4.0 - 4.0 / nf) * s_0_closed(n)? * (omega * x[3]).powf((nf - 4.0) / nf);
    Ok(RellichSobolevCheck {
        lhs,
        rhs,
        pass: lhs >= rhs * (1.0 - 1e-8),
    })
}

/// Forwards to a possibly unsized profile so it can be used as `&dyn`.
struct DynRef<'a, P: ?Sized>(&'a P);

impl<P: RadialProfile + ?Sized> RadialProfile for DynRef<'_, P> {
    fn jet(&self, r: f64) -> [f64; 5] {
        self.0.jet(r)
    }
    fn origin_exponent(&self) -> f64 {
        self.0.origin_exponent()
    }
    fn origin_increment_exponent(&self) -> f64 {
        self.0.origin_increment_exponent()
    }
    fn decay_exponent(&self) -> f64 {
        self.0.decay_exponent()
    }
    fn slope_decay_exponent(&self) -> f64 {
        self.0.slope_decay_exponent()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EqualityCaseCheck {
    /// `quotient_radial(U)` at `β = Nα/(N−2)`.
    pub quotient: f64,
    /// `(1 + α/(N−2))^{4−4/N} S_0(N)`.
    pub constant: f64,
    pub defect: f64,
    /// `|s_r_closed − constant| / constant`.
    pub closed_form_defect: f64,
}

/// Equality at the radial extremal on the upper boundary with `α < 0`.
pub fn check_equality_case(n: u32, alpha: f64) -> Result<EqualityCaseCheck> {
    check_equality_case_with(n, alpha, &QuadConfig::default())
}

pub fn check_equality_case_with(n: u32, alpha: f64, cfg: &QuadConfig) -> Result<EqualityCaseCheck> {
    let nf = n as f64;
    if n < 5 || !(alpha > 2.0 - nf && alpha < 0.0) {
        return domain(format!("need N >= 5 and 2 - N < alpha < 0, got N={n}, alpha={alpha}"));
    }
    let p = validate(n, alpha, beta_upper(n, alpha))?;
    let u = extremal(&p, 1.0)?;
    let quotient = quotient_radial_with(&u, &p, cfg)?;
    let constant = (1.0 + alpha / (nf - 2.0)).powf(4.0 - 4.0 / nf) * s_0_closed(n)?;
    Ok(EqualityCaseCheck {
        quotient,
        constant,
        defect: ((quotient - constant) / constant).abs(),
        closed_form_defect: ((s_r_closed(&p) - constant) / constant).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radial(f: AlgebraicProfile) -> TestFunction {
        TestFunction::new(f, 0, "t")
    }

    #[test]
    fn comparison_examples() {
        let p = validate(5, 1.0, 1.0).unwrap();
        let u = radial(AlgebraicProfile::single(1.0, 0.0, 1.0, 2.0, 3.0).unwrap());
        let c = check_laplacian_comparison(&u, &p).unwrap();
        assert_eq!(c.bound, 4.0);
        assert!(c.pass && c.ratio > 0.0);
        let p0 = validate(5, 0.0, -0.7).unwrap();
        let c = check_laplacian_comparison(&u, &p0).unwrap();
        assert!((c.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constants_example() {
        let c = rellich_sobolev_constants(5, -1.0).unwrap();
        assert!((c.mu - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.c_mu1 - 65.0 / 18.0).abs() < 1e-14);
        assert!((c.c_mu2 - (625.0 / 1296.0 - 5.0 / 6.0)).abs() < 1e-14);
        assert!((c.eta - 1.0 / 6.0).abs() < 1e-15);
        assert!(rellich_sobolev_constants(5, 0.5).is_err());
    }

    #[test]
    fn zero_function_defects_vanish() {
        let z = radial(AlgebraicProfile::single(0.0, 0.0, 1.0, 2.0, 3.0).unwrap());
        let p = validate(5, 1.0, 1.0).unwrap();
        assert_eq!(check_hardy_identity(&z, &p).unwrap(), 0.0);
        assert_eq!(check_gradient_identity(&z, 5).unwrap(), 0.0);
    }
}
