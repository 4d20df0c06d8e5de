//! Closed-form extremals, kernel modes, sharp constants and the fourth-order
//! Euler–Lagrange residual.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dd::{Dd, Poly};
use crate::error::{domain, Result};
use crate::params::{sphere_area, Params};
use crate::profile::{softplus, AlgebraicProfile, AlgebraicTerm, PowerWeighted, RadialProfile, WeightedLaplacian};
use crate::specfun::ln_gamma_pos;

/// `Γ_M = (M − 4)(M − 2) M (M + 2)`.
pub fn gamma_m(m: f64) -> Result<f64> {
    if !(m > 4.0) {
        return domain(format!("M must exceed 4, got {m}"));
    }
    Ok((m - 4.0) * (m - 2.0) * m * (m + 2.0))
}

/// `C = [(N−4+2α−β)(N−2+α)(N+β)(N+2−α+2β)]^{(N−4+2α−β)/(4(2+β−α))}`.
pub fn amplitude_constant(p: &Params) -> f64 {
    let (nf, a, b) = (p.nf(), p.alpha(), p.beta());
    let base = p.decay_sum() * (nf - 2.0 + a) * (nf + b) * (nf + 2.0 - a + 2.0 * b);
    base.powf(p.decay_sum() / (4.0 * p.gamma_exp()))
}

/// `B(M) = Γ_M [Γ(M/2)² / (2 Γ(M))]^{4/M}`.
pub fn b_closed(m: f64) -> Result<f64> {
    let g = gamma_m(m)?;
    let ln_ratio = 2.0 * ln_gamma_pos(m / 2.0) - 2f64.ln() - ln_gamma_pos(m);
    Ok(g * (4.0 / m * ln_ratio).exp())
}

/// Sharp constant over radial functions,
/// `S_r = q^{4/M − 4} ω^{4/M} B(M)` with `q = 2/(2+β−α)`.
pub fn s_r_closed(p: &Params) -> f64 {
    let d = p.derive();
    let ln = (4.0 / d.m - 4.0) * d.q.ln() + 4.0 / d.m * d.omega.ln();
    // M > 4 on every admissible triple
    ln.exp() * b_closed(d.m).unwrap_or(f64::NAN)
}

/// `S_0 = π² N (N−4)(N²−4) (Γ(N/2)/Γ(N))^{4/N}`.
pub fn s_0_closed(n: u32) -> Result<f64> {
    if n < 5 {
        return domain(format!("S_0 needs N >= 5, got {n}"));
    }
    let nf = n as f64;
    let ln_ratio = ln_gamma_pos(nf / 2.0) - ln_gamma_pos(nf);
    Ok(PI * PI * nf * (nf - 4.0) * (nf * nf - 4.0) * (4.0 / nf * ln_ratio).exp())
}

/// The extremal `U_λ(r) = λ^{(N−4+2α−β)/2} C (1 + (λr)^γ)^{−κ}`,
/// `γ = 2+β−α`, `κ = (N−4+2α−β)/γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalProfile {
    params: Params,
    amplitude: f64,
    lambda: f64,
    shape: AlgebraicProfile,
    operator: NestedPoly,
}

/// `div(|x|^α ∇(|x|^{−β} div(|x|^α ∇U)))` written as
/// `r^{power} (1 + x)^{−κ} F(v)` with `x = (λr)^γ`, `v = 1/(1 + x)`.
/// `F` is also kept in `w = 1 − v` for evaluation where `x < 1`.
#[derive(Debug, Clone, PartialEq)]
struct NestedPoly {
    power: f64,
    in_v: Poly,
    in_w: Poly,
}

impl NestedPoly {
    fn new(p: &Params) -> Self {
        let n = Dd::from(p.nf());
        let a = Dd::from(p.alpha());
        let b = Dd::from(p.beta());
        let two = Dd::from(2.0);
        let decay = n - Dd::from(4.0) + two * a - b;
        let g = two + b - a;
        let c = n - Dd::ONE + a;
        // d/dr of r^P (1+x)^{-κ} F(v) is r^{P-1} (1+x)^{-κ} [(P - κγ(1-v)) F - γ v(1-v) F']
        let deriv = |pw: Dd, f: &Poly| {
            f.mul_quadratic([pw - decay, decay, Dd::ZERO])
                .add(&f.derivative().mul_quadratic([Dd::ZERO, -g, g]))
        };
        let wl = |pw: Dd, f: &Poly| {
            let f1 = deriv(pw, f);
            let f2 = deriv(pw - Dd::ONE, &f1);
            (pw - two + a, f2.add(&f1.scale(c)))
        };
        let (pw, f) = wl(Dd::ZERO, &Poly::constant(Dd::ONE));
        let (pw, f) = wl(pw - b, &f);
        NestedPoly {
            power: pw.to_f64(),
            in_w: f.reflect(),
            in_v: f,
        }
    }
}

impl ExtremalProfile {
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

pub fn extremal(p: &Params, lambda: f64) -> Result<ExtremalProfile> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("scaling must be positive, got {lambda}"));
    }
    let amplitude = amplitude_constant(p);
    let g = p.gamma_exp();
    let kappa = p.decay_sum() / g;
    let coeff = amplitude * lambda.powf(p.decay_sum() / 2.0);
    let shape = AlgebraicProfile::single(coeff, 0.0, lambda, g, kappa)?;
    Ok(ExtremalProfile {
        params: *p,
        amplitude,
        lambda,
        shape,
        operator: NestedPoly::new(p),
    })
}

impl RadialProfile for ExtremalProfile {
    fn jet(&self, r: f64) -> [f64; 5] {
        self.shape.jet(r)
    }
    fn origin_exponent(&self) -> f64 {
        0.0
    }
    fn origin_increment_exponent(&self) -> f64 {
        self.shape.origin_increment_exponent()
    }
    fn decay_exponent(&self) -> f64 {
        self.shape.decay_exponent()
    }
    fn nested_operator(&self, p: &Params, r: f64) -> Option<f64> {
        if p != &self.params {
            return None;
        }
        let t = self.shape.terms()[0];
        let y = t.gamma * (self.lambda * r).ln();
        let f = if y < 0.0 {
            self.operator.in_w.eval(1.0 / (1.0 + (-y).exp()))
        } else {
            self.operator.in_v.eval(1.0 / (1.0 + y.exp()))
        };
        let ln_prefactor = self.operator.power * r.ln() - t.kappa * softplus(y);
        Some(t.coeff * ln_prefactor.exp() * f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KernelKind {
    /// Scaling direction `Z_0`.
    Z0,
    /// Radial factor of `Z_i`; the angular factor is `x_i/|x|`.
    Z1Radial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelMode {
    pub kind: KernelKind,
    shape: AlgebraicProfile,
}

impl KernelMode {
    /// Spherical-harmonic degree of the mode.
    pub fn degree(&self) -> u32 {
        match self.kind {
            KernelKind::Z0 => 0,
            KernelKind::Z1Radial => 1,
        }
    }
}

pub fn kernel_mode(p: &Params, kind: KernelKind) -> KernelMode {
    let g = p.gamma_exp();
    let kz = (p.nf() - 2.0 + p.alpha()) / g;
    let terms = match kind {
        KernelKind::Z0 => vec![
            AlgebraicTerm::new(1.0, 0.0, 1.0, g, kz),
            AlgebraicTerm::new(-1.0, g, 1.0, g, kz),
        ],
        KernelKind::Z1Radial => vec![AlgebraicTerm::new(1.0, g / 2.0, 1.0, g, kz)],
    };
    KernelMode {
        kind,
        shape: AlgebraicProfile::new(terms).expect("finite terms"),
    }
}

impl RadialProfile for KernelMode {
    fn jet(&self, r: f64) -> [f64; 5] {
        self.shape.jet(r)
    }
    fn origin_exponent(&self) -> f64 {
        self.shape.origin_exponent()
    }
    fn origin_increment_exponent(&self) -> f64 {
        self.shape.origin_increment_exponent()
    }
    fn decay_exponent(&self) -> f64 {
        self.shape.decay_exponent()
    }
}

/// `X_1(s) = s (1+s²)^{−(M−2)/2}`, the mode-1 kernel in the `s` variable.
pub fn x1_profile(m: f64) -> AlgebraicProfile {
    AlgebraicProfile::single(1.0, 1.0, 1.0, 2.0, (m - 2.0) / 2.0).expect("finite terms")
}

/// `X_0(s) = (1 − s²)(1+s²)^{−(M−2)/2}`.
pub fn x0_profile(m: f64) -> AlgebraicProfile {
    let k = (m - 2.0) / 2.0;
    AlgebraicProfile::new(vec![
        AlgebraicTerm::new(1.0, 0.0, 1.0, 2.0, k),
        AlgebraicTerm::new(-1.0, 2.0, 1.0, 2.0, k),
    ])
    .expect("finite terms")
}

/// Radial form of `div(|x|^α ∇u)`.
pub fn weighted_laplacian<P: RadialProfile>(u: P, alpha: f64, n: u32) -> WeightedLaplacian<P> {
    WeightedLaplacian::new(u, alpha, n)
}

/// 25 geometric points from `1e-2` to `1e2`.
pub fn default_samples() -> Vec<f64> {
    (0..25).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 24.0)).collect()
}

/// Both sides of the fourth-order equation at `r`:
/// `div(|x|^α ∇(|x|^{−β} div(|x|^α ∇u)))` and `|x|^β |u|^{p*−2} u`.
pub fn pwh_sides<P: RadialProfile>(u: &P, p: &Params, r: f64) -> (f64, f64) {
    let inner = WeightedLaplacian::new(u, p.alpha(), p.n());
    let middle = PowerWeighted {
        inner,
        power: -p.beta(),
    };
    let outer = WeightedLaplacian::new(middle, p.alpha(), p.n());
    let lhs = u.nested_operator(p, r).unwrap_or_else(|| outer.eval(r));
    let ps = p.derive().p_star;
    let v = u.eval(r);
    let rhs = r.powf(p.beta()) * v.abs().powf(ps - 2.0) * v;
    (lhs, rhs)
}

/// Largest relative residual `|L − R| / (|L| + |R| + 1e-300)` over `samples`.
pub fn pwh_residual<P: RadialProfile>(u: &P, p: &Params, samples: &[f64]) -> f64 {
    samples
        .iter()
        .map(|&r| {
            let (l, rr) = pwh_sides(u, p, r);
            (l - rr).abs() / (l.abs() + rr.abs() + 1e-300)
        })
        .fold(0.0, f64::max)
}

/// Surface area of `S^{N−2}`, the measure of the polar-angle slices.
pub fn slice_area(n: u32) -> f64 {
    let h = (n as f64 - 1.0) / 2.0;
    (2f64.ln() + h * PI.ln() - ln_gamma_pos(h)).exp()
}

/// `ω/N`, the integral of `(x_i/|x|)²` over the unit sphere.
pub fn mode_one_angular(n: u32) -> f64 {
    sphere_area(n) / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::validate;
    use crate::profile::testing::{assert_derivatives, assert_exponents};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn amplitude_examples() {
        let p = validate(5, 1.0, 1.0).unwrap();
        assert!(rel(amplitude_constant(&p), 384f64.powf(0.25)) < 1e-15);
        assert!(rel(amplitude_constant(&p), 4.426_727_678_801_286_4) < 1e-14);
        let p = validate(5, 0.0, 0.0).unwrap();
        // 105^{1/8}; mpmath
        assert!(rel(amplitude_constant(&p), 1.789_157_866_970_849) < 1e-14);
    }

    #[test]
    fn closed_constants() {
        assert!(rel(b_closed(5.0).unwrap(), 7.481_940_131_235_264_4) < 1e-13);
        assert!(rel(b_closed(6.0).unwrap(), 25.055_152_903_480_727) < 1e-13);
        assert!(rel(b_closed(4.5).unwrap(), 2.783_717_552_701_041_4) < 1e-13);
        assert!(rel(b_closed(8.0).unwrap(), 114.741_946_496_101_79) < 1e-13);
        assert!(b_closed(4.0).is_err());
        assert!(rel(s_0_closed(5).unwrap(), 102.383_273_440_582_93) < 1e-13);
        let p = validate(5, 1.0, 1.0).unwrap();
        assert!(rel(s_r_closed(&p), 221.688_267_419_792_82) < 1e-13);
        let p = validate(5, -1.0, -5.0 / 3.0).unwrap();
        assert!(rel(s_r_closed(&p), 27.972_867_094_209_949) < 1e-13);
        assert_eq!(gamma_m(6.0).unwrap(), 384.0);
        assert_eq!(gamma_m(5.0).unwrap(), 105.0);
    }

    #[test]
    fn extremal_values() {
        let p = validate(5, 1.0, 1.0).unwrap();
        let u = extremal(&p, 1.0).unwrap();
        assert!(rel(u.eval(1e-12), 4.426_727_678_801_286_4) < 1e-12);
        assert!(rel(u.eval(1.0), 2.213_363_839_400_643_2) < 1e-14);
        let u2 = extremal(&p, 2.0).unwrap();
        for r in [0.1, 0.9, 4.0] {
            assert!(rel(u2.eval(r), 2f64.powf(1.0) * u.eval(2.0 * r)) < 1e-14);
        }
        for r in [0.3, 1.0, 3.0] {
            assert_derivatives(&u, r, 1e-6);
        }
        assert_exponents(&u);
        assert!(extremal(&p, 0.0).is_err());
    }

    #[test]
    fn kernel_values() {
        let p = validate(5, 1.0, 1.0).unwrap();
        let z0 = kernel_mode(&p, KernelKind::Z0);
        let z1 = kernel_mode(&p, KernelKind::Z1Radial);
        assert!((z0.eval(1e-14) - 1.0).abs() < 1e-12);
        assert_eq!(z0.eval(1.0), 0.0);
        assert!(rel(z1.eval(1.0), 0.25) < 1e-15);
        assert_exponents(&z1);
        assert_eq!(z0.degree(), 0);
        assert_eq!(z1.degree(), 1);
    }

    #[test]
    fn extremal_solves_equation() {
        let p = validate(5, 1.0, 1.0).unwrap();
        let u = extremal(&p, 1.0).unwrap();
        let res = pwh_residual(&u, &p, &[0.1, 0.5, 1.0, 2.0, 10.0]);
        assert!(res < 1e-8, "{res}");
        let bumped = crate::profile::Scaled { inner: &u, factor: 1.1 };
        assert!(pwh_residual(&bumped, &p, &default_samples()) >= 0.01);
    }

    #[test]
    fn samples_grid() {
        let s = default_samples();
        assert_eq!(s.len(), 25);
        assert!((s[0] - 1e-2).abs() < 1e-17 && (s[24] - 1e2).abs() < 1e-12);
    }

    #[test]
    fn slice_area_small_dimensions() {
        // S^1 and S^2
        assert!((slice_area(3) - 2.0 * PI).abs() < 1e-14);
        assert!((slice_area(4) - 4.0 * PI).abs() < 1e-13);
    }
}
