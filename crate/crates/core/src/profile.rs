//! Radial profiles `u(r)` on `(0, ∞)` with derivatives up to order four.

use std::sync::Arc;

use crate::error::{domain, Result};
use crate::params::Params;

/// A smooth radial function with analytic derivatives.
///
/// `jet(r)` returns `[u, u', u'', u''', u'''']`; entries above
/// [`max_order`](RadialProfile::max_order) are NaN. The exponent methods
/// describe the endpoint asymptotics used to pre-check convergence.
pub trait RadialProfile: Send + Sync {
    fn jet(&self, r: f64) -> [f64; 5];

    fn max_order(&self) -> usize {
        4
    }

    fn eval(&self, r: f64) -> f64 {
        self.jet(r)[0]
    }

    fn deriv(&self, r: f64, order: usize) -> f64 {
        if order > 4 {
            return f64::NAN;
        }
        self.jet(r)[order]
    }

    /// Leading power of `u` at the origin; 0 when `u(0) != 0`.
    fn origin_exponent(&self) -> f64;

    /// Leading power of `u(r) - u(0)` at the origin.
    fn origin_increment_exponent(&self) -> f64 {
        self.origin_exponent()
    }

    /// `d` such that `|u(r)| ~ r^{-d}` as `r -> ∞`; infinite for faster decay.
    fn decay_exponent(&self) -> f64;

    /// `d` such that `|u'(r)| ~ r^{-d-1}` as `r -> ∞`.
    fn slope_decay_exponent(&self) -> f64 {
        self.decay_exponent()
    }

    /// `div(|x|^α ∇(|x|^{−β} div(|x|^α ∇u)))` at `r`, for profiles that can
    /// evaluate it more accurately than nested finite-precision derivatives.
    fn nested_operator(&self, _p: &Params, _r: f64) -> Option<f64> {
        None
    }
}

impl<P: RadialProfile + ?Sized> RadialProfile for &P {
    fn jet(&self, r: f64) -> [f64; 5] {
        (**self).jet(r)
    }
    fn max_order(&self) -> usize {
        (**self).max_order()
    }
    fn origin_exponent(&self) -> f64 {
        (**self).origin_exponent()
    }
    fn origin_increment_exponent(&self) -> f64 {
        (**self).origin_increment_exponent()
    }
    fn decay_exponent(&self) -> f64 {
        (**self).decay_exponent()
    }
    fn slope_decay_exponent(&self) -> f64 {
        (**self).slope_decay_exponent()
    }
    fn nested_operator(&self, p: &Params, r: f64) -> Option<f64> {
        (**self).nested_operator(p, r)
    }
}

impl<P: RadialProfile + ?Sized> RadialProfile for Arc<P> {
    fn jet(&self, r: f64) -> [f64; 5] {
        (**self).jet(r)
    }
    fn max_order(&self) -> usize {
        (**self).max_order()
    }
    fn origin_exponent(&self) -> f64 {
        (**self).origin_exponent()
    }
    fn origin_increment_exponent(&self) -> f64 {
        (**self).origin_increment_exponent()
    }
    fn decay_exponent(&self) -> f64 {
        (**self).decay_exponent()
    }
    fn slope_decay_exponent(&self) -> f64 {
        (**self).slope_decay_exponent()
    }
    fn nested_operator(&self, p: &Params, r: f64) -> Option<f64> {
        (**self).nested_operator(p, r)
    }
}

impl<P: RadialProfile + ?Sized> RadialProfile for Box<P> {
    fn jet(&self, r: f64) -> [f64; 5] {
        (**self).jet(r)
    }
    fn max_order(&self) -> usize {
        (**self).max_order()
    }
    fn origin_exponent(&self) -> f64 {
        (**self).origin_exponent()
    }
    fn origin_increment_exponent(&self) -> f64 {
        (**self).origin_increment_exponent()
    }
    fn decay_exponent(&self) -> f64 {
        (**self).decay_exponent()
    }
    fn slope_decay_exponent(&self) -> f64 {
        (**self).slope_decay_exponent()
    }
    fn nested_operator(&self, p: &Params, r: f64) -> Option<f64> {
        (**self).nested_operator(p, r)
    }
}

/// Falling factorials `x (x-1) ... (x-j+1)` for `j = 0..=4`.
fn falling(x: f64) -> [f64; 5] {
    let mut out = [1.0; 5];
    for j in 1..5 {
        out[j] = out[j - 1] * (x - (j - 1) as f64);
    }
    out
}

const BINOM: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

/// Given `g_j = r^j h^{(j)}(r) / h(r)`, returns `r^n (r^a h)^{(n)} / (r^a h)`.
fn leibniz_power(a: f64, g: &[f64; 5]) -> [f64; 5] {
    let fa = falling(a);
    let mut out = [0.0; 5];
    for n in 0..5 {
        for j in 0..=n {
            out[n] += BINOM[n][j] * fa[n - j] * g[j];
        }
    }
    out
}

/// `ln(1 + e^y)` without overflow.
pub(crate) fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

/// One term `c r^a (1 + (λ r)^γ)^{-κ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraicTerm {
    pub coeff: f64,
    pub power: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub kappa: f64,
}

impl AlgebraicTerm {
    pub fn new(coeff: f64, power: f64, lambda: f64, gamma: f64, kappa: f64) -> Self {
        Self {
            coeff,
            power,
            lambda,
            gamma,
            kappa,
        }
    }

    fn is_constant(&self) -> bool {
        self.power == 0.0 && (self.kappa == 0.0 || self.gamma == 0.0)
    }

    fn jet(&self, r: f64) -> [f64; 5] {
        let lr = r.ln();
        let y = self.gamma * (self.lambda.ln() + lr);
        // w = x / (1 + x) with x = (λ r)^γ
        let w = 1.0 / (1.0 + (-y).exp());
        let g = falling(self.gamma);
        let k = falling(-self.kappa);
        let (w2, w3, w4) = (w * w, w * w * w, w * w * w * w);
        let h = [
            1.0,
            k[1] * w * g[1],
            k[1] * w * g[2] + k[2] * w2 * g[1] * g[1],
            k[1] * w * g[3] + 3.0 * k[2] * w2 * g[1] * g[2] + k[3] * w3 * g[1].powi(3),
            k[1] * w * g[4]
                + k[2] * w2 * (4.0 * g[1] * g[3] + 3.0 * g[2] * g[2])
                + 6.0 * k[3] * w3 * g[1] * g[1] * g[2]
                + k[4] * w4 * g[1].powi(4),
        ];
        let d = leibniz_power(self.power, &h);
        let ln_base = self.power * lr - self.kappa * softplus(y);
        let mut out = [0.0; 5];
        let mut ln_scale = ln_base;
        for n in 0..5 {
            out[n] = self.coeff * d[n] * ln_scale.exp();
            ln_scale -= lr;
        }
        out
    }
}

/// Finite sum of [`AlgebraicTerm`]s; covers the extremal family, the kernel
/// modes and most test functions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlgebraicProfile {
    terms: Vec<AlgebraicTerm>,
}

impl AlgebraicProfile {
    pub fn new(terms: Vec<AlgebraicTerm>) -> Result<Self> {
        for t in &terms {
            let ok = [t.coeff, t.power, t.gamma, t.kappa].iter().all(|v| v.is_finite())
                && t.lambda.is_finite()
                && t.lambda > 0.0;
            if !ok {
                return domain(format!("invalid algebraic term {t:?}"));
            }
        }
        Ok(Self { terms })
    }

    /// `c r^a (1 + (λ r)^γ)^{-κ}`.
    pub fn single(coeff: f64, power: f64, lambda: f64, gamma: f64, kappa: f64) -> Result<Self> {
        Self::new(vec![AlgebraicTerm::new(coeff, power, lambda, gamma, kappa)])
    }

    pub fn terms(&self) -> &[AlgebraicTerm] {
        &self.terms
    }

    fn live(&self) -> impl Iterator<Item = &AlgebraicTerm> {
        self.terms.iter().filter(|t| t.coeff != 0.0)
    }
}

impl RadialProfile for AlgebraicProfile {
    fn jet(&self, r: f64) -> [f64; 5] {
        let mut out = [0.0; 5];
        for t in &self.terms {
            let j = t.jet(r);
            for n in 0..5 {
                out[n] += j[n];
            }
        }
        out
    }

    fn origin_exponent(&self) -> f64 {
        self.live().map(|t| t.power).fold(f64::INFINITY, f64::min)
    }

    fn origin_increment_exponent(&self) -> f64 {
        self.live()
            .map(|t| {
                if t.power != 0.0 {
                    t.power
                } else if t.is_constant() {
                    f64::INFINITY
                } else {
                    t.gamma
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn decay_exponent(&self) -> f64 {
        self.live()
            .map(|t| t.kappa * t.gamma - t.power)
            .fold(f64::INFINITY, f64::min)
    }

    fn slope_decay_exponent(&self) -> f64 {
        self.live()
            .filter(|t| !t.is_constant())
            .map(|t| t.kappa * t.gamma - t.power)
            .fold(f64::INFINITY, f64::min)
    }
}

/// `c r^a exp(-b r^2)` with `b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProfile {
    pub coeff: f64,
    pub power: f64,
    pub rate: f64,
}

impl GaussianProfile {
    pub fn new(coeff: f64, power: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite() && coeff.is_finite() && power.is_finite()) {
            return domain(format!("invalid Gaussian profile ({coeff}, {power}, {rate})"));
        }
        Ok(Self { coeff, power, rate })
    }
}

impl RadialProfile for GaussianProfile {
    fn jet(&self, r: f64) -> [f64; 5] {
        let y = self.rate * r * r;
        let g = [
            1.0,
            -2.0 * y,
            -2.0 * y + 4.0 * y * y,
            12.0 * y * y - 8.0 * y * y * y,
            12.0 * y * y - 48.0 * y * y * y + 16.0 * y.powi(4),
        ];
        let d = leibniz_power(self.power, &g);
        let lr = r.ln();
        let mut ln_scale = self.power * lr - y;
        let mut out = [0.0; 5];
        for n in 0..5 {
            out[n] = self.coeff * d[n] * ln_scale.exp();
            ln_scale -= lr;
        }
        out
    }

    fn origin_exponent(&self) -> f64 {
        if self.coeff == 0.0 {
            f64::INFINITY
        } else {
            self.power
        }
    }

    fn origin_increment_exponent(&self) -> f64 {
        if self.power == 0.0 {
            2.0
        } else {
            self.origin_exponent()
        }
    }

    fn decay_exponent(&self) -> f64 {
        f64::INFINITY
    }
}

/// `c · u`.
#[derive(Debug, Clone)]
pub struct Scaled<P> {
    pub inner: P,
    pub factor: f64,
}

impl<P: RadialProfile> RadialProfile for Scaled<P> {
    fn jet(&self, r: f64) -> [f64; 5] {
        self.inner.jet(r).map(|v| self.factor * v)
    }
    fn nested_operator(&self, p: &Params, r: f64) -> Option<f64> {
        self.inner.nested_operator(p, r).map(|v| self.factor * v)
    }
    fn max_order(&self) -> usize {
        self.inner.max_order()
    }
    fn origin_exponent(&self) -> f64 {
        self.inner.origin_exponent()
    }
    fn origin_increment_exponent(&self) -> f64 {
        self.inner.origin_increment_exponent()
    }
    fn decay_exponent(&self) -> f64 {
        self.inner.decay_exponent()
    }
    fn slope_decay_exponent(&self) -> f64 {
        self.inner.slope_decay_exponent()
    }
}

/// `λ^e u(λ r)`.
#[derive(Debug, Clone)]
pub struct Dilated<P> {
    pub inner: P,
    pub lambda: f64,
    pub weight: f64,
}

impl<P: RadialProfile> RadialProfile for Dilated<P> {
    fn jet(&self, r: f64) -> [f64; 5] {
        let j = self.inner.jet(self.lambda * r);
        let mut c = self.lambda.powf(self.weight);
        let mut out = [0.0; 5];
        for n in 0..5 {
            out[n] = c * j[n];
            c *= self.lambda;
        }
        out
    }
    fn max_order(&self) -> usize {
        self.inner.max_order()
    }
    fn origin_exponent(&self) -> f64 {
        self.inner.origin_exponent()
    }
    fn origin_increment_exponent(&self) -> f64 {
        self.inner.origin_increment_exponent()
    }
    fn decay_exponent(&self) -> f64 {
        self.inner.decay_exponent()
    }
    fn slope_decay_exponent(&self) -> f64 {
        self.inner.slope_decay_exponent()
    }
}

/// `r^e · u`.
#[derive(Debug, Clone)]
pub struct PowerWeighted<P> {
    pub inner: P,
    pub power: f64,
}

impl<P: RadialProfile> RadialProfile for PowerWeighted<P> {
    fn jet(&self, r: f64) -> [f64; 5] {
        let j = self.inner.jet(r);
        let fe = falling(self.power);
        let base = r.powf(self.power);
        let mut out = [f64::NAN; 5];
        for n in 0..=self.max_order() {
            let mut acc = 0.0;
            for i in 0..=n {
                acc += BINOM[n][i] * fe[n - i] * r.powi(i as i32 - n as i32) * j[i];
            }
            out[n] = base * acc;
        }
        out
    }
    fn max_order(&self) -> usize {
        self.inner.max_order()
    }
    fn origin_exponent(&self) -> f64 {
        self.inner.origin_exponent() + self.power
    }
    fn origin_increment_exponent(&self) -> f64 {
        if self.power == 0.0 {
            self.inner.origin_increment_exponent()
        } else {
            self.origin_exponent()
        }
    }
    fn decay_exponent(&self) -> f64 {
        self.inner.decay_exponent() - self.power
    }
    fn slope_decay_exponent(&self) -> f64 {
        if self.power == 0.0 {
            self.inner.slope_decay_exponent()
        } else {
            self.decay_exponent()
        }
    }
}

/// `r ↦ r^α (u'' + (N − 1 + α) u'/r)`, the radial form of `div(|x|^α ∇u)`.
///
/// Derivatives are available to order `max_order(u) − 2`.
#[derive(Debug, Clone)]
pub struct WeightedLaplacian<P> {
    pub inner: P,
    pub alpha: f64,
    pub n: u32,
}

impl<P: RadialProfile> WeightedLaplacian<P> {
    pub fn new(inner: P, alpha: f64, n: u32) -> Self {
        Self { inner, alpha, n }
    }
}

impl<P: RadialProfile> RadialProfile for WeightedLaplacian<P> {
    fn jet(&self, r: f64) -> [f64; 5] {
        let u = self.inner.jet(r);
        let c = self.n as f64 - 1.0 + self.alpha;
        let a = self.alpha;
        let v0 = u[2] + c * u[1] / r;
        let v1 = u[3] + c * (u[2] / r - u[1] / (r * r));
        let v2 = u[4] + c * (u[3] / r - 2.0 * u[2] / (r * r) + 2.0 * u[1] / (r * r * r));
        let ra = r.powf(a);
        let mut out = [f64::NAN; 5];
        let top = self.max_order();
        out[0] = ra * v0;
        if top >= 1 {
            out[1] = ra * (a * v0 / r + v1);
        }
        if top >= 2 {
            out[2] = ra * (a * (a - 1.0) * v0 / (r * r) + 2.0 * a * v1 / r + v2);
        }
        out
    }
    fn max_order(&self) -> usize {
        self.inner.max_order().saturating_sub(2).min(2)
    }
    fn origin_exponent(&self) -> f64 {
        self.alpha + self.inner.origin_increment_exponent() - 2.0
    }
    fn decay_exponent(&self) -> f64 {
        self.inner.slope_decay_exponent() + 2.0 - self.alpha
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::RadialProfile;

    /// Log-log slope of `|u|` between `r` and `1.01 r`.
    pub fn slope(u: &dyn RadialProfile, r: f64) -> f64 {
        let a = u.eval(r).abs().ln();
        let b = u.eval(1.01 * r).abs().ln();
        (b - a) / 1.01f64.ln()
    }

    pub fn assert_exponents(u: &dyn RadialProfile) {
        let at0 = slope(u, 1e-3);
        let e = u.origin_exponent();
        assert!((at0 - e).abs() <= 0.05 * e.abs().max(1.0), "origin slope {at0} vs {e}");
        let d = u.decay_exponent();
        if d.is_finite() {
            let at_inf = -slope(u, 1e3);
            assert!((at_inf - d).abs() <= 0.05 * d.abs().max(1.0), "decay {at_inf} vs {d}");
        }
    }

    /// Central-difference check of every available derivative.
    pub fn assert_derivatives(u: &dyn RadialProfile, r: f64, rel: f64) {
        let h = 1e-5 * r.max(1e-3);
        let top = u.max_order();
        for n in 1..=top {
            let fd = (u.deriv(r + h, n - 1) - u.deriv(r - h, n - 1)) / (2.0 * h);
            let an = u.deriv(r, n);
            let scale = an.abs().max(u.deriv(r, n - 1).abs() / r).max(1e-300);
            assert!((fd - an).abs() <= rel * scale, "order {n} at r={r}: fd {fd} vs {an}");
        }
    }
}
