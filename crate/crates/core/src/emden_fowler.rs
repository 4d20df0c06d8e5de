//! The change of variables `r = s^q`, `t = −ln s` that turns the radial
//! fourth-order equation into the autonomous ODE
//! `φ'''' − ((M−2)² + 4)/2 φ'' + M²(M−4)²/16 φ = |φ|^{8/(M−4)} φ`.

use crate::error::Result;
use crate::extremal::gamma_m;
use crate::params::Params;
use crate::profile::RadialProfile;

/// Stirling numbers of the second kind `S(n, k)`, `n, k ≤ 4`.
const STIRLING2: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 1.0, 0.0, 0.0],
    [0.0, 1.0, 3.0, 1.0, 0.0],
    [0.0, 1.0, 7.0, 6.0, 1.0],
];

const BINOM: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

/// Coefficients `(A, B, σ)` of `φ'''' − A φ'' + B φ = |φ|^σ φ`.
pub fn ode_coefficients(m: f64) -> (f64, f64, f64) {
    let a = ((m - 2.0) * (m - 2.0) + 4.0) / 2.0;
    let b = m * m * (m - 4.0) * (m - 4.0) / 16.0;
    (a, b, 8.0 / (m - 4.0))
}

/// Relative residual `|L − R| / (|L| + |R| + 1e-300)` of the ODE for the
/// jet `[φ, φ', φ'', φ''', φ'''']`.
pub fn ode_residual(jet: &[f64; 5], m: f64) -> f64 {
    let (a, b, sigma) = ode_coefficients(m);
    let l = jet[4] - a * jet[2] + b * jet[0];
    let r = jet[0].abs().powf(sigma) * jet[0];
    (l - r).abs() / (l.abs() + r.abs() + 1e-300)
}

/// `φ(t) = q^{m} e^{−m t} u(e^{−q t})` with `m = (M − 4)/2`.
#[derive(Debug, Clone)]
pub struct EmdenFowler<P> {
    u: P,
    q: f64,
    m: f64,
}

pub fn emden_fowler<P: RadialProfile>(u: P, p: &Params) -> EmdenFowler<P> {
    let d = p.derive();
    EmdenFowler { u, q: d.q, m: d.m }
}

impl<P: RadialProfile> EmdenFowler<P> {
    pub fn transformed_dimension(&self) -> f64 {
        self.m
    }

    /// `[φ, φ', φ'', φ''', φ'''']` at `t`, by the exact chain rule.
    pub fn jet(&self, t: f64) -> [f64; 5] {
        let half = (self.m - 4.0) / 2.0;
        let r = (-self.q * t).exp();
        let u = self.u.jet(r);
        // rho_k = r^k u^(k); (r d/dr)^n u = sum_k S(n,k) rho_k; d/dt = -q r d/dr
        let mut rho = [0.0; 5];
        let mut rk = 1.0;
        for k in 0..5 {
            rho[k] = rk * u[k];
            rk *= r;
        }
        let mut dg = [0.0; 5];
        let mut qn = 1.0;
        for n in 0..5 {
            let s: f64 = (0..=n).map(|k| STIRLING2[n][k] * rho[k]).sum();
            dg[n] = qn * s;
            qn *= -self.q;
        }
        let scale = self.q.powf(half) * (-half * t).exp();
        let mut out = [0.0; 5];
        for n in 0..5 {
            let mut acc = 0.0;
            for j in 0..=n {
                acc += BINOM[n][j] * (-half).powi((n - j) as i32) * dg[j];
            }
            out[n] = scale * acc;
        }
        out
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.jet(t)[0]
    }

    pub fn residual(&self, t: f64) -> f64 {
        ode_residual(&self.jet(t), self.m)
    }
}

/// `φ*(t) = Γ_M^{(M−4)/8} (2 cosh t)^{−(M−4)/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormPhi {
    m: f64,
    amplitude: f64,
}

impl ClosedFormPhi {
    pub fn new(m: f64) -> Result<Self> {
        let g = gamma_m(m)?;
        Ok(Self {
            m,
            amplitude: g.powf((m - 4.0) / 8.0),
        })
    }

    /// Derivatives via `d/dt[(2cosh t)^{−a} P(tanh t)] = (2cosh t)^{−a} Q(tanh t)`
    /// with `Q = (1 − y²) P' − a y P`.
    pub fn jet(&self, t: f64) -> [f64; 5] {
        let a = (self.m - 4.0) / 2.0;
        let y = t.tanh();
        let base = self.amplitude * (-a * (t.abs() + (-2.0 * t.abs()).exp().ln_1p())).exp();
        let mut poly = [0.0f64; 6];
        poly[0] = 1.0;
        let mut out = [0.0; 5];
        for n in 0..5 {
            let mut val = 0.0;
            for c in poly.iter().rev() {
                val = val * y + c;
            }
            out[n] = base * val;
            let mut next = [0.0; 6];
            for (k, &c) in poly.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                // (1 - y^2) k c y^{k-1} - a c y^{k+1}
                if k >= 1 {
                    next[k - 1] += k as f64 * c;
                }
                if k + 1 < 6 {
                    next[k + 1] -= (k as f64 + a) * c;
                }
            }
            poly = next;
        }
        out
    }

    pub fn residual(&self, t: f64) -> f64 {
        ode_residual(&self.jet(t), self.m)
    }
}
