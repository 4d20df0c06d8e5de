//! Double-exponential quadrature on `(0, ∞)` and a Gauss–Legendre rule.
//!
//! The substitution `s = exp((π/2) sinh x)` maps `(0, ∞)` onto the real line
//! and turns algebraic endpoint behaviour into double-exponential decay, so the
//! plain trapezoidal rule in `x` converges geometrically as the step halves.
//! It is the tanh–sinh rule composed with `s = (1 + t)/(1 − t)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::params::{sphere_area, Params};
use crate::profile::{RadialProfile, Scaled};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_NODE_CAP: usize = 1 << 16;

/// Level-0 step in the `x` variable.
const H0: f64 = 0.125;
const MIN_LEVELS: usize = 3;
/// A tail term below `TAIL_REL` times the running peak counts as negligible.
const TAIL_REL: f64 = 1e-18;
const TAIL_RUN: usize = 3;
/// Largest `|x|` used: `(π/2) sinh x = 700`.
const X_MAX: f64 = 6.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadConfig {
    pub tol: f64,
    pub node_cap: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub nodes: usize,
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Fail fast when an integrand with the given endpoint powers cannot converge:
/// the power at 0 must exceed -1 and the power at infinity must be below -1.
pub fn check_exponents(what: &str, power_at_zero: f64, power_at_inf: f64) -> Result<()> {
    if !(power_at_zero > -1.0) {
        return Err(Error::Divergent {
            what: what.to_string(),
            endpoint: "0",
            power: power_at_zero,
        });
    }
    if !(power_at_inf < -1.0) {
        return Err(Error::Divergent {
            what: what.to_string(),
            endpoint: "infinity",
            power: power_at_inf,
        });
    }
    Ok(())
}

fn node(x: f64) -> (f64, f64) {
    let u = FRAC_PI_2 * x.sinh();
    let s = u.exp();
    (s, s * FRAC_PI_2 * x.cosh())
}

struct State<F> {
    f: F,
    sums: Vec<Kahan>,
    l1: Vec<Kahan>,
    nodes: usize,
}

impl<F: FnMut(f64, &mut [f64])> State<F> {
    /// Weighted integrand values at `x`, or the offending `s` if any is non-finite.
    fn weighted(&mut self, x: f64) -> std::result::Result<Vec<f64>, f64> {
        let (s, w) = node(x);
        let mut out = vec![0.0; self.sums.len()];
        (self.f)(s, &mut out);
        self.nodes += 1;
        for v in out.iter_mut() {
            *v *= w;
            if !v.is_finite() {
                return Err(s);
            }
        }
        Ok(out)
    }

    fn accumulate(&mut self, vals: &[f64]) {
        for ((sum, l1), v) in self.sums.iter_mut().zip(self.l1.iter_mut()).zip(vals) {
            sum.add(*v);
            l1.add(v.abs());
        }
    }

    /// Walks outward from 0 in direction `dir` until the tail is negligible.
    fn scan_tail(&mut self, dir: f64, peak: &mut f64) -> Result<Vec<Vec<f64>>> {
        let k_cap = (X_MAX / H0) as usize;
        let mut kept = Vec::new();
        let mut quiet = 0;
        for k in 1..=k_cap {
            match self.weighted(dir * k as f64 * H0) {
                Err(_) if quiet > 0 => return Ok(kept),
                Err(s) => return domain(format!("non-finite integrand at s = {s:e}")),
                Ok(vals) => {
                    let mag = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    *peak = peak.max(mag);
                    kept.push(vals);
                    if mag <= TAIL_REL * *peak {
                        quiet += 1;
                        if quiet >= TAIL_RUN {
                            return Ok(kept);
                        }
                    } else {
                        quiet = 0;
                    }
                }
            }
        }
        // the tail never became negligible before the overflow guard
        let value = kept.iter().map(|v| v.first().copied().unwrap_or(0.0)).sum::<f64>() * H0;
        Err(Error::Accuracy {
            value,
            abs_error: f64::INFINITY,
            nodes: self.nodes,
        })
    }
}

/// Integrates a vector-valued `f` over `(0, ∞)`, component by component.
///
/// `f(s, out)` writes the `dim` integrand values at `s` into `out`. Every
/// component must meet `|I_j − I_{j−1}| ≤ tol · ∫|f_i|` on consecutive
/// halvings of the step.
pub fn integrate_vec<F>(dim: usize, f: F, cfg: &QuadConfig) -> Result<Vec<QuadResult>>
where
    F: FnMut(f64, &mut [f64]),
{
    if !(cfg.tol > 0.0) {
        return domain(format!("quadrature tolerance must be positive, got {}", cfg.tol));
    }
    let mut st = State {
        f,
        sums: vec![Kahan::default(); dim],
        l1: vec![Kahan::default(); dim],
        nodes: 0,
    };

    // Level 0 fixes the truncation window; nodes are summed in ascending x.
    let centre = st
        .weighted(0.0)
        .or_else(|s| domain(format!("non-finite integrand at s = {s:e}")))?;
    let mut peak = centre.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let left = st.scan_tail(-1.0, &mut peak)?;
    let right = st.scan_tail(1.0, &mut peak)?;
    for vals in left.iter().rev() {
        st.accumulate(vals);
    }
    st.accumulate(&centre);
    for vals in &right {
        st.accumulate(vals);
    }
    let x_lo = -(left.len() as f64) * H0;
    let x_hi = right.len() as f64 * H0;

    let mut h = H0;
    let mut prev: Vec<f64> = st.sums.iter().map(|s| s.value() * h).collect();
    let mut last_err = vec![f64::INFINITY; dim];
    let mut level = 0;
    loop {
        level += 1;
        h *= 0.5;
        let count = ((x_hi - x_lo) / h).round() as usize;
        if st.nodes + count / 2 > cfg.node_cap {
            let worst = (0..dim)
                .max_by(|&a, &b| last_err[a].total_cmp(&last_err[b]))
                .unwrap_or(0);
            return Err(Error::Accuracy {
                value: prev.get(worst).copied().unwrap_or(0.0),
                abs_error: last_err.get(worst).copied().unwrap_or(0.0),
                nodes: st.nodes,
            });
        }
        let mut i = 1;
        while i < count {
            let vals = st
                .weighted(x_lo + i as f64 * h)
                .or_else(|s| domain(format!("non-finite integrand at s = {s:e}")))?;
            st.accumulate(&vals);
            i += 2;
        }
        let cur: Vec<f64> = st.sums.iter().map(|s| s.value() * h).collect();
        let mut done = level + 1 >= MIN_LEVELS;
        let mut results = Vec::with_capacity(dim);
        for j in 0..dim {
            let err = (cur[j] - prev[j]).abs();
            last_err[j] = err;
            if err > cfg.tol * st.l1[j].value() * h {
                done = false;
            }
            results.push(QuadResult {
                value: cur[j],
                abs_error: err,
                nodes: st.nodes,
            });
        }
        if done {
            return Ok(results);
        }
        prev = cur;
    }
}

/// Scalar version of [`integrate_vec`].
pub fn integrate_with<F: FnMut(f64) -> f64>(mut f: F, cfg: &QuadConfig) -> Result<QuadResult> {
    let r = integrate_vec(1, |s, out| out[0] = f(s), cfg)?;
    Ok(r[0])
}

/// `∫_0^∞ f(s) ds` with the default node cap.
pub fn integrate_semiinfinite<F: FnMut(f64) -> f64>(f: F, tol: f64) -> Result<QuadResult> {
    integrate_with(f, &QuadConfig::with_tol(tol))
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_deriv(n, z);
        dp = if d.is_finite() { d } else { dp };
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    (x, w)
}

fn legendre_with_deriv(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// `∫_0^∞ r^{2α−β} (f'' + (N−1+α) f'/r − λ_k f/r²)² r^{N−1} dr` for the radial
/// part `f` of a mode-`k` function; the angular factor is left to the caller.
pub fn mode_radial_energy<P: RadialProfile + ?Sized>(f: &P, k: u32, p: &Params, cfg: &QuadConfig) -> Result<f64> {
    let nf = p.nf();
    let (alpha, beta) = (p.alpha(), p.beta());
    let lam = (k * (p.n() - 2 + k)) as f64;
    let weight = nf + 2.0 * alpha - beta - 1.0;
    let e = if k == 0 || f.origin_exponent() == 0.0 {
        if k == 0 {
            f.origin_increment_exponent()
        } else {
            0.0
        }
    } else {
        f.origin_exponent()
    };
    let d = if k == 0 {
        f.slope_decay_exponent()
    } else {
        f.decay_exponent()
    };
    check_exponents(
        "weighted second-order energy",
        2.0 * (e - 2.0) + weight,
        2.0 * (-d - 2.0) + weight,
    )?;
    let c = nf - 1.0 + alpha;
    let r = integrate_with(
        |r| {
            let j = f.jet(r);
            let b = (j[2] + c * j[1] / r - lam * j[0] / (r * r)) * r.powf(0.5 * weight);
            b * b
        },
        cfg,
    )?;
    Ok(r.value)
}

/// `‖u‖² = ω ∫ (u'' + (N+α−1) u'/r)² r^{N+2α−β−1} dr` for radial `u`.
pub fn norm_sq<P: RadialProfile + ?Sized>(u: &P, p: &Params) -> Result<f64> {
    norm_sq_with(u, p, &QuadConfig::default())
}

pub fn norm_sq_with<P: RadialProfile + ?Sized>(u: &P, p: &Params, cfg: &QuadConfig) -> Result<f64> {
    Ok(sphere_area(p.n()) * mode_radial_energy(u, 0, p, cfg)?)
}

/// `‖u‖_* = (ω ∫ r^{β+N−1} |u|^{p*} dr)^{1/p*}` for radial `u`.
pub fn norm_star<P: RadialProfile + ?Sized>(u: &P, p: &Params) -> Result<f64> {
    norm_star_with(u, p, &QuadConfig::default())
}

pub fn norm_star_with<P: RadialProfile + ?Sized>(u: &P, p: &Params, cfg: &QuadConfig) -> Result<f64> {
    let ps = p.derive().p_star;
    let weight = p.beta() + p.nf() - 1.0;
    check_exponents(
        "weighted Lebesgue norm",
        ps * u.origin_exponent() + weight,
        -ps * u.decay_exponent() + weight,
    )?;
    let r = integrate_with(|r| (u.eval(r).abs() * r.powf(weight / ps)).powf(ps), cfg)?;
    Ok((sphere_area(p.n()) * r.value).powf(1.0 / ps))
}

/// `‖u‖² / ‖u‖_*²` over radial functions.
pub fn quotient_radial<P: RadialProfile + ?Sized>(u: &P, p: &Params) -> Result<f64> {
    quotient_radial_with(u, p, &QuadConfig::default())
}

pub fn quotient_radial_with<P: RadialProfile + ?Sized>(u: &P, p: &Params, cfg: &QuadConfig) -> Result<f64> {
    // the quotient is 0-homogeneous; normalising keeps huge amplitudes finite
    let peak = [0.5, 1.0, 2.0].iter().map(|&r| u.eval(r).abs()).fold(0.0, f64::max);
    let factor = if peak > 0.0 && peak.is_finite() {
        1.0 / peak
    } else {
        1.0
    };
    let v = Scaled { inner: u, factor };
    let den = norm_star_with(&v, p, cfg)?;
    if !(den > 0.0) {
        return domain("quotient of the zero function");
    }
    Ok(norm_sq_with(&v, p, cfg)? / (den * den))
}
