//! Spherical-harmonic mode data and the linearised fourth-order operator,
//! restricted to one mode and written in the transformed radius `s`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::linalg::generalized_eigen;
use crate::params::{beta_upper, validate, Params};
use crate::profile::RadialProfile;
use crate::quadrature::{check_exponents, integrate_vec, QuadConfig};
use crate::specfun::ln_gamma_pos;

pub use crate::extremal::gamma_m;

/// Largest scaled Gram condition number accepted by [`ritz_min_eig`].
pub const MAX_GRAM_CONDITION: f64 = 1e12;
/// Basis size used by [`fs_locate`].
pub const FS_BASIS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeData {
    pub k: u32,
    /// Eigenvalue `k(N − 2 + k)` of the sphere Laplacian.
    pub lambda_k: f64,
    /// Dimension of the eigenspace.
    pub l_k: u64,
    /// `k(M − 2 + k)`.
    pub varpi_k: f64,
}

/// `l_k = (N + 2k − 2)(N + k − 3)! / ((N − 2)! k!)`, exactly.
pub fn multiplicity(n: u32, k: u32) -> Result<u64> {
    if n < 3 {
        return domain(format!("multiplicity needs N >= 3, got {n}"));
    }
    let (n, k) = (n as u128, k as u128);
    // C(N + k - 3, k)
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c
            .checked_mul(n - 3 + i)
            .ok_or_else(|| Error::Domain("multiplicity overflow".into()))?
            / i;
    }
    let num = c
        .checked_mul(n + 2 * k - 2)
        .ok_or_else(|| Error::Domain("multiplicity overflow".into()))?;
    u64::try_from(num / (n - 2)).map_err(|_| Error::Domain("multiplicity overflow".into()))
}

pub fn mode_data(k: u32, p: &Params) -> Result<ModeData> {
    let kf = k as f64;
    let m = p.derive().m;
    Ok(ModeData {
        k,
        lambda_k: kf * (p.nf() - 2.0 + kf),
        l_k: multiplicity(p.n(), k)?,
        varpi_k: kf * (m - 2.0 + kf),
    })
}

/// `(p* − 1) Γ_M = (M + 4)(M − 2) M (M + 2)`, the weight of the potential term.
pub fn potential_constant(m: f64) -> f64 {
    (m + 4.0) * (m - 2.0) * m * (m + 2.0)
}

/// The two parts of `Q_k(X)` and their difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticForm {
    pub value: f64,
    /// `∫ [X'' + (M−1)X'/s − q²λ_k X/s²]² s^{M−1} ds`.
    pub kinetic: f64,
    /// `(M+4)(M−2)M(M+2) ∫ (1+s²)^{−4} X² s^{M−1} ds`.
    pub potential: f64,
}

pub fn mode_quadratic_form<P: RadialProfile + ?Sized>(x: &P, k: u32, p: &Params) -> Result<QuadraticForm> {
    mode_quadratic_form_with(x, k, p, &QuadConfig::default())
}

pub fn mode_quadratic_form_with<P: RadialProfile + ?Sized>(
    x: &P,
    k: u32,
    p: &Params,
    cfg: &QuadConfig,
) -> Result<QuadraticForm> {
    let d = p.derive();
    let m = d.m;
    let mu = d.q * d.q * mode_data(k, p)?.lambda_k;
    let e = if k == 0 {
        x.origin_increment_exponent()
    } else {
        x.origin_exponent()
    };
    let decay = if k == 0 {
        x.slope_decay_exponent()
    } else {
        x.decay_exponent()
    };
    check_exponents(
        "mode kinetic term",
        2.0 * (e - 2.0) + m - 1.0,
        2.0 * (-decay - 2.0) + m - 1.0,
    )?;
    check_exponents(
        "mode potential term",
        2.0 * x.origin_exponent() + m - 1.0,
        -2.0 * x.decay_exponent() - 8.0 + m - 1.0,
    )?;
    let pc = potential_constant(m);
    let r = integrate_vec(
        2,
        |s, out| {
            let j = x.jet(s);
            let w = s.powf(m - 1.0);
            let l = j[2] + (m - 1.0) * j[1] / s - mu * j[0] / (s * s);
            out[0] = l * l * w;
            out[1] = j[0] * j[0] * w / (1.0 + s * s).powi(4);
        },
        cfg,
    )?;
    let kinetic = r[0].value;
    let potential = pc * r[1].value;
    Ok(QuadraticForm {
        value: kinetic - potential,
        kinetic,
        potential,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RitzResult {
    /// Smallest value of `Q_k(X) / ∫(1+s²)^{−4} X² s^{M−1} ds` over the trial space.
    pub min_eigenvalue: f64,
    /// Weights of the minimiser on the basis `s^k (1+s²)^{−(M−2)/2} P_j(2t − 1)`,
    /// `t = 1/(1+s²)`; may underflow when `M` is large.
    pub coefficients: Vec<f64>,
    pub basis_size: usize,
    pub gram_condition: f64,
}

/// Jacobi polynomials `P_j^{(a,b)}(x)` for `j < n`.
fn jacobi_values(n: usize, a: f64, b: f64, x: f64, out: &mut [f64]) {
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n == 1 {
        return;
    }
    out[1] = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for j in 2..n {
        let jf = j as f64;
        let s = 2.0 * jf + a + b;
        let c0 = 2.0 * jf * (jf + a + b) * (s - 2.0);
        let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c2 = 2.0 * (jf + a - 1.0) * (jf + b - 1.0) * s;
        out[j] = (c1 * out[j - 1] - c2 * out[j - 2]) / c0;
    }
}

/// Values, first and second derivatives of `P_j^{(a,b)}` for `j < n`.
struct JacobiBasis {
    n: usize,
    a: f64,
    b: f64,
}

impl JacobiBasis {
    fn eval(&self, x: f64, p: &mut [f64], dp: &mut [f64], d2p: &mut [f64], tmp: &mut [f64]) {
        let (n, a, b) = (self.n, self.a, self.b);
        jacobi_values(n, a, b, x, p);
        jacobi_values(n.saturating_sub(1), a + 1.0, b + 1.0, x, tmp);
        dp[0] = 0.0;
        for j in 1..n {
            dp[j] = 0.5 * (j as f64 + a + b + 1.0) * tmp[j - 1];
        }
        jacobi_values(n.saturating_sub(2), a + 2.0, b + 2.0, x, tmp);
        d2p[0] = 0.0;
        if n > 1 {
            d2p[1] = 0.0;
        }
        for j in 2..n {
            let jf = j as f64;
            d2p[j] = 0.25 * (jf + a + b + 1.0) * (jf + a + b + 2.0) * tmp[j - 2];
        }
    }
}

/// Rayleigh–Ritz estimate of `inf Q_k / ∫(1+s²)^{−4}X² s^{M−1}` on a `J`-term basis.
///
/// The trial space is `{s^k (1+s²)^{−(M−2)/2} p(1/(1+s²)) : deg p < J}`; the
/// Jacobi parameters make the Gram matrix diagonal in exact arithmetic.
pub fn ritz_min_eig(k: u32, p: &Params, j: usize) -> Result<RitzResult> {
    ritz_min_eig_with(k, p, j, &QuadConfig::default())
}

pub fn ritz_min_eig_with(k: u32, p: &Params, j: usize, cfg: &QuadConfig) -> Result<RitzResult> {
    if j < 4 {
        return domain(format!("Ritz basis needs at least 4 functions, got {j}"));
    }
    let d = p.derive();
    let m = d.m;
    let kf = k as f64;
    if !(2.0 * kf < m) {
        return Err(Error::Divergent {
            what: format!("mode-{k} trial space"),
            endpoint: "infinity",
            power: 2.0 * kf - m - 1.0,
        });
    }
    let mu = d.q * d.q * mode_data(k, p)?.lambda_k;
    let varpi = kf * (m - 2.0 + kf);
    let h = (m - 2.0) / 2.0;
    let basis = JacobiBasis {
        n: j,
        a: kf + m / 2.0 - 1.0,
        b: m / 2.0 + 1.0 - kf,
    };
    // ln of the analytic Gram diagonal; each basis function is divided by its root
    let ln_norm: Vec<f64> = (0..j)
        .map(|i| {
            let nf = i as f64;
            ln_gamma_pos(nf + basis.a + 1.0) + ln_gamma_pos(nf + basis.b + 1.0)
                - (2.0 * (2.0 * nf + basis.a + basis.b + 1.0)).ln()
                - ln_gamma_pos(nf + basis.a + basis.b + 1.0)
                - ln_gamma_pos(nf + 1.0)
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..j).flat_map(|a| (a..j).map(move |b| (a, b))).collect();
    let np = pairs.len();
    let mut pv = vec![0.0; j];
    let mut dpv = vec![0.0; j];
    let mut d2pv = vec![0.0; j];
    let mut tmp = vec![0.0; j];
    let mut phi = vec![0.0; j];
    let mut lphi = vec![0.0; j];
    let res = integrate_vec(
        2 * np,
        |s, out| {
            let s2 = s * s;
            let t = 1.0 / (1.0 + s2);
            let x = 2.0 * t - 1.0;
            basis.eval(x, &mut pv, &mut dpv, &mut d2pv, &mut tmp);
            // s^k t^h s^{(M-1)/2}, with ln(1+s^2) evaluated without overflow
            let ln1ps2 = if s > 1.0 {
                2.0 * s.ln() + (1.0 / s2).ln_1p()
            } else {
                s2.ln_1p()
            };
            let ln_common = (kf + 0.5 * (m - 1.0)) * s.ln() - h * ln1ps2;
            let t2 = t * t;
            for i in 0..j {
                let pref = (ln_common - 0.5 * ln_norm[i]).exp();
                // G = t^h p(2t-1): G'/t^h and G''/t^h in t
                let g1 = h * pv[i] / t + 2.0 * dpv[i];
                let g2 = h * (h - 1.0) * pv[i] / t2 + 4.0 * h * dpv[i] / t + 4.0 * d2pv[i];
                let gpp = (-2.0 * t2 + 8.0 * s2 * t2 * t) * g1 + 4.0 * s2 * t2 * t2 * g2;
                let gp_over_s = -2.0 * t2 * g1;
                let l = gpp + (2.0 * kf + m - 1.0) * gp_over_s + (varpi - mu) * pv[i] / s2;
                phi[i] = pref * pv[i];
                lphi[i] = pref * l;
            }
            let pot = t2 * t2;
            for (idx, &(a, b)) in pairs.iter().enumerate() {
                out[idx] = lphi[a] * lphi[b];
                out[np + idx] = phi[a] * phi[b] * pot;
            }
        },
        cfg,
    )?;
    let mut am = vec![0.0; j * j];
    let mut bm = vec![0.0; j * j];
    for (idx, &(a, b)) in pairs.iter().enumerate() {
        am[a * j + b] = res[idx].value;
        am[b * j + a] = res[idx].value;
        bm[a * j + b] = res[np + idx].value;
        bm[b * j + a] = res[np + idx].value;
    }
    let g = generalized_eigen(&am, &bm, j, MAX_GRAM_CONDITION)?;
    let coefficients = (0..j).map(|i| g.vectors[i * j] * (-0.5 * ln_norm[i]).exp()).collect();
    Ok(RitzResult {
        min_eigenvalue: g.values[0] - potential_constant(m),
        coefficients,
        basis_size: j,
        gram_condition: g.condition,
    })
}

/// Locates the sign change of the mode-1 Ritz minimum in `β` by bisection.
pub fn fs_locate(n: u32, alpha: f64, tol: f64) -> Result<f64> {
    fs_locate_with(n, alpha, tol, &QuadConfig::default())
}

pub fn fs_locate_with(n: u32, alpha: f64, tol: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(alpha > 0.0) {
        return domain(format!("curve location needs alpha > 0, got {alpha}"));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let hi_end = beta_upper(n, alpha);
    let lo_end = alpha - 2.0;
    let rho = |beta: f64| -> Result<f64> {
        let p = validate(n, alpha, beta)?;
        Ok(ritz_min_eig_with(1, &p, FS_BASIS, cfg)?.min_eigenvalue)
    };
    let mut lo = lo_end + 0.1 * (hi_end - lo_end);
    let mut hi = 0.99 * hi_end;
    let (r_lo, r_hi) = (rho(lo)?, rho(hi)?);
    if !(r_lo > 0.0 && r_hi < 0.0) {
        return Err(Error::Bracket { lo, hi });
    }
    while hi - lo > 0.25 * tol {
        let mid = 0.5 * (lo + hi);
        let r = rho(mid)?;
        if r > 0.0 {
            lo = mid;
        } else if r < 0.0 {
            hi = mid;
        } else {
            return Ok(mid);
        }
    }
    Ok(0.5 * (lo + hi))
}
