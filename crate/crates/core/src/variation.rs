//! Second variation of the quotient at the radial extremal along `Z_i`, the
//! quotient itself along `U + εZ_i`, and the three-witness breaking certificate.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::extremal::{
    extremal, kernel_mode, mode_one_angular, s_r_closed, slice_area, x1_profile, ExtremalProfile, KernelKind,
    KernelMode,
};
use crate::params::{beta_fs, classify, Params, RegionClass};
use crate::profile::RadialProfile;
use crate::quadrature::{check_exponents, gauss_legendre, integrate_vec, mode_radial_energy, norm_sq_with, QuadConfig};
use crate::specfun::beta_fn;
use crate::spectral::{potential_constant, ritz_min_eig_with, FS_BASIS};

/// Default perturbation size for the directional quotient.
pub const DEFAULT_EPS: f64 = 1e-2;
/// Default threshold on `|μ − (M − 1)|` below which the second variation counts as zero.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Band on the quotient curvature along `Z_i`, relative to `S_r`.
pub const QUOTIENT_BAND: f64 = 1e-6;
/// Band on the Ritz minimum, relative to the potential constant.
pub const RITZ_BAND: f64 = 1e-6;
/// Angular nodes of the tensor rule.
pub const ANGULAR_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondVariation {
    /// `prefactor · factor · (2 I1 + ((2M − 5) + μ) I2)`.
    pub value: f64,
    /// `q²(N − 1)`.
    pub mu: f64,
    /// `μ − (M − 1)`.
    pub factor: f64,
    /// `∫ X_1'² s^{M−4} ds`.
    pub i1: f64,
    /// `∫ X_1² s^{M−5} ds`.
    pub i2: f64,
    /// `(ω/N) ((2 + β − α)/2)³`.
    pub prefactor: f64,
    /// `∫ X_1'² s^{M−3} ds`.
    pub j1: f64,
    /// The quadratic form `⟨J''(U) Z_i, Z_i⟩` itself,
    /// `prefactor · factor · (2 J1 + ((3M − 9) + μ) I2)`. Same sign as `value`.
    pub exact: f64,
}

/// Beta-function values of `(I1, I2, J1)` with `X_1 = s(1+s²)^{−(M−2)/2}`.
pub fn kernel_integrals_closed(m: f64) -> Result<(f64, f64, f64)> {
    if !(m > 4.0) {
        return domain(format!("kernel integrals need M > 4, got {m}"));
    }
    // X_1' = (1 − (M−3)s²)(1+s²)^{−M/2}; ∫ s^{2a−1}(1+s²)^{−a−b} ds = B(a, b)/2
    let half = |a: f64| -> Result<f64> { Ok(0.5 * beta_fn(a, m - a)?) };
    let c = m - 3.0;
    let expand = |a0: f64| -> Result<f64> { Ok(half(a0)? - 2.0 * c * half(a0 + 1.0)? + c * c * half(a0 + 2.0)?) };
    let i1 = expand((m - 3.0) / 2.0)?;
    let j1 = expand((m - 2.0) / 2.0)?;
    let h = (m - 2.0) / 2.0;
    let i2 = 0.5 * beta_fn(h, h)?;
    Ok((i1, i2, j1))
}

/// `(I1, I2, J1)` by quadrature.
pub fn kernel_integrals_quadrature(m: f64, cfg: &QuadConfig) -> Result<(f64, f64, f64)> {
    let x = x1_profile(m);
    check_exponents("kernel integral I1", m - 4.0, -2.0 * (m - 3.0) + m - 4.0)?;
    check_exponents("kernel integral I2", m - 3.0, -2.0 * (m - 3.0) + m - 5.0)?;
    check_exponents("kernel integral J1", m - 3.0, -2.0 * (m - 3.0) + m - 3.0)?;
    let r = integrate_vec(
        3,
        |s, out| {
            let j = x.jet(s);
            let w = s.powf(m - 5.0);
            out[0] = j[1] * j[1] * w * s;
            out[1] = j[0] * j[0] * w;
            out[2] = out[0] * s;
        },
        cfg,
    )?;
    Ok((r[0].value, r[1].value, r[2].value))
}

/// The factored closed form; `I1`, `I2` come from Beta functions.
pub fn second_variation(p: &Params) -> Result<SecondVariation> {
    let d = p.derive();
    let (i1, i2, j1) = kernel_integrals_closed(d.m)?;
    Ok(assemble(p, i1, i2, j1))
}

/// Same as [`second_variation`] with `I1`, `I2` by quadrature.
pub fn second_variation_quadrature(p: &Params, cfg: &QuadConfig) -> Result<SecondVariation> {
    let (i1, i2, j1) = kernel_integrals_quadrature(p.derive().m, cfg)?;
    Ok(assemble(p, i1, i2, j1))
}

fn assemble(p: &Params, i1: f64, i2: f64, j1: f64) -> SecondVariation {
    let d = p.derive();
    let mu = d.q * d.q * (p.nf() - 1.0);
    let factor = mu - (d.m - 1.0);
    let prefactor = mode_one_angular(p.n()) * (p.gamma_exp() / 2.0).powi(3);
    let value = prefactor * factor * (2.0 * i1 + (2.0 * d.m - 5.0 + mu) * i2);
    let exact = prefactor * factor * (2.0 * j1 + (3.0 * d.m - 9.0 + mu) * i2);
    SecondVariation {
        value,
        mu,
        factor,
        i1,
        i2,
        prefactor,
        j1,
        exact,
    }
}

/// `‖Z‖² − (p* − 1) ∫ |x|^β U^{p*−2} Z²` for `Z = Z_1(|x|) x_i/|x|`, computed
/// directly in `r` without the change of variables.
pub fn second_variation_direct(p: &Params, cfg: &QuadConfig) -> Result<f64> {
    let u = extremal(p, 1.0)?;
    let z = kernel_mode(p, KernelKind::Z1Radial);
    let kinetic = mode_radial_energy(&z, 1, p, cfg)?;
    let ps = p.derive().p_star;
    let w = p.beta() + p.nf() - 1.0;
    check_exponents(
        "linearised potential",
        2.0 * z.origin_exponent() + w,
        -(ps - 2.0) * u.decay_exponent() - 2.0 * z.decay_exponent() + w,
    )?;
    let pot = integrate_vec(
        1,
        |r, out| {
            let zr = z.eval(r);
            out[0] = u.eval(r).powf(ps - 2.0) * zr * zr * r.powf(w);
        },
        cfg,
    )?[0]
        .value;
    Ok(mode_one_angular(p.n()) * (kinetic - (ps - 1.0) * pot))
}

/// Normalised `U` and `Z_1` sharing one scale factor, so the quotient is unchanged.
struct Direction {
    u: ExtremalProfile,
    z: KernelMode,
    scale: f64,
}

impl Direction {
    fn new(p: &Params) -> Result<Self> {
        let u = extremal(p, 1.0)?;
        let peak = u.eval(0.0).abs().max(u.eval(1.0).abs());
        let scale = if peak > 0.0 && peak.is_finite() {
            1.0 / peak
        } else {
            1.0
        };
        Ok(Self {
            u,
            z: kernel_mode(p, KernelKind::Z1Radial),
            scale,
        })
    }
}

/// `I(U + εZ_i)`; the numerator uses orthogonality of the modes, the denominator
/// a tensor rule in `(r, ϑ)`.
pub fn directional_quotient(p: &Params, eps: f64) -> Result<f64> {
    directional_quotient_with(p, eps, &QuadConfig::default())
}

pub fn directional_quotient_with(p: &Params, eps: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(eps.abs() < 0.5) {
        return domain(format!("perturbation must satisfy |eps| < 0.5, got {eps}"));
    }
    let dir = Direction::new(p)?;
    let c = dir.scale;
    let n = p.n();
    let ps = p.derive().p_star;
    let u = crate::profile::Scaled {
        inner: &dir.u,
        factor: c,
    };
    let z = crate::profile::Scaled {
        inner: &dir.z,
        factor: c,
    };
    let mut num = norm_sq_with(&u, p, cfg)?;
    if eps != 0.0 {
        num += eps * eps * mode_one_angular(n) * mode_radial_energy(&z, 1, p, cfg)?;
    }
    let w = p.beta() + p.nf() - 1.0;
    check_exponents(
        "perturbed Lebesgue norm",
        ps * dir.u.origin_exponent() + w,
        -ps * dir.u.decay_exponent().min(dir.z.decay_exponent()) + w,
    )?;
    let (x, wt) = gauss_legendre(ANGULAR_NODES);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let ang: Vec<(f64, f64)> = x
        .iter()
        .zip(&wt)
        .map(|(&xi, &wi)| {
            let th = half_pi * (xi + 1.0);
            (th.cos(), half_pi * wi * th.sin().powi(n as i32 - 2))
        })
        .collect();
    let den = integrate_vec(
        1,
        |r, out| {
            let (ur, zr) = (u.eval(r), eps * z.eval(r));
            let s: f64 = ang.iter().map(|&(ct, a)| a * (ur + zr * ct).abs().powf(ps)).sum();
            out[0] = s * r.powf(w);
        },
        cfg,
    )?[0]
        .value;
    let den = slice_area(n) * den;
    if !(den > 0.0) {
        return domain("quotient of the zero function");
    }
    Ok(num / den.powf(2.0 / ps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Breaking,
    NotBreaking,
    Boundary,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Breaking => "Breaking",
            Verdict::NotBreaking => "NotBreaking",
            Verdict::Boundary => "Boundary",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The verdict implied by the region class alone.
pub fn expected_verdict(p: &Params) -> Verdict {
    match classify(p.n(), p.alpha(), p.beta()) {
        RegionClass::SymmetryBreaking | RegionClass::NotAttainedBoundary => Verdict::Breaking,
        RegionClass::Classical => Verdict::Boundary,
        _ => match beta_fs(p.n(), p.alpha()) {
            Ok(b) if (p.beta() - b).abs() <= crate::params::BOUNDARY_TOL * (1.0 + b.abs()) => Verdict::Boundary,
            _ => Verdict::NotBreaking,
        },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BreakingCertificate {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    pub eps: f64,
    pub s_r: f64,
    pub second_variation: f64,
    pub second_variation_exact: f64,
    pub directional_quotient: f64,
    /// `(I(U + εZ) − S_r)/ε²` with the `ε⁴` term removed by extrapolation from `2ε`.
    pub quotient_curvature: f64,
    pub ritz_rho1: f64,
    pub verdict: Verdict,
    pub expected: Verdict,
    /// Whether all three witnesses point the same way.
    pub consistent: bool,
    /// One entry per witness that disagrees with the others or with `expected`.
    pub discrepancies: Vec<String>,
}

impl BreakingCertificate {
    pub fn passed(&self) -> bool {
        self.consistent && self.verdict == self.expected
    }
}

/// Sign of a witness after its zero band: `-1`, `0` or `1`.
fn banded_sign(x: f64, band: f64) -> i8 {
    if x.abs() <= band {
        0
    } else if x < 0.0 {
        -1
    } else {
        1
    }
}

pub fn certify(p: &Params, eps: f64) -> Result<BreakingCertificate> {
    certify_with(p, eps, DEFAULT_TOL, &QuadConfig::default())
}

/// `tol` bounds `|μ − (M−1)|` for a zero second variation.
pub fn certify_with(p: &Params, eps: f64, tol: f64, cfg: &QuadConfig) -> Result<BreakingCertificate> {
    let m = p.derive().m;
    let s_r = s_r_closed(p);
    let sv = second_variation(p)?;
    if !(eps != 0.0 && eps.abs() < 0.25) {
        return domain(format!("certificate needs 0 < |eps| < 0.25, got {eps}"));
    }
    let dq = directional_quotient_with(p, eps, cfg)?;
    let dq2 = directional_quotient_with(p, 2.0 * eps, cfg)?;
    let curvature = (16.0 * (dq - s_r) - (dq2 - s_r)) / (12.0 * eps * eps);
    let rho1 = ritz_min_eig_with(1, p, FS_BASIS, cfg)?.min_eigenvalue;
    let signs = [
        (
            "second_variation",
            if sv.factor.abs() <= tol {
                0
            } else {
                banded_sign(sv.value, 0.0)
            },
        ),
        ("directional_quotient", banded_sign(curvature, QUOTIENT_BAND * s_r)),
        ("ritz_rho1", banded_sign(rho1, RITZ_BAND * potential_constant(m))),
    ];
    let consistent = signs.iter().all(|s| s.1 == signs[0].1);
    let verdict = match signs[0].1 {
        -1 => Verdict::Breaking,
        0 => Verdict::Boundary,
        _ => Verdict::NotBreaking,
    };
    let expected = expected_verdict(p);
    let mut discrepancies = Vec::new();
    for &(name, s) in &signs[1..] {
        if s != signs[0].1 {
            discrepancies.push(format!(
                "{name} sign {s} differs from second_variation sign {}",
                signs[0].1
            ));
        }
    }
    if verdict != expected {
        discrepancies.push(format!("verdict {verdict} differs from expected {expected}"));
    }
    Ok(BreakingCertificate {
        n: p.n(),
        alpha: p.alpha(),
        beta: p.beta(),
        eps,
        s_r,
        second_variation: sv.value,
        second_variation_exact: sv.exact,
        directional_quotient: dq,
        quotient_curvature: curvature,
        ritz_rho1: rho1,
        verdict,
        expected,
        consistent,
        discrepancies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::validate;

    #[test]
    fn beta_reduction_at_m6() {
        let (i1, i2, j1) = kernel_integrals_closed(6.0).unwrap();
        assert!((i1 - std::f64::consts::PI / 32.0).abs() < 1e-15);
        assert!((i2 - 1.0 / 12.0).abs() < 1e-15);
        // (B(2,4) - 6 B(3,3) + 9 B(4,2)) / 2
        assert!((j1 - 0.15).abs() < 1e-15);
    }

    #[test]
    fn reference_value() {
        let p = validate(5, 1.0, 1.0).unwrap();
        let sv = second_variation(&p).unwrap();
        assert_eq!(sv.mu, 4.0);
        assert_eq!(sv.factor, -1.0);
        assert!((sv.value - -5.858_682_485_431_458_2).abs() < 1e-12);
        let direct = second_variation_direct(&p, &QuadConfig::default()).unwrap();
        assert!(((direct - sv.exact) / sv.exact).abs() < 1e-8, "{direct}");
        // (ω₄/5)(-1)(2 · 0.15 + 13/12) with ω₄ = 8π²/3
        let oracle = -(8.0 * std::f64::consts::PI.powi(2) / 15.0) * (0.3 + 13.0 / 12.0);
        assert!(((sv.exact - oracle) / oracle).abs() < 1e-14);
    }

    #[test]
    fn curvature_matches_exact_form() {
        let p = validate(5, 1.0, 1.0).unwrap();
        let sv = second_variation(&p).unwrap();
        let u = extremal(&p, 1.0).unwrap();
        let ns = crate::quadrature::norm_star(&u, &p).unwrap();
        let eps = 1e-2;
        let i0 = directional_quotient(&p, 0.0).unwrap();
        let ip = directional_quotient(&p, eps).unwrap();
        // I''(U)[Z, Z] = 2 J''(U)[Z, Z] / ‖U‖_*², and I is even in eps
        let fd = 2.0 * (ip - i0) / (eps * eps);
        let predicted = 2.0 * sv.exact / (ns * ns);
        assert!(((fd - predicted) / predicted).abs() < 1e-4, "{fd} {predicted}");
    }

    #[test]
    fn quotient_is_even_in_eps() {
        let p = validate(5, 1.0, 1.0).unwrap();
        let a = directional_quotient(&p, 0.03).unwrap();
        let b = directional_quotient(&p, -0.03).unwrap();
        assert!(((a - b) / a).abs() < 1e-10);
        assert!(directional_quotient(&p, 0.5).is_err());
    }

    #[test]
    fn verdict_expectations() {
        let p = validate(5, 1.0, 1.0).unwrap();
        assert_eq!(expected_verdict(&p), Verdict::Breaking);
        let p = validate(5, 1.0, 0.3).unwrap();
        assert_eq!(expected_verdict(&p), Verdict::NotBreaking);
        let p = validate(5, 0.0, 0.0).unwrap();
        assert_eq!(expected_verdict(&p), Verdict::Boundary);
        assert_eq!(banded_sign(-1e-9, 1e-8), 0);
    }
}
