//! Admissible parameters, derived exponents, the symmetry-breaking curves and
//! region classification.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Error, ParamViolation, Result};
use crate::specfun::ln_gamma_pos;

/// Absolute tolerance for boundary comparisons in the `(alpha, beta)` plane.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// A validated triple `(N, alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    n: u32,
    alpha: f64,
    beta: f64,
}

/// Exponents derived from [`Params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Derived {
    pub p_star: f64,
    pub q: f64,
    /// Transformed (generally non-integer) dimension.
    pub m: f64,
    /// Surface area of the unit sphere in `R^N`.
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionClass {
    Invalid,
    Classical,
    SymmetryBreaking,
    /// Valid region where radial symmetry of extremals is conjectured but not proven.
    ConjecturedSymmetry,
    ProvenSymmetryBoundary,
    NotAttainedBoundary,
    RellichDegenerate,
}

impl RegionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionClass::Invalid => "Invalid",
            RegionClass::Classical => "Classical",
            RegionClass::SymmetryBreaking => "SymmetryBreaking",
            RegionClass::ConjecturedSymmetry => "ConjecturedSymmetry",
            RegionClass::ProvenSymmetryBoundary => "ProvenSymmetryBoundary",
            RegionClass::NotAttainedBoundary => "NotAttainedBoundary",
            RegionClass::RellichDegenerate => "RellichDegenerate",
        }
    }
}

impl std::fmt::Display for RegionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Upper end `N alpha / (N - 2)` of the admissible beta interval.
pub fn beta_upper(n: u32, alpha: f64) -> f64 {
    n as f64 * alpha / (n as f64 - 2.0)
}

/// Check all admissibility conditions, reporting every violation.
pub fn validate(n: u32, alpha: f64, beta: f64) -> Result<Params> {
    let mut violations = Vec::new();
    if !(alpha.is_finite() && beta.is_finite()) {
        return domain(format!("non-finite parameters alpha = {alpha}, beta = {beta}"));
    }
    if n < 5 {
        violations.push(ParamViolation::DimensionTooSmall { n });
    }
    let nf = n as f64;
    let alpha_min = 2.0 - nf;
    if alpha <= alpha_min {
        violations.push(ParamViolation::AlphaOutOfRange { alpha, min: alpha_min });
    }
    let lo = alpha - 2.0;
    let hi = if n > 2 { beta_upper(n, alpha) } else { f64::NAN };
    if !(beta - lo > BOUNDARY_TOL && beta <= hi + BOUNDARY_TOL) {
        violations.push(ParamViolation::BetaOutOfRange { beta, lo, hi });
    }
    if violations.is_empty() {
        Ok(Params { n, alpha, beta })
    } else {
        Err(Error::InvalidParams(violations))
    }
}

impl Params {
    pub fn new(n: u32, alpha: f64, beta: f64) -> Result<Self> {
        validate(n, alpha, beta)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `2 + beta - alpha`, the power in the extremal profile.
    pub fn gamma_exp(&self) -> f64 {
        2.0 + self.beta - self.alpha
    }

    /// `N - 4 + 2 alpha - beta`, positive on the admissible region.
    pub fn decay_sum(&self) -> f64 {
        self.nf() - 4.0 + 2.0 * self.alpha - self.beta
    }

    pub fn derive(&self) -> Derived {
        derive(self)
    }
}

pub fn derive(p: &Params) -> Derived {
    let nf = p.nf();
    let g = p.gamma_exp();
    Derived {
        p_star: 2.0 * (nf + p.beta) / p.decay_sum(),
        q: 2.0 / g,
        m: 2.0 * (nf + p.beta) / g,
        omega: sphere_area(p.n),
    }
}

/// Surface area `2 π^{N/2} / Γ(N/2)` of the unit sphere `S^{N-1}`.
pub fn sphere_area(n: u32) -> f64 {
    let h = n as f64 / 2.0;
    (2f64.ln() + h * PI.ln() - ln_gamma_pos(h)).exp()
}

/// The curve `-N + sqrt(N^2 + alpha^2 + 2(N-2) alpha)`.
pub fn beta_fs(n: u32, alpha: f64) -> Result<f64> {
    let nf = n as f64;
    let radicand = nf * nf + alpha * alpha + 2.0 * (nf - 2.0) * alpha;
    if radicand.is_nan() || radicand < 0.0 {
        return domain(format!("negative radicand {radicand} in beta_fs"));
    }
    Ok(radicand.sqrt() - nf)
}

/// First-order curve `b_FS(a)` with `a_c = (N - 2)/2`.
pub fn bfs_first_order(n: u32, a: f64) -> Result<f64> {
    let nf = n as f64;
    let ac = (nf - 2.0) / 2.0;
    if !(a < ac) {
        return domain(format!("b_FS requires a < a_c = {ac}, got a = {a}"));
    }
    let d = ac - a;
    Ok(nf * d / (2.0 * (d * d + nf - 1.0).sqrt()) + a - ac)
}

/// Image of the first-order curve under `alpha = -2a`, `beta = -b tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FsCorrespondence {
    pub a: f64,
    pub b: f64,
    pub tau: f64,
    pub beta_mapped: f64,
}

pub fn fs_correspondence(n: u32, alpha: f64) -> Result<FsCorrespondence> {
    if !(alpha > 0.0) {
        return domain(format!("correspondence requires alpha > 0, got {alpha}"));
    }
    let nf = n as f64;
    let a = -alpha / 2.0;
    let b = bfs_first_order(n, a)?;
    let tau = 2.0 * nf / (nf - 2.0 * (1.0 + a - b));
    Ok(FsCorrespondence {
        a,
        b,
        tau,
        beta_mapped: -b * tau,
    })
}

/// Region of the `(alpha, beta)` plane for fixed `N`. Total: never fails.
pub fn classify(n: u32, alpha: f64, beta: f64) -> RegionClass {
    let tol = BOUNDARY_TOL;
    let nf = n as f64;
    if n < 5 || !alpha.is_finite() || !beta.is_finite() || alpha <= 2.0 - nf {
        return RegionClass::Invalid;
    }
    if (beta - (alpha - 2.0)).abs() <= tol {
        return RegionClass::RellichDegenerate;
    }
    let upper = beta_upper(n, alpha);
    if beta < alpha - 2.0 || beta > upper + tol {
        return RegionClass::Invalid;
    }
    if alpha.abs() <= tol && beta.abs() <= tol {
        return RegionClass::Classical;
    }
    if (beta - upper).abs() <= tol {
        if alpha > 0.0 {
            return RegionClass::NotAttainedBoundary;
        }
        if alpha < 0.0 {
            return RegionClass::ProvenSymmetryBoundary;
        }
    }
    if alpha > 0.0 {
        // radicand is positive for every N >= 5, alpha > 2 - N
        let fs = beta_fs(n, alpha).unwrap_or(f64::NAN);
        if beta > fs + tol && beta < upper - tol {
            return RegionClass::SymmetryBreaking;
        }
    }
    RegionClass::ConjecturedSymmetry
}

/// Constants of the weighted Hardy step: the sharp Hardy constant `E` and the
/// final comparison constant `C = 1 + |alpha| + E(|alpha| + alpha^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyConstants {
    pub e: f64,
    pub c: f64,
}

pub fn hardy_constants(p: &Params) -> HardyConstants {
    let e = (2.0 / p.decay_sum()).powi(2);
    let a = p.alpha.abs();
    HardyConstants {
        e,
        c: 1.0 + a + e * (a + p.alpha * p.alpha),
    }
}

/// `f(k) = (k + N/2 + a)^2 (k + (N-4)/2 - a)^2`.
pub fn rellich_term(n: u32, a: f64, k: u64) -> f64 {
    let nf = n as f64;
    let kf = k as f64;
    let g = (kf + nf / 2.0 + a) * (kf + (nf - 4.0) / 2.0 - a);
    g * g
}

/// Minimum of [`rellich_term`] over integers `k >= 0`, with the smallest minimiser.
///
/// `k -> (k + N/2 + a)(k + (N-4)/2 - a)` is a parabola with vertex at
/// `(2 - N)/2 < 0`, so it is increasing on `k >= 0`; past its larger root the
/// square is increasing too, which bounds the scan.
pub fn rellich_infimum(n: u32, a: f64) -> (f64, u64) {
    let nf = n as f64;
    let root = (a - (nf - 4.0) / 2.0).max(-nf / 2.0 - a).max(0.0);
    let last = root.ceil() as u64 + 2;
    let mut best = (rellich_term(n, a, 0), 0);
    for k in 1..=last {
        let v = rellich_term(n, a, k);
        if v < best.0 {
            best = (v, k);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        assert!(validate(5, 1.0, 1.0).is_ok());
        match validate(5, 1.0, 3.0) {
            Err(Error::InvalidParams(v)) => {
                assert_eq!(v.len(), 1);
                assert!(matches!(v[0], ParamViolation::BetaOutOfRange { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
        match validate(4, 0.5, 0.1) {
            Err(Error::InvalidParams(v)) => {
                assert!(matches!(v[0], ParamViolation::DimensionTooSmall { n: 4 }));
            }
            other => panic!("unexpected {other:?}"),
        }
        // all three at once
        match validate(3, -5.0, 10.0) {
            Err(Error::InvalidParams(v)) => assert_eq!(v.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
        // lower boundary is open, upper closed
        assert!(validate(5, 1.0, -1.0).is_err());
        assert!(validate(5, 1.0, 5.0 / 3.0).is_ok());
    }

    #[test]
    fn derive_examples() {
        let d = derive(&validate(5, 0.0, 0.0).unwrap());
        assert_eq!((d.p_star, d.q, d.m), (10.0, 1.0, 5.0));
        let d = derive(&validate(5, 1.0, 1.0).unwrap());
        assert!((d.p_star - 6.0).abs() < 1e-14 && (d.q - 1.0).abs() < 1e-15);
        assert!((d.m - 6.0).abs() < 1e-14);
        let p = validate(5, 1.0, 32f64.sqrt() - 5.0).unwrap();
        let d = derive(&p);
        assert!((d.m - 6.828_427_124_746_19).abs() < 1e-12);
        assert!((d.q - 1.207_106_781_186_547_5).abs() < 1e-12);
        assert!((d.q * d.q * 4.0 - (d.m - 1.0)).abs() < 1e-12);
        assert!((d.omega - 26.318_945_069_571_623).abs() < 1e-12);
    }

    #[test]
    fn fs_curve_examples() {
        assert_eq!(beta_fs(7, 0.0).unwrap(), 0.0);
        assert!((beta_fs(5, 1.0).unwrap() - 0.656_854_249_492_380_2).abs() < 1e-15);
        assert!((bfs_first_order(5, -0.5).unwrap() + 0.232_233_047_033_631_2).abs() < 1e-13);
        assert!(bfs_first_order(5, 1.5).is_err());
        let c = fs_correspondence(5, 1.0).unwrap();
        assert_eq!(c.a, -0.5);
        assert!((c.tau - 2.828_427_124_746_19).abs() < 1e-12);
        assert!((c.beta_mapped - beta_fs(5, 1.0).unwrap()).abs() < 1e-10);
        let c = fs_correspondence(5, 2.0).unwrap();
        assert!((c.beta_mapped - (41f64.sqrt() - 5.0)).abs() < 1e-10);
        assert!(fs_correspondence(5, 1e-9).unwrap().beta_mapped.abs() < 1e-8);
        assert!(fs_correspondence(5, 0.0).is_err());
    }

    #[test]
    fn first_order_curve_vanishes_at_critical_a() {
        let mut prev = f64::INFINITY;
        for d in [1.0, 0.1, 0.01, 1e-4] {
            let b = bfs_first_order(5, 1.5 - d).unwrap();
            assert!(b > 0.0 && b < prev);
            prev = b;
        }
        assert!((bfs_first_order(5, 1.5 - 1e-4).unwrap() - 2.499_999_984_374_725e-5).abs() < 1e-15);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(5, 1.0, 1.0), RegionClass::SymmetryBreaking);
        assert_eq!(classify(5, -1.0, -5.0 / 3.0), RegionClass::ProvenSymmetryBoundary);
        assert_eq!(classify(5, 0.5, 0.2), RegionClass::ConjecturedSymmetry);
        assert_eq!(classify(5, 0.0, 0.0), RegionClass::Classical);
        assert_eq!(classify(5, 1.0, -1.0), RegionClass::RellichDegenerate);
        assert_eq!(classify(5, 1.0, 5.0 / 3.0), RegionClass::NotAttainedBoundary);
        assert_eq!(classify(5, 1.0, 2.0), RegionClass::Invalid);
        assert_eq!(classify(4, 1.0, 1.0), RegionClass::Invalid);
        assert_eq!(classify(5, -3.0, -5.0), RegionClass::Invalid);
        // the curve itself belongs to the conjectured-symmetry side
        let fs = beta_fs(5, 1.0).unwrap();
        assert_eq!(classify(5, 1.0, fs), RegionClass::ConjecturedSymmetry);
    }

    #[test]
    fn hardy_examples() {
        let h = hardy_constants(&validate(5, 1.0, 1.0).unwrap());
        assert_eq!((h.e, h.c), (1.0, 4.0));
        let h = hardy_constants(&validate(5, 0.0, 0.0).unwrap());
        assert_eq!((h.e, h.c), (4.0, 1.0));
    }

    #[test]
    fn rellich_examples() {
        assert_eq!(rellich_infimum(5, 0.0), (1.5625, 0));
        assert_eq!(rellich_infimum(5, 2.0), (7.5625, 1));
        for (n, a) in [(5, 2.0), (6, -3.7), (8, 5.3), (5, -9.2)] {
            let (v, k) = rellich_infimum(n, a);
            if k > 0 {
                assert!(v <= rellich_term(n, a, k - 1));
            }
            assert!(v <= rellich_term(n, a, k + 1));
        }
    }
}
