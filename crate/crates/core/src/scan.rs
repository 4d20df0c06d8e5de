//! Parameter-grid scans over `(α, β)` for fixed `N`.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::extremal::s_r_closed;
use crate::params::{beta_fs, beta_upper, classify, validate, RegionClass};
use crate::quadrature::QuadConfig;
use crate::spectral::{ritz_min_eig_with, FS_BASIS};
use crate::variation::second_variation;

pub const CSV_HEADER: &str = "N,alpha,beta,class,beta_fs,s_r,second_variation,rho1,wall_time_ms";

/// `steps` equally spaced points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Range {
    /// `steps ≥ 2` with `lo < hi`, or a single point with `lo == hi`.
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        let ok = lo.is_finite() && hi.is_finite() && ((steps >= 2 && lo < hi) || (steps == 1 && lo == hi));
        if !ok {
            return domain(format!(
                "range needs steps >= 2 with lo < hi, or steps = 1 with lo = hi; got ({lo}, {hi}, {steps})"
            ));
        }
        Ok(Self { lo, hi, steps })
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x, steps: 1 }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let h = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.hi
                } else {
                    self.lo + h * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BetaRange {
    Fixed(Range),
    /// `steps` points on `[α − 2 + δ, Nα/(N−2)]`, `δ = 10⁻³ × width`.
    Auto {
        steps: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Output {
    Class,
    SR,
    BetaFs,
    SecondVariation,
    Rho1,
}

impl Output {
    pub const ALL: [Output; 5] = [
        Output::Class,
        Output::SR,
        Output::BetaFs,
        Output::SecondVariation,
        Output::Rho1,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "class" => Output::Class,
            "s_r" => Output::SR,
            "beta_fs" => Output::BetaFs,
            "second_variation" => Output::SecondVariation,
            "rho1" => Output::Rho1,
            _ => return domain(format!("unknown scan output '{s}'")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSpec {
    pub n: u32,
    pub alpha_range: Range,
    pub beta_range: BetaRange,
    pub outputs: BTreeSet<Output>,
}

impl ScanSpec {
    /// Grid points in row-major order: `α` outer, `β` inner.
    pub fn grid(&self) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        for a in self.alpha_range.values() {
            let betas = match self.beta_range {
                BetaRange::Fixed(r) => r.values(),
                BetaRange::Auto { steps } => {
                    let lo = a - 2.0;
                    let hi = beta_upper(self.n, a);
                    let width = hi - lo;
                    if !(width > 0.0) || steps < 2 {
                        return domain(format!("automatic beta range is empty at alpha = {a} (or steps < 2)"));
                    }
                    Range::new(lo + 1e-3 * width, hi, steps)?.values()
                }
            };
            out.extend(betas.into_iter().map(|b| (a, b)));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRecord {
    #[serde(rename = "N")]
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "class")]
    pub class_tag: RegionClass,
    #[serde(rename = "beta_fs")]
    pub beta_fs_value: Option<f64>,
    pub s_r: Option<f64>,
    pub second_variation: Option<f64>,
    pub rho1: Option<f64>,
    /// Filled only when timing is requested, so output stays reproducible.
    pub wall_time_ms: Option<f64>,
    /// Cells that failed to compute, as `(column, message)`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<(String, String)>,
}

fn keep<T>(r: Result<T>, column: &str, errors: &mut Vec<(String, String)>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push((column.to_string(), e.to_string()));
            None
        }
    }
}

/// One grid point. Quantities that are undefined (invalid parameters) or not
/// requested stay `None`.
pub fn scan_point(
    n: u32,
    alpha: f64,
    beta: f64,
    outputs: &BTreeSet<Output>,
    cfg: &QuadConfig,
    timing: bool,
) -> ScanRecord {
    let start = Instant::now();
    let class_tag = classify(n, alpha, beta);
    let mut errors = Vec::new();
    let mut rec = ScanRecord {
        n,
        alpha,
        beta,
        class_tag,
        beta_fs_value: None,
        s_r: None,
        second_variation: None,
        rho1: None,
        wall_time_ms: None,
        errors: Vec::new(),
    };
    if outputs.contains(&Output::BetaFs) && n >= 5 && alpha > 0.0 {
        rec.beta_fs_value = beta_fs(n, alpha).ok();
    }
    if let Ok(p) = validate(n, alpha, beta) {
        if outputs.contains(&Output::SR) {
            rec.s_r = Some(s_r_closed(&p));
        }
        if outputs.contains(&Output::SecondVariation) {
            rec.second_variation = keep(second_variation(&p).map(|s| s.value), "second_variation", &mut errors);
        }
        if outputs.contains(&Output::Rho1) {
            rec.rho1 = keep(
                ritz_min_eig_with(1, &p, FS_BASIS, cfg).map(|r| r.min_eigenvalue),
                "rho1",
                &mut errors,
            );
        }
    }
    if timing {
        rec.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    rec.errors = errors;
    rec
}

/// Evaluates the grid on `jobs` workers; the result is in grid order.
pub fn run_scan(spec: &ScanSpec, jobs: usize, cfg: &QuadConfig, timing: bool) -> Result<Vec<ScanRecord>> {
    let grid = spec.grid()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| crate::error::Error::Domain(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        grid.par_iter()
            .map(|&(a, b)| scan_point(spec.n, a, b, &spec.outputs, cfg, timing))
            .collect()
    }))
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One CSV line (no newline) in the column order of [`CSV_HEADER`].
pub fn csv_row(r: &ScanRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.n,
        r.alpha,
        r.beta,
        r.class_tag,
        cell(r.beta_fs_value),
        cell(r.s_r),
        cell(r.second_variation),
        cell(r.rho1),
        cell(r.wall_time_ms)
    )
}

pub fn write_csv<W: Write>(mut w: W, records: &[ScanRecord]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", csv_row(r))?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all() -> BTreeSet<Output> {
        Output::ALL.into_iter().collect()
    }

    #[test]
    fn ranges() {
        assert_eq!(Range::new(0.0, 1.0, 3).unwrap().values(), vec![0.0, 0.5, 1.0]);
        assert_eq!(Range::point(2.0).values(), vec![2.0]);
        assert!(Range::new(1.0, 0.0, 3).is_err());
        assert!(Range::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn auto_grid_stays_inside() {
        let spec = ScanSpec {
            n: 5,
            alpha_range: Range::new(0.1, 2.0, 4).unwrap(),
            beta_range: BetaRange::Auto { steps: 5 },
            outputs: all(),
        };
        let g = spec.grid().unwrap();
        assert_eq!(g.len(), 20);
        for (a, b) in g {
            assert!(validate(5, a, b).is_ok(), "{a} {b}");
        }
    }

    #[test]
    fn invalid_point_has_only_class() {
        let r = scan_point(5, 1.0, 3.0, &all(), &QuadConfig::default(), false);
        assert_eq!(r.class_tag, RegionClass::Invalid);
        assert!(r.s_r.is_none() && r.second_variation.is_none() && r.rho1.is_none());
        assert_eq!(csv_row(&r), format!("5,1,3,Invalid,{},,,,", beta_fs(5, 1.0).unwrap()));
    }

    #[test]
    fn csv_layout() {
        let r = scan_point(5, 1.0, 1.0, &all(), &QuadConfig::default(), false);
        let line = csv_row(&r);
        assert_eq!(line.split(',').count(), CSV_HEADER.split(',').count());
        assert!(line.starts_with("5,1,1,SymmetryBreaking,"));
        assert!(line.ends_with(','));
    }
}
