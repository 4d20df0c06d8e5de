//! `key = value` configuration files. Blank lines and `#` comments are ignored.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::quadrature::{QuadConfig, DEFAULT_NODE_CAP, DEFAULT_TOL};
use crate::variation;

/// Settings a config file may override. `None` means "not set here".
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ConfigFile {
    pub quad_tol: Option<f64>,
    pub node_cap: Option<usize>,
    pub certify_tol: Option<f64>,
    pub eps: Option<f64>,
    pub jobs: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = ConfigFile::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return domain(format!("config line {}: expected key = value", i + 1));
            };
            let (k, v) = (k.trim(), v.trim());
            let bad =
                |e: &dyn std::fmt::Display| crate::error::Error::Domain(format!("config line {}: {k}: {e}", i + 1));
            match k {
                "quad_tol" => c.quad_tol = Some(v.parse().map_err(|e| bad(&e))?),
                "node_cap" => c.node_cap = Some(v.parse().map_err(|e| bad(&e))?),
                "certify_tol" => c.certify_tol = Some(v.parse().map_err(|e| bad(&e))?),
                "eps" => c.eps = Some(v.parse().map_err(|e| bad(&e))?),
                "jobs" => c.jobs = Some(v.parse().map_err(|e| bad(&e))?),
                _ => return domain(format!("config line {}: unknown key '{k}'", i + 1)),
            }
        }
        Ok(c)
    }
}

/// Effective settings after applying flag > config file > default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Settings {
    pub quad: QuadConfig,
    pub certify_tol: f64,
    pub eps: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            quad: QuadConfig::default(),
            certify_tol: variation::DEFAULT_TOL,
            eps: variation::DEFAULT_EPS,
        }
    }
}

impl Settings {
    pub fn resolve(file: &ConfigFile, tol_flag: Option<f64>, eps_flag: Option<f64>) -> Self {
        Self {
            quad: QuadConfig {
                tol: file.quad_tol.unwrap_or(DEFAULT_TOL),
                node_cap: file.node_cap.unwrap_or(DEFAULT_NODE_CAP),
            },
            certify_tol: tol_flag.or(file.certify_tol).unwrap_or(variation::DEFAULT_TOL),
            eps: eps_flag.or(file.eps).unwrap_or(variation::DEFAULT_EPS),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_precedence() {
        let c = ConfigFile::parse("# tolerances\nquad_tol = 1e-12\neps=0.02 # inline\n\njobs = 3\n").unwrap();
        assert_eq!(c.quad_tol, Some(1e-12));
        assert_eq!(c.jobs, Some(3));
        let s = Settings::resolve(&c, None, Some(0.05));
        assert_eq!(s.quad.tol, 1e-12);
        assert_eq!(s.eps, 0.05);
        assert_eq!(s.certify_tol, variation::DEFAULT_TOL);
        assert_eq!(
            Settings::resolve(&ConfigFile::default(), None, None),
            Settings::default()
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(ConfigFile::parse("quad_tol 1e-9").is_err());
        assert!(ConfigFile::parse("colour = blue").is_err());
        assert!(ConfigFile::parse("node_cap = -1").is_err());
    }
}
