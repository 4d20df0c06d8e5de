//! Python bindings: `import ckn_lab_py`.

use std::collections::BTreeSet;

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ckn_lab::extremal::{amplitude_constant, s_0_closed, s_r_closed};
use ckn_lab::params::{self, validate};
use ckn_lab::quadrature::QuadConfig;
use ckn_lab::scan::{run_scan, BetaRange, Output, Range, ScanSpec};
use ckn_lab::{spectral, variation, verify, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidParams(_) | Error::Domain(_) => PyValueError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

#[pyclass(name = "Params", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyParams(ckn_lab::Params);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (n, alpha, beta))]
    fn new(n: u32, alpha: f64, beta: f64) -> PyResult<Self> {
        validate(n, alpha, beta).map(PyParams).map_err(py_err)
    }

    #[getter(N)]
    fn n(&self) -> u32 {
        self.0.n()
    }
    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }
    #[getter]
    fn p_star(&self) -> f64 {
        self.0.derive().p_star
    }
    #[getter]
    fn q(&self) -> f64 {
        self.0.derive().q
    }
    #[getter(M)]
    fn m(&self) -> f64 {
        self.0.derive().m
    }
    #[getter]
    fn region(&self) -> &'static str {
        params::classify(self.0.n(), self.0.alpha(), self.0.beta()).as_str()
    }
    fn s_r(&self) -> f64 {
        s_r_closed(&self.0)
    }
    fn amplitude(&self) -> f64 {
        amplitude_constant(&self.0)
    }
    fn __repr__(&self) -> String {
        format!(
            "Params(N={}, alpha={}, beta={})",
            self.0.n(),
            self.0.alpha(),
            self.0.beta()
        )
    }
}

#[pyclass(name = "SecondVariation", frozen, get_all)]
struct PySecondVariation {
    value: f64,
    exact: f64,
    mu: f64,
    factor: f64,
    i1: f64,
    i2: f64,
    j1: f64,
    prefactor: f64,
}

#[pyclass(name = "Certificate", frozen, get_all)]
struct PyCertificate {
    s_r: f64,
    second_variation: f64,
    second_variation_exact: f64,
    directional_quotient: f64,
    quotient_curvature: f64,
    ritz_rho1: f64,
    verdict: &'static str,
    expected: &'static str,
    consistent: bool,
    passed: bool,
    discrepancies: Vec<String>,
}

#[pyclass(name = "RitzResult", frozen, get_all)]
struct PyRitzResult {
    min_eigenvalue: f64,
    coefficients: Vec<f64>,
    basis_size: usize,
    gram_condition: f64,
}

#[pyfunction]
#[pyo3(signature = (n, alpha, beta))]
fn classify(n: u32, alpha: f64, beta: f64) -> &'static str {
    params::classify(n, alpha, beta).as_str()
}

#[pyfunction]
#[pyo3(signature = (n, alpha))]
fn beta_fs(n: u32, alpha: f64) -> PyResult<f64> {
    params::beta_fs(n, alpha).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (n,))]
fn s_0(n: u32) -> PyResult<f64> {
    s_0_closed(n).map_err(py_err)
}

#[pyfunction]
fn second_variation(p: &PyParams) -> PyResult<PySecondVariation> {
    let s = variation::second_variation(&p.0).map_err(py_err)?;
    Ok(PySecondVariation {
        value: s.value,
        exact: s.exact,
        mu: s.mu,
        factor: s.factor,
        i1: s.i1,
        i2: s.i2,
        j1: s.j1,
        prefactor: s.prefactor,
    })
}

#[pyfunction]
#[pyo3(signature = (p, eps = variation::DEFAULT_EPS, tol = variation::DEFAULT_TOL))]
fn certify(p: &PyParams, eps: f64, tol: f64) -> PyResult<PyCertificate> {
    let c = variation::certify_with(&p.0, eps, tol, &QuadConfig::default()).map_err(py_err)?;
    Ok(PyCertificate {
        s_r: c.s_r,
        second_variation: c.second_variation,
        second_variation_exact: c.second_variation_exact,
        directional_quotient: c.directional_quotient,
        quotient_curvature: c.quotient_curvature,
        ritz_rho1: c.ritz_rho1,
        verdict: c.verdict.as_str(),
        expected: c.expected.as_str(),
        consistent: c.consistent,
        passed: c.passed(),
        discrepancies: c.discrepancies,
    })
}

#[pyfunction]
#[pyo3(signature = (k, p, j = spectral::FS_BASIS))]
fn ritz_min_eig(k: u32, p: &PyParams, j: usize) -> PyResult<PyRitzResult> {
    let r = spectral::ritz_min_eig(k, &p.0, j).map_err(py_err)?;
    Ok(PyRitzResult {
        min_eigenvalue: r.min_eigenvalue,
        coefficients: r.coefficients,
        basis_size: r.basis_size,
        gram_condition: r.gram_condition,
    })
}

#[pyfunction]
#[pyo3(signature = (n, alpha, tol = 1e-8))]
fn fs_locate(n: u32, alpha: f64, tol: f64) -> PyResult<f64> {
    spectral::fs_locate(n, alpha, tol).map_err(py_err)
}

/// Region scan; `beta=None` uses the automatic strip with `beta_steps` points.
#[pyfunction]
#[pyo3(signature = (n, alpha, beta = None, beta_steps = 20, jobs = 1))]
fn scan<'py>(
    py: Python<'py>,
    n: u32,
    alpha: (f64, f64, usize),
    beta: Option<(f64, f64, usize)>,
    beta_steps: usize,
    jobs: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let spec = ScanSpec {
        n,
        alpha_range: Range::new(alpha.0, alpha.1, alpha.2).map_err(py_err)?,
        beta_range: match beta {
            Some((lo, hi, s)) => BetaRange::Fixed(Range::new(lo, hi, s).map_err(py_err)?),
            None => BetaRange::Auto { steps: beta_steps },
        },
        outputs: Output::ALL.into_iter().collect::<BTreeSet<_>>(),
    };
    let records = py
        .detach(|| run_scan(&spec, jobs, &QuadConfig::default(), false))
        .map_err(py_err)?;
    records
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("N", r.n)?;
            d.set_item("alpha", r.alpha)?;
            d.set_item("beta", r.beta)?;
            d.set_item("class", r.class_tag.as_str())?;
            d.set_item("beta_fs", r.beta_fs_value)?;
            d.set_item("s_r", r.s_r)?;
            d.set_item("second_variation", r.second_variation)?;
            d.set_item("rho1", r.rho1)?;
            Ok(d)
        })
        .collect()
}

/// `[(name, passed, detail), ...]` for the invariant battery.
#[pyfunction]
#[pyo3(signature = (full = false))]
fn verify_all(py: Python<'_>, full: bool) -> Vec<(&'static str, bool, String)> {
    let opts = verify::VerifyOptions {
        full,
        inject_fault: false,
    };
    py.detach(|| verify::verify_all(&opts))
        .into_iter()
        .map(|o| (o.name, o.pass, o.detail))
        .collect()
}

#[pymodule]
fn ckn_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PySecondVariation>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyRitzResult>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(beta_fs, m)?)?;
    m.add_function(wrap_pyfunction!(s_0, m)?)?;
    m.add_function(wrap_pyfunction!(second_variation, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(ritz_min_eig, m)?)?;
    m.add_function(wrap_pyfunction!(fs_locate, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    Ok(())
}
