//! Python bindings. Structured results (reports, reach, Monte-Carlo runs)
//! come back as plain dicts; polynomials and solver results are classes.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use rankone_core as core;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn params(n: usize, d: usize) -> PyResult<core::SpaceParams> {
    core::SpaceParams::new(n, d).map_err(err)
}

fn value_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(x) => match (x.as_u64(), x.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (_, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => x.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(value_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, value_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    value_to_py(py, &v)
}

fn method(name: &str) -> PyResult<core::SolverMethod> {
    Ok(match name {
        "auto" => core::SolverMethod::Auto,
        "eigen" => core::SolverMethod::Eigen,
        "grid" => core::SolverMethod::Grid,
        "multistart" => core::SolverMethod::Multistart,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method {other:?}; expected auto, eigen, grid or multistart"
            )))
        }
    })
}

fn solver_options(name: &str, restarts: Option<usize>, seed: u64) -> PyResult<core::SolverOptions> {
    Ok(core::SolverOptions {
        method: method(name)?,
        restarts,
        ..core::SolverOptions::default()
    }
    .with_seed(core::SeedSpec::new(seed, 0)))
}

/// A homogeneous polynomial of degree `d` in `n + 1` variables, stored in
/// the orthonormal Bombieri–Weyl basis.
#[pyclass(name = "Polynomial", module = "rankone", from_py_object)]
#[derive(Clone)]
struct PyPolynomial {
    inner: core::BwPolynomial,
}

#[pymethods]
impl PyPolynomial {
    #[new]
    fn new(n: usize, d: usize, coeffs: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: core::BwPolynomial::new(params(n, d)?, coeffs).map_err(err)?,
        })
    }

    /// The rank-one tensor `a^{⊗d}`.
    #[staticmethod]
    fn veronese(d: usize, a: Vec<f64>) -> PyResult<Self> {
        if a.is_empty() {
            return Err(PyValueError::new_err("empty vector"));
        }
        let p = params(a.len() - 1, d)?;
        Ok(Self {
            inner: core::veronese(p, &a).map_err(err)?,
        })
    }

    /// A Kostlan (standard Gaussian) random polynomial.
    #[staticmethod]
    #[pyo3(signature = (n, d, seed, stream=0))]
    fn kostlan(n: usize, d: usize, seed: u64, stream: u64) -> PyResult<Self> {
        Ok(Self {
            inner: core::sample_kostlan(params(n, d)?, core::SeedSpec::new(seed, stream)),
        })
    }

    /// Symmetric matrix (list of rows) as a quadratic form.
    #[staticmethod]
    fn from_matrix(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let q = core::SymMatrix::from_rows(&rows).map_err(err)?;
        Ok(Self {
            inner: core::sym_matrix_to_poly(&q).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.params().n()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.params().d()
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs().to_vec()
    }

    /// Exponent vectors in coefficient order.
    fn multi_indices(&self) -> Vec<Vec<usize>> {
        self.inner
            .space()
            .indices()
            .iter()
            .map(|a| a.0.clone())
            .collect()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn inner(&self, other: &Self) -> PyResult<f64> {
        self.inner.inner(&other.inner).map_err(err)
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<f64> {
        if x.len() != self.inner.params().n() + 1 {
            return Err(PyValueError::new_err(format!(
                "expected {} variables, got {}",
                self.inner.params().n() + 1,
                x.len()
            )));
        }
        Ok(self.inner.evaluate(&x))
    }

    fn __repr__(&self) -> String {
        format!(
            "Polynomial(n={}, d={}, norm={:.6})",
            self.inner.params().n(),
            self.inner.params().d(),
            self.inner.norm()
        )
    }
}

#[pyclass(name = "RankOneResult", module = "rankone", get_all, frozen)]
struct PyRankOneResult {
    x_star: Vec<f64>,
    value: f64,
    abs_value: f64,
    distance: f64,
    converged: bool,
    restarts_used: usize,
    method: String,
}

#[pymethods]
impl PyRankOneResult {
    fn __repr__(&self) -> String {
        format!(
            "RankOneResult(value={:.6e}, distance={:.6e}, converged={}, method={})",
            self.value, self.distance, self.converged, self.method
        )
    }
}

impl From<core::RankOneResult> for PyRankOneResult {
    fn from(r: core::RankOneResult) -> Self {
        let method = match r.method {
            core::SolverMethod::Auto => "auto",
            core::SolverMethod::Eigen => "eigen",
            core::SolverMethod::Grid => "grid",
            core::SolverMethod::Multistart => "multistart",
        };
        Self {
            x_star: r.x_star,
            value: r.value,
            abs_value: r.abs_value,
            distance: r.distance,
            converged: r.converged,
            restarts_used: r.restarts_used,
            method: method.to_string(),
        }
    }
}

/// Sphere dimension `N = C(n+d, d) − 1`.
#[pyfunction]
fn sphere_dim(n: usize, d: usize) -> PyResult<usize> {
    Ok(params(n, d)?.sphere_dim())
}

/// `{"rho1", "rho2", "rho"}`.
#[pyfunction]
fn reach<'py>(py: Python<'py>, n: usize, d: usize) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &core::reach(params(n, d)?))
}

/// Closed-form probability; returns `(value, valid_range)`.
#[pyfunction]
fn prob_close_rank_one(n: usize, d: usize, delta: f64) -> PyResult<(f64, bool)> {
    let r = core::prob_close_rank_one(params(n, d)?, delta).map_err(err)?;
    Ok((r.value, r.valid_range))
}

#[pyfunction]
fn tube_volume(n: usize, d: usize, eps: f64) -> PyResult<(f64, bool)> {
    let r = core::tube_volume(params(n, d)?, eps).map_err(err)?;
    Ok((r.value, r.valid_range))
}

#[pyfunction]
fn veronese_volume(n: usize, d: usize) -> PyResult<f64> {
    Ok(core::veronese_volume(params(n, d)?))
}

/// Nonzero curvature coefficients keyed by `j`.
#[pyfunction]
fn curvature_coefficients(n: usize, d: usize) -> PyResult<std::collections::BTreeMap<usize, f64>> {
    Ok(core::curvature_table(params(n, d)?).entries)
}

#[pyfunction]
fn j_integral(big_n: usize, k: usize, eps: f64) -> PyResult<f64> {
    core::j_integral(big_n, k, eps).map_err(err)
}

#[pyfunction]
fn unique_approx_lower_bound(n: usize, d: usize) -> PyResult<f64> {
    Ok(core::unique_approx_lower_bound(params(n, d)?))
}

/// Coefficients of `E det(I − λQ)` for `Q ~ GOE(n)`, lowest degree first.
#[pyfunction]
fn goe_det_expectation(n: usize) -> PyResult<Vec<f64>> {
    Ok(core::goe_det_expectation(n).map_err(err)?.coeffs)
}

#[pyfunction]
fn geometry<'py>(py: Python<'py>, n: usize, d: usize) -> PyResult<Bound<'py, PyAny>> {
    let p = params(n, d)?;
    let split = core::normal_split(p);
    let out = PyDict::new(py);
    out.set_item("tangent_dim", split.tangent_dim())?;
    out.set_item("w_dim", split.w_dim())?;
    out.set_item("p_dim", split.p_dim())?;
    out.set_item("pullback_factor", core::pullback_factor(p))?;
    out.set_item("geodesic_curvature_norm", core::geodesic_curvature_norm(p))?;
    Ok(out.into_any())
}

#[pyfunction]
#[pyo3(signature = (p, method="auto", restarts=None, seed=0))]
fn best_rank_one(
    p: &PyPolynomial,
    method: &str,
    restarts: Option<usize>,
    seed: u64,
) -> PyResult<PyRankOneResult> {
    let opts = solver_options(method, restarts, seed)?;
    Ok(core::best_rank_one(&p.inner, &opts).map_err(err)?.into())
}

/// `(E_G, E_G_log)` for the normalized polynomial.
#[pyfunction]
#[pyo3(signature = (p, method="auto", restarts=None, seed=0))]
fn entanglement(
    p: &PyPolynomial,
    method: &str,
    restarts: Option<usize>,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let opts = solver_options(method, restarts, seed)?;
    let geometric = core::entanglement_geometric(&p.inner, &opts).map_err(err)?;
    let log = core::entanglement_log(&p.inner, &opts).map_err(err)?;
    Ok((
        geometric,
        if log.infinite {
            f64::INFINITY
        } else {
            log.value
        },
    ))
}

#[pyfunction]
#[pyo3(signature = (n, d, delta, samples=10_000, seed=0, workers=0, restarts=None))]
#[allow(clippy::too_many_arguments)]
fn mc_probability<'py>(
    py: Python<'py>,
    n: usize,
    d: usize,
    delta: f64,
    samples: usize,
    seed: u64,
    workers: usize,
    restarts: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = params(n, d)?;
    let cfg = core::McConfig::new(samples, seed).with_workers(workers);
    let opts = solver_options("auto", restarts, seed)?;
    let run = py
        .detach(|| core::mc_probability(p, delta, &cfg, &opts, false))
        .map_err(err)?;
    to_dict(py, &run)
}

#[pyfunction]
#[pyo3(signature = (n, lam, samples=10_000, seed=0, workers=0))]
fn mc_goe_det<'py>(
    py: Python<'py>,
    n: usize,
    lam: f64,
    samples: usize,
    seed: u64,
    workers: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = core::McConfig::new(samples, seed).with_workers(workers);
    let report = py.detach(|| core::mc_goe_det(n, lam, &cfg)).map_err(err)?;
    to_dict(py, &report)
}

#[pymodule]
fn rankone(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyRankOneResult>()?;
    m.add_function(wrap_pyfunction!(sphere_dim, m)?)?;
    m.add_function(wrap_pyfunction!(reach, m)?)?;
    m.add_function(wrap_pyfunction!(prob_close_rank_one, m)?)?;
    m.add_function(wrap_pyfunction!(tube_volume, m)?)?;
    m.add_function(wrap_pyfunction!(veronese_volume, m)?)?;
    m.add_function(wrap_pyfunction!(curvature_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(j_integral, m)?)?;
    m.add_function(wrap_pyfunction!(unique_approx_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(goe_det_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(geometry, m)?)?;
    m.add_function(wrap_pyfunction!(best_rank_one, m)?)?;
    m.add_function(wrap_pyfunction!(entanglement, m)?)?;
    m.add_function(wrap_pyfunction!(mc_probability, m)?)?;
    m.add_function(wrap_pyfunction!(mc_goe_det, m)?)?;
    Ok(())
}
