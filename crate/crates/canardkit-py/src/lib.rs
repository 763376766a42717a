//! PyO3 bindings exposing the main canardkit types and operations.
//!
//! Build with `cargo build -p canardkit-py --release`, then rename the
//! produced cdylib to `canardkit_py.so` (see python/smoke_test.py, which
//! does this automatically).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use canardkit::fcm;
use canardkit::gspm;
use canardkit::numerics;
use canardkit::sysmodel;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// A singularly perturbed planar system eps*x' = f, y' = g.
#[pyclass(name = "System", skip_from_py_object)]
#[derive(Clone)]
struct PySystem {
    inner: sysmodel::SPSystem,
}

#[pymethods]
impl PySystem {
    #[new]
    #[pyo3(signature = (name, f, g, f0=None))]
    fn new(name: &str, f: &str, g: &str, f0: Option<&str>) -> PyResult<Self> {
        let f = sysmodel::parse_expression(f).map_err(value_err)?;
        let g = sysmodel::parse_expression(g).map_err(value_err)?;
        let f0 = match f0 {
            Some(src) => Some(canardkit::algebra::RationalFunction::from_poly(
                sysmodel::parse_expression(src).map_err(value_err)?,
            )),
            None => None,
        };
        let inner = sysmodel::SPSystem::new(name, f, g, f0).map_err(value_err)?;
        Ok(PySystem { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn f(&self) -> String {
        self.inner.f.to_string()
    }

    #[getter]
    fn g(&self) -> String {
        self.inner.g.to_string()
    }

    #[getter]
    fn affine_in_y(&self) -> bool {
        self.inner.affine_in_y
    }

    /// Graph of the critical manifold as a string.
    fn critical_manifold(&self) -> PyResult<String> {
        let m = sysmodel::critical_manifold(&self.inner).map_err(runtime_err)?;
        Ok(m.f0.to_string())
    }

    /// Fold abscissas, exact roots first converted to floats.
    fn fold_points(&self) -> PyResult<Vec<f64>> {
        let m = sysmodel::critical_manifold(&self.inner).map_err(runtime_err)?;
        let folds = sysmodel::fold_points(&m).map_err(runtime_err)?;
        Ok(folds.iter().map(|f| f.x0.to_f64()).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "System(name='{}', f='{}', g='{}')",
            self.inner.name, self.inner.f, self.inner.g
        )
    }
}

/// The Van der Pol oscillator.
#[pyfunction]
fn vdp() -> PySystem {
    PySystem {
        inner: sysmodel::vdp(),
    }
}

/// Canard expansion: F0..FN and mu0..mu_{N-1} as exact-rational strings.
#[pyclass(name = "Expansion", skip_from_py_object)]
#[derive(Clone)]
struct PyExpansion {
    inner: gspm::CanardExpansion,
}

#[pymethods]
impl PyExpansion {
    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.as_str()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    /// mu coefficients as exact strings, e.g. ["1", "-1/8"].
    #[getter]
    fn mu(&self) -> Vec<String> {
        self.inner.mu.iter().map(|m| m.to_string()).collect()
    }

    /// Manifold coefficients as (numerator, denominator) string pairs.
    #[getter]
    fn f(&self) -> Vec<(String, String)> {
        self.inner
            .f
            .iter()
            .map(|rf| (rf.num().to_string(), rf.den().to_string()))
            .collect()
    }

    /// Horner evaluation of the mu series at a numeric eps.
    fn mu_eval(&self, eps: f64) -> f64 {
        self.inner.mu_eval(eps)
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner.to_json()).unwrap()
    }

    fn __repr__(&self) -> String {
        format!(
            "Expansion(method='{}', order={}, mu={:?})",
            self.method(),
            self.order(),
            self.mu()
        )
    }
}

fn resolve_fold(
    system: &PySystem,
    fold: Option<f64>,
) -> PyResult<sysmodel::FoldPoint> {
    let m = sysmodel::critical_manifold(&system.inner).map_err(runtime_err)?;
    let folds = sysmodel::fold_points(&m).map_err(runtime_err)?;
    Ok(match fold {
        Some(near) => sysmodel::select_fold(&folds, near).clone(),
        None => sysmodel::default_fold(&folds).clone(),
    })
}

/// Compute the canard expansion by "gspm" or "fcm".
#[pyfunction]
#[pyo3(signature = (system, method="gspm", order=2, fold=None))]
fn expand(system: &PySystem, method: &str, order: usize, fold: Option<f64>) -> PyResult<PyExpansion> {
    if order < 1 {
        return Err(PyValueError::new_err("order must be at least 1"));
    }
    let fold = resolve_fold(system, fold)?;
    let inner = match method {
        "gspm" => gspm::expand_canard(&system.inner, order, &fold).map_err(runtime_err)?,
        "fcm" => fcm::fcm_expand(&system.inner, order, &fold, fcm::DEFAULT_MAX_PHI)
            .map_err(runtime_err)?,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method '{other}' (expected gspm or fcm)"
            )))
        }
    };
    Ok(PyExpansion { inner })
}

/// Exact comparison of two expansions through the common order.
#[pyfunction]
fn cross_validate<'py>(
    py: Python<'py>,
    e1: &PyExpansion,
    e2: &PyExpansion,
) -> PyResult<Bound<'py, PyDict>> {
    let report = fcm::cross_validate(&e1.inner, &e2.inner);
    let out = PyDict::new(py);
    out.set_item("equal", report.equal)?;
    out.set_item("compared_order", report.compared_order)?;
    out.set_item("first_divergence", report.first_divergence)?;
    Ok(out)
}

/// Curvature manifold phi_i with its stripped eps power.
#[pyfunction]
#[pyo3(signature = (system, index, max_index=fcm::DEFAULT_MAX_PHI))]
fn curvature_manifold<'py>(
    py: Python<'py>,
    system: &PySystem,
    index: u32,
    max_index: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let cm = fcm::curvature_manifold(&system.inner, index, max_index).map_err(runtime_err)?;
    let out = PyDict::new(py);
    out.set_item("index", cm.index)?;
    out.set_item("stripped_eps_power", cm.stripped_eps_power)?;
    out.set_item("phi", cm.phi.to_string())?;
    Ok(out)
}

/// Integrate the slow-time flow; returns a list of (t, x, y) samples.
#[pyfunction]
#[pyo3(signature = (system, mu, eps, tend, x0=0.5, y0=0.0, tol=1e-10))]
fn simulate(
    system: &PySystem,
    mu: f64,
    eps: f64,
    tend: f64,
    x0: f64,
    y0: f64,
    tol: f64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let sys = numerics::NumericSystem::compile(&system.inner, mu, eps, numerics::TimeScale::Slow);
    let traj = numerics::integrate(&sys, (x0, y0), tend, tol).map_err(runtime_err)?;
    Ok(traj
        .samples
        .iter()
        .map(|row| (row[0], row[1], row[2]))
        .collect())
}

/// Limit-cycle amplitude/period at fixed parameters.
#[pyfunction]
#[pyo3(signature = (system, mu, eps, transient=None, tol=1e-10))]
fn limit_cycle<'py>(
    py: Python<'py>,
    system: &PySystem,
    mu: f64,
    eps: f64,
    transient: Option<f64>,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let sys = numerics::NumericSystem::compile(&system.inner, mu, eps, numerics::TimeScale::Slow);
    let opts = numerics::CycleOptions {
        tol,
        transient,
        ..numerics::CycleOptions::default()
    };
    let lc = numerics::limit_cycle(&sys, (0.5, 0.0), &opts).map_err(runtime_err)?;
    let out = PyDict::new(py);
    out.set_item("amplitude_x", lc.amplitude_x)?;
    out.set_item("period", lc.period)?;
    out.set_item("converged", lc.converged)?;
    Ok(out)
}

/// Bisect the canard explosion between a relaxation-side and a
/// small-side mu value.
#[pyfunction]
#[pyo3(signature = (system, eps, mu_lo, mu_hi, threshold=2.0, resolution=1e-9, tol=1e-10))]
#[allow(clippy::too_many_arguments)]
fn locate_explosion<'py>(
    py: Python<'py>,
    system: &PySystem,
    eps: f64,
    mu_lo: f64,
    mu_hi: f64,
    threshold: f64,
    resolution: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = numerics::CycleOptions {
        tol,
        ..numerics::CycleOptions::default()
    };
    let start = if 0.5 * (mu_lo + mu_hi) < 0.0 {
        (-0.5, 0.0)
    } else {
        (0.5, 0.0)
    };
    let r = numerics::locate_explosion(
        &system.inner,
        eps,
        mu_lo,
        mu_hi,
        threshold,
        resolution,
        start,
        &opts,
    )
    .map_err(runtime_err)?;
    let out = PyDict::new(py);
    out.set_item("mu_star", r.mu_star)?;
    out.set_item("bracket_width", r.bracket_width)?;
    out.set_item("amplitude_below", r.amplitude_below)?;
    out.set_item("amplitude_above", r.amplitude_above)?;
    Ok(out)
}

#[pymodule]
fn canardkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PyExpansion>()?;
    m.add_function(wrap_pyfunction!(vdp, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(cross_validate, m)?)?;
    m.add_function(wrap_pyfunction!(curvature_manifold, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(limit_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(locate_explosion, m)?)?;
    Ok(())
}
