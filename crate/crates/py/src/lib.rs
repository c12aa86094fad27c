//! Python bindings: density matrices, correlation measures, sweeps and the
//! verification suites. Structured results come back as plain dicts.

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use einselect::correlations::{self, ProjectiveBasis};
use einselect::dynamics::{self, uniform_grid, ChannelFamily, SweepConfig};
use einselect::qstate::{self, Subsystem, XStateParams};
use einselect::{verify as suites, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Serializes through JSON so nested records become dicts and lists.
fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| to_py(e.into()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "DensityMatrix", module = "pyeinselect", frozen)]
struct PyDensityMatrix {
    inner: qstate::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    /// Builds a state from a square nested list of (complex) numbers.
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        qstate::DensityMatrix::from_rows(&rows)
            .map(|inner| PyDensityMatrix { inner })
            .map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn to_list(&self) -> Vec<Vec<Complex64>> {
        let n = self.inner.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.inner.entry(i, j)).collect())
            .collect()
    }

    fn entropy(&self) -> PyResult<f64> {
        qstate::von_neumann_entropy(&self.inner).map_err(to_py)
    }

    /// `keep` is "system" or "apparatus".
    fn partial_trace(&self, keep: &str) -> PyResult<Self> {
        let keep = match keep {
            "system" => Subsystem::System,
            "apparatus" => Subsystem::Apparatus,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown subsystem `{other}`"
                )))
            }
        };
        qstate::partial_trace(&self.inner, keep)
            .map(|inner| PyDensityMatrix { inner })
            .map_err(to_py)
    }

    /// Applies a channel family ("pd", "ad", "pointer[:theta,phi]") to the apparatus.
    fn evolve(&self, channel: &str, p: f64) -> PyResult<Self> {
        let family: ChannelFamily = channel.parse().map_err(to_py)?;
        family
            .evolve(&self.inner, p)
            .map(|inner| PyDensityMatrix { inner })
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={})", self.inner.dim())
    }
}

#[pyfunction]
fn make_x_state(c: f64, b: f64, z: f64, w: f64) -> PyResult<PyDensityMatrix> {
    XStateParams::new(c, b, z, w)
        .and_then(qstate::make_x_state)
        .map(|inner| PyDensityMatrix { inner })
        .map_err(to_py)
}

#[pyfunction]
fn remark_state() -> PyDensityMatrix {
    PyDensityMatrix {
        inner: qstate::remark_state(),
    }
}

#[pyfunction]
fn bell_phi_plus() -> PyDensityMatrix {
    PyDensityMatrix {
        inner: qstate::bell_phi_plus(),
    }
}

/// `J` for the apparatus measurement along Bloch angles `(theta, phi)`.
#[pyfunction]
fn classical_correlation(rho: &PyDensityMatrix, theta: f64, phi: f64) -> PyResult<f64> {
    correlations::classical_correlation(&rho.inner, &ProjectiveBasis::new(theta, phi))
        .map_err(to_py)
}

/// `(J^max, theta, phi)` of the optimal measurement.
#[pyfunction]
fn maximize(rho: &PyDensityMatrix) -> PyResult<(f64, f64, f64)> {
    let m = correlations::maximize_classical_correlation(&rho.inner).map_err(to_py)?;
    Ok((m.value, m.basis.theta(), m.basis.phi()))
}

#[pyfunction]
fn mutual_information(rho: &PyDensityMatrix) -> PyResult<f64> {
    correlations::mutual_information(&rho.inner).map_err(to_py)
}

#[pyfunction]
fn quantum_discord(rho: &PyDensityMatrix) -> PyResult<f64> {
    correlations::quantum_discord(&rho.inner).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (rho, channel = "pd", grid = dynamics::DEFAULT_GRID_POINTS, gamma = 1.0))]
fn sweep<'py>(
    py: Python<'py>,
    rho: &PyDensityMatrix,
    channel: &str,
    grid: usize,
    gamma: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let family: ChannelFamily = channel.parse().map_err(to_py)?;
    let config = SweepConfig {
        decay_rate: einselect::channels::DecayRate::new(gamma).map_err(to_py)?,
        ..SweepConfig::default()
    };
    let points = uniform_grid(grid).map_err(to_py)?;
    let state = rho.inner.clone();
    let report = py
        .detach(|| dynamics::sweep(&state, family, &points, &config))
        .map_err(to_py)?;
    to_dict(py, &report)
}

/// Closed-form emergence under phase damping; `None` if the pointer basis never takes over.
#[pyfunction]
#[pyo3(signature = (c, b, z, w, gamma = 1.0))]
fn emergence_time<'py>(
    py: Python<'py>,
    c: f64,
    b: f64,
    z: f64,
    w: f64,
    gamma: f64,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    let params = XStateParams::new(c, b, z, w).map_err(to_py)?;
    let rate = einselect::channels::DecayRate::new(gamma).map_err(to_py)?;
    let Some(e) = dynamics::emergence_time(params, rate).map_err(to_py)? else {
        return Ok(None);
    };
    let d = PyDict::new(py);
    d.set_item("tau_e", e.tau_e)?;
    d.set_item("p_e", e.p_e)?;
    d.set_item("tau_d", e.tau_d)?;
    d.set_item("p_at_tau_d", e.p_at_tau_d)?;
    Ok(Some(d))
}

/// Runs a property suite ("theorem1", "theorem2", "lemma1", "remark").
#[pyfunction]
#[pyo3(signature = (suite, trials, seed = 0))]
fn verify<'py>(
    py: Python<'py>,
    suite: &str,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let suite: suites::Suite = suite.parse().map_err(to_py)?;
    let outcome = py
        .detach(|| suites::run_suite(suite, trials, seed))
        .map_err(to_py)?;
    to_dict(py, &outcome)
}

#[pymodule]
fn pyeinselect(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_function(wrap_pyfunction!(make_x_state, m)?)?;
    m.add_function(wrap_pyfunction!(remark_state, m)?)?;
    m.add_function(wrap_pyfunction!(bell_phi_plus, m)?)?;
    m.add_function(wrap_pyfunction!(classical_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(maximize, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_discord, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(emergence_time, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
