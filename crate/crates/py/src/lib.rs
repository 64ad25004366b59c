//! Python bindings. Matrices cross the boundary as nested lists of complex
//! numbers; reports come back as dictionaries with the same layout as the
//! command-line JSON.

use lu_orbits as lu;
use lu_orbits::invariants::DEFAULT_CLUSTER_TOL;
use lu_orbits::io;
use lu_orbits::linalg::{CMatrix, C64};
use lu_orbits::moment::DEFAULT_SPECTRUM_TOL;
use lu_orbits::oracle::DEFAULT_RANK_TOL;
use lu_orbits::states::{self, ParticleCase, QuantumState};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::Value;

create_exception!(lu_orbits, LuOrbitsError, PyValueError);

fn err(e: lu_orbits::Error) -> PyErr {
    LuOrbitsError::new_err(e.to_string())
}

fn parse_case(case: &str) -> PyResult<ParticleCase> {
    case.parse().map_err(err)
}

fn to_matrix(rows: Vec<Vec<C64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(LuOrbitsError::new_err("empty matrix"));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(LuOrbitsError::new_err("ragged matrix rows"));
    }
    Ok(CMatrix::from_fn(n, cols, |i, j| rows[i][j]))
}

fn from_matrix(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// A normalized two-particle pure state.
#[pyclass(name = "State", module = "lu_orbits", frozen)]
struct PyState {
    inner: QuantumState,
}

#[pymethods]
impl PyState {
    /// Validate a coefficient matrix for `case` ("boson", "fermion" or "dist").
    #[new]
    #[pyo3(signature = (matrix, case, tol = DEFAULT_SPECTRUM_TOL))]
    fn new(matrix: Vec<Vec<C64>>, case: &str, tol: f64) -> PyResult<Self> {
        let m = to_matrix(matrix)?;
        let inner = states::validate(&m, parse_case(case)?, tol).map_err(err)?;
        Ok(PyState { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (case, n, seed = 0))]
    fn random(case: &str, n: usize, seed: u64) -> PyResult<Self> {
        let inner = states::random_state(parse_case(case)?, n, seed).map_err(err)?;
        Ok(PyState { inner })
    }

    /// Load from the state file JSON format.
    #[staticmethod]
    #[pyo3(signature = (text, tol = DEFAULT_SPECTRUM_TOL))]
    fn from_json(text: &str, tol: f64) -> PyResult<Self> {
        Ok(PyState {
            inner: io::parse_state(text, tol).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        io::state_json(&self.inner).to_string()
    }

    #[getter]
    fn case(&self) -> &'static str {
        self.inner.case().as_str()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<C64>> {
        from_matrix(self.inner.coeffs())
    }

    fn act(&self, g: &PyLocalUnitary) -> PyResult<PyState> {
        Ok(PyState {
            inner: self.inner.act(&g.inner).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("State(case={:?}, n={})", self.inner.case().as_str(), self.inner.n())
    }
}

/// An element of SU(N) (two of them for distinguishable particles).
#[pyclass(name = "LocalUnitary", module = "lu_orbits", frozen)]
struct PyLocalUnitary {
    inner: states::LocalUnitary,
}

#[pymethods]
impl PyLocalUnitary {
    #[new]
    #[pyo3(signature = (case, u, v = None))]
    fn new(case: &str, u: Vec<Vec<C64>>, v: Option<Vec<Vec<C64>>>) -> PyResult<Self> {
        let v = v.map(to_matrix).transpose()?;
        let inner = states::LocalUnitary::new(parse_case(case)?, to_matrix(u)?, v).map_err(err)?;
        Ok(PyLocalUnitary { inner })
    }

    /// Haar-random element, reproducible per seed.
    #[staticmethod]
    #[pyo3(signature = (case, n, seed = 0))]
    fn random(case: &str, n: usize, seed: u64) -> PyResult<Self> {
        let inner = states::random_local_unitary(parse_case(case)?, n, seed).map_err(err)?;
        Ok(PyLocalUnitary { inner })
    }

    #[getter]
    fn u(&self) -> Vec<Vec<C64>> {
        from_matrix(self.inner.u())
    }

    #[getter]
    fn v(&self) -> Option<Vec<Vec<C64>>> {
        self.inner.v().map(from_matrix)
    }
}

#[pyfunction]
#[pyo3(signature = (matrix, case, tol = DEFAULT_SPECTRUM_TOL))]
fn validate(matrix: Vec<Vec<C64>>, case: &str, tol: f64) -> PyResult<PyState> {
    PyState::new(matrix, case, tol)
}

#[pyfunction]
#[pyo3(signature = (case, n, seed = 0))]
fn random_state(case: &str, n: usize, seed: u64) -> PyResult<PyState> {
    PyState::random(case, n, seed)
}

/// Moment spectrum: `{"q", "p", "case"}`.
#[pyfunction]
fn moment<'py>(py: Python<'py>, state: &PyState) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &io::moment_json(&lu::moment::reduced_matrix(&state.inner)))
}

/// Canonical slice point with its witness.
#[pyfunction]
fn canonicalize<'py>(py: Python<'py>, state: &PyState) -> PyResult<Bound<'py, PyAny>> {
    let cf = lu::slice::canonicalize(&state.inner).map_err(err)?;
    to_py(py, &io::canonical_json(&cf))
}

/// Stratum, fiber factors and orbit dimensions.
#[pyfunction]
#[pyo3(signature = (state, cluster_tol = DEFAULT_CLUSTER_TOL))]
fn invariants<'py>(py: Python<'py>, state: &PyState, cluster_tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let cf = lu::slice::canonicalize(&state.inner).map_err(err)?;
    let inv = lu::invariants::orbit_invariants(&cf, cluster_tol).map_err(err)?;
    to_py(py, &io::stratum_json(&inv))
}

/// Numerical orbit dimension and degeneracy compared with the formulas.
#[pyfunction]
#[pyo3(signature = (state, rank_tol = DEFAULT_RANK_TOL, cluster_tol = DEFAULT_CLUSTER_TOL))]
fn oracle<'py>(py: Python<'py>, state: &PyState, rank_tol: f64, cluster_tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let r = py
        .detach(|| lu::oracle::oracle_check(&state.inner, rank_tol, cluster_tol))
        .map_err(err)?;
    to_py(py, &io::oracle_json(&r))
}

#[pyfunction]
#[pyo3(signature = (a, b, tol = DEFAULT_SPECTRUM_TOL))]
fn lu_equivalent<'py>(py: Python<'py>, a: &PyState, b: &PyState, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let v = lu::equivalence::lu_equivalent(&a.inner, &b.inner, tol).map_err(err)?;
    to_py(py, &io::verdict_json(&v))
}

#[pyfunction]
fn same_stratum(a: &PyState, b: &PyState) -> PyResult<bool> {
    lu::equivalence::same_stratum(&a.inner, &b.inner).map_err(err)
}

#[pyfunction]
fn enumerate_strata<'py>(py: Python<'py>, case: &str, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let rows = lu::invariants::enumerate_strata(parse_case(case)?, n).map_err(err)?;
    to_py(py, &Value::Array(rows.iter().map(io::stratum_json).collect()))
}

#[pyfunction]
fn counterexample_demo<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &io::counterexample_json(&lu::oracle::counterexample_demo()))
}

#[pymodule]
#[pyo3(name = "lu_orbits")]
pub fn lu_orbits_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LuOrbitsError", m.py().get_type::<LuOrbitsError>())?;
    m.add_class::<PyState>()?;
    m.add_class::<PyLocalUnitary>()?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(random_state, m)?)?;
    m.add_function(wrap_pyfunction!(moment, m)?)?;
    m.add_function(wrap_pyfunction!(canonicalize, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(lu_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(same_stratum, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_strata, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample_demo, m)?)?;
    Ok(())
}
