//! Python bindings. Scalars cross the boundary as canonical strings such as
//! `"3/5"` or `"-1/2+1/2*sqrt(5)"`; structured results come back as dicts.

use iet_core::diophantine;
use iet_core::induction::{self, StackCheck};
use iet_core::spectral;
use iet_core::{Iet, Permutation, Scalar};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pythonize::pythonize;
use serde_json::json;

fn scalar(text: &str) -> PyResult<Scalar> {
    text.parse()
        .map_err(|e| PyValueError::new_err(format!("{text:?}: {e}")))
}

fn err(e: iet_core::Error) -> PyErr {
    use iet_core::Error as E;
    match e {
        E::Scalar(_) | E::InvalidPermutation(_) | E::InvalidLengths(_) | E::OutOfDomain { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: serde::Serialize + ?Sized>(
    py: Python<'py>,
    value: &T,
) -> PyResult<Bound<'py, PyAny>> {
    pythonize(py, value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// An interval exchange transformation with exact lengths.
#[pyclass(name = "Iet", module = "iet", frozen)]
struct PyIet {
    inner: Iet,
}

#[pymethods]
impl PyIet {
    #[new]
    fn new(lengths: Vec<String>, perm: Vec<usize>) -> PyResult<Self> {
        let lengths = lengths
            .iter()
            .map(|s| scalar(s))
            .collect::<PyResult<Vec<_>>>()?;
        let perm = Permutation::new(perm).map_err(err)?;
        Ok(PyIet {
            inner: Iet::new(lengths, perm).map_err(err)?,
        })
    }

    /// Rotation by `alpha` as the 2-IET with lengths `(1 - alpha, alpha)`.
    #[staticmethod]
    fn rotation(alpha: &str) -> PyResult<Self> {
        Ok(PyIet {
            inner: Iet::rotation(scalar(alpha)?).map_err(err)?,
        })
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    #[getter]
    fn lengths(&self) -> Vec<String> {
        self.inner.lengths().iter().map(Scalar::to_string).collect()
    }

    #[getter]
    fn perm(&self) -> Vec<usize> {
        self.inner.permutation().images().to_vec()
    }

    #[getter]
    fn total_length(&self) -> String {
        self.inner.total_length().to_string()
    }

    #[getter]
    fn discontinuities(&self) -> Vec<String> {
        self.inner
            .discontinuities()
            .iter()
            .map(Scalar::to_string)
            .collect()
    }

    #[getter]
    fn translations(&self) -> Vec<String> {
        self.inner
            .translations()
            .iter()
            .map(Scalar::to_string)
            .collect()
    }

    fn evaluate(&self, x: &str) -> PyResult<String> {
        Ok(self.inner.evaluate(&scalar(x)?).map_err(err)?.to_string())
    }

    fn evaluate_inverse(&self, y: &str) -> PyResult<String> {
        Ok(self
            .inner
            .evaluate_inverse(&scalar(y)?)
            .map_err(err)?
            .to_string())
    }

    /// `[(k, f^k(x))]` for `k = -n..n-1`, or `-n..n` when `symmetric`.
    #[pyo3(signature = (x, n, symmetric = false))]
    fn orbit(&self, x: &str, n: u64, symmetric: bool) -> PyResult<Vec<(i64, String)>> {
        let x = scalar(x)?;
        let w = if symmetric {
            self.inner.orbit_window_symmetric(&x, n)
        } else {
            self.inner.orbit_window(&x, n)
        }
        .map_err(err)?;
        Ok(w.iter().map(|(k, v)| (k, v.to_string())).collect())
    }

    fn check_idoc<'py>(&self, py: Python<'py>, depth: u64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.check_idoc(depth))
    }

    fn dprime_probe<'py>(
        &self,
        py: Python<'py>,
        x: &str,
        depth: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &self.inner.dprime_probe(&scalar(x)?, depth).map_err(err)?,
        )
    }

    #[pyo3(signature = (t, step_cap = induction::DEFAULT_STEP_CAP))]
    fn induce<'py>(&self, py: Python<'py>, t: &str, step_cap: u64) -> PyResult<Bound<'py, PyAny>> {
        let induced = induction::induce(&self.inner, &scalar(t)?, step_cap).map_err(err)?;
        let doc = json!({
            "t": induced.t(),
            "s": induced.piece_count(),
            "perm": induced.iet().permutation().images(),
            "pieces": induced.pieces(),
        });
        to_py(py, &doc)
    }

    /// `rho`, `rho_n`, `delta_n` and `rho'_n` of `x` at depth `n`.
    fn profile<'py>(&self, py: Python<'py>, x: &str, n: u64) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &diophantine::profile(&self.inner, &scalar(x)?, n).map_err(err)?,
        )
    }

    #[pyo3(signature = (t, horizon, phi = false))]
    fn psi_records<'py>(
        &self,
        py: Python<'py>,
        t: &str,
        horizon: u64,
        phi: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let t = scalar(t)?;
        let series = if phi {
            diophantine::phi_records(&self.inner, &t, horizon)
        } else {
            diophantine::psi_records(&self.inner, &t, horizon)
        }
        .map_err(err)?;
        to_py(py, &series)
    }

    #[pyo3(signature = (grid, horizon, threshold = None, jobs = 1))]
    fn scan_critical<'py>(
        &self,
        py: Python<'py>,
        grid: Vec<String>,
        horizon: u64,
        threshold: Option<f64>,
        jobs: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let grid = grid
            .iter()
            .map(|s| scalar(s))
            .collect::<PyResult<Vec<_>>>()?;
        let threshold = threshold.unwrap_or_else(|| diophantine::default_threshold(&self.inner));
        let f = &self.inner;
        let rows = py
            .detach(|| diophantine::scan_critical(f, &grid, horizon, threshold, jobs))
            .map_err(err)?;
        to_py(py, &rows)
    }

    #[pyo3(signature = (height, step_cap = induction::DEFAULT_STEP_CAP, trim = false))]
    fn build_tall_stack<'py>(
        &self,
        py: Python<'py>,
        height: u64,
        step_cap: u64,
        trim: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let tall = induction::build_tall_stack(&self.inner, height, step_cap).map_err(err)?;
        let stack = if trim {
            induction::trim_stack(&tall.stack).map_err(err)?
        } else {
            tall.stack
        };
        let verify = match induction::verify_stack(&self.inner, &stack) {
            StackCheck::Ok => json!({"status": "Ok"}),
            StackCheck::Violation { level, which } => {
                json!({"status": "Violation", "level": level, "which": which})
            }
        };
        let doc = json!({
            "base": tall.base,
            "base_choice": tall.base_choice,
            "tower": tall.tower,
            "towers": tall.towers,
            "height": stack.height(),
            "width": stack.width(),
            "measure": stack.measure(),
            "distinct": stack.is_distinct(),
            "verify": verify,
            "levels": stack.levels().iter().map(|y| (y.lo.to_string(), y.hi.to_string())).collect::<Vec<_>>(),
        });
        to_py(py, &doc)
    }

    #[pyo3(signature = (t, horizon, grid_size = 1024, x = None, peak_threshold = 0.0, jobs = 1))]
    #[allow(clippy::too_many_arguments)]
    fn eigenvalue_scan<'py>(
        &self,
        py: Python<'py>,
        t: &str,
        horizon: u64,
        grid_size: usize,
        x: Option<&str>,
        peak_threshold: f64,
        jobs: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let t = scalar(t)?;
        let x = x.map(scalar).transpose()?;
        let f = &self.inner;
        let scan = py
            .detach(|| {
                spectral::eigenvalue_scan(f, &t, grid_size, horizon, x, peak_threshold, jobs)
            })
            .map_err(err)?;
        to_py(py, &scan)
    }

    fn __repr__(&self) -> String {
        format!("Iet({})", self.inner)
    }
}

#[pymodule]
fn iet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIet>()?;
    m.add("SCHEMA_VERSION", iet_core::SCHEMA_VERSION)?;
    Ok(())
}
