//! Python bindings: bases, fields, states, the model and experiment driver.

use std::path::Path;
use std::sync::Arc;

use ndarray::Array2;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use fractherm::attractor::{box_dimension_points, hausdorff_semidist, EpsRange};
use fractherm::experiment::selfcheck as run_selfcheck;
use fractherm::spectral::{
    accretivity_form, extended_norm, resolvent_solve_with, state_norm, BasisSpec, Coupling,
    PhaseNorm, SpectralField, StateVector,
};
use fractherm::{
    audit_nonlinearity, build_basis, frac_norm, parse_config, run, run_experiment,
    solve_stationary, Error, IntegratorConfig, Model as CoreModel, Monitors, NonlinearitySpec,
    SystemParams,
};

fn py_err(e: Error) -> PyErr {
    match e.root() {
        Error::InvalidArgument(_) | Error::BasisMismatch(_) | Error::Config(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(o) => {
            let dict = PyDict::new(py);
            for (k, x) in o {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn parse_norm(norm: &str) -> PyResult<PhaseNorm> {
    match norm {
        "energy" => Ok(PhaseNorm::Energy),
        "extended" => Ok(PhaseNorm::Extended),
        other => Err(PyValueError::new_err(format!(
            "norm must be 'energy' or 'extended', got {other:?}"
        ))),
    }
}

/// Dirichlet sine basis on `[0, lx] × [0, ly]`.
#[pyclass(name = "Basis", frozen, skip_from_py_object, module = "fractherm_py")]
#[derive(Clone)]
struct Basis {
    inner: Arc<BasisSpec>,
}

#[pymethods]
impl Basis {
    #[new]
    #[pyo3(signature = (nx, ny, lx = std::f64::consts::PI, ly = std::f64::consts::PI))]
    fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> PyResult<Self> {
        Ok(Basis {
            inner: build_basis(nx, ny, lx, ly).map_err(py_err)?,
        })
    }

    #[getter]
    fn nx(&self) -> usize {
        self.inner.nx()
    }

    #[getter]
    fn ny(&self) -> usize {
        self.inner.ny()
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa()
    }

    /// `λ_jk` for 1-based indices.
    fn eigenvalue(&self, j: usize, k: usize) -> PyResult<f64> {
        if !(1..=self.inner.nx()).contains(&j) || !(1..=self.inner.ny()).contains(&k) {
            return Err(PyValueError::new_err(format!(
                "mode ({j}, {k}) is outside the basis"
            )));
        }
        Ok(self.inner.eigenvalue(j, k))
    }

    fn __repr__(&self) -> String {
        format!(
            "Basis({}, {}, lx={}, ly={})",
            self.inner.nx(),
            self.inner.ny(),
            self.inner.lx(),
            self.inner.ly()
        )
    }
}

/// Sine coefficients of a scalar field.
#[pyclass(name = "Field", frozen, skip_from_py_object, module = "fractherm_py")]
#[derive(Clone)]
struct Field {
    inner: SpectralField,
}

#[pymethods]
impl Field {
    #[new]
    fn new(basis: &Basis, coeffs: Vec<Vec<f64>>) -> PyResult<Self> {
        let (nx, ny) = (basis.inner.nx(), basis.inner.ny());
        if coeffs.len() != nx || coeffs.iter().any(|r| r.len() != ny) {
            return Err(PyValueError::new_err(format!(
                "coefficients must be {nx}×{ny}"
            )));
        }
        let flat: Vec<f64> = coeffs.into_iter().flatten().collect();
        let a = Array2::from_shape_vec((nx, ny), flat).expect("shape checked");
        Ok(Field {
            inner: SpectralField::from_coeffs(&basis.inner, a).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn zeros(basis: &Basis) -> Self {
        Field {
            inner: SpectralField::zeros(&basis.inner),
        }
    }

    /// `amplitude · e_jk`, 1-based.
    #[staticmethod]
    fn mode(basis: &Basis, j: usize, k: usize, amplitude: f64) -> PyResult<Self> {
        Ok(Field {
            inner: SpectralField::mode(&basis.inner, j, k, amplitude).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn smooth_bump(basis: &Basis, amplitude: f64) -> Self {
        Field {
            inner: SpectralField::smooth_bump(&basis.inner, amplitude),
        }
    }

    fn coeffs(&self) -> Vec<Vec<f64>> {
        self.inner
            .coeffs()
            .outer_iter()
            .map(|r| r.to_vec())
            .collect()
    }

    fn norm_l2(&self) -> f64 {
        self.inner.norm_l2()
    }

    /// `‖A^{gamma/2} u‖`
    fn frac_norm(&self, gamma: f64) -> f64 {
        frac_norm(&self.inner, gamma)
    }
}

/// Phase-space point `(u, u_t, θ)` at time `t`.
#[pyclass(name = "State", frozen, from_py_object, module = "fractherm_py")]
#[derive(Clone)]
struct State {
    inner: StateVector,
}

#[pymethods]
impl State {
    #[new]
    #[pyo3(signature = (u, v, theta, t = 0.0))]
    fn new(u: &Field, v: &Field, theta: &Field, t: f64) -> PyResult<Self> {
        let inner = StateVector::new(u.inner.clone(), v.inner.clone(), theta.inner.clone(), t)
            .map_err(py_err)?;
        Ok(State { inner })
    }

    #[getter]
    fn u(&self) -> Field {
        Field {
            inner: self.inner.u.clone(),
        }
    }

    #[getter]
    fn v(&self) -> Field {
        Field {
            inner: self.inner.v.clone(),
        }
    }

    #[getter]
    fn theta(&self) -> Field {
        Field {
            inner: self.inner.theta.clone(),
        }
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }

    /// Energy-space norm.
    fn norm(&self) -> f64 {
        state_norm(&self.inner)
    }

    fn extended_norm(&self) -> f64 {
        extended_norm(&self.inner)
    }
}

/// Parameters, transform grids and bound constants for one configuration.
#[pyclass(name = "Model", frozen, module = "fractherm_py")]
struct Model {
    inner: CoreModel,
}

#[pymethods]
impl Model {
    /// `nonlinearity` is `"cubic"` or `"zero"`.
    #[new]
    #[pyo3(signature = (forcing, nu = 0.5, sigma = 0.5, delta = 0.5, nonlinearity = "cubic"))]
    fn new(forcing: &Field, nu: f64, sigma: f64, delta: f64, nonlinearity: &str) -> PyResult<Self> {
        let spec = match nonlinearity {
            "cubic" => NonlinearitySpec::cubic(),
            "zero" => NonlinearitySpec::zero(),
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown nonlinearity {other:?}"
                )))
            }
        };
        let params = SystemParams::new(forcing.inner.clone())
            .with_exponents(nu, sigma)
            .with_delta(delta)
            .with_nonlinearity(spec);
        Ok(Model {
            inner: CoreModel::new(params).map_err(py_err)?,
        })
    }

    fn absorbing_radius(&self) -> f64 {
        self.inner.bounds().absorbing_radius()
    }

    fn energy<'py>(&self, py: Python<'py>, state: &State) -> PyResult<Bound<'py, PyAny>> {
        serialize(
            py,
            &self.inner.compute_energy(&state.inner).map_err(py_err)?,
        )
    }

    /// Newton solve; returns `(u, residual_norm, iterations)`.
    #[pyo3(signature = (tol = 1e-10, max_iter = 8))]
    fn solve_stationary(&self, tol: f64, max_iter: usize) -> PyResult<(Field, f64, usize)> {
        let r = solve_stationary(&self.inner, tol, max_iter).map_err(py_err)?;
        Ok((Field { inner: r.u }, r.residual_norm, r.iterations))
    }

    /// Integrate and return `(reports, final_state)`.
    #[pyo3(signature = (state, dt, t_end, log_every = 10))]
    fn run<'py>(
        &self,
        py: Python<'py>,
        state: &State,
        dt: f64,
        t_end: f64,
        log_every: usize,
    ) -> PyResult<(Bound<'py, PyAny>, State)> {
        let cfg = IntegratorConfig::new(dt, t_end, log_every);
        let log = py
            .detach(|| run(&state.inner, &self.inner, &cfg, Monitors::default()))
            .map_err(py_err)?;
        let fin = log.final_state.clone().expect("run stores the final state");
        Ok((serialize(py, &log)?, State { inner: fin }))
    }
}

/// Solve `(I + 𝒜) U = U*` mode by mode.
#[pyfunction]
#[pyo3(signature = (ustar, nu, sigma, delta = 0.5))]
fn resolvent_solve(ustar: &State, nu: f64, sigma: f64, delta: f64) -> PyResult<State> {
    let c = Coupling { nu, sigma, delta };
    Ok(State {
        inner: resolvent_solve_with(&ustar.inner, c).map_err(py_err)?,
    })
}

/// `‖A^{ν/2}φ‖² + ‖A^{1/2}θ‖²` with `φ` the velocity component.
#[pyfunction]
#[pyo3(signature = (state, nu, sigma, delta = 0.5))]
fn accretivity(state: &State, nu: f64, sigma: f64, delta: f64) -> f64 {
    accretivity_form(&state.inner, Coupling { nu, sigma, delta })
}

/// `sup_{a∈A} inf_{b∈B} ‖a - b‖` in `"energy"` or `"extended"` norm.
#[pyfunction]
#[pyo3(signature = (a, b, norm = "energy"))]
fn semidistance(a: Vec<State>, b: Vec<State>, norm: &str) -> PyResult<f64> {
    let a: Vec<StateVector> = a.into_iter().map(|s| s.inner).collect();
    let b: Vec<StateVector> = b.into_iter().map(|s| s.inner).collect();
    hausdorff_semidist(&a, &b, parse_norm(norm)?).map_err(py_err)
}

/// Box-counting dimension of coordinate vectors over dyadic scales.
#[pyfunction]
fn box_dimension<'py>(
    py: Python<'py>,
    points: Vec<Vec<f64>>,
    eps_max: f64,
    levels: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let est = box_dimension_points(&points, EpsRange { eps_max, levels }).map_err(py_err)?;
    serialize(py, &est)
}

/// Certificate of the cubic source term on `[-half_width, half_width]`.
#[pyfunction]
#[pyo3(signature = (half_width = 10.0, samples = 10001))]
fn audit_cubic<'py>(
    py: Python<'py>,
    half_width: f64,
    samples: usize,
) -> PyResult<Bound<'py, PyAny>> {
    serialize(
        py,
        &audit_nonlinearity(&NonlinearitySpec::cubic(), half_width, samples).map_err(py_err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (seed = 0))]
fn selfcheck<'py>(py: Python<'py>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    serialize(py, &run_selfcheck(seed).map_err(py_err)?)
}

/// Run a TOML configuration into `out_dir`; returns the manifest.
#[pyfunction]
fn run_config<'py>(py: Python<'py>, config: &str, out_dir: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = parse_config(config).map_err(py_err)?;
    let manifest = py
        .detach(|| run_experiment(&cfg, Path::new(out_dir)))
        .map_err(py_err)?;
    serialize(py, &manifest)
}

#[pymodule]
fn fractherm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Basis>()?;
    m.add_class::<Field>()?;
    m.add_class::<State>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(resolvent_solve, m)?)?;
    m.add_function(wrap_pyfunction!(accretivity, m)?)?;
    m.add_function(wrap_pyfunction!(semidistance, m)?)?;
    m.add_function(wrap_pyfunction!(box_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(audit_cubic, m)?)?;
    m.add_function(wrap_pyfunction!(selfcheck, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
