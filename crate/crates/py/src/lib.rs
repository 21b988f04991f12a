//! Python bindings: closed forms, the nonuniqueness level, radial grid solves
//! and the check suite.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use biharm_core::free_boundary::free_boundary;
use biharm_core::grid::{minimize, ContinuationSchedule, DiscreteDomain, DomainKind};
use biharm_core::lambert::{self, Branch};
use biharm_core::radial;
use biharm_core::verification::{self, SuiteConfig};

fn py_err(e: biharm_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Lambert W on the `"principal"` or `"minus-one"` branch.
#[pyfunction]
#[pyo3(signature = (x, branch = "principal"))]
fn lambert_w(x: f64, branch: &str) -> PyResult<f64> {
    let b = match branch {
        "principal" | "0" => Branch::Principal,
        "minus-one" | "-1" => Branch::MinusOne,
        other => return Err(PyValueError::new_err(format!("unknown branch `{other}`"))),
    };
    lambert::lambert_w(b, x).map_err(py_err)
}

#[pyfunction]
fn annulus_energy(u0: f64, r0: f64) -> PyResult<f64> {
    radial::annulus_energy(u0, r0).map_err(py_err)
}

#[pyfunction]
fn stationarity_residual(u0: f64, r0: f64) -> PyResult<f64> {
    radial::stationarity_residual(u0, r0).map_err(py_err)
}

/// Two-phase radial profile with nodal radius `R0` and boundary value `u0`.
#[pyclass(frozen, name = "RadialSolution")]
struct PyRadialSolution(radial::RadialSolution);

#[pymethods]
impl PyRadialSolution {
    #[new]
    fn new(u0: f64, nodal_radius: f64) -> PyResult<Self> {
        radial::RadialSolution::new(u0, nodal_radius).map(Self).map_err(py_err)
    }

    /// The energy-minimizing profile, or `None` when the constant wins.
    #[staticmethod]
    fn minimizer(u0: f64) -> PyResult<Option<Self>> {
        Ok(radial::RadialSolution::minimizer(u0).map_err(py_err)?.map(Self))
    }

    #[getter]
    fn u0(&self) -> f64 {
        self.0.u0
    }

    #[getter]
    fn nodal_radius(&self) -> f64 {
        self.0.nodal_radius
    }

    fn value(&self, r: f64) -> PyResult<f64> {
        self.0.value(r).map_err(py_err)
    }

    fn derivative(&self, r: f64) -> PyResult<f64> {
        self.0.derivative(r).map_err(py_err)
    }

    fn laplacian(&self, r: f64) -> PyResult<f64> {
        self.0.laplacian(r).map_err(py_err)
    }

    fn energy(&self) -> f64 {
        self.0.energy()
    }

    fn nodal_gradient(&self) -> f64 {
        self.0.nodal_gradient()
    }

    fn __repr__(&self) -> String {
        format!("RadialSolution(u0={}, nodal_radius={})", self.0.u0, self.0.nodal_radius)
    }
}

#[pyclass(frozen, get_all)]
struct RadialMinimum {
    u0: f64,
    branch: String,
    nodal_radius: Option<f64>,
    energy: f64,
}

#[pyfunction]
fn minimize_energy(u0: f64) -> PyResult<RadialMinimum> {
    let m = radial::minimize_energy(u0).map_err(py_err)?;
    Ok(RadialMinimum {
        u0: m.u0,
        branch: m.branch.as_str().to_string(),
        nodal_radius: m.nodal_radius,
        energy: m.energy,
    })
}

#[pyclass(frozen, get_all)]
struct NonUniquenessLevel {
    r_star: f64,
    iota: f64,
    u_star: f64,
    r_star_bisection: f64,
    equation_residual: f64,
    lambert_residual: f64,
}

#[pyfunction]
fn nonuniqueness_level() -> NonUniquenessLevel {
    let l = radial::nonuniqueness_level();
    NonUniquenessLevel {
        r_star: l.r_star,
        iota: l.iota,
        u_star: l.u_star,
        r_star_bisection: l.r_star_bisection,
        equation_residual: l.equation_residual(),
        lambert_residual: l.lambert_residual(),
    }
}

#[pyclass(frozen, get_all)]
struct RadialGridResult {
    r: Vec<f64>,
    u: Vec<f64>,
    energy: f64,
    iterations: usize,
    converged: bool,
    nodal_radii: Vec<f64>,
    weighted_mass: f64,
}

/// Minimizes on the radial grid with the default continuation schedule.
#[pyfunction]
#[pyo3(signature = (u0, n = 2001))]
fn solve_radial(py: Python<'_>, u0: f64, n: usize) -> PyResult<RadialGridResult> {
    py.detach(|| {
        let d = DiscreteDomain::with_constant(DomainKind::Radial, n, u0)?;
        let s = ContinuationSchedule::for_boundary_value(u0, d.h())?;
        let out = minimize(&d, &s, None)?;
        let fb = free_boundary(&out.field);
        Ok(RadialGridResult {
            r: (0..n).map(|k| d.radius(k)).collect(),
            u: out.field.values().to_vec(),
            energy: out.energy,
            iterations: out.iterations,
            converged: out.converged,
            nodal_radii: fb.crossings.iter().map(|c| c.radius).collect(),
            weighted_mass: fb.weighted_mass,
        })
    })
    .map_err(py_err)
}

/// Rows `(u0, R, energy, published R, published energy)`.
#[pyfunction]
fn reproduce_table() -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
    let t = verification::reproduce_table().map_err(py_err)?;
    Ok(t.rows
        .iter()
        .map(|r| (r.u0, r.radius, r.energy, r.published_radius, r.published_energy))
        .collect())
}

/// Runs the check suite (`"default"`, `"coarse"` or `"structural"`) and
/// returns `(all_passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (preset = "structural"))]
fn run_suite(py: Python<'_>, preset: &str) -> PyResult<(bool, String)> {
    let cfg = match preset {
        "default" => SuiteConfig::default(),
        "coarse" => SuiteConfig::coarse(),
        "structural" => SuiteConfig::structural_only(),
        other => return Err(PyValueError::new_err(format!("unknown preset `{other}`"))),
    };
    let report = py.detach(|| verification::run_suite(&cfg));
    Ok((report.all_passed(), report.to_json().map_err(py_err)?))
}

#[pymodule]
fn biharm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(lambert_w, m)?)?;
    m.add_function(wrap_pyfunction!(annulus_energy, m)?)?;
    m.add_function(wrap_pyfunction!(stationarity_residual, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_energy, m)?)?;
    m.add_function(wrap_pyfunction!(nonuniqueness_level, m)?)?;
    m.add_function(wrap_pyfunction!(solve_radial, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce_table, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_class::<PyRadialSolution>()?;
    m.add_class::<RadialMinimum>()?;
    m.add_class::<NonUniquenessLevel>()?;
    m.add_class::<RadialGridResult>()?;
    Ok(())
}
