use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use quasidiag::assembly::Space;
use quasidiag::experiment::{ExperimentConfig, RefineMode};
use quasidiag::precond::PreconditionerKind;
use quasidiag::refine::IndicatorField;
use quasidiag::spectral::{EigOptions, InvertiblePreconditioner, LinearOperator};
use quasidiag::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyIOError::new_err(io.to_string()),
        e @ (Error::SolverFailure { .. }
        | Error::Factorization(_)
        | Error::EigsNotConverged(_)
        | Error::NotPositiveDefinite(_)
        | Error::NonFinite(_)) => PyRuntimeError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn parse_kind(kind: &str) -> PyResult<PreconditionerKind> {
    Ok(match kind {
        "quasidiag" => PreconditionerKind::QuasiDiag,
        "quasidiag-tilde" => PreconditionerKind::QuasiDiagTilde,
        "quasidiag-p1" => PreconditionerKind::QuasiDiagHigherOrder,
        "quasidiag-tilde-p1" => PreconditionerKind::QuasiDiagTildeHigherOrder,
        "diag-c" => PreconditionerKind::DiagC,
        "diag-c1" => PreconditionerKind::DiagC1,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown preconditioner `{other}`"
            )))
        }
    })
}

/// A conforming simplicial mesh in 2, 3 or 4 dimensions.
#[pyclass(name = "Mesh", module = "quasidiag", frozen)]
struct PyMesh {
    inner: quasidiag::SimplicialMesh,
}

#[pymethods]
impl PyMesh {
    /// Builds a mesh from flat coordinate and connectivity lists.
    #[new]
    fn new(dim: usize, coords: Vec<f64>, elements: Vec<usize>) -> PyResult<Self> {
        let inner = quasidiag::SimplicialMesh::new(dim, coords, elements).map_err(to_py)?;
        Ok(PyMesh { inner })
    }

    /// The L-shape (2D), three cubes (3D) or the Kuhn cube (4D).
    #[staticmethod]
    fn initial(dim: usize) -> PyResult<Self> {
        Ok(PyMesh {
            inner: quasidiag::mesh::initial_mesh(dim).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        Ok(PyMesh {
            inner: quasidiag::mesh::read_mesh(&path).map_err(to_py)?,
        })
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        quasidiag::mesh::write_mesh(&self.inner, &path).map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_elements(&self) -> usize {
        self.inner.num_elements()
    }

    #[getter]
    fn num_facets(&self) -> usize {
        self.inner.num_facets()
    }

    #[getter]
    fn total_volume(&self) -> f64 {
        self.inner.total_volume()
    }

    fn coords(&self) -> Vec<f64> {
        self.inner.coords().to_vec()
    }

    fn elements(&self) -> Vec<usize> {
        self.inner.connectivity().to_vec()
    }

    fn volumes(&self) -> Vec<f64> {
        self.inner.volumes().to_vec()
    }

    fn diameters(&self) -> Vec<f64> {
        self.inner.diameters().to_vec()
    }

    fn uniform_refine(&self) -> PyResult<Self> {
        Ok(PyMesh {
            inner: quasidiag::refine::uniform_refine(&self.inner).map_err(to_py)?,
        })
    }

    /// Newest vertex bisection of the marked triangles plus closure.
    fn nvb_refine(&self, marked: Vec<usize>) -> PyResult<Self> {
        Ok(PyMesh {
            inner: quasidiag::refine::nvb_refine(&self.inner, &marked).map_err(to_py)?,
        })
    }

    /// Element indicators of the L-shape corner singularity.
    fn singular_indicator(&self) -> PyResult<Vec<f64>> {
        let field = quasidiag::refine::singular_indicator(&self.inner).map_err(to_py)?;
        Ok(field.values().to_vec())
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh(dim={}, vertices={}, elements={})",
            self.inner.dim(),
            self.inner.num_vertices(),
            self.inner.num_elements()
        )
    }
}

/// Minimal set of elements carrying a `theta` fraction of the total.
#[pyfunction]
#[pyo3(signature = (values, theta = 0.25))]
fn dorfler_mark(values: Vec<f64>, theta: f64) -> PyResult<Vec<usize>> {
    let field = IndicatorField::new(values).map_err(to_py)?;
    quasidiag::refine::dorfler_mark(&field, theta).map_err(to_py)
}

/// A preconditioner; `apply` is its action `P^{-1}`, `apply_inverse` the
/// matrix `P`.
#[pyclass(name = "Preconditioner", module = "quasidiag", frozen)]
struct PyPreconditioner {
    inner: quasidiag::precond::Preconditioner,
}

#[pymethods]
impl PyPreconditioner {
    /// `kind` is one of `quasidiag`, `quasidiag-tilde`, `quasidiag-p1`,
    /// `quasidiag-tilde-p1`, `diag-c`, `diag-c1`.
    #[new]
    #[pyo3(signature = (mesh, kind = "quasidiag", alpha = 0.01))]
    fn new(mesh: &PyMesh, kind: &str, alpha: f64) -> PyResult<Self> {
        let inner = quasidiag::precond::Preconditioner::new(&mesh.inner, parse_kind(kind)?, alpha)
            .map_err(to_py)?;
        Ok(PyPreconditioner { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().name()
    }

    fn apply(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.apply(&x).map_err(to_py)
    }

    fn apply_inverse(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        let mut y = vec![0.0; x.len()];
        self.inner.apply_inverse_into(&x, &mut y).map_err(to_py)?;
        Ok(y)
    }

    /// Dense action matrix as a list of rows.
    fn to_dense(&self) -> PyResult<Vec<Vec<f64>>> {
        let m = self.inner.to_dense().map_err(to_py)?;
        Ok(m.row_iter().map(|r| r.iter().copied().collect()).collect())
    }
}

/// `A = M^t R^{-1} M + beta L` on piecewise polynomials of degree 0 or 1.
#[pyclass(name = "GramOperator", module = "quasidiag", frozen)]
struct PyGramOperator {
    inner: quasidiag::spectral::GramOperator,
}

#[pymethods]
impl PyGramOperator {
    /// `space` is `hm1` or `tilde`.
    #[new]
    #[pyo3(signature = (mesh, degree = 0, space = "hm1", beta = 0.1))]
    fn new(mesh: &PyMesh, degree: usize, space: &str, beta: f64) -> PyResult<Self> {
        let space: Space = space.parse().map_err(to_py)?;
        let inner = quasidiag::spectral::GramOperator::new(&mesh.inner, degree, space, beta)
            .map_err(to_py)?;
        Ok(PyGramOperator { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.apply(&x).map_err(to_py)
    }
}

#[pyclass(name = "SpectralReport", module = "quasidiag", get_all, frozen)]
struct PySpectralReport {
    lambda_max: f64,
    lambda_min: f64,
    kappa: f64,
    iterations_max: usize,
    iterations_min: usize,
    residual_max: f64,
    residual_min: f64,
}

#[pymethods]
impl PySpectralReport {
    fn __repr__(&self) -> String {
        format!(
            "SpectralReport(lambda_min={}, lambda_max={}, kappa={})",
            self.lambda_min, self.lambda_max, self.kappa
        )
    }
}

/// Extreme eigenvalues of `P^{-1} A` by power and inverse iteration.
#[pyfunction]
#[pyo3(signature = (gram, precond, tol = 1e-6, max_iter = 2000, seed = 0))]
fn extreme_eigs(
    py: Python<'_>,
    gram: &PyGramOperator,
    precond: &PyPreconditioner,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> PyResult<PySpectralReport> {
    let opts = EigOptions {
        tol,
        max_iter,
        seed,
        ..EigOptions::default()
    };
    let r = py
        .detach(|| quasidiag::spectral::extreme_eigs(&gram.inner, &precond.inner, &opts, None))
        .map_err(to_py)?;
    Ok(PySpectralReport {
        lambda_max: r.lambda_max,
        lambda_min: r.lambda_min,
        kappa: r.kappa,
        iterations_max: r.iterations_max,
        iterations_min: r.iterations_min,
        residual_max: r.residual_max,
        residual_min: r.residual_min,
    })
}

#[pyclass(name = "ExperimentRow", module = "quasidiag", get_all, frozen)]
struct PyExperimentRow {
    level: usize,
    num_elements: usize,
    num_dofs: usize,
    cond_diag: f64,
    cond_quasidiag: f64,
    lambda_min: f64,
    lambda_max: f64,
    seconds: f64,
}

#[pymethods]
impl PyExperimentRow {
    fn __repr__(&self) -> String {
        format!(
            "ExperimentRow(level={}, num_elements={}, cond_diag={}, cond_quasidiag={})",
            self.level, self.num_elements, self.cond_diag, self.cond_quasidiag
        )
    }
}

/// Runs the refinement loop and returns one row per level.
#[pyfunction]
#[pyo3(signature = (
    dim = 2, degree = 0, space = "hm1", refine = "uniform", levels = 4,
    alpha = None, beta = 0.1, theta = 0.25, tol = 1e-6, max_iter = 2000, seed = 0,
    out = None, record_timing = true,
))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    py: Python<'_>,
    dim: usize,
    degree: usize,
    space: &str,
    refine: &str,
    levels: usize,
    alpha: Option<f64>,
    beta: f64,
    theta: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
    out: Option<PathBuf>,
    record_timing: bool,
) -> PyResult<Vec<PyExperimentRow>> {
    let mut cfg = ExperimentConfig::new(dim);
    cfg.degree = degree;
    cfg.space = space.parse().map_err(to_py)?;
    cfg.refine = refine.parse::<RefineMode>().map_err(to_py)?;
    cfg.levels = levels;
    if let Some(a) = alpha {
        cfg.alpha = a;
    }
    cfg.beta = beta;
    cfg.theta = theta;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.seed = seed;
    cfg.out = out;
    cfg.record_timing = record_timing;
    let rows = py
        .detach(|| quasidiag::experiment::run_experiment(&cfg))
        .map_err(to_py)?;
    Ok(rows
        .into_iter()
        .map(|r| PyExperimentRow {
            level: r.level,
            num_elements: r.num_elements,
            num_dofs: r.num_dofs,
            cond_diag: r.cond_diag,
            cond_quasidiag: r.cond_quasidiag,
            lambda_min: r.lambda_min,
            lambda_max: r.lambda_max,
            seconds: r.seconds,
        })
        .collect())
}

#[pymodule]
#[pyo3(name = "quasidiag")]
fn quasidiag_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PyPreconditioner>()?;
    m.add_class::<PyGramOperator>()?;
    m.add_class::<PySpectralReport>()?;
    m.add_class::<PyExperimentRow>()?;
    m.add_function(wrap_pyfunction!(dorfler_mark, m)?)?;
    m.add_function(wrap_pyfunction!(extreme_eigs, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
