//! Python bindings: curves, sampled boundary functions, Cauchy transforms,
//! the four boundary-value solvers and the manufactured test cases.

use std::sync::Arc;

use dbar_core::solvers::{ode_residual, solve_neumann, solve_robin};
use dbar_core::verify::{self, ManufacturedCase};
use dbar_core::{
    cauchy_interior, cauchy_trace, make_curve, BoundaryCurve, BoundaryFunction, Complex64, DomainSpec, Error,
    HolomorphicEvaluator, IntegralKind, ProblemData, ProblemKind, RobinCoefficient, SolveConfig, SolveReport,
    TraceMethod,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

create_exception!(dbar, DbarError, PyException);
create_exception!(dbar, RejectedError, DbarError);
create_exception!(dbar, CompatibilityError, DbarError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Rejected(_) => RejectedError::new_err(e.to_string()),
        Error::Compatibility { .. } => CompatibilityError::new_err(e.to_string()),
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => DbarError::new_err(other.to_string()),
    }
}

fn invalid(msg: impl Into<String>) -> PyErr {
    DbarError::new_err(msg.into())
}

fn parse_trace(name: &str) -> PyResult<TraceMethod> {
    match name {
        "pv" => Ok(TraceMethod::PvSubtraction),
        "offset" => Ok(TraceMethod::offset(2)),
        "offset1" => Ok(TraceMethod::offset(1)),
        other => Err(invalid(format!("unknown trace method `{other}` (expected pv, offset or offset1)"))),
    }
}

fn parse_problem(name: &str) -> PyResult<ProblemKind> {
    name.parse::<ProblemKind>().map_err(to_py)
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn report_to_py<'py>(py: Python<'py>, report: &SolveReport) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(py, &report.to_json())
}

/// Positively oriented discretized boundary curve.
#[pyclass(name = "Curve", module = "dbar", frozen, from_py_object)]
#[derive(Clone)]
struct PyCurve {
    inner: Arc<BoundaryCurve>,
}

impl PyCurve {
    fn build(spec: DomainSpec) -> PyResult<Self> {
        Ok(Self { inner: make_curve(&spec).map_err(to_py)? })
    }
}

#[pymethods]
impl PyCurve {
    #[staticmethod]
    #[pyo3(signature = (n=256, center=Complex64::new(0.0, 0.0), radius=1.0))]
    fn disk(n: usize, center: Complex64, radius: f64) -> PyResult<Self> {
        Self::build(DomainSpec::disk(center, radius, n))
    }

    #[staticmethod]
    #[pyo3(signature = (n=256))]
    fn square(n: usize) -> PyResult<Self> {
        Self::build(DomainSpec::unit_square(n))
    }

    #[staticmethod]
    #[pyo3(signature = (a, b, n=256))]
    fn ellipse(a: f64, b: f64, n: usize) -> PyResult<Self> {
        Self::build(DomainSpec::ellipse(a, b, n))
    }

    /// Polygon with counter-clockwise `vertices`.
    #[staticmethod]
    #[pyo3(signature = (vertices, n=256))]
    fn polygon(vertices: Vec<Complex64>, n: usize) -> PyResult<Self> {
        Self::build(DomainSpec::polygon(vertices, n))
    }

    /// Same shape with `n` nodes.
    fn refined(&self, n: usize) -> PyResult<Self> {
        Self::build(self.inner.spec().with_nodes(n))
    }

    #[getter]
    fn nodes(&self) -> Vec<Complex64> {
        self.inner.nodes().to_vec()
    }

    #[getter]
    fn tangents(&self) -> Vec<Complex64> {
        self.inner.tangents().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length()
    }

    #[getter]
    fn is_smooth(&self) -> bool {
        self.inner.is_smooth()
    }

    #[getter]
    fn interior_reference(&self) -> Complex64 {
        self.inner.interior_reference()
    }

    fn contains(&self, z: Complex64) -> bool {
        self.inner.contains(z)
    }

    fn winding_number(&self, z: Complex64) -> PyResult<i32> {
        self.inner.winding_number(z).map_err(to_py)
    }

    /// Samples `f(z, T)` at every node, where `T` is the unit tangent.
    fn sample(&self, f: Bound<'_, PyAny>) -> PyResult<PyBoundaryFunction> {
        let values = self
            .inner
            .nodes()
            .iter()
            .zip(self.inner.tangents())
            .map(|(z, t)| f.call1((*z, *t))?.extract::<Complex64>())
            .collect::<PyResult<Vec<_>>>()?;
        PyBoundaryFunction::new(self.clone(), values)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Curve(n={}, length={:.6})", self.inner.len(), self.inner.length())
    }
}

/// Complex samples at the nodes of a curve.
#[pyclass(name = "BoundaryFunction", module = "dbar", frozen, from_py_object)]
#[derive(Clone)]
struct PyBoundaryFunction {
    inner: BoundaryFunction,
}

impl From<BoundaryFunction> for PyBoundaryFunction {
    fn from(inner: BoundaryFunction) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyBoundaryFunction {
    #[new]
    fn new(curve: PyCurve, values: Vec<Complex64>) -> PyResult<Self> {
        Ok(BoundaryFunction::new(curve.inner, values).map_err(to_py)?.into())
    }

    #[staticmethod]
    fn constant(curve: PyCurve, value: Complex64) -> Self {
        BoundaryFunction::constant(&curve.inner, value).into()
    }

    #[staticmethod]
    fn read_csv(curve: PyCurve, path: std::path::PathBuf) -> PyResult<Self> {
        let file = std::fs::File::open(&path).map_err(|e| to_py(e.into()))?;
        Ok(BoundaryFunction::read_csv(&curve.inner, file).map_err(to_py)?.into())
    }

    fn write_csv(&self, path: std::path::PathBuf) -> PyResult<()> {
        let file = std::fs::File::create(&path).map_err(|e| to_py(e.into()))?;
        self.inner.write_csv(file).map_err(to_py)
    }

    #[getter]
    fn curve(&self) -> PyCurve {
        PyCurve { inner: self.inner.curve().clone() }
    }

    #[getter]
    fn values(&self) -> Vec<Complex64> {
        self.inner.values().to_vec()
    }

    #[pyo3(signature = (p=2.0))]
    fn lp_norm(&self, p: f64) -> PyResult<f64> {
        self.inner.lp_norm(p).map_err(to_py)
    }

    #[pyo3(signature = (p=2.0))]
    fn w1p_norm(&self, p: f64) -> PyResult<f64> {
        self.inner.w1p_norm(p).map_err(to_py)
    }

    /// `∫ f dσ` (`kind="arclength"`) or `∫ f dζ` (`kind="complex"`).
    #[pyo3(signature = (kind="arclength"))]
    fn integral(&self, kind: &str) -> PyResult<Complex64> {
        let kind = match kind {
            "arclength" => IntegralKind::Arclength,
            "complex" => IntegralKind::Complex,
            other => return Err(invalid(format!("unknown integral kind `{other}`"))),
        };
        Ok(self.inner.boundary_integral(kind))
    }

    fn tangential_derivative(&self) -> PyResult<Self> {
        Ok(self.inner.tangential_derivative().map_err(to_py)?.into())
    }

    /// `h(ζ) = ∫_{γ(ζ_base, ζ)} i f dσ`.
    #[pyo3(signature = (base=0))]
    fn cumulative_primitive(&self, base: usize) -> PyResult<Self> {
        Ok(self.inner.cumulative_primitive(base).map_err(to_py)?.into())
    }

    fn holder_seminorm(&self, a: f64) -> f64 {
        self.inner.holder_seminorm(a)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.inner.zip_with(&other.inner, |a, b| a + b).map(Into::into).map_err(to_py)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.inner.zip_with(&other.inner, |a, b| a - b).map(Into::into).map_err(to_py)
    }

    fn __mul__(&self, s: Complex64) -> Self {
        (&self.inner * s).into()
    }

    fn __rmul__(&self, s: Complex64) -> Self {
        (&self.inner * s).into()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("BoundaryFunction(n={})", self.inner.len())
    }
}

/// Holomorphic function inside the domain, represented by a Cauchy integral.
#[pyclass(name = "Solution", module = "dbar", frozen)]
struct PySolution {
    inner: HolomorphicEvaluator,
}

#[pymethods]
impl PySolution {
    fn __call__(&self, z: Complex64) -> PyResult<Complex64> {
        self.inner.value(z).map_err(to_py)
    }

    fn derivative(&self, z: Complex64) -> PyResult<Complex64> {
        self.inner.derivative(z).map_err(to_py)
    }

    /// Non-tangential boundary values.
    #[pyo3(signature = (method="pv"))]
    fn trace(&self, method: &str) -> PyResult<PyBoundaryFunction> {
        Ok(self.inner.trace(&parse_trace(method)?).map_err(to_py)?.into())
    }

    fn dbar_residual(&self, z: Complex64) -> PyResult<f64> {
        self.inner.dbar_residual(z).map_err(to_py)
    }

    #[getter]
    fn density(&self) -> PyBoundaryFunction {
        self.inner.density().clone().into()
    }
}

/// Manufactured boundary data with a known holomorphic extension.
#[pyclass(name = "Case", module = "dbar", frozen)]
struct PyCase {
    inner: ManufacturedCase,
}

#[pymethods]
impl PyCase {
    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    /// `"accepted"` or `"rejected"`.
    #[getter]
    fn expected(&self) -> &'static str {
        if self.inner.expected() == dbar_core::Verdict::Accepted { "accepted" } else { "rejected" }
    }

    #[getter]
    fn alpha(&self) -> Complex64 {
        self.inner.alpha()
    }

    #[getter]
    fn robin_b(&self) -> Complex64 {
        self.inner.robin_b()
    }

    fn exact(&self, z: Complex64) -> Complex64 {
        self.inner.exact(z)
    }

    fn trace(&self) -> PyBoundaryFunction {
        self.inner.trace().into()
    }

    fn neumann_data(&self) -> PyBoundaryFunction {
        self.inner.neumann_data().into()
    }

    fn robin_data(&self) -> PyBoundaryFunction {
        self.inner.robin_data().into()
    }

    /// Maximum interior error of `solution` against the exact solution of
    /// `problem` at the standard probe points.
    fn interior_error(&self, problem: &str, solution: &PySolution) -> PyResult<f64> {
        let probes = verify::probe_points(self.inner.curve());
        self.inner.interior_error(parse_problem(problem)?, &solution.inner, &probes).map_err(to_py)
    }
}

/// Robin coefficient: a boundary function or a constant.
#[derive(FromPyObject)]
enum CoefArg {
    Function(PyBoundaryFunction),
    Constant(Complex64),
}

impl CoefArg {
    fn build(self, curve: &Arc<BoundaryCurve>) -> RobinCoefficient {
        match self {
            CoefArg::Function(f) => RobinCoefficient::new(f.inner),
            CoefArg::Constant(c) => RobinCoefficient::constant(curve, c),
        }
    }
}

fn config(p: f64, tau: f64, delta_c: f64, trace: &str) -> PyResult<SolveConfig> {
    let cfg = SolveConfig { p, tau, delta_c, trace: parse_trace(trace)?, ..SolveConfig::default() };
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

fn problem_data(
    kind: ProblemKind,
    data: &PyBoundaryFunction,
    alpha: Option<Complex64>,
    b: Option<CoefArg>,
) -> PyResult<ProblemData> {
    let f = data.inner.clone();
    if kind != ProblemKind::Neumann && alpha.is_some() {
        return Err(invalid("alpha applies only to the neumann problem"));
    }
    if kind != ProblemKind::Robin && b.is_some() {
        return Err(invalid("b applies only to the robin problem"));
    }
    Ok(match kind {
        ProblemKind::Dirichlet => ProblemData::Dirichlet(f),
        ProblemKind::Regularity => ProblemData::Regularity(f),
        ProblemKind::Neumann => {
            let alpha = alpha.unwrap_or_else(|| f.curve().interior_reference());
            ProblemData::Neumann { g: f, alpha }
        }
        ProblemKind::Robin => {
            let b = b.ok_or_else(|| invalid("the robin problem needs a coefficient b"))?;
            ProblemData::Robin { coef: b.build(f.curve()), r: f }
        }
    })
}

/// `𝐂f(z)` for `z` inside the domain.
#[pyfunction]
fn cauchy(f: &PyBoundaryFunction, z: Complex64) -> PyResult<Complex64> {
    cauchy_interior(&f.inner, z).map_err(to_py)
}

#[pyfunction]
#[pyo3(name = "cauchy_trace", signature = (f, method="pv"))]
fn py_cauchy_trace(f: &PyBoundaryFunction, method: &str) -> PyResult<PyBoundaryFunction> {
    Ok(cauchy_trace(&f.inner, &parse_trace(method)?).map_err(to_py)?.into())
}

/// Solves `problem` for boundary data `data` and returns
/// `(solution, report)`; `report` is a dict.
#[pyfunction]
#[pyo3(signature = (problem, data, *, alpha=None, b=None, p=2.0, tau=1e-6, delta_c=1e-8, trace="pv"))]
#[allow(clippy::too_many_arguments)]
fn solve<'py>(
    py: Python<'py>,
    problem: &str,
    data: &PyBoundaryFunction,
    alpha: Option<Complex64>,
    b: Option<CoefArg>,
    p: f64,
    tau: f64,
    delta_c: f64,
    trace: &str,
) -> PyResult<(PySolution, Bound<'py, PyAny>)> {
    let cfg = config(p, tau, delta_c, trace)?;
    let (ev, report) = match problem_data(parse_problem(problem)?, data, alpha, b)? {
        ProblemData::Dirichlet(f) => dbar_core::solve_dirichlet(&f, &cfg),
        ProblemData::Regularity(f) => dbar_core::solve_regularity(&f, &cfg),
        ProblemData::Neumann { g, alpha } => solve_neumann(&g, alpha, &cfg),
        ProblemData::Robin { coef, r } => solve_robin(&coef, &r, &cfg),
    }
    .map_err(to_py)?;
    Ok((PySolution { inner: ev }, report_to_py(py, &report)?))
}

/// Data-space membership test; returns the report dict.
#[pyfunction]
#[pyo3(signature = (problem, data, *, alpha=None, b=None, p=2.0, tau=1e-6, delta_c=1e-8, trace="pv"))]
#[allow(clippy::too_many_arguments)]
fn membership<'py>(
    py: Python<'py>,
    problem: &str,
    data: &PyBoundaryFunction,
    alpha: Option<Complex64>,
    b: Option<CoefArg>,
    p: f64,
    tau: f64,
    delta_c: f64,
    trace: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config(p, tau, delta_c, trace)?;
    let data = problem_data(parse_problem(problem)?, data, alpha, b)?;
    report_to_py(py, &dbar_core::membership(&data, &cfg).map_err(to_py)?)
}

/// The Robin transform `h = 𝒯_b r`, solving `−i∂_T h + b h = r`.
#[pyfunction]
fn robin_transform(b: CoefArg, r: &PyBoundaryFunction) -> PyResult<PyBoundaryFunction> {
    let coef = b.build(r.inner.curve());
    Ok(dbar_core::robin_transform(&coef, &r.inner).map_err(to_py)?.into())
}

/// Relative L² residual of `−i∂_T h + b h = r`.
#[pyfunction]
fn robin_ode_residual(b: CoefArg, h: &PyBoundaryFunction, r: &PyBoundaryFunction) -> PyResult<f64> {
    let coef = b.build(r.inner.curve());
    ode_residual(&coef, &h.inner, &r.inner).map_err(to_py)
}

#[pyfunction]
fn manufactured_case(name: &str, curve: &PyCurve) -> PyResult<PyCase> {
    Ok(PyCase { inner: verify::manufactured_case(name, &curve.inner).map_err(to_py)? })
}

#[pyfunction]
fn catalog() -> Vec<&'static str> {
    verify::CATALOG.to_vec()
}

/// Interior error table for `case` over increasing grid sizes, as a dict.
#[pyfunction]
#[pyo3(signature = (case, problem, sizes, trace="pv"))]
fn run_convergence<'py>(
    py: Python<'py>,
    case: &PyCase,
    problem: &str,
    sizes: Vec<usize>,
    trace: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config(2.0, dbar_core::solvers::DEFAULT_TAU, dbar_core::solvers::DEFAULT_DELTA_C, trace)?;
    let table = verify::run_convergence(&case.inner, parse_problem(problem)?, &sizes, &cfg).map_err(to_py)?;
    json_to_py(py, &serde_json::to_string(&table).map_err(|e| invalid(e.to_string()))?)
}

#[pyfunction]
#[pyo3(signature = (n=256))]
fn nonuniqueness_demo(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyAny>> {
    let report = verify::nonuniqueness_demo_on(n);
    json_to_py(py, &serde_json::to_string(&report).map_err(|e| invalid(e.to_string()))?)
}

#[pymodule]
fn dbar(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("DbarError", py.get_type::<DbarError>())?;
    m.add("RejectedError", py.get_type::<RejectedError>())?;
    m.add("CompatibilityError", py.get_type::<CompatibilityError>())?;
    m.add_class::<PyCurve>()?;
    m.add_class::<PyBoundaryFunction>()?;
    m.add_class::<PySolution>()?;
    m.add_class::<PyCase>()?;
    m.add_function(wrap_pyfunction!(cauchy, m)?)?;
    m.add_function(wrap_pyfunction!(py_cauchy_trace, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(membership, m)?)?;
    m.add_function(wrap_pyfunction!(robin_transform, m)?)?;
    m.add_function(wrap_pyfunction!(robin_ode_residual, m)?)?;
    m.add_function(wrap_pyfunction!(manufactured_case, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(run_convergence, m)?)?;
    m.add_function(wrap_pyfunction!(nonuniqueness_demo, m)?)?;
    Ok(())
}
