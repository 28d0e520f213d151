//! Python module `gwalk`: graphs with tails, stationary states, scattering
//! matrices, comfortability and the verification suite.

use gwalk_core::observables;
use gwalk_core::walk::{self, IterationOptions};
use gwalk_core::{complete, laplacian, unit, verify, Complex64, Error, Inflow, StationarySolver};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::NoVertices
        | Error::Disconnected
        | Error::DuplicateEdge(..)
        | Error::SelfLoop(_)
        | Error::VertexOutOfRange { .. }
        | Error::RepeatedBoundary(_)
        | Error::EmptyBoundary
        | Error::InflowLength { .. }
        | Error::ZeroFrequency
        | Error::NotUnitModulus(_)
        | Error::CompleteParams(_)
        | Error::UnknownSuite(_)
        | Error::Json(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Connected simple graph with semi-infinite tails on the boundary vertices.
#[pyclass(name = "Graph", frozen)]
struct PyGraph {
    inner: gwalk_core::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(vertices: usize, edges: Vec<(usize, usize)>, boundary: Vec<usize>) -> PyResult<Self> {
        let inner = gwalk_core::Graph::new(vertices, &edges, &boundary).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// `K_n` with tails on vertices `0..l`.
    #[staticmethod]
    fn complete(n: usize, l: usize) -> PyResult<Self> {
        let inner = gwalk_core::generators::complete(n, l).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Parses `{"vertices": N, "edges": [[u, v], ...], "boundary": [...]}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = gwalk_core::Graph::from_json(text).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_spec()).expect("graph specs serialize")
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    #[getter]
    fn boundary(&self) -> Vec<usize> {
        self.inner.boundary().to_vec()
    }

    /// `(origin, terminus)` per arc, in the order used by state vectors.
    #[getter]
    fn arcs(&self) -> Vec<(usize, usize)> {
        self.inner.arcs().iter().map(|a| (a.origin, a.terminus)).collect()
    }

    fn is_bipartite(&self) -> bool {
        self.inner.bipartition().is_some()
    }

    fn has_boundary_leaf(&self) -> bool {
        self.inner.has_boundary_leaf()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(vertices={}, edges={}, boundary={:?})",
            self.inner.vertex_count(),
            self.inner.edge_count(),
            self.inner.boundary()
        )
    }
}

fn inflow_for(g: &gwalk_core::Graph, inflow: Option<Vec<Complex64>>) -> PyResult<Inflow> {
    let inflow = match inflow {
        Some(a) => Inflow::new(a),
        None => Inflow::basis(g.boundary_count(), 0),
    };
    inflow.check(g).map_err(py_err)?;
    Ok(inflow)
}

/// Stationary state `φ_z` (one amplitude per arc) at `z = e^{iθ}`.
#[pyfunction]
#[pyo3(signature = (graph, theta, inflow=None))]
fn stationary_state(graph: &PyGraph, theta: f64, inflow: Option<Vec<Complex64>>) -> PyResult<Vec<Complex64>> {
    let g = &graph.inner;
    let inflow = inflow_for(g, inflow)?;
    let solver = StationarySolver::new(g).map_err(py_err)?;
    let state = solver.state(unit(theta), &inflow).map_err(py_err)?;
    Ok(state.values.iter().copied().collect())
}

/// Time iteration of the walk until successive states differ by less than
/// `tol`; returns the state and the number of steps.
#[pyfunction]
#[pyo3(signature = (graph, theta, inflow=None, tol=walk::DEFAULT_TOL, max_iter=walk::DEFAULT_MAX_ITER))]
fn iterate(
    graph: &PyGraph,
    theta: f64,
    inflow: Option<Vec<Complex64>>,
    tol: f64,
    max_iter: usize,
) -> PyResult<(Vec<Complex64>, usize)> {
    let g = &graph.inner;
    let inflow = inflow_for(g, inflow)?;
    let it =
        walk::iterate_to_stationary(g, &inflow, unit(theta), IterationOptions { tol, max_iter }).map_err(py_err)?;
    Ok((it.state.values.iter().copied().collect(), it.iterations))
}

/// Scattering matrix `S_z` as a list of rows.
#[pyfunction]
fn scattering_matrix(graph: &PyGraph, theta: f64) -> PyResult<Vec<Vec<Complex64>>> {
    let s = observables::scattering_matrix(&graph.inner, unit(theta)).map_err(py_err)?;
    let r = s.dim();
    Ok((0..r).map(|i| (0..r).map(|j| s.matrix[(i, j)]).collect()).collect())
}

/// Comfortability `E = ½‖φ_z‖²`.
#[pyfunction]
#[pyo3(signature = (graph, theta, inflow=None))]
fn comfortability(graph: &PyGraph, theta: f64, inflow: Option<Vec<Complex64>>) -> PyResult<f64> {
    let g = &graph.inner;
    let inflow = inflow_for(g, inflow)?;
    Ok(observables::comfortability(g, unit(theta), &inflow)
        .map_err(py_err)?
        .value)
}

/// Comfortability over a list of angles, evaluated with one solver.
#[pyfunction]
#[pyo3(signature = (graph, thetas, inflow=None))]
fn comfortability_curve(graph: &PyGraph, thetas: Vec<f64>, inflow: Option<Vec<Complex64>>) -> PyResult<Vec<f64>> {
    let g = &graph.inner;
    let inflow = inflow_for(g, inflow)?;
    let solver = StationarySolver::new(g).map_err(py_err)?;
    thetas
        .into_iter()
        .map(|t| {
            observables::comfortability_with(&solver, unit(t), &inflow)
                .map(|e| e.value)
                .map_err(py_err)
        })
        .collect()
}

/// Singular frequencies on the unit circle as `(θ, kernel_dim)` pairs.
#[pyfunction]
fn singular_set(graph: &PyGraph) -> PyResult<Vec<(f64, usize)>> {
    let set = laplacian::singular_set(&graph.inner, 1e-9).map_err(py_err)?;
    Ok(set.members.iter().map(|m| (m.theta, m.kernel_dim)).collect())
}

/// `θ* = arccos(−1/(n−1))` for `K_n`.
#[pyfunction]
fn theta_star(n: usize) -> f64 {
    complete::theta_star(n)
}

/// Closed-form comfortability on `K_n` with `l` tails and unit inflow on
/// the first tail.
#[pyfunction]
fn complete_comfortability(n: usize, l: usize, theta: f64) -> PyResult<f64> {
    let p = complete::CompleteGraphParams::new(n, l, theta).map_err(py_err)?;
    Ok(complete::closed_comfortability(&p))
}

/// `(name, pass, detail)`.
type CheckTuple = (String, bool, String);

/// Runs a verification suite; returns `(passed, [(name, pass, detail)])`.
#[pyfunction]
#[pyo3(signature = (suite="all"))]
fn run_verify(suite: &str) -> PyResult<(bool, Vec<CheckTuple>)> {
    let report = verify::run(suite, &verify::VerifyOptions::default()).map_err(py_err)?;
    let passed = report.passed();
    Ok((
        passed,
        report.checks.into_iter().map(|c| (c.name, c.pass, c.detail)).collect(),
    ))
}

#[pymodule]
pub fn gwalk(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(stationary_state, m)?)?;
    m.add_function(wrap_pyfunction!(iterate, m)?)?;
    m.add_function(wrap_pyfunction!(scattering_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(comfortability, m)?)?;
    m.add_function(wrap_pyfunction!(comfortability_curve, m)?)?;
    m.add_function(wrap_pyfunction!(singular_set, m)?)?;
    m.add_function(wrap_pyfunction!(theta_star, m)?)?;
    m.add_function(wrap_pyfunction!(complete_comfortability, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
