//! Python bindings: instances, the Benders solver, the baseline, rounding and
//! the instance generator.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ccbend::baseline::solve_baseline;
use ccbend::decomposition::{decompose, min_vertex_cover, CoverMode};
use ccbend::generate::{generate_instance, GeneratorConfig, Topology};
use ccbend::graph::{self, EdgeLabeling};
use ccbend::master::{self, Clock, SolverConfig};
use ccbend::rounding::{self, RoundingMethod};
use ccbend::subproblem::MwrObjective;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cover_mode(s: &str) -> PyResult<CoverMode> {
    match s {
        "exact" => Ok(CoverMode::Exact),
        "greedy" => Ok(CoverMode::Greedy),
        _ => Err(value_err(format!("cover must be 'exact' or 'greedy', got {s:?}"))),
    }
}

fn rounding_method(s: &str) -> PyResult<RoundingMethod> {
    match s {
        "threshold" => Ok(RoundingMethod::Threshold),
        "parallel" => Ok(RoundingMethod::Parallel),
        "serial" => Ok(RoundingMethod::Serial),
        _ => Err(value_err(format!("rounding must be 'threshold', 'parallel' or 'serial', got {s:?}"))),
    }
}

/// Weighted graph with edges stored as `(i, j, weight)`, `i < j`.
#[pyclass(name = "Instance", module = "ccbend", frozen)]
struct PyInstance {
    inner: graph::Instance,
}

#[pymethods]
impl PyInstance {
    #[new]
    fn new(nodes: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        graph::Instance::new(nodes, edges).map(|inner| PyInstance { inner }).map_err(value_err)
    }

    /// Parses the `p cc N M` / `e i j w` text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        graph::parse_instance(text).map(|inner| PyInstance { inner }).map_err(value_err)
    }

    fn to_text(&self) -> String {
        graph::write_instance(&self.inner)
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges().iter().map(|e| (e.i, e.j, e.weight)).collect()
    }

    /// Clustering cost of an edge labeling (1 = cut).
    fn cost(&self, x: Vec<f64>) -> PyResult<f64> {
        graph::cc_cost(&self.inner, &EdgeLabeling::new(x)).map_err(value_err)
    }

    fn is_feasible(&self, x: Vec<f64>) -> PyResult<bool> {
        graph::is_multicut_feasible(&self.inner, &EdgeLabeling::new(x)).map_err(value_err)
    }

    /// Cut induced by per-node cluster labels.
    fn cut_of(&self, labels: Vec<usize>) -> PyResult<Vec<f64>> {
        graph::induced_cut(&self.inner, &graph::Partition::from_labels(&labels)).map(|x| x.values).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("Instance(nodes={}, edges={})", self.inner.node_count(), self.inner.edge_count())
    }
}

#[pyclass(name = "SolveResult", module = "ccbend", frozen, get_all)]
struct PySolveResult {
    status: String,
    cost: f64,
    lower_bound: f64,
    gap: f64,
    iterations: usize,
    lp_bound: Option<f64>,
    /// Edge labeling, 1 = cut.
    x: Vec<f64>,
    /// Cluster id per node.
    labels: Vec<usize>,
    serial_ms: f64,
    parallel_ms: f64,
    master_ms: f64,
    rows_std: usize,
    rows_mwr: usize,
    trace_csv: String,
}

#[pymethods]
impl PySolveResult {
    fn __repr__(&self) -> String {
        format!(
            "SolveResult(status={:?}, cost={}, lower_bound={}, iterations={})",
            self.status, self.cost, self.lower_bound, self.iterations
        )
    }
}

impl From<master::SolveResult> for PySolveResult {
    fn from(r: master::SolveResult) -> Self {
        let last = r.trace.records.last();
        PySolveResult {
            status: r.status.as_str().to_string(),
            cost: r.cost,
            lower_bound: r.lower_bound,
            gap: r.gap(),
            iterations: r.iterations,
            lp_bound: r.lp_bound,
            rows_std: last.map_or(0, |t| t.rows_std),
            rows_mwr: last.map_or(0, |t| t.rows_mwr),
            serial_ms: r.trace.serial_total_ms(),
            parallel_ms: r.trace.parallel_total_ms(),
            master_ms: r.trace.master_total_ms(),
            trace_csv: r.trace.to_csv(),
            labels: r.partition.component_id,
            x: r.x.values,
        }
    }
}

/// Benders decomposition with Magnanti-Wong rows; `tau = 0` disables them.
#[pyfunction]
#[pyo3(signature = (instance, tau=0.5, time_limit=600.0, seed=0, threads=1, cover="exact", mwr_objective="random", rounding="threshold", clock="work"))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    instance: &PyInstance,
    tau: f64,
    time_limit: f64,
    seed: u64,
    threads: usize,
    cover: &str,
    mwr_objective: &str,
    rounding: &str,
    clock: &str,
) -> PyResult<PySolveResult> {
    let cfg = SolverConfig {
        tau,
        time_limit_s: time_limit,
        seed,
        threads,
        cover_mode: cover_mode(cover)?,
        mwr_objective: match mwr_objective {
            "random" => MwrObjective::Random,
            "inverse-weight" => MwrObjective::InverseWeight,
            _ => return Err(value_err(format!("unknown mwr_objective {mwr_objective:?}"))),
        },
        rounding: rounding_method(rounding)?,
        clock: match clock {
            "work" => Clock::Work,
            "wall" => Clock::Wall,
            _ => return Err(value_err(format!("clock must be 'work' or 'wall', got {clock:?}"))),
        },
        ..SolverConfig::default()
    };
    cfg.validate().map_err(value_err)?;
    let inst = &instance.inner;
    py.detach(|| master::bdcc(inst, &cfg)).map(PySolveResult::from).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Cutting-plane solver over cycle inequalities with one negative edge.
#[pyfunction]
#[pyo3(signature = (instance, time_limit=600.0))]
fn baseline(py: Python<'_>, instance: &PyInstance, time_limit: f64) -> PyResult<PySolveResult> {
    let cfg = SolverConfig { time_limit_s: time_limit, ..SolverConfig::default() };
    let inst = &instance.inner;
    py.detach(|| solve_baseline(inst, &cfg))
        .map(|b| PySolveResult::from(b.result))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Exhaustive optimum as `(cost, labels)`; at most 12 nodes.
#[pyfunction]
fn brute_force(instance: &PyInstance) -> PyResult<(f64, Vec<usize>)> {
    graph::brute_force_optimal(&instance.inner).map(|(c, p)| (c, p.component_id)).map_err(value_err)
}

/// Feasible binary labeling from an arbitrary one in `[0, 1]`.
#[pyfunction]
#[pyo3(signature = (instance, x, method="threshold", cover="exact"))]
fn round(instance: &PyInstance, x: Vec<f64>, method: &str, cover: &str) -> PyResult<Vec<f64>> {
    let inst = &instance.inner;
    if x.len() != inst.edge_count() {
        return Err(value_err(format!("expected {} edge values, got {}", inst.edge_count(), x.len())));
    }
    let decomp = decompose(inst, cover_mode(cover)?).map_err(value_err)?;
    Ok(rounding::round(inst, &decomp, &EdgeLabeling::new(x), rounding_method(method)?).values)
}

/// Vertex cover of the negative edges; its nodes are the subproblem roots.
#[pyfunction]
#[pyo3(signature = (instance, cover="exact"))]
fn vertex_cover(instance: &PyInstance, cover: &str) -> PyResult<Vec<usize>> {
    min_vertex_cover(&instance.inner, cover_mode(cover)?).map(|c| c.into_iter().collect()).map_err(value_err)
}

/// Seeded random instance; `grid=(width, height)` selects a 4-connected grid.
#[pyfunction]
#[pyo3(signature = (nodes=10, prob=0.5, seed=0, wmin=-1.0, wmax=1.0, grid=None))]
fn generate(
    nodes: usize,
    prob: f64,
    seed: u64,
    wmin: f64,
    wmax: f64,
    grid: Option<(usize, usize)>,
) -> PyResult<PyInstance> {
    let topology = match grid {
        Some((width, height)) => Topology::Grid { width, height },
        None => Topology::ErdosRenyi { nodes, probability: prob },
    };
    generate_instance(&GeneratorConfig { topology, weight_min: wmin, weight_max: wmax, seed })
        .map(|inner| PyInstance { inner })
        .map_err(value_err)
}

#[pymodule]
#[pyo3(name = "ccbend")]
fn ccbend_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(baseline, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(round, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_cover, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
