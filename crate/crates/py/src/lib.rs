//! Python bindings for the `abfold` core.

use pyo3::exceptions::{PyIOError, PyKeyError, PyValueError};
use pyo3::prelude::*;

use abfold::analysis;
use abfold::harness;
use abfold::model::{self, corpus};
use abfold::optimizer::{self, Ablation, OptimizerConfig, Stopping};
use abfold::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::UnknownSequence(_) => PyKeyError::new_err(e.to_string()),
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// An A/B monomer sequence.
#[pyclass(name = "Sequence", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySequence {
    inner: model::Sequence,
}

#[pymethods]
impl PySequence {
    #[new]
    #[pyo3(signature = (residues, label = ""))]
    fn new(residues: &str, label: &str) -> PyResult<Self> {
        Ok(Self { inner: model::Sequence::parse(label, residues).map_err(to_py)? })
    }

    /// Built-in sequence by label.
    #[staticmethod]
    fn builtin(label: &str) -> PyResult<Self> {
        Ok(Self { inner: model::lookup(label).map_err(to_py)? })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Sequence({:?}, label={:?})", self.inner.to_string(), self.inner.label())
    }

    /// Prefixes with the last 1..=k monomers removed.
    fn subsequences(&self, k: usize) -> PyResult<Vec<PySequence>> {
        Ok(harness::make_subsequences(&self.inner, k)
            .map_err(to_py)?
            .into_iter()
            .map(|inner| PySequence { inner })
            .collect())
    }

    /// Raw model energy of the given angles (radians, theta then beta).
    fn energy(&self, angles: Vec<f64>) -> PyResult<f64> {
        let conf = model::Conformation::new(self.inner.len(), angles).map_err(to_py)?;
        model::energy(&self.inner, &conf).map_err(to_py)
    }

    /// Reported (negated) energy of angles in degrees.
    fn reported_energy_degrees(&self, degrees: Vec<f64>) -> PyResult<f64> {
        let conf = model::Conformation::from_degrees(self.inner.len(), &degrees).map_err(to_py)?;
        Ok(model::reported_energy(model::energy(&self.inner, &conf).map_err(to_py)?))
    }

    /// Monomer coordinates for the given angles.
    fn positions(&self, angles: Vec<f64>) -> PyResult<Vec<[f64; 3]>> {
        let conf = model::Conformation::new(self.inner.len(), angles).map_err(to_py)?;
        Ok(model::compute_positions(&conf).iter().map(|p| [p.x, p.y, p.z]).collect())
    }
}

/// Outcome of one optimizer run.
#[pyclass(name = "RunResult", frozen, get_all)]
struct PyRunResult {
    energy: f64,
    nse: u64,
    seconds: f64,
    hit: Option<bool>,
    stop: String,
    angles: Vec<f64>,
}

#[pymethods]
impl PyRunResult {
    fn __repr__(&self) -> String {
        format!("RunResult(energy={}, nse={}, seconds={:.3})", self.energy, self.nse, self.seconds)
    }
}

#[allow(clippy::too_many_arguments)]
fn build_config(
    nse: Option<u64>,
    time: Option<f64>,
    target: Option<f64>,
    seed: u64,
    np: usize,
    local_search: bool,
    component_reinit: bool,
) -> OptimizerConfig {
    OptimizerConfig {
        np,
        seed,
        stopping: Stopping { nse_limit: nse, time_limit: time, target },
        ablation: Ablation { local_search, component_reinit, temporal_locality: true },
        ..OptimizerConfig::default()
    }
}

/// Runs the optimizer once; `target` is a reported energy.
#[pyfunction]
#[pyo3(signature = (seq, nse = None, time = None, target = None, seed = 0, np = optimizer::DEFAULT_NP,
                    local_search = true, component_reinit = true))]
#[allow(clippy::too_many_arguments)]
fn optimize(
    py: Python<'_>,
    seq: &PySequence,
    nse: Option<u64>,
    time: Option<f64>,
    target: Option<f64>,
    seed: u64,
    np: usize,
    local_search: bool,
    component_reinit: bool,
) -> PyResult<PyRunResult> {
    let config = build_config(nse, time, target, seed, np, local_search, component_reinit);
    let seq = seq.inner.clone();
    let out = py.detach(move || optimizer::run(&seq, &config)).map_err(to_py)?;
    Ok(PyRunResult {
        energy: out.best_reported,
        nse: out.nse,
        seconds: out.seconds,
        hit: out.hit,
        stop: format!("{:?}", out.stop),
        angles: out.best.into_angles(),
    })
}

/// Independent runs; returns (records, summary) as plain dicts via JSON.
#[pyfunction]
#[pyo3(signature = (seq, runs, nse = None, target = None, seed = 0, jobs = 1))]
fn experiment(
    py: Python<'_>,
    seq: &PySequence,
    runs: usize,
    nse: Option<u64>,
    target: Option<f64>,
    seed: u64,
    jobs: usize,
) -> PyResult<(String, String)> {
    let config = build_config(nse, None, target, seed, optimizer::DEFAULT_NP, true, true);
    let seq = seq.inner.clone();
    let (records, summary) =
        py.detach(move || harness::run_experiment(&seq, &config, runs, jobs, None)).map_err(to_py)?;
    let r = serde_json_string(&records)?;
    let s = serde_json_string(&summary)?;
    Ok((r, s))
}

fn serde_json_string<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Least-squares fit of y = a * b^L; returns (a, b).
#[pyfunction]
fn fit_exponential(points: Vec<(f64, f64)>) -> PyResult<(f64, f64)> {
    harness::fit_exponential(&points).map_err(to_py)
}

/// Minimum RMSD over proper rigid motions.
#[pyfunction]
fn superposed_rmsd(a: Vec<[f64; 3]>, b: Vec<[f64; 3]>) -> PyResult<f64> {
    let conv = |v: Vec<[f64; 3]>| v.into_iter().map(|p| model::Point::new(p[0], p[1], p[2])).collect::<Vec<_>>();
    analysis::superposed_rmsd(&conv(a), &conv(b)).map_err(to_py)
}

/// Angles with every torsion negated.
#[pyfunction]
fn mirror(angles: Vec<f64>) -> PyResult<Vec<f64>> {
    let conf = model::Conformation::from_angles(angles).map_err(to_py)?;
    Ok(analysis::mirror(&conf).into_angles())
}

/// Labels of the built-in sequences.
#[pyfunction]
fn builtin_labels() -> Vec<&'static str> {
    corpus::CORPUS.iter().map(|e| e.label).collect()
}

/// Best-known reported energy for a built-in label.
#[pyfunction]
fn best_known(label: &str) -> Option<f64> {
    model::best_known(label)
}

/// Published best solutions as (label, angles in radians, energy).
#[pyfunction]
fn published_solutions() -> Vec<(String, Vec<f64>, f64)> {
    analysis::SolutionArchive::published()
        .entries
        .into_iter()
        .map(|e| (e.label, e.conformation.into_angles(), e.energy))
        .collect()
}

#[pymodule]
fn abfold_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySequence>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(experiment, m)?)?;
    m.add_function(wrap_pyfunction!(fit_exponential, m)?)?;
    m.add_function(wrap_pyfunction!(superposed_rmsd, m)?)?;
    m.add_function(wrap_pyfunction!(mirror, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_labels, m)?)?;
    m.add_function(wrap_pyfunction!(best_known, m)?)?;
    m.add_function(wrap_pyfunction!(published_solutions, m)?)?;
    Ok(())
}
