//! Python bindings. Orders cross the boundary as lists of alternative ids,
//! weight functions as the CLI strings (`linear`, `affine:C,D`, `table:W1,...`).

use pyo3::exceptions::{PyOSError, PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ranktime::harness::io::ModelSpec;
use ranktime::harness::{self, ExperimentConfig};
use ranktime::recommend::{self as rec, Solver};
use ranktime::sorting::{self, CountFunction, SortStrategy, StepKind};
use ranktime::{Error, LinearOrder, MallowsParams, PlackettLuceParams, WeightFunction};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::ResourceLimit { .. } => PyOverflowError::new_err(e.to_string()),
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn order(v: Vec<usize>) -> PyResult<LinearOrder> {
    LinearOrder::new(v).map_err(py_err)
}

fn weight(w: &str) -> PyResult<WeightFunction> {
    w.parse().map_err(py_err)
}

fn uniform_gamma(k: usize, gamma: Option<Vec<f64>>) -> Vec<f64> {
    gamma.unwrap_or_else(|| vec![1.0 / k as f64; k])
}

/// A mixture of Plackett-Luce or Mallows models, or the uniform
/// distribution over a profile.
#[pyclass(name = "PreferenceModel", frozen)]
struct PyModel(ranktime::PreferenceModel);

#[pymethods]
impl PyModel {
    /// One component per entry of `thetas`; equal mixing weights by default.
    #[staticmethod]
    #[pyo3(signature = (thetas, gamma=None))]
    fn plackett_luce(thetas: Vec<Vec<f64>>, gamma: Option<Vec<f64>>) -> PyResult<Self> {
        let comps = thetas.into_iter().map(PlackettLuceParams::new).collect::<Result<Vec<_>, _>>().map_err(py_err)?;
        let gamma = uniform_gamma(comps.len(), gamma);
        ranktime::PreferenceModel::mixture_pl(gamma, comps).map(PyModel).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (references, phis, gamma=None))]
    fn mallows(references: Vec<Vec<usize>>, phis: Vec<f64>, gamma: Option<Vec<f64>>) -> PyResult<Self> {
        if references.len() != phis.len() {
            return Err(PyValueError::new_err("references and phis differ in length"));
        }
        let comps = references
            .into_iter()
            .zip(phis)
            .map(|(r, phi)| MallowsParams::new(order(r)?, phi).map_err(py_err))
            .collect::<PyResult<Vec<_>>>()?;
        let gamma = uniform_gamma(comps.len(), gamma);
        ranktime::PreferenceModel::mixture_mallows(gamma, comps).map(PyModel).map_err(py_err)
    }

    #[staticmethod]
    fn uniform(profile: Vec<Vec<usize>>) -> PyResult<Self> {
        let orders = profile.into_iter().map(order).collect::<PyResult<Vec<_>>>()?;
        ranktime::PreferenceModel::uniform(orders).map(PyModel).map_err(py_err)
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let spec = ModelSpec::from_toml(text, "<string>").map_err(py_err)?;
        spec.build().map(PyModel).map_err(py_err)
    }

    fn to_toml(&self) -> PyResult<String> {
        ModelSpec::from_model(&self.0).to_toml().map_err(py_err)
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    fn probability(&self, s: Vec<usize>) -> PyResult<f64> {
        self.0.probability(&order(s)?).map_err(py_err)
    }

    #[pyo3(signature = (n, seed=0))]
    fn sample(&self, n: usize, seed: u64) -> Vec<Vec<usize>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.0.sample(&mut rng).into_vec()).collect()
    }

    /// `P[i][j]`, the probability that `i` is ranked above `j`.
    fn pairwise_marginals(&self) -> Vec<Vec<f64>> {
        self.0.pairwise_marginals().rows()
    }

    fn __repr__(&self) -> String {
        let kind = match &self.0 {
            ranktime::PreferenceModel::MixturePl(_) => "plackett-luce",
            ranktime::PreferenceModel::MixtureMallows(_) => "mallows",
            ranktime::PreferenceModel::Uniform(_) => "uniform",
        };
        format!("PreferenceModel(kind={kind}, m={})", self.0.m())
    }
}

#[pyfunction]
fn kendall_tau(s: Vec<usize>, t: Vec<usize>) -> PyResult<u64> {
    ranktime::kendall_tau(&order(s)?, &order(t)?).map_err(py_err)
}

/// Sorts `source` into `target`; `strategy` is a string over `s`/`i`
/// (selection/insertion), all insertion when omitted. Returns the count
/// function `[f(1), ..., f(m-1)]`.
#[pyfunction]
#[pyo3(signature = (source, target, strategy=None))]
fn run_sort(source: Vec<usize>, target: Vec<usize>, strategy: Option<&str>) -> PyResult<Vec<u64>> {
    let source = order(source)?;
    let strategy = match strategy {
        None => SortStrategy::all_insertion(source.len()),
        Some(text) => {
            let steps = text
                .chars()
                .map(|c| match c.to_ascii_lowercase() {
                    's' => Ok(StepKind::Sel),
                    'i' => Ok(StepKind::Ins),
                    _ => Err(PyValueError::new_err(format!("unknown step `{c}`"))),
                })
                .collect::<PyResult<Vec<_>>>()?;
            SortStrategy::new(steps).map_err(py_err)?
        }
    };
    let (f, _) = sorting::run_sort(&source, &order(target)?, &strategy).map_err(py_err)?;
    Ok(f.as_slice().to_vec())
}

#[pyfunction]
#[pyo3(signature = (counts, weight="linear"))]
fn time_of(counts: Vec<u64>, weight: &str) -> PyResult<f64> {
    sorting::time_of(&CountFunction::from_counts(counts), &self::weight(weight)?).map_err(py_err)
}

#[pyfunction]
fn expected_time_linear(s: Vec<usize>, model: &PyModel) -> PyResult<f64> {
    rec::expected_time_linear(&order(s)?, &model.0.pairwise_marginals()).map_err(py_err)
}

/// Monte Carlo `(mean, standard error)` of the sorting time under `weight`.
#[pyfunction]
#[pyo3(signature = (s, model, weight="linear", samples=10_000, seed=0))]
fn expected_time_mc(s: Vec<usize>, model: &PyModel, weight: &str, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rec::expected_time_mc(&order(s)?, &model.0, &self::weight(weight)?, samples, &mut rng).map_err(py_err)
}

/// `(order, expected linear time)`; solver is `exact`, `borda`, `brute` or `local`.
#[pyfunction]
#[pyo3(signature = (model, solver="brute", cap=ranktime::DEFAULT_BRUTE_FORCE_CAP))]
fn recommend(model: &PyModel, solver: &str, cap: usize) -> PyResult<(Vec<usize>, f64)> {
    let solver: Solver = solver.parse().map_err(py_err)?;
    let (s, obj) = rec::solve(&model.0, solver, cap).map_err(py_err)?;
    Ok((s.into_vec(), obj))
}

#[pyfunction]
fn borda_recommend(model: &PyModel) -> Vec<usize> {
    rec::borda_recommend(&model.0.pairwise_marginals()).into_vec()
}

#[pyfunction]
fn local_search_refine(start: Vec<usize>, model: &PyModel) -> PyResult<Vec<usize>> {
    let s = rec::local_search_refine(&order(start)?, &model.0.pairwise_marginals()).map_err(py_err)?;
    Ok(s.into_vec())
}

#[pyfunction]
#[pyo3(signature = (model, weight, cap=ranktime::DEFAULT_BRUTE_FORCE_CAP))]
fn recommend_general_weights<'py>(
    py: Python<'py>,
    model: &PyModel,
    weight: &str,
    cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let r = rec::recommend_general_weights(&model.0, &self::weight(weight)?, cap).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("order", r.order.into_vec())?;
    out.set_item("guarantee", r.guarantee)?;
    out.set_item("alpha", r.bounds.alpha)?;
    out.set_item("beta", r.bounds.beta)?;
    out.set_item("reference_scale", r.reference_scale)?;
    out.set_item("exact", r.exact)?;
    Ok(out)
}

#[pyfunction]
fn kemeny_hard_instance(profile: Vec<Vec<usize>>) -> PyResult<PyModel> {
    let orders = profile.into_iter().map(order).collect::<PyResult<Vec<_>>>()?;
    harness::kemeny_hard_instance(&orders).map(PyModel).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (truth, std, seed=0))]
fn gaussian_noisy_order(truth: Vec<usize>, std: f64, seed: u64) -> PyResult<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = harness::gaussian_noisy_order(&order(truth)?, std, &mut rng).map_err(py_err)?;
    Ok(s.into_vec())
}

/// Runs an experiment described by a TOML config and returns one dict per poll.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = ExperimentConfig::from_toml(config).map_err(py_err)?;
    let records = harness::run_experiment(&cfg).map_err(py_err)?;
    records
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("user", r.user)?;
            d.set_item("poll", r.poll)?;
            d.set_item("strategy", r.strategy.name())?;
            d.set_item("recommended", r.recommended.into_vec())?;
            d.set_item("target", r.target.into_vec())?;
            d.set_item("time", r.time)?;
            d.set_item("dkt", r.dkt)?;
            d.set_item("moves", r.moves)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
mod ranktime_py {
    #[pymodule_export]
    use super::{
        borda_recommend, expected_time_linear, expected_time_mc, gaussian_noisy_order, kemeny_hard_instance,
        kendall_tau, local_search_refine, recommend, recommend_general_weights, run_experiment, run_sort, time_of,
        PyModel,
    };
}
