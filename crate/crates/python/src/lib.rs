//! Python bindings: episodes driven call by call, the built-in agents and
//! the metric functions.
//!
//! Structured values cross the boundary as JSON, so Python sees plain dicts
//! and lists with the same shape as the wire protocol.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;
use serde_json::Value;

use storesim::config::EpisodeConfig;
use storesim::demand;
use storesim::metrics::{self, TokenJudge};
use storesim::policy::{self, Agent, HeuristicAgent, ScriptedAgent};
use storesim::strategy::StrategyRecord;
use storesim::{prompts, toolapi, trajectory};

fn to_py_err(e: storesim::Error) -> PyErr {
    match e {
        storesim::Error::Config(_) | storesim::Error::Argument(_) | storesim::Error::Validation(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py(py: Python<'_>, obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    let text: String = py.import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn build_config(preset: &str, config_toml: Option<&str>, max_days: Option<u32>) -> PyResult<EpisodeConfig> {
    let mut config = match config_toml {
        Some(text) => EpisodeConfig::from_toml_str(text, preset),
        None => EpisodeConfig::preset(preset),
    }
    .map_err(to_py_err)?;
    if let Some(m) = max_days {
        config.max_days = m;
    }
    Ok(config)
}

fn agent_named(name: &str) -> PyResult<Box<dyn Agent>> {
    match name {
        "heuristic" => Ok(Box::new(HeuristicAgent::default())),
        "null" => Ok(Box::new(ScriptedAgent::null())),
        other => Err(PyValueError::new_err(format!(
            "unknown agent {other:?}; expected heuristic or null"
        ))),
    }
}

/// One simulated store. Every `call` is logged exactly as over the wire.
#[pyclass(name = "Episode", module = "storesim_py")]
struct PyEpisode {
    inner: storesim::Episode,
}

#[pymethods]
impl PyEpisode {
    #[new]
    #[pyo3(signature = (preset = "easy", seed = None, config_toml = None, max_days = None))]
    fn new(preset: &str, seed: Option<u64>, config_toml: Option<&str>, max_days: Option<u32>) -> PyResult<Self> {
        let config = build_config(preset, config_toml, max_days)?;
        let seed = seed.unwrap_or(config.seed);
        let inner = storesim::Episode::new(config, seed).map_err(to_py_err)?;
        Ok(PyEpisode { inner })
    }

    /// Executes a tool and returns `{"call_id", "ok", "result" | "error", ...}`.
    #[pyo3(signature = (tool, arguments = None))]
    fn call<'py>(
        &mut self,
        py: Python<'py>,
        tool: &str,
        arguments: Option<&Bound<'py, PyAny>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let args = match arguments {
            Some(a) if !a.is_none() => from_py(py, a)?,
            _ => Value::Object(Default::default()),
        };
        let result = self.inner.call(tool, args);
        to_py(py, &result)
    }

    /// Runs one full day with a built-in agent and returns its record.
    #[pyo3(signature = (agent = "heuristic"))]
    fn run_day<'py>(&mut self, py: Python<'py>, agent: &str) -> PyResult<Bound<'py, PyAny>> {
        let mut a = agent_named(agent)?;
        let record = policy::run_day(a.as_mut(), &mut self.inner).map_err(to_py_err)?;
        to_py(py, &record)
    }

    /// Day records completed since the last call.
    fn take_completed<'py>(&mut self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.take_completed())
    }

    fn state_hash(&self) -> String {
        self.inner.state_hash()
    }

    #[getter]
    fn day(&self) -> u32 {
        self.inner.day()
    }

    #[getter]
    fn phase(&self) -> &'static str {
        self.inner.phase().as_str()
    }

    #[getter]
    fn days_completed(&self) -> u32 {
        self.inner.days_completed()
    }

    #[getter]
    fn is_over(&self) -> bool {
        self.inner.is_over()
    }

    #[getter]
    fn end_reason(&self) -> Option<&'static str> {
        self.inner.ended().map(|r| r.as_str())
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    fn config<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, self.inner.config())
    }

    fn __repr__(&self) -> String {
        format!(
            "Episode(preset={:?}, seed={}, day={}, phase={:?})",
            self.inner.config().name,
            self.inner.seed(),
            self.inner.day(),
            self.inner.phase().as_str()
        )
    }
}

/// Names of all tools in table order.
#[pyfunction]
fn tool_names() -> Vec<&'static str> {
    toolapi::tool_names()
}

/// Tool definitions with access phase and JSON parameter schema.
#[pyfunction]
fn tool_definitions(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &toolapi::tool_definitions())
}

/// Choice probabilities per SKU and the outside-option share.
#[pyfunction]
fn choice_probabilities(utilities: Vec<f64>) -> (Vec<f64>, f64) {
    let p = demand::probabilities_from_utilities(&utilities);
    (p, demand::outside_probability(&utilities))
}

/// `{"std_diff", "mac", "tv"}` of the first differences of `series`.
#[pyfunction]
fn instability(py: Python<'_>, series: Vec<f64>) -> PyResult<Bound<'_, PyAny>> {
    let stats = metrics::instability(&series).map_err(to_py_err)?;
    to_py(py, &stats)
}

/// Similarity of two strategy records given as dicts.
#[pyfunction]
fn execution_similarity(py: Python<'_>, a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>) -> PyResult<f64> {
    let parse = |obj: &Bound<'_, PyAny>| -> PyResult<StrategyRecord> {
        serde_json::from_value(from_py(py, obj)?).map_err(|e| PyValueError::new_err(e.to_string()))
    };
    Ok(metrics::execution_similarity(&parse(a)?, &parse(b)?))
}

/// Runs a whole episode with a built-in agent and returns its metrics.
#[pyfunction]
#[pyo3(signature = (preset = "easy", seed = 42, agent = "heuristic", max_days = None))]
fn run_rollout<'py>(
    py: Python<'py>,
    preset: &str,
    seed: u64,
    agent: &str,
    max_days: Option<u32>,
) -> PyResult<Bound<'py, PyAny>> {
    let config = build_config(preset, None, max_days)?;
    let mut a = agent_named(agent)?;
    let mut ep = storesim::Episode::new(config, seed).map_err(to_py_err)?;
    let mut days = Vec::new();
    let outcome = policy::run_episode(a.as_mut(), &mut ep, |d| {
        days.push(d.clone());
        Ok(())
    })
    .map_err(to_py_err)?;
    let report = metrics::episode_report(&days, &TokenJudge).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("days", outcome.days)?;
    out.set_item("reason", outcome.reason.as_str())?;
    out.set_item("report", to_py(py, &report)?)?;
    out.set_item("state_hash", ep.state_hash())?;
    Ok(out.into_any())
}

/// Re-executes a trajectory file; returns `{"days_checked", "divergence"}`.
#[pyfunction]
fn replay(py: Python<'_>, path: std::path::PathBuf) -> PyResult<Bound<'_, PyAny>> {
    let traj = trajectory::Trajectory::load(&path).map_err(to_py_err)?;
    let report = trajectory::replay(&traj).map_err(to_py_err)?;
    to_py(py, &report)
}

/// Bundled prompt templates keyed by name.
#[pyfunction]
fn prompt_templates(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    let out = PyDict::new(py);
    for (name, text) in prompts::ALL {
        out.set_item(name, text)?;
    }
    Ok(out)
}

#[pymodule]
fn storesim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEpisode>()?;
    m.add_function(wrap_pyfunction!(tool_names, m)?)?;
    m.add_function(wrap_pyfunction!(tool_definitions, m)?)?;
    m.add_function(wrap_pyfunction!(choice_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(instability, m)?)?;
    m.add_function(wrap_pyfunction!(execution_similarity, m)?)?;
    m.add_function(wrap_pyfunction!(run_rollout, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    m.add_function(wrap_pyfunction!(prompt_templates, m)?)?;
    m.add("PRESETS", storesim::config::PRESETS.to_vec())?;
    Ok(())
}
