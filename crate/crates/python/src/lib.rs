//! Python bindings: scenes, a steppable simulator, suites, SRCC and the grid search.

use std::fmt::Display;
use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use sim2real::agents::AgentId;
use sim2real::backend::{self, make_backend, Action, BackendId, SimParams, AGENT_RADIUS};
use sim2real::geometry::{self, Pose, Vec2};
use sim2real::io::{self, ScenarioFile};
use sim2real::metrics::{self, srcc_report, Metric, SRCCReport, TableOneDataset};
use sim2real::optimizer::{self, ParamGrid};
use sim2real::task::{self, BackendConfig, ScenarioSuite};

fn value_err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn points(vs: Vec<(f64, f64)>) -> Vec<Vec2> {
    vs.into_iter().map(|(x, y)| Vec2::new(x, y)).collect()
}

fn params_from(sliding: bool, noise_multiplier: f64, params_json: Option<&str>) -> PyResult<SimParams> {
    let params = match params_json {
        Some(text) => serde_json::from_str(text).map_err(value_err)?,
        None => SimParams::default().with_sliding(sliding).with_noise(noise_multiplier),
    };
    params.validate().map_err(value_err)?;
    Ok(params)
}

fn suite_from(scenarios: Option<Vec<String>>) -> PyResult<ScenarioSuite> {
    let Some(names) = scenarios else {
        return ScenarioFile::default_suite().map_err(value_err);
    };
    let files = names
        .iter()
        .map(|n| {
            if n.trim_start().starts_with('{') {
                ScenarioFile::from_json(n)
            } else {
                ScenarioFile::shipped(n)
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(value_err)?;
    ScenarioFile::suite_of(&files).map_err(value_err)
}

fn report_dict<'py>(py: Python<'py>, r: &SRCCReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("metric", r.metric.as_str())?;
    d.set_item("srcc", r.srcc)?;
    d.set_item("discordant_pairs", r.discordant_pairs)?;
    d.set_item("total_pairs", r.total_pairs)?;
    d.set_item("reversal_fraction", r.reversal_fraction)?;
    Ok(d)
}

/// Polygonal room with obstacles.
#[pyclass(module = "sim2real", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Scene {
    inner: Arc<geometry::Scene>,
}

#[pymethods]
impl Scene {
    #[new]
    #[pyo3(signature = (name, boundary, obstacles = Vec::new()))]
    fn new(name: String, boundary: Vec<(f64, f64)>, obstacles: Vec<Vec<(f64, f64)>>) -> PyResult<Self> {
        let scene = geometry::Scene::new(name, points(boundary), obstacles.into_iter().map(points).collect())
            .map_err(value_err)?;
        Ok(Self { inner: Arc::new(scene) })
    }

    #[staticmethod]
    fn rectangle(name: String, width: f64, height: f64) -> PyResult<Self> {
        let scene = geometry::Scene::rectangle(name, width, height).map_err(value_err)?;
        Ok(Self { inner: Arc::new(scene) })
    }

    /// A shipped scenario by name, or a scenario JSON document.
    #[staticmethod]
    fn from_scenario(spec: &str) -> PyResult<Self> {
        let file = if spec.trim_start().starts_with('{') {
            ScenarioFile::from_json(spec)
        } else {
            ScenarioFile::shipped(spec)
        }
        .map_err(value_err)?;
        Ok(Self {
            inner: Arc::new(file.scene().map_err(value_err)?),
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn boundary(&self) -> Vec<(f64, f64)> {
        self.inner.boundary().iter().map(|v| (v.x, v.y)).collect()
    }

    #[getter]
    fn obstacles(&self) -> Vec<Vec<(f64, f64)>> {
        self.inner
            .obstacles()
            .iter()
            .map(|o| o.iter().map(|v| (v.x, v.y)).collect())
            .collect()
    }

    fn with_obstacle(&self, obstacle: Vec<(f64, f64)>) -> PyResult<Self> {
        let scene = self.inner.with_obstacle(points(obstacle)).map_err(value_err)?;
        Ok(Self { inner: Arc::new(scene) })
    }

    #[pyo3(signature = (x, y, radius = AGENT_RADIUS))]
    fn is_navigable(&self, x: f64, y: f64, radius: f64) -> bool {
        self.inner.is_navigable(Vec2::new(x, y), radius)
    }

    fn clearance(&self, x: f64, y: f64) -> f64 {
        self.inner.clearance(Vec2::new(x, y))
    }

    /// Range along `angle` (radians) from `(x, y)`, clipped to `max_range`.
    fn ray_cast(&self, x: f64, y: f64, angle: f64, max_range: f64) -> PyResult<f64> {
        self.inner
            .ray_cast(Vec2::new(x, y), Vec2::from_angle(angle), max_range)
            .map_err(value_err)
    }

    /// Shortest collision-free path length; `inf` when unreachable.
    #[pyo3(signature = (a, b, radius = AGENT_RADIUS))]
    fn geodesic(&self, a: (f64, f64), b: (f64, f64), radius: f64) -> PyResult<f64> {
        geometry::geodesic_distance(&self.inner, Vec2::new(a.0, a.1), Vec2::new(b.0, b.1), radius).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Scene('{}', {} obstacles)",
            self.inner.name(),
            self.inner.obstacles().len()
        )
    }
}

/// Egocentric observation returned by `Simulator.reset` and `Simulator.step`.
#[pyclass(module = "sim2real", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct Observation {
    depth: Vec<f64>,
    goal_distance: f64,
    goal_azimuth: f64,
    fov: f64,
}

impl From<backend::Observation> for Observation {
    fn from(o: backend::Observation) -> Self {
        Self {
            depth: o.depth,
            goal_distance: o.goal_distance,
            goal_azimuth: o.goal_azimuth,
            fov: o.fov,
        }
    }
}

/// A steppable backend: `test_sim` or `reference_real`.
#[pyclass(module = "sim2real")]
struct Simulator {
    inner: backend::Backend,
}

#[pymethods]
impl Simulator {
    #[new]
    #[pyo3(signature = (scene, backend = "test_sim", sliding = true, noise_multiplier = 0.0, seed = 0, params_json = None))]
    fn new(
        scene: &Scene,
        backend: &str,
        sliding: bool,
        noise_multiplier: f64,
        seed: u64,
        params_json: Option<&str>,
    ) -> PyResult<Self> {
        let id: BackendId = backend.parse().map_err(value_err)?;
        let params = params_from(sliding, noise_multiplier, params_json)?;
        Ok(Self {
            inner: make_backend(id, Arc::clone(&scene.inner), &params, seed),
        })
    }

    /// Places the robot at `(x, y, heading)` with the given goal.
    #[pyo3(signature = (start, goal, episode_id = 0))]
    fn reset(&mut self, start: (f64, f64, f64), goal: (f64, f64), episode_id: u64) -> PyResult<Observation> {
        let pose = Pose::new(Vec2::new(start.0, start.1), start.2);
        self.inner
            .reset(pose, Vec2::new(goal.0, goal.1), episode_id)
            .map(Observation::from)
            .map_err(value_err)
    }

    /// Applies one of `turn_left`, `turn_right`, `forward`, `stop`.
    fn step(&mut self, action: &str) -> PyResult<(Observation, bool)> {
        let action = Action::ALL
            .into_iter()
            .find(|a| a.as_str() == action)
            .ok_or_else(|| value_err(format!("unknown action '{action}'")))?;
        let (obs, collided) = self.inner.step(action).map_err(runtime_err)?;
        Ok((obs.into(), collided))
    }

    /// True `(x, y, heading)`, or `None` before the first reset.
    #[getter]
    fn pose(&self) -> Option<(f64, f64, f64)> {
        self.inner.pose().map(|p| (p.position.x, p.position.y, p.heading()))
    }
}

#[pyfunction]
fn pearson(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    metrics::pearson(&xs, &ys).map_err(value_err)
}

/// `(count, total)` of rank reversals between two score vectors.
#[pyfunction]
fn discordant_pairs(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<(usize, usize)> {
    let d = metrics::discordant_pairs(&xs, &ys).map_err(value_err)?;
    Ok((d.count, d.total))
}

#[pyfunction]
fn compute_spl(success: bool, p: f64, l: f64) -> PyResult<f64> {
    task::compute_spl(success, p, l).map_err(value_err)
}

/// Correlations and reversal counts of the embedded nine-model table.
#[pyfunction]
fn table1(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    let a = TableOneDataset::load().and_then(|d| d.analyze()).map_err(runtime_err)?;
    let d = PyDict::new(py);
    d.set_item("chall_srcc", a.chall_srcc)?;
    d.set_item("chall_reversals", (a.chall_reversals.count, a.chall_reversals.total))?;
    d.set_item("test_srcc", a.test_srcc)?;
    d.set_item("test_reversals", (a.test_reversals.count, a.test_reversals.total))?;
    Ok(d)
}

/// Runs a roster on a suite and returns the results CSV text.
#[pyfunction]
#[pyo3(signature = (backend = "test_sim", sliding = true, noise_multiplier = 0.0, roster = "all", scenarios = None, seed = 0, params_json = None))]
#[allow(clippy::too_many_arguments)]
fn run_suite(
    py: Python<'_>,
    backend: &str,
    sliding: bool,
    noise_multiplier: f64,
    roster: &str,
    scenarios: Option<Vec<String>>,
    seed: u64,
    params_json: Option<&str>,
) -> PyResult<String> {
    let id: BackendId = backend.parse().map_err(value_err)?;
    let params = params_from(sliding, noise_multiplier, params_json)?;
    let roster = AgentId::parse_roster(roster).map_err(value_err)?;
    let suite = suite_from(scenarios)?;
    let label = match id {
        BackendId::ReferenceReal => "reference".to_string(),
        BackendId::TestSim => format!(
            "sliding={},noise={:.1}",
            if params.sliding { "on" } else { "off" },
            params.noise_multiplier
        ),
    };
    let config = BackendConfig::new(id, params);
    let results = py
        .detach(|| task::run_suite(&config, &roster, &suite, seed))
        .map_err(runtime_err)?;
    io::write_results(&results, &label).map_err(runtime_err)
}

/// SRCC report for two results CSV texts, paired by agent id.
#[pyfunction]
#[pyo3(signature = (sim_csv, real_csv, metric = "spl"))]
fn srcc<'py>(py: Python<'py>, sim_csv: &str, real_csv: &str, metric: &str) -> PyResult<Bound<'py, PyDict>> {
    let metric = match metric {
        "spl" => Metric::Spl,
        "success" => Metric::Success,
        other => return Err(value_err(format!("unknown metric '{other}'"))),
    };
    let sim = io::read_results(sim_csv).map_err(value_err)?;
    let real = io::read_results(real_csv).map_err(value_err)?;
    let paired = io::pair_results(&sim, &real, metric).map_err(value_err)?;
    let report = srcc_report(&paired).map_err(value_err)?;
    report_dict(py, &report)
}

/// SVG scatter for two results CSV texts.
#[pyfunction]
#[pyo3(signature = (sim_csv, real_csv, metric = "spl"))]
fn scatter_svg(sim_csv: &str, real_csv: &str, metric: &str) -> PyResult<String> {
    let metric = if metric == "success" {
        Metric::Success
    } else {
        Metric::Spl
    };
    let sim = io::read_results(sim_csv).map_err(value_err)?;
    let real = io::read_results(real_csv).map_err(value_err)?;
    let paired = io::pair_results(&sim, &real, metric).map_err(value_err)?;
    let report = srcc_report(&paired).map_err(value_err)?;
    io::emit_scatter(&paired, &report).map_err(value_err)
}

/// Default 22-cell grid search against reference-backend results.
#[pyfunction]
#[pyo3(signature = (roster = "all", scenarios = None, seed = 0))]
fn optimize<'py>(
    py: Python<'py>,
    roster: &str,
    scenarios: Option<Vec<String>>,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let roster = AgentId::parse_roster(roster).map_err(value_err)?;
    let suite = suite_from(scenarios)?;
    let result = py.detach(|| {
        let reference = task::run_suite(&BackendConfig::reference(), &roster, &suite, seed).map_err(runtime_err)?;
        optimizer::optimize(&ParamGrid::default(), &roster, &suite, &reference, seed).map_err(runtime_err)
    })?;
    let cells = result
        .cells
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("label", c.cell.label())?;
            d.set_item("sliding", c.cell.sliding)?;
            d.set_item("noise_multiplier", c.cell.noise_multiplier)?;
            d.set_item("spl", c.spl.as_ref().ok().map(|r| report_dict(py, r)).transpose()?)?;
            d.set_item(
                "success",
                c.success.as_ref().ok().map(|r| report_dict(py, r)).transpose()?,
            )?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let out = PyDict::new(py);
    out.set_item("cells", cells)?;
    out.set_item("argmax", result.best().map(|b| b.cell.label()))?;
    out.set_item("ranking", result.ranking.clone())?;
    Ok(out)
}

#[pymodule(name = "sim2real")]
fn sim2real_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scene>()?;
    m.add_class::<Observation>()?;
    m.add_class::<Simulator>()?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(discordant_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(compute_spl, m)?)?;
    m.add_function(wrap_pyfunction!(table1, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(srcc, m)?)?;
    m.add_function(wrap_pyfunction!(scatter_svg, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add("AGENTS", AgentId::ALL.iter().map(|a| a.as_str()).collect::<Vec<_>>())?;
    m.add("SCENARIOS", io::SHIPPED.iter().map(|(n, _)| *n).collect::<Vec<_>>())?;
    Ok(())
}
