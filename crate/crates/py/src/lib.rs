//! Python bindings: frames, bbas, the two fusion rules, the sequential
//! tracker and the Monte-Carlo experiment.
//!
//! Propositions cross the boundary as strings in the "|" grammar
//! (e.g. `"Fighter|Cargo"`); summaries come back as plain dicts/lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use belief_fusion::experiment::{run_experiment, ExperimentConfig};
use belief_fusion::fusion::{self, FusionRule};
use belief_fusion::propositions::{enumerate_hyper_power_set, Frame as CoreFrame};
use belief_fusion::simulation::{run_monte_carlo, Scenario};
use belief_fusion::tracker::{
    ConfusionMatrix, DecisionCriterion, Declaration, TrackerState,
};
use belief_fusion::{Bba as CoreBba, Error};

fn py_err(err: Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_criterion(name: &str) -> PyResult<DecisionCriterion> {
    match name {
        "belief" => Ok(DecisionCriterion::MaxBelief),
        "pignistic" => Ok(DecisionCriterion::MaxPignistic),
        other => Err(PyValueError::new_err(format!(
            "unknown criterion {other:?} (expected belief or pignistic)"
        ))),
    }
}

/// Frame of discernment: ordered exclusive type labels.
#[pyclass(name = "Frame", frozen, from_py_object)]
#[derive(Clone)]
struct PyFrame {
    inner: CoreFrame,
}

#[pymethods]
impl PyFrame {
    #[new]
    fn new(labels: Vec<String>) -> PyResult<Self> {
        Ok(PyFrame {
            inner: CoreFrame::new(labels).map_err(py_err)?,
        })
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn size(&self) -> usize {
        self.inner.size()
    }

    /// All hyper-power-set elements rendered in the "|"/"&" grammar.
    fn hyper_power_set(&self) -> PyResult<Vec<String>> {
        Ok(enumerate_hyper_power_set(&self.inner)
            .map_err(py_err)?
            .iter()
            .map(|h| h.to_string())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Frame({:?})", self.inner.labels())
    }
}

/// Basic belief assignment over a frame's power set.
#[pyclass(name = "Bba", frozen, from_py_object)]
#[derive(Clone)]
struct PyBba {
    inner: CoreBba,
}

#[pymethods]
impl PyBba {
    /// Build from `{proposition: mass}`, propositions in the "|" grammar.
    #[new]
    fn new(frame: &PyFrame, masses: Vec<(String, f64)>) -> PyResult<Self> {
        let assignments = masses
            .into_iter()
            .map(|(text, mass)| {
                frame
                    .inner
                    .parse_proposition(&text)
                    .map(|prop| (prop, mass))
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(py_err)?;
        Ok(PyBba {
            inner: CoreBba::new(&frame.inner, assignments).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn vacuous(frame: &PyFrame) -> Self {
        PyBba {
            inner: CoreBba::vacuous(&frame.inner),
        }
    }

    fn masses(&self) -> Vec<(String, f64)> {
        self.inner
            .focal()
            .map(|(p, m)| (p.to_string(), m))
            .collect()
    }

    fn mass(&self, proposition: &str) -> PyResult<f64> {
        let prop = self
            .inner
            .frame()
            .parse_proposition(proposition)
            .map_err(py_err)?;
        Ok(self.inner.mass(&prop))
    }

    fn belief(&self, proposition: &str) -> PyResult<f64> {
        let prop = self
            .inner
            .frame()
            .parse_proposition(proposition)
            .map_err(py_err)?;
        self.inner.belief(&prop).map_err(py_err)
    }

    fn plausibility(&self, proposition: &str) -> PyResult<f64> {
        let prop = self
            .inner
            .frame()
            .parse_proposition(proposition)
            .map_err(py_err)?;
        self.inner.plausibility(&prop).map_err(py_err)
    }

    fn pignistic(&self) -> Vec<f64> {
        self.inner.pignistic()
    }

    fn discount(&self, alpha: f64) -> PyResult<Self> {
        Ok(PyBba {
            inner: self.inner.discount(alpha).map_err(py_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Bba({})", self.inner)
    }
}

#[pyfunction]
fn dempster(m1: &PyBba, m2: &PyBba) -> PyResult<PyBba> {
    Ok(PyBba {
        inner: fusion::dempster(&m1.inner, &m2.inner).map_err(py_err)?,
    })
}

#[pyfunction]
fn pcr5(m1: &PyBba, m2: &PyBba) -> PyResult<PyBba> {
    Ok(PyBba {
        inner: fusion::pcr5(&m1.inner, &m2.inner).map_err(py_err)?,
    })
}

#[pyfunction]
fn total_conflict(m1: &PyBba, m2: &PyBba) -> PyResult<f64> {
    fusion::total_conflict(&m1.inner, &m2.inner).map_err(py_err)
}

/// Sequential target type tracker fed one declaration per scan.
#[pyclass(name = "Tracker")]
struct PyTracker {
    state: TrackerState,
    cm: ConfusionMatrix,
}

#[pymethods]
impl PyTracker {
    #[new]
    #[pyo3(signature = (frame, matrix, rule, criterion = "belief"))]
    fn new(
        frame: &PyFrame,
        matrix: Vec<Vec<f64>>,
        rule: &str,
        criterion: &str,
    ) -> PyResult<Self> {
        let rule: FusionRule = rule.parse().map_err(py_err)?;
        let criterion = parse_criterion(criterion)?;
        let cm = ConfusionMatrix::new(&frame.inner, matrix).map_err(py_err)?;
        Ok(PyTracker {
            state: TrackerState::new(&frame.inner, rule, criterion),
            cm,
        })
    }

    /// Fuse the next declared type index; returns (decision, posterior).
    fn step(&mut self, declared: usize) -> PyResult<(usize, PyBba)> {
        let decl = Declaration {
            scan: self.state.scan() + 1,
            declared,
        };
        let out = self.state.step(decl, &self.cm).map_err(py_err)?;
        self.state = out.state;
        Ok((out.decision, PyBba {
            inner: out.posterior,
        }))
    }

    #[getter]
    fn scan(&self) -> usize {
        self.state.scan()
    }

    #[getter]
    fn last_decision(&self) -> Option<usize> {
        self.state.last_decision()
    }
}

/// Seeded Monte-Carlo comparison; returns a per-rule summary dict.
#[pyfunction]
#[pyo3(signature = (labels, matrix, segments, runs = 1000, seed = 1, rules = None, criterion = "belief"))]
fn monte_carlo<'py>(
    py: Python<'py>,
    labels: Vec<String>,
    matrix: Vec<Vec<f64>>,
    segments: Vec<(String, usize)>,
    runs: usize,
    seed: u64,
    rules: Option<Vec<String>>,
    criterion: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let frame = CoreFrame::new(labels).map_err(py_err)?;
    let cm = ConfusionMatrix::new(&frame, matrix).map_err(py_err)?;
    let segments = segments
        .into_iter()
        .map(|(label, duration)| {
            frame
                .index_of(&label)
                .map(|i| (i, duration))
                .ok_or_else(|| PyValueError::new_err(format!("unknown label {label:?}")))
        })
        .collect::<PyResult<Vec<_>>>()?;
    let scenario = Scenario::new(&frame, segments).map_err(py_err)?;
    let rules: Vec<FusionRule> = match rules {
        None => FusionRule::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|n| n.parse().map_err(py_err))
            .collect::<PyResult<_>>()?,
    };
    let criterion = parse_criterion(criterion)?;
    let summary =
        run_monte_carlo(&scenario, &cm, &rules, criterion, runs, seed).map_err(py_err)?;

    let out = PyDict::new(py);
    out.set_item("n_runs", summary.n_runs)?;
    out.set_item("generator", summary.generator)?;
    out.set_item("truth", &summary.truth)?;
    let switches: Vec<(usize, usize, usize)> = summary
        .switches
        .iter()
        .map(|s| (s.scan, s.new_type, s.window))
        .collect();
    out.set_item("switches", switches)?;
    for rs in &summary.rules {
        let entry = PyDict::new(py);
        entry.set_item("completed_runs", rs.completed_runs)?;
        entry.set_item("failures", rs.failures)?;
        entry.set_item("mean_singleton_masses", &rs.mean_singleton_masses)?;
        entry.set_item("mean_ignorance", &rs.mean_ignorance)?;
        entry.set_item("accuracy", &rs.accuracy)?;
        let latency: Vec<(Option<f64>, Option<f64>, f64)> = rs
            .switch_latency
            .iter()
            .map(|l| (l.mean, l.median, l.censor_rate))
            .collect();
        entry.set_item("switch_latency", latency)?;
        out.set_item(rs.rule.name(), entry)?;
    }
    Ok(out)
}

/// Run the full experiment and write summary.csv/latency.csv/meta.txt/plot.gp.
#[pyfunction]
#[pyo3(signature = (out, classifier = "c1", runs = 1000, seed = 1))]
fn run_default_experiment(out: &str, classifier: &str, runs: usize, seed: u64) -> PyResult<()> {
    let mut config = ExperimentConfig::default();
    config.set_classifier(classifier).map_err(py_err)?;
    config.runs = runs;
    config.seed = seed;
    config.out = out.to_string();
    run_experiment(&config).map_err(py_err)?;
    Ok(())
}

#[pymodule]
fn belief_fusion_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFrame>()?;
    m.add_class::<PyBba>()?;
    m.add_class::<PyTracker>()?;
    m.add_function(wrap_pyfunction!(dempster, m)?)?;
    m.add_function(wrap_pyfunction!(pcr5, m)?)?;
    m.add_function(wrap_pyfunction!(total_conflict, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(run_default_experiment, m)?)?;
    Ok(())
}
