//! Python bindings. Structured results cross the boundary as JSON strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ndcolor::format::{ColoringDoc, HypergraphDoc, InstanceDoc};
use ndcolor::hypergraph::Hypergraph;
use ndcolor::lab::{chromatic_number, construct_thm15ii, exact_expectations, random_linear_hypergraph};
use ndcolor::nibble::RoundMode;
use ndcolor::pipeline::{edge_color_hypergraph, run_pipeline, PipelineConfig};
use ndcolor::schedule;
use ndcolor::{Assignment, Mode, UnionInstance};

fn err(e: ndcolor::Error) -> PyErr {
    match e {
        ndcolor::Error::Format(_) | ndcolor::Error::Domain(_) | ndcolor::Error::Invalid(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn load(instance_json: &str, dp: bool) -> PyResult<(UnionInstance, Assignment, Mode)> {
    let doc = InstanceDoc::from_json(instance_json).map_err(err)?;
    let (inst, asg) = doc.build().map_err(err)?;
    if !dp {
        return Ok((inst, asg, Mode::List));
    }
    let asg = match doc.matchings {
        Some(_) => asg,
        None => Assignment::identity_matchings(&inst, asg.lists().to_vec()).map_err(err)?,
    };
    Ok((inst, asg, Mode::Dp))
}

fn config(eps: f64, seed: u64, dp: bool, strict: bool) -> PipelineConfig {
    PipelineConfig {
        eps,
        seed,
        mode: if dp { Mode::Dp } else { Mode::List },
        round_mode: if strict { RoundMode::Strict } else { RoundMode::Practical },
        ..PipelineConfig::default()
    }
}

/// `(1 − p/Λ)^{DC} Λ`
#[pyfunction]
fn keep_value(lam: f64, d: f64, c: usize, p: f64) -> PyResult<f64> {
    schedule::keep_value(lam, d, c, p).map_err(err)
}

#[pyfunction]
fn uncov_value(lam: f64, d: f64, c: usize, p: f64) -> PyResult<f64> {
    schedule::uncov_value(lam, d, c, p).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (d, eps=0.5, c=2, p=None))]
fn schedule_csv(d: f64, eps: f64, c: usize, p: Option<f64>) -> PyResult<String> {
    Ok(schedule::build_schedule(d, eps, c, p).map_err(err)?.to_csv())
}

/// Colors an instance document; returns the run report as JSON with a
/// `coloring` map keyed by vertex id.
#[pyfunction]
#[pyo3(signature = (instance_json, eps=0.5, seed=0, dp=false, strict=false))]
fn color(instance_json: &str, eps: f64, seed: u64, dp: bool, strict: bool) -> PyResult<String> {
    let (inst, asg, _) = load(instance_json, dp)?;
    let run = run_pipeline(&inst, &asg, &config(eps, seed, dp, strict)).map_err(err)?;
    let out = serde_json::json!({
        "verified": run.succeeded(),
        "status": run.status,
        "rounds": run.rounds.len(),
        "coloring": ColoringDoc::new(&inst, &run.coloring).coloring,
    });
    Ok(out.to_string())
}

/// Edge colors of a hypergraph document, in edge order.
#[pyfunction]
#[pyo3(signature = (hypergraph_json, eps=0.5, seed=0))]
fn edge_color(hypergraph_json: &str, eps: f64, seed: u64) -> PyResult<Vec<u32>> {
    let doc: HypergraphDoc = serde_json::from_str(hypergraph_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let h = Hypergraph::from_doc(&doc).map_err(err)?;
    let r = edge_color_hypergraph(&h, &config(eps, seed, false, false)).map_err(err)?;
    if !r.run.succeeded() {
        return Err(PyRuntimeError::new_err(format!("{:?}", r.run.status)));
    }
    Ok(r.colors)
}

#[pyfunction]
#[pyo3(signature = (instance_json, p, dp=false))]
fn exact_csv(instance_json: &str, p: f64, dp: bool) -> PyResult<String> {
    let (inst, asg, mode) = load(instance_json, dp)?;
    Ok(exact_expectations(&inst, &asg, mode, p, ndcolor::lab::exact::DEFAULT_BUDGET).map_err(err)?.to_csv())
}

#[pyfunction]
fn chromatic(instance_json: &str) -> PyResult<usize> {
    let (inst, _, _) = load(instance_json, false)?;
    Ok(chromatic_number(&inst).map_err(err)?.chi)
}

/// Instance document of the three-graph family, lists `{1..colors}`.
#[pyfunction]
#[pyo3(signature = (n, colors=None))]
fn construct_t15ii(n: usize, colors: Option<usize>) -> PyResult<String> {
    let inst = construct_thm15ii(n).map_err(err)?;
    let asg = Assignment::uniform(&inst, 1, colors.unwrap_or(n + 1));
    Ok(InstanceDoc::from_instance(&inst, &asg, false).to_json())
}

#[pyfunction]
#[pyo3(signature = (n, k, d, seed=0))]
fn gen_hypergraph(n: usize, k: usize, d: usize, seed: u64) -> PyResult<String> {
    let g = random_linear_hypergraph(n, k, d, seed).map_err(err)?;
    serde_json::to_string(&g.hypergraph.to_doc()).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn ndcolor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(keep_value, m)?)?;
    m.add_function(wrap_pyfunction!(uncov_value, m)?)?;
    m.add_function(wrap_pyfunction!(schedule_csv, m)?)?;
    m.add_function(wrap_pyfunction!(color, m)?)?;
    m.add_function(wrap_pyfunction!(edge_color, m)?)?;
    m.add_function(wrap_pyfunction!(exact_csv, m)?)?;
    m.add_function(wrap_pyfunction!(chromatic, m)?)?;
    m.add_function(wrap_pyfunction!(construct_t15ii, m)?)?;
    m.add_function(wrap_pyfunction!(gen_hypergraph, m)?)?;
    Ok(())
}
