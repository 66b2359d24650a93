use std::path::PathBuf;

use clap::ValueEnum;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use lab::cli::{compute as run_compute, Op, Opts};
use lab::theorems::{self, reports_to_json, Params};

fn err(e: lab::Error) -> PyErr {
    match e {
        lab::Error::Parse(_) | lab::Error::UnknownTheorem { .. } | lab::Error::NotPrimePower(_) => {
            PyValueError::new_err(e.to_string())
        }
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

#[allow(clippy::too_many_arguments)]
fn params(p: u64, d: usize, trials: usize, seed: u64, k_max: usize, n: usize, w: usize, l: usize) -> PyResult<Params> {
    let params = Params {
        p,
        d,
        trials,
        seed,
        k_max,
        n,
        w,
        l,
    };
    params.check().map_err(err)?;
    Ok(params)
}

#[pyfunction]
fn theorem_ids() -> Vec<&'static str> {
    theorems::THEOREM_IDS.to_vec()
}

/// Runs one verifier and returns its JSON report.
#[pyfunction]
#[pyo3(signature = (id, p=2, d=3, trials=50, seed=0, k_max=12, n=12, w=2, l=2, negative=false))]
#[allow(clippy::too_many_arguments)]
fn verify(
    py: Python<'_>,
    id: &str,
    p: u64,
    d: usize,
    trials: usize,
    seed: u64,
    k_max: usize,
    n: usize,
    w: usize,
    l: usize,
    negative: bool,
) -> PyResult<String> {
    let params = params(p, d, trials, seed, k_max, n, w, l)?;
    let report = py.detach(|| {
        if negative {
            theorems::negative_control(id, &params)
        } else {
            theorems::verify(id, &params)
        }
    });
    Ok(report.map_err(err)?.to_json())
}

/// All verifiers; JSON array of reports ordered by theorem id.
#[pyfunction]
#[pyo3(signature = (p=2, d=3, trials=50, seed=0, k_max=12, n=12, w=2, l=2, jobs=0, negative=false))]
#[allow(clippy::too_many_arguments)]
fn run_suite(
    py: Python<'_>,
    p: u64,
    d: usize,
    trials: usize,
    seed: u64,
    k_max: usize,
    n: usize,
    w: usize,
    l: usize,
    jobs: usize,
    negative: bool,
) -> PyResult<String> {
    let params = params(p, d, trials, seed, k_max, n, w, l)?;
    let reports = py.detach(|| {
        if negative {
            theorems::run_negative_controls(&params, jobs)
        } else {
            theorems::run_suite(&params, jobs)
        }
    });
    Ok(reports_to_json(&reports.map_err(err)?))
}

/// Same as `duality-lab compute <op>`; returns the JSON document.
#[pyfunction]
#[pyo3(signature = (op, module, seq=None, q=None, k=0, k_max=12, w=2, l=2))]
#[allow(clippy::too_many_arguments)]
fn compute(
    op: &str,
    module: PathBuf,
    seq: Option<String>,
    q: Option<i64>,
    k: u32,
    k_max: usize,
    w: usize,
    l: usize,
) -> PyResult<String> {
    let op = Op::from_str(op, true).map_err(PyValueError::new_err)?;
    let opts = Opts {
        p: 2,
        d: 3,
        trials: 0,
        seed: 0,
        k_max,
        n: 12,
        w,
        l,
        jobs: 0,
        out: None,
        seq,
        module: Some(module),
        q,
        k,
    };
    Ok(run_compute(op, &opts).map_err(err)?.json)
}

#[pymodule]
fn duality_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(theorem_ids, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(compute, m)?)?;
    Ok(())
}
