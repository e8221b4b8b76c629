//! Python bindings for the evoder library.
//!
//! Matrices cross the boundary as JSON strings in the same format the CLI
//! uses: `{"n": 2, "entries": [["1", "0"], ["0", "1"]]}` with exact scalar
//! strings. Each function returns a JSON string; malformed input raises
//! `ValueError`.

// The #[pyfunction] macro expands to code that converts `PyErr` into
// `PyErr`, which trips this lint inside generated code.
#![allow(clippy::useless_conversion)]

use evoder::io::{analyze_algebra, family_to_json, Analysis};
use evoder::{
    algebra_to_file, emit_closed_forms, gen_instance, parse_matrix_file, verify_closed_forms,
    EvoderError, EvolutionAlgebra, GenCase, GENERATOR_ID,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: EvoderError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse(matrix_json: &str) -> PyResult<EvolutionAlgebra> {
    parse_matrix_file(matrix_json).map_err(err)
}

fn analysis_json(e: &EvolutionAlgebra, level: Analysis) -> PyResult<String> {
    let report = analyze_algebra("<python>", None, e, level);
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Rank of the structure matrix in a matrix-JSON string.
#[pyfunction]
fn rank(matrix_json: &str) -> PyResult<usize> {
    Ok(parse(matrix_json)?.rank())
}

/// Full derivation-space report (dimension and exact basis) as JSON.
#[pyfunction]
fn derivations(matrix_json: &str) -> PyResult<String> {
    analysis_json(&parse(matrix_json)?, Analysis::Derivations)
}

/// Canonical-form classification report as JSON.
#[pyfunction]
fn classify(matrix_json: &str) -> PyResult<String> {
    analysis_json(&parse(matrix_json)?, Analysis::Classify)
}

/// Classification, closed-form emission, and dual-route verification as
/// JSON.
#[pyfunction]
fn verify(matrix_json: &str) -> PyResult<String> {
    analysis_json(&parse(matrix_json)?, Analysis::Verify)
}

/// Closed-form generators for an already-classified matrix as JSON.
#[pyfunction]
fn closed_forms(matrix_json: &str) -> PyResult<String> {
    let e = parse(matrix_json)?;
    let res = evoder::classify(&e).map_err(err)?;
    let fam = emit_closed_forms(&res, &e).map_err(err)?;
    serde_json::to_string(&family_to_json(&fam)).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Dual-route verification verdict for a matrix: true when the emitted
/// family exactly spans the solver's nullspace.
#[pyfunction]
fn closed_forms_span(matrix_json: &str) -> PyResult<bool> {
    let e = parse(matrix_json)?;
    let res = evoder::classify(&e).map_err(err)?;
    let fam = emit_closed_forms(&res, &e).map_err(err)?;
    let space = evoder::derivations(&e);
    let report = verify_closed_forms(&e, &fam, &space).map_err(err)?;
    Ok(report.span_matches)
}

/// Deterministically generates an instance of a named case, returning
/// matrix JSON with provenance fields.
#[pyfunction]
#[pyo3(signature = (case, n, seed, k=None))]
fn gen(case: &str, n: usize, seed: u64, k: Option<usize>) -> PyResult<String> {
    let case = GenCase::parse(case).map_err(err)?;
    let e = gen_instance(case, n, seed, k).map_err(err)?;
    let out = evoder::GenOutput {
        n: e.dim(),
        entries: algebra_to_file(&e).entries,
        generator: GENERATOR_ID.to_string(),
        case: case.as_str().to_string(),
        seed,
        k,
    };
    serde_json::to_string(&out).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Checks whether a candidate matrix (matrix JSON, rows = images of basis
/// vectors) is a derivation of the given algebra.
#[pyfunction]
fn is_derivation(matrix_json: &str, candidate_json: &str) -> PyResult<bool> {
    let e = parse(matrix_json)?;
    let d = parse(candidate_json)?;
    if d.dim() != e.dim() {
        return Err(PyValueError::new_err(format!(
            "candidate is {}×{} but the algebra has dimension {}",
            d.dim(),
            d.dim(),
            e.dim()
        )));
    }
    e.is_derivation(d.structure()).map_err(err)
}

#[pymodule]
fn evoder_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(derivations, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(closed_forms, m)?)?;
    m.add_function(wrap_pyfunction!(closed_forms_span, m)?)?;
    m.add_function(wrap_pyfunction!(gen, m)?)?;
    m.add_function(wrap_pyfunction!(is_derivation, m)?)?;
    m.add("GENERATOR_ID", GENERATOR_ID)?;
    Ok(())
}
