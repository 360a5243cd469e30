//! Python bindings. Verdicts cross the boundary as JSON documents.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use cayley_lattice::classify::{self as engine, Verdict};
use cayley_lattice::cohomology;
use cayley_lattice::constructions::j_gamma;
use cayley_lattice::glattice::{close_group, permutation_matrix};
use cayley_lattice::json::{from_document, to_document};
use cayley_lattice::rootdata::DynkinType;
use cayley_lattice::{Error, Int, IntMatrix, DEFAULT_MAX_GROUP_ORDER};

fn err(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } | Error::GroupTooLarge { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn types(names: &[String]) -> PyResult<Vec<DynkinType>> {
    names
        .iter()
        .map(|n| n.parse::<DynkinType>().map_err(err))
        .collect()
}

/// Classifies `factors` (e.g. `["A1", "A1"]`) with the subgroup of the
/// centre generated by `subgroup`; returns the verdict document.
#[pyfunction]
#[pyo3(signature = (factors, subgroup = Vec::new()))]
fn classify(factors: Vec<String>, subgroup: Vec<Vec<i64>>) -> PyResult<String> {
    let v = engine::classify(&types(&factors)?, &subgroup).map_err(err)?;
    to_document(&v).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (factors, subgroup = Vec::new()))]
fn is_quasi_permutation(factors: Vec<String>, subgroup: Vec<Vec<i64>>) -> PyResult<bool> {
    Ok(engine::classify(&types(&factors)?, &subgroup)
        .map_err(err)?
        .is_quasi_permutation())
}

/// Re-checks a verdict document from scratch.
#[pyfunction]
fn verify(document: &str) -> PyResult<bool> {
    let v: Verdict = from_document(document).map_err(err)?;
    Ok(engine::verify_certificate(&v).ok)
}

/// Invariant factors of Ш² for J_Γ with Γ = (Z/p)^m.
#[pyfunction]
fn sha2_jgamma(p: usize, m: usize) -> PyResult<Vec<Int>> {
    if p < 2 || m == 0 {
        return Err(PyValueError::new_err("need p >= 2 and m >= 1"));
    }
    let gens: Vec<IntMatrix> = (0..m)
        .map(|k| {
            permutation_matrix(
                &(0..p * m)
                    .map(|i| {
                        if i / p == k {
                            k * p + (i % p + 1) % p
                        } else {
                            i
                        }
                    })
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let g = Arc::new(close_group(&gens, DEFAULT_MAX_GROUP_ORDER).map_err(err)?);
    Ok(cohomology::sha2(&g, &j_gamma(g.clone()))
        .map_err(err)?
        .factors)
}

#[pymodule]
fn cayley_lattice_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(is_quasi_permutation, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(sha2_jgamma, m)?)?;
    Ok(())
}
