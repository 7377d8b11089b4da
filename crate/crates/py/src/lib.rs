//! Python bindings: `import chabauty_lab`.

use chabauty_lab::chabauty::{self, Distance};
use chabauty_lab::dynamics::{self, TransitivityTask};
use chabauty_lab::schreier::{self, SchreierGraph};
use chabauty_lab::zd;
use chabauty_lab::{Budget, Error, GroupContext, HnfSubgroup, Index, StallingsGraph, SubgroupSpec, Word};
use num_rational::Ratio;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(chabauty_lab, BudgetExceeded, PyRuntimeError, "A search or enumeration limit was reached.");
create_exception!(chabauty_lab, NoWitness, PyValueError, "The requested witness provably does not exist.");

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Budget { .. } => BudgetExceeded::new_err(e.to_string()),
        Error::NoWitness(_) => NoWitness::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse(word: &str) -> PyResult<Word> {
    word.parse().map_err(py_err)
}

fn budget() -> PyResult<Budget> {
    Budget::from_env().map_err(py_err)
}

fn index_value(i: Index) -> Option<u64> {
    match i {
        Index::Finite(n) => Some(n),
        Index::Infinite => None,
    }
}

fn distance_pair(d: Distance) -> (&'static str, usize) {
    match d {
        Distance::Exact(e) => ("exact", e),
        Distance::AtMost(e) => ("at_most", e),
    }
}

/// A finitely generated subgroup of the free group F_r.
#[pyclass(name = "FreeSubgroup", module = "chabauty_lab", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyFreeSubgroup(StallingsGraph);

#[pymethods]
impl PyFreeSubgroup {
    #[new]
    fn new(rank: usize, generators: Vec<String>) -> PyResult<Self> {
        let gens = generators.iter().map(|g| parse(g)).collect::<PyResult<Vec<_>>>()?;
        let ctx = GroupContext::free(rank).map_err(py_err)?;
        Ok(PyFreeSubgroup(StallingsGraph::from_generators(ctx, &gens).map_err(py_err)?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match SubgroupSpec::parse(text).map_err(py_err)? {
            SubgroupSpec::Free(g) => Ok(PyFreeSubgroup(g)),
            _ => Err(PyValueError::new_err("expected a free subgroup spec")),
        }
    }

    fn to_json(&self) -> String {
        SubgroupSpec::Free(self.0.clone()).to_json().to_string()
    }

    #[getter]
    fn ambient_rank(&self) -> usize {
        self.0.ambient_rank()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    /// `None` for infinite index.
    fn index(&self) -> Option<u64> {
        index_value(self.0.index())
    }

    fn vertex_count(&self) -> usize {
        self.0.vertex_count()
    }

    fn generators(&self) -> Vec<String> {
        self.0.generators().iter().map(Word::to_string).collect()
    }

    fn contains(&self, word: &str) -> PyResult<bool> {
        self.0.checked_contains(&parse(word)?).map_err(py_err)
    }

    fn __contains__(&self, word: &str) -> PyResult<bool> {
        self.contains(word)
    }

    fn join(&self, other: &PyFreeSubgroup) -> Self {
        PyFreeSubgroup(self.0.join(&other.0))
    }

    fn intersect(&self, other: &PyFreeSubgroup) -> PyResult<Self> {
        Ok(PyFreeSubgroup(self.0.intersect_with_budget(&other.0, &budget()?).map_err(py_err)?))
    }

    /// `gHg⁻¹`.
    fn conjugate(&self, g: &str) -> PyResult<Self> {
        Ok(PyFreeSubgroup(self.0.conjugate_subgroup(&parse(g)?)))
    }

    /// A finite-index subgroup containing this one and agreeing with it on
    /// the ball of the given radius.
    fn hall_completion(&self, radius: usize) -> PyResult<Self> {
        Ok(PyFreeSubgroup(self.0.hall_completion(radius, &budget()?).map_err(py_err)?))
    }

    fn normal_core(&self) -> PyResult<Self> {
        Ok(PyFreeSubgroup(self.0.normal_core(&budget()?).map_err(py_err)?))
    }

    fn shortest_nontrivial(&self) -> Option<String> {
        self.0.shortest_nontrivial_element().map(|w| w.to_string())
    }

    /// A shortest word in exactly one of the two subgroups.
    fn first_difference(&self, other: &PyFreeSubgroup) -> Option<String> {
        self.0.first_difference(&other.0).map(|w| w.to_string())
    }

    fn to_dot(&self) -> String {
        self.0.to_dot()
    }

    fn __repr__(&self) -> String {
        format!("FreeSubgroup({}, {:?})", self.0.ambient_rank(), self.generators())
    }
}

/// A subgroup of Z^d in Hermite normal form.
#[pyclass(name = "Lattice", module = "chabauty_lab", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyLattice(HnfSubgroup);

#[pymethods]
impl PyLattice {
    #[new]
    fn new(dim: usize, generators: Vec<Vec<i64>>) -> PyResult<Self> {
        Ok(PyLattice(HnfSubgroup::from_generators(dim, &generators).map_err(py_err)?))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn basis(&self) -> Vec<Vec<i64>> {
        self.0.basis().to_vec()
    }

    fn index(&self) -> Option<u64> {
        index_value(self.0.index())
    }

    fn contains(&self, v: Vec<i64>) -> PyResult<bool> {
        self.0.membership(&v).map_err(py_err)
    }

    fn cb_erasing_rank(&self) -> usize {
        self.0.cb_erasing_rank()
    }

    /// Depth of the witness chain built at `radius`; raises when some level
    /// does not certify.
    fn witness_chain_depth(&self, depth: usize, radius: usize) -> PyResult<usize> {
        Ok(self.0.witness_chain(depth, radius, &budget()?).map_err(py_err)?.depth())
    }

    fn __repr__(&self) -> String {
        format!("Lattice({}, {:?})", self.0.dim(), self.0.basis())
    }
}

#[pyfunction]
fn reduce_word(word: &str) -> PyResult<String> {
    Ok(parse(word)?.to_string())
}

#[pyfunction]
fn multiply(u: &str, v: &str) -> PyResult<String> {
    Ok((&parse(u)? * &parse(v)?).to_string())
}

#[pyfunction]
fn inverse(u: &str) -> PyResult<String> {
    Ok(parse(u)?.inverse().to_string())
}

/// `(kind, exponent)` with kind `"exact"` or `"at_most"`: the distance is
/// `2^-exponent`.
#[pyfunction]
fn distance(h: &PyFreeSubgroup, k: &PyFreeSubgroup, radius: usize) -> PyResult<(&'static str, usize)> {
    Ok(distance_pair(chabauty::distance_up_to(&h.0, &k.0, radius, &budget()?).map_err(py_err)?))
}

#[pyfunction]
fn lattice_distance(h: &PyLattice, k: &PyLattice, radius: usize) -> PyResult<(&'static str, usize)> {
    Ok(distance_pair(chabauty::distance_up_to(&h.0, &k.0, radius, &budget()?).map_err(py_err)?))
}

/// Subgroups `H_1, …, H_L` with `H_n ≠ H` agreeing with `H` on `B(n)`.
#[pyfunction]
fn nonisolation_witness(h: &PyFreeSubgroup, radius: usize) -> PyResult<Vec<PyFreeSubgroup>> {
    let steps = dynamics::nonisolation_witness(&h.0, radius, &budget()?).map_err(py_err)?;
    Ok(steps.into_iter().map(|s| PyFreeSubgroup(s.subgroup)).collect())
}

/// Runs the common-conjugator search on a task given as JSON. Returns the
/// exit code (0 certificate, 3 exhausted, 4 obstruction) and the outcome as
/// JSON.
#[pyfunction]
fn transitivity_move(task_json: &str) -> PyResult<(i32, String)> {
    let task: TransitivityTask = serde_json::from_str(task_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let outcome = dynamics::multi_transitivity_move(&task, &budget()?).map_err(py_err)?;
    let text = serde_json::to_string(&outcome).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((outcome.exit_code(), text))
}

#[pyfunction]
fn enumerate_by_index(dim: usize, max_index: u64) -> PyResult<Vec<PyLattice>> {
    Ok(zd::enumerate_by_index(dim, max_index).map_err(py_err)?.into_iter().map(PyLattice).collect())
}

/// The Følner demo report as JSON.
#[pyfunction]
fn folner_demo(i: u64) -> PyResult<String> {
    let report = dynamics::folner_demo(i, &budget()?).map_err(py_err)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Ends of the Schreier graph of a subgroup spec (JSON) seen from the ball of
/// radius `radius` with the inner ball of radius `cut` removed.
#[pyfunction]
fn schreier_ends(spec_json: &str, radius: usize, cut: usize) -> PyResult<usize> {
    let h = SubgroupSpec::parse(spec_json).and_then(SubgroupSpec::into_free).map_err(py_err)?;
    let graph = SchreierGraph::build(&h, radius, &budget()?).map_err(py_err)?;
    graph.ends_estimate(cut).map_err(py_err)
}

/// `2^|B(id, d)|` in F_rank, as a Python integer.
#[pyfunction]
fn intermediate_bound(py: Python<'_>, rank: usize, d: usize) -> PyResult<Py<PyAny>> {
    let ctx = GroupContext::free(rank).map_err(py_err)?;
    let bound = schreier::intermediate_bound(ctx, d, &budget()?).map_err(py_err)?;
    let int = py.import("builtins")?.getattr("int")?;
    Ok(int.call1((bound.to_string(),))?.unbind())
}

/// `(C₁, C₂)` as fractions.
#[pyfunction]
fn qi_constants(py: Python<'_>, numerator: i64, denominator: i64) -> PyResult<(Py<PyAny>, Py<PyAny>)> {
    if denominator == 0 {
        return Err(PyValueError::new_err("zero denominator"));
    }
    let (c1, c2) =
        schreier::qi_constants(Ratio::new(i128::from(numerator), i128::from(denominator))).map_err(py_err)?;
    let fraction = py.import("fractions")?.getattr("Fraction")?;
    let make = |r: Ratio<i128>| -> PyResult<Py<PyAny>> { Ok(fraction.call1((*r.numer(), *r.denom()))?.unbind()) };
    Ok((make(c1)?, make(c2)?))
}

#[pymodule]
#[pyo3(name = "chabauty_lab")]
fn chabauty_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFreeSubgroup>()?;
    m.add_class::<PyLattice>()?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    m.add("NoWitness", m.py().get_type::<NoWitness>())?;
    m.add_function(wrap_pyfunction!(reduce_word, m)?)?;
    m.add_function(wrap_pyfunction!(multiply, m)?)?;
    m.add_function(wrap_pyfunction!(inverse, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_distance, m)?)?;
    m.add_function(wrap_pyfunction!(nonisolation_witness, m)?)?;
    m.add_function(wrap_pyfunction!(transitivity_move, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_by_index, m)?)?;
    m.add_function(wrap_pyfunction!(folner_demo, m)?)?;
    m.add_function(wrap_pyfunction!(schreier_ends, m)?)?;
    m.add_function(wrap_pyfunction!(intermediate_bound, m)?)?;
    m.add_function(wrap_pyfunction!(qi_constants, m)?)?;
    Ok(())
}
