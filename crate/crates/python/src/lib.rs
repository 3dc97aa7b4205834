use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quiver_poisson::coeff;
use quiver_poisson::contraction::{contract_bivector, ContractionPlan, Side};
use quiver_poisson::leaves::{self, Form, NumericPoint};
use quiver_poisson::necklace::{self, NecklaceElement};
use quiver_poisson::representation::{self, Budget, Coordinates, TraceWeights};
use quiver_poisson::yang_baxter::{self, RMatrix};
use quiver_poisson::{DimensionVector, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "Quiver", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyQuiver {
    inner: Arc<quiver_poisson::Quiver>,
}

#[pymethods]
impl PyQuiver {
    /// Parses the line-based quiver format.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let q = quiver_poisson::Quiver::parse(text).map_err(py_err)?;
        Ok(PyQuiver { inner: Arc::new(q) })
    }

    #[staticmethod]
    fn from_arrows(num_vertices: usize, arrows: Vec<(String, usize, usize)>) -> PyResult<Self> {
        let q = quiver_poisson::Quiver::new(num_vertices, &arrows).map_err(py_err)?;
        Ok(PyQuiver { inner: Arc::new(q) })
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn arrows(&self) -> Vec<(String, usize, usize)> {
        self.inner.arrows().iter().map(|a| (a.name.clone(), a.tail, a.head)).collect()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Quiver({} vertices, {} arrows)", self.inner.num_vertices(), self.inner.num_arrows())
    }
}

#[pyclass(name = "Necklace", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyNecklace {
    inner: NecklaceElement,
}

#[pymethods]
impl PyNecklace {
    /// Parses and normalizes an element expression.
    #[new]
    fn new(quiver: &PyQuiver, expr: &str) -> PyResult<Self> {
        let inner = NecklaceElement::parse(expr, &quiver.inner).map_err(py_err)?;
        Ok(PyNecklace { inner })
    }

    #[getter]
    fn quiver(&self) -> PyQuiver {
        PyQuiver {
            inner: self.inner.quiver().clone(),
        }
    }

    fn terms(&self) -> Vec<(String, String)> {
        let q = self.inner.quiver();
        self.inner
            .sorted_terms()
            .into_iter()
            .map(|(w, c)| (w.display(q), coeff::format(c)))
            .collect()
    }

    fn grades(&self) -> Vec<usize> {
        self.inner.grades()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn bracket(&self, other: &PyNecklace) -> PyResult<PyNecklace> {
        let inner = necklace::schouten(&self.inner, &other.inner).map_err(py_err)?;
        Ok(PyNecklace { inner })
    }

    fn is_poisson(&self) -> PyResult<bool> {
        Ok(necklace::is_poisson(&self.inner).map_err(py_err)?.holds)
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __add__(&self, other: &PyNecklace) -> PyResult<PyNecklace> {
        let inner = self.inner.checked_add(&other.inner).map_err(py_err)?;
        Ok(PyNecklace { inner })
    }

    fn __sub__(&self, other: &PyNecklace) -> PyResult<PyNecklace> {
        let inner = self.inner.checked_add(&-&other.inner).map_err(py_err)?;
        Ok(PyNecklace { inner })
    }

    fn __neg__(&self) -> PyNecklace {
        PyNecklace { inner: -&self.inner }
    }

    fn __eq__(&self, other: &PyNecklace) -> bool {
        self.inner == other.inner
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Necklace({})", self.inner)
    }
}

/// Induced polyvector field on `Rep(Q, dims)`, rendered as text.
#[pyfunction]
#[pyo3(signature = (element, dims, weights=None, budget=representation::DEFAULT_BUDGET))]
fn psi(element: &PyNecklace, dims: Vec<usize>, weights: Option<Vec<String>>, budget: usize) -> PyResult<String> {
    let q = element.inner.quiver().clone();
    let coords = Arc::new(Coordinates::new(q.clone(), DimensionVector::new(dims)).map_err(py_err)?);
    let lambda = match weights {
        Some(w) => TraceWeights::parse(&w.join(",")).map_err(py_err)?,
        None => TraceWeights::ones(q.num_vertices()),
    };
    let field = representation::psi(&element.inner, &coords, &lambda, &mut Budget::new(budget)).map_err(py_err)?;
    Ok(field.display())
}

/// The triangular r-matrix on the m-arrow Kronecker quiver, as
/// `(quiver, r-matrix file text, bivector)`.
#[pyfunction]
fn aguiar(m: usize) -> PyResult<(PyQuiver, String, PyNecklace)> {
    let q = Arc::new(yang_baxter::kronecker(m));
    let r = yang_baxter::aguiar(m, q.clone()).map_err(py_err)?;
    let pi = yang_baxter::rmatrix_to_bivector(&r);
    Ok((PyQuiver { inner: q }, r.to_file(), PyNecklace { inner: pi }))
}

#[pyfunction]
fn ayb_check(quiver: &PyQuiver, r_text: &str) -> PyResult<bool> {
    let r = RMatrix::parse(r_text, quiver.inner.clone()).map_err(py_err)?;
    Ok(yang_baxter::ayb_check(&r).holds)
}

#[pyfunction]
#[pyo3(signature = (element, arrow, side="tail"))]
fn contract(element: &PyNecklace, arrow: &str, side: &str) -> PyResult<(PyQuiver, PyNecklace)> {
    let side: Side = side.parse().map_err(py_err)?;
    let plan = ContractionPlan::single(element.inner.quiver(), arrow, side).map_err(py_err)?;
    let (q, pi) = contract_bivector(&element.inner, &plan).map_err(py_err)?;
    Ok((PyQuiver { inner: q }, PyNecklace { inner: pi }))
}

#[pyfunction]
#[pyo3(signature = (element, arrows, eps=None))]
fn contract_multi(element: &PyNecklace, arrows: Vec<String>, eps: Option<Vec<String>>) -> PyResult<(PyQuiver, PyNecklace)> {
    let names: Vec<&str> = arrows.iter().map(String::as_str).collect();
    let eps = eps
        .map(|v| {
            v.iter()
                .map(|s| coeff::parse(s).ok_or_else(|| PyValueError::new_err(format!("malformed rational `{s}`"))))
                .collect::<PyResult<Vec<_>>>()
        })
        .transpose()?;
    let plan = ContractionPlan::multi(element.inner.quiver(), &names, eps).map_err(py_err)?;
    let (q, pi) = contract_bivector(&element.inner, &plan).map_err(py_err)?;
    Ok((PyQuiver { inner: q }, PyNecklace { inner: pi }))
}

/// Largest residual and matched sign of a two-form against its bracket
/// over seeded random points.
#[pyfunction]
#[pyo3(signature = (form, k=2, samples=10, seed=0))]
fn symplectic_check(form: &str, k: usize, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
    let form: Form = form.parse().map_err(py_err)?;
    let q = leaves::two_loops();
    let pi = match form {
        Form::I => NecklaceElement::parse(leaves::LINEAR_BRACKET, &q),
        Form::II => NecklaceElement::parse(leaves::CUBIC_BRACKET, &q),
        Form::Inverse => NecklaceElement::parse(leaves::QUADRATIC_BRACKET, &q),
        Form::Bb(_) => Ok(leaves::deformed_bracket(&coeff::one())),
    }
    .map_err(py_err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst, mut sign) = (0.0f64, 0.0);
    for _ in 0..samples {
        let p = NumericPoint::sample(k, 2, &mut rng, |p| form.regular(p));
        let r = leaves::symplectic_check(form, &pi, &p).map_err(py_err)?;
        worst = worst.max(r.residual);
        sign = r.sign;
    }
    Ok((worst, sign))
}

/// Runs the command line with the given arguments: `(exit code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let out = quiver_poisson::cli::run(std::iter::once("qpoisson".to_string()).chain(args));
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn quiver_poisson_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQuiver>()?;
    m.add_class::<PyNecklace>()?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(aguiar, m)?)?;
    m.add_function(wrap_pyfunction!(ayb_check, m)?)?;
    m.add_function(wrap_pyfunction!(contract, m)?)?;
    m.add_function(wrap_pyfunction!(contract_multi, m)?)?;
    m.add_function(wrap_pyfunction!(symplectic_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
