//! Python bindings: subspaces, families, the metric, counting formulas,
//! constructions, and the maximum-family search.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::time::Duration;

use num_bigint::BigInt;
use pyo3::basic::CompareOp;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use qiso::counting::{self, Regime};
use qiso::gf::FieldSpec;
use qiso::matching::{build_gk, perfect_matching as hk_matching};
use qiso::metric;
use qiso::search::{self, Mode, SearchConfig};
use qiso::subspace::{self as sub, DEFAULT_CAP};

fn err(e: qiso::Error) -> PyErr {
    match e {
        qiso::Error::DiameterViolation { .. } | qiso::Error::Checkpoint(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn field(q: u32) -> PyResult<FieldSpec> {
    FieldSpec::new(q).map_err(err)
}

fn fraction<'py>(py: Python<'py>, r: &num_rational::BigRational) -> PyResult<Bound<'py, PyAny>> {
    let num: BigInt = r.numer().clone();
    let den: BigInt = r.denom().clone();
    py.import("fractions")?.getattr("Fraction")?.call1((num, den))
}

/// A subspace of GF(q)^n in reduced row echelon form.
#[pyclass(name = "Subspace", module = "pyqiso", frozen, from_py_object)]
#[derive(Clone)]
struct PySubspace {
    spec: FieldSpec,
    inner: sub::Subspace,
}

impl PySubspace {
    fn wrap(spec: &FieldSpec, inner: sub::Subspace) -> Self {
        PySubspace {
            spec: spec.clone(),
            inner,
        }
    }

    fn same_space(&self, other: &PySubspace) -> PyResult<()> {
        if self.spec.q() != other.spec.q() || self.inner.ambient() != other.inner.ambient() {
            return Err(PyValueError::new_err("subspaces live in different spaces"));
        }
        Ok(())
    }
}

#[pymethods]
impl PySubspace {
    /// Span of the given rows (lists of field element indices or digit strings).
    #[staticmethod]
    fn span(q: u32, n: usize, rows: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let spec = field(q)?;
        let mut vs = Vec::with_capacity(rows.len());
        for r in rows {
            let v = if let Ok(text) = r.extract::<String>() {
                sub::Vector::parse(&spec, &text).map_err(err)?
            } else {
                let digits: Vec<u8> = r.extract()?;
                if digits.iter().any(|&d| d as u32 >= q) {
                    return Err(PyValueError::new_err(format!("entries must be below {q}")));
                }
                sub::Vector::from_indices(&digits)
            };
            vs.push(v);
        }
        let s = sub::Subspace::span(&spec, n, &vs).map_err(err)?;
        Ok(Self::wrap(&spec, s))
    }

    /// Parses the one-line form, e.g. "100;011".
    #[staticmethod]
    fn parse(q: u32, n: usize, line: &str) -> PyResult<Self> {
        let spec = field(q)?;
        let s = sub::Subspace::parse_line(&spec, n, line).map_err(err)?;
        Ok(Self::wrap(&spec, s))
    }

    #[getter]
    fn q(&self) -> u8 {
        self.spec.q()
    }

    #[getter]
    fn ambient(&self) -> usize {
        self.inner.ambient()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn pivots(&self) -> Vec<usize> {
        self.inner.pivots()
    }

    /// RREF basis rows as lists of element indices.
    fn basis(&self) -> Vec<Vec<u8>> {
        self.inner
            .basis()
            .iter()
            .map(|v| v.coords().iter().map(|c| c.index()).collect())
            .collect()
    }

    fn perp(&self) -> PyResult<Self> {
        Ok(Self::wrap(&self.spec, self.inner.perp(&self.spec).map_err(err)?))
    }

    fn sum(&self, other: &PySubspace) -> PyResult<Self> {
        self.same_space(other)?;
        Ok(Self::wrap(&self.spec, self.inner.sum(&self.spec, &other.inner).map_err(err)?))
    }

    fn intersect(&self, other: &PySubspace) -> PyResult<Self> {
        self.same_space(other)?;
        Ok(Self::wrap(&self.spec, self.inner.intersect(&self.spec, &other.inner).map_err(err)?))
    }

    fn contains(&self, other: &PySubspace) -> PyResult<bool> {
        self.same_space(other)?;
        self.inner.contains_subspace(&self.spec, &other.inner).map_err(err)
    }

    fn to_line(&self) -> String {
        self.inner.to_line()
    }

    fn __str__(&self) -> String {
        self.inner.to_line()
    }

    fn __repr__(&self) -> String {
        format!("Subspace(q={}, n={}, \"{}\")", self.spec.q(), self.inner.ambient(), self.inner.to_line())
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.inner.hash(&mut h);
        h.finish()
    }

    fn __richcmp__(&self, other: &Bound<'_, PyAny>, op: CompareOp) -> PyResult<Py<PyAny>> {
        let py = other.py();
        let Ok(other) = other.cast::<PySubspace>() else {
            return Ok(py.NotImplemented());
        };
        let ord = self.inner.cmp(&other.get().inner);
        Ok(op.matches(ord).into_pyobject(py)?.to_owned().into_any().unbind())
    }
}

/// A set of subspaces of one ambient space.
#[pyclass(name = "Family", module = "pyqiso", frozen, from_py_object)]
#[derive(Clone)]
struct PyFamily {
    spec: FieldSpec,
    inner: sub::Family,
}

#[pymethods]
impl PyFamily {
    #[new]
    fn new(q: u32, n: usize, members: Vec<PySubspace>) -> PyResult<Self> {
        let spec = field(q)?;
        let fam = sub::Family::from_members(&spec, n, members.into_iter().map(|m| m.inner)).map_err(err)?;
        Ok(PyFamily { spec, inner: fam })
    }

    /// Parses a family file ("q n" header, one member per line).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let (spec, inner) = sub::parse_family(text).map_err(err)?;
        Ok(PyFamily { spec, inner })
    }

    #[getter]
    fn q(&self) -> u8 {
        self.spec.q()
    }

    #[getter]
    fn ambient(&self) -> usize {
        self.inner.ambient()
    }

    fn members(&self) -> Vec<PySubspace> {
        self.inner.iter().map(|s| PySubspace::wrap(&self.spec, s.clone())).collect()
    }

    fn slice_sizes(&self) -> std::collections::BTreeMap<usize, usize> {
        self.inner.slice_sizes()
    }

    fn diameter(&self) -> usize {
        metric::diameter(&self.spec, &self.inner)
    }

    fn to_file_string(&self) -> String {
        self.inner.to_file_string()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, s: &PySubspace) -> bool {
        self.inner.contains(&s.inner)
    }

    fn __repr__(&self) -> String {
        format!("Family(q={}, n={}, size={})", self.spec.q(), self.inner.ambient(), self.inner.len())
    }
}

/// Δ(A, B) = dim A + dim B - 2 dim(A ∩ B).
#[pyfunction]
fn delta(a: &PySubspace, b: &PySubspace) -> PyResult<usize> {
    a.same_space(b)?;
    metric::delta(&a.spec, &a.inner, &b.inner).map_err(err)
}

/// All subspaces of GF(q)^n (optionally of one dimension) in canonical order.
#[pyfunction]
#[pyo3(signature = (q, n, k=None, cap=DEFAULT_CAP))]
fn subspaces(q: u32, n: usize, k: Option<usize>, cap: u64) -> PyResult<Vec<PySubspace>> {
    let spec = field(q)?;
    let list: Vec<sub::Subspace> = match k {
        Some(k) => sub::enumerate_subspaces(n, k, &spec, cap).map_err(err)?.collect(),
        None => sub::all_subspaces(n, &spec, cap).map_err(err)?,
    };
    Ok(list.into_iter().map(|s| PySubspace::wrap(&spec, s)).collect())
}

#[pyfunction]
fn qbinom(n: usize, k: usize, q: u64) -> num_bigint::BigUint {
    counting::qbinom(n, k, q)
}

/// Number of l-spaces meeting a fixed k-space in exactly j dimensions.
#[pyfunction]
fn intersection_count(n: usize, k: usize, l: usize, j: usize, q: u64) -> num_bigint::BigUint {
    counting::intersection_count(n, k, l, j, q)
}

/// (bound, regime label) for diameter-d families in GF(q)^n.
#[pyfunction]
fn theorem_bound(n: usize, d: usize, q: u64) -> (num_bigint::BigUint, &'static str) {
    let tb = counting::theorem_bound(n, d, q);
    (tb.value, tb.regime.label())
}

/// Exact values and checks of the layer inequalities for d >= 4, n > 2d.
#[pyfunction]
fn layer_bound_audit<'py>(py: Python<'py>, n: usize, d: usize, q: u64) -> PyResult<Bound<'py, PyDict>> {
    let report = counting::layer_bound_audit(n, d, q).map_err(err)?;
    let out = PyDict::new(py);
    let values = PyDict::new(py);
    for (k, v) in &report.values {
        values.set_item(k, fraction(py, v)?)?;
    }
    let checks = PyDict::new(py);
    for c in &report.checks {
        checks.set_item(&c.name, c.holds)?;
    }
    out.set_item("pass", report.pass)?;
    out.set_item("t", report.t)?;
    out.set_item("theorem_bound", report.theorem_bound)?;
    out.set_item("values", values)?;
    out.set_item("checks", checks)?;
    Ok(out)
}

#[pyfunction]
fn construct_f1(q: u32, n: usize, t: usize) -> PyResult<PyFamily> {
    let spec = field(q)?;
    let inner = search::construct_f1(&spec, n, t, DEFAULT_CAP).map_err(err)?;
    Ok(PyFamily { spec, inner })
}

/// F1 plus every (t+1)-space through x (digit string or index list).
#[pyfunction]
fn construct_f2(q: u32, n: usize, t: usize, x: Bound<'_, PyAny>) -> PyResult<PyFamily> {
    let spec = field(q)?;
    let x = if let Ok(text) = x.extract::<String>() {
        sub::Vector::parse(&spec, &text).map_err(err)?
    } else {
        sub::Vector::from_indices(&x.extract::<Vec<u8>>()?)
    };
    let inner = search::construct_f2(&spec, n, t, &x, DEFAULT_CAP).map_err(err)?;
    Ok(PyFamily { spec, inner })
}

/// Diameter, slice and theorem-bound checks for a family.
#[pyfunction]
fn verify_family<'py>(py: Python<'py>, family: &PyFamily, d: usize) -> PyResult<Bound<'py, PyDict>> {
    let r = search::verify_family(&family.spec, &family.inner, d);
    let out = PyDict::new(py);
    out.set_item("pass", r.pass)?;
    out.set_item("size", r.size)?;
    out.set_item("diameter", r.diameter)?;
    out.set_item("theorem_bound", r.theorem_bound)?;
    out.set_item("regime", r.regime.label())?;
    out.set_item("tight", r.tight)?;
    out.set_item("violations", PyList::new(py, &r.violations)?)?;
    Ok(out)
}

/// Largest family of diameter at most d ("exact" search or "greedy").
#[pyfunction]
#[pyo3(signature = (q, n, d, mode="exact", node_budget=None, time_budget=None, seed=None, workers=1, cap=DEFAULT_CAP))]
#[allow(clippy::too_many_arguments)]
fn max_family<'py>(
    py: Python<'py>,
    q: u32,
    n: usize,
    d: usize,
    mode: &str,
    node_budget: Option<u64>,
    time_budget: Option<f64>,
    seed: Option<PyFamily>,
    workers: usize,
    cap: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = SearchConfig::new(q, n, d);
    cfg.mode = match mode {
        "exact" => Mode::Exact,
        "greedy" => Mode::Greedy,
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    if let Some(b) = node_budget {
        cfg.node_budget = b;
    }
    if let Some(t) = time_budget {
        if !(t > 0.0 && t.is_finite()) {
            return Err(PyValueError::new_err("time_budget must be positive"));
        }
        cfg.time_budget = Some(Duration::from_secs_f64(t));
    }
    cfg.seed = seed.map(|s| s.inner);
    cfg.workers = workers;
    cfg.cap = cap;
    let res = py.detach(|| search::run_search(&cfg)).map_err(err)?;
    let spec = field(q)?;
    let out = PyDict::new(py);
    out.set_item("best_size", res.best_size)?;
    out.set_item("optimal", res.optimal)?;
    out.set_item("nodes", res.nodes)?;
    out.set_item("upper_bound", res.upper_bound)?;
    out.set_item("theorem_bound", res.theorem_bound)?;
    out.set_item("regime", res.regime.label())?;
    out.set_item("exploratory", res.regime == Regime::Gap)?;
    out.set_item("family", PyFamily { spec, inner: res.family })?;
    Ok(out)
}

/// Perfect matching of the graph joining k-spaces to complementary
/// (n-k)-spaces, as (A, B) pairs.
#[pyfunction]
fn perfect_matching(q: u32, n: usize, k: usize) -> PyResult<Vec<(PySubspace, PySubspace)>> {
    let spec = field(q)?;
    let g = build_gk(&spec, n, k, DEFAULT_CAP).map_err(err)?;
    let pairs = hk_matching(&g).map_err(err)?;
    Ok(pairs
        .into_iter()
        .map(|(i, j)| {
            (
                PySubspace::wrap(&spec, g.left[i].clone()),
                PySubspace::wrap(&spec, g.right[j].clone()),
            )
        })
        .collect())
}

#[pymodule]
fn pyqiso(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySubspace>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(subspaces, m)?)?;
    m.add_function(wrap_pyfunction!(qbinom, m)?)?;
    m.add_function(wrap_pyfunction!(intersection_count, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_bound, m)?)?;
    m.add_function(wrap_pyfunction!(layer_bound_audit, m)?)?;
    m.add_function(wrap_pyfunction!(construct_f1, m)?)?;
    m.add_function(wrap_pyfunction!(construct_f2, m)?)?;
    m.add_function(wrap_pyfunction!(verify_family, m)?)?;
    m.add_function(wrap_pyfunction!(max_family, m)?)?;
    m.add_function(wrap_pyfunction!(perfect_matching, m)?)?;
    m.add("DEFAULT_CAP", DEFAULT_CAP)?;
    Ok(())
}
