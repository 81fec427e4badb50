//! Python bindings. Rationals cross the boundary as `fractions.Fraction`.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use wheelkit::coeff::{fmt_q, parse_q};
use wheelkit::diagram::{canonicalize, strut, theta, wheel};
use wheelkit::suites::{self, SuiteConfig, SUITES};
use wheelkit::{ops, series, wheels, Diagram, Element, Engine, Signature, SkeletonKind, Q};

fn err(e: wheelkit::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_fraction(py: Python<'_>, q: &Q) -> PyResult<Py<PyAny>> {
    Ok(py.import("fractions")?.getattr("Fraction")?.call1((fmt_q(q),))?.unbind())
}

/// Accepts int, Fraction or a string such as "-3/4".
fn from_number(x: &Bound<'_, PyAny>) -> PyResult<Q> {
    parse_q(&x.str()?.to_string()).map_err(err)
}

#[pyclass(name = "Diagram", module = "wheelkit_py", frozen)]
struct PyDiagram {
    inner: Diagram,
}

#[pymethods]
impl PyDiagram {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyDiagram { inner: Diagram::from_json(&v).map_err(err)? })
    }

    #[staticmethod]
    fn wheel(label: &str, k: usize) -> Self {
        PyDiagram { inner: wheel(label, k) }
    }

    #[staticmethod]
    fn strut(label: &str) -> Self {
        PyDiagram { inner: strut(label) }
    }

    #[staticmethod]
    fn theta() -> Self {
        PyDiagram { inner: theta() }
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn legs(&self, label: &str) -> usize {
        self.inner.legs_on(label)
    }

    /// (sign, canonical diagram) with sign in {-1, 0, 1}
    fn canonical(&self) -> (i64, PyDiagram) {
        let c = canonicalize(&self.inner);
        (c.sign.to_i64(), PyDiagram { inner: c.diagram })
    }

    fn __repr__(&self) -> String {
        format!("Diagram({})", self.inner.to_json_string())
    }
}

#[pyclass(name = "Element", module = "wheelkit_py", frozen)]
struct PyElement {
    inner: Element,
}

fn wrap(e: Element) -> PyElement {
    PyElement { inner: e }
}

#[pymethods]
impl PyElement {
    #[new]
    #[pyo3(signature = (diagram, coeff = None))]
    fn new(diagram: PyRef<'_, PyDiagram>, coeff: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
        let e = Element::from_diagram(&diagram.inner);
        Ok(match coeff {
            Some(c) => wrap(e.scale_q(&from_number(c)?)),
            None => wrap(e),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(wrap(Element::from_json(&v, None).map_err(err)?))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_json()).expect("element serializes")
    }

    fn terms(&self, py: Python<'_>) -> PyResult<Vec<(PyDiagram, Py<PyAny>)>> {
        self.inner.terms().map(|(d, c)| Ok((PyDiagram { inner: d.clone() }, to_fraction(py, c)?))).collect()
    }

    fn coeff(&self, py: Python<'_>, diagram: PyRef<'_, PyDiagram>) -> PyResult<Py<PyAny>> {
        to_fraction(py, &self.inner.coeff(&diagram.inner))
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn degree_part(&self, degree: usize) -> Self {
        wrap(self.inner.degree_part(degree))
    }

    fn truncated(&self, max_degree: usize) -> Self {
        wrap(self.inner.truncated(max_degree))
    }

    /// changes the skeleton kind of one component, e.g. "star" to "circledstar"
    fn with_kind(&self, label: &str, kind: &str) -> PyResult<Self> {
        let kind = SkeletonKind::parse(kind).map_err(err)?;
        Ok(wrap(wheels::with_kind(&self.inner, label, kind).map_err(err)?))
    }

    /// disjoint union, the product of star spaces
    fn union(&self, other: PyRef<'_, PyElement>) -> PyResult<Self> {
        Ok(wrap(ops::disjoint_union(&self.inner, &other.inner).map_err(err)?))
    }

    /// stacking along shared interval labels
    fn stack(&self, other: PyRef<'_, PyElement>) -> PyResult<Self> {
        Ok(wrap(ops::stack(&self.inner, &other.inner).map_err(err)?))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __add__(&self, other: PyRef<'_, PyElement>) -> Self {
        let mut e = self.inner.clone();
        e.add_scaled(&other.inner, &Q::from_integer(1.into()));
        wrap(e)
    }

    fn __sub__(&self, other: PyRef<'_, PyElement>) -> Self {
        let mut e = self.inner.clone();
        e.add_scaled(&other.inner, &Q::from_integer((-1).into()));
        wrap(e)
    }

    fn __mul__(&self, c: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(wrap(self.inner.scale_q(&from_number(c)?)))
    }

    fn __rmul__(&self, c: &Bound<'_, PyAny>) -> PyResult<Self> {
        self.__mul__(c)
    }

    fn __eq__(&self, other: PyRef<'_, PyElement>) -> bool {
        self.inner.untruncated() == other.inner.untruncated()
    }

    fn __repr__(&self) -> String {
        format!("Element({} terms)", self.inner.len())
    }
}

/// Owns the relation quotients and the sl2 memo table.
#[pyclass(name = "Engine", module = "wheelkit_py", frozen)]
struct PyEngine {
    inner: Engine,
}

#[pymethods]
impl PyEngine {
    #[new]
    #[pyo3(signature = (max_degree = 4, cache_dir = None))]
    fn new(max_degree: usize, cache_dir: Option<PathBuf>) -> PyResult<Self> {
        Ok(PyEngine { inner: Engine::new(max_degree, cache_dir).map_err(err)? })
    }

    /// dimension of the quotient on one skeleton component labelled x, vacuum parts excluded
    #[pyo3(signature = (degree, skeleton = "star"))]
    fn dim(&self, degree: usize, skeleton: &str) -> PyResult<usize> {
        let sig = Signature::single(SkeletonKind::parse(skeleton).map_err(err)?, "x");
        self.inner.reducer().legged_dimension(&sig, degree).map_err(err)
    }

    /// (equal, first failing degree)
    fn equal_mod_relations(
        &self,
        a: PyRef<'_, PyElement>,
        b: PyRef<'_, PyElement>,
        max_degree: usize,
    ) -> PyResult<(bool, Option<usize>)> {
        let c = self.inner.equal_mod_relations(&a.inner, &b.inner, max_degree).map_err(err)?;
        Ok((c.equal, c.failing_degree))
    }

    fn chi_inverse(&self, e: PyRef<'_, PyElement>, label: &str, max_degree: usize) -> PyResult<PyElement> {
        Ok(wrap(self.inner.chi_inverse(&e.inner, label, max_degree).map_err(err)?))
    }

    fn sl2_reduce(&self, py: Python<'_>, e: PyRef<'_, PyElement>) -> PyResult<Py<PyAny>> {
        to_fraction(py, &self.inner.sl2().reduce(&e.inner).map_err(err)?)
    }

    fn sl2_pair(
        &self,
        py: Python<'_>,
        a: PyRef<'_, PyElement>,
        b: PyRef<'_, PyElement>,
        label: &str,
    ) -> PyResult<Py<PyAny>> {
        to_fraction(py, &self.inner.sl2().pair(&a.inner, &b.inner, label).map_err(err)?)
    }
}

#[pyfunction]
fn modified_bernoulli(py: Python<'_>, n: usize) -> PyResult<Vec<Py<PyAny>>> {
    series::modified_bernoulli(n).iter().map(|b| to_fraction(py, b)).collect()
}

#[pyfunction]
fn omega(label: &str, max_degree: usize) -> PyResult<PyElement> {
    Ok(wrap(wheels::omega(label, max_degree).map_err(err)?))
}

#[pyfunction]
fn log_omega(label: &str, max_degree: usize) -> PyElement {
    wrap(wheels::log_omega(label, max_degree))
}

/// glues all legs of `c` to legs of `d` on `label`
#[pyfunction]
fn apply_diffop(c: PyRef<'_, PyElement>, d: PyRef<'_, PyElement>, label: &str) -> PyResult<PyElement> {
    Ok(wrap(ops::apply_diffop(&c.inner, &d.inner, label).map_err(err)?))
}

#[pyfunction]
fn pair(c: PyRef<'_, PyElement>, d: PyRef<'_, PyElement>, label: &str) -> PyResult<PyElement> {
    Ok(wrap(ops::pair(&c.inner, &d.inner, label).map_err(err)?))
}

#[pyfunction]
fn coproduct(e: PyRef<'_, PyElement>, label: &str, first: &str, second: &str) -> PyResult<PyElement> {
    Ok(wrap(ops::coproduct(&e.inner, label, &[first, second]).map_err(err)?))
}

#[pyfunction]
fn chi(e: PyRef<'_, PyElement>, label: &str) -> PyResult<PyElement> {
    Ok(wrap(ops::chi(&e.inner, label).map_err(err)?))
}

/// Runs suites and returns (passed, report JSON).
#[pyfunction]
#[pyo3(signature = (names = None, max_degree = 4, seed = 0, samples = 200))]
fn run_suites(names: Option<Vec<String>>, max_degree: usize, seed: u64, samples: usize) -> PyResult<(bool, String)> {
    let config = SuiteConfig {
        suites: names.unwrap_or_else(|| SUITES.iter().map(|s| s.to_string()).collect()),
        max_degree,
        seed,
        samples,
        ..SuiteConfig::default()
    };
    let report = suites::run(&config).map_err(err)?;
    Ok((report.passed(), report.to_json_string()))
}

#[pymodule]
fn wheelkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDiagram>()?;
    m.add_class::<PyElement>()?;
    m.add_class::<PyEngine>()?;
    m.add_function(wrap_pyfunction!(modified_bernoulli, m)?)?;
    m.add_function(wrap_pyfunction!(omega, m)?)?;
    m.add_function(wrap_pyfunction!(log_omega, m)?)?;
    m.add_function(wrap_pyfunction!(apply_diffop, m)?)?;
    m.add_function(wrap_pyfunction!(pair, m)?)?;
    m.add_function(wrap_pyfunction!(coproduct, m)?)?;
    m.add_function(wrap_pyfunction!(chi, m)?)?;
    m.add_function(wrap_pyfunction!(run_suites, m)?)?;
    Ok(())
}
