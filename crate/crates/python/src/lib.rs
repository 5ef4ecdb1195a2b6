//! Python bindings: the `dapprox` extension module.
//!
//! Exact rationals cross the boundary as `fractions.Fraction`. Real inputs
//! accept `int`, `float` (read as its shortest decimal), `Fraction`, or a
//! string literal such as `"golden"`, `"sqrt2"`, `"sqrt(3)"`, `"3/5"`.

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyString};

use dapprox::exact::{format_rational, parse_rational, rational_from_f64, Rational, Real};
use dapprox::output::{self, fmt_real};
use dapprox::{ApproxFunction, BoxDomain, DirichletSolution, Error, ManifoldChart};

create_exception!(dapprox, HypothesisError, PyValueError, "A theorem hypothesis does not hold for the input.");
create_exception!(dapprox, InternalError, PyRuntimeError, "A certification or search step failed; this is a bug.");

fn to_py(e: Error) -> PyErr {
    if e.is_internal() {
        InternalError::new_err(e.to_string())
    } else if e.is_hypothesis() {
        HypothesisError::new_err(e.to_string())
    } else if let Error::Io(io) = e {
        PyOSError::new_err(io.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn literal(obj: &Bound<'_, PyAny>) -> PyResult<Option<f64>> {
    if obj.is_instance_of::<pyo3::types::PyBool>() {
        return Err(PyValueError::new_err("expected a number, got bool"));
    }
    if obj.is_instance_of::<pyo3::types::PyFloat>() {
        return Ok(Some(obj.extract()?));
    }
    Ok(None)
}

fn to_real(obj: &Bound<'_, PyAny>) -> PyResult<Real> {
    if let Some(x) = literal(obj)? {
        return Real::from_f64(x).map_err(to_py);
    }
    Real::parse(&obj.str()?.to_cow()?).map_err(to_py)
}

fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Some(x) = literal(obj)? {
        return rational_from_f64(x).map_err(to_py);
    }
    parse_rational(&obj.str()?.to_cow()?).map_err(to_py)
}

fn to_reals(obj: &Bound<'_, PyAny>) -> PyResult<Vec<Real>> {
    if obj.is_instance_of::<PyString>() {
        return obj.str()?.to_cow()?.split(',').map(|s| Real::parse(s).map_err(to_py)).collect();
    }
    obj.try_iter()?.map(|x| to_real(&x?)).collect()
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((format_rational(r),))
}

#[pyclass(name = "Chart", frozen, module = "dapprox")]
struct PyChart {
    inner: ManifoldChart,
}

#[pymethods]
impl PyChart {
    /// `Chart("parabola")`, `Chart("plane:golden")`, `Chart("veronese:3", domain="0:1")`.
    #[new]
    #[pyo3(signature = (spec, domain = None))]
    fn new(spec: &str, domain: Option<&str>) -> PyResult<Self> {
        let domain = domain.map(BoxDomain::parse).transpose().map_err(to_py)?;
        Ok(PyChart {
            inner: dapprox::parse_chart(spec, domain).map_err(to_py)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// `f(α)` in floating point.
    fn eval(&self, alpha: Vec<f64>) -> PyResult<Vec<f64>> {
        if alpha.len() != self.inner.d() {
            return Err(PyValueError::new_err(format!("alpha needs {} coordinates", self.inner.d())));
        }
        Ok(self.inner.eval_f64(&alpha))
    }

    fn inradius(&self, alpha: &Bound<'_, PyAny>) -> PyResult<f64> {
        let a = to_reals(alpha)?;
        Ok(self.inner.inradius_at(&a).map_err(to_py)?.approx())
    }

    fn __repr__(&self) -> String {
        format!("Chart({:?})", self.inner.name())
    }
}

#[pyclass(name = "Psi", frozen, module = "dapprox")]
struct PyPsi {
    inner: ApproxFunction,
}

#[pymethods]
impl PyPsi {
    /// `Psi("pow:1:1/2")` or `Psi("table:path.csv")`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(PyPsi {
            inner: ApproxFunction::parse(spec).map_err(to_py)?,
        })
    }

    /// `c·q^{-τ}`.
    #[staticmethod]
    fn power_law(c: &Bound<'_, PyAny>, tau: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyPsi {
            inner: ApproxFunction::power_law(to_rational(c)?, to_rational(tau)?).map_err(to_py)?,
        })
    }

    fn __call__(&self, q: u64) -> PyResult<f64> {
        if q == 0 {
            return Err(PyValueError::new_err("q must be positive"));
        }
        Ok(self.inner.value_f64(q))
    }

    fn __repr__(&self) -> String {
        format!("Psi({:?})", self.inner.kind())
    }
}

fn solution_dict<'py>(py: Python<'py>, s: &DirichletSolution) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("Q", s.q_budget)?;
    d.set_item("q", s.point.q)?;
    d.set_item("p", s.point.p.clone())?;
    d.set_item("res_v44_max", s.v44_max().approx())?;
    d.set_item("res_v45_max", fmt_real(&s.v45_max()))?;
    d.set_item("certified", s.certified)?;
    Ok(d)
}

/// Returns `(s, eta)` as fractions for `(n, m, τ)`.
#[pyfunction]
fn exponents<'py>(py: Python<'py>, n: u32, m: u32, tau: &Bound<'py, PyAny>) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let b = dapprox::ExponentBundle::new(n, m, to_rational(tau)?).map_err(to_py)?;
    Ok((fraction(py, &b.s)?, fraction(py, &b.eta.eta)?))
}

#[pyfunction]
fn admissible_q_set(
    py: Python<'_>,
    chart: &PyChart,
    alpha: &Bound<'_, PyAny>,
    psi: &PyPsi,
    count: usize,
    search_cap: u64,
) -> PyResult<Vec<u64>> {
    let a = to_reals(alpha)?;
    py.detach(|| dapprox::admissible_q_set(&chart.inner, &a, &psi.inner, count, search_cap))
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(name = "dirichlet_search")]
fn dirichlet_search_py<'py>(
    py: Python<'py>,
    chart: &PyChart,
    alpha: &Bound<'py, PyAny>,
    psi: &PyPsi,
    q_budget: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let a = to_reals(alpha)?;
    let s = py
        .detach(|| dapprox::dirichlet_search(&chart.inner, &a, &psi.inner, q_budget))
        .map_err(to_py)?;
    solution_dict(py, &s)
}

#[pyfunction]
#[pyo3(signature = (chart, alpha, psi, tau, kappa, count, qcap = 1 << 32))]
#[allow(clippy::too_many_arguments)]
fn cor2_stream<'py>(
    py: Python<'py>,
    chart: &PyChart,
    alpha: &Bound<'py, PyAny>,
    psi: &PyPsi,
    tau: &Bound<'py, PyAny>,
    kappa: &Bound<'py, PyAny>,
    count: usize,
    qcap: u64,
) -> PyResult<Bound<'py, PyList>> {
    let a = to_reals(alpha)?;
    let (tau, kappa) = (to_rational(tau)?, to_rational(kappa)?);
    let sols = py
        .detach(|| dapprox::cor2_stream(&chart.inner, &a, &psi.inner, &tau, &kappa, count, qcap))
        .map_err(to_py)?;
    let out = PyList::empty(py);
    for s in &sols {
        out.append(solution_dict(py, s)?)?;
    }
    Ok(out)
}

/// Returns `(records, counts)`: records are `(q, p, residual)` with the
/// residual as a string (`a/b` when exact), counts are `N(1..qmax)`.
#[pyfunction]
#[pyo3(signature = (chart, psi, qmax, reduced = false))]
#[allow(clippy::type_complexity)]
fn enumerate_near(
    py: Python<'_>,
    chart: &PyChart,
    psi: &PyPsi,
    qmax: u64,
    reduced: bool,
) -> PyResult<(Vec<(u64, Vec<i64>, String)>, Vec<u64>)> {
    let near = py
        .detach(|| dapprox::enumerate_near(&chart.inner, &psi.inner, qmax, reduced))
        .map_err(to_py)?;
    let recs = near
        .records
        .iter()
        .map(|r| (r.point.q, r.point.p.clone(), fmt_real(&r.residual)))
        .collect();
    Ok((recs, near.counts))
}

/// Members of `{q ≤ qmax : max ||q β_i|| < q^{-τ}}`.
#[pyfunction]
fn bset(py: Python<'_>, beta: &Bound<'_, PyAny>, tau: &Bound<'_, PyAny>, qmax: u64) -> PyResult<Vec<u64>> {
    let b = to_reals(beta)?;
    let t = to_rational(tau)?;
    let set = py.detach(|| dapprox::bset_tau(&b, &t, qmax)).map_err(to_py)?;
    if !set.undecided.is_empty() {
        return Err(InternalError::new_err(format!("undecided denominators {:?}", set.undecided)));
    }
    Ok(set.members)
}

#[pyfunction]
fn counterexample_check<'py>(py: Python<'py>, beta: &Bound<'py, PyAny>, qmax: u64) -> PyResult<Bound<'py, PyDict>> {
    let b = to_reals(beta)?;
    let rep = py.detach(|| dapprox::counterexample_check(&b, qmax)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("c0", rep.constant.c0_f64())?;
    d.set_item("argmin_q", rep.constant.argmin_q)?;
    d.set_item("tail", rep.constant.tail)?;
    d.set_item("full_min", rep.constant.full_min)?;
    d.set_item("exact", rep.constant.exact)?;
    d.set_item("members", rep.members)?;
    d.set_item("caveat", rep.caveat)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (chart, tau, bands, fit_bands = 6))]
fn estimate_dimension<'py>(
    py: Python<'py>,
    chart: &PyChart,
    tau: &Bound<'py, PyAny>,
    bands: u32,
    fit_bands: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let t = to_rational(tau)?;
    let est = py
        .detach(|| dapprox::estimate_dimension(&chart.inner, &t, bands, fit_bands))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("slope", est.slope)?;
    d.set_item("stderr", est.stderr)?;
    d.set_item("target", fraction(py, &est.target)?)?;
    d.set_item("fitted", est.fitted.clone())?;
    let ladder: Vec<(u32, u64, f64, u64)> = est.ladder.iter().map(|r| (r.band, r.q_hi, r.delta, r.count)).collect();
    d.set_item("ladder", ladder)?;
    d.set_item("csv", output::dimension_table(&est).map_err(to_py)?.to_csv_string())?;
    Ok(d)
}

/// Rows `(band, Q, fraction, cumulative)`.
#[pyfunction]
fn mtp_hypothesis_check(
    py: Python<'_>,
    chart: &PyChart,
    tau: &Bound<'_, PyAny>,
    s: &Bound<'_, PyAny>,
    grid: usize,
    bands: u32,
) -> PyResult<Vec<(u32, u64, f64, f64)>> {
    let (t, s) = (to_rational(tau)?, to_rational(s)?);
    let rows = py
        .detach(|| dapprox::mtp_hypothesis_check(&chart.inner, &t, &s, grid, bands))
        .map_err(to_py)?;
    Ok(rows.iter().map(|r| (r.band, r.q_hi, r.fraction, r.cumulative)).collect())
}

#[pymodule]
#[pyo3(name = "dapprox")]
fn dapprox_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("__version__", dapprox::VERSION)?;
    m.add("HypothesisError", py.get_type::<HypothesisError>())?;
    m.add("InternalError", py.get_type::<InternalError>())?;
    m.add_class::<PyChart>()?;
    m.add_class::<PyPsi>()?;
    m.add_function(wrap_pyfunction!(exponents, m)?)?;
    m.add_function(wrap_pyfunction!(admissible_q_set, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet_search_py, m)?)?;
    m.add_function(wrap_pyfunction!(cor2_stream, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_near, m)?)?;
    m.add_function(wrap_pyfunction!(bset, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample_check, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(mtp_hypothesis_check, m)?)?;
    Ok(())
}
