//! Python bindings: instances, domination certificates, mixed norms and
//! mixing constants, plus the verification suite.
//!
//! Families cross the boundary as lists of `(weight, a, c, g)` tuples and
//! measures as plain lists of floats; heavier results come back as dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mixnorm::mixed::{
    mixed_norm_closed, mixed_norm_splitting_search, mixed_norm_sup_measure, MixedFamilyValues,
};
use mixnorm::mixing::{domination_at, mixing_lower_bound, mixing_upper_domination};
use mixnorm::model::{strong_sum, weak_sup, FamilyItem, Side};
use mixnorm::schema::{instance_to_json, load_spec_from_str, LoadedSpec};
use mixnorm::summing::{pietsch_norm_with_dual, ratio_lower_bound, witness_from_dual};
use mixnorm::{ExponentParams, SimplexMeasure, WeightedFamily};

fn to_py_err(err: mixnorm::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

type FamilyTuple = (f64, usize, usize, usize);

fn family_from_tuples(items: Vec<FamilyTuple>) -> PyResult<WeightedFamily> {
    let items = items
        .into_iter()
        .map(|(weight, a, c, g)| FamilyItem { weight, a, c, g })
        .collect();
    WeightedFamily::new(items).map_err(to_py_err)
}

fn family_to_tuples(fam: &WeightedFamily) -> Vec<FamilyTuple> {
    fam.items().iter().map(|it| (it.weight, it.a, it.c, it.g)).collect()
}

/// A finite instance: ground sets, strength tensor, test kernel, mix kernel.
#[pyclass(name = "Instance", frozen)]
struct PyInstance {
    inner: mixnorm::Instance,
}

#[pymethods]
impl PyInstance {
    /// `Instance(sizes, strength, test, mix)` with `sizes = (a, c, g, k, w)`
    /// and flat row-major tensors.
    #[new]
    fn new(
        sizes: (usize, usize, usize, usize, usize),
        strength: Vec<f64>,
        test: Vec<f64>,
        mix: Vec<f64>,
    ) -> PyResult<Self> {
        Ok(Self { inner: mixnorm::Instance::new(sizes, strength, test, mix).map_err(to_py_err)? })
    }

    /// Parses a JSON document of kind `instance`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match load_spec_from_str(text).map_err(to_py_err)? {
            LoadedSpec::Instance { instance, .. } => Ok(Self { inner: instance }),
            _ => Err(PyValueError::new_err("expected a document of kind `instance`")),
        }
    }

    /// Deterministic random instance with entries uniform in [-1, 1].
    #[staticmethod]
    fn random(seed: u64, sizes: (usize, usize, usize, usize, usize)) -> PyResult<Self> {
        Ok(Self { inner: mixnorm::Instance::random(seed, sizes).map_err(to_py_err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&instance_to_json(&self.inner, None, None))
            .map_err(|err| PyValueError::new_err(err.to_string()))
    }

    #[getter]
    fn sizes(&self) -> (usize, usize, usize, usize, usize) {
        let i = &self.inner;
        (i.n_a, i.n_c, i.n_g, i.n_k, i.n_w)
    }

    /// `[sum_j |w_j strength_j|^p]^{1/p}` of a family.
    fn strong_sum(&self, family: Vec<FamilyTuple>, p: f64) -> PyResult<f64> {
        let fam = family_from_tuples(family)?;
        strong_sum(&self.inner, &fam, p).map_err(to_py_err)
    }

    /// Weak supremum of a family over the test (`side="test"`) or mix
    /// (`side="mix"`) points.
    fn weak_sup(&self, family: Vec<FamilyTuple>, p: f64, side: &str) -> PyResult<f64> {
        let fam = family_from_tuples(family)?;
        let side = match side {
            "test" => Side::Test,
            "mix" => Side::Mix,
            other => {
                return Err(PyValueError::new_err(format!(
                    "side must be \"test\" or \"mix\", got {other:?}"
                )))
            }
        };
        weak_sup(&self.inner, &fam, p, side).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        let i = &self.inner;
        format!(
            "Instance(a={}, c={}, g={}, k={}, w={})",
            i.n_a, i.n_c, i.n_g, i.n_k, i.n_w
        )
    }
}

/// Smallest domination constant with its certificate:
/// `(constant, measure, max_violation)`.
#[pyfunction]
fn pietsch_norm(inst: &PyInstance, p: f64) -> PyResult<(f64, Vec<f64>, f64)> {
    let cert = mixnorm::summing::pietsch_norm(&inst.inner, p).map_err(to_py_err)?;
    Ok((cert.constant, cert.measure.weights().to_vec(), cert.max_violation))
}

/// Best sampled family ratio below the domination constant:
/// `(value, family)`.
#[pyfunction]
fn summing_lower_bound(
    inst: &PyInstance,
    p: f64,
    samples: usize,
    seed: u64,
) -> PyResult<(f64, Vec<FamilyTuple>)> {
    let (value, fam) = ratio_lower_bound(&inst.inner, p, samples, seed).map_err(to_py_err)?;
    Ok((value, family_to_tuples(&fam)))
}

/// The extremal family induced by the domination LP dual.
#[pyfunction]
fn extremal_family(inst: &PyInstance, p: f64) -> PyResult<Vec<FamilyTuple>> {
    let (_, dual) = pietsch_norm_with_dual(&inst.inner, p).map_err(to_py_err)?;
    let dims = (inst.inner.n_a, inst.inner.n_c, inst.inner.n_g);
    let fam = witness_from_dual(dims, &dual, p).map_err(to_py_err)?;
    Ok(family_to_tuples(&fam))
}

/// Mixed `(s;q)`-norm of a family on an instance. Returns a dict with the
/// value, the extremal measure, the splitting sequence, and the certified
/// gap (the diagonal `q = s` uses the exact closed form).
#[pyfunction]
fn mixed_norm<'py>(
    py: Python<'py>,
    inst: &PyInstance,
    family: Vec<FamilyTuple>,
    q: f64,
    s: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let fam = family_from_tuples(family)?;
    let vals = MixedFamilyValues::from_instance(&inst.inner, &fam).map_err(to_py_err)?;
    let out = PyDict::new(py);
    if q == s {
        let value = mixed_norm_closed(&vals, q).map_err(to_py_err)?;
        out.set_item("value", value)?;
        out.set_item("measure", py.None())?;
        out.set_item("splitting", py.None())?;
        out.set_item("gap", 0.0)?;
    } else {
        let e = ExponentParams::qs(q, s).map_err(to_py_err)?;
        let result = mixed_norm_sup_measure(&vals, &e).map_err(to_py_err)?;
        out.set_item("value", result.value)?;
        out.set_item("measure", result.measure.weights().to_vec())?;
        out.set_item("splitting", result.splitting)?;
        out.set_item("gap", result.gap)?;
    }
    Ok(out)
}

/// Direct splitting-sequence minimization, an independent upper bound on the
/// mixed norm.
#[pyfunction]
fn mixed_norm_search(
    inst: &PyInstance,
    family: Vec<FamilyTuple>,
    q: f64,
    s: f64,
    restarts: usize,
    seed: u64,
) -> PyResult<f64> {
    let fam = family_from_tuples(family)?;
    let vals = MixedFamilyValues::from_instance(&inst.inner, &fam).map_err(to_py_err)?;
    let e = ExponentParams::qs(q, s).map_err(to_py_err)?;
    mixed_norm_splitting_search(&vals, &e, restarts, seed).map_err(to_py_err)
}

/// Mixing constant at `((s;q), q)`: the domination sweep (upper route), the
/// certified family lower bound, the worst measure and its certificate.
#[pyfunction]
#[pyo3(signature = (inst, q, s, grid_depth = 10, samples = 50, seed = 0))]
fn mixing_constant<'py>(
    py: Python<'py>,
    inst: &PyInstance,
    q: f64,
    s: f64,
    grid_depth: usize,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let e = ExponentParams::qs(q, s).map_err(to_py_err)?;
    let (upper, worst_mu) =
        mixing_upper_domination(&inst.inner, &e, grid_depth).map_err(to_py_err)?;
    let (lower, witness) =
        mixing_lower_bound(&inst.inner, &e, q, samples, seed).map_err(to_py_err)?;
    let (cert, _) = domination_at(&inst.inner, &worst_mu, &e).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("value", upper)?;
    out.set_item("lower_bound", lower)?;
    out.set_item("worst_measure", worst_mu.weights().to_vec())?;
    out.set_item("certificate_measure", cert.measure.weights().to_vec())?;
    out.set_item("certificate_violation", cert.max_violation)?;
    out.set_item("extremal_family", family_to_tuples(&witness))?;
    Ok(out)
}

/// Summing norm of the evaluation embedding for a measure on the mix points
/// (1 for nonzero instances, 0 for the zero instance).
#[pyfunction]
fn embedding_norm(inst: &PyInstance, measure: Vec<f64>, s: f64) -> PyResult<f64> {
    let mu = SimplexMeasure::new(measure).map_err(to_py_err)?;
    let (_, pi_check) =
        mixnorm::adapters::build_evaluation_embedding(&inst.inner, &mu, s).map_err(to_py_err)?;
    Ok(pi_check)
}

/// Runs the full property suite; returns `(name, passed, detail)` triples.
#[pyfunction]
fn verify_suite(seed: u64) -> Vec<(String, bool, String)> {
    mixnorm::suite::run_suite(seed)
        .into_iter()
        .map(|r| (r.name.to_string(), r.pass, r.detail))
        .collect()
}

#[pymodule]
fn mixnorm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(pietsch_norm, m)?)?;
    m.add_function(wrap_pyfunction!(summing_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(extremal_family, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_norm, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_norm_search, m)?)?;
    m.add_function(wrap_pyfunction!(mixing_constant, m)?)?;
    m.add_function(wrap_pyfunction!(embedding_norm, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    Ok(())
}
