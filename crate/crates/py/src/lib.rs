//! Python bindings for the qmlbk core crate.
//!
//! Exposes the statevector circuit builder, the three model families,
//! the circuit mappings with their equivalence checker, and the training
//! entry points. Structured results (mapping reports, training output)
//! come back as plain dicts; models round-trip through JSON so Python
//! code can persist them alongside the CLI artifacts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qmlbk::learning::{fit_implicit, train_explicit, Dataset, Split, TrainConfig};
use qmlbk::mappings::{self, MappingReport};
use qmlbk::models::{ExplicitModel, FeatureEncoding, ImplicitModel, ParamModel, ReuploadingModel};
use qmlbk::sim::{AngleSource, Observable, Statevector};

fn err(e: qmlbk::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn angle_source(
    param: Option<usize>,
    data: Option<usize>,
    scale: f64,
    angle: Option<f64>,
) -> PyResult<AngleSource> {
    match (param, data, angle) {
        (Some(slot), None, None) => Ok(AngleSource::Param {
            slot,
            scale,
            offset: 0.0,
        }),
        (None, Some(slot), None) => Ok(AngleSource::Data { slot, scale }),
        (None, None, Some(value)) => Ok(AngleSource::Constant { value }),
        _ => Err(PyValueError::new_err(
            "give exactly one of param=, data=, angle=",
        )),
    }
}

fn report_dict<'py>(py: Python<'py>, report: &MappingReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let kind = serde_json::to_value(report.kind)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    d.set_item("kind", kind.as_str().unwrap_or_default())?;
    d.set_item("added_qubits", report.added_qubits)?;
    d.set_item("added_gates", report.added_gates)?;
    d.set_item("precision_bits", report.precision_bits)?;
    d.set_item("repetitions", report.repetitions)?;
    d.set_item("acceptance_probability", report.acceptance_probability)?;
    d.set_item("observable_rescale", report.observable_rescale)?;
    d.set_item("guaranteed_error", report.guaranteed_error)?;
    Ok(d)
}

fn dataset(inputs: Vec<Vec<f64>>, labels: Vec<f64>) -> PyResult<Dataset> {
    Dataset::new(inputs, labels, Split::Train).map_err(err)
}

/// Gate-by-gate circuit builder over an exact statevector simulator.
///
/// Rotation angles come from a fixed value (`angle=`), a trainable
/// parameter slot (`param=`), or a data slot (`data=`, optionally scaled).
#[pyclass(name = "Circuit", from_py_object)]
#[derive(Clone)]
struct PyCircuit {
    inner: qmlbk::sim::Circuit,
}

#[pymethods]
impl PyCircuit {
    #[new]
    fn new(num_qubits: usize) -> Self {
        PyCircuit {
            inner: qmlbk::sim::Circuit::new(num_qubits),
        }
    }

    fn h(&mut self, q: usize) {
        self.inner = self.inner.clone().h(q);
    }

    fn x(&mut self, q: usize) {
        self.inner = self.inner.clone().x(q);
    }

    fn cnot(&mut self, control: usize, target: usize) {
        self.inner = self.inner.clone().cnot(control, target);
    }

    fn cz(&mut self, a: usize, b: usize) {
        self.inner = self.inner.clone().cz(a, b);
    }

    #[pyo3(signature = (q, *, param=None, data=None, scale=1.0, angle=None))]
    fn rx(
        &mut self,
        q: usize,
        param: Option<usize>,
        data: Option<usize>,
        scale: f64,
        angle: Option<f64>,
    ) -> PyResult<()> {
        let a = angle_source(param, data, scale, angle)?;
        self.inner = self.inner.clone().rx(q, a);
        Ok(())
    }

    #[pyo3(signature = (q, *, param=None, data=None, scale=1.0, angle=None))]
    fn ry(
        &mut self,
        q: usize,
        param: Option<usize>,
        data: Option<usize>,
        scale: f64,
        angle: Option<f64>,
    ) -> PyResult<()> {
        let a = angle_source(param, data, scale, angle)?;
        self.inner = self.inner.clone().ry(q, a);
        Ok(())
    }

    #[pyo3(signature = (q, *, param=None, data=None, scale=1.0, angle=None))]
    fn rz(
        &mut self,
        q: usize,
        param: Option<usize>,
        data: Option<usize>,
        scale: f64,
        angle: Option<f64>,
    ) -> PyResult<()> {
        let a = angle_source(param, data, scale, angle)?;
        self.inner = self.inner.clone().rz(q, a);
        Ok(())
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits
    }

    #[getter]
    fn num_parameter_slots(&self) -> usize {
        self.inner.num_parameter_slots
    }

    #[getter]
    fn num_data_slots(&self) -> usize {
        self.inner.num_data_slots
    }

    /// Run from |0...0> and return the final amplitudes.
    #[pyo3(signature = (params=vec![], data=vec![]))]
    fn run(&self, params: Vec<f64>, data: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
        let state = self.inner.run(&params, &data).map_err(err)?;
        Ok(state.amplitudes().iter().map(|a| (a.re, a.im)).collect())
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyCircuit { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Circuit(num_qubits={}, gates={})",
            self.inner.num_qubits,
            self.inner.gates.len()
        )
    }
}

/// Weighted Pauli-string observable with optional qubit projectors.
#[pyclass(name = "Observable", from_py_object)]
#[derive(Clone)]
struct PyObservable {
    inner: Observable,
}

#[pymethods]
impl PyObservable {
    /// Single-qubit Pauli ('X', 'Y' or 'Z') on one qubit of an n-qubit register.
    #[staticmethod]
    fn single(num_qubits: usize, qubit: usize, pauli: char) -> PyResult<Self> {
        Ok(PyObservable {
            inner: Observable::single(num_qubits, qubit, pauli).map_err(err)?,
        })
    }

    fn expectation(&self, state: Vec<(f64, f64)>) -> PyResult<f64> {
        let amps: Vec<_> = state
            .into_iter()
            .map(|(re, im)| num_complex::Complex64::new(re, im))
            .collect();
        let n = amps.len().trailing_zeros() as usize;
        let sv = Statevector::from_amplitudes(n, amps).map_err(err)?;
        self.inner.expectation(&sv).map_err(err)
    }

    #[getter]
    fn norm_bound(&self) -> f64 {
        self.inner.norm_bound()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyObservable { inner })
    }
}

/// A parametrized quantum model f(x; theta) — either an explicit model
/// (fixed encoding, variational circuit, measured observable) or a
/// data re-uploading circuit with interleaved encoding gates.
#[pyclass(name = "Model", from_py_object)]
#[derive(Clone)]
struct PyModel {
    inner: ParamModel,
}

impl PyModel {
    fn reuploading_ref(&self) -> PyResult<&ReuploadingModel> {
        match &self.inner {
            ParamModel::Reuploading(m) => Ok(m),
            ParamModel::Explicit(_) => Err(PyValueError::new_err(
                "mapping requires a re-uploading model",
            )),
        }
    }

    fn explicit_ref(&self) -> PyResult<&ExplicitModel> {
        match &self.inner {
            ParamModel::Explicit(m) => Ok(m),
            ParamModel::Reuploading(_) => Err(PyValueError::new_err(
                "training requires an explicit model",
            )),
        }
    }
}

#[pymethods]
impl PyModel {
    /// Data re-uploading model: one circuit mixing data and parameter gates.
    #[staticmethod]
    fn reuploading(circuit: PyCircuit, observable: PyObservable) -> PyResult<Self> {
        let m = ReuploadingModel::new(circuit.inner, observable.inner).map_err(err)?;
        Ok(PyModel {
            inner: ParamModel::Reuploading(m),
        })
    }

    /// Explicit model with the hardware-style encoding on `qubits` qubits
    /// followed by a purely variational circuit.
    #[staticmethod]
    fn explicit_havlicek(
        qubits: usize,
        variational: PyCircuit,
        observable: PyObservable,
    ) -> PyResult<Self> {
        let m = ExplicitModel::new(
            FeatureEncoding::havlicek(qubits),
            variational.inner,
            observable.inner,
        )
        .map_err(err)?;
        Ok(PyModel {
            inner: ParamModel::Explicit(m),
        })
    }

    /// Single-qubit re-uploading circuit that can represent every parity
    /// over d sign-valued inputs.
    #[staticmethod]
    fn parity(d: usize) -> PyResult<Self> {
        Ok(PyModel {
            inner: ParamModel::Reuploading(qmlbk::models::parity_model(d).map_err(err)?),
        })
    }

    fn eval(&self, theta: Vec<f64>, x: Vec<f64>) -> PyResult<f64> {
        self.inner.eval(&theta, &x).map_err(err)
    }

    /// Exact gradient of f(x; theta) via the parameter-shift rule.
    fn gradient(&self, theta: Vec<f64>, x: Vec<f64>) -> PyResult<Vec<f64>> {
        qmlbk::learning::model_gradient(&self.inner, &theta, &x).map_err(err)
    }

    #[getter]
    fn num_params(&self) -> usize {
        self.inner.num_params()
    }

    #[getter]
    fn data_arity(&self) -> usize {
        self.inner.data_arity()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner {
            ParamModel::Explicit(_) => "explicit",
            ParamModel::Reuploading(_) => "reuploading",
        }
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyModel { inner })
    }
}

/// Kernel model sum_m alpha_m k(x_m, x) over fixed support points.
#[pyclass(name = "KernelModel", from_py_object)]
#[derive(Clone)]
struct PyKernelModel {
    inner: ImplicitModel,
}

#[pymethods]
impl PyKernelModel {
    fn eval(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.eval(&x).map_err(err)
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyKernelModel { inner })
    }
}

/// Rewrite a re-uploading model as an explicit one, exact up to `delta`
/// in the observable via finite-precision bit-string encoding.
#[pyfunction]
fn map_approximate<'py>(
    py: Python<'py>,
    model: &PyModel,
    delta: f64,
) -> PyResult<(PyModel, Bound<'py, PyDict>)> {
    let (mapped, report) = mappings::map_approximate(model.reuploading_ref()?, delta).map_err(err)?;
    Ok((
        PyModel {
            inner: ParamModel::Explicit(mapped),
        },
        report_dict(py, &report)?,
    ))
}

/// Exact explicit rewrite with one teleportation gadget per encoding gate.
#[pyfunction]
fn map_exact_simple<'py>(py: Python<'py>, model: &PyModel) -> PyResult<(PyModel, Bound<'py, PyDict>)> {
    let (mapped, report) = mappings::map_exact_simple(model.reuploading_ref()?).map_err(err)?;
    Ok((
        PyModel {
            inner: ParamModel::Explicit(mapped),
        },
        report_dict(py, &report)?,
    ))
}

/// Exact explicit rewrite with repeat-until-success gadgets; post-selection
/// succeeds with probability at least 1 - delta_prime.
#[pyfunction]
fn map_exact_nested<'py>(
    py: Python<'py>,
    model: &PyModel,
    delta_prime: f64,
) -> PyResult<(PyModel, Bound<'py, PyDict>)> {
    let (mapped, report) =
        mappings::map_exact_nested(model.reuploading_ref()?, delta_prime).map_err(err)?;
    Ok((
        PyModel {
            inner: ParamModel::Explicit(mapped),
        },
        report_dict(py, &report)?,
    ))
}

/// Compare two models on random (theta, x) draws; returns max |f_a - f_b|.
#[pyfunction]
#[pyo3(signature = (a, b, trials=100, tolerance=1e-9, seed=0))]
fn verify_equivalence<'py>(
    py: Python<'py>,
    a: &PyModel,
    b: &PyModel,
    trials: usize,
    tolerance: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let report =
        mappings::verify_equivalence(&a.inner, &b.inner, trials, tolerance, seed).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("trials", report.trials)?;
    d.set_item("tolerance", report.tolerance)?;
    d.set_item("max_abs_diff", report.max_abs_diff)?;
    d.set_item("pass", report.pass)?;
    Ok(d)
}

/// Full-batch ADAM training of an explicit model under squared loss.
#[pyfunction]
#[pyo3(signature = (model, inputs, labels, steps=500, lr_params=0.01, lr_weight=0.1, lam=0.0, seed=0))]
#[allow(clippy::too_many_arguments)]
fn train<'py>(
    py: Python<'py>,
    model: &PyModel,
    inputs: Vec<Vec<f64>>,
    labels: Vec<f64>,
    steps: usize,
    lr_params: f64,
    lr_weight: f64,
    lam: f64,
    seed: u64,
) -> PyResult<(PyModel, Bound<'py, PyDict>)> {
    let data = dataset(inputs, labels)?;
    let cfg = TrainConfig {
        steps,
        lr_params,
        lr_weight,
        lambda: lam,
        rng_seed: seed,
        ..Default::default()
    };
    let (trained, result) = train_explicit(model.explicit_ref()?, &data, &cfg).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("theta", result.theta)?;
    d.set_item("weight", result.weight)?;
    d.set_item("loss_trace", result.loss_trace)?;
    Ok((
        PyModel {
            inner: ParamModel::Explicit(trained),
        },
        d,
    ))
}

/// Kernel ridge regression on the fidelity kernel of an explicit model's
/// encoding; lam=0 solves the interpolation problem.
#[pyfunction]
#[pyo3(signature = (model, inputs, labels, lam=0.0))]
fn fit_kernel(
    model: &PyModel,
    inputs: Vec<Vec<f64>>,
    labels: Vec<f64>,
    lam: f64,
) -> PyResult<PyKernelModel> {
    let encoding = model.explicit_ref()?.encoding.clone();
    let data = dataset(inputs, labels)?;
    Ok(PyKernelModel {
        inner: fit_implicit(encoding, &data, lam).map_err(err)?,
    })
}

/// Fidelity-kernel Gram matrix of an explicit model's encoding.
#[pyfunction]
fn gram_matrix(model: &PyModel, points: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    model.explicit_ref()?.encoding.gram_matrix(&points).map_err(err)
}

/// Parameters that make the parity circuit compute the parity over `subset`.
#[pyfunction]
fn parity_params(d: usize, subset: Vec<usize>) -> Vec<f64> {
    qmlbk::models::parity_params(d, &subset)
}

/// Run the parity separation experiment; returns the per-(d, model) table
/// as a CSV string.
#[pyfunction]
#[pyo3(signature = (d_list, delta=0.1, trials=200, seed=0))]
fn separation_experiment(d_list: Vec<usize>, delta: f64, trials: usize, seed: u64) -> PyResult<String> {
    let report =
        qmlbk::seplab::run_separation_experiment(&d_list, delta, trials, seed).map_err(err)?;
    Ok(report.to_csv())
}

#[pymodule]
fn qmlbk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyObservable>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyKernelModel>()?;
    m.add_function(wrap_pyfunction!(map_approximate, m)?)?;
    m.add_function(wrap_pyfunction!(map_exact_simple, m)?)?;
    m.add_function(wrap_pyfunction!(map_exact_nested, m)?)?;
    m.add_function(wrap_pyfunction!(verify_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(fit_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(gram_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(parity_params, m)?)?;
    m.add_function(wrap_pyfunction!(separation_experiment, m)?)?;
    Ok(())
}
