//! Python bindings for the `macrosup` core crate.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use macrosup_core::{analytic, catalog, grover, pindex, statevector, vcm};

fn err(e: macrosup_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn axis(label: &str) -> PyResult<statevector::PauliAxis> {
    match label {
        "x" | "X" => Ok(statevector::PauliAxis::X),
        "y" | "Y" => Ok(statevector::PauliAxis::Y),
        "z" | "Z" => Ok(statevector::PauliAxis::Z),
        _ => Err(PyValueError::new_err(format!("axis must be x, y or z, got `{label}`"))),
    }
}

/// Normalized pure state of `num_qubits` qubits; site 1 is the most
/// significant bit of the basis index.
#[pyclass(name = "PureState", module = "macrosup")]
struct PyPureState {
    inner: statevector::PureState,
}

#[pymethods]
impl PyPureState {
    #[staticmethod]
    fn basis(num_qubits: usize, index: usize) -> PyResult<Self> {
        Ok(Self { inner: statevector::PureState::basis_state(num_qubits, index).map_err(err)? })
    }

    #[staticmethod]
    fn from_amplitudes(num_qubits: usize, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self { inner: statevector::PureState::from_amplitudes(num_qubits, amplitudes).map_err(err)? })
    }

    #[staticmethod]
    fn uniform(num_qubits: usize, indices: Vec<usize>) -> PyResult<Self> {
        Ok(Self { inner: statevector::PureState::uniform_over(num_qubits, &indices).map_err(err)? })
    }

    #[staticmethod]
    fn catalog(name: &str, num_qubits: usize) -> PyResult<Self> {
        let entry = catalog::lookup(name).map_err(err)?;
        Ok(Self { inner: entry.build(num_qubits).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let file = File::open(path)?;
        Ok(Self { inner: statevector::PureState::read_text(BufReader::new(file)).map_err(err)? })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.inner.write_text(&mut w).map_err(err)?;
        w.flush()?;
        Ok(())
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn probability(&self, index: usize) -> f64 {
        self.inner.probability(index)
    }

    fn fidelity(&self, other: &PyPureState) -> f64 {
        self.inner.fidelity(&other.inner)
    }

    fn pauli_expectation(&self, site: usize, axis_label: &str) -> PyResult<f64> {
        self.inner.pauli_expectation(site, axis(axis_label)?).map_err(err)
    }

    fn hadamard_transform(&mut self) {
        self.inner.hadamard_transform();
    }

    fn __repr__(&self) -> String {
        format!("PureState(num_qubits={})", self.inner.num_qubits())
    }
}

/// Variance-covariance matrix of all single-site Pauli operators.
#[pyclass(name = "Vcm", module = "macrosup")]
struct PyVcm {
    inner: vcm::Vcm,
}

#[pymethods]
impl PyVcm {
    #[getter]
    fn e_max(&self) -> f64 {
        self.inner.e_max()
    }

    #[getter]
    fn trace(&self) -> f64 {
        self.inner.trace()
    }

    #[getter]
    fn degenerate(&self) -> bool {
        self.inner.is_degenerate()
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues().to_vec()
    }

    /// Top eigenvector, scaled so that the squared norm is `L`.
    fn top_eigenvector(&self) -> Vec<Complex64> {
        self.inner.top_eigvec().to_vec()
    }

    /// `C = max_l Σ_α |c_lα|²` of the top eigenvector.
    fn c_factor(&self) -> f64 {
        vcm::c_factor(&vcm::max_fluctuating_operator(&self.inner))
    }

    fn entry(&self, site: usize, axis_a: &str, site2: usize, axis_b: &str) -> PyResult<Complex64> {
        let l = self.inner.num_qubits();
        if !(1..=l).contains(&site) || !(1..=l).contains(&site2) {
            return Err(PyValueError::new_err(format!("sites must lie in 1..={l}")));
        }
        Ok(self.inner.entry(site, axis(axis_a)?, site2, axis(axis_b)?))
    }

    fn __repr__(&self) -> String {
        format!("Vcm(L={}, e_max={})", self.inner.num_qubits(), self.inner.e_max())
    }
}

/// Grover search instance with its iteration count `R`.
#[pyclass(name = "GroverInstance", module = "macrosup")]
struct PyGroverInstance {
    inner: grover::GroverInstance,
}

#[pymethods]
impl PyGroverInstance {
    #[new]
    fn new(num_qubits: usize, solutions: Vec<usize>) -> PyResult<Self> {
        Ok(Self { inner: grover::GroverInstance::new(num_qubits, &solutions).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (num_qubits, num_solutions, seed=0))]
    fn random(num_qubits: usize, num_solutions: usize, seed: u64) -> PyResult<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self { inner: grover::GroverInstance::random(num_qubits, num_solutions, &mut rng).map_err(err)? })
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    #[getter]
    fn solutions(&self) -> Vec<usize> {
        self.inner.solutions().to_vec()
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations()
    }

    #[getter]
    fn total_steps(&self) -> usize {
        self.inner.total_steps()
    }

    fn k_star(&self, s: f64) -> PyResult<usize> {
        grover::k_star(self.inner.iterations(), s).map_err(err)
    }

    fn closed_form_state(&self, k: usize) -> PyResult<PyPureState> {
        Ok(PyPureState { inner: self.inner.closed_form_state(k).map_err(err)? })
    }

    fn gate_state(&self, k: usize) -> PyResult<PyPureState> {
        Ok(PyPureState { inner: self.inner.gate_state(k).map_err(err)? })
    }

    /// `(step, label, e_max)` after every gate of the schedule.
    fn trace(&self) -> PyResult<Vec<(usize, &'static str, f64)>> {
        let t = self.inner.run_with_trace(|s| Ok(vcm::compute_vcm(s)?.e_max()));
        if let Some(f) = t.failure {
            return Err(PyValueError::new_err(f));
        }
        Ok(t.records.iter().map(|r| (r.step, r.label.as_str(), r.value)).collect())
    }

    fn __repr__(&self) -> String {
        format!("GroverInstance(L={}, solutions={:?})", self.inner.num_qubits(), self.inner.solutions())
    }
}

#[pyfunction]
fn compute_vcm(state: &PyPureState) -> PyResult<PyVcm> {
    Ok(PyVcm { inner: vcm::compute_vcm(&state.inner).map_err(err)? })
}

/// Multi-start maximum of the per-site normalized fluctuation.
#[pyfunction]
#[pyo3(signature = (state, restarts=32, iterations=500, seed=0, hermitian_only=false))]
fn brute_force_max_fluctuation(
    state: &PyPureState,
    restarts: usize,
    iterations: usize,
    seed: u64,
    hermitian_only: bool,
) -> PyResult<f64> {
    let config = vcm::BruteForceConfig { restarts, iterations, seed, hermitian_only };
    Ok(vcm::brute_force_max_fluctuation(&state.inner, &config).map_err(err)?.best)
}

#[pyfunction]
fn catalog_names() -> Vec<&'static str> {
    catalog::entries().iter().map(|e| e.name).collect()
}

/// Fits `p_e` to `(L, e_max)` points; returns a dict.
#[pyfunction]
#[pyo3(signature = (points, min_size=8, upper_band=1.8, lower_band=1.2))]
fn fit_pe<'py>(
    py: Python<'py>,
    points: Vec<(usize, f64)>,
    min_size: usize,
    upper_band: f64,
    lower_band: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let mut sample = pindex::FamilySample::new("python");
    for (i, (l, e)) in points.into_iter().enumerate() {
        sample.push(l, i.to_string(), e);
    }
    let config = pindex::FitConfig { min_size, upper_band, lower_band, ..Default::default() };
    let est = pindex::fit_pe(&sample, &config).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("p_e", est.p_e)?;
    d.set_item("stderr", est.slope_stderr)?;
    d.set_item("classification", est.classification.to_string())?;
    d.set_item("linear_slope", est.linear_fit.slope)?;
    d.set_item("points", est.points.iter().map(|p| (p.size, p.e_max)).collect::<Vec<_>>())?;
    Ok(d)
}

/// Root `K ∈ (1/2, 1)` of `(1-m) ln 2 + K ln K + (1-K) ln(1-K)`.
#[pyfunction]
fn solve_k(m: f64) -> PyResult<f64> {
    analytic::solve_k(m).map_err(err)
}

/// `(⟨M_x⟩, ⟨(ΔM_x)²⟩)`.
#[pyfunction]
fn mx_moments(state: &PyPureState) -> (f64, f64) {
    analytic::mx_moments(&state.inner)
}

#[pymodule]
#[pyo3(name = "macrosup")]
fn macrosup_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPureState>()?;
    m.add_class::<PyVcm>()?;
    m.add_class::<PyGroverInstance>()?;
    m.add_function(wrap_pyfunction!(compute_vcm, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_max_fluctuation, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(fit_pe, m)?)?;
    m.add_function(wrap_pyfunction!(solve_k, m)?)?;
    m.add_function(wrap_pyfunction!(mx_moments, m)?)?;
    Ok(())
}
