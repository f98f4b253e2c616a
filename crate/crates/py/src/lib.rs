//! Python bindings for `qsca_core`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qsca_core::qstate::{self, ResetVariant};
use qsca_core::sca::{self, BasicString, Rule};
use qsca_core::spin_chain::{self, GeneratorVariant};
use qsca_core::unitary_compile::{self, ReckPlan as CorePlan};
use qsca_core::frt_quantum as frt;
use qsca_core::{quantize, suite, Error, Operator};

fn err(e: Error) -> PyErr {
    match e {
        Error::StepDiverged { .. } | Error::DimensionTooLarge { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn rule(radius: usize) -> PyResult<Rule> {
    Rule::new(radius).map_err(err)
}

/// A finite configuration of the automaton: `origin` is the site of the first bit.
#[pyclass(module = "qsca", name = "Configuration", from_py_object)]
#[derive(Clone)]
struct PyConfiguration(sca::Configuration);

#[pymethods]
impl PyConfiguration {
    #[new]
    fn new(origin: i64, bits: &str) -> PyResult<Self> {
        let bits = qsca_core::bits::parse_bits(bits).map_err(err)?;
        Ok(Self(sca::Configuration::new(origin, bits)))
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        text.parse().map(Self).map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn origin(&self) -> i64 {
        self.0.origin()
    }

    #[getter]
    fn bits(&self) -> String {
        qsca_core::bits::format_bits(self.0.bits())
    }

    fn get(&self, site: i64) -> u8 {
        self.0.get(site)
    }

    fn step(&self, radius: usize) -> PyResult<Self> {
        sca::step(rule(radius)?, &self.0).map(Self).map_err(err)
    }

    /// The configuration followed by `steps` successors.
    fn evolve(&self, radius: usize, steps: usize) -> PyResult<Vec<Self>> {
        let history = sca::evolve(rule(radius)?, &self.0, steps).map_err(err)?;
        Ok(history.into_iter().map(Self).collect())
    }

    /// Blocks of every particle, as bit strings.
    fn particles(&self, radius: usize) -> PyResult<Vec<(i64, Vec<String>)>> {
        let found = sca::parse_particles(rule(radius)?, &self.0);
        Ok(found
            .iter()
            .map(|p| (p.start_site(), p.blocks().iter().map(|b| qsca_core::bits::format_bits(b.bits())).collect()))
            .collect())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Configuration({}, {:?})", self.0.origin(), self.bits())
    }
}

/// Dense state of `n_qubits` qubits; qubit 0 is the most significant bit.
#[pyclass(module = "qsca", name = "StateVector", from_py_object)]
#[derive(Clone)]
struct PyStateVector(qstate::StateVector);

#[pymethods]
impl PyStateVector {
    #[new]
    fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        qstate::StateVector::new(n_qubits, amplitudes).map(Self).map_err(err)
    }

    #[staticmethod]
    fn basis(word: &str) -> PyResult<Self> {
        let bits = qsca_core::bits::parse_bits(word).map_err(err)?;
        qstate::basis_state(&bits).map(Self).map_err(err)
    }

    #[staticmethod]
    fn uniform_nonnull(n_qubits: usize) -> PyResult<Self> {
        qstate::uniform_superposition_nonnull(n_qubits).map(Self).map_err(err)
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn support(&self) -> Vec<usize> {
        self.0.support()
    }

    fn basis_index(&self) -> Option<usize> {
        self.0.as_basis_index()
    }

    fn apply(&self, circuit: &PyCircuit) -> PyResult<Self> {
        self.0.apply_circuit(&circuit.0).map(Self).map_err(err)
    }

    /// Applies the single-window transition operator `U_f`.
    fn apply_uf(&self, radius: usize) -> PyResult<Self> {
        quantize::build_uf_matrix(radius)
            .and_then(|u| u.apply(&self.0))
            .map(Self)
            .map_err(err)
    }
}

/// A gate list over a fixed number of qubits.
#[pyclass(module = "qsca", name = "Circuit", from_py_object)]
#[derive(Clone)]
struct PyCircuit(qstate::Circuit);

#[pymethods]
impl PyCircuit {
    /// Parses the gate-list text format (1-based qubits).
    #[staticmethod]
    #[pyo3(signature = (text, n_qubits=None))]
    fn parse(text: &str, n_qubits: Option<usize>) -> PyResult<Self> {
        let c = match n_qubits {
            Some(n) => qstate::parse_gatelist_with_qubits(text, n),
            None => qstate::parse_gatelist(text),
        };
        c.map(Self).map_err(err)
    }

    /// Circuit updating `site` (0-based) of an `n_qubits` register.
    #[staticmethod]
    fn site(radius: usize, site: usize, n_qubits: usize) -> PyResult<Self> {
        quantize::build_uf_circuit(radius, site, n_qubits).map(Self).map_err(err)
    }

    #[staticmethod]
    fn window(radius: usize) -> PyResult<Self> {
        quantize::window_circuit(radius).map(Self).map_err(err)
    }

    #[staticmethod]
    fn total_step(radius: usize, n_sites: usize) -> PyResult<Self> {
        quantize::total_step_circuit(radius, n_sites).map(Self).map_err(err)
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn to_text(&self) -> String {
        qstate::emit_gatelist(&self.0)
    }

    fn matrix(&self) -> PyResult<Vec<Vec<Complex64>>> {
        qstate::circuit_matrix(&self.0).map(|m| rows(&m)).map_err(err)
    }
}

/// A decomposition into embedded 2x2 rotations followed by diagonal phases.
#[pyclass(module = "qsca", name = "ReckPlan", from_py_object)]
#[derive(Clone)]
struct PyReckPlan(CorePlan);

#[pymethods]
impl PyReckPlan {
    #[staticmethod]
    #[pyo3(signature = (matrix, tol=1e-10))]
    fn decompose(matrix: Vec<Vec<Complex64>>, tol: f64) -> PyResult<Self> {
        let op = square(&matrix)?;
        unitary_compile::reck_decompose(&op, tol).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        CorePlan::from_text(text).map(Self).map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim
    }

    #[getter]
    fn n_rotations(&self) -> usize {
        self.0.rotations.len()
    }

    fn reconstruct(&self) -> Vec<Vec<Complex64>> {
        rows(&unitary_compile::reck_reconstruct(&self.0))
    }
}

fn rows(m: &Operator) -> Vec<Vec<Complex64>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect()).collect()
}

fn square(m: &[Vec<Complex64>]) -> PyResult<Operator> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square and non-empty"));
    }
    Ok(Operator::from_fn(n, |i, j| m[i][j]))
}

/// Nonzero entries `(row, col, value)` of `U_f`, row-major.
#[pyfunction]
fn uf_triplets(radius: usize) -> PyResult<Vec<(usize, usize, f64)>> {
    let u = quantize::build_uf_matrix(radius).map_err(err)?;
    Ok(u.to_sparse().entries().iter().map(|&(i, j, v)| (i, j, v.re)).collect())
}

/// Range and domain residuals of the partial-isometry identities.
#[pyfunction]
fn uf_isometry(radius: usize) -> PyResult<(f64, f64)> {
    let u = quantize::build_uf_matrix(radius).map_err(err)?;
    let rep = quantize::check_partial_isometry(&u);
    Ok((rep.range_residual, rep.domain_residual))
}

#[pyfunction]
#[pyo3(signature = (history, pbm=false))]
fn diagram(history: Vec<PyConfiguration>, pbm: bool) -> String {
    let h: Vec<sca::Configuration> = history.into_iter().map(|c| c.0).collect();
    if pbm {
        sca::diagram_pbm(&h)
    } else {
        sca::diagram_ascii(&h)
    }
}

/// Text report of the classical fast rule on one single-particle configuration.
#[pyfunction]
#[pyo3(signature = (radius, config, horizon=0))]
fn frt_classical(radius: usize, config: &PyConfiguration, horizon: usize) -> PyResult<(bool, String)> {
    let rule = rule(radius)?;
    let particles = sca::parse_particles(rule, &config.0);
    let [p] = particles.as_slice() else {
        return Err(PyValueError::new_err(format!("expected one particle, found {}", particles.len())));
    };
    let rep = sca::frt_check(rule, p, horizon);
    Ok((rep.all_matched(), rep.to_text()))
}

/// Runs the block circuit on a particle; returns `(transported, report text)`.
#[pyfunction]
#[pyo3(signature = (radius, blocks, padding=None, reset="extended"))]
fn frt_quantum(radius: usize, blocks: Vec<String>, padding: Option<usize>, reset: &str) -> PyResult<(bool, String)> {
    let rule = rule(radius)?;
    let variant: ResetVariant = reset.parse().map_err(err)?;
    let blocks = blocks
        .iter()
        .map(|b| BasicString::parse(rule, b))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let padding = padding.unwrap_or(blocks.len() + 1);
    let rep = frt::run_frt(rule, &blocks, padding, variant).map_err(err)?;
    Ok((rep.transported, rep.to_text()))
}

/// Pauli-term text of the chain Hamiltonian.
#[pyfunction]
#[pyo3(signature = (n_sites, radius, variant="verified"))]
fn hamiltonian(n_sites: usize, radius: usize, variant: &str) -> PyResult<String> {
    let v: GeneratorVariant = variant.parse().map_err(err)?;
    spin_chain::build_chain_hamiltonian(n_sites, radius, v)
        .map(|h| h.to_text())
        .map_err(err)
}

#[pyfunction]
fn parallelism(radius: usize) -> PyResult<String> {
    quantize::parallelism_demo(radius).map(|r| r.to_text()).map_err(err)
}

/// The invariant suite; returns `(passed, report text)`.
#[pyfunction]
#[pyo3(signature = (seed=42))]
fn run_suite(seed: u64) -> PyResult<(bool, String)> {
    let rep = suite::run_suite(seed).map_err(err)?;
    Ok((rep.passed(), rep.to_text()))
}

#[pymodule]
fn qsca(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfiguration>()?;
    m.add_class::<PyStateVector>()?;
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyReckPlan>()?;
    m.add_function(wrap_pyfunction!(uf_triplets, m)?)?;
    m.add_function(wrap_pyfunction!(uf_isometry, m)?)?;
    m.add_function(wrap_pyfunction!(diagram, m)?)?;
    m.add_function(wrap_pyfunction!(frt_classical, m)?)?;
    m.add_function(wrap_pyfunction!(frt_quantum, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(parallelism, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
