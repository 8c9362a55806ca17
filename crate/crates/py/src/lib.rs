//! Python bindings for the operator-model toolkit: matrices, polar data,
//! spectral measures, the multiplication-operator picture, normality
//! verdicts, density experiments, and the verification suites.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use specrep_core::calculus::BasisKind;
use specrep_core::generate::OperatorKind;
use specrep_core::suite::{SuiteConfig, SuiteName};
use specrep_core::{linalg, tol};

fn core_err(e: specrep_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_basis(name: &str) -> PyResult<BasisKind> {
    match name {
        "powers_of_x" => Ok(BasisKind::PowersOfX),
        "powers_of_inverse_x" => Ok(BasisKind::PowersOfInverseX),
        "powers_of_x_squared" => Ok(BasisKind::PowersOfXSquared),
        _ => Err(PyValueError::new_err(format!(
            "unknown basis: {name} (expected powers_of_x, powers_of_inverse_x, powers_of_x_squared)"
        ))),
    }
}

/// Dense complex matrix; rows of entries, any mix of int/float/complex.
#[pyclass(name = "ComplexMatrix")]
struct PyComplexMatrix {
    inner: specrep_core::ComplexMatrix,
}

#[pymethods]
impl PyComplexMatrix {
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(PyValueError::new_err("ragged rows"));
        }
        let data: Vec<Complex64> = rows.into_iter().flatten().collect();
        specrep_core::ComplexMatrix::new(n_rows, n_cols, data)
            .map(|inner| Self { inner })
            .map_err(core_err)
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        Self {
            inner: specrep_core::ComplexMatrix::identity(n),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        specrep_core::ComplexMatrix::from_json(text)
            .map(|inner| Self { inner })
            .map_err(core_err)
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    fn entry(&self, i: usize, j: usize) -> PyResult<Complex64> {
        if i >= self.inner.rows() || j >= self.inner.cols() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.get(i, j))
    }

    fn to_lists(&self) -> Vec<Vec<Complex64>> {
        (0..self.inner.rows())
            .map(|i| (0..self.inner.cols()).map(|j| self.inner.get(i, j)).collect())
            .collect()
    }

    fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    fn norm(&self) -> f64 {
        linalg::operator_norm(&self.inner)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __matmul__(&self, rhs: &Self) -> PyResult<Self> {
        if self.inner.cols() != rhs.inner.rows() {
            return Err(PyValueError::new_err("shape mismatch"));
        }
        Ok(Self {
            inner: &self.inner * &rhs.inner,
        })
    }

    fn __repr__(&self) -> String {
        format!("ComplexMatrix({}x{})", self.inner.rows(), self.inner.cols())
    }
}

/// T = U P with U unitary and P positive semidefinite.
#[pyclass(name = "PolarDecomposition")]
struct PyPolarDecomposition {
    #[pyo3(get)]
    is_invertible: bool,
    unitary: specrep_core::ComplexMatrix,
    positive: specrep_core::ComplexMatrix,
}

#[pymethods]
impl PyPolarDecomposition {
    #[getter]
    fn unitary_part(&self) -> PyComplexMatrix {
        PyComplexMatrix {
            inner: self.unitary.clone(),
        }
    }

    #[getter]
    fn positive_part(&self) -> PyComplexMatrix {
        PyComplexMatrix {
            inner: self.positive.clone(),
        }
    }
}

/// Distinct eigenvalues of a Hermitian matrix with projectors.
#[pyclass(name = "SpectrumAtoms")]
struct PySpectrumAtoms {
    inner: specrep_core::SpectrumAtoms,
}

#[pymethods]
impl PySpectrumAtoms {
    #[getter]
    fn atoms(&self) -> Vec<f64> {
        self.inner.atoms.clone()
    }

    #[getter]
    fn multiplicities(&self) -> Vec<usize> {
        self.inner.multiplicities.clone()
    }

    fn projector(&self, j: usize) -> PyResult<PyComplexMatrix> {
        self.inner
            .projectors
            .get(j)
            .map(|p| PyComplexMatrix { inner: p.clone() })
            .ok_or_else(|| PyValueError::new_err("atom index out of range"))
    }
}

/// Finitely supported positive measure on the line.
#[pyclass(name = "DiscreteMeasure")]
struct PyDiscreteMeasure {
    inner: specrep_core::DiscreteMeasure,
}

#[pymethods]
impl PyDiscreteMeasure {
    #[new]
    fn new(atoms: Vec<f64>, weights: Vec<f64>) -> PyResult<Self> {
        specrep_core::DiscreteMeasure::new(atoms, weights)
            .map(|inner| Self { inner })
            .map_err(core_err)
    }

    #[getter]
    fn atoms(&self) -> Vec<f64> {
        self.inner.atoms().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    fn total_mass(&self) -> f64 {
        self.inner.total_mass()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        self.inner.to_json()
    }
}

/// Multiplication-operator picture of T on the L^2 model of |T|.
#[pyclass(name = "MultiplicationRep")]
struct PyMultiplicationRep {
    #[pyo3(get)]
    diag_residual: f64,
    #[pyo3(get)]
    representation_holds: bool,
    #[pyo3(get)]
    unitary_part_residual: f64,
    #[pyo3(get)]
    atoms: Vec<f64>,
    #[pyo3(get)]
    psi: Vec<Complex64>,
    #[pyo3(get)]
    eta: Vec<f64>,
    isometry: specrep_core::ComplexMatrix,
    conjugated: specrep_core::ComplexMatrix,
}

#[pymethods]
impl PyMultiplicationRep {
    #[getter]
    fn isometry(&self) -> PyComplexMatrix {
        PyComplexMatrix {
            inner: self.isometry.clone(),
        }
    }

    #[getter]
    fn conjugated(&self) -> PyComplexMatrix {
        PyComplexMatrix {
            inner: self.conjugated.clone(),
        }
    }
}

/// The three normality verdicts and whether they agree.
#[pyclass(name = "NormalityReport")]
struct PyNormalityReport {
    #[pyo3(get)]
    normal_residual: f64,
    #[pyo3(get)]
    commutant_residual: f64,
    #[pyo3(get)]
    diag_residual: Option<f64>,
    #[pyo3(get)]
    normal_verdict: bool,
    #[pyo3(get)]
    commutant_verdict: bool,
    #[pyo3(get)]
    diag_verdict: Option<bool>,
    #[pyo3(get)]
    consistent: bool,
}

/// Density experiment outcome.
#[pyclass(name = "DensityReport")]
struct PyDensityReport {
    #[pyo3(get)]
    degrees: Vec<usize>,
    #[pyo3(get)]
    errors: Vec<f64>,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    achieved_tol: f64,
}

#[pyfunction]
fn polar(matrix: &PyComplexMatrix) -> PyResult<PyPolarDecomposition> {
    let pd = linalg::polar(&matrix.inner).map_err(core_err)?;
    Ok(PyPolarDecomposition {
        is_invertible: pd.is_invertible,
        unitary: pd.unitary_part,
        positive: pd.positive_part,
    })
}

/// Eigenvalues (ascending) and eigenvector matrix of a Hermitian input.
#[pyfunction]
fn hermitian_eig(matrix: &PyComplexMatrix) -> PyResult<(Vec<f64>, PyComplexMatrix)> {
    let eig = linalg::hermitian_eig(&matrix.inner).map_err(core_err)?;
    Ok((eig.values, PyComplexMatrix { inner: eig.vectors }))
}

#[pyfunction]
fn operator_norm(matrix: &PyComplexMatrix) -> f64 {
    linalg::operator_norm(&matrix.inner)
}

#[pyfunction]
fn spectrum_atoms(matrix: &PyComplexMatrix) -> PyResult<PySpectrumAtoms> {
    specrep_core::SpectrumAtoms::from_hermitian(&matrix.inner)
        .map(|inner| PySpectrumAtoms { inner })
        .map_err(core_err)
}

/// (has_cyclic_vector, canonical cyclic vector or None) for a positive matrix.
#[pyfunction]
fn has_cyclic_vector(matrix: &PyComplexMatrix) -> PyResult<(bool, Option<Vec<Complex64>>)> {
    specrep_core::has_cyclic_vector(&matrix.inner).map_err(core_err)
}

/// Orthonormal bases of the cyclic subspaces of a positive matrix, with the
/// cyclic vector of each.
#[pyfunction]
fn cyclic_decomposition(
    matrix: &PyComplexMatrix,
) -> PyResult<(Vec<PyComplexMatrix>, Vec<Vec<Complex64>>)> {
    let dec = specrep_core::cyclic_decomposition(&matrix.inner).map_err(core_err)?;
    let subspaces = dec
        .subspaces
        .into_iter()
        .map(|s| PyComplexMatrix { inner: s })
        .collect();
    Ok((subspaces, dec.cyclic_vectors))
}

#[pyfunction]
fn spectral_measure(
    matrix: &PyComplexMatrix,
    xi: Vec<Complex64>,
) -> PyResult<PyDiscreteMeasure> {
    let atoms = specrep_core::SpectrumAtoms::from_hermitian(&matrix.inner).map_err(core_err)?;
    specrep_core::spectral_measure(&atoms, &xi)
        .map(|inner| PyDiscreteMeasure { inner })
        .map_err(core_err)
}

#[pyfunction]
fn pushforward_inversion(measure: &PyDiscreteMeasure) -> PyResult<PyDiscreteMeasure> {
    specrep_core::pushforward_inversion(&measure.inner)
        .map(|inner| PyDiscreteMeasure { inner })
        .map_err(core_err)
}

/// Atom-wise derivative d(nu)/d(mu) over the atoms of mu.
#[pyfunction]
#[pyo3(signature = (nu, mu, atom_match_tol=1e-9))]
fn radon_nikodym(
    nu: &PyDiscreteMeasure,
    mu: &PyDiscreteMeasure,
    atom_match_tol: f64,
) -> PyResult<Vec<Complex64>> {
    specrep_core::radon_nikodym(&nu.inner, &mu.inner, atom_match_tol)
        .map(|d| d.values)
        .map_err(core_err)
}

#[pyfunction]
#[pyo3(signature = (matrix, tol=tol::BASE))]
fn build_multiplication_rep(
    matrix: &PyComplexMatrix,
    tol: f64,
) -> PyResult<PyMultiplicationRep> {
    let rep = specrep_core::build_multiplication_rep(&matrix.inner, tol).map_err(core_err)?;
    Ok(PyMultiplicationRep {
        diag_residual: rep.diag_residual,
        representation_holds: rep.representation_holds,
        unitary_part_residual: rep.unitary_part_residual,
        atoms: rep.model.measure.atoms().to_vec(),
        psi: rep.symbol_psi.values,
        eta: rep.weight_eta.values.iter().map(|e| e.re).collect(),
        isometry: rep.model.isometry,
        conjugated: rep.conjugated,
    })
}

#[pyfunction]
fn commutant_membership(matrix: &PyComplexMatrix) -> PyResult<f64> {
    specrep_core::commutant_membership(&matrix.inner).map_err(core_err)
}

#[pyfunction]
#[pyo3(signature = (matrix, tol=tol::BASE))]
fn normality_equivalence(matrix: &PyComplexMatrix, tol: f64) -> PyResult<PyNormalityReport> {
    let report = specrep_core::normality_equivalence(&matrix.inner, tol).map_err(core_err)?;
    Ok(PyNormalityReport {
        normal_residual: report.normal_residual,
        commutant_residual: report.commutant_residual,
        diag_residual: report.diag_residual,
        normal_verdict: report.normal_verdict,
        commutant_verdict: report.commutant_verdict,
        diag_verdict: report.diag_verdict,
        consistent: report.consistent,
    })
}

/// Power-transport comparison as a JSON string.
#[pyfunction]
#[pyo3(signature = (matrix, k, tol=tol::BASE))]
fn verify_power_transport(matrix: &PyComplexMatrix, k: u32, tol: f64) -> PyResult<String> {
    if k == 0 {
        return Err(PyValueError::new_err("power must be at least 1"));
    }
    let report = specrep_core::verify_power_transport(&matrix.inner, k, tol).map_err(core_err)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Density experiment with Python callables as targets.
#[pyfunction]
#[pyo3(signature = (basis, interval, targets, tol=1e-6, max_degree=25))]
fn verify_density(
    basis: &str,
    interval: (f64, f64),
    targets: Vec<Py<PyAny>>,
    tol: f64,
    max_degree: usize,
) -> PyResult<PyDensityReport> {
    let basis = parse_basis(basis)?;
    let wrapped: Vec<Box<dyn Fn(f64) -> f64>> = targets
        .into_iter()
        .map(|target| {
            Box::new(move |x: f64| {
                Python::attach(|py| {
                    target
                        .bind(py)
                        .call1((x,))
                        .and_then(|v| v.extract::<f64>())
                        .unwrap_or(f64::NAN)
                })
            }) as Box<dyn Fn(f64) -> f64>
        })
        .collect();
    let refs: Vec<&dyn Fn(f64) -> f64> = wrapped.iter().map(|b| b.as_ref()).collect();
    let report =
        specrep_core::verify_density(basis, interval, &refs, tol, max_degree).map_err(core_err)?;
    Ok(PyDensityReport {
        degrees: report.degrees,
        errors: report.errors,
        converged: report.converged,
        achieved_tol: report.achieved_tol,
    })
}

/// Seeded operator of a named family: invertible, normal, unitary, positive,
/// hermitian, shift_like.
#[pyfunction]
#[pyo3(signature = (kind, dim, seed=42))]
fn generate_operator(kind: &str, dim: usize, seed: u64) -> PyResult<PyComplexMatrix> {
    let kind = OperatorKind::parse(kind)
        .ok_or_else(|| PyValueError::new_err(format!("unknown operator kind: {kind}")))?;
    if dim == 0 {
        return Err(PyValueError::new_err("dim must be positive"));
    }
    Ok(PyComplexMatrix {
        inner: specrep_core::generate_operator(kind, dim, seed),
    })
}

/// Runs a named verification suite; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (suite, trials=50, dims=vec![2, 3, 4, 6, 8, 12], seed=42, tol=tol::BASE))]
fn run_suite(
    suite: &str,
    trials: usize,
    dims: Vec<usize>,
    seed: u64,
    tol: f64,
) -> PyResult<String> {
    let suite = SuiteName::parse(suite)
        .ok_or_else(|| PyValueError::new_err(format!("unknown suite: {suite}")))?;
    if dims.is_empty() || dims.contains(&0) {
        return Err(PyValueError::new_err("dims must be positive"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(PyValueError::new_err("tol must be positive"));
    }
    let report = specrep_core::run_suite(&SuiteConfig::new(suite, trials, dims, seed, tol));
    Ok(report.to_json())
}

#[pymodule]
fn specrep(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyComplexMatrix>()?;
    m.add_class::<PyPolarDecomposition>()?;
    m.add_class::<PySpectrumAtoms>()?;
    m.add_class::<PyDiscreteMeasure>()?;
    m.add_class::<PyMultiplicationRep>()?;
    m.add_class::<PyNormalityReport>()?;
    m.add_class::<PyDensityReport>()?;
    m.add_function(wrap_pyfunction!(polar, m)?)?;
    m.add_function(wrap_pyfunction!(hermitian_eig, m)?)?;
    m.add_function(wrap_pyfunction!(operator_norm, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_atoms, m)?)?;
    m.add_function(wrap_pyfunction!(has_cyclic_vector, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_measure, m)?)?;
    m.add_function(wrap_pyfunction!(pushforward_inversion, m)?)?;
    m.add_function(wrap_pyfunction!(radon_nikodym, m)?)?;
    m.add_function(wrap_pyfunction!(build_multiplication_rep, m)?)?;
    m.add_function(wrap_pyfunction!(commutant_membership, m)?)?;
    m.add_function(wrap_pyfunction!(normality_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(verify_power_transport, m)?)?;
    m.add_function(wrap_pyfunction!(verify_density, m)?)?;
    m.add_function(wrap_pyfunction!(generate_operator, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add("DEFAULT_TOL", tol::BASE)?;
    m.add("GENERATOR_ID", specrep_core::GENERATOR_ID)?;
    Ok(())
}
