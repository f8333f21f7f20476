//! Python bindings for the qcat torus-quantization library.
//!
//! The interface uses plain Python types: integer matrices are nested lists,
//! complex vectors/matrices are (nested) lists of Python complex numbers,
//! observables are dicts mapping mode tuples to complex Fourier coefficients.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qcat::error::QcatError;
use qcat::linalg::{CMat, CVec};
use qcat::quantization::TrigObservable;
use qcat::spectra::{self, Quantizer};
use qcat::symplectic::{self, AdaptedFrame, IntSymplecticMatrix};
use qcat::torus::{self, QuantumTorus, TorusOperator, TorusState};

fn err(e: QcatError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vec_to_py(v: &CVec) -> Vec<Complex64> {
    v.to_vec()
}

fn mat_to_py(m: &CMat) -> Vec<Vec<Complex64>> {
    m.outer_iter().map(|row| row.to_vec()).collect()
}

fn vec_from_py(v: Vec<Complex64>) -> CVec {
    Array1::from_vec(v)
}

fn mat_from_py(rows: Vec<Vec<Complex64>>) -> PyResult<CMat> {
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err("matrix rows have unequal lengths"));
    }
    Array2::from_shape_vec((nrows, ncols), rows.into_iter().flatten().collect())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

fn observable_from_py(d: usize, modes: BTreeMap<Vec<i64>, Complex64>) -> PyResult<TrigObservable> {
    TrigObservable::new(d, modes.into_iter().collect()).map_err(err)
}

/// A quantizable integer symplectic matrix A ∈ Sp(2d, Z).
#[pyclass(name = "SymplecticMatrix")]
#[derive(Clone)]
struct PySymplecticMatrix {
    inner: IntSymplecticMatrix,
}

#[pymethods]
impl PySymplecticMatrix {
    #[new]
    fn new(entries: Vec<Vec<i64>>) -> PyResult<Self> {
        Ok(PySymplecticMatrix {
            inner: IntSymplecticMatrix::new(entries).map_err(err)?,
        })
    }

    #[getter]
    fn entries(&self) -> Vec<Vec<i64>> {
        self.inner.entries.clone()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d
    }

    fn quantizable(&self) -> bool {
        symplectic::check_quantizable(&self.inner)
    }

    /// (lambda_max, Lambda_0, Lambda_+) for hyperbolic matrices.
    fn lyapunov(&self) -> PyResult<(f64, f64, f64)> {
        let lyap = symplectic::lyapunov_data(&self.inner).map_err(err)?;
        let (l0, lp) = symplectic::entropy_bounds(&lyap);
        Ok((lyap.lambda_max, l0, lp))
    }

    /// Ehrenfest times (m_E, n_E) at Planck constant 1/(2πN).
    fn ehrenfest_times(&self, n: u64, epsilon: f64) -> PyResult<(i64, i64)> {
        let lyap = symplectic::lyapunov_data(&self.inner).map_err(err)?;
        Ok(symplectic::ehrenfest_times(n, epsilon, &lyap))
    }

    fn __repr__(&self) -> String {
        format!("SymplecticMatrix({:?})", self.inner.entries)
    }
}

/// The quantum torus H_N(κ) ≅ C^{N^d}.
#[pyclass(name = "QuantumTorus")]
#[derive(Clone)]
struct PyQuantumTorus {
    inner: QuantumTorus,
}

#[pymethods]
impl PyQuantumTorus {
    #[new]
    fn new(n: u64, d: usize, kappa: Vec<f64>) -> PyResult<Self> {
        Ok(PyQuantumTorus {
            inner: QuantumTorus::new(n, d, kappa).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> u64 {
        self.inner.n
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d
    }

    #[getter]
    fn kappa(&self) -> Vec<f64> {
        self.inner.kappa.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn hbar(&self) -> f64 {
        self.inner.hbar()
    }

    fn __repr__(&self) -> String {
        format!(
            "QuantumTorus(N={}, d={}, kappa={:?})",
            self.inner.n, self.inner.d, self.inner.kappa
        )
    }
}

/// A vector in H_N(κ), as a list of complex coefficients.
#[pyclass(name = "State")]
#[derive(Clone)]
struct PyState {
    inner: TorusState,
}

#[pymethods]
impl PyState {
    #[new]
    fn new(torus: PyQuantumTorus, coeffs: Vec<Complex64>) -> PyResult<Self> {
        if coeffs.len() != torus.inner.dim() {
            return Err(PyValueError::new_err(format!(
                "state needs {} coefficients, got {}",
                torus.inner.dim(),
                coeffs.len()
            )));
        }
        Ok(PyState {
            inner: TorusState {
                coeffs: vec_from_py(coeffs),
                qt: torus.inner,
            },
        })
    }

    #[getter]
    fn coeffs(&self) -> Vec<Complex64> {
        vec_to_py(&self.inner.coeffs)
    }

    #[getter]
    fn torus(&self) -> PyQuantumTorus {
        PyQuantumTorus {
            inner: self.inner.qt.clone(),
        }
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn normalized(&self) -> PyState {
        PyState {
            inner: self.inner.clone().normalized(),
        }
    }

    fn inner_product(&self, other: &PyState) -> Complex64 {
        self.inner.inner(&other.inner)
    }

    /// Husimi density on a resolution×resolution midpoint grid (d = 1),
    /// returned as a row-major nested list normalized to average 1.
    fn husimi(&self, resolution: usize) -> PyResult<Vec<Vec<f64>>> {
        let grid = spectra::husimi_grid(&self.inner.qt, &self.inner, resolution).map_err(err)?;
        Ok(grid
            .density
            .chunks(resolution)
            .map(|row| row.to_vec())
            .collect())
    }
}

/// An operator on H_N(κ).
#[pyclass(name = "Operator")]
#[derive(Clone)]
struct PyOperator {
    inner: TorusOperator,
}

#[pymethods]
impl PyOperator {
    #[new]
    fn new(torus: PyQuantumTorus, matrix: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let m = mat_from_py(matrix)?;
        let dim = torus.inner.dim();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(PyValueError::new_err(format!(
                "operator must be {dim}x{dim}"
            )));
        }
        Ok(PyOperator {
            inner: TorusOperator {
                matrix: m,
                qt: torus.inner,
            },
        })
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        mat_to_py(&self.inner.matrix)
    }

    #[getter]
    fn torus(&self) -> PyQuantumTorus {
        PyQuantumTorus {
            inner: self.inner.qt.clone(),
        }
    }

    fn adjoint(&self) -> PyOperator {
        PyOperator {
            inner: self.inner.adjoint(),
        }
    }

    fn mul(&self, other: &PyOperator) -> PyOperator {
        PyOperator {
            inner: self.inner.mul(&other.inner),
        }
    }

    fn apply(&self, psi: &PyState) -> PyState {
        PyState {
            inner: self.inner.apply(&psi.inner),
        }
    }

    fn expectation(&self, psi: &PyState) -> Complex64 {
        self.inner.expectation(&psi.inner)
    }

    fn unitarity_defect(&self) -> f64 {
        self.inner.unitarity_defect()
    }

    fn hermiticity_defect(&self) -> f64 {
        self.inner.hermiticity_defect()
    }

    /// Eigendecomposition of a unitary operator: (eigenphases, eigenvectors
    /// as columns, residuals).
    fn eigensystem(&self) -> PyResult<(Vec<f64>, Vec<Vec<Complex64>>, Vec<f64>)> {
        let eig = spectra::eigensystem(&self.inner).map_err(err)?;
        Ok((
            eig.eigenphases.to_vec(),
            mat_to_py(&eig.eigenvectors),
            eig.residuals.clone(),
        ))
    }
}

/// Admissible κ values for A at this N (empty if not quantizable).
#[pyfunction]
fn find_kappa(matrix: &PySymplecticMatrix, n: u64) -> PyResult<Vec<Vec<f64>>> {
    torus::find_kappa(&matrix.inner, n).map_err(err)
}

/// The phase-space translation U(r) on H_N(κ), r ∈ Z^{2d}.
#[pyfunction]
fn translation(torus: &PyQuantumTorus, r: Vec<i64>) -> PyResult<PyOperator> {
    Ok(PyOperator {
        inner: torus::translation(&torus.inner, &r).map_err(err)?,
    })
}

/// The coherent state centered at ρ ∈ [0,1)^{2d}.
#[pyfunction]
#[pyo3(signature = (torus, rho, tol=1e-14))]
fn coherent_state(torus: &PyQuantumTorus, rho: Vec<f64>, tol: f64) -> PyResult<PyState> {
    Ok(PyState {
        inner: torus::coherent_state(&torus.inner, &rho, tol).map_err(err)?,
    })
}

/// The metaplectic propagator M_N(A) intertwining U(r) with U(Ar).
#[pyfunction]
fn propagator(matrix: &PySymplecticMatrix, torus: &PyQuantumTorus) -> PyResult<PyOperator> {
    Ok(PyOperator {
        inner: torus::propagator(&matrix.inner, &torus.inner).map_err(err)?,
    })
}

/// max_r ‖M U(r) M† − U(Ar)‖ over the standard generator set.
#[pyfunction]
fn intertwining_defect(
    propagator: &PyOperator,
    matrix: &PySymplecticMatrix,
) -> PyResult<f64> {
    torus::check_intertwining(&propagator.inner, &matrix.inner, &propagator.inner.qt)
        .map_err(err)
}

fn frame_for(matrix: &PySymplecticMatrix) -> PyResult<AdaptedFrame> {
    if matrix.inner.d == 1 {
        AdaptedFrame::d1_hyperbolic(&matrix.inner).map_err(err)
    } else {
        let lyap = symplectic::lyapunov_data(&matrix.inner).map_err(err)?;
        AdaptedFrame::standard(&lyap, 0.05).map_err(err)
    }
}

/// Quantize a trigonometric observable. `quantizer` is "weyl", "anti_wick"
/// or "op_plus"; `modes` maps 2d-integer mode tuples to complex coefficients
/// (must be closed under k ↦ −k with conjugate coefficients for a real
/// observable). op_plus uses the frame adapted to `matrix`.
#[pyfunction]
#[pyo3(signature = (torus, modes, quantizer="weyl", matrix=None, aw_grid=None))]
fn quantize(
    torus: &PyQuantumTorus,
    modes: BTreeMap<Vec<i64>, Complex64>,
    quantizer: &str,
    matrix: Option<&PySymplecticMatrix>,
    aw_grid: Option<usize>,
) -> PyResult<PyOperator> {
    let q: Quantizer = quantizer.parse().map_err(err)?;
    let a = observable_from_py(torus.inner.d, modes)?;
    let frame = match (q, matrix) {
        (Quantizer::OpPlus, Some(m)) => Some(frame_for(m)?),
        (Quantizer::OpPlus, None) => {
            return Err(PyValueError::new_err(
                "op_plus quantization needs the symplectic matrix for its adapted frame",
            ))
        }
        _ => None,
    };
    let grid = aw_grid.unwrap_or(12 * torus.inner.n as usize);
    Ok(PyOperator {
        inner: spectra::quantize(&torus.inner, &a, q, frame.as_ref(), grid, false)
            .map_err(err)?,
    })
}

/// ⟨ψ|Op(a)|ψ⟩ for a unit-norm state.
#[pyfunction]
#[pyo3(signature = (psi, modes, quantizer="weyl", matrix=None, aw_grid=None))]
fn measure_of_state(
    psi: &PyState,
    modes: BTreeMap<Vec<i64>, Complex64>,
    quantizer: &str,
    matrix: Option<&PySymplecticMatrix>,
    aw_grid: Option<usize>,
) -> PyResult<Complex64> {
    let qt = psi.inner.qt.clone();
    let q: Quantizer = quantizer.parse().map_err(err)?;
    let a = observable_from_py(qt.d, modes)?;
    let frame = match (q, matrix) {
        (Quantizer::OpPlus, Some(m)) => Some(frame_for(m)?),
        (Quantizer::OpPlus, None) => {
            return Err(PyValueError::new_err(
                "op_plus quantization needs the symplectic matrix for its adapted frame",
            ))
        }
        _ => None,
    };
    let grid = aw_grid.unwrap_or(12 * qt.n as usize);
    spectra::measure_of_state(&qt, &psi.inner, q, &a, frame.as_ref(), grid).map_err(err)
}

/// Maassen–Uffink entropic uncertainty check. `projectors` is a list of
/// PSD matrices summing to the identity, `basis` a unitary matrix, `psi`
/// a unit vector. Returns (lhs, rhs, margin).
#[pyfunction]
fn eup_check(
    projectors: Vec<Vec<Vec<Complex64>>>,
    basis: Vec<Vec<Complex64>>,
    psi: Vec<Complex64>,
) -> PyResult<(f64, f64, f64)> {
    let pis: Vec<CMat> = projectors
        .into_iter()
        .map(mat_from_py)
        .collect::<PyResult<_>>()?;
    let u = mat_from_py(basis)?;
    let v = vec_from_py(psi);
    let rep = qcat::entropy::eup_check(&pis, &u, &v).map_err(err)?;
    Ok((rep.lhs, rep.rhs, rep.margin))
}

#[pymodule]
fn qcat_py(_py: Python<'_>, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySymplecticMatrix>()?;
    m.add_class::<PyQuantumTorus>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyOperator>()?;
    m.add_function(wrap_pyfunction!(find_kappa, m)?)?;
    m.add_function(wrap_pyfunction!(translation, m)?)?;
    m.add_function(wrap_pyfunction!(coherent_state, m)?)?;
    m.add_function(wrap_pyfunction!(propagator, m)?)?;
    m.add_function(wrap_pyfunction!(intertwining_defect, m)?)?;
    m.add_function(wrap_pyfunction!(quantize, m)?)?;
    m.add_function(wrap_pyfunction!(measure_of_state, m)?)?;
    m.add_function(wrap_pyfunction!(eup_check, m)?)?;
    Ok(())
}
