//! Hermitian eigendecomposition, SVD-based polar decomposition, and
//! clustering of numerical eigenvalues into distinct spectrum atoms.
//!
//! The eigensolver and SVD are delegated to nalgebra; results are
//! post-processed into a canonical form (ascending eigenvalues, column phases
//! fixed) so repeated runs on the same input produce identical output.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::tol;

/// Eigendecomposition of a Hermitian matrix: `A = V diag(values) V*` with
/// `values` ascending and `V` unitary.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors, in the same order as `values`.
    pub vectors: ComplexMatrix,
}

/// The factorization `T = U P` with `U` unitary and `P = (T*T)^{1/2}`.
///
/// For singular `T` the partial isometry is completed to a unitary: the SVD
/// route maps an orthonormal basis of `ker(P)` onto an orthonormal basis of
/// the orthogonal complement of `ran(T)`, so `U P = T` still holds exactly.
#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    pub unitary_part: ComplexMatrix,
    pub positive_part: ComplexMatrix,
    /// Smallest singular value above tolerance.
    pub is_invertible: bool,
}

/// Distinct eigenvalues of a Hermitian matrix with their spectral projectors.
#[derive(Debug, Clone)]
pub struct SpectrumAtoms {
    /// Ascending distinct eigenvalues.
    pub atoms: Vec<f64>,
    /// Orthogonal projector onto each eigenspace.
    pub projectors: Vec<ComplexMatrix>,
    pub multiplicities: Vec<usize>,
}

impl SpectrumAtoms {
    /// Dimension of the underlying space.
    pub fn dim(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Applies the j-th spectral projector to a vector.
    pub fn project(&self, j: usize, x: &[Complex64]) -> Vec<Complex64> {
        self.projectors[j].matvec(x)
    }

    /// Computes atoms of a positive (Hermitian) matrix with default tolerances.
    pub fn from_hermitian(p: &ComplexMatrix) -> Result<Self> {
        let eig = hermitian_eig(p)?;
        let ctol = tol::cluster(operator_norm(p));
        Ok(cluster_spectrum(&eig, ctol))
    }
}

pub(crate) fn to_dmatrix(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

pub(crate) fn from_dmatrix(m: &DMatrix<Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Conjugate transpose.
pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    to_dmatrix(m)
        .singular_values()
        .iter()
        .fold(0.0, |a, &s| f64::max(a, s))
}

/// Inverse via LU; `None` when nalgebra reports the matrix singular.
pub fn try_inverse(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    to_dmatrix(m).try_inverse().map(|inv| from_dmatrix(&inv))
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is checked against `||A - A*|| <= tol_base * max(1, ||A||)` and
/// symmetrized before the solve so rounding in the caller cannot skew the
/// eigenvectors. Output is canonical: eigenvalues ascending, each eigenvector
/// scaled so its largest-modulus entry is real positive.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenSystem> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let norm = operator_norm(a);
    let herm_residual = operator_norm(&(a - &a.adjoint()));
    if herm_residual > tol::relative(norm) {
        return Err(Error::NotHermitian {
            residual: herm_residual,
        });
    }

    let n = a.rows();
    let sym = ComplexMatrix::from_fn(n, n, |i, j| (a.get(i, j) + a.get(j, i).conj()) * 0.5);
    let se = to_dmatrix(&sym).symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));

    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let v = se.eigenvectors.column(src);
        // fix the phase: largest-modulus entry becomes real positive
        let mut pivot = 0;
        for i in 1..n {
            if v[i].norm_sqr() > v[pivot].norm_sqr() {
                pivot = i;
            }
        }
        let phase = if v[pivot].norm() > 0.0 {
            v[pivot].conj() / v[pivot].norm()
        } else {
            Complex64::ONE
        };
        for i in 0..n {
            vectors.set(i, col, v[i] * phase);
        }
    }
    Ok(EigenSystem { values, vectors })
}

/// Polar decomposition `T = U P` via SVD: `U = U_svd V*`, `P = V S V*`.
pub fn polar(t: &ComplexMatrix) -> Result<PolarDecomposition> {
    if !t.is_square() {
        return Err(Error::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let n = t.rows();
    if n == 0 {
        return Ok(PolarDecomposition {
            unitary_part: ComplexMatrix::zeros(0, 0),
            positive_part: ComplexMatrix::zeros(0, 0),
            is_invertible: true,
        });
    }
    let svd = to_dmatrix(t).svd(true, true);
    let u_svd = svd.u.as_ref().expect("svd with vectors");
    let v_t = svd.v_t.as_ref().expect("svd with vectors");
    let sigma = DMatrix::from_diagonal(&svd.singular_values.map(|s| Complex64::new(s, 0.0)));

    let unitary_part = from_dmatrix(&(u_svd * v_t));
    let positive_part = from_dmatrix(&(v_t.adjoint() * &sigma * v_t));

    let s_max = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    let s_min = svd
        .singular_values
        .iter()
        .fold(f64::INFINITY, |a, &s| a.min(s));
    Ok(PolarDecomposition {
        unitary_part,
        positive_part,
        is_invertible: s_min > tol::relative(s_max),
    })
}

/// Groups numerically-close eigenvalues into distinct atoms.
///
/// Consecutive eigenvalues with gap at most `cluster_tol` are merged; the atom
/// value is the mean of the group and the projector is assembled from the
/// grouped eigenvectors.
pub fn cluster_spectrum(eig: &EigenSystem, cluster_tol: f64) -> SpectrumAtoms {
    let n = eig.values.len();
    let mut atoms = Vec::new();
    let mut projectors = Vec::new();
    let mut multiplicities = Vec::new();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] <= cluster_tol {
            end += 1;
        }
        let group = &eig.values[start..end];
        atoms.push(group.iter().sum::<f64>() / group.len() as f64);
        multiplicities.push(end - start);

        let dim = eig.vectors.rows();
        let mut proj = ComplexMatrix::zeros(dim, dim);
        for k in start..end {
            let v = eig.vectors.column(k);
            for i in 0..dim {
                for j in 0..dim {
                    let add = v[i] * v[j].conj();
                    proj.set(i, j, proj.get(i, j) + add);
                }
            }
        }
        projectors.push(proj);
        start = end;
    }

    SpectrumAtoms {
        atoms,
        projectors,
        multiplicities,
    }
}
