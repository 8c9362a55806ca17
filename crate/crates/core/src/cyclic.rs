//! Cyclic-subspace decomposition under the algebra generated by a positive
//! matrix, and verification of how adjoint and inverse images of those
//! subspaces line up across consecutive operator powers.
//!
//! Subspaces are assembled from spectral projectors rather than raw Krylov
//! vectors: span{Pi_j xi} is the same closure as span{xi, P xi, P^2 xi, ...}
//! but stays well conditioned.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    from_dmatrix, operator_norm, polar, to_dmatrix, try_inverse, SpectrumAtoms,
};
use crate::matrix::{normalize, vec_norm, ComplexMatrix};
use crate::tol;

/// Orthogonal cyclic subspaces spanning the whole space, with one cyclic
/// vector per subspace.
#[derive(Debug, Clone)]
pub struct CyclicDecomposition {
    /// Each entry holds orthonormal columns spanning one subspace.
    pub subspaces: Vec<ComplexMatrix>,
    pub cyclic_vectors: Vec<Vec<Complex64>>,
    pub source_operator: ComplexMatrix,
}

impl CyclicDecomposition {
    /// Orthogonal projector onto the i-th subspace.
    pub fn projector(&self, i: usize) -> ComplexMatrix {
        let s = &self.subspaces[i];
        s * &s.adjoint()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subspaces.iter().map(ComplexMatrix::cols).collect()
    }
}

/// Measured outcome of the power-transport check at one power k: how the
/// adjoint and inverse images of the level-k subspaces compare to the
/// level-(k+1) subspaces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportReport {
    pub power_k: u32,
    /// Index of the level-(k+1) subspace matched to each level-k subspace,
    /// `None` when no partner was available.
    pub matching: Vec<Option<usize>>,
    /// Distance from T* H_i to its matched partner.
    pub adjoint_image_residuals: Vec<f64>,
    /// Distance from T^{-1} H_i to its matched partner.
    pub inverse_image_residuals: Vec<f64>,
    /// Distance between the two images themselves.
    pub images_agree_residuals: Vec<f64>,
    pub adjoint_claim_holds: bool,
    pub inverse_claim_holds: bool,
    pub images_agree: bool,
}

/// Distance between subspaces given by orthonormal-column bases: the operator
/// norm of the difference of their orthogonal projectors. For equal
/// dimensions this is the sine of the largest principal angle; for unequal
/// dimensions it is 1.
pub fn subspace_distance(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    let px = x * &x.adjoint();
    let py = y * &y.adjoint();
    operator_norm(&(&px - &py))
}

/// Smallest subspace containing xi that is invariant under every polynomial
/// in P: the span of the nonzero spectral components Pi_j xi.
pub fn cyclic_subspace(p: &ComplexMatrix, xi: &[Complex64]) -> Result<ComplexMatrix> {
    let atoms = SpectrumAtoms::from_hermitian(p)?;
    cyclic_subspace_from_atoms(&atoms, xi)
}

fn cyclic_subspace_from_atoms(atoms: &SpectrumAtoms, xi: &[Complex64]) -> Result<ComplexMatrix> {
    if vec_norm(xi) < 1e-300 {
        return Err(Error::ZeroVector);
    }
    let unit = normalize(xi)?;
    let mut cols = Vec::new();
    for j in 0..atoms.len() {
        let comp = atoms.project(j, &unit);
        if vec_norm(&comp) > tol::BASE {
            cols.push(normalize(&comp)?);
        }
    }
    Ok(ComplexMatrix::from_columns(&cols))
}

/// Whether P admits a cyclic vector, and the canonical one if so.
///
/// A Hermitian matrix has a cyclic vector exactly when every eigenvalue is
/// simple; the canonical choice is the equal-weight sum of one unit
/// eigenvector per atom.
pub fn has_cyclic_vector(p: &ComplexMatrix) -> Result<(bool, Option<Vec<Complex64>>)> {
    let atoms = SpectrumAtoms::from_hermitian(p)?;
    if atoms.multiplicities.iter().any(|&m| m != 1) {
        return Ok((false, None));
    }
    Ok((true, Some(canonical_cyclic_vector(p)?)))
}

/// Equal-weight sum of one unit eigenvector per atom; cyclic whenever the
/// spectrum is simple.
pub fn canonical_cyclic_vector(p: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let eig = crate::linalg::hermitian_eig(p)?;
    let ctol = tol::cluster(operator_norm(p));
    let atoms = crate::linalg::cluster_spectrum(&eig, ctol);
    let n = p.rows();
    let mut xi = vec![Complex64::ZERO; n];
    let mut col = 0;
    for &m in &atoms.multiplicities {
        let v = eig.vectors.column(col);
        for i in 0..n {
            xi[i] += v[i];
        }
        col += m;
    }
    normalize(&xi)
}

/// Greedy orthogonal decomposition into cyclic subspaces.
///
/// Round r takes the (r+1)-th eigenvector of every atom that still has one,
/// sums them into a cyclic vector, and spans the corresponding subspace. The
/// number of subspaces equals the maximum atom multiplicity.
pub fn cyclic_decomposition(p: &ComplexMatrix) -> Result<CyclicDecomposition> {
    let eig = crate::linalg::hermitian_eig(p)?;
    let ctol = tol::cluster(operator_norm(p));
    let atoms = crate::linalg::cluster_spectrum(&eig, ctol);
    let n = p.rows();

    let max_mult = atoms.multiplicities.iter().copied().max().unwrap_or(0);
    let mut subspaces = Vec::with_capacity(max_mult);
    let mut cyclic_vectors = Vec::with_capacity(max_mult);

    for round in 0..max_mult {
        let mut cols = Vec::new();
        let mut xi = vec![Complex64::ZERO; n];
        let mut base = 0;
        for &m in &atoms.multiplicities {
            if round < m {
                let v = eig.vectors.column(base + round);
                for i in 0..n {
                    xi[i] += v[i];
                }
                cols.push(v);
            }
            base += m;
        }
        subspaces.push(ComplexMatrix::from_columns(&cols));
        cyclic_vectors.push(normalize(&xi)?);
    }

    Ok(CyclicDecomposition {
        subspaces,
        cyclic_vectors,
        source_operator: p.clone(),
    })
}

/// Residual `||(I - Q_i) P^{-1} Q_i||` per subspace; all small exactly when
/// every subspace is also invariant under the inverse.
pub fn verify_invertible_invariance(
    p: &ComplexMatrix,
    decomposition: &CyclicDecomposition,
) -> Result<Vec<f64>> {
    let atoms = SpectrumAtoms::from_hermitian(p)?;
    let smallest = atoms.atoms.first().copied().unwrap_or(0.0);
    if smallest <= tol::relative(operator_norm(p)) {
        return Err(Error::SingularOperator);
    }
    let p_inv = crate::calculus::apply_function(&atoms, |x| Complex64::new(1.0 / x, 0.0))?;
    let n = p.rows();
    let identity = ComplexMatrix::identity(n);
    let mut residuals = Vec::new();
    for i in 0..decomposition.subspaces.len() {
        let q = decomposition.projector(i);
        let off = &(&identity - &q) * &(&p_inv * &q);
        residuals.push(operator_norm(&off));
    }
    Ok(residuals)
}

/// Orthonormalizes the columns of an image matrix via QR.
fn orthonormal_image(m: &ComplexMatrix) -> ComplexMatrix {
    let qr = to_dmatrix(m).qr();
    from_dmatrix(&qr.q())
}

/// Compares the cyclic decompositions of |T^k| and |T^(k+1)| under the
/// adjoint and inverse of T.
///
/// For each level-k subspace the images T* H_i and T^{-1} H_i are formed,
/// orthonormalized, and greedily matched (smallest subspace distance first,
/// ties to the lowest index) against the level-(k+1) subspaces. Verdicts are
/// judged at `tol_base`; a dimension mismatch rejects the match. The claims
/// are measured, never assumed.
pub fn verify_power_transport(t: &ComplexMatrix, k: u32, tol_base: f64) -> Result<TransportReport> {
    assert!(k >= 1, "power must be at least 1");
    if !t.is_square() {
        return Err(Error::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let pd = polar(t)?;
    if !pd.is_invertible {
        return Err(Error::SingularOperator);
    }
    let t_inv = try_inverse(t).ok_or(Error::SingularOperator)?;
    let t_adj = t.adjoint();

    let power = |m: &ComplexMatrix, e: u32| -> ComplexMatrix {
        let mut acc = ComplexMatrix::identity(m.rows());
        for _ in 0..e {
            acc = &acc * m;
        }
        acc
    };
    let mod_k = polar(&power(t, k))?.positive_part;
    let mod_k1 = polar(&power(t, k + 1))?.positive_part;
    let dec_k = cyclic_decomposition(&mod_k)?;
    let dec_k1 = cyclic_decomposition(&mod_k1)?;

    let adjoint_images: Vec<ComplexMatrix> = dec_k
        .subspaces
        .iter()
        .map(|s| orthonormal_image(&(&t_adj * s)))
        .collect();
    let inverse_images: Vec<ComplexMatrix> = dec_k
        .subspaces
        .iter()
        .map(|s| orthonormal_image(&(&t_inv * s)))
        .collect();

    // greedy minimal-distance matching of adjoint images to level-(k+1) subspaces
    let n_i = adjoint_images.len();
    let n_j = dec_k1.subspaces.len();
    let mut pairs = Vec::new();
    for (i, image) in adjoint_images.iter().enumerate() {
        for (j, target) in dec_k1.subspaces.iter().enumerate() {
            pairs.push((subspace_distance(image, target), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut matching: Vec<Option<usize>> = vec![None; n_i];
    let mut used = vec![false; n_j];
    for &(_, i, j) in &pairs {
        if matching[i].is_none() && !used[j] {
            matching[i] = Some(j);
            used[j] = true;
        }
    }

    let mut adjoint_image_residuals = Vec::with_capacity(n_i);
    let mut inverse_image_residuals = Vec::with_capacity(n_i);
    let mut images_agree_residuals = Vec::with_capacity(n_i);
    let mut adjoint_claim_holds = true;
    let mut inverse_claim_holds = true;
    let mut images_agree = true;
    for i in 0..n_i {
        let agree = subspace_distance(&adjoint_images[i], &inverse_images[i]);
        images_agree_residuals.push(agree);
        images_agree &= agree <= tol_base;
        match matching[i] {
            Some(j) => {
                let target = &dec_k1.subspaces[j];
                let dims_match = adjoint_images[i].cols() == target.cols();
                let da = subspace_distance(&adjoint_images[i], target);
                let di = subspace_distance(&inverse_images[i], target);
                adjoint_image_residuals.push(da);
                inverse_image_residuals.push(di);
                adjoint_claim_holds &= dims_match && da <= tol_base;
                inverse_claim_holds &= dims_match && di <= tol_base;
            }
            None => {
                adjoint_image_residuals.push(1.0);
                inverse_image_residuals.push(1.0);
                adjoint_claim_holds = false;
                inverse_claim_holds = false;
            }
        }
    }

    Ok(TransportReport {
        power_k: k,
        matching,
        adjoint_image_residuals,
        inverse_image_residuals,
        images_agree_residuals,
        adjoint_claim_holds,
        inverse_claim_holds,
        images_agree,
    })
}
