//! Constructions and measured verdicts for the relations between an operator,
//! its polar pieces, and multiplication operators on the L^2 model:
//! unitary equivalence of |T|^{-1} with |T^{-1}| and |T| with |T*|, the
//! multiplication-operator form of T itself, and the equivalence of normality
//! with commutant membership and diagonal representability.
//!
//! Every claim is reported with a residual, never assumed. In particular the
//! diagonal-representability check records honest failures: a scalar
//! multiplication operator is normal, so a non-normal operator cannot be
//! unitarily equivalent to one, and the report shows exactly how far away it
//! is.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, operator_norm, polar, try_inverse, SpectrumAtoms};
use crate::matrix::{vec_norm, ComplexMatrix};
use crate::measure::{
    build_l2_model, pushforward_inversion, radon_nikodym, spectral_measure, DiscreteMeasure,
    FunctionOnAtoms, L2Model,
};
use crate::tol;

/// Outcome of comparing a derived modulus (|T^{-1}| or |T*|) against the
/// conjugated original: spectra, conjugation by the polar unitary, and the
/// Radon-Nikodym derivative between the transported spectral measures.
#[derive(Debug, Clone, Serialize)]
pub struct InverseModulusReport {
    pub spectra_match: bool,
    pub max_spectrum_deviation: f64,
    /// `||U A U* - B||` where A is the source modulus and B the derived one.
    pub conjugation_residual: f64,
    pub base_measure: DiscreteMeasure,
    pub derived_measure: DiscreteMeasure,
    pub rn_derivative: FunctionOnAtoms,
    pub rn_everywhere_nonzero: bool,
    pub mutual_ac: bool,
}

/// The multiplication-operator picture of T on the L^2 model of |T|:
/// A = W* T W, with the weight and unimodular symbol extracted from the
/// diagonal when the picture holds.
#[derive(Debug, Clone)]
pub struct MultiplicationRep {
    pub model: L2Model,
    /// W* T W in the orthonormalized indicator basis.
    pub conjugated: ComplexMatrix,
    /// `||A - diag(A)|| / max(1, ||A||)`.
    pub diag_residual: f64,
    /// Unimodular symbol psi_j = A_jj / |A_jj| (1 where the diagonal vanishes).
    pub symbol_psi: FunctionOnAtoms,
    /// Weight eta_j = (|A_jj| / lambda_j)^2 (0 at atoms below tolerance).
    pub weight_eta: FunctionOnAtoms,
    /// `||W* U W - diag(sqrt(eta_j) psi_j)||` for the polar unitary U.
    pub unitary_part_residual: f64,
    pub representation_holds: bool,
}

impl Serialize for MultiplicationRep {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("MultiplicationRep", 7)?;
        s.serialize_field("atoms", self.model.measure.atoms())?;
        s.serialize_field("weights", self.model.measure.weights())?;
        s.serialize_field("diag_residual", &self.diag_residual)?;
        let psi: Vec<[f64; 2]> = self.symbol_psi.values.iter().map(|z| [z.re, z.im]).collect();
        s.serialize_field("psi", &psi)?;
        let eta: Vec<f64> = self.weight_eta.values.iter().map(|z| z.re).collect();
        s.serialize_field("eta", &eta)?;
        s.serialize_field("unitary_part_residual", &self.unitary_part_residual)?;
        s.serialize_field("representation_holds", &self.representation_holds)?;
        s.end()
    }
}

/// The three faces of normality: the defining residual, commutant membership,
/// and diagonal representability with unit weight.
#[derive(Debug, Clone, Serialize)]
pub struct NormalityReport {
    /// `||T T* - T* T|| / max(1, ||T||^2)`.
    pub normal_residual: f64,
    /// `||T |T| - |T| T|| / max(1, ||T||^2)`.
    pub commutant_residual: f64,
    /// Off-diagonal residual of W* T W; absent when |T| has degenerate
    /// spectrum and no canonical model exists.
    pub diag_residual: Option<f64>,
    pub normal_verdict: bool,
    pub commutant_verdict: bool,
    /// Diagonal and eta = 1; absent with diag_residual.
    pub diag_verdict: Option<bool>,
    /// All available verdicts agree.
    pub consistent: bool,
}

fn require_square(t: &ComplexMatrix) -> Result<()> {
    if !t.is_square() {
        return Err(Error::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    Ok(())
}

fn check_cyclic(atoms: &SpectrumAtoms, xi: &[Complex64]) -> Result<()> {
    let n = atoms.dim();
    let spanned = (0..atoms.len())
        .filter(|&j| vec_norm(&atoms.project(j, xi)) > tol::BASE * vec_norm(xi))
        .count();
    if atoms.len() < n || spanned < n {
        return Err(Error::NotCyclic {
            subspace_dim: spanned,
            space_dim: n,
        });
    }
    Ok(())
}

/// Conjugates a Hermitian matrix by a unitary: U A U*.
fn conjugate(u: &ComplexMatrix, a: &ComplexMatrix) -> ComplexMatrix {
    &(u * a) * &u.adjoint()
}

/// Elementwise comparison of two ascending eigenvalue lists.
fn spectrum_deviation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}

#[allow(clippy::too_many_arguments)]
fn modulus_report(
    source_modulus: &ComplexMatrix,
    derived_modulus: &ComplexMatrix,
    expected_spectrum: &[f64],
    u: &ComplexMatrix,
    conjugate_source: &ComplexMatrix,
    xi: &[Complex64],
    base_measure: DiscreteMeasure,
    tol_base: f64,
) -> Result<InverseModulusReport> {
    let derived_eig = hermitian_eig(derived_modulus)?;
    let deviation = spectrum_deviation(expected_spectrum, &derived_eig.values);

    let conjugation_residual =
        operator_norm(&(&conjugate(u, conjugate_source) - derived_modulus));

    let derived_atoms = SpectrumAtoms::from_hermitian(derived_modulus)?;
    let transported_xi = u.matvec(xi);
    let derived_measure = spectral_measure(&derived_atoms, &transported_xi)?;

    let match_tol = tol::cluster(operator_norm(source_modulus).max(operator_norm(derived_modulus)))
        .max(1e3 * f64::EPSILON);
    let rn_derivative = radon_nikodym(&derived_measure, &base_measure, match_tol)?;
    let rn_everywhere_nonzero = rn_derivative.values.iter().all(|v| v.re > tol_base);
    let mutual_ac = rn_everywhere_nonzero
        && radon_nikodym(&base_measure, &derived_measure, match_tol)
            .map(|d| d.values.iter().all(|v| v.re > tol_base))
            .unwrap_or(false);

    Ok(InverseModulusReport {
        spectra_match: deviation <= tol_base,
        max_spectrum_deviation: deviation,
        conjugation_residual,
        base_measure,
        derived_measure,
        rn_derivative,
        rn_everywhere_nonzero,
        mutual_ac,
    })
}

/// Checks that |T|^{-1} and |T^{-1}| share a spectrum, are conjugate under
/// the polar unitary, and carry mutually absolutely continuous spectral
/// measures with everywhere-positive derivative.
///
/// The base measure is the pushforward of the measure of (|T|, xi) under
/// inversion; the derived measure is that of (|T^{-1}|, U xi).
pub fn verify_inverse_modulus(
    t: &ComplexMatrix,
    xi: &[Complex64],
    tol_base: f64,
) -> Result<InverseModulusReport> {
    require_square(t)?;
    let pd = polar(t)?;
    if !pd.is_invertible {
        return Err(Error::SingularOperator);
    }
    let atoms = SpectrumAtoms::from_hermitian(&pd.positive_part)?;
    check_cyclic(&atoms, xi)?;

    let t_inv = try_inverse(t).ok_or(Error::SingularOperator)?;
    let inv_modulus = polar(&t_inv)?.positive_part;

    // sigma(|T|^{-1}) as an ascending list of reciprocals
    let modulus_eig = hermitian_eig(&pd.positive_part)?;
    let mut expected: Vec<f64> = modulus_eig.values.iter().map(|&v| 1.0 / v).collect();
    expected.sort_by(f64::total_cmp);

    let inv_of_modulus =
        crate::calculus::apply_function(&atoms, |x| Complex64::new(1.0 / x, 0.0))?;

    let base = pushforward_inversion(&spectral_measure(&atoms, xi)?)?;
    modulus_report(
        &pd.positive_part,
        &inv_modulus,
        &expected,
        &pd.unitary_part,
        &inv_of_modulus,
        xi,
        base,
        tol_base,
    )
}

/// Same comparison for |T*| against |T|: equal spectra, conjugation by the
/// polar unitary, and the derivative between the measure of (|T*|, U xi) and
/// that of (|T|, xi).
pub fn verify_adjoint_modulus(
    t: &ComplexMatrix,
    xi: &[Complex64],
    tol_base: f64,
) -> Result<InverseModulusReport> {
    require_square(t)?;
    let pd = polar(t)?;
    let atoms = SpectrumAtoms::from_hermitian(&pd.positive_part)?;
    check_cyclic(&atoms, xi)?;

    let adj_modulus = polar(&t.adjoint())?.positive_part;
    let expected = hermitian_eig(&pd.positive_part)?.values;

    let base = spectral_measure(&atoms, xi)?;
    modulus_report(
        &pd.positive_part,
        &adj_modulus,
        &expected,
        &pd.unitary_part,
        &pd.positive_part,
        xi,
        base,
        tol_base,
    )
}

/// Builds the multiplication-operator picture of T on the L^2 model of |T|
/// with the canonical cyclic vector.
///
/// Requires |T| to have simple spectrum; T need not be invertible. Whether
/// W* T W actually is diagonal is measured and reported, and the weight/
/// symbol pair is extracted from the diagonal either way.
pub fn build_multiplication_rep(t: &ComplexMatrix, tol_base: f64) -> Result<MultiplicationRep> {
    require_square(t)?;
    let pd = polar(t)?;
    let atoms = SpectrumAtoms::from_hermitian(&pd.positive_part)?;
    let n = t.rows();
    if atoms.len() < n {
        return Err(Error::NotCyclic {
            subspace_dim: atoms.len(),
            space_dim: n,
        });
    }
    let xi = crate::cyclic::canonical_cyclic_vector(&pd.positive_part)?;
    let model = build_l2_model(&atoms, &xi)?;

    let w = &model.isometry;
    let conjugated = &(&w.adjoint() * t) * w;
    let norm = operator_norm(&conjugated);
    let off = &conjugated - &conjugated.diagonal_part();
    let diag_residual = operator_norm(&off) / norm.max(1.0);
    let representation_holds = diag_residual <= tol_base;

    let lambda = model.measure.atoms().to_vec();
    let mut psi = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    let mut u_diag = Vec::with_capacity(n);
    for (j, &lam) in lambda.iter().enumerate() {
        let a_jj = conjugated.get(j, j);
        if lam > tol_base && a_jj.norm() > 0.0 {
            let sqrt_eta = a_jj.norm() / lam;
            psi.push(a_jj / a_jj.norm());
            eta.push(Complex64::new(sqrt_eta * sqrt_eta, 0.0));
            u_diag.push(a_jj / a_jj.norm() * sqrt_eta);
        } else {
            psi.push(Complex64::ONE);
            eta.push(Complex64::ZERO);
            u_diag.push(Complex64::ZERO);
        }
    }
    let u_model = &(&w.adjoint() * &pd.unitary_part) * w;
    let unitary_part_residual =
        operator_norm(&(&u_model - &ComplexMatrix::from_diagonal(&u_diag)));

    Ok(MultiplicationRep {
        model,
        conjugated,
        diag_residual,
        symbol_psi: FunctionOnAtoms { values: psi },
        weight_eta: FunctionOnAtoms { values: eta },
        unitary_part_residual,
        representation_holds,
    })
}

/// Residual of commuting with the modulus: `||T |T| - |T| T|| / max(1, ||T||^2)`.
/// Commuting with the generator is equivalent to commuting with every element
/// of the algebra it generates.
pub fn commutant_membership(t: &ComplexMatrix) -> Result<f64> {
    require_square(t)?;
    let modulus = polar(t)?.positive_part;
    let comm = &(t * &modulus) - &(&modulus * t);
    let norm = operator_norm(t);
    Ok(operator_norm(&comm) / (norm * norm).max(1.0))
}

/// Evaluates the three equivalent faces of normality and whether their
/// verdicts agree at the given tolerance.
pub fn normality_equivalence(t: &ComplexMatrix, tol_base: f64) -> Result<NormalityReport> {
    require_square(t)?;
    let norm = operator_norm(t);
    let scale = (norm * norm).max(1.0);

    let tt = &(t * &t.adjoint()) - &(&t.adjoint() * t);
    let normal_residual = operator_norm(&tt) / scale;
    let commutant_residual = commutant_membership(t)?;

    let (diag_residual, diag_verdict) = match build_multiplication_rep(t, tol_base) {
        Ok(rep) => {
            let eta_unit = rep
                .weight_eta
                .values
                .iter()
                .all(|e| (e - Complex64::ONE).norm() <= tol_base);
            (
                Some(rep.diag_residual),
                Some(rep.representation_holds && eta_unit),
            )
        }
        Err(Error::NotCyclic { .. }) => (None, None),
        Err(e) => return Err(e),
    };

    let normal_verdict = normal_residual <= tol_base;
    let commutant_verdict = commutant_residual <= tol_base;
    let consistent = match diag_verdict {
        Some(d) => normal_verdict == commutant_verdict && commutant_verdict == d,
        None => normal_verdict == commutant_verdict,
    };

    Ok(NormalityReport {
        normal_residual,
        commutant_residual,
        diag_residual,
        normal_verdict,
        commutant_verdict,
        diag_verdict,
        consistent,
    })
}
