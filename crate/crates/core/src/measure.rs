//! Scalar spectral measures, the finite L^2 model, and operations between
//! discrete measures (pushforward under inversion, Radon-Nikodym
//! derivatives).
//!
//! L^2 over a finitely supported measure is modeled as coordinates over the
//! atoms with the weighted inner product <f, g> = sum_j f_j conj(g_j) w_j.
//! The isometry into the ambient space is stored against the orthonormalized
//! atom-indicator basis, which turns unitarity into a plain matrix identity.
//! Measure completion is a no-op for finitely supported measures.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::apply_function;
use crate::error::{Error, Result};
use crate::linalg::SpectrumAtoms;
use crate::matrix::{inner, vec_norm, ComplexMatrix};
use crate::tol;

/// Relative mass below which an atom counts as carrying no measure.
const MASS_EPS: f64 = 1e-12;

/// Finitely supported positive measure on the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Builds a measure from atom/weight pairs, sorting atoms ascending.
    /// Weights must be nonnegative (tiny negative rounding is clamped to 0)
    /// and atoms strictly increasing after the sort.
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: atoms.len(),
                actual: weights.len(),
            });
        }
        if atoms.iter().chain(weights.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NotFinite);
        }
        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms = Vec::with_capacity(pairs.len());
        let mut weights = Vec::with_capacity(pairs.len());
        for (a, w) in pairs {
            if let Some(&prev) = atoms.last() {
                if a <= prev {
                    return Err(Error::Parse(format!("duplicate atom {a}")));
                }
            }
            if w < -tol::POSITIVITY {
                return Err(Error::Parse(format!("negative weight {w} at atom {a}")));
            }
            atoms.push(a);
            weights.push(w.max(0.0));
        }
        Ok(Self { atoms, weights })
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Integral of a complex-valued function against the measure.
    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(&a, &w)| f(a) * w)
            .sum()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: DiscreteMeasure =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(wire.atoms, wire.weights)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serialization cannot fail")
    }
}

/// Coordinates of a function on the atoms of an associated measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionOnAtoms {
    pub values: Vec<Complex64>,
}

impl FunctionOnAtoms {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest modulus over the atoms.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// The finite L^2(sigma, mu) model of a positive matrix with cyclic vector:
/// the isometry W sends the orthonormalized atom indicators into the ambient
/// space, intertwining multiplication by z with the operator.
#[derive(Debug, Clone)]
pub struct L2Model {
    /// Support of the spectral measure (atoms with positive mass).
    pub measure: DiscreteMeasure,
    /// n x m matrix with orthonormal columns Pi_j xi / ||Pi_j xi||.
    pub isometry: ComplexMatrix,
    pub cyclic_vector: Vec<Complex64>,
    pub source_operator: ComplexMatrix,
}

impl L2Model {
    /// Multiplication by the coordinate on the model side: diag(atoms).
    pub fn multiplication_by_z(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(self.measure.atoms())
    }

    /// Coordinates of the constant-one function in the orthonormalized
    /// indicator basis: sqrt of the weights.
    pub fn one_coordinates(&self) -> Vec<Complex64> {
        self.measure
            .weights()
            .iter()
            .map(|&w| Complex64::new(w.sqrt(), 0.0))
            .collect()
    }

    /// Coordinates of a function f in the orthonormalized indicator basis:
    /// f(lambda_j) sqrt(w_j).
    pub fn function_coordinates(&self, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        self.measure
            .atoms()
            .iter()
            .zip(self.measure.weights())
            .map(|(&a, &w)| f(a) * w.sqrt())
            .collect()
    }
}

/// The positive linear functional f -> <f(P) xi, xi>, evaluated through the
/// functional calculus.
pub fn spectral_functional(
    atoms: &SpectrumAtoms,
    xi: &[Complex64],
    f: impl Fn(f64) -> Complex64,
) -> Result<Complex64> {
    let fp = apply_function(atoms, f)?;
    Ok(inner(&fp.matvec(xi), xi))
}

/// The scalar spectral measure of (P, xi): mass ||Pi_j xi||^2 at each atom.
/// Integration against it reproduces `spectral_functional` by construction.
pub fn spectral_measure(atoms: &SpectrumAtoms, xi: &[Complex64]) -> Result<DiscreteMeasure> {
    if vec_norm(xi) < 1e-300 {
        return Err(Error::ZeroVector);
    }
    let weights: Vec<f64> = (0..atoms.len())
        .map(|j| {
            let comp = atoms.project(j, xi);
            comp.iter().map(|z| z.norm_sqr()).sum()
        })
        .collect();
    DiscreteMeasure::new(atoms.atoms.clone(), weights)
}

/// Builds the L^2 model for a cyclic vector.
///
/// Fails with `NotCyclic` when xi generates a proper subspace, i.e. when some
/// atom carries no mass or the spectrum is degenerate.
pub fn build_l2_model(atoms: &SpectrumAtoms, xi: &[Complex64]) -> Result<L2Model> {
    if vec_norm(xi) < 1e-300 {
        return Err(Error::ZeroVector);
    }
    let n = atoms.dim();
    let mut support_atoms = Vec::new();
    let mut support_weights = Vec::new();
    let mut columns = Vec::new();
    for j in 0..atoms.len() {
        let comp = atoms.project(j, xi);
        let mass = comp.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if mass.sqrt() > tol::BASE * vec_norm(xi) {
            support_atoms.push(atoms.atoms[j]);
            support_weights.push(mass);
            let scale = 1.0 / mass.sqrt();
            columns.push(comp.iter().map(|z| z * scale).collect::<Vec<_>>());
        }
    }
    if columns.len() < n {
        return Err(Error::NotCyclic {
            subspace_dim: columns.len(),
            space_dim: n,
        });
    }
    let source = crate::calculus::apply_function(atoms, |x| Complex64::new(x, 0.0))?;
    Ok(L2Model {
        measure: DiscreteMeasure::new(support_atoms, support_weights)?,
        isometry: ComplexMatrix::from_columns(&columns),
        cyclic_vector: xi.to_vec(),
        source_operator: source,
    })
}

/// Pushes the measure forward under z -> 1/z; weights are carried unchanged.
pub fn pushforward_inversion(mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    if let Some(&bad) = mu.atoms().iter().find(|&&a| a <= 0.0) {
        return Err(Error::AtomAtZero { atom: bad });
    }
    let atoms: Vec<f64> = mu.atoms().iter().map(|&a| 1.0 / a).collect();
    DiscreteMeasure::new(atoms, mu.weights().to_vec())
}

/// Atom-wise Radon-Nikodym derivative d(nu)/d(mu) over the atoms of mu.
///
/// Atoms are identified across the two measures within `atom_match_tol`.
/// The derivative is the weight ratio at matched atoms and 0 at mu-atoms
/// carrying no nu-mass; a nu-atom with real mass but no mu-partner fails with
/// `NotAbsolutelyContinuous`.
pub fn radon_nikodym(
    nu: &DiscreteMeasure,
    mu: &DiscreteMeasure,
    atom_match_tol: f64,
) -> Result<FunctionOnAtoms> {
    let nu_floor = MASS_EPS * nu.total_mass().max(1e-300);
    let mu_floor = MASS_EPS * mu.total_mass().max(1e-300);

    let mut matched_nu = vec![false; nu.len()];
    let mut values = Vec::with_capacity(mu.len());
    for (&a, &w_mu) in mu.atoms().iter().zip(mu.weights()) {
        let hit = nu
            .atoms()
            .iter()
            .position(|&b| (a - b).abs() <= atom_match_tol);
        match hit {
            Some(i) => {
                matched_nu[i] = true;
                let w_nu = nu.weights()[i];
                if w_nu > nu_floor && w_mu <= mu_floor {
                    return Err(Error::NotAbsolutelyContinuous { atom: a });
                }
                let ratio = if w_mu > mu_floor { w_nu / w_mu } else { 0.0 };
                values.push(Complex64::new(ratio, 0.0));
            }
            None => values.push(Complex64::ZERO),
        }
    }
    for (i, &hit) in matched_nu.iter().enumerate() {
        if !hit && nu.weights()[i] > nu_floor {
            return Err(Error::NotAbsolutelyContinuous {
                atom: nu.atoms()[i],
            });
        }
    }
    Ok(FunctionOnAtoms { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::operator_norm;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn atoms_of_diag(d: &[f64]) -> SpectrumAtoms {
        SpectrumAtoms::from_hermitian(&ComplexMatrix::from_real_diagonal(d)).unwrap()
    }

    fn half_half() -> Vec<Complex64> {
        let s = 1.0 / 2.0f64.sqrt();
        vec![c(s, 0.0), c(s, 0.0)]
    }

    #[test]
    fn functional_mean_of_atoms() {
        // P = diag(1,2), xi = (1,1)/sqrt(2), f(x) = x: 1*1/2 + 2*1/2 = 1.5
        let atoms = atoms_of_diag(&[1.0, 2.0]);
        let v = spectral_functional(&atoms, &half_half(), |x| c(x, 0.0)).unwrap();
        assert!((v - c(1.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn functional_normalization() {
        let atoms = atoms_of_diag(&[0.3, 1.7, 2.4]);
        let xi = crate::matrix::normalize(&[c(0.2, 0.1), c(-0.4, 0.5), c(0.3, -0.9)]).unwrap();
        let v = spectral_functional(&atoms, &xi, |_| Complex64::ONE).unwrap();
        assert!((v - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn functional_on_eigenvector() {
        let atoms = atoms_of_diag(&[1.0, 2.0]);
        let v = spectral_functional(&atoms, &[Complex64::ZERO, Complex64::ONE], |x| {
            c(x * x, 0.0)
        })
        .unwrap();
        assert!((v - c(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn measure_equal_weights() {
        let atoms = atoms_of_diag(&[1.0, 2.0]);
        let mu = spectral_measure(&atoms, &half_half()).unwrap();
        assert_eq!(mu.atoms(), &[1.0, 2.0]);
        assert!((mu.weights()[0] - 0.5).abs() < 1e-12);
        assert!((mu.weights()[1] - 0.5).abs() < 1e-12);
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measure_concentrated_on_eigenvector() {
        let atoms = atoms_of_diag(&[1.0, 2.0]);
        let mu = spectral_measure(&atoms, &[Complex64::ONE, Complex64::ZERO]).unwrap();
        assert!((mu.weights()[0] - 1.0).abs() < 1e-12);
        assert!(mu.weights()[1].abs() < 1e-12);
    }

    #[test]
    fn measure_of_identity_single_atom() {
        let atoms = atoms_of_diag(&[1.0, 1.0]);
        let mu = spectral_measure(&atoms, &half_half()).unwrap();
        assert_eq!(mu.len(), 1);
        assert!((mu.weights()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measure_rejects_zero_vector() {
        let atoms = atoms_of_diag(&[1.0, 2.0]);
        let err = spectral_measure(&atoms, &[Complex64::ZERO, Complex64::ZERO]).unwrap_err();
        assert_eq!(err, Error::ZeroVector);
    }

    #[test]
    fn l2_model_diagonal_case() {
        let atoms = atoms_of_diag(&[1.0, 2.0]);
        let model = build_l2_model(&atoms, &half_half()).unwrap();
        let w = &model.isometry;
        // W is the identity in the eigenbasis ordering
        assert!(operator_norm(&(w - &ComplexMatrix::identity(2))) < 1e-10);
        let mz = model.multiplication_by_z();
        assert_eq!(mz.get(0, 0).re, 1.0);
        assert_eq!(mz.get(1, 1).re, 2.0);
        // W applied to the constant-one coordinates returns xi
        let back = w.matvec(&model.one_coordinates());
        let diff: Vec<Complex64> = back.iter().zip(&half_half()).map(|(a, b)| a - b).collect();
        assert!(vec_norm(&diff) < 1e-10);
    }

    #[test]
    fn l2_model_rejects_non_cyclic() {
        let atoms = atoms_of_diag(&[1.0, 2.0]);
        let err = build_l2_model(&atoms, &[Complex64::ONE, Complex64::ZERO]).unwrap_err();
        assert!(matches!(err, Error::NotCyclic { subspace_dim: 1, space_dim: 2 }), "{err}");
    }

    #[test]
    fn l2_model_one_dimensional() {
        let atoms = atoms_of_diag(&[1.0]);
        let model = build_l2_model(&atoms, &[Complex64::ONE]).unwrap();
        assert_eq!(model.isometry.rows(), 1);
        assert!((model.isometry.get(0, 0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l2_model_intertwines() {
        let p = ComplexMatrix::from_real_diagonal(&[0.5, 1.25, 3.0]);
        let atoms = SpectrumAtoms::from_hermitian(&p).unwrap();
        let xi = crate::matrix::normalize(&[c(1.0, 0.5), c(-0.7, 0.2), c(0.4, 0.9)]).unwrap();
        let model = build_l2_model(&atoms, &xi).unwrap();
        let w = &model.isometry;
        let gram = &w.adjoint() * w;
        assert!(operator_norm(&(&gram - &ComplexMatrix::identity(3))) < 1e-10);
        let lhs = w * &model.multiplication_by_z();
        let rhs = &p * w;
        assert!(operator_norm(&(&lhs - &rhs)) < 1e-10);
    }

    #[test]
    fn pushforward_relabels_and_sorts() {
        let mu = DiscreteMeasure::new(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap();
        let nu = pushforward_inversion(&mu).unwrap();
        assert_eq!(nu.atoms(), &[0.5, 1.0]);
        assert_eq!(nu.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn pushforward_fixed_point() {
        let mu = DiscreteMeasure::new(vec![1.0], vec![1.0]).unwrap();
        assert_eq!(pushforward_inversion(&mu).unwrap(), mu);
    }

    #[test]
    fn pushforward_is_involution() {
        let mu = DiscreteMeasure::new(vec![0.25, 1.0, 4.0], vec![0.1, 0.6, 0.3]).unwrap();
        let back = pushforward_inversion(&pushforward_inversion(&mu).unwrap()).unwrap();
        assert_eq!(back, mu);
    }

    #[test]
    fn pushforward_rejects_zero_atom() {
        let mu = DiscreteMeasure::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let err = pushforward_inversion(&mu).unwrap_err();
        assert!(matches!(err, Error::AtomAtZero { .. }), "{err}");
    }

    #[test]
    fn pushforward_defining_identity() {
        // integral of f d(nu) = integral of f(1/z) d(mu) for sampled f
        let mu = DiscreteMeasure::new(vec![0.5, 1.0, 2.0], vec![0.2, 0.3, 0.5]).unwrap();
        let nu = pushforward_inversion(&mu).unwrap();
        for k in 0..4 {
            let f = |z: f64| c(z.powi(k), 0.0);
            let lhs = nu.integrate(f);
            let rhs = mu.integrate(|z| f(1.0 / z));
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn rn_of_measure_with_itself_is_one() {
        let mu = DiscreteMeasure::new(vec![1.0, 2.0], vec![0.25, 0.75]).unwrap();
        let d = radon_nikodym(&mu, &mu, 1e-9).unwrap();
        assert!(d.values.iter().all(|v| (v - Complex64::ONE).norm() < 1e-12));
    }

    #[test]
    fn rn_atomwise_ratio() {
        let nu = DiscreteMeasure::new(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap();
        let mu = DiscreteMeasure::new(vec![1.0, 2.0], vec![0.25, 0.75]).unwrap();
        let d = radon_nikodym(&nu, &mu, 1e-9).unwrap();
        assert!((d.values[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((d.values[1] - c(2.0 / 3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rn_rejects_missing_base_atom() {
        let nu = DiscreteMeasure::new(vec![3.0], vec![1.0]).unwrap();
        let mu = DiscreteMeasure::new(vec![1.0], vec![1.0]).unwrap();
        let err = radon_nikodym(&nu, &mu, 1e-9).unwrap_err();
        assert!(matches!(err, Error::NotAbsolutelyContinuous { .. }), "{err}");
    }

    #[test]
    fn rn_reconstructs_numerator() {
        let nu = DiscreteMeasure::new(vec![1.0, 2.0, 3.0], vec![0.2, 0.0, 0.8]).unwrap();
        let mu = DiscreteMeasure::new(vec![1.0, 2.0, 3.0], vec![0.4, 0.3, 0.3]).unwrap();
        let d = radon_nikodym(&nu, &mu, 1e-9).unwrap();
        // integral of f d(nu) = integral of f * (d nu / d mu) d(mu)
        for k in 0..4 {
            let f = |z: f64| c(z.powi(k), 0.0);
            let lhs = nu.integrate(f);
            let rhs: Complex64 = mu
                .atoms()
                .iter()
                .zip(mu.weights())
                .zip(&d.values)
                .map(|((&a, &w), &dv)| f(a) * dv * w)
                .sum();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn measure_json_round_trip() {
        let mu = DiscreteMeasure::new(vec![0.5, 2.0], vec![0.25, 0.75]).unwrap();
        let json = mu.to_json();
        assert_eq!(json, r#"{"atoms":[0.5,2.0],"weights":[0.25,0.75]}"#);
        assert_eq!(DiscreteMeasure::from_json(&json).unwrap(), mu);
    }
}
