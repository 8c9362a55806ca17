//! Functional calculus on positive matrices and quantitative
//! polynomial-density experiments.
//!
//! `apply_function` realizes f(P) = sum_j f(lambda_j) Pi_j from the spectrum
//! atoms. Density of the polynomial families span{1, 1/x, ..., 1/x^d} and
//! span{1, x^2, ..., x^(2d)} in C[a,b] (0 outside [a,b]) is probed
//! numerically: least-squares fits of increasing degree on a sample grid,
//! with the sup-norm error recorded per degree.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{to_dmatrix, SpectrumAtoms};
use crate::matrix::ComplexMatrix;

/// Which power family a polynomial's coefficients refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisKind {
    /// span{1, x, x^2, ...}
    PowersOfX,
    /// span{1, 1/x, 1/x^2, ...}
    PowersOfInverseX,
    /// span{1, x^2, x^4, ...}
    PowersOfXSquared,
}

impl BasisKind {
    /// The substituted variable: p(x) = sum_k c_k t(x)^k.
    pub fn transform(self, x: f64) -> f64 {
        match self {
            BasisKind::PowersOfX => x,
            BasisKind::PowersOfInverseX => 1.0 / x,
            BasisKind::PowersOfXSquared => x * x,
        }
    }
}

/// Polynomial in one of the power families.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polynomial {
    /// c_0 ... c_d over the substituted variable.
    pub coefficients: Vec<Complex64>,
    pub basis_kind: BasisKind,
}

impl Polynomial {
    pub fn new(coefficients: Vec<Complex64>, basis_kind: BasisKind) -> Self {
        let mut p = Self {
            coefficients,
            basis_kind,
        };
        while p.coefficients.len() > 1
            && p.coefficients.last().is_some_and(|c| c.norm() == 0.0)
        {
            p.coefficients.pop();
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// Horner evaluation in the substituted variable.
    pub fn eval(&self, x: f64) -> Complex64 {
        let t = Complex64::new(self.basis_kind.transform(x), 0.0);
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::ZERO, |acc, &c| acc * t + c)
    }
}

/// Outcome of a density experiment: sup-norm fit error per degree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityReport {
    pub degrees: Vec<usize>,
    /// Sup-norm error over the sample grid at each degree (worst target).
    pub errors: Vec<f64>,
    /// True iff some degree within budget reached the requested tolerance.
    pub converged: bool,
    /// Best sup-norm error achieved.
    pub achieved_tol: f64,
}

/// Evaluates f on the spectrum: `sum_j f(lambda_j) Pi_j`.
///
/// A non-finite value of f at any atom (for example 1/x at an atom 0) is a
/// `DomainError`.
pub fn apply_function(
    atoms: &SpectrumAtoms,
    f: impl Fn(f64) -> Complex64,
) -> Result<ComplexMatrix> {
    let n = atoms.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for (j, &lambda) in atoms.atoms.iter().enumerate() {
        let fz = f(lambda);
        if !fz.re.is_finite() || !fz.im.is_finite() {
            return Err(Error::DomainError { atom: lambda });
        }
        let proj = &atoms.projectors[j];
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, out.get(r, c) + fz * proj.get(r, c));
            }
        }
    }
    Ok(out)
}

/// Chebyshev polynomials of the mapped variable, expanded in powers of t:
/// T_k(alpha t + beta) as coefficient vectors over t.
fn chebyshev_in_powers(degree: usize, alpha: f64, beta: f64) -> Vec<Vec<f64>> {
    let mut polys: Vec<Vec<f64>> = Vec::with_capacity(degree + 1);
    polys.push(vec![1.0]);
    if degree >= 1 {
        polys.push(vec![beta, alpha]);
    }
    for k in 2..=degree {
        let mut next = vec![0.0; k + 1];
        for (i, &c) in polys[k - 1].iter().enumerate() {
            next[i] += 2.0 * beta * c;
            next[i + 1] += 2.0 * alpha * c;
        }
        for (i, &c) in polys[k - 2].iter().enumerate() {
            next[i] -= c;
        }
        polys.push(next);
    }
    polys
}

/// Least-squares fit of f in the given basis over the sample points.
///
/// The fit is computed against an orthogonalized representation of the power
/// family (Chebyshev polynomials of the affinely rescaled substituted
/// variable, QR factorized): the identical subspace, but the system stays
/// well conditioned. Coefficients are converted back to the declared power
/// basis; the sup-norm error is the orthogonal-projection residual over the
/// samples. At high degree the raw power-basis coefficients are inherently
/// ill conditioned, so evaluating the returned polynomial can be less
/// accurate than the reported error.
pub fn fit_polynomial(
    f: impl Fn(f64) -> Complex64,
    sample_points: &[f64],
    degree: usize,
    basis_kind: BasisKind,
) -> Result<(Polynomial, f64)> {
    let m = sample_points.len();
    if degree + 1 > m {
        return Err(Error::SingularFit {
            degree,
            samples: m,
        });
    }
    if matches!(basis_kind, BasisKind::PowersOfInverseX)
        && sample_points.contains(&0.0)
    {
        return Err(Error::DomainError { atom: 0.0 });
    }

    let ts: Vec<f64> = sample_points
        .iter()
        .map(|&x| basis_kind.transform(x))
        .collect();
    let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    let scale = hi.abs().max(lo.abs()).max(1e-300);
    if spread <= 1e-14 * scale && degree >= 1 {
        // every sample collapses to the same basis value
        return Err(Error::SingularFit {
            degree,
            samples: m,
        });
    }
    let (alpha, beta) = if degree == 0 {
        (0.0, 0.0)
    } else {
        (2.0 / spread, -(hi + lo) / spread)
    };

    // orthogonalized representation of the same power family: Chebyshev
    // polynomials of the affinely mapped variable, built by the recurrence
    let design = {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(degree + 1);
        cols.push(vec![1.0; m]);
        if degree >= 1 {
            cols.push(ts.iter().map(|&t| alpha * t + beta).collect());
        }
        for k in 2..=degree {
            let col: Vec<f64> = (0..m)
                .map(|i| 2.0 * (alpha * ts[i] + beta) * cols[k - 1][i] - cols[k - 2][i])
                .collect();
            cols.push(col);
        }
        ComplexMatrix::from_fn(m, degree + 1, |i, k| Complex64::new(cols[k][i], 0.0))
    };
    let rhs: Vec<Complex64> = sample_points.iter().map(|&x| f(x)).collect();

    let qr = to_dmatrix(&design).qr();
    let r = qr.r();
    let r_max = (0..=degree).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    if (0..=degree).any(|i| r[(i, i)].norm() <= 1e-10 * r_max.max(1e-300)) {
        return Err(Error::SingularFit {
            degree,
            samples: m,
        });
    }
    let q = qr.q();
    let rhs_v = nalgebra::DVector::from_vec(rhs.clone());
    let projected = &q * (q.adjoint() * &rhs_v);
    let sup_error = (0..m)
        .map(|i| (projected[i] - rhs[i]).norm())
        .fold(0.0, f64::max);

    let mut cheb_coeffs = q.adjoint() * rhs_v;
    let solved = r.solve_upper_triangular_mut(&mut cheb_coeffs);
    if !solved {
        return Err(Error::SingularFit {
            degree,
            samples: m,
        });
    }
    let expansions = chebyshev_in_powers(degree, alpha, beta);
    let mut coefficients = vec![Complex64::ZERO; degree + 1];
    for (k, a) in cheb_coeffs.iter().enumerate() {
        for (i, &c) in expansions[k].iter().enumerate() {
            coefficients[i] += a * c;
        }
    }

    Ok((
        Polynomial {
            coefficients,
            basis_kind,
        },
        sup_error,
    ))
}

/// Number of grid points used by `verify_density`.
pub const DENSITY_GRID: usize = 101;

/// Probes density of the basis family in C[a, b] against the given targets.
///
/// Fits every target at each degree 0..=max_degree on a uniform grid and
/// records the worst sup-norm error per degree, stopping once it drops below
/// `tol`. The interval must not contain 0 when the basis involves 1/x.
pub fn verify_density(
    basis_kind: BasisKind,
    interval: (f64, f64),
    targets: &[&dyn Fn(f64) -> f64],
    tol: f64,
    max_degree: usize,
) -> Result<DensityReport> {
    let (a, b) = interval;
    assert!(a < b, "empty interval");
    if matches!(basis_kind, BasisKind::PowersOfInverseX) && a <= 0.0 && b >= 0.0 {
        return Err(Error::DomainError { atom: 0.0 });
    }
    let grid: Vec<f64> = (0..DENSITY_GRID)
        .map(|i| a + (b - a) * i as f64 / (DENSITY_GRID - 1) as f64)
        .collect();

    let mut degrees = Vec::new();
    let mut errors = Vec::new();
    let mut converged = false;
    for degree in 0..=max_degree {
        let mut worst = 0.0f64;
        for target in targets {
            let (_, sup) = fit_polynomial(
                |x| Complex64::new(target(x), 0.0),
                &grid,
                degree,
                basis_kind,
            )?;
            worst = worst.max(sup);
        }
        degrees.push(degree);
        errors.push(worst);
        if worst < tol {
            converged = true;
            break;
        }
    }
    let achieved_tol = errors.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DensityReport {
        degrees,
        errors,
        converged,
        achieved_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::operator_norm;
    use crate::matrix::ComplexMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn atoms_of_diag(d: &[f64]) -> SpectrumAtoms {
        SpectrumAtoms::from_hermitian(&ComplexMatrix::from_real_diagonal(d)).unwrap()
    }

    #[test]
    fn apply_square_on_diagonal() {
        let atoms = atoms_of_diag(&[1.0, 2.0]);
        let m = apply_function(&atoms, |x| c(x * x, 0.0)).unwrap();
        let expect = ComplexMatrix::from_real_diagonal(&[1.0, 4.0]);
        assert!(operator_norm(&(&m - &expect)) < 1e-10);
    }

    #[test]
    fn apply_inverse_on_diagonal() {
        let atoms = atoms_of_diag(&[1.0, 2.0]);
        let m = apply_function(&atoms, |x| c(1.0 / x, 0.0)).unwrap();
        let expect = ComplexMatrix::from_real_diagonal(&[1.0, 0.5]);
        assert!(operator_norm(&(&m - &expect)) < 1e-10);
    }

    #[test]
    fn apply_indicator_recovers_projector() {
        let atoms = atoms_of_diag(&[1.0, 2.0, 2.0]);
        let m = apply_function(&atoms, |x| {
            if (x - 2.0).abs() < 0.5 {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        })
        .unwrap();
        let expect = ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 1.0]);
        assert!(operator_norm(&(&m - &expect)) < 1e-10);
    }

    #[test]
    fn apply_identity_function_reconstructs() {
        let p = ComplexMatrix::from_real_diagonal(&[0.5, 1.5, 3.0]);
        let atoms = SpectrumAtoms::from_hermitian(&p).unwrap();
        let m = apply_function(&atoms, |x| c(x, 0.0)).unwrap();
        assert!(operator_norm(&(&m - &p)) < 1e-10);
    }

    #[test]
    fn apply_undefined_at_zero_atom() {
        let atoms = atoms_of_diag(&[0.0, 1.0]);
        let err = apply_function(&atoms, |x| c(1.0 / x, 0.0)).unwrap_err();
        assert!(matches!(err, Error::DomainError { .. }), "{err}");
    }

    #[test]
    fn fit_exact_when_target_in_basis() {
        // f(x) = 1/x lies in span{1, 1/x, 1/x^2}
        let (poly, sup) = fit_polynomial(
            |x| c(1.0 / x, 0.0),
            &[1.0, 1.5, 2.0],
            2,
            BasisKind::PowersOfInverseX,
        )
        .unwrap();
        assert!(sup <= 1e-12, "sup error {sup}");
        assert!(poly.coefficients[1].re - 1.0 < 1e-10);
    }

    #[test]
    fn fit_interpolates_two_points() {
        let (_, sup) =
            fit_polynomial(|x| c(x, 0.0), &[1.0, 2.0], 1, BasisKind::PowersOfX).unwrap();
        assert!(sup <= 1e-14, "sup error {sup}");
    }

    #[test]
    fn fit_rejects_degree_above_sample_count() {
        let err =
            fit_polynomial(|x| c(x, 0.0), &[1.0, 2.0], 5, BasisKind::PowersOfX).unwrap_err();
        assert!(matches!(err, Error::SingularFit { .. }), "{err}");
    }

    #[test]
    fn density_inverse_basis_approximates_x() {
        let target: &dyn Fn(f64) -> f64 = &|x: f64| x;
        let report = verify_density(
            BasisKind::PowersOfInverseX,
            (1.0, 2.0),
            &[target],
            1e-6,
            25,
        )
        .unwrap();
        assert!(report.converged);
        for w in report.errors.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "errors not non-increasing: {w:?}");
        }
    }

    #[test]
    fn density_square_basis_approximates_inverse() {
        let target: &dyn Fn(f64) -> f64 = &|x: f64| 1.0 / x;
        let report = verify_density(
            BasisKind::PowersOfXSquared,
            (1.0, 2.0),
            &[target],
            1e-6,
            25,
        )
        .unwrap();
        assert!(report.converged);
    }

    #[test]
    fn density_target_in_basis_converges_at_degree_one() {
        let target: &dyn Fn(f64) -> f64 = &|x: f64| 1.0 / x;
        let report = verify_density(
            BasisKind::PowersOfInverseX,
            (1.0, 2.0),
            &[target],
            1e-12,
            25,
        )
        .unwrap();
        assert!(report.converged);
        assert_eq!(*report.degrees.last().unwrap(), 1);
    }

    #[test]
    fn polynomial_trailing_zeros_trimmed() {
        let p = Polynomial::new(
            vec![c(1.0, 0.0), c(2.0, 0.0), Complex64::ZERO],
            BasisKind::PowersOfX,
        );
        assert_eq!(p.degree(), 1);
    }
}
