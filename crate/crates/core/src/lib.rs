//! Finite-dimensional models for bounded operators built from the polar
//! decomposition T = U|T|: spectral measures of the modulus, cyclic
//! decompositions of the space under its algebra, the L^2 multiplication
//! picture, and measured verdicts for the unitary-equivalence and normality
//! claims that connect them.
//!
//! Everything is dense, double-precision, and deterministic. Identities are
//! checked against explicit tolerances and reported as residuals; see the
//! `suite` module for the seeded verification corpora and the `tol` module
//! for the defaults.

pub mod calculus;
pub mod cyclic;
pub mod error;
pub mod generate;
pub mod linalg;
pub mod matrix;
pub mod measure;
pub mod represent;
pub mod suite;
pub mod tol;

pub use calculus::{apply_function, fit_polynomial, verify_density, BasisKind, DensityReport, Polynomial};
pub use cyclic::{
    cyclic_decomposition, cyclic_subspace, has_cyclic_vector, subspace_distance,
    verify_invertible_invariance, verify_power_transport, CyclicDecomposition, TransportReport,
};
pub use error::{Error, Result};
pub use generate::{generate_operator, OperatorKind, GENERATOR_ID};
pub use linalg::{
    adjoint, cluster_spectrum, hermitian_eig, operator_norm, polar, EigenSystem,
    PolarDecomposition, SpectrumAtoms,
};
pub use matrix::ComplexMatrix;
pub use measure::{
    build_l2_model, pushforward_inversion, radon_nikodym, spectral_functional, spectral_measure,
    DiscreteMeasure, FunctionOnAtoms, L2Model,
};
pub use represent::{
    build_multiplication_rep, commutant_membership, normality_equivalence, verify_adjoint_modulus,
    verify_inverse_modulus, InverseModulusReport, MultiplicationRep, NormalityReport,
};
pub use suite::{run_suite, SuiteConfig, SuiteName, SuiteReport};
