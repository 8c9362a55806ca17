//! Default tolerances.
//!
//! Operator identities are judged relative to the operand norm at desk scale
//! (n <= 64); `BASE` sits an order of magnitude above double-precision
//! eigensolver error there. Atom merging uses a tighter scale so genuinely
//! distinct eigenvalues are never fused.

/// Base tolerance for operator identities.
pub const BASE: f64 = 1e-8;

/// Base tolerance for merging numerically-split eigenvalues.
pub const CLUSTER_BASE: f64 = 1e-9;

/// Eigenvalue floor for positivity checks.
pub const POSITIVITY: f64 = 1e-10;

/// Relative tolerance for identities involving an operator of the given norm.
pub fn relative(norm: f64) -> f64 {
    BASE * norm.max(1.0)
}

/// Merge tolerance for eigenvalues of an operator of the given norm.
pub fn cluster(norm: f64) -> f64 {
    CLUSTER_BASE * norm.max(1.0)
}
