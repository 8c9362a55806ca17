//! Seeded operator corpora.
//!
//! All randomness flows through ChaCha8 keyed by a splitmix64 hash of
//! (seed, kind, dim), so a fixed triple always produces the same matrix,
//! independent of call order. Spectra are kept bounded away from zero and
//! mutually separated so that corpus operators are invertible with simple
//! modulus spectrum whenever the construction promises it.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{from_dmatrix, to_dmatrix};
use crate::matrix::ComplexMatrix;

/// Identity of the PRNG behind every corpus, recorded in reports.
pub const GENERATOR_ID: &str = "chacha8";

/// Families of test operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// Generic dense matrix with singular values clamped to at least 0.1.
    Invertible,
    /// V diag(c) V* with Haar V and complex c of distinct moduli in [0.5, 2.5].
    Normal,
    /// Haar-distributed unitary.
    Unitary,
    /// V diag(p) V* with distinct p in [0.1, 3].
    Positive,
    /// V diag(r) V* with real r of distinct moduli, signs random.
    Hermitian,
    /// Weighted cyclic shift e_j -> w_j e_{j+1}; non-normal for unequal weights.
    ShiftLike,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 6] = [
        OperatorKind::Invertible,
        OperatorKind::Normal,
        OperatorKind::Unitary,
        OperatorKind::Positive,
        OperatorKind::Hermitian,
        OperatorKind::ShiftLike,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Invertible => "invertible",
            OperatorKind::Normal => "normal",
            OperatorKind::Unitary => "unitary",
            OperatorKind::Positive => "positive",
            OperatorKind::Hermitian => "hermitian",
            OperatorKind::ShiftLike => "shift_like",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// splitmix64 step; the documented seed-mixing function.
pub fn mix_seed(state: u64, salt: u64) -> u64 {
    let mut z = state
        .wrapping_add(salt)
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng_for(kind_salt: u64, dim: usize, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(mix_seed(seed, kind_salt), dim as u64))
}

fn standard_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let data = (0..dim * dim).map(|_| standard_complex(rng)).collect();
    ComplexMatrix::new(dim, dim, data).expect("gaussian entries are finite")
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the R-diagonal
/// phases absorbed into Q.
fn haar_unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let g = to_dmatrix(&gaussian_matrix(rng, dim));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut fixed = q.clone();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::ONE };
        for i in 0..dim {
            fixed[(i, j)] *= phase;
        }
    }
    from_dmatrix(&fixed)
}

/// Distinct values in [lo, hi]: evenly spaced slots with jitter confined to
/// the middle half of each slot, so gaps never close.
fn spaced_values(rng: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    let step = (hi - lo) / dim as f64;
    (0..dim)
        .map(|j| lo + step * (j as f64 + 0.25 + 0.5 * rng.random::<f64>()))
        .collect()
}

/// Deterministic seeded operator of the given family.
pub fn generate_operator(kind: OperatorKind, dim: usize, seed: u64) -> ComplexMatrix {
    assert!(dim >= 1, "dimension must be positive");
    let mut rng = rng_for(kind as u64, dim, seed);
    match kind {
        OperatorKind::Invertible => {
            let g = to_dmatrix(&gaussian_matrix(&mut rng, dim));
            let svd = g.svd(true, true);
            let u = svd.u.as_ref().expect("svd with vectors");
            let v_t = svd.v_t.as_ref().expect("svd with vectors");
            // shift rather than clamp: keeps singular values distinct
            let shifted = nalgebra::DMatrix::from_diagonal(
                &svd.singular_values.map(|s| Complex64::new(s + 0.1, 0.0)),
            );
            from_dmatrix(&(u * shifted * v_t))
        }
        OperatorKind::Normal => {
            let v = haar_unitary(&mut rng, dim);
            let moduli = spaced_values(&mut rng, dim, 0.5, 2.5);
            let diag: Vec<Complex64> = moduli
                .into_iter()
                .map(|m| Complex64::from_polar(m, rng.random::<f64>() * std::f64::consts::TAU))
                .collect();
            conjugate_diagonal(&v, &diag)
        }
        OperatorKind::Unitary => haar_unitary(&mut rng, dim),
        OperatorKind::Positive => {
            let v = haar_unitary(&mut rng, dim);
            let diag: Vec<Complex64> = spaced_values(&mut rng, dim, 0.1, 3.0)
                .into_iter()
                .map(|p| Complex64::new(p, 0.0))
                .collect();
            conjugate_diagonal(&v, &diag)
        }
        OperatorKind::Hermitian => {
            let v = haar_unitary(&mut rng, dim);
            let diag: Vec<Complex64> = spaced_values(&mut rng, dim, 0.1, 2.1)
                .into_iter()
                .map(|m| {
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    Complex64::new(sign * m, 0.0)
                })
                .collect();
            conjugate_diagonal(&v, &diag)
        }
        OperatorKind::ShiftLike => {
            let weights = spaced_values(&mut rng, dim, 0.5, 2.0);
            let mut m = ComplexMatrix::zeros(dim, dim);
            for (j, &w) in weights.iter().enumerate() {
                m.set((j + 1) % dim, j, Complex64::new(w, 0.0));
            }
            m
        }
    }
}

/// Positive-definite operator with a prescribed random multiplicity pattern;
/// returns the matrix together with the atom multiplicities used. Intended
/// for decomposition corpora where degenerate spectra are the point.
pub fn generate_positive_with_multiplicities(
    dim: usize,
    seed: u64,
) -> (ComplexMatrix, Vec<usize>) {
    assert!(dim >= 1);
    let mut rng = rng_for(0x6d756c74, dim, seed);
    let distinct = rng.random_range(1..=dim);
    // random composition of dim into `distinct` parts
    let mut mults = vec![1usize; distinct];
    for _ in 0..dim - distinct {
        let idx = rng.random_range(0..distinct);
        mults[idx] += 1;
    }
    let atoms = spaced_values(&mut rng, distinct, 0.1, 3.0);
    let v = haar_unitary(&mut rng, dim);
    let mut diag = Vec::with_capacity(dim);
    for (a, &m) in atoms.iter().zip(&mults) {
        diag.extend((0..m).map(|_| Complex64::new(*a, 0.0)));
    }
    (conjugate_diagonal(&v, &diag), mults)
}

fn conjugate_diagonal(v: &ComplexMatrix, diag: &[Complex64]) -> ComplexMatrix {
    let d = ComplexMatrix::from_diagonal(diag);
    &(v * &d) * &v.adjoint()
}
