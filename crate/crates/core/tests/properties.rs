//! Cross-module invariants on seeded corpora, plus the independent
//! least-squares oracle for the density experiments.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use specrep_core::calculus::{apply_function, fit_polynomial, verify_density, BasisKind};
use specrep_core::cyclic::{
    canonical_cyclic_vector, cyclic_decomposition, cyclic_subspace, has_cyclic_vector,
};
use specrep_core::generate::{generate_operator, mix_seed, OperatorKind};
use specrep_core::matrix::{inner, normalize, vec_norm};
use specrep_core::measure::{build_l2_model, spectral_functional, spectral_measure};
use specrep_core::{
    hermitian_eig, operator_norm, polar, ComplexMatrix, DiscreteMeasure, SpectrumAtoms,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    normalize(&v).expect("random vector is nonzero")
}

fn eval_poly(coeffs: &[Complex64], x: f64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::ZERO, |acc, &co| acc * x + co)
}

// ---------------------------------------------------------------------------
// linalg
// ---------------------------------------------------------------------------

#[test]
fn polar_invariants_on_seeded_corpus() {
    for i in 0..40 {
        let dim = 2 + (i % 15);
        let t = generate_operator(OperatorKind::Invertible, dim, mix_seed(1000, i as u64));
        let norm = operator_norm(&t);
        let pd = polar(&t).unwrap();
        assert!(pd.is_invertible);
        let recon = operator_norm(&(&(&pd.unitary_part * &pd.positive_part) - &t));
        assert!(recon <= 1e-8 * norm, "trial {i}: reconstruction {recon}");
        let u = &pd.unitary_part;
        let gram = &u.adjoint() * u;
        assert!(
            operator_norm(&(&gram - &ComplexMatrix::identity(dim))) <= 1e-8,
            "trial {i}: unitarity"
        );

        // independent square-root route through the eigensystem of T*T
        let atoms = SpectrumAtoms::from_hermitian(&(&t.adjoint() * &t)).unwrap();
        let root = apply_function(&atoms, |x| c(x.max(0.0).sqrt(), 0.0)).unwrap();
        assert!(
            operator_norm(&(&root - &pd.positive_part)) <= 1e-8 * norm,
            "trial {i}: square-root route"
        );
    }
}

#[test]
fn spectral_projectors_resolve_identity() {
    for i in 0..20 {
        let dim = 2 + (i % 8);
        let (p, _) =
            specrep_core::generate::generate_positive_with_multiplicities(dim, 77 + i as u64);
        let atoms = SpectrumAtoms::from_hermitian(&p).unwrap();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for proj in &atoms.projectors {
            sum = &sum + proj;
        }
        assert!(
            operator_norm(&(&sum - &ComplexMatrix::identity(dim))) <= 1e-8,
            "trial {i}"
        );
    }
}

// ---------------------------------------------------------------------------
// calculus: the functional calculus is a *-homomorphism on samples
// ---------------------------------------------------------------------------

#[test]
fn apply_function_is_star_homomorphism_on_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..20 {
        let dim = 2 + (trial % 6);
        let t = generate_operator(OperatorKind::Invertible, dim, mix_seed(2000, trial as u64));
        let p = polar(&t).unwrap().positive_part;
        let atoms = SpectrumAtoms::from_hermitian(&p).unwrap();
        let scale = operator_norm(&p).max(1.0);

        let deg_f = rng.random_range(0..=5usize);
        let deg_g = rng.random_range(0..=5usize);
        let cf: Vec<Complex64> = (0..=deg_f)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let cg: Vec<Complex64> = (0..=deg_g)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();

        let f = |x: f64| eval_poly(&cf, x);
        let g = |x: f64| eval_poly(&cg, x);
        let mf = apply_function(&atoms, f).unwrap();
        let mg = apply_function(&atoms, g).unwrap();
        let mfg = apply_function(&atoms, |x| f(x) * g(x)).unwrap();
        let bound = 1e-9 * scale.powi(12);
        assert!(
            operator_norm(&(&(&mf * &mg) - &mfg)) <= bound,
            "trial {trial}: multiplicativity"
        );
        let mconj = apply_function(&atoms, |x| f(x).conj()).unwrap();
        assert!(
            operator_norm(&(&mconj - &mf.adjoint())) <= bound,
            "trial {trial}: conjugation"
        );
    }
}

#[test]
fn functional_calculus_inverts_nonvanishing_polynomials() {
    // p(x) = 1 + x^2 has no zero on positive atoms, so p(P) (1/p)(P) = I
    for trial in 0..10 {
        let dim = 2 + (trial % 5);
        let t = generate_operator(OperatorKind::Invertible, dim, mix_seed(3000, trial as u64));
        let p = polar(&t).unwrap().positive_part;
        let atoms = SpectrumAtoms::from_hermitian(&p).unwrap();
        let fp = apply_function(&atoms, |x| c(1.0 + x * x, 0.0)).unwrap();
        let fp_inv = apply_function(&atoms, |x| c(1.0 / (1.0 + x * x), 0.0)).unwrap();
        assert!(
            operator_norm(&(&(&fp * &fp_inv) - &ComplexMatrix::identity(dim))) <= 1e-9,
            "trial {trial}"
        );
    }
}

// ---------------------------------------------------------------------------
// calculus: density oracle
// ---------------------------------------------------------------------------

/// Independent least-squares route: twice-reorthogonalized Gram-Schmidt on
/// the raw power columns, residual via the projection. Shares no code with
/// the library's Chebyshev-QR path.
fn oracle_sup_error(target: fn(f64) -> f64, basis: fn(f64) -> f64, degree: usize) -> f64 {
    let n = 101;
    let grid: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 / (n - 1) as f64).collect();
    let y: Vec<f64> = grid.iter().map(|&x| target(x)).collect();
    let mut q: Vec<Vec<f64>> = Vec::new();
    for k in 0..=degree {
        let mut col: Vec<f64> = grid.iter().map(|&x| basis(x).powi(k as i32)).collect();
        for _ in 0..2 {
            for prev in &q {
                let dot: f64 = col.iter().zip(prev).map(|(a, b)| a * b).sum();
                for (ci, pi) in col.iter_mut().zip(prev) {
                    *ci -= dot * pi;
                }
            }
        }
        let nrm: f64 = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut col {
            *v /= nrm;
        }
        q.push(col);
    }
    let mut resid = y.clone();
    for col in &q {
        let dot: f64 = resid.iter().zip(col).map(|(a, b)| a * b).sum();
        for (ri, ci) in resid.iter_mut().zip(col) {
            *ri -= dot * ci;
        }
    }
    resid.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

#[test]
fn density_fit_matches_independent_oracle() {
    // target x in the inverse-power basis on [1,2], 101 uniform points:
    // errors strictly decreasing, first below 1e-6 at degree 8
    let grid: Vec<f64> = (0..101).map(|i| 1.0 + i as f64 / 100.0).collect();
    let mut impl_errors = Vec::new();
    for degree in 0..=12 {
        let (_, sup) = fit_polynomial(
            |x| c(x, 0.0),
            &grid,
            degree,
            BasisKind::PowersOfInverseX,
        )
        .unwrap();
        let oracle = oracle_sup_error(|x| x, |x| 1.0 / x, degree);
        assert!(
            (sup - oracle).abs() <= 1e-9 + 1e-6 * oracle,
            "degree {degree}: impl {sup} vs oracle {oracle}"
        );
        impl_errors.push(sup);
    }
    for w in impl_errors.windows(2) {
        assert!(w[1] < w[0], "errors not strictly decreasing: {w:?}");
    }
    let first = impl_errors.iter().position(|&e| e < 1e-6).unwrap();
    assert_eq!(first, 8, "first degree reaching 1e-6");
    assert!((impl_errors[0] - 0.5).abs() < 1e-12, "constant fit of x on [1,2]");
}

#[test]
fn density_reports_converge_for_all_acceptance_targets() {
    let targets: [&dyn Fn(f64) -> f64; 4] =
        [&|x: f64| x, &|x: f64| x * x, &|x: f64| x.sqrt(), &|x: f64| 1.0 / x];
    for basis in [BasisKind::PowersOfInverseX, BasisKind::PowersOfXSquared] {
        for target in targets {
            let report = verify_density(basis, (1.0, 2.0), &[target], 1e-6, 25).unwrap();
            assert!(report.converged, "{basis:?}");
            for w in report.errors.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{basis:?}: {w:?}");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// cyclic
// ---------------------------------------------------------------------------

#[test]
fn decomposition_invariants_on_mixed_multiplicities() {
    for i in 0..25 {
        let dim = 2 + (i % 9);
        let (p, mults) =
            specrep_core::generate::generate_positive_with_multiplicities(dim, 5000 + i as u64);
        let dec = cyclic_decomposition(&p).unwrap();
        assert_eq!(
            dec.subspaces.len(),
            mults.iter().copied().max().unwrap(),
            "trial {i}: subspace count"
        );
        let id = ComplexMatrix::identity(dim);
        let mut q_sum = ComplexMatrix::zeros(dim, dim);
        for s in 0..dec.subspaces.len() {
            let q = dec.projector(s);
            q_sum = &q_sum + &q;
            let off = &(&id - &q) * &(&p * &q);
            assert!(operator_norm(&off) <= 1e-8, "trial {i}: invariance");
        }
        assert!(
            operator_norm(&(&q_sum - &id)) <= 1e-8,
            "trial {i}: completeness"
        );
    }
}

#[test]
fn cyclic_subspace_dimension_counts_touched_atoms() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let p = ComplexMatrix::from_real_diagonal(&[0.5, 1.0, 1.5, 2.0, 2.5]);
        // zero out a random subset of components
        let mut xi = random_unit_vector(&mut rng, 5);
        let mut expected = 0;
        for entry in xi.iter_mut() {
            if rng.random::<bool>() {
                *entry = Complex64::ZERO;
            }
        }
        for entry in xi.iter() {
            if entry.norm() > 1e-8 {
                expected += 1;
            }
        }
        if vec_norm(&xi) < 1e-12 {
            continue;
        }
        let sub = cyclic_subspace(&p, &xi).unwrap();
        assert_eq!(sub.cols(), expected);
    }
}

#[test]
fn cyclic_subspace_equals_krylov_span() {
    // independent route: orthonormalize {xi, P xi, P^2 xi, ...} directly and
    // compare the two subspaces
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for trial in 0..12 {
        let dim = 2 + (trial % 6);
        let (p, _) = specrep_core::generate::generate_positive_with_multiplicities(
            dim,
            mix_seed(12_000, trial as u64),
        );
        let xi = random_unit_vector(&mut rng, dim);
        let sub = cyclic_subspace(&p, &xi).unwrap();

        let mut basis: Vec<Vec<Complex64>> = Vec::new();
        let mut v = xi.clone();
        for _ in 0..dim {
            let mut w = v.clone();
            for _ in 0..2 {
                for b in &basis {
                    let coeff = inner(&w, b);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= coeff * bi;
                    }
                }
            }
            if vec_norm(&w) > 1e-9 {
                basis.push(normalize(&w).unwrap());
            }
            v = p.matvec(&v);
        }
        let krylov = ComplexMatrix::from_columns(&basis);
        assert_eq!(sub.cols(), krylov.cols(), "trial {trial}: dimensions");
        assert!(
            specrep_core::subspace_distance(&sub, &krylov) <= 1e-7,
            "trial {trial}: spans differ"
        );
    }
}

#[test]
fn simple_spectrum_gives_single_full_subspace() {
    for i in 0..10 {
        let t = generate_operator(OperatorKind::Invertible, 5, mix_seed(6000, i));
        let p = polar(&t).unwrap().positive_part;
        let (ok, _) = has_cyclic_vector(&p).unwrap();
        assert!(ok, "shifted singular values are distinct");
        let dec = cyclic_decomposition(&p).unwrap();
        assert_eq!(dec.subspaces.len(), 1);
        assert_eq!(dec.subspaces[0].cols(), 5);
    }
}

// ---------------------------------------------------------------------------
// measure
// ---------------------------------------------------------------------------

#[test]
fn integral_equals_functional_for_random_cyclic_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for trial in 0..25 {
        let dim = 2 + (trial % 8);
        let t = generate_operator(OperatorKind::Invertible, dim, mix_seed(7000, trial as u64));
        let p = polar(&t).unwrap().positive_part;
        let atoms = SpectrumAtoms::from_hermitian(&p).unwrap();
        let xi = random_unit_vector(&mut rng, dim);
        let mu = spectral_measure(&atoms, &xi).unwrap();
        assert!((mu.total_mass() - 1.0).abs() <= 1e-10, "mass = ||xi||^2");

        for _ in 0..10 {
            let deg = rng.random_range(0..=8usize);
            let coeffs: Vec<Complex64> = (0..=deg)
                .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let f = |x: f64| eval_poly(&coeffs, x);
            let sup = mu
                .atoms()
                .iter()
                .map(|&a| f(a).norm())
                .fold(0.0f64, f64::max)
                .max(1e-300);
            let lhs = mu.integrate(f);
            let rhs = spectral_functional(&atoms, &xi, f).unwrap();
            assert!(
                (lhs - rhs).norm() <= 1e-10 * sup,
                "trial {trial}: integral vs functional"
            );
        }
    }
}

#[test]
fn l2_model_transports_polynomials_and_inner_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for trial in 0..15 {
        let dim = 2 + (trial % 6);
        let t = generate_operator(OperatorKind::Invertible, dim, mix_seed(8000, trial as u64));
        let p = polar(&t).unwrap().positive_part;
        let atoms = SpectrumAtoms::from_hermitian(&p).unwrap();
        let xi = canonical_cyclic_vector(&p).unwrap();
        let model = build_l2_model(&atoms, &xi).unwrap();
        let mu = &model.measure;
        let w = &model.isometry;

        // W is unitary here, so W M_z W* = P on the whole space
        let back = &(w * &model.multiplication_by_z()) * &w.adjoint();
        assert!(operator_norm(&(&back - &p)) <= 1e-8, "trial {trial}");

        let deg_f = rng.random_range(0..=6usize);
        let deg_g = rng.random_range(0..=6usize);
        let cf: Vec<Complex64> = (0..=deg_f)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let cg: Vec<Complex64> = (0..=deg_g)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let f = |x: f64| eval_poly(&cf, x);
        let g = |x: f64| eval_poly(&cg, x);

        // the defining map: W (coordinates of f) = f(P) xi
        let f_p = apply_function(&atoms, f).unwrap();
        let f_xi = f_p.matvec(&xi);
        let w_coords = w.matvec(&model.function_coordinates(f));
        let diff: Vec<Complex64> = w_coords.iter().zip(&f_xi).map(|(a, b)| a - b).collect();
        assert!(vec_norm(&diff) <= 1e-9, "trial {trial}: defining map");

        // Parseval transport: <f(P) xi, g(P) xi> = integral of f conj(g)
        let g_p = apply_function(&atoms, g).unwrap();
        let g_xi = g_p.matvec(&xi);
        let lhs = inner(&f_xi, &g_xi);
        let rhs = mu.integrate(|x| f(x) * g(x).conj());
        assert!((lhs - rhs).norm() <= 1e-9, "trial {trial}: Parseval");
    }
}

// ---------------------------------------------------------------------------
// represent
// ---------------------------------------------------------------------------

#[test]
fn spectral_reciprocity_on_seeded_corpus() {
    for i in 0..25 {
        let dim = 2 + (i % 8);
        let t = generate_operator(OperatorKind::Invertible, dim, mix_seed(9000, i as u64));
        let modulus = polar(&t).unwrap().positive_part;
        let vals = hermitian_eig(&modulus).unwrap().values;
        let t_inv = specrep_core::linalg::try_inverse(&t).unwrap();
        let inv_modulus = polar(&t_inv).unwrap().positive_part;
        let inv_vals = hermitian_eig(&inv_modulus).unwrap().values;
        let mut recip: Vec<f64> = vals.iter().map(|v| 1.0 / v).collect();
        recip.reverse();
        for (a, b) in recip.iter().zip(&inv_vals) {
            assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "trial {i}: {a} vs {b}");
        }
    }
}

#[test]
fn normal_operators_are_diagonal_in_their_model() {
    for i in 0..20 {
        let dim = 2 + (i % 10);
        let t = generate_operator(OperatorKind::Normal, dim, mix_seed(10_000, i as u64));
        let rep = specrep_core::build_multiplication_rep(&t, 1e-8).unwrap();
        assert!(rep.representation_holds, "trial {i}: {}", rep.diag_residual);
        for v in &rep.symbol_psi.values {
            assert!((v.norm() - 1.0).abs() <= 1e-8, "trial {i}: psi unimodular");
        }
        for e in &rep.weight_eta.values {
            assert!((e - Complex64::ONE).norm() <= 1e-8, "trial {i}: eta unit");
        }
        // the polar unitary is diagonal in the same basis
        assert!(rep.unitary_part_residual <= 1e-8, "trial {i}: unitary part");
    }
}

#[test]
fn verdicts_agree_on_mixed_corpus() {
    let kinds = [
        OperatorKind::Normal,
        OperatorKind::Hermitian,
        OperatorKind::Positive,
        OperatorKind::ShiftLike,
        OperatorKind::Invertible,
        OperatorKind::Unitary,
    ];
    for i in 0..30 {
        let dim = 2 + (i % 7);
        let kind = kinds[i % kinds.len()];
        let t = generate_operator(kind, dim, mix_seed(11_000, i as u64));
        let report = specrep_core::normality_equivalence(&t, 1e-8).unwrap();
        assert!(report.consistent, "trial {i} kind {kind:?}: {report:?}");
    }
}

// ---------------------------------------------------------------------------
// proptest invariants for the value types
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn pushforward_involution(
        atoms in proptest::collection::vec(0.05f64..50.0, 1..8),
        seed in 0u64..1000,
    ) {
        let mut sorted = atoms.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<f64> = sorted.iter().map(|_| rng.random::<f64>()).collect();
        let mu = DiscreteMeasure::new(sorted, weights).unwrap();
        let back = specrep_core::pushforward_inversion(
            &specrep_core::pushforward_inversion(&mu).unwrap(),
        )
        .unwrap();
        prop_assert_eq!(back.len(), mu.len());
        for (a, b) in back.atoms().iter().zip(mu.atoms()) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs());
        }
        for (a, b) in back.weights().iter().zip(mu.weights()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn rn_reconstruction_identity(
        n in 1usize..7,
        seed in 0u64..1000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms: Vec<f64> = (0..n).map(|i| 0.5 + i as f64).collect();
        let mu_w: Vec<f64> = (0..n).map(|_| 0.1 + rng.random::<f64>()).collect();
        let nu_w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let mu = DiscreteMeasure::new(atoms.clone(), mu_w).unwrap();
        let nu = DiscreteMeasure::new(atoms, nu_w).unwrap();
        let d = specrep_core::radon_nikodym(&nu, &mu, 1e-9).unwrap();
        for k in 0..3 {
            let f = |x: f64| Complex64::new(x.powi(k), 0.0);
            let lhs = nu.integrate(f);
            let rhs: Complex64 = mu
                .atoms()
                .iter()
                .zip(mu.weights())
                .zip(&d.values)
                .map(|((&a, &w), &dv)| f(a) * dv * w)
                .sum();
            prop_assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn adjoint_is_involution(
        rows in 1usize..6,
        cols in 1usize..6,
        seed in 0u64..1000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<Complex64> = (0..rows * cols)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let m = ComplexMatrix::new(rows, cols, data).unwrap();
        prop_assert_eq!(m.adjoint().adjoint(), m);
    }
}
