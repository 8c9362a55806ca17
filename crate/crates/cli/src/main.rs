//! specrep: analyze operators, run verification suites, generate corpora.
//!
//! Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or IO
//! error. The default tolerance is 1e-8; the SPECREP_TOL environment
//! variable overrides it and the --tol flag wins over both.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use specrep_core::cyclic::canonical_cyclic_vector;
use specrep_core::generate::{generate_operator, OperatorKind};
use specrep_core::suite::{run_suite, SuiteConfig, SuiteName};
use specrep_core::{
    build_multiplication_rep, hermitian_eig, normality_equivalence, operator_norm, polar,
    spectral_measure, ComplexMatrix, Error, SpectrumAtoms,
};

#[derive(Parser)]
#[command(name = "specrep", version, about = "Operator-model analysis and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for one operator: polar data, spectrum, spectral measure,
    /// multiplication picture, and normality verdicts
    Analyze {
        /// Matrix JSON file: {"rows": n, "cols": n, "data": [[re, im], ...]}
        matrix: PathBuf,
        /// Tolerance override
        #[arg(long)]
        tol: Option<f64>,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named verification suite over a seeded corpus
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Comma-separated list of dimensions cycled across trials
        #[arg(long, default_value = "2,3,4,6,8,12", value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded test operator as matrix JSON
    Generate {
        /// One of: invertible, normal, unitary, positive, hermitian, shift_like
        #[arg(long)]
        kind: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn resolve_tol(flag: Option<f64>) -> Result<f64, String> {
    if let Some(t) = flag {
        if t.is_nan() || t <= 0.0 {
            return Err(format!("tolerance must be positive, got {t}"));
        }
        return Ok(t);
    }
    match std::env::var("SPECREP_TOL") {
        Ok(text) => {
            let t: f64 = text
                .parse()
                .map_err(|_| format!("SPECREP_TOL is not a number: {text}"))?;
            if t.is_nan() || t <= 0.0 {
                return Err(format!("SPECREP_TOL must be positive, got {t}"));
            }
            Ok(t)
        }
        Err(_) => Ok(specrep_core::tol::BASE),
    }
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn analyze(matrix: &PathBuf, tol: f64) -> Result<serde_json::Value, String> {
    let text =
        fs::read_to_string(matrix).map_err(|e| format!("{}: {e}", matrix.display()))?;
    let m = ComplexMatrix::from_json(&text).map_err(|e| e.to_string())?;
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        }
        .to_string());
    }

    let norm = operator_norm(&m);
    let pd = polar(&m).map_err(|e| e.to_string())?;
    let recon =
        operator_norm(&(&(&pd.unitary_part * &pd.positive_part) - &m)) / norm.max(1.0);
    let id = ComplexMatrix::identity(m.rows());
    let u = &pd.unitary_part;
    let unitarity = operator_norm(&(&(&u.adjoint() * u) - &id));
    let modulus_eig = hermitian_eig(&pd.positive_part).map_err(|e| e.to_string())?;
    let atoms = SpectrumAtoms::from_hermitian(&pd.positive_part).map_err(|e| e.to_string())?;

    let measure = canonical_cyclic_vector(&pd.positive_part)
        .ok()
        .and_then(|xi| spectral_measure(&atoms, &xi).ok())
        .map(|mu| json!({"atoms": mu.atoms(), "weights": mu.weights()}));

    let representation = match build_multiplication_rep(&m, tol) {
        Ok(rep) => serde_json::to_value(&rep).ok(),
        Err(Error::NotCyclic { .. }) => None,
        Err(e) => return Err(e.to_string()),
    };

    let normality = normality_equivalence(&m, tol).map_err(|e| e.to_string())?;

    Ok(json!({
        "operator": {"rows": m.rows(), "cols": m.cols(), "norm": norm},
        "tol": tol,
        "polar": {
            "reconstruction_residual": recon,
            "unitarity_residual": unitarity,
            "is_invertible": pd.is_invertible,
            "singular_values": modulus_eig.values,
        },
        "spectrum": {"atoms": atoms.atoms, "multiplicities": atoms.multiplicities},
        "measure": measure,
        "representation": representation,
        "normality": serde_json::to_value(&normality).map_err(|e| e.to_string())?,
    }))
}

fn run() -> Result<bool, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze { matrix, tol, out } => {
            let tol = resolve_tol(tol)?;
            let report = analyze(&matrix, tol)?;
            let text = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
            write_output(out.as_ref(), &text)?;
            Ok(true)
        }
        Command::Verify {
            suite,
            trials,
            dims,
            seed,
            tol,
            out,
        } => {
            let suite = SuiteName::parse(&suite)
                .ok_or_else(|| format!("unknown suite: {suite}"))?;
            if dims.is_empty() || dims.contains(&0) {
                return Err("dims must be positive".into());
            }
            let tol = resolve_tol(tol)?;
            let config = SuiteConfig::new(suite, trials, dims, seed, tol);
            let report = run_suite(&config);
            write_output(out.as_ref(), &report.to_json())?;
            let agg = &report.aggregate;
            eprintln!(
                "suite {}: {}/{} trials passed in {} ms",
                report.suite, agg.pass_count, agg.trial_count, agg.wall_time_ms
            );
            Ok(report.all_pass())
        }
        Command::Generate {
            kind,
            dim,
            seed,
            out,
        } => {
            let kind = OperatorKind::parse(&kind)
                .ok_or_else(|| format!("unknown operator kind: {kind}"))?;
            if dim == 0 {
                return Err("dim must be positive".into());
            }
            let m = generate_operator(kind, dim, seed);
            write_output(Some(&out), &m.to_json())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
