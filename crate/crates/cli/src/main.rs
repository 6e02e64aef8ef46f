//! `agler` — construct, verify, approximate, and numerically certify
//! decompositions of matrix polynomials on the polydisk.
//!
//! Every command reads and writes the JSON schemas printed by
//! `agler --schema`. Reports go to stdout as JSON; a short human summary
//! goes to stderr. Exit codes: 0 success, 2 verification failure,
//! 1 input error.

mod complex_arg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use agler_core::approx;
use agler_core::factorization::{agler_decompose, verify_decomposition, StructuredFactorization};
use agler_core::gramfit::{self, FitOptions, FitOutcome};
use agler_core::json::{
    CertificateJson, DecompositionJson, FactorizationJson, KernelJson, PolyJson, TupleJson,
};
use agler_core::kernelcheck;
use agler_core::poly::MatrixPoly;
use agler_core::sample;
use agler_core::tuple::{estimate_u_norm, eval_at_tuple, CommutingTuple, SearchBudget, Strategy};
use agler_core::{HermitianKernelPoly, C64};

const SCHEMA_DOC: &str = include_str!("schema.txt");

#[derive(Parser)]
#[command(name = "agler", version, about = "Agler decompositions of matrix polynomials on the polydisk")]
struct Cli {
    /// Print the JSON file formats used by every command, then exit.
    #[arg(long)]
    schema: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a structured factorization C0 D1(z) C1 ... Dl(z) Cl into a
    /// matrix polynomial.
    Expand { factorization: PathBuf },

    /// Run the constructive decomposition
    /// I - P P* = R + P0 P0* + sum_i (1 - z_i w_i~) P_i P_i*.
    Decompose { factorization: PathBuf },

    /// Check the decomposition identity symbolically.
    Verify {
        poly: PathBuf,
        decomposition: PathBuf,
        /// Max allowed coefficient residual.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },

    /// Emit the kernel family K0 = R + P0 P0*, K_i = P_i P_i*.
    Kernels { decomposition: PathBuf },

    /// Cesaro mean of order n (Fejer-weighted truncation).
    Cesaro {
        #[arg(long)]
        n: u32,
        poly: PathBuf,
    },

    /// Evaluate a polynomial at a point of the polydisk or at a commuting
    /// tuple.
    Eval {
        /// Expected tuple dimension (1 for points).
        #[arg(long)]
        dim: Option<usize>,
        /// Comma-separated complex coordinates, e.g. "0.5,-0.2+0.1i".
        #[arg(long, conflicts_with = "tuple")]
        point: Option<String>,
        /// JSON file with a commuting tuple.
        #[arg(long)]
        tuple: Option<PathBuf>,
        poly: PathBuf,
    },

    /// Randomized lower-bound search for the u-norm.
    EstimateNorm {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        /// Max tuple dimension explored.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// diagonalizable | single-generator | upper-triangular | auto
        #[arg(long, default_value = "auto")]
        strategy: String,
        poly: PathBuf,
    },

    /// Gram-matrix feasibility search for
    /// I - P P* = V G0 V* + sum_i (1 - z_i w_i~) V G_i V*.
    Fit {
        /// Basis degree bound (default: deg P).
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 5000)]
        max_iter: usize,
        /// Escalation cap (default: deg P + 2).
        #[arg(long)]
        max_degree: Option<usize>,
        poly: PathBuf,
    },

    /// Sample-based kernel checks: Gram PSD verdict, defect bound,
    /// pivoted-Cholesky realization.
    CheckKernel {
        /// Number of sample points for the Gram matrix.
        #[arg(long, default_value_t = 6)]
        points: usize,
        /// Number of random point pairs for the defect bound.
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long)]
        seed: u64,
        /// 1-based variable for the defect bound (default: all).
        #[arg(long)]
        var: Option<usize>,
        /// PSD tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        kernel: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    if cli.schema {
        print!("{SCHEMA_DOC}");
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("missing command; see --help or --schema");
        return ExitCode::from(1);
    };
    match run(command) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_poly(path: &Path) -> Result<MatrixPoly, String> {
    let json: PolyJson = read_json(path)?;
    MatrixPoly::try_from(&json).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable report"));
}

fn run(command: Command) -> Result<u8, String> {
    match command {
        Command::Expand { factorization } => {
            let f = read_factorization(&factorization)?;
            let p = f.expand().map_err(|e| e.to_string())?;
            eprintln!(
                "expanded to a {}x{} polynomial of degree {} with {} terms",
                p.rows(),
                p.cols(),
                p.degree(),
                p.term_count()
            );
            emit(&PolyJson::from(&p));
            Ok(0)
        }

        Command::Decompose { factorization } => {
            let f = read_factorization(&factorization)?;
            let d = agler_decompose(&f).map_err(|e| e.to_string())?;
            eprintln!(
                "decomposed: delta = {:.6e}, part columns {:?}",
                d.delta(),
                d.part_cols()
            );
            emit(&DecompositionJson::from(&d));
            Ok(0)
        }

        Command::Verify {
            poly,
            decomposition,
            tol,
        } => {
            let p = read_poly(&poly)?;
            let json: DecompositionJson = read_json(&decomposition)?;
            let d = agler_core::factorization::AglerDecomposition::try_from(&json)
                .map_err(|e| e.to_string())?;
            let report = verify_decomposition(&p, &d).map_err(|e| e.to_string())?;
            let pass = report.passes(tol);
            emit(&json!({
                "residual": report.residual,
                "min_eig_r": report.min_eig_r,
                "part_cols": report.part_cols,
                "pass": pass,
            }));
            eprintln!(
                "residual {:.3e}, min eig R {:.3e}: {}",
                report.residual,
                report.min_eig_r,
                verdict(pass)
            );
            Ok(if pass { 0 } else { 2 })
        }

        Command::Kernels { decomposition } => {
            let json: DecompositionJson = read_json(&decomposition)?;
            let d = agler_core::factorization::AglerDecomposition::try_from(&json)
                .map_err(|e| e.to_string())?;
            let kernels = d.to_kernel_family().map_err(|e| e.to_string())?;
            eprintln!("kernel family with {} members", kernels.len());
            emit(&json!({
                "kernels": kernels.iter().map(KernelJson::from).collect::<Vec<_>>(),
            }));
            Ok(0)
        }

        Command::Cesaro { n, poly } => {
            let p = read_poly(&poly)?;
            let approximant = approx::cesaro(&p, n);
            eprintln!(
                "order-{n} approximant: {} terms, tail bound {:.3e}",
                approximant.term_count(),
                approx::tail_bound(&p, n)
            );
            emit(&PolyJson::from(&approximant));
            Ok(0)
        }

        Command::Eval {
            dim,
            point,
            tuple,
            poly,
        } => {
            let p = read_poly(&poly)?;
            let value = match (point, tuple) {
                (Some(point), None) => {
                    if let Some(d) = dim {
                        if d != 1 {
                            return Err(format!("--point implies --dim 1, got {d}"));
                        }
                    }
                    let z = complex_arg::parse_point(&point)?;
                    p.evaluate_point(&z).map_err(|e| e.to_string())?
                }
                (None, Some(path)) => {
                    let json: TupleJson = read_json(&path)?;
                    let t = CommutingTuple::try_from(&json).map_err(|e| e.to_string())?;
                    if let Some(d) = dim {
                        if d != t.dim() {
                            return Err(format!("--dim {d} but tuple has dimension {}", t.dim()));
                        }
                    }
                    if !t.validate().is_valid() {
                        return Err("tuple fails validation (commutators or norms)".to_string());
                    }
                    eval_at_tuple(&p, &t).map_err(|e| e.to_string())?
                }
                _ => return Err("provide exactly one of --point or --tuple".to_string()),
            };
            eprintln!("value is {}x{}", value.nrows(), value.ncols());
            emit(&agler_core::json::matrix_to_json(&value));
            Ok(0)
        }

        Command::EstimateNorm {
            seed,
            restarts,
            iters,
            dim,
            strategy,
            poly,
        } => {
            let p = read_poly(&poly)?;
            let strategy = match strategy.as_str() {
                "auto" => None,
                other => Some(
                    Strategy::parse(other)
                        .ok_or_else(|| format!("unknown strategy {other:?}"))?,
                ),
            };
            let budget = SearchBudget {
                restarts,
                iters,
                max_dim: dim,
                strategy,
            };
            let est = estimate_u_norm(&p, &budget, seed).map_err(|e| e.to_string())?;
            eprintln!(
                "lower bound {:.12} from restart {} ({})",
                est.value,
                est.restart,
                est.strategy.name()
            );
            emit(&json!({
                "estimate": est.value,
                "restart": est.restart,
                "strategy": est.strategy.name(),
                "witness": TupleJson::from(&est.witness),
            }));
            Ok(0)
        }

        Command::Fit {
            degree,
            tol,
            max_iter,
            max_degree,
            poly,
        } => {
            let p = read_poly(&poly)?;
            let opts = FitOptions {
                degree,
                tol,
                max_iter,
                max_degree,
            };
            match gramfit::fit_decomposition(&p, &opts).map_err(|e| e.to_string())? {
                FitOutcome::Feasible(cert) => {
                    eprintln!(
                        "feasible at degree {}: residual {:.3e} after {} iterations",
                        cert.degree, cert.residual, cert.iterations
                    );
                    emit(&CertificateJson::from(&cert));
                    Ok(0)
                }
                FitOutcome::Infeasible(attempts) => {
                    eprintln!("no certificate within the degree cap");
                    emit(&json!({
                        "infeasible": true,
                        "attempts": attempts.iter().map(|a| json!({
                            "degree": a.degree,
                            "residual": a.residual,
                            "cone_distance": a.cone_distance,
                            "iterations": a.iterations,
                        })).collect::<Vec<_>>(),
                    }));
                    Ok(2)
                }
            }
        }

        Command::CheckKernel {
            points,
            pairs,
            seed,
            var,
            tol,
            kernel,
        } => {
            let json: KernelJson = read_json(&kernel)?;
            let k = HermitianKernelPoly::try_from(&json).map_err(|e| e.to_string())?;
            check_kernel(&k, points, pairs, seed, var, tol)
        }
    }
}

fn read_factorization(path: &Path) -> Result<StructuredFactorization, String> {
    let json: FactorizationJson = read_json(path)?;
    let f = StructuredFactorization::try_from(&json).map_err(|e| format!("{}: {e}", path.display()))?;
    let report = f.validate();
    if !report.is_valid() {
        return Err(format!(
            "{}: factorization fails validation: {:?}",
            path.display(),
            report.violations
        ));
    }
    Ok(f)
}

fn check_kernel(
    k: &HermitianKernelPoly,
    points: usize,
    pairs: usize,
    seed: u64,
    var: Option<usize>,
    tol: f64,
) -> Result<u8, String> {
    let mut rng = sample::rng_from_seed(seed);
    let sampled: Vec<Vec<C64>> = (0..points.max(1))
        .map(|_| sample::random_point(&mut rng, k.nvars(), 0.95))
        .collect();
    let gram = kernelcheck::sample_gram(k, &sampled).map_err(|e| e.to_string())?;
    let psd = kernelcheck::psd_check(&gram, tol).map_err(|e| e.to_string())?;

    let realization = if psd.psd {
        Some(kernelcheck::cholesky_realization(&gram, k.size()).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let reproduction = realization.as_ref().map(|r| r.reproduction_residual(&gram));

    let vars: Vec<usize> = match var {
        Some(v) => {
            if v == 0 || v > k.nvars() {
                return Err(format!("--var {v} out of range 1..={}", k.nvars()));
            }
            vec![v - 1]
        }
        None => (0..k.nvars()).collect(),
    };
    let pair_samples: Vec<(Vec<C64>, Vec<C64>)> = (0..pairs)
        .map(|_| {
            (
                sample::random_point(&mut rng, k.nvars(), 0.95),
                sample::random_point(&mut rng, k.nvars(), 0.95),
            )
        })
        .collect();
    let mut lemma_reports = Vec::new();
    let mut lemma_pass = true;
    for v in vars {
        let report = kernelcheck::lemma_bound_check(k, v, &pair_samples).map_err(|e| e.to_string())?;
        let pass = report.passes(1e-8);
        lemma_pass &= pass;
        lemma_reports.push(json!({
            "var": v + 1,
            // Positive slack means the pair satisfies the bound.
            "slacks": report.entries.iter().map(|e| e.bound - e.norm_sq).collect::<Vec<_>>(),
            "worst_excess": report.worst_excess,
            "pass": pass,
        }));
    }

    let repro_pass = reproduction.map(|r| r <= 1e-8).unwrap_or(false);
    let pass = psd.psd && repro_pass && lemma_pass;
    emit(&json!({
        "points": sampled.len(),
        "min_eig": psd.min_eig,
        "psd": psd.psd,
        "rank": realization.as_ref().map(|r| r.rank),
        "reproduction_residual": reproduction,
        "lemma": lemma_reports,
        "pass": pass,
    }));
    eprintln!(
        "min eig {:.3e}, rank {:?}: {}",
        psd.min_eig,
        realization.as_ref().map(|r| r.rank),
        verdict(pass)
    );
    Ok(if pass { 0 } else { 2 })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
