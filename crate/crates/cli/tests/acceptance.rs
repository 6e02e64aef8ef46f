//! Acceptance suite: one test per release criterion, each printing a
//! single PASS/FAIL line. Run with
//! `cargo test -p agler-cli --test acceptance -- --nocapture`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use rand::Rng;

use agler_core::approx::{cesaro, partial_sum, torus_grid_sup, tuple_contractivity, tail_bound};
use agler_core::cmatrix;
use agler_core::exec;
use agler_core::factorization::{agler_decompose, verify_decomposition, StructuredFactorization};
use agler_core::gramfit::{fit_decomposition, FitOptions, FitOutcome};
use agler_core::kernelcheck::{cholesky_realization, psd_check, sample_gram, lemma_bound_check};
use agler_core::poly::MatrixPoly;
use agler_core::sample::{self, FactorizationCaps};
use agler_core::tuple::{estimate_u_norm, random_commuting_tuple, verify_norm_bound, SearchBudget, Strategy};
use agler_core::C64;

/// Master seed of the 200-case randomized factorization suite shared by
/// criteria 1, 2, 3, and 7.
const SUITE_SEED: u64 = 0xA91E;
const SUITE_CASES: usize = 200;

fn suite_case(k: usize) -> (StructuredFactorization, MatrixPoly) {
    let mut rng = sample::rng_stream(SUITE_SEED, k as u64);
    let f = sample::random_factorization(&mut rng, FactorizationCaps::suite());
    let p = f.expand().expect("suite factorizations are valid");
    (f, p)
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn criterion_1_decomposition_identity() {
    let t0 = Instant::now();
    let results = exec::map_indexed(SUITE_CASES, |k| {
        let (f, p) = suite_case(k);
        let d = agler_decompose(&f).expect("valid suite case decomposes");
        let rep = verify_decomposition(&p, &d).expect("shapes agree");
        let c0_norm = cmatrix::spectral_norm(&f.scalars()[0]);
        let delta_dev = (rep.min_eig_r - (1.0 - c0_norm * c0_norm)).abs();
        (rep.residual, delta_dev)
    });
    let elapsed = t0.elapsed();
    let worst_residual = results.iter().map(|r| r.0).fold(0.0_f64, f64::max);
    let worst_delta = results.iter().map(|r| r.1).fold(0.0_f64, f64::max);
    let pass = worst_residual <= 1e-8 && worst_delta <= 1e-9 && elapsed.as_secs_f64() < 30.0;
    report(
        "criterion 1 (decomposition identity, 200 cases)",
        pass,
        &format!(
            "max residual {worst_residual:.3e} (tol 1e-8), max |minEig(R)-(1-||C0||^2)| {worst_delta:.3e} (tol 1e-9), {elapsed:.2?} (< 30 s)"
        ),
    );
}

#[test]
fn criterion_2_norm_bound() {
    let failures: usize = exec::map_indexed(SUITE_CASES, |k| {
        let (f, p) = suite_case(k);
        let d = agler_decompose(&f).expect("valid suite case decomposes");
        let mut rng = sample::rng_stream(SUITE_SEED ^ 0xB0B, k as u64);
        let mut bad = 0usize;
        for t_idx in 0..5 {
            let dim = 1 + (t_idx + k) % 4;
            let strategy = Strategy::ALL[(t_idx + k) % 3];
            let t = random_commuting_tuple(f.nvars(), dim, rng.random(), strategy)
                .expect("tuple generation succeeds");
            let rep = verify_norm_bound(&d, &p, &t).expect("shapes agree");
            if !(rep.p_norm <= rep.bound + 1e-7 && rep.identity_residual <= 1e-7) {
                bad += 1;
            }
        }
        bad
    })
    .into_iter()
    .sum();
    report(
        "criterion 2 (norm bound + operator identity, 200 cases x 5 tuples)",
        failures == 0,
        &format!("{failures} violations of ||P(T)|| <= sqrt(1-delta)+1e-7 or identity residual > 1e-7"),
    );
}

#[test]
fn criterion_3_lemma_bound() {
    let worst: f64 = exec::map_indexed(SUITE_CASES, |k| {
        let (f, p) = suite_case(k);
        let _ = p;
        let d = agler_decompose(&f).expect("valid suite case decomposes");
        let kernels = d.to_kernel_family().expect("kernel family");
        let mut rng = sample::rng_stream(SUITE_SEED ^ 0x1E3, k as u64);
        let pairs: Vec<_> = (0..100)
            .map(|_| {
                (
                    sample::random_point(&mut rng, f.nvars(), 0.95),
                    sample::random_point(&mut rng, f.nvars(), 0.95),
                )
            })
            .collect();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..f.nvars() {
            let rep = lemma_bound_check(&kernels[i + 1], i, &pairs).expect("in range");
            worst = worst.max(rep.worst_excess);
        }
        worst
    })
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    report(
        "criterion 3 (defect-kernel bound, 100 pairs per case)",
        worst <= 1e-8,
        &format!("max excess of ||K_i(z,w)||^2 over 1/((1-|z_i|^2)(1-|w_i|^2)) is {worst:.3e} (tol 1e-8)"),
    );
}

#[test]
fn criterion_4_cesaro() {
    let results = exec::map_indexed(50, |k| {
        let mut rng = sample::rng_stream(0xCE5A, k as u64);
        let nvars = 1 + k % 3;
        let p = sample::random_poly(&mut rng, nvars, 1 + k % 2, 1 + (k / 2) % 2, 3);

        // (a) Fejer weights equal the partial-sum average, coefficientwise.
        let n = 4 + (k % 7) as u32;
        let mut mean = MatrixPoly::zero(p.nvars(), p.rows(), p.cols());
        for j in 0..=n {
            mean = mean.add(&partial_sum(&p, j)).unwrap();
        }
        let mean = mean.scale(C64::new(1.0 / (n as f64 + 1.0), 0.0));
        let exactness = cesaro(&p, n)
            .sub(&mean)
            .unwrap()
            .iter()
            .map(|(_, m)| cmatrix::max_abs(m))
            .fold(0.0_f64, f64::max);

        // (b) tail bound dominates the grid-sampled sup error.
        let mut bound_ok = true;
        for order in [p.degree(), p.degree() + 5, 100] {
            let diff = cesaro(&p, order).sub(&p).unwrap();
            let sup = torus_grid_sup(&diff, 64);
            bound_ok &= sup <= tail_bound(&p, order) + 1e-12;
        }

        // (c) sampled-tuple contractivity on a 720-point rotation grid.
        let mut contract_ok = true;
        for t_idx in 0..2u64 {
            let dim = 1 + (k + t_idx as usize) % 3;
            let t = random_commuting_tuple(nvars, dim, rng.random(), Strategy::ALL[k % 3]).unwrap();
            for order in [0u32, 3, 8] {
                let (lhs, rhs) = tuple_contractivity(&p, order, &t, 720).unwrap();
                contract_ok &= lhs <= rhs + 1e-6;
            }
        }
        (exactness, bound_ok, contract_ok)
    });
    let worst_exactness = results.iter().map(|r| r.0).fold(0.0_f64, f64::max);
    let bounds = results.iter().all(|r| r.1);
    let contracts = results.iter().all(|r| r.2);
    report(
        "criterion 4 (Cesaro exactness, tail bound, contractivity; 50 cases)",
        worst_exactness <= 1e-14 && bounds && contracts,
        &format!(
            "partial-sum mismatch {worst_exactness:.3e} (tol 1e-14), tail bound dominates: {bounds}, tuple contractivity: {contracts}"
        ),
    );
}

#[test]
fn criterion_5_von_neumann_desk_check() {
    let ratios = exec::map_indexed(20, |k| {
        let mut rng = sample::rng_stream(0x7A11, k as u64);
        let p = sample::random_poly(&mut rng, 1, 1, 1, 4);
        let grid_sup = torus_grid_sup(&p, 4096);
        let budget = SearchBudget {
            restarts: 64,
            iters: 400,
            max_dim: 4,
            strategy: None,
        };
        let est = estimate_u_norm(&p, &budget, 0xE57 + k as u64).expect("search runs");
        est.value / grid_sup
    });
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(0.0_f64, f64::max);
    report(
        "criterion 5 (von Neumann desk check, N=1, 20 polynomials)",
        min >= 0.98 && max <= 1.02,
        &format!("estimate / 4096-grid sup in [{min:.5}, {max:.5}] (window [0.98, 1.02])"),
    );
}

#[test]
fn criterion_6_gram_feasibility() {
    let t0 = Instant::now();
    let results = exec::map_indexed(50, |k| {
        let mut rng = sample::rng_stream(0xF17, k as u64);
        let f = sample::random_factorization(&mut rng, FactorizationCaps::small());
        let p = f.expand().unwrap();
        match fit_decomposition(&p, &FitOptions::default()).expect("fit runs") {
            FitOutcome::Feasible(cert) => {
                let degree_ok = cert.degree <= p.degree() as usize + 1;
                (
                    cert.residual <= 1e-6 && cert.min_gram_eig() >= -1e-9 && degree_ok,
                    cert.residual,
                )
            }
            FitOutcome::Infeasible(reports) => (false, reports.last().map(|r| r.residual).unwrap_or(f64::NAN)),
        }
    });
    let elapsed = t0.elapsed();
    let failures = results.iter().filter(|r| !r.0).count();
    let worst = results.iter().map(|r| r.1).fold(0.0_f64, f64::max);
    report(
        "criterion 6 (Gram feasibility on 50 expanded factorizations)",
        failures == 0 && elapsed.as_secs_f64() < 300.0,
        &format!(
            "{failures} failures, worst residual {worst:.3e} (tol 1e-6, PSD slack 1e-9, d <= deg+1), {elapsed:.2?} (< 5 min)"
        ),
    );
}

#[test]
fn criterion_7_psd_realization() {
    let results = exec::map_indexed(SUITE_CASES, |k| {
        let (f, p) = suite_case(k);
        let d = agler_decompose(&f).expect("valid suite case decomposes");
        let kernels = d.to_kernel_family().expect("kernel family");
        let part_cols = d.part_cols();
        let mut rng = sample::rng_stream(SUITE_SEED ^ 0x7D5, k as u64);
        let points: Vec<Vec<C64>> = (0..6)
            .map(|_| sample::random_point(&mut rng, f.nvars(), 0.9))
            .collect();
        let mut worst_residual = 0.0_f64;
        let mut rank_ok = true;
        for (i, kernel) in kernels.iter().enumerate() {
            if kernel.is_zero() {
                continue;
            }
            let gram = sample_gram(kernel, &points).expect("points inside the polydisk");
            psd_check(&gram, 1e-9).expect("Hermitian Gram");
            let real = cholesky_realization(&gram, kernel.size()).expect("PSD Gram factors");
            worst_residual = worst_residual.max(real.reproduction_residual(&gram));
            // K0 = R + P0 P0* carries the full-rank constant R on top of
            // the P0 columns.
            let cap = part_cols[i] + if i == 0 { p.rows() } else { 0 };
            rank_ok &= real.rank <= cap;
        }
        (worst_residual, rank_ok)
    });
    let worst = results.iter().map(|r| r.0).fold(0.0_f64, f64::max);
    let ranks = results.iter().all(|r| r.1);
    report(
        "criterion 7 (pivoted-Cholesky realization on every suite kernel)",
        worst <= 1e-8 && ranks,
        &format!("max block reproduction residual {worst:.3e} (tol 1e-8), rank within part columns: {ranks}"),
    );
}

fn agler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agler"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn criterion_8_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(
        dir.path(),
        "p.json",
        r#"{"nvars":2,"rows":1,"cols":1,"coeffs":[{"index":[1,0],"matrix":[[[0.4,0.1]]]},{"index":[1,1],"matrix":[[[0.3,0.0]]]}]}"#,
    );
    let kernel = write(
        dir.path(),
        "k.json",
        r#"{"nvars":1,"size":1,"coeffs":[{"index_z":[0],"index_w":[0],"matrix":[[[0.64,0.0]]]}]}"#,
    );

    let mut all_equal = true;
    let mut detail = Vec::new();
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "estimate-norm",
            "--seed",
            "21",
            "--restarts",
            "12",
            "--iters",
            "80",
            "--dim",
            "3",
            poly.to_str().unwrap(),
        ],
        vec![
            "check-kernel",
            "--points",
            "6",
            "--pairs",
            "25",
            "--seed",
            "9",
            kernel.to_str().unwrap(),
        ],
        vec!["fit", poly.to_str().unwrap()],
    ];
    for args in &commands {
        let a = agler(args);
        let b = agler(args);
        let equal = a.stdout == b.stdout && a.status.code() == b.status.code();
        all_equal &= equal;
        detail.push(format!("{}: {}", args[0], if equal { "byte-identical" } else { "DIFFERS" }));
    }
    report(
        "criterion 8 (stochastic commands byte-reproducible under fixed seeds)",
        all_equal,
        &detail.join(", "),
    );
}
