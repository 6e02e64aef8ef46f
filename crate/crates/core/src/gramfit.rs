//! Degree-bounded Gram-matrix feasibility search: given `P`, find PSD
//! matrices `G_0, ..., G_N` over the monomial basis `V(z)` of total degree
//! at most `d` with
//!
//! ```text
//! I - P(z)P(w)* = V(z)G_0 V(w)* + sum_i (1 - z_i conj(w_i)) V(z)G_i V(w)*
//! ```
//!
//! The search alternates between the product of PSD cones (metric
//! projection by eigenvalue clipping, with Dykstra's correction) and the
//! affine subspace of coefficient-matching Gram tuples. The affine
//! projection is exact: the matching constraints decouple into independent
//! classes by the index offset `I - J` and act identically on every matrix
//! entry, so each class needs one small precomputed pseudoinverse.

use std::collections::BTreeMap;

use crate::cmatrix::{self, CMatrix};
use crate::error::{Error, Result};
use crate::kernel::HermitianKernelPoly;
use crate::multiindex::MultiIndex;
use crate::poly::MatrixPoly;
use crate::C64;

/// PSD slack allowed on a certificate: `min_eig(G_i) >= -PSD_TOL`.
pub const PSD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    /// Basis degree bound; defaults to `deg(P)`.
    pub degree: Option<usize>,
    /// Residual tolerance for success.
    pub tol: f64,
    /// Iteration cap per degree attempt.
    pub max_iter: usize,
    /// Escalation cap; defaults to `deg(P) + 2`.
    pub max_degree: Option<usize>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            degree: None,
            tol: 1e-6,
            max_iter: 5000,
            max_degree: None,
        }
    }
}

/// A feasible point: PSD Gram matrices over the monomial basis.
#[derive(Clone, Debug)]
pub struct GramCertificate {
    pub degree: usize,
    /// Monomials of total degree `<= degree`, lexicographic.
    pub basis: Vec<MultiIndex>,
    /// `N + 1` Hermitian matrices of size `basis.len() * m`; index 0 is
    /// the defect-free term.
    pub grams: Vec<CMatrix>,
    /// Max coefficient mismatch of the expanded identity.
    pub residual: f64,
    pub iterations: usize,
}

impl GramCertificate {
    /// Kernel family `K_i(z,w) = V(z) G_i V(w)*`.
    pub fn kernels(&self, block_size: usize) -> Vec<HermitianKernelPoly> {
        let nvars = self.basis.first().map(|i| i.len()).unwrap_or(0);
        self.grams
            .iter()
            .map(|g| {
                let mut k = HermitianKernelPoly::zero(nvars, block_size);
                for (a, alpha) in self.basis.iter().enumerate() {
                    for (b, beta) in self.basis.iter().enumerate() {
                        let block = g
                            .view((a * block_size, b * block_size), (block_size, block_size))
                            .into_owned();
                        if cmatrix::max_abs(&block) > 0.0 {
                            k.add_to_coeff((alpha.clone(), beta.clone()), &block);
                        }
                    }
                }
                k
            })
            .collect()
    }

    pub fn min_gram_eig(&self) -> f64 {
        self.grams
            .iter()
            .map(cmatrix::min_eig_hermitian)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Diagnostics for a degree attempt that did not reach tolerance.
#[derive(Clone, Debug)]
pub struct AttemptReport {
    pub degree: usize,
    /// Best coefficient mismatch achieved by a PSD iterate.
    pub residual: f64,
    /// How far the best affine-feasible iterate sat outside the PSD cones
    /// (absolute value of its most negative eigenvalue).
    pub cone_distance: f64,
    pub iterations: usize,
}

/// Search result: a certificate, or per-degree diagnostics.
#[derive(Clone, Debug)]
pub enum FitOutcome {
    Feasible(GramCertificate),
    Infeasible(Vec<AttemptReport>),
}

impl FitOutcome {
    pub fn certificate(&self) -> Option<&GramCertificate> {
        match self {
            FitOutcome::Feasible(cert) => Some(cert),
            FitOutcome::Infeasible(_) => None,
        }
    }
}

/// All monomials of total degree at most `d`, lexicographic.
pub fn monomial_basis(nvars: usize, d: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; nvars];
    collect_monomials(&mut current, 0, d as u32, &mut out);
    out.sort();
    out
}

fn collect_monomials(current: &mut Vec<u32>, var: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if var == current.len() {
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for e in 0..=remaining {
        current[var] = e;
        collect_monomials(current, var + 1, remaining - e, out);
    }
    current[var] = 0;
}

/// Degree-escalating alternating-projection search. Deterministic given
/// the options. Non-convergence is reported, not an error.
pub fn fit_decomposition(p: &MatrixPoly, opts: &FitOptions) -> Result<FitOutcome> {
    let start = opts.degree.unwrap_or(p.degree() as usize);
    let max_degree = opts.max_degree.unwrap_or(p.degree() as usize + 2).max(start);
    let target = target_kernel(p)?;
    let mut reports = Vec::new();
    for degree in start..=max_degree {
        match attempt(p, &target, degree, opts)? {
            AttemptOutcome::Success(cert) => return Ok(FitOutcome::Feasible(cert)),
            AttemptOutcome::Fail(report) => reports.push(report),
        }
    }
    Ok(FitOutcome::Infeasible(reports))
}

/// `E = I - P(z)P(w)*` as a kernel polynomial.
fn target_kernel(p: &MatrixPoly) -> Result<HermitianKernelPoly> {
    HermitianKernelPoly::from_constant(p.nvars(), cmatrix::identity(p.rows()))
        .sub(&HermitianKernelPoly::product(p, p)?)
}

/// Expand `sum_i defect_i V G_i V*` and return the max coefficient-entry
/// deviation from `I - P(z)P(w)*`.
pub fn certificate_residual(p: &MatrixPoly, cert: &GramCertificate) -> Result<f64> {
    let m = p.rows();
    for g in &cert.grams {
        if g.nrows() != cert.basis.len() * m {
            return Err(Error::shape(format!(
                "Gram matrix size {} does not match basis {} x block {m}",
                g.nrows(),
                cert.basis.len()
            )));
        }
    }
    if cert.grams.len() != p.nvars() + 1 {
        return Err(Error::shape(format!(
            "{} Gram matrices for {} variables",
            cert.grams.len(),
            p.nvars()
        )));
    }
    let kernels = cert.kernels(m);
    let mut assembled = kernels[0].clone();
    for i in 0..p.nvars() {
        assembled = assembled.add(&kernels[i + 1].mul_defect(i)?)?;
    }
    Ok(target_kernel(p)?.max_coeff_diff(&assembled))
}

enum AttemptOutcome {
    Success(GramCertificate),
    Fail(AttemptReport),
}

fn attempt(
    p: &MatrixPoly,
    target: &HermitianKernelPoly,
    degree: usize,
    opts: &FitOptions,
) -> Result<AttemptOutcome> {
    let system = ConstraintSystem::build(p.nvars(), p.rows(), degree, target);

    // Coefficients of the target that no Gram entry can reach make the
    // degree structurally infeasible; report without iterating.
    if system.structural_residual > opts.tol {
        return Ok(AttemptOutcome::Fail(AttemptReport {
            degree,
            residual: system.structural_residual,
            cone_distance: f64::INFINITY,
            iterations: 0,
        }));
    }

    let m = p.rows();
    let size = system.basis.len() * m;
    let n_grams = p.nvars() + 1;

    // Start from G_0 carrying the target coefficients, projected onto the
    // constraint subspace so the loop-top iterate is always affine-feasible.
    let mut start: Vec<CMatrix> = (0..n_grams).map(|_| cmatrix::zeros(size, size)).collect();
    for (a, alpha) in system.basis.iter().enumerate() {
        for (b, beta) in system.basis.iter().enumerate() {
            if let Some(block) = target.coeff(alpha, beta) {
                start[0].view_mut((a * m, b * m), (m, m)).copy_from(block);
            }
        }
    }
    let mut affine = system.project(start);

    let mut correction: Vec<CMatrix> = (0..n_grams).map(|_| cmatrix::zeros(size, size)).collect();
    let mut best_psd_residual = f64::INFINITY;
    let mut best_cone_distance = f64::INFINITY;

    for iter in 0..=opts.max_iter {
        // Affine-side success: exactly matching coefficients, eigenvalues
        // within the PSD slack.
        let cone_distance = (-affine
            .iter()
            .map(cmatrix::min_eig_hermitian)
            .fold(f64::INFINITY, f64::min))
        .max(0.0);
        best_cone_distance = best_cone_distance.min(cone_distance);
        if cone_distance <= PSD_TOL {
            let cert = finish(p, &system, affine, iter)?;
            return Ok(AttemptOutcome::Success(cert));
        }
        if iter == opts.max_iter {
            break;
        }

        // Cone side with Dykstra correction.
        let mut psd = Vec::with_capacity(n_grams);
        for i in 0..n_grams {
            let shifted = &affine[i] + &correction[i];
            let projected = cmatrix::project_psd(&shifted);
            correction[i] = shifted - &projected;
            psd.push(projected);
        }
        let psd_residual = system.mismatch(&psd).max(system.structural_residual);
        best_psd_residual = best_psd_residual.min(psd_residual);
        if psd_residual <= opts.tol {
            let cert = finish(p, &system, psd, iter + 1)?;
            return Ok(AttemptOutcome::Success(cert));
        }

        // Back to the affine subspace.
        affine = system.project(psd);
    }

    Ok(AttemptOutcome::Fail(AttemptReport {
        degree,
        residual: best_psd_residual,
        cone_distance: best_cone_distance,
        iterations: opts.max_iter,
    }))
}

fn finish(
    p: &MatrixPoly,
    system: &ConstraintSystem,
    grams: Vec<CMatrix>,
    iterations: usize,
) -> Result<GramCertificate> {
    let mut cert = GramCertificate {
        degree: system.degree,
        basis: system.basis.clone(),
        grams: grams.iter().map(cmatrix::hermitize).collect(),
        residual: 0.0,
        iterations,
    };
    cert.residual = certificate_residual(p, &cert)?;
    Ok(cert)
}

/// The coefficient-matching constraints, decomposed into offset classes.
struct ConstraintSystem {
    degree: usize,
    block: usize,
    basis: Vec<MultiIndex>,
    classes: Vec<OffsetClass>,
    /// Max target entry at pairs no Gram entry influences.
    structural_residual: f64,
}

/// One slot `(gram index, row block, col block)` of an offset class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Slot {
    gram: usize,
    row: usize,
    col: usize,
}

struct OffsetClass {
    slots: Vec<Slot>,
    /// Dense `rows x slots` coefficient matrix (entries in {-1, 0, +1}).
    matrix: CMatrix,
    /// Pseudoinverse of `matrix * matrix^T`.
    gram_pinv: CMatrix,
    /// Right-hand side, one `m x m` target block per row, flattened to
    /// `rows x m^2`.
    rhs: CMatrix,
}

impl ConstraintSystem {
    fn build(nvars: usize, block: usize, degree: usize, target: &HermitianKernelPoly) -> Self {
        let basis = monomial_basis(nvars, degree);
        let ext = monomial_basis(nvars, degree + 1);
        let basis_pos: BTreeMap<MultiIndex, usize> = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();

        // Offset -> constraint rows (I, J). Offsets are signed exponent
        // differences.
        let mut rows_by_offset: BTreeMap<Vec<i64>, Vec<(MultiIndex, MultiIndex)>> = BTreeMap::new();
        let mut covered: std::collections::BTreeSet<(MultiIndex, MultiIndex)> = Default::default();
        for i_idx in &ext {
            for j_idx in &ext {
                let within = i_idx.total_degree() as usize <= degree
                    && j_idx.total_degree() as usize <= degree;
                let shifted = (0..nvars)
                    .any(|v| i_idx.exponent(v) >= 1 && j_idx.exponent(v) >= 1);
                if !(within || shifted) {
                    continue;
                }
                let offset: Vec<i64> = (0..nvars)
                    .map(|v| i_idx.exponent(v) as i64 - j_idx.exponent(v) as i64)
                    .collect();
                rows_by_offset
                    .entry(offset)
                    .or_default()
                    .push((i_idx.clone(), j_idx.clone()));
                covered.insert((i_idx.clone(), j_idx.clone()));
            }
        }

        let structural_residual = target
            .iter()
            .filter(|(key, _)| !covered.contains(key))
            .map(|(_, v)| cmatrix::max_abs(v))
            .fold(0.0_f64, f64::max);

        let mut classes = Vec::new();
        for (offset, rows) in rows_by_offset {
            // Unknown slots of this class: blocks (alpha, beta = alpha - offset).
            let mut slots = Vec::new();
            for (a, alpha) in basis.iter().enumerate() {
                let beta: Option<Vec<u32>> = (0..nvars)
                    .map(|v| {
                        let e = alpha.exponent(v) as i64 - offset[v];
                        (e >= 0).then_some(e as u32)
                    })
                    .collect();
                let Some(beta) = beta else { continue };
                let beta = MultiIndex::new(beta);
                let Some(&b) = basis_pos.get(&beta) else { continue };
                for gram in 0..=nvars {
                    slots.push(Slot { gram, row: a, col: b });
                }
            }
            if slots.is_empty() {
                continue;
            }
            slots.sort();
            let slot_pos: BTreeMap<Slot, usize> = slots
                .iter()
                .copied()
                .enumerate()
                .map(|(i, s)| (s, i))
                .collect();

            let mut matrix = cmatrix::zeros(rows.len(), slots.len());
            let mut rhs = cmatrix::zeros(rows.len(), block * block);
            for (r, (i_idx, j_idx)) in rows.iter().enumerate() {
                let within = i_idx.total_degree() as usize <= degree
                    && j_idx.total_degree() as usize <= degree;
                if within {
                    let a = basis_pos[i_idx];
                    let b = basis_pos[j_idx];
                    for gram in 0..=nvars {
                        let s = slot_pos[&Slot { gram, row: a, col: b }];
                        matrix[(r, s)] += C64::new(1.0, 0.0);
                    }
                }
                for v in 0..nvars {
                    let (Some(id), Some(jd)) = (i_idx.checked_dec(v), j_idx.checked_dec(v)) else {
                        continue;
                    };
                    let (Some(&a), Some(&b)) = (basis_pos.get(&id), basis_pos.get(&jd)) else {
                        continue;
                    };
                    let s = slot_pos[&Slot { gram: v + 1, row: a, col: b }];
                    matrix[(r, s)] -= C64::new(1.0, 0.0);
                }
                if let Some(t) = target.coeff(i_idx, j_idx) {
                    for bc in 0..block {
                        for br in 0..block {
                            rhs[(r, bc * block + br)] = t[(br, bc)];
                        }
                    }
                }
            }

            let gram = &matrix * matrix.adjoint();
            let gram_pinv = pinv_hermitian(&gram);
            classes.push(OffsetClass {
                slots,
                matrix,
                gram_pinv,
                rhs,
            });
        }

        ConstraintSystem {
            degree,
            block,
            basis,
            classes,
            structural_residual,
        }
    }

    fn gather(&self, grams: &[CMatrix], class: &OffsetClass) -> CMatrix {
        let m = self.block;
        let mut g = cmatrix::zeros(class.slots.len(), m * m);
        for (s, slot) in class.slots.iter().enumerate() {
            let gm = &grams[slot.gram];
            for bc in 0..m {
                for br in 0..m {
                    g[(s, bc * m + br)] = gm[(slot.row * m + br, slot.col * m + bc)];
                }
            }
        }
        g
    }

    /// Max constraint violation `|M g - e|` over all classes and entries.
    fn mismatch(&self, grams: &[CMatrix]) -> f64 {
        let mut worst = 0.0_f64;
        for class in &self.classes {
            let g = self.gather(grams, class);
            let r = &class.matrix * g - &class.rhs;
            worst = worst.max(cmatrix::max_abs(&r));
        }
        worst
    }

    /// Exact orthogonal projection onto the constraint subspace:
    /// `g <- g - M^T (M M^T)^+ (M g - e)`, classwise.
    fn project(&self, mut grams: Vec<CMatrix>) -> Vec<CMatrix> {
        let m = self.block;
        for class in &self.classes {
            let g = self.gather(&grams, class);
            let r = &class.matrix * &g - &class.rhs;
            let lambda = &class.gram_pinv * r;
            let update = class.matrix.adjoint() * lambda;
            for (s, slot) in class.slots.iter().enumerate() {
                let gm = &mut grams[slot.gram];
                for bc in 0..m {
                    for br in 0..m {
                        gm[(slot.row * m + br, slot.col * m + bc)] =
                            g[(s, bc * m + br)] - update[(s, bc * m + br)];
                    }
                }
            }
        }
        grams
    }
}

/// Pseudoinverse of a Hermitian PSD matrix by eigenvalue truncation.
fn pinv_hermitian(m: &CMatrix) -> CMatrix {
    let eig = cmatrix::hermitize(m).symmetric_eigen();
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = 1e-12 * lmax.max(1e-300);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| C64::new(if l > cutoff { 1.0 / l } else { 0.0 }, 0.0)),
    ));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}
