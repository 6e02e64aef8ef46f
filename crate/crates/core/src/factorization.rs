//! Structured factorizations `P(z) = C0 D1(z_{i1}) C1 ... Dl(z_{il}) Cl`
//! and their constructive decomposition into
//!
//! ```text
//! I - P(z)P(w)* = R + P0(z)P0(w)* + sum_i (1 - z_i conj(w_i)) P_i(z)P_i(w)*
//! ```
//!
//! with `R` positive invertible. The construction runs the induction on
//! the factorization length iteratively from the right: a one-variable
//! diagonal defect telescopes into `(1 - z conj(w)) A(z)A(w)*` with
//! `A(z)` the row `(1, z, ..., z^{n-1})`, the tail decomposition is
//! conjugated through `C D(z)`, the tail constant turns into a `P0` block
//! via its Hermitian square root, and like-indexed parts merge by column
//! concatenation.

use crate::cmatrix::{self, CMatrix};
use crate::error::{Error, Result};
use crate::kernel::HermitianKernelPoly;
use crate::multiindex::MultiIndex;
use crate::poly::MatrixPoly;

/// Spectral-norm strictness margin: factors must satisfy
/// `||C_j|| <= 1 - NORM_MARGIN`.
pub const NORM_MARGIN: f64 = 1e-9;

/// Diagonal matrix of monomials in one variable: entry `(k, k)` is
/// `z_var^{exponents[k]}`. `var` is 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalMonomialBlock {
    var: usize,
    exponents: Vec<u32>,
}

impl DiagonalMonomialBlock {
    pub fn new(var: usize, exponents: Vec<u32>) -> Self {
        DiagonalMonomialBlock { var, exponents }
    }

    pub fn var(&self) -> usize {
        self.var
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn size(&self) -> usize {
        self.exponents.len()
    }

    /// The block as a diagonal `MatrixPoly`.
    pub fn as_poly(&self, nvars: usize) -> MatrixPoly {
        let n = self.size();
        let mut p = MatrixPoly::zero(nvars, n, n);
        let mut by_exp: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
        for (k, &e) in self.exponents.iter().enumerate() {
            by_exp.entry(e).or_default().push(k);
        }
        for (e, rows) in by_exp {
            let mut m = cmatrix::zeros(n, n);
            for k in rows {
                m[(k, k)] = crate::C64::new(1.0, 0.0);
            }
            p = p
                .add(&MatrixPoly::monomial(nvars, MultiIndex::single(nvars, self.var, e), m))
                .expect("diagonal block shapes agree");
        }
        p
    }
}

/// Alternating product `C0 D1 C1 ... Dl Cl` of scalar matrices and
/// diagonal monomial blocks (`l` may be 0).
#[derive(Clone, Debug)]
pub struct StructuredFactorization {
    nvars: usize,
    scalars: Vec<CMatrix>,
    diagonals: Vec<DiagonalMonomialBlock>,
}

/// One validation failure, with the factor index it occurred at.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// `scalars.len() != diagonals.len() + 1`.
    FactorCount { scalars: usize, diagonals: usize },
    /// `cols(C_{j-1}) != size(D_j)` or `size(D_j) != rows(C_j)`.
    SizeChain { j: usize, expected: usize, found: usize },
    /// `||C_j|| > 1 - NORM_MARGIN`.
    NormBound { j: usize, norm: f64 },
    /// Diagonal block variable out of `0..nvars`.
    VarRange { j: usize, var: usize },
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl StructuredFactorization {
    pub fn new(
        nvars: usize,
        scalars: Vec<CMatrix>,
        diagonals: Vec<DiagonalMonomialBlock>,
    ) -> Self {
        StructuredFactorization {
            nvars,
            scalars,
            diagonals,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Factorization length `l`.
    pub fn len(&self) -> usize {
        self.diagonals.len()
    }

    /// True when `l = 0` (a constant factorization).
    pub fn is_empty(&self) -> bool {
        self.diagonals.is_empty()
    }

    pub fn scalars(&self) -> &[CMatrix] {
        &self.scalars
    }

    pub fn diagonals(&self) -> &[DiagonalMonomialBlock] {
        &self.diagonals
    }

    /// Size-chain and strict-norm validation. Collects every violation;
    /// never aborts.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.scalars.len() != self.diagonals.len() + 1 {
            report.violations.push(Violation::FactorCount {
                scalars: self.scalars.len(),
                diagonals: self.diagonals.len(),
            });
            return report;
        }
        for (j, d) in self.diagonals.iter().enumerate() {
            // diagonals[j] sits between scalars[j] and scalars[j + 1];
            // violations report the 1-based position.
            let left = self.scalars[j].ncols();
            if d.size() != left {
                report.violations.push(Violation::SizeChain {
                    j: j + 1,
                    expected: left,
                    found: d.size(),
                });
            }
            let right = self.scalars[j + 1].nrows();
            if d.size() != right {
                report.violations.push(Violation::SizeChain {
                    j: j + 1,
                    expected: d.size(),
                    found: right,
                });
            }
            if d.var() >= self.nvars {
                report.violations.push(Violation::VarRange { j: j + 1, var: d.var() });
            }
        }
        for (j, c) in self.scalars.iter().enumerate() {
            let norm = cmatrix::spectral_norm(c);
            if norm > 1.0 - NORM_MARGIN {
                report.violations.push(Violation::NormBound { j, norm });
            }
        }
        report
    }

    fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "factorization fails validation: {:?}",
                report.violations
            )))
        }
    }

    /// Expand the product into a `MatrixPoly`.
    pub fn expand(&self) -> Result<MatrixPoly> {
        self.ensure_valid()?;
        let mut acc = MatrixPoly::constant(self.nvars, self.scalars[0].clone());
        for (d, c) in self.diagonals.iter().zip(self.scalars.iter().skip(1)) {
            acc = acc.mul(&d.as_poly(self.nvars))?;
            acc = acc.mul(&MatrixPoly::constant(self.nvars, c.clone()))?;
        }
        Ok(acc)
    }
}

/// Telescoping block: `P(z) = C0 A(z)` where `A(z)` is the direct sum over
/// the diagonal entries of `D` of the rows `(1, z, ..., z^{n_k - 1})` in
/// `D`'s variable. Satisfies
/// `C0 (I - D(z)D(w)*) C0* = (1 - z_v conj(w_v)) P(z)P(w)*`.
/// A zero exponent contributes an empty (0-column) block.
pub fn telescope_block(c0: &CMatrix, d: &DiagonalMonomialBlock, nvars: usize) -> Result<MatrixPoly> {
    if c0.ncols() != d.size() {
        return Err(Error::shape(format!(
            "telescope block: C0 has {} cols, D has size {}",
            c0.ncols(),
            d.size()
        )));
    }
    let total: usize = d.exponents().iter().map(|&e| e as usize).sum();
    let mut a = MatrixPoly::zero(nvars, d.size(), total);
    let max_exp = d.exponents().iter().copied().max().unwrap_or(0);
    for p in 0..max_exp {
        let mut m = cmatrix::zeros(d.size(), total);
        let mut offset = 0usize;
        let mut any = false;
        for (k, &e) in d.exponents().iter().enumerate() {
            if p < e {
                m[(k, offset + p as usize)] = crate::C64::new(1.0, 0.0);
                any = true;
            }
            offset += e as usize;
        }
        if any {
            a = a.add(&MatrixPoly::monomial(
                nvars,
                MultiIndex::single(nvars, d.var(), p),
                m,
            ))?;
        }
    }
    MatrixPoly::constant(nvars, c0.clone()).mul(&a)
}

/// The decomposition `I - P(z)P(w)* = R + P0(z)P0(w)*
/// + sum_i (1 - z_i conj(w_i)) P_i(z)P_i(w)*`.
#[derive(Clone, Debug)]
pub struct AglerDecomposition {
    nvars: usize,
    r: CMatrix,
    p0: MatrixPoly,
    var_parts: Vec<MatrixPoly>,
}

impl AglerDecomposition {
    pub fn new(nvars: usize, r: CMatrix, p0: MatrixPoly, var_parts: Vec<MatrixPoly>) -> Self {
        assert_eq!(var_parts.len(), nvars, "one part per variable");
        AglerDecomposition {
            nvars,
            r,
            p0,
            var_parts,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// The constant term; positive invertible for decompositions produced
    /// by [`agler_decompose`].
    pub fn r(&self) -> &CMatrix {
        &self.r
    }

    pub fn p0(&self) -> &MatrixPoly {
        &self.p0
    }

    /// Part attached to the defect of variable `i` (0-based).
    pub fn var_part(&self, i: usize) -> &MatrixPoly {
        &self.var_parts[i]
    }

    pub fn var_parts(&self) -> &[MatrixPoly] {
        &self.var_parts
    }

    /// `delta = min_eig(R)`, the strict-positivity margin that bounds
    /// `||P(T)|| <= sqrt(1 - delta)`.
    pub fn delta(&self) -> f64 {
        cmatrix::min_eig_hermitian(&self.r)
    }

    /// Column counts `[cols(P0), cols(P1), ..., cols(PN)]`.
    pub fn part_cols(&self) -> Vec<usize> {
        let mut cols = vec![self.p0.cols()];
        cols.extend(self.var_parts.iter().map(|p| p.cols()));
        cols
    }

    /// Kernel family `K0 = R + P0(z)P0(w)*`, `K_i = P_i(z)P_i(w)*`
    /// satisfying `I - P(z)P(w)* = K0 + sum_i (1 - z_i conj(w_i)) K_i`.
    pub fn to_kernel_family(&self) -> Result<Vec<HermitianKernelPoly>> {
        let mut kernels = Vec::with_capacity(self.nvars + 1);
        let k0 = HermitianKernelPoly::from_constant(self.nvars, self.r.clone())
            .add(&HermitianKernelPoly::product(&self.p0, &self.p0)?)?;
        kernels.push(k0);
        for p in &self.var_parts {
            kernels.push(HermitianKernelPoly::product(p, p)?);
        }
        Ok(kernels)
    }
}

/// Inductive construction of an [`AglerDecomposition`] from a valid
/// structured factorization, processed right to left.
pub fn agler_decompose(f: &StructuredFactorization) -> Result<AglerDecomposition> {
    f.ensure_valid()?;
    let nvars = f.nvars();
    let scalars = f.scalars();
    let diagonals = f.diagonals();

    // Base: tail = C_l alone. I - C_l C_l* is the whole decomposition.
    let last = &scalars[scalars.len() - 1];
    let mut r = defect_constant(last);
    let mut p0 = MatrixPoly::zero(nvars, last.nrows(), 0);
    let mut parts: Vec<MatrixPoly> = (0..nvars)
        .map(|_| MatrixPoly::zero(nvars, last.nrows(), 0))
        .collect();

    for j in (0..diagonals.len()).rev() {
        let c = &scalars[j];
        let d = &diagonals[j];
        let q = MatrixPoly::constant(nvars, c.clone()).mul(&d.as_poly(nvars))?;
        let tele = telescope_block(c, d, nvars)?;
        let r_sqrt = cmatrix::sqrt_psd(&r).map_err(|e| {
            Error::numerics(format!("tail constant square root at factor {j}: {e}"))
        })?;

        let mut new_parts = Vec::with_capacity(nvars);
        for (i, part) in parts.iter().enumerate() {
            let pushed = q.mul(part)?;
            if i == d.var() {
                new_parts.push(tele.hcat(&pushed)?);
            } else {
                new_parts.push(pushed);
            }
        }
        let new_p0 = q
            .mul(&p0)?
            .hcat(&q.mul(&MatrixPoly::constant(nvars, r_sqrt))?)?;

        r = defect_constant(c);
        p0 = new_p0;
        parts = new_parts;
    }

    Ok(AglerDecomposition::new(nvars, r, p0, parts))
}

fn defect_constant(c: &CMatrix) -> CMatrix {
    cmatrix::identity(c.nrows()) - c * c.adjoint()
}

/// Residual report for the decomposition identity.
#[derive(Clone, Debug)]
pub struct DecompositionReport {
    /// Max coefficient-entry difference between
    /// `I - P(z)P(w)*` and the assembled right-hand side.
    pub residual: f64,
    /// Min eigenvalue of (the Hermitian part of) `R`.
    pub min_eig_r: f64,
    /// Column counts `[cols(P0), cols(P1), ...]` (observational).
    pub part_cols: Vec<usize>,
}

impl DecompositionReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual <= tol && self.min_eig_r > 0.0
    }
}

/// Expand both sides of the decomposition identity as kernel polynomials
/// and compare coefficientwise.
pub fn verify_decomposition(p: &MatrixPoly, d: &AglerDecomposition) -> Result<DecompositionReport> {
    if d.r().nrows() != p.rows() {
        return Err(Error::shape(format!(
            "decomposition R is {}x{}, polynomial has {} rows",
            d.r().nrows(),
            d.r().ncols(),
            p.rows()
        )));
    }
    let lhs = HermitianKernelPoly::from_constant(p.nvars(), cmatrix::identity(p.rows()))
        .sub(&HermitianKernelPoly::product(p, p)?)?;
    let mut rhs = HermitianKernelPoly::from_constant(p.nvars(), d.r().clone())
        .add(&HermitianKernelPoly::product(d.p0(), d.p0())?)?;
    for i in 0..d.nvars() {
        let term = HermitianKernelPoly::product(d.var_part(i), d.var_part(i))?.mul_defect(i)?;
        rhs = rhs.add(&term)?;
    }
    Ok(DecompositionReport {
        residual: lhs.max_coeff_diff(&rhs),
        min_eig_r: d.delta(),
        part_cols: d.part_cols(),
    })
}
