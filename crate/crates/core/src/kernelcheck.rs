//! Pointwise certification of kernels: Gram sampling, PSD verdicts, the
//! defect bound `||K_i(z,w)||^2 <= 1/((1-|z_i|^2)(1-|w_i|^2))`, and
//! pivoted-Cholesky realizations `K(z_a, z_b) = F(z_a) F(z_b)*` on finite
//! point sets.

use crate::cmatrix::{self, CMatrix};
use crate::error::{Error, Result};
use crate::kernel::HermitianKernelPoly;
use crate::C64;

/// Diagonal-pivot threshold defining numerical rank in
/// [`cholesky_realization`].
pub const PIVOT_TOL: f64 = 1e-10;

/// Anything evaluable at point pairs of the polydisk. Polynomial kernels
/// implement it; non-polynomial kernels (Szego-type quotients, sampled
/// data) come in through [`FnKernel`].
pub trait PointKernel {
    fn nvars(&self) -> usize;
    fn size(&self) -> usize;
    fn eval_pair(&self, z: &[C64], w: &[C64]) -> Result<CMatrix>;
}

impl PointKernel for HermitianKernelPoly {
    fn nvars(&self) -> usize {
        self.nvars()
    }

    fn size(&self) -> usize {
        self.size()
    }

    fn eval_pair(&self, z: &[C64], w: &[C64]) -> Result<CMatrix> {
        self.evaluate(z, w)
    }
}

/// Kernel given by a closure on point pairs.
pub struct FnKernel<F> {
    nvars: usize,
    size: usize,
    f: F,
}

impl<F> FnKernel<F>
where
    F: Fn(&[C64], &[C64]) -> CMatrix,
{
    pub fn new(nvars: usize, size: usize, f: F) -> Self {
        FnKernel { nvars, size, f }
    }
}

impl<F> PointKernel for FnKernel<F>
where
    F: Fn(&[C64], &[C64]) -> CMatrix,
{
    fn nvars(&self) -> usize {
        self.nvars
    }

    fn size(&self) -> usize {
        self.size
    }

    fn eval_pair(&self, z: &[C64], w: &[C64]) -> Result<CMatrix> {
        Ok((self.f)(z, w))
    }
}

/// Block Gram matrix `(K(z_a, z_b))_{a,b}` over points of the open
/// polydisk; `km x km` for `k` points and block size `m`.
pub fn sample_gram(kernel: &impl PointKernel, points: &[Vec<C64>]) -> Result<CMatrix> {
    let m = kernel.size();
    for (a, z) in points.iter().enumerate() {
        if z.len() != kernel.nvars() {
            return Err(Error::shape(format!(
                "point {a} has arity {}, kernel has {} variables",
                z.len(),
                kernel.nvars()
            )));
        }
        if z.iter().any(|c| c.norm() >= 1.0) {
            return Err(Error::invalid(format!(
                "point {a} lies outside the open polydisk"
            )));
        }
    }
    let k = points.len();
    let mut gram = cmatrix::zeros(k * m, k * m);
    for a in 0..k {
        for b in a..k {
            let block = kernel.eval_pair(&points[a], &points[b])?;
            gram.view_mut((a * m, b * m), (m, m)).copy_from(&block);
            if b > a {
                gram.view_mut((b * m, a * m), (m, m)).copy_from(&block.adjoint());
            }
        }
    }
    Ok(gram)
}

/// PSD verdict from a Hermitian eigensolve.
#[derive(Clone, Debug)]
pub struct PsdReport {
    pub hermitian_defect: f64,
    pub min_eig: f64,
    pub psd: bool,
}

/// Errors when the input is not Hermitian within `tol`; otherwise PSD iff
/// `min_eig >= -tol`.
pub fn psd_check(m: &CMatrix, tol: f64) -> Result<PsdReport> {
    let defect = cmatrix::hermitian_defect(m);
    if defect > tol {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian: defect {defect:.3e} > tol {tol:.3e}"
        )));
    }
    let min_eig = cmatrix::min_eig_hermitian(m);
    Ok(PsdReport {
        hermitian_defect: defect,
        min_eig,
        psd: min_eig >= -tol,
    })
}

/// One point-pair entry of a [`LemmaBoundReport`].
#[derive(Clone, Debug)]
pub struct LemmaBoundEntry {
    pub norm_sq: f64,
    pub bound: f64,
}

/// Per-pair slack for the bound
/// `||K(z,w)||^2 <= 1/((1-|z_i|^2)(1-|w_i|^2))`.
#[derive(Clone, Debug)]
pub struct LemmaBoundReport {
    pub var: usize,
    pub entries: Vec<LemmaBoundEntry>,
    /// Max of `norm_sq - bound` over the pairs.
    pub worst_excess: f64,
}

impl LemmaBoundReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.worst_excess <= tol
    }
}

/// Defect bound check for variable `var` (0-based) at the given pairs.
pub fn lemma_bound_check(
    kernel: &impl PointKernel,
    var: usize,
    pairs: &[(Vec<C64>, Vec<C64>)],
) -> Result<LemmaBoundReport> {
    if var >= kernel.nvars() {
        return Err(Error::invalid(format!(
            "variable index {var} out of range for {} variables",
            kernel.nvars()
        )));
    }
    let mut entries = Vec::with_capacity(pairs.len());
    let mut worst = f64::NEG_INFINITY;
    for (z, w) in pairs {
        let value = kernel.eval_pair(z, w)?;
        let norm_sq = cmatrix::spectral_norm(&value).powi(2);
        let bound = 1.0 / ((1.0 - z[var].norm_sqr()) * (1.0 - w[var].norm_sqr()));
        worst = worst.max(norm_sq - bound);
        entries.push(LemmaBoundEntry { norm_sq, bound });
    }
    let worst_excess = if entries.is_empty() { 0.0 } else { worst };
    Ok(LemmaBoundReport {
        var,
        entries,
        worst_excess,
    })
}

/// Pivoted-Cholesky factor of a sampled Gram matrix: `gram ~= L L*` with
/// `L` of width `rank`; block row `a` is the factor `F(z_a)`.
#[derive(Clone, Debug)]
pub struct Realization {
    pub rank: usize,
    pub block_size: usize,
    factor: CMatrix,
}

impl Realization {
    /// The `m x rank` factor at point index `a`.
    pub fn factor_block(&self, a: usize) -> CMatrix {
        self.factor
            .view((a * self.block_size, 0), (self.block_size, self.rank))
            .into_owned()
    }

    /// The full stacked factor `L`.
    pub fn factor(&self) -> &CMatrix {
        &self.factor
    }

    /// `max |gram - L L*|` entrywise.
    pub fn reproduction_residual(&self, gram: &CMatrix) -> f64 {
        cmatrix::max_abs(&(gram - &self.factor * self.factor.adjoint()))
    }
}

/// Pivoted Cholesky with diagonal threshold [`PIVOT_TOL`]. Fails when a
/// pivot goes clearly negative (the Gram matrix was not PSD).
pub fn cholesky_realization(gram: &CMatrix, block_size: usize) -> Result<Realization> {
    if gram.nrows() != gram.ncols() {
        return Err(Error::shape("Gram matrix must be square".to_string()));
    }
    if block_size == 0 || !gram.nrows().is_multiple_of(block_size) {
        return Err(Error::shape(format!(
            "Gram size {} is not a multiple of block size {block_size}",
            gram.nrows()
        )));
    }
    let n = gram.nrows();
    let mut residual = cmatrix::hermitize(gram);
    let mut columns: Vec<nalgebra::DVector<C64>> = Vec::new();
    let scale = (0..n)
        .map(|i| residual[(i, i)].re.abs())
        .fold(1.0_f64, f64::max);
    loop {
        let (pivot, dmax) = (0..n)
            .map(|i| (i, residual[(i, i)].re))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("nonempty diagonal");
        let dmin = (0..n).map(|i| residual[(i, i)].re).fold(f64::INFINITY, f64::min);
        if dmin < -1e-8 * scale {
            return Err(Error::numerics(format!(
                "Gram matrix is not PSD: residual diagonal reached {dmin:.3e}"
            )));
        }
        if dmax <= PIVOT_TOL || columns.len() == n {
            break;
        }
        let col = residual.column(pivot).map(|x| x / C64::new(dmax.sqrt(), 0.0));
        residual -= &col * col.adjoint();
        columns.push(col);
    }
    let rank = columns.len();
    let mut factor = cmatrix::zeros(n, rank);
    for (j, col) in columns.iter().enumerate() {
        factor.column_mut(j).copy_from(col);
    }
    Ok(Realization {
        rank,
        block_size,
        factor,
    })
}
