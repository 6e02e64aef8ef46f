//! Hermitian kernel polynomials: matrix-valued polynomials in
//! `(z, conj(w))` such as `I - P(z)P(w)*`.
//!
//! Coefficients are keyed by the pair `(I, J)` meaning `z^I conj(w)^J`.
//! A kernel built as `A(z) B(w)*` with `A = B` is Hermitian-symmetric
//! exactly: `coeff(J, I) = coeff(I, J)*`.

use std::collections::BTreeMap;

use crate::cmatrix::{self, CMatrix};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::poly::{self, MatrixPoly, PRUNE_EPS};
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianKernelPoly {
    nvars: usize,
    size: usize,
    coeffs: BTreeMap<(MultiIndex, MultiIndex), CMatrix>,
}

impl HermitianKernelPoly {
    pub fn zero(nvars: usize, size: usize) -> Self {
        HermitianKernelPoly {
            nvars,
            size,
            coeffs: BTreeMap::new(),
        }
    }

    /// Constant kernel: `M` at index pair `(0, 0)`.
    pub fn from_constant(nvars: usize, m: CMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "kernel coefficients are square");
        let mut k = HermitianKernelPoly::zero(nvars, m.nrows());
        k.add_to_coeff(
            (MultiIndex::zero(nvars), MultiIndex::zero(nvars)),
            &m,
        );
        k
    }

    /// The kernel `A(z) B(w)*`: `coeff(I, J) = A_I B_J*`.
    pub fn product(a: &MatrixPoly, b: &MatrixPoly) -> Result<Self> {
        if a.nvars() != b.nvars() {
            return Err(Error::shape(format!(
                "product kernel: variable counts {} vs {}",
                a.nvars(),
                b.nvars()
            )));
        }
        if a.rows() != b.rows() {
            return Err(Error::shape(format!(
                "product kernel: row counts {} vs {}",
                a.rows(),
                b.rows()
            )));
        }
        if a.cols() != b.cols() {
            return Err(Error::shape(format!(
                "product kernel: column counts {} vs {}",
                a.cols(),
                b.cols()
            )));
        }
        let mut k = HermitianKernelPoly::zero(a.nvars(), a.rows());
        for (i, ai) in a.iter() {
            for (j, bj) in b.iter() {
                k.add_to_coeff((i.clone(), j.clone()), &(ai * bj.adjoint()));
            }
        }
        Ok(k)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, index_z: &MultiIndex, index_w: &MultiIndex) -> Option<&CMatrix> {
        self.coeffs.get(&(index_z.clone(), index_w.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &CMatrix)> {
        self.coeffs.iter()
    }

    pub(crate) fn add_to_coeff(&mut self, key: (MultiIndex, MultiIndex), value: &CMatrix) {
        debug_assert_eq!(value.nrows(), self.size);
        debug_assert_eq!(value.ncols(), self.size);
        let entry = self
            .coeffs
            .entry(key.clone())
            .or_insert_with(|| cmatrix::zeros(self.size, self.size));
        *entry += value;
        if cmatrix::max_abs(entry) <= PRUNE_EPS {
            self.coeffs.remove(&key);
        }
    }

    fn check_compatible(&self, other: &HermitianKernelPoly) -> Result<()> {
        if self.nvars != other.nvars || self.size != other.size {
            return Err(Error::shape(format!(
                "kernel mismatch: {} vars size {} vs {} vars size {}",
                self.nvars, self.size, other.nvars, other.size
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &HermitianKernelPoly) -> Result<HermitianKernelPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (key, value) in &other.coeffs {
            out.add_to_coeff(key.clone(), value);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HermitianKernelPoly) -> Result<HermitianKernelPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (key, value) in &other.coeffs {
            out.add_to_coeff(key.clone(), &(-value));
        }
        Ok(out)
    }

    /// Multiply by the defect factor `(1 - z_var conj(w_var))` (0-based
    /// `var`): subtract the image shifted by `e_var` in both indices.
    pub fn mul_defect(&self, var: usize) -> Result<HermitianKernelPoly> {
        if var >= self.nvars {
            return Err(Error::invalid(format!(
                "variable index {var} out of range for {} variables",
                self.nvars
            )));
        }
        let mut out = self.clone();
        for (key, value) in &self.coeffs {
            let shifted = (key.0.inc(var), key.1.inc(var));
            out.add_to_coeff(shifted, &(-value));
        }
        Ok(out)
    }

    /// Evaluate `sum_{I,J} coeff(I,J) z^I conj(w)^J`.
    pub fn evaluate(&self, z: &[C64], w: &[C64]) -> Result<CMatrix> {
        if z.len() != self.nvars || w.len() != self.nvars {
            return Err(Error::shape(format!(
                "kernel point arity: got {} and {}, expected {}",
                z.len(),
                w.len(),
                self.nvars
            )));
        }
        let deg = self
            .coeffs
            .keys()
            .map(|(i, j)| i.total_degree().max(j.total_degree()))
            .max()
            .unwrap_or(0);
        let zp = poly::power_table(z, deg);
        let wc: Vec<C64> = w.iter().map(|x| x.conj()).collect();
        let wp = poly::power_table(&wc, deg);
        let mut acc = cmatrix::zeros(self.size, self.size);
        for ((i, j), value) in &self.coeffs {
            let factor = poly::monomial_value(&zp, i) * poly::monomial_value(&wp, j);
            acc += value.map(|x| x * factor);
        }
        Ok(acc)
    }

    /// Max entrywise violation of `coeff(J, I) = coeff(I, J)*`.
    pub fn hermitian_symmetry_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for ((i, j), value) in &self.coeffs {
            let mirror = self
                .coeffs
                .get(&(j.clone(), i.clone()))
                .cloned()
                .unwrap_or_else(|| cmatrix::zeros(self.size, self.size));
            worst = worst.max(cmatrix::max_abs(&(mirror - value.adjoint())));
        }
        worst
    }

    /// Max coefficient-entry difference against `other`, over the union of
    /// supports.
    pub fn max_coeff_diff(&self, other: &HermitianKernelPoly) -> f64 {
        let mut worst = 0.0_f64;
        for (key, value) in &self.coeffs {
            let o = other
                .coeffs
                .get(key)
                .cloned()
                .unwrap_or_else(|| cmatrix::zeros(self.size, self.size));
            worst = worst.max(cmatrix::max_abs(&(value - o)));
        }
        for (key, value) in &other.coeffs {
            if !self.coeffs.contains_key(key) {
                worst = worst.max(cmatrix::max_abs(value));
            }
        }
        worst
    }
}
