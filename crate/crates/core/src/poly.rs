//! Sparse matrix-valued polynomials in `N` complex variables.
//!
//! A `MatrixPoly` stores `P(z) = sum_I A_I z^I` as a map from multi-index
//! to dense coefficient matrix. The map is kept canonical: zero matrices
//! are never stored (exact zeros on construction, entries below 1e-14 for
//! computed results), and iteration is lexicographic.

use std::collections::BTreeMap;

use crate::cmatrix::{self, CMatrix};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::C64;

/// Threshold below which a computed coefficient matrix counts as zero.
pub const PRUNE_EPS: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoly {
    nvars: usize,
    rows: usize,
    cols: usize,
    coeffs: BTreeMap<MultiIndex, CMatrix>,
}

impl MatrixPoly {
    /// The zero polynomial with the given shape. `cols = 0` is allowed; it
    /// arises as the empty block of a decomposition part.
    pub fn zero(nvars: usize, rows: usize, cols: usize) -> Self {
        MatrixPoly {
            nvars,
            rows,
            cols,
            coeffs: BTreeMap::new(),
        }
    }

    /// Constant polynomial.
    pub fn constant(nvars: usize, value: CMatrix) -> Self {
        let mut p = MatrixPoly::zero(nvars, value.nrows(), value.ncols());
        p.insert(MultiIndex::zero(nvars), value);
        p
    }

    /// Single term `A z^I`.
    pub fn monomial(nvars: usize, index: MultiIndex, value: CMatrix) -> Self {
        assert_eq!(index.len(), nvars, "index arity");
        let mut p = MatrixPoly::zero(nvars, value.nrows(), value.ncols());
        p.insert(index, value);
        p
    }

    /// Scalar (1x1) polynomial from `(index, value)` terms.
    pub fn scalar_from_terms(nvars: usize, terms: &[(MultiIndex, C64)]) -> Self {
        let mut p = MatrixPoly::zero(nvars, 1, 1);
        for (index, value) in terms {
            p.add_to_coeff(index.clone(), &cmatrix::scalar(*value));
        }
        p
    }

    /// Build from raw coefficients; dimension-checks each entry and drops
    /// exact zeros.
    pub fn from_coeffs(
        nvars: usize,
        rows: usize,
        cols: usize,
        coeffs: impl IntoIterator<Item = (MultiIndex, CMatrix)>,
    ) -> Result<Self> {
        let mut p = MatrixPoly::zero(nvars, rows, cols);
        for (index, value) in coeffs {
            if index.len() != nvars {
                return Err(Error::shape(format!(
                    "coefficient index arity {} != nvars {nvars}",
                    index.len()
                )));
            }
            if value.nrows() != rows || value.ncols() != cols {
                return Err(Error::shape(format!(
                    "coefficient at {index} is {}x{}, expected {rows}x{cols}",
                    value.nrows(),
                    value.ncols()
                )));
            }
            p.add_to_coeff(index, &value);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored coefficients.
    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Max total degree over stored coefficients; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(|i| i.total_degree()).max().unwrap_or(0)
    }

    pub fn coeff(&self, index: &MultiIndex) -> Option<&CMatrix> {
        self.coeffs.get(index)
    }

    /// Coefficient at `index`, or the zero matrix.
    pub fn coeff_or_zero(&self, index: &MultiIndex) -> CMatrix {
        self.coeffs
            .get(index)
            .cloned()
            .unwrap_or_else(|| cmatrix::zeros(self.rows, self.cols))
    }

    /// Lexicographic iteration over stored coefficients.
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &CMatrix)> {
        self.coeffs.iter()
    }

    fn insert(&mut self, index: MultiIndex, value: CMatrix) {
        if cmatrix::max_abs(&value) > 0.0 {
            self.coeffs.insert(index, value);
        }
    }

    fn add_to_coeff(&mut self, index: MultiIndex, value: &CMatrix) {
        let entry = self
            .coeffs
            .entry(index.clone())
            .or_insert_with(|| cmatrix::zeros(self.rows, self.cols));
        *entry += value;
        if cmatrix::max_abs(entry) <= PRUNE_EPS {
            self.coeffs.remove(&index);
        }
    }

    fn check_same_space(&self, other: &MatrixPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::shape(format!(
                "variable counts differ: {} vs {}",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    /// Coefficientwise sum.
    pub fn add(&self, other: &MatrixPoly) -> Result<MatrixPoly> {
        self.check_same_space(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::shape(format!(
                "add: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (index, value) in &other.coeffs {
            out.add_to_coeff(index.clone(), value);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MatrixPoly) -> Result<MatrixPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MatrixPoly {
        self.map_coeffs(|m| -m)
    }

    pub fn scale(&self, factor: C64) -> MatrixPoly {
        let mut out = self.map_coeffs(|m| m.map(|x| x * factor));
        out.prune(PRUNE_EPS);
        out
    }

    fn map_coeffs(&self, f: impl Fn(&CMatrix) -> CMatrix) -> MatrixPoly {
        MatrixPoly {
            nvars: self.nvars,
            rows: self.rows,
            cols: self.cols,
            coeffs: self.coeffs.iter().map(|(i, m)| (i.clone(), f(m))).collect(),
        }
    }

    fn prune(&mut self, eps: f64) {
        self.coeffs.retain(|_, m| cmatrix::max_abs(m) > eps);
    }

    /// Product, convolving coefficients over multi-indices:
    /// `coeff(K) = sum_{I+J=K} A_I B_J`.
    pub fn mul(&self, other: &MatrixPoly) -> Result<MatrixPoly> {
        self.check_same_space(other)?;
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "mul: inner dimensions {} vs {}",
                self.cols, other.rows
            )));
        }
        let mut out = MatrixPoly::zero(self.nvars, self.rows, other.cols);
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                out.add_to_coeff(i.add(j), &(a * b));
            }
        }
        Ok(out)
    }

    /// Column concatenation `(A(z), B(z))`.
    pub fn hcat(&self, other: &MatrixPoly) -> Result<MatrixPoly> {
        self.check_same_space(other)?;
        if self.rows != other.rows {
            return Err(Error::shape(format!(
                "hcat: row counts {} vs {}",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut out = MatrixPoly::zero(self.nvars, self.rows, cols);
        for (index, value) in &self.coeffs {
            let mut wide = cmatrix::zeros(self.rows, cols);
            wide.view_mut((0, 0), (self.rows, self.cols)).copy_from(value);
            out.insert(index.clone(), wide);
        }
        for (index, value) in &other.coeffs {
            let entry = out
                .coeffs
                .entry(index.clone())
                .or_insert_with(|| cmatrix::zeros(self.rows, cols));
            entry
                .view_mut((0, self.cols), (self.rows, other.cols))
                .copy_from(value);
        }
        Ok(out)
    }

    /// Direct evaluation `sum_I A_I z^I`.
    pub fn evaluate_point(&self, z: &[C64]) -> Result<CMatrix> {
        if z.len() != self.nvars {
            return Err(Error::shape(format!(
                "point arity {} != nvars {}",
                z.len(),
                self.nvars
            )));
        }
        let powers = power_table(z, self.degree());
        let mut acc = cmatrix::zeros(self.rows, self.cols);
        for (index, value) in &self.coeffs {
            let factor = monomial_value(&powers, index);
            acc += value.map(|x| x * factor);
        }
        Ok(acc)
    }

    /// The adjoint-transpose polynomial `P~(z) = sum_I A_I* z^I`; used to
    /// move between `P(z) Q(w)*` kernels and plain products in tests.
    pub fn adjoint_coeffs(&self) -> MatrixPoly {
        let mut out = MatrixPoly::zero(self.nvars, self.cols, self.rows);
        for (index, value) in &self.coeffs {
            out.insert(index.clone(), value.adjoint());
        }
        out
    }
}

/// Per-variable powers `z_v^k` for `k <= deg`.
pub(crate) fn power_table(z: &[C64], deg: u32) -> Vec<Vec<C64>> {
    z.iter()
        .map(|&zv| {
            let mut row = Vec::with_capacity(deg as usize + 1);
            let mut p = C64::new(1.0, 0.0);
            row.push(p);
            for _ in 0..deg {
                p *= zv;
                row.push(p);
            }
            row
        })
        .collect()
}

pub(crate) fn monomial_value(powers: &[Vec<C64>], index: &MultiIndex) -> C64 {
    let mut factor = C64::new(1.0, 0.0);
    for (v, &e) in index.exponents().iter().enumerate() {
        factor *= powers[v][e as usize];
    }
    factor
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::{from_real, identity, max_abs, scalar};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn z1_coeff(nvars: usize, value: f64) -> MatrixPoly {
        MatrixPoly::monomial(nvars, MultiIndex::unit(nvars, 0), scalar(c(value)))
    }

    #[test]
    fn add_cancellation_empties_map() {
        let a = z1_coeff(1, 1.0);
        let b = z1_coeff(1, -1.0);
        let s = a.add(&b).unwrap();
        assert!(s.is_zero());
        assert_eq!(s.term_count(), 0);
    }

    #[test]
    fn add_disjoint_supports() {
        let a = MatrixPoly::constant(2, scalar(c(2.0)));
        let b = MatrixPoly::monomial(2, MultiIndex::new(vec![0, 1]), scalar(c(3.0)));
        let s = a.add(&b).unwrap();
        assert_eq!(s.term_count(), 2);
        assert_eq!(s.coeff(&MultiIndex::zero(2)).unwrap()[(0, 0)], c(2.0));
        assert_eq!(s.coeff(&MultiIndex::new(vec![0, 1])).unwrap()[(0, 0)], c(3.0));
    }

    #[test]
    fn add_matches_pointwise_oracle() {
        let mut rng = crate::sample::rng_from_seed(7);
        for _ in 0..10 {
            let a = crate::sample::random_poly(&mut rng, 2, 2, 2, 3);
            let b = crate::sample::random_poly(&mut rng, 2, 2, 2, 3);
            let s = a.add(&b).unwrap();
            for _ in 0..10 {
                let z = crate::sample::random_point(&mut rng, 2, 0.9);
                let lhs = s.evaluate_point(&z).unwrap();
                let rhs = a.evaluate_point(&z).unwrap() + b.evaluate_point(&z).unwrap();
                assert!(max_abs(&(lhs - rhs)) <= 1e-12);
            }
        }
    }

    #[test]
    fn mul_monomials() {
        let a = MatrixPoly::monomial(2, MultiIndex::new(vec![1, 0]), identity(2));
        let b = MatrixPoly::monomial(2, MultiIndex::new(vec![0, 1]), identity(2));
        let p = a.mul(&b).unwrap();
        assert_eq!(p.term_count(), 1);
        assert_eq!(p.coeff(&MultiIndex::new(vec![1, 1])).unwrap(), &identity(2));
    }

    #[test]
    fn mul_hand_convolution() {
        // [1  z1] * (z1; 1) = [2 z1]
        let mut a = MatrixPoly::zero(1, 1, 2);
        a.insert(MultiIndex::zero(1), from_real(1, 2, &[1.0, 0.0]));
        a.add_to_coeff(MultiIndex::unit(1, 0), &from_real(1, 2, &[0.0, 1.0]));
        let mut b = MatrixPoly::zero(1, 2, 1);
        b.insert(MultiIndex::zero(1), from_real(2, 1, &[0.0, 1.0]));
        b.add_to_coeff(MultiIndex::unit(1, 0), &from_real(2, 1, &[1.0, 0.0]));
        let p = a.mul(&b).unwrap();
        assert_eq!(p.term_count(), 1);
        assert_eq!(p.coeff(&MultiIndex::unit(1, 0)).unwrap()[(0, 0)], c(2.0));
        // pointwise oracle
        for z in [c(0.3), C64::new(-0.2, 0.4), c(0.9)] {
            let lhs = p.evaluate_point(&[z]).unwrap()[(0, 0)];
            let rhs = 2.0 * z;
            assert!((lhs - rhs).norm() <= 1e-12);
        }
    }

    #[test]
    fn mul_identity() {
        let mut rng = crate::sample::rng_from_seed(3);
        let b = crate::sample::random_poly(&mut rng, 2, 3, 2, 3);
        let id = MatrixPoly::constant(2, identity(3));
        assert_eq!(id.mul(&b).unwrap(), b);
    }

    #[test]
    fn evaluate_zero_and_affine() {
        let zero = MatrixPoly::zero(2, 2, 2);
        let z = [c(0.5), c(-0.25)];
        assert_eq!(zero.evaluate_point(&z).unwrap(), cmatrix::zeros(2, 2));

        let affine = MatrixPoly::constant(1, identity(1))
            .add(&z1_coeff(1, 1.0))
            .unwrap();
        let v = affine.evaluate_point(&[c(0.5)]).unwrap();
        assert_eq!(v[(0, 0)], c(1.5));
    }

    #[test]
    fn hcat_empty_is_identity() {
        let a = z1_coeff(1, 1.0);
        let b = MatrixPoly::zero(1, 1, 0);
        assert_eq!(a.hcat(&b).unwrap(), a);
    }

    #[test]
    fn shape_errors() {
        let a = MatrixPoly::zero(1, 2, 2);
        let b = MatrixPoly::zero(1, 3, 3);
        assert!(a.add(&b).is_err());
        assert!(a.mul(&b).is_err());
        assert!(a.hcat(&b).is_err());
        assert!(a.evaluate_point(&[c(0.0), c(0.0)]).is_err());
    }

    #[test]
    fn evaluate_is_linear() {
        let mut rng = crate::sample::rng_from_seed(11);
        for _ in 0..10 {
            let a = crate::sample::random_poly(&mut rng, 2, 2, 2, 3);
            let b = crate::sample::random_poly(&mut rng, 2, 2, 2, 3);
            let alpha = C64::new(0.3, -0.7);
            let combo = a.scale(alpha).add(&b).unwrap();
            let z = crate::sample::random_point(&mut rng, 2, 0.9);
            let lhs = combo.evaluate_point(&z).unwrap();
            let rhs = a.evaluate_point(&z).unwrap().map(|x| x * alpha) + b.evaluate_point(&z).unwrap();
            assert!(max_abs(&(lhs - rhs)) <= 1e-12);
        }
    }
}
